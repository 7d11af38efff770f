use serde::Serialize;

use super::triples::{search_order_bound, EigenTriple};
use super::{exact_order, ArithmeticLattice, LatticeError};
use crate::cmfield::{herm_exact, Embedding, FieldElement, FieldMatrix, FieldVector};
use crate::isometry::{classify, Eigenframe, FixedLocus, Isometry, IsometryLabel};
use crate::numeric::{self, Mat3, Vec3, C64};
use crate::par::{self, Execution};

/// Hard cap on the number of column combinations examined per column slot.
pub const ENUMERATION_BUDGET: u128 = 50_000_000;
/// Hard cap on the number of entry coordinates scanned, `(2·cap + 1)⁴`.
pub const RAW_ENTRY_BUDGET: u128 = 1_000_000;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TorsionLocus {
    Whole,
    Point { point: [[f64; 2]; 3] },
    Line { polar: [[f64; 2]; 3] },
}

#[derive(Clone, Debug)]
pub struct TorsionDatum {
    pub element: Isometry,
    pub label: IsometryLabel,
    pub order: u32,
    pub triple: Option<EigenTriple>,
    pub eigenvalues: [C64; 3],
    pub frame: Eigenframe,
    /// Projective representative of the fixed point or polar, first nonzero coordinate from the end scaled to 1.
    pub locus_vector: Option<Vec3>,
    /// Exact eigenvector for eigenvalue 1 when that eigenspace is a line.
    pub one_eigenvector: Option<FieldVector>,
}

impl TorsionDatum {
    pub fn matrix(&self) -> &FieldMatrix {
        self.element.exact_matrix().expect("lattice elements are exact")
    }

    pub fn locus(&self) -> TorsionLocus {
        match (self.label, &self.locus_vector) {
            (IsometryLabel::ReflectionAboutLine, Some(v)) => TorsionLocus::Line {
                polar: crate::ball::vector_pairs(v),
            },
            (_, Some(v)) => TorsionLocus::Point {
                point: crate::ball::vector_pairs(v),
            },
            (_, None) => TorsionLocus::Whole,
        }
    }

    fn same_class(&self, other: &Self) -> bool {
        if self.label != other.label {
            return false;
        }
        let same_locus = match (&self.locus_vector, &other.locus_vector) {
            (Some(a), Some(b)) => (a - b).norm() < 1e-9,
            (None, None) => true,
            _ => false,
        };
        same_locus && eigen_key_eq(&self.eigenvalues, &other.eigenvalues)
    }
}

/// Equal eigenvalue multisets up to complex conjugation, so `M` and `M⁻¹` merge.
fn eigen_key_eq(a: &[C64; 3], b: &[C64; 3]) -> bool {
    let key = |e: &[C64; 3]| {
        let mut k: Vec<(f64, f64)> = e.iter().map(|z| (z.re, z.im.abs())).collect();
        k.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        k
    };
    key(a)
        .iter()
        .zip(key(b).iter())
        .all(|(x, y)| (x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9)
}

/// Scales so that the last coordinate with modulus above 1e-9 equals 1.
fn projective_normal(v: &Vec3) -> Vec3 {
    for i in (0..3).rev() {
        if v[i].norm() > 1e-9 {
            return v / v[i];
        }
    }
    *v
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub height_cap: u32,
    pub order_bound: u32,
    pub column_combinations: u128,
    pub members_found: usize,
    pub data: Vec<TorsionDatum>,
}

struct Entry {
    value: FieldElement,
    s1: C64,
    s2: C64,
}

/// Entries of height at most `cap` whose σ2-image satisfies `|x|² ≤ bound`, built exactly only after the float filter.
fn entries(lat: &ArithmeticLattice, cap: i64, bound: f64) -> Vec<Entry> {
    let f = lat.field();
    let basis: Vec<(C64, C64)> = (0..4)
        .map(|i| {
            let mut q = [0i64; 4];
            q[i] = 1;
            let e = FieldElement::from_int_quad(f, q);
            (e.embed(Embedding::Sigma1), e.embed(Embedding::Sigma2))
        })
        .collect();
    let r = -cap..=cap;
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    let q = [a, b, c, d];
                    let s2: C64 = q.iter().zip(&basis).map(|(&k, e)| e.1 * k as f64).sum();
                    if s2.norm_sqr() > bound {
                        continue;
                    }
                    let s1: C64 = q.iter().zip(&basis).map(|(&k, e)| e.0 * k as f64).sum();
                    out.push(Entry {
                        value: FieldElement::from_int_quad(f, q),
                        s1,
                        s2,
                    });
                }
            }
        }
    }
    out
}

/// Largest admissible `|x|²` at σ2 for an entry of column `k`.
fn sigma2_bound(j2: &Mat3, k: usize) -> f64 {
    let sgn = if j2[(0, 0)].re < 0.0 { -1.0 } else { 1.0 };
    let j2d = j2 * numeric::real(sgn);
    let lmin = numeric::hermitian_eigenvalues(&j2d)[2];
    (sgn * j2[(k, k)].re) / lmin * (1.0 + 1e-9) + 1e-9
}

struct Column {
    v: FieldVector,
    s1: Vec3,
    s2: Vec3,
}

fn close(a: C64, b: C64, scale: f64) -> bool {
    (a - b).norm() <= 1e-8 * scale.max(1.0)
}

/// Columns `m` with `⟨m, m⟩ = J_kk`, pruned by definiteness of `J^{σ2}`.
fn columns_for(
    lat: &ArithmeticLattice,
    ents: &[Entry],
    k: usize,
    j1: &Mat3,
    j2: &Mat3,
    budget: u128,
) -> Result<(Vec<Column>, u128), LatticeError> {
    let bound = sigma2_bound(j2, k);
    let small: Vec<usize> = (0..ents.len()).filter(|&i| ents[i].s2.norm_sqr() <= bound).collect();
    let needed = (small.len() as u128).pow(3);
    if needed > budget {
        return Err(LatticeError::BudgetExceeded { needed, budget });
    }
    let j = lat.j();
    let jkk = j.get(k, k);
    let jkk1 = j1[(k, k)];
    let jkk2 = j2[(k, k)];
    let mut out = Vec::new();
    for &a in &small {
        let na = ents[a].s2.norm_sqr();
        for &b in &small {
            let nb = ents[b].s2.norm_sqr();
            if na + nb > bound {
                continue;
            }
            for &c in &small {
                if na + nb + ents[c].s2.norm_sqr() > bound {
                    continue;
                }
                let s1 = Vec3::new(ents[a].s1, ents[b].s1, ents[c].s1);
                let s2 = Vec3::new(ents[a].s2, ents[b].s2, ents[c].s2);
                if !close(numeric::herm(j1, &s1, &s1), jkk1, jkk1.norm())
                    || !close(numeric::herm(j2, &s2, &s2), jkk2, jkk2.norm())
                {
                    continue;
                }
                let v = FieldVector([ents[a].value.clone(), ents[b].value.clone(), ents[c].value.clone()]);
                if herm_exact(j, &v, &v) == *jkk {
                    out.push(Column { v, s1, s2 });
                }
            }
        }
    }
    Ok((out, needed))
}

fn pair_ok(lat: &ArithmeticLattice, j1: &Mat3, j2: &Mat3, a: &Column, b: &Column, l: usize, k: usize) -> bool {
    // ⟨col_k, col_l⟩ = b^H J a = J_lk
    let t1 = j1[(l, k)];
    let t2 = j2[(l, k)];
    close(numeric::herm(j1, &a.s1, &b.s1), t1, t1.norm())
        && close(numeric::herm(j2, &a.s2, &b.s2), t2, t2.norm())
        && herm_exact(lat.j(), &a.v, &b.v) == *lat.j().get(l, k)
}

/// Exact enumeration of torsion members with entry heights at most `height_cap`.
///
/// Members are deduplicated by fixed locus and eigenvalues up to conjugation;
/// the representative is the first in lexicographic enumeration order.
pub fn torsion_search(lat: &ArithmeticLattice, height_cap: u32, exec: Execution) -> Result<SearchReport, LatticeError> {
    let raw = (2 * height_cap as u128 + 1).pow(4);
    if raw > RAW_ENTRY_BUDGET {
        return Err(LatticeError::BudgetExceeded {
            needed: raw,
            budget: RAW_ENTRY_BUDGET,
        });
    }
    let j1 = lat.form().matrix_at(Embedding::Sigma1)?;
    let j2 = lat.form().matrix_at(Embedding::Sigma2)?;
    let max_bound = (0..3).map(|k| sigma2_bound(&j2, k)).fold(0.0, f64::max);
    let ents = entries(lat, height_cap as i64, max_bound);
    let mut cols = Vec::new();
    let mut combos = 0u128;
    for k in 0..3 {
        let (c, n) = columns_for(lat, &ents, k, &j1, &j2, ENUMERATION_BUDGET)?;
        combos += n;
        cols.push(c);
    }
    let bound = search_order_bound(lat.field());
    let (c0, c1, c2) = (&cols[0], &cols[1], &cols[2]);
    let per_first: Vec<Vec<TorsionDatum>> = par::map(exec, c0, |a| {
        let mut found = Vec::new();
        for b in c1.iter().filter(|b| pair_ok(lat, &j1, &j2, a, b, 1, 0)) {
            for c in c2
                .iter()
                .filter(|c| pair_ok(lat, &j1, &j2, a, c, 2, 0) && pair_ok(lat, &j1, &j2, b, c, 2, 1))
            {
                let m = FieldMatrix::from_columns(&[a.v.clone(), b.v.clone(), c.v.clone()]);
                if !m.det().is_one() {
                    continue;
                }
                let Some(order) = exact_order(&m, bound) else { continue };
                if let Some(d) = datum(lat, m, order) {
                    found.push(d);
                }
            }
        }
        found
    });
    let all: Vec<TorsionDatum> = per_first.into_iter().flatten().collect();
    let members_found = all.len();
    // the identity is always reported, even when no entry of height ≤ cap equals 1
    let identity = datum(lat, FieldMatrix::identity(lat.field()), 1).expect("identity is a member");
    let mut data: Vec<TorsionDatum> = vec![identity];
    for d in all {
        if !data.iter().any(|e| e.same_class(&d)) {
            data.push(d);
        }
    }
    data.sort_by_key(|d| (d.order, d.label));
    Ok(SearchReport {
        height_cap,
        order_bound: bound,
        column_combinations: combos,
        members_found,
        data,
    })
}

/// Classifies an exact torsion member; `None` if it is not a finite-order member.
pub(super) fn datum(lat: &ArithmeticLattice, m: FieldMatrix, order: u32) -> Option<TorsionDatum> {
    let iso = Isometry::exact(lat.form().clone(), m.clone()).ok()?;
    let cls = classify(&iso).ok()?;
    let frame = cls.eigenframe?;
    let locus_vector = match &cls.fixed_locus {
        FixedLocus::Point(v) => Some(projective_normal(v)),
        FixedLocus::Line { polar } => Some(projective_normal(polar)),
        _ => None,
    };
    let f = lat.field();
    let ker = m.sub(&FieldMatrix::identity(f)).kernel();
    let one_eigenvector = (ker.len() == 1).then(|| ker[0].clone());
    let triple = EigenTriple::from_trace(&m.trace()).filter(|e| e.order() == order);
    Some(TorsionDatum {
        element: iso,
        label: cls.label,
        order,
        triple,
        eigenvalues: cls.eigenvalues,
        frame,
        locus_vector,
        one_eigenvector,
    })
}

/// Builds the torsion datum for a supplied member.
pub fn torsion_datum(lat: &ArithmeticLattice, m: FieldMatrix) -> Result<TorsionDatum, LatticeError> {
    if !lat.is_member(&m).member {
        return Err(LatticeError::NotTorsion);
    }
    let order = exact_order(&m, search_order_bound(lat.field())).ok_or(LatticeError::NotTorsion)?;
    datum(lat, m, order).ok_or(LatticeError::NotTorsion)
}
