//! Hermitian forms on `F³` and `C³`: evaluation, signatures, the tance
//! invariant and transforms to the standard form `diag(1, 1, −1)`.

use std::cmp::Ordering;
use std::sync::Arc;

use thiserror::Error;

use crate::cmfield::{herm_exact, CmField, Embedding, FieldElement, FieldMatrix, FieldVector, KElement, RealEmbedding};
use crate::numeric::{self, herm, real, Mat3, Vec3, C64};

/// Threshold below which a numeric eigenvalue or pivot counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("form is degenerate")]
    Degenerate,
    #[error("expected signature {expected:?}, found {found:?}")]
    WrongSignature {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("null vector where a non-null vector is required")]
    NullVector,
    #[error("operation needs an exact form")]
    NotExact,
    #[error("vector does not live in the field of the form")]
    FieldMismatch,
}

/// Sign of `⟨v, v⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum SignClass {
    Negative,
    Null,
    Positive,
}

#[derive(Clone, Debug)]
enum Entries {
    Exact(FieldMatrix),
    Numeric,
}

/// A nondegenerate Hermitian form `⟨z, w⟩ = w^H J z`.
///
/// Exact forms live over `F` and are evaluated numerically through `σ1`;
/// numeric forms are plain complex matrices.
#[derive(Clone, Debug)]
pub struct HermitianForm {
    entries: Entries,
    numeric: Mat3,
    signature: (usize, usize),
    signature_sigma2: Option<(usize, usize)>,
}

impl HermitianForm {
    pub fn exact(j: FieldMatrix) -> Result<Self, FormError> {
        if j.adjoint() != j {
            return Err(FormError::NotHermitian);
        }
        let signature = exact_signature(&j, RealEmbedding::Plus)?;
        let signature_sigma2 = Some(exact_signature(&j, RealEmbedding::Minus)?);
        Ok(Self {
            numeric: j.embed(Embedding::Sigma1),
            entries: Entries::Exact(j),
            signature,
            signature_sigma2,
        })
    }

    pub fn numeric(j: Mat3) -> Result<Self, FormError> {
        let scale = numeric::max_abs(&j).max(1.0);
        if numeric::max_abs(&(j - j.adjoint())) > 1e-12 * scale {
            return Err(FormError::NotHermitian);
        }
        let j = (j + j.adjoint()) * real(0.5);
        let signature = numeric_signature(&j)?;
        Ok(Self {
            entries: Entries::Numeric,
            numeric: j,
            signature,
            signature_sigma2: None,
        })
    }

    /// `diag(1, 1, −1)`.
    pub fn standard() -> Self {
        Self::numeric(std_matrix()).expect("standard form")
    }

    /// `diag(1, 1, −√D)` over `F`.
    pub fn diagonal_sqrt_d(field: &Arc<CmField>) -> Self {
        let one = FieldElement::one(field);
        let j = FieldMatrix::diag([one.clone(), one, -FieldElement::sqrt_d(field)]);
        Self::exact(j).expect("diag(1,1,-sqrt D) is Hermitian and nondegenerate")
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.entries, Entries::Exact(_))
    }

    pub fn exact_matrix(&self) -> Option<&FieldMatrix> {
        match &self.entries {
            Entries::Exact(m) => Some(m),
            Entries::Numeric => None,
        }
    }

    pub fn field(&self) -> Option<&Arc<CmField>> {
        self.exact_matrix().map(|m| m.field())
    }

    /// The complex matrix used for numeric work (`σ1` image for exact forms).
    pub fn matrix(&self) -> &Mat3 {
        &self.numeric
    }

    /// The complex matrix under a given embedding.
    pub fn matrix_at(&self, sigma: Embedding) -> Result<Mat3, FormError> {
        match (&self.entries, sigma) {
            (Entries::Exact(m), s) => Ok(m.embed(s)),
            (Entries::Numeric, Embedding::Sigma1) => Ok(self.numeric),
            (Entries::Numeric, Embedding::Sigma1Bar) => Ok(self.numeric.map(|z| z.conj())),
            (Entries::Numeric, _) => Err(FormError::NotExact),
        }
    }

    pub fn eval(&self, z: &Vec3, w: &Vec3) -> C64 {
        herm(&self.numeric, z, w)
    }

    pub fn eval_exact(&self, z: &FieldVector, w: &FieldVector) -> Result<FieldElement, FormError> {
        let j = self.exact_matrix().ok_or(FormError::NotExact)?;
        Ok(herm_exact(j, z, w))
    }

    pub fn norm_sq(&self, v: &Vec3) -> f64 {
        self.eval(v, v).re
    }

    /// `(positives, negatives)` at the working embedding.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn signature_at(&self, sigma: Embedding) -> Result<(usize, usize), FormError> {
        match sigma {
            Embedding::Sigma1 | Embedding::Sigma1Bar => Ok(self.signature),
            _ => self.signature_sigma2.ok_or(FormError::NotExact),
        }
    }

    /// Signature `(2, 1)` at `σ1` and definite at `σ2`.
    pub fn is_admissible(&self) -> Result<bool, FormError> {
        let s2 = self.signature_sigma2.ok_or(FormError::NotExact)?;
        Ok(self.signature == (2, 1) && (s2 == (3, 0) || s2 == (0, 3)))
    }

    /// Sign class with a relative threshold.
    pub fn sign_class(&self, v: &Vec3) -> SignClass {
        let h = self.norm_sq(v);
        let scale = v.norm_squared() * numeric::max_abs(&self.numeric).max(f64::MIN_POSITIVE);
        if h.abs() <= DEGENERACY_TOL * scale {
            SignClass::Null
        } else if h < 0.0 {
            SignClass::Negative
        } else {
            SignClass::Positive
        }
    }

    /// Exact sign class at `σ1`.
    pub fn sign_class_exact(&self, v: &FieldVector) -> Result<SignClass, FormError> {
        let h = self.eval_exact(v, v)?;
        Ok(match h.real_sign(RealEmbedding::Plus).expect("⟨v,v⟩ is real") {
            Ordering::Less => SignClass::Negative,
            Ordering::Equal => SignClass::Null,
            Ordering::Greater => SignClass::Positive,
        })
    }

    /// `⟨u,v⟩⟨v,u⟩ / (⟨u,u⟩⟨v,v⟩)`.
    pub fn tance(&self, u: &Vec3, v: &Vec3) -> Result<f64, FormError> {
        let uu = self.norm_sq(u);
        let vv = self.norm_sq(v);
        if self.sign_class(u) == SignClass::Null || self.sign_class(v) == SignClass::Null {
            return Err(FormError::NullVector);
        }
        Ok(self.eval(u, v).norm_sqr() / (uu * vv))
    }

    /// Exact tance, an element of `K`.
    pub fn tance_exact(&self, u: &FieldVector, v: &FieldVector) -> Result<KElement, FormError> {
        let uv = self.eval_exact(u, v)?;
        let uu = self.eval_exact(u, u)?;
        let vv = self.eval_exact(v, v)?;
        let den = &uu * &vv;
        if den.is_zero() {
            return Err(FormError::NullVector);
        }
        let t = uv.abs_squared();
        let k = uu.field().base();
        Ok(k.div(&t, &den.real_part()).expect("nonzero denominator"))
    }

    /// `T` with `J = T^H · diag(1,1,−1) · T`; points map to standard coordinates by `v ↦ T v`.
    pub fn cayley_to_std(&self) -> Result<Mat3, FormError> {
        if self.signature != (2, 1) {
            return Err(FormError::WrongSignature {
                expected: (2, 1),
                found: self.signature,
            });
        }
        let j = &self.numeric;
        let t = ldl_transform(j).unwrap_or_else(|| eigen_transform(j));
        Ok(t)
    }
}

pub fn std_matrix() -> Mat3 {
    Mat3::from_diagonal(&Vec3::new(real(1.0), real(1.0), real(-1.0)))
}

/// Unpivoted `J = L D L^H`; accepted only when the pivot signs are `(+, +, −)`.
fn ldl_transform(j: &Mat3) -> Option<Mat3> {
    let scale = numeric::max_abs(j);
    let mut l = Mat3::identity();
    let mut d = [0.0f64; 3];
    for k in 0..3 {
        let mut s = j[(k, k)].re;
        for p in 0..k {
            s -= l[(k, p)].norm_sqr() * d[p];
        }
        d[k] = s;
        if s.abs() <= 1e-8 * scale {
            return None;
        }
        for i in (k + 1)..3 {
            let mut v = j[(i, k)];
            for p in 0..k {
                v -= l[(i, p)] * l[(k, p)].conj() * d[p];
            }
            l[(i, k)] = v / d[k];
        }
    }
    if !(d[0] > 0.0 && d[1] > 0.0 && d[2] < 0.0) {
        return None;
    }
    let sq = Mat3::from_diagonal(&Vec3::new(real(d[0].sqrt()), real(d[1].sqrt()), real((-d[2]).sqrt())));
    Some(sq * l.adjoint())
}

/// Fallback: `T = |Λ|^{1/2} U^H` with eigenvalues in descending order.
fn eigen_transform(j: &Mat3) -> Mat3 {
    let eig = j.symmetric_eigen();
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).expect("finite"));
    let mut t = Mat3::zeros();
    for (row, &k) in idx.iter().enumerate() {
        let lam = eig.eigenvalues[k].abs().sqrt();
        let u = numeric::normalize_phase(&eig.eigenvectors.column(k).into_owned());
        for c in 0..3 {
            t[(row, c)] = u[c].conj() * lam;
        }
    }
    t
}

fn numeric_signature(j: &Mat3) -> Result<(usize, usize), FormError> {
    let ev = numeric::hermitian_eigenvalues(j);
    if ev.iter().any(|x| x.abs() < DEGENERACY_TOL) {
        return Err(FormError::Degenerate);
    }
    let p = ev.iter().filter(|&&x| x > 0.0).count();
    Ok((p, 3 - p))
}

/// Exact signature by Hermitian congruence: repeatedly split off a nonzero
/// diagonal pivot and pass to the Schur complement. Signs of the pivots are
/// decided exactly under the chosen real embedding of `K`.
pub fn exact_signature(j: &FieldMatrix, r: RealEmbedding) -> Result<(usize, usize), FormError> {
    let field = j.field().clone();
    let mut a: Vec<Vec<FieldElement>> = j.0.iter().map(|row| row.to_vec()).collect();
    let (mut pos, mut neg) = (0usize, 0usize);
    while !a.is_empty() {
        let n = a.len();
        let mut piv = (0..n).find(|&i| !a[i][i].is_zero());
        if piv.is_none() {
            // all diagonal entries vanish: e_i + conj(a_ij) e_j has norm 2|a_ij|²
            let Some((i, jj)) = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .find(|&(i, j)| i != j && !a[i][j].is_zero())
            else {
                return Err(FormError::Degenerate);
            };
            let c = a[i][jj].cm_conjugate();
            // row_i += conj(c) row_j ; col_i += c col_j
            let cc = c.cm_conjugate();
            for k in 0..n {
                let add = &cc * &a[jj][k];
                a[i][k] = &a[i][k] + &add;
            }
            for k in 0..n {
                let add = &a[k][jj] * &c;
                a[k][i] = &a[k][i] + &add;
            }
            piv = Some(i);
        }
        let p = piv.expect("pivot chosen");
        let d = a[p][p].clone();
        match d.real_sign(r).expect("diagonal of a Hermitian matrix is real") {
            Ordering::Greater => pos += 1,
            Ordering::Less => neg += 1,
            Ordering::Equal => unreachable!("pivot is nonzero"),
        }
        let dinv = d.inv().expect("nonzero pivot");
        let rest: Vec<usize> = (0..n).filter(|&i| i != p).collect();
        let next: Vec<Vec<FieldElement>> = rest
            .iter()
            .map(|&r_| {
                rest.iter()
                    .map(|&c| &a[r_][c] - &(&(&a[r_][p] * &dinv) * &a[p][c]))
                    .collect()
            })
            .collect();
        a = next;
        let _ = &field;
    }
    Ok((pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;
    use proptest::prelude::*;

    fn f5() -> Arc<CmField> {
        CmField::from_ints(5, -11, 0).unwrap()
    }

    #[test]
    fn evaluate_standard_examples() {
        let j = HermitianForm::standard();
        let e3 = Vec3::new(real(0.0), real(0.0), real(1.0));
        assert_eq!(j.eval(&e3, &e3), real(-1.0));
        let z = Vec3::new(c(0.3, -0.2), c(0.1, 0.4), real(1.0));
        assert!((j.eval(&z, &e3) - real(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn tance_of_origin_and_point() {
        let j = HermitianForm::standard();
        let o = Vec3::new(real(0.0), real(0.0), real(1.0));
        let (z, w) = (c(0.3, 0.1), c(-0.2, 0.25));
        let p = Vec3::new(z, w, real(1.0));
        let want = 1.0 / (1.0 - z.norm_sqr() - w.norm_sqr());
        assert!((j.tance(&o, &p).unwrap() - want).abs() < 1e-14);
        assert!((j.tance(&p, &p).unwrap() - 1.0).abs() < 1e-14);
        let null = Vec3::new(real(1.0), real(0.0), real(1.0));
        assert_eq!(j.tance(&null, &p), Err(FormError::NullVector));
    }

    #[test]
    fn signatures_of_diag_sqrt_d() {
        let f = f5();
        let j = HermitianForm::diagonal_sqrt_d(&f);
        assert_eq!(j.signature_at(Embedding::Sigma1).unwrap(), (2, 1));
        assert_eq!(j.signature_at(Embedding::Sigma2).unwrap(), (3, 0));
        assert!(j.is_admissible().unwrap());
        let jstd = HermitianForm::exact(FieldMatrix::from_ints(&f, [[1, 0, 0], [0, 1, 0], [0, 0, -1]])).unwrap();
        assert_eq!(jstd.signature_at(Embedding::Sigma2).unwrap(), (2, 1));
        assert!(!jstd.is_admissible().unwrap());
    }

    #[test]
    fn exact_signature_handles_zero_diagonal() {
        let f = f5();
        let j = FieldMatrix::from_ints(&f, [[0, 1, 0], [1, 0, 0], [0, 0, 1]]);
        assert_eq!(exact_signature(&j, RealEmbedding::Plus).unwrap(), (2, 1));
        let r = FieldElement::rho(&f);
        let z = FieldElement::zero(&f);
        let o = FieldElement::one(&f);
        let j2 = FieldMatrix([
            [z.clone(), r.clone(), z.clone()],
            [r.cm_conjugate(), z.clone(), z.clone()],
            [z.clone(), z.clone(), -o],
        ]);
        assert_eq!(exact_signature(&j2, RealEmbedding::Plus).unwrap(), (1, 2));
        let sing = FieldMatrix::from_ints(&f, [[1, 1, 0], [1, 1, 0], [0, 0, 1]]);
        assert_eq!(exact_signature(&sing, RealEmbedding::Plus), Err(FormError::Degenerate));
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let f = f5();
        let r = FieldElement::rho(&f);
        let mut j = FieldMatrix::identity(&f);
        j.0[0][1] = r.clone();
        j.0[1][0] = r;
        assert_eq!(HermitianForm::exact(j).unwrap_err(), FormError::NotHermitian);
    }

    #[test]
    fn cayley_canonical_cases() {
        let t = HermitianForm::standard().cayley_to_std().unwrap();
        assert!((t - Mat3::identity()).norm() < 1e-15);
        let j = Mat3::from_diagonal(&Vec3::new(real(1.0), real(1.0), real(-4.0)));
        let t = HermitianForm::numeric(j).unwrap().cayley_to_std().unwrap();
        let want = Mat3::from_diagonal(&Vec3::new(real(1.0), real(1.0), real(2.0)));
        assert!((t - want).norm() < 1e-14);
    }

    #[test]
    fn cayley_fallback_when_leading_minor_is_negative() {
        let j = Mat3::from_diagonal(&Vec3::new(real(-2.0), real(1.0), real(3.0)));
        let form = HermitianForm::numeric(j).unwrap();
        let t = form.cayley_to_std().unwrap();
        let res = t.adjoint() * std_matrix() * t - j;
        assert!(res.norm() < 1e-12);
    }

    #[test]
    fn exact_tance_matches_numeric() {
        let f = f5();
        let j = HermitianForm::diagonal_sqrt_d(&f);
        let u = FieldVector::from_ints(&f, [1, 0, 1]);
        let v = FieldVector([
            FieldElement::rho(&f),
            FieldElement::omega(&f),
            FieldElement::from_int_quad(&f, [2, 0, 0, 0]),
        ]);
        let te = j.tance_exact(&u, &v).unwrap();
        let tn = j
            .tance(&u.embed(Embedding::Sigma1), &v.embed(Embedding::Sigma1))
            .unwrap();
        assert!((f.base().embed(&te, RealEmbedding::Plus) - tn).abs() < 1e-12 * (1.0 + tn.abs()));
    }

    fn cvec() -> impl Strategy<Value = Vec3> {
        prop::array::uniform6(-1.0f64..1.0).prop_map(|a| Vec3::new(c(a[0], a[1]), c(a[2], a[3]), c(a[4], a[5])))
    }

    fn neg_point() -> impl Strategy<Value = Vec3> {
        (prop::array::uniform4(-0.45f64..0.45)).prop_map(|a| Vec3::new(c(a[0], a[1]), c(a[2], a[3]), real(1.0)))
    }

    fn invertible() -> impl Strategy<Value = Mat3> {
        prop::array::uniform18(-1.0f64..1.0).prop_filter_map("singular", |a| {
            let m =
                Mat3::from_fn(|r, cc| c(a[2 * (3 * r + cc)], a[2 * (3 * r + cc) + 1])) + Mat3::identity() * real(2.0);
            (m.determinant().norm() > 0.1).then_some(m)
        })
    }

    proptest! {
        #[test]
        fn hermitian_symmetry(z in cvec(), w in cvec()) {
            let j = HermitianForm::standard();
            prop_assert!((j.eval(&z, &w) - j.eval(&w, &z).conj()).norm() < 1e-14);
        }

        #[test]
        fn tance_is_scale_invariant(u in neg_point(), v in neg_point(), s in prop::array::uniform2(0.1f64..3.0)) {
            let j = HermitianForm::standard();
            let lam = c(s[0], s[1]);
            let a = j.tance(&u, &v).unwrap();
            let b = j.tance(&(u * lam), &v).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs());
            prop_assert!(a >= 1.0 - 1e-12);
        }

        #[test]
        fn positive_negative_tance_nonpositive(u in neg_point(), p in cvec()) {
            let j = HermitianForm::standard();
            prop_assume!(j.norm_sq(&p) > 1e-3);
            prop_assert!(j.tance(&p, &u).unwrap() <= 1e-14);
        }

        #[test]
        fn cayley_round_trip(s in invertible()) {
            let j = s.adjoint() * std_matrix() * s;
            let form = HermitianForm::numeric(j).unwrap();
            prop_assert_eq!(form.signature(), (2, 1));
            let t = form.cayley_to_std().unwrap();
            let res = t.adjoint() * std_matrix() * t - j;
            prop_assert!(res.norm() <= 1e-10 * j.norm().max(1.0));
        }

        #[test]
        fn signature_is_congruence_invariant(s in invertible()) {
            let j = Mat3::from_diagonal(&Vec3::new(real(3.0), real(-1.0), real(-2.0)));
            let jj = s.adjoint() * j * s;
            let form = HermitianForm::numeric(jj).unwrap();
            prop_assert_eq!(form.signature(), (1, 2));
        }

        #[test]
        fn tance_is_isometry_invariant(u in neg_point(), v in neg_point(), sh in -1.5f64..1.5, th in -3.0f64..3.0) {
            let j = HermitianForm::standard();
            let (ch, shh) = (sh.cosh(), sh.sinh());
            let m = Mat3::new(real(ch), real(0.0), real(shh), real(0.0), C64::from_polar(1.0, th), real(0.0), real(shh), real(0.0), real(ch));
            let a = j.tance(&u, &v).unwrap();
            let b = j.tance(&(m * u), &(m * v)).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs());
        }
    }
}
