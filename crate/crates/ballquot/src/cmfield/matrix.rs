use std::fmt;
use std::sync::Arc;

use super::element::{CmField, Embedding, FieldElement};
use super::CmFieldError;
use crate::numeric::{Mat3, Vec3};

/// Column vector in `F³`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldVector(pub [FieldElement; 3]);

/// 3×3 matrix over `F`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix(pub [[FieldElement; 3]; 3]);

impl fmt::Debug for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in &self.0 {
            writeln!(f, "  [{}, {}, {}]", r[0], r[1], r[2])?;
        }
        write!(f, "]")
    }
}

impl FieldVector {
    pub fn from_ints(field: &Arc<CmField>, v: [i64; 3]) -> Self {
        Self(v.map(|n| FieldElement::from_int(field, n)))
    }

    pub fn unit(field: &Arc<CmField>, i: usize) -> Self {
        let mut v = [0; 3];
        v[i] = 1;
        Self::from_ints(field, v)
    }

    pub fn field(&self) -> &Arc<CmField> {
        self.0[0].field()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(FieldElement::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(FieldElement::is_integral)
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        Self(std::array::from_fn(|i| s * &self.0[i]))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }

    pub fn cm_conjugate(&self) -> Self {
        Self(std::array::from_fn(|i| self.0[i].cm_conjugate()))
    }

    pub fn embed(&self, sigma: Embedding) -> Vec3 {
        Vec3::new(self.0[0].embed(sigma), self.0[1].embed(sigma), self.0[2].embed(sigma))
    }
}

impl FieldMatrix {
    pub fn from_fn(f: impl Fn(usize, usize) -> FieldElement) -> Self {
        Self(std::array::from_fn(|r| std::array::from_fn(|c| f(r, c))))
    }

    pub fn from_ints(field: &Arc<CmField>, m: [[i64; 3]; 3]) -> Self {
        Self::from_fn(|r, c| FieldElement::from_int(field, m[r][c]))
    }

    pub fn identity(field: &Arc<CmField>) -> Self {
        Self::from_fn(|r, c| FieldElement::from_int(field, (r == c) as i64))
    }

    pub fn diag(d: [FieldElement; 3]) -> Self {
        let field = d[0].field().clone();
        Self::from_fn(|r, c| {
            if r == c {
                d[r].clone()
            } else {
                FieldElement::zero(&field)
            }
        })
    }

    pub fn field(&self) -> &Arc<CmField> {
        self.0[0][0].field()
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.0[r][c]
    }

    pub fn column(&self, c: usize) -> FieldVector {
        FieldVector(std::array::from_fn(|r| self.0[r][c].clone()))
    }

    pub fn from_columns(cols: &[FieldVector; 3]) -> Self {
        Self::from_fn(|r, c| cols[c].0[r].clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_fn(|r, c| {
            let mut acc = &self.0[r][0] * &o.0[0][c];
            for k in 1..3 {
                acc = acc + &self.0[r][k] * &o.0[k][c];
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &FieldVector) -> FieldVector {
        FieldVector(std::array::from_fn(|r| {
            let mut acc = &self.0[r][0] * &v.0[0];
            for k in 1..3 {
                acc = acc + &self.0[r][k] * &v.0[k];
            }
            acc
        }))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(|r, c| &self.0[r][c] + &o.0[r][c])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(|r, c| &self.0[r][c] - &o.0[r][c])
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        Self::from_fn(|r, c| s * &self.0[r][c])
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(|r, c| -&self.0[r][c])
    }

    /// Conjugate transpose under the CM involution.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(|r, c| self.0[c][r].cm_conjugate())
    }

    pub fn cm_conjugate(&self) -> Self {
        Self::from_fn(|r, c| self.0[r][c].cm_conjugate())
    }

    pub fn trace(&self) -> FieldElement {
        &(&self.0[0][0] + &self.0[1][1]) + &self.0[2][2]
    }

    pub fn det(&self) -> FieldElement {
        let m = &self.0;
        let t1 = &m[0][0] * &(&(&m[1][1] * &m[2][2]) - &(&m[1][2] * &m[2][1]));
        let t2 = &m[0][1] * &(&(&m[1][0] * &m[2][2]) - &(&m[1][2] * &m[2][0]));
        let t3 = &m[0][2] * &(&(&m[1][0] * &m[2][1]) - &(&m[1][1] * &m[2][0]));
        &(&t1 - &t2) + &t3
    }

    pub fn adjugate(&self) -> Self {
        let m = &self.0;
        let cof = |r: usize, c: usize| {
            let rs: Vec<usize> = (0..3).filter(|&i| i != r).collect();
            let cs: Vec<usize> = (0..3).filter(|&i| i != c).collect();
            let d = &(&m[rs[0]][cs[0]] * &m[rs[1]][cs[1]]) - &(&m[rs[0]][cs[1]] * &m[rs[1]][cs[0]]);
            if (r + c) % 2 == 0 {
                d
            } else {
                -d
            }
        };
        Self::from_fn(|r, c| cof(c, r))
    }

    pub fn inverse(&self) -> Result<Self, CmFieldError> {
        let d = self.det();
        let di = d.inv().map_err(|_| CmFieldError::SingularMatrix)?;
        Ok(self.adjugate().scale(&di))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.field());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        (0..3).all(|r| {
            (0..3).all(|c| {
                let e = &self.0[r][c];
                if r == c {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().flatten().all(FieldElement::is_integral)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..3).all(|r| (0..3).all(|c| r == c || self.0[r][c].is_zero()))
    }

    pub fn embed(&self, sigma: Embedding) -> Mat3 {
        Mat3::from_fn(|r, c| self.0[r][c].embed(sigma))
    }

    /// Basis of `{x : M x = 0}` by exact Gaussian elimination.
    pub fn kernel(&self) -> Vec<FieldVector> {
        let field = self.field().clone();
        let mut a: Vec<Vec<FieldElement>> = self.0.iter().map(|r| r.to_vec()).collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut row = 0;
        for col in 0..3 {
            let Some(p) = (row..3).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            let inv = a[row][col].inv().expect("nonzero pivot");
            for c in 0..3 {
                a[row][c] = &a[row][c] * &inv;
            }
            for r in 0..3 {
                if r != row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..3 {
                        a[r][c] = &a[r][c] - &(&f * &a[row][c]);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let free: Vec<usize> = (0..3).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v: [FieldElement; 3] = std::array::from_fn(|_| FieldElement::zero(&field));
                v[fc] = FieldElement::one(&field);
                for (pr, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&a[pr][fc];
                }
                FieldVector(v)
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        3 - self.kernel().len()
    }
}

/// `⟨z, w⟩ = w^H J z` over `F`.
pub fn herm_exact(j: &FieldMatrix, z: &FieldVector, w: &FieldVector) -> FieldElement {
    let jz = j.mul_vec(z);
    let mut acc = &w.0[0].cm_conjugate() * &jz.0[0];
    for i in 1..3 {
        acc = acc + &w.0[i].cm_conjugate() * &jz.0[i];
    }
    acc
}
