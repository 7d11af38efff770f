//! Hodge structure attached to a point of the ball.
//!
//! `H_Z = O³` for the order `O = O_K[√α]` is a rank-12 lattice. Over `C` it
//! splits into the four embedding blocks `(σ1, σ̄1, σ2, σ̄2)`, each a copy of
//! `C³`. A negative vector `v` picks
//!
//! `H^{−1,0} = C·v ⊕ conj(v^⊥) ⊕ 0 ⊕ C³`
//!
//! with the full block placed on whichever of `σ2`, `σ̄2` makes `−iQ` positive
//! there, where `Q(u, w) = Tr_{F/Q}(α_F·h(u, w))` is the integral polarization.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ball::BallPoint;
use crate::cmfield::{herm_exact, CmField, CmFieldError, Embedding, FieldElement, FieldMatrix, FieldVector};
use crate::hermitian::{FormError, HermitianForm};
use crate::numeric::{c, herm, null_space, Mat3, Vec3, C64};

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-8;
/// Riemann-relation isotropy threshold on unit-normalized frame vectors.
pub const ISOTROPY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum HodgeError {
    #[error("the Hermitian form must have exact entries")]
    NotExact,
    #[error("alpha must be purely imaginary")]
    AlphaNotImaginary,
    #[error("alpha must be nonzero")]
    AlphaZero,
    #[error("Tr(alpha*h) is not an integer at ({row}, {col}): {value}")]
    NonIntegral { row: usize, col: usize, value: String },
    #[error("polarization entry ({0}, {1}) does not fit in i64")]
    Overflow(usize, usize),
    #[error("point is not negative under sigma_1")]
    NotNegative,
    #[error("degenerate frame: {0}")]
    Degenerate(String),
    #[error("matrix does not act integrally on the lattice")]
    NotIntegralAction,
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Field(#[from] CmFieldError),
}

/// Position of embedding `σ` in the 12-coordinate vector.
fn block(sigma: Embedding) -> usize {
    3 * (sigma.index() - 1)
}

/// The rank-12 lattice `O³`, basis ordered as coordinate-major products
/// `(1, ω, ρ, ωρ) × (e₁, e₂, e₃)`.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    field: Arc<CmField>,
    vectors: Vec<FieldVector>,
    /// Columns are the images of the basis vectors in `H_C`.
    embedding: DMatrix<C64>,
}

impl LatticeBasis {
    pub fn new(field: &Arc<CmField>) -> Self {
        let mut vectors = Vec::with_capacity(12);
        for m in 0..3 {
            for i in 0..4 {
                let mut q = [0i64; 4];
                q[i] = 1;
                let zero = FieldElement::zero(field);
                let mut v = [zero.clone(), zero.clone(), zero];
                v[m] = FieldElement::from_int_quad(field, q);
                vectors.push(FieldVector(v));
            }
        }
        let embedding = DMatrix::from_fn(12, 12, |r, col| {
            let sigma = Embedding::ALL[r / 3];
            vectors[col].0[r % 3].embed(sigma)
        });
        Self {
            field: field.clone(),
            vectors,
            embedding,
        }
    }

    pub fn field(&self) -> &Arc<CmField> {
        &self.field
    }

    pub fn vectors(&self) -> &[FieldVector] {
        &self.vectors
    }

    pub fn embedding(&self) -> &DMatrix<C64> {
        &self.embedding
    }

    /// Integer coordinates of an element of `O³`, or `None` if it lies outside the lattice.
    pub fn coordinates(&self, v: &FieldVector) -> Option<Vec<BigInt>> {
        let mut out = Vec::with_capacity(12);
        for m in 0..3 {
            for q in v.0[m].quad() {
                if !q.is_integer() {
                    return None;
                }
                out.push(q.to_integer());
            }
        }
        Some(out)
    }

    /// Image of an exact vector in `H_C`.
    pub fn embed_vector(&self, v: &FieldVector) -> DVector<C64> {
        DVector::from_fn(12, |r, _| v.0[r % 3].embed(Embedding::ALL[r / 3]))
    }
}

/// Complex conjugation of `H_C = H_Z ⊗ C` in block coordinates: `(x₂, x₁, x₄, x₃)` conjugated.
pub fn conjugate_coords(x: &DVector<C64>) -> DVector<C64> {
    DVector::from_fn(12, |r, _| {
        let sigma = Embedding::ALL[r / 3].conjugate();
        x[block(sigma) + r % 3].conj()
    })
}

fn conjugate_columns(m: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = m.clone();
    for j in 0..m.ncols() {
        out.set_column(j, &conjugate_coords(&m.column(j).into_owned()));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenspaceReport {
    /// `π_σ` as 3×12 matrices, in the order `σ1, σ̄1, σ2, σ̄2`.
    #[serde(skip)]
    pub projections: Vec<DMatrix<C64>>,
    /// Largest `|π_σ(t·u) − σ(t)π_σ(u)|` over `t ∈ {ω, ρ}` and the basis.
    pub max_action_error: f64,
}

pub fn eigenspace_decompose(basis: &LatticeBasis) -> EigenspaceReport {
    let p = basis.embedding();
    let projections: Vec<DMatrix<C64>> = Embedding::ALL
        .iter()
        .map(|&s| p.rows(block(s), 3).into_owned())
        .collect();
    let f = basis.field();
    let mut worst = 0.0f64;
    for t in [FieldElement::omega(f), FieldElement::rho(f)] {
        for u in basis.vectors() {
            let coords = basis
                .coordinates(&u.scale(&t))
                .expect("the order is closed under multiplication");
            let x = DVector::from_fn(12, |i, _| c(coords[i].to_f64().unwrap_or(f64::NAN), 0.0));
            let direct = basis.embed_vector(u);
            for (k, &s) in Embedding::ALL.iter().enumerate() {
                let lhs = &projections[k] * &x;
                let rhs = direct.rows(block(s), 3) * t.embed(s);
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    EigenspaceReport {
        projections,
        max_action_error: worst,
    }
}

/// Skew-symmetric integer matrix of the polarization on the lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Polarization {
    pub entries: Vec<Vec<i64>>,
    pub determinant: String,
}

impl Polarization {
    pub fn is_skew(&self) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == -self.entries[j][i]))
    }

    pub fn determinant_big(&self) -> BigInt {
        bareiss_det(&self.entries)
    }

    pub fn as_f64(&self) -> DMatrix<f64> {
        let n = self.entries.len();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j] as f64)
    }
}

/// Fraction-free Gaussian elimination.
fn bareiss_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Default `α_F`: `√α` with the sign chosen so that `Im σ1(α_F) < 0`.
pub fn default_alpha(field: &Arc<CmField>) -> FieldElement {
    let r = FieldElement::rho(field);
    if r.embed(Embedding::Sigma1).im < 0.0 {
        r
    } else {
        -r
    }
}

fn check_alpha(alpha: &FieldElement) -> Result<(), HodgeError> {
    if alpha.is_zero() {
        return Err(HodgeError::AlphaZero);
    }
    if !(&alpha.cm_conjugate() + alpha).is_zero() {
        return Err(HodgeError::AlphaNotImaginary);
    }
    Ok(())
}

/// `Q_ij = Tr_{F/Q}(α·h(b_i, b_j))`, computed exactly.
pub fn polarization_matrix(
    basis: &LatticeBasis,
    form: &HermitianForm,
    alpha: &FieldElement,
) -> Result<Polarization, HodgeError> {
    check_alpha(alpha)?;
    let j = form.exact_matrix().ok_or(HodgeError::NotExact)?;
    let n = basis.vectors().len();
    let mut entries = vec![vec![0i64; n]; n];
    for (r, row) in entries.iter_mut().enumerate() {
        for (col, e) in row.iter_mut().enumerate() {
            let h = herm_exact(j, &basis.vectors()[r], &basis.vectors()[col]);
            let t: BigRational = (alpha * &h).trace_q();
            if !t.is_integer() {
                return Err(HodgeError::NonIntegral {
                    row: r,
                    col,
                    value: t.to_string(),
                });
            }
            *e = t.to_integer().to_i64().ok_or(HodgeError::Overflow(r, col))?;
        }
    }
    let mut p = Polarization {
        entries,
        determinant: String::new(),
    };
    p.determinant = p.determinant_big().to_string();
    Ok(p)
}

/// Bilinear extension of `Q` to `H_C`: `Q(x, y) = yᵀ·Q_C·x`.
fn complex_polarization(form: &HermitianForm, alpha: &FieldElement) -> Result<DMatrix<C64>, HodgeError> {
    let mut q = DMatrix::zeros(12, 12);
    for s in Embedding::ALL {
        let js = form.matrix_at(s)?;
        let a = alpha.embed(s);
        let (row0, col0) = (block(s.conjugate()), block(s));
        for k in 0..3 {
            for l in 0..3 {
                q[(row0 + k, col0 + l)] = a * js[(k, l)];
            }
        }
    }
    Ok(q)
}

fn rank(m: &DMatrix<C64>) -> (usize, f64) {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let r = sv.iter().filter(|&&s| s > RANK_TOL * top.max(1e-300)).count();
    let smallest_kept = sv
        .iter()
        .cloned()
        .filter(|&s| s > RANK_TOL * top)
        .fold(f64::INFINITY, f64::min);
    (r, smallest_kept)
}

/// Everything needed to build frames: the lattice, the form, `α_F` and `Q`.
#[derive(Clone, Debug)]
pub struct HodgeSetup {
    basis: LatticeBasis,
    form: Arc<HermitianForm>,
    alpha: FieldElement,
    polarization: Polarization,
    q_complex: DMatrix<C64>,
    /// The embedding among `σ2, σ̄2` on which `−iQ` is positive.
    positive_block: Embedding,
}

impl HodgeSetup {
    pub fn new(form: Arc<HermitianForm>, alpha: Option<FieldElement>) -> Result<Self, HodgeError> {
        let field = form.field().ok_or(HodgeError::NotExact)?.clone();
        let alpha = alpha.unwrap_or_else(|| default_alpha(&field));
        let basis = LatticeBasis::new(&field);
        let polarization = polarization_matrix(&basis, &form, &alpha)?;
        let q_complex = complex_polarization(&form, &alpha)?;
        // −iQ(e, conj e) on a σ̄2 basis vector is −i·σ̄2(α)·σ2(J)_kk; J is definite under σ2
        let j2 = form.matrix_at(Embedding::Sigma2)?;
        let probe = (c(0.0, -1.0) * alpha.embed(Embedding::Sigma2Bar) * j2[(0, 0)]).re;
        let positive_block = if probe > 0.0 {
            Embedding::Sigma2Bar
        } else {
            Embedding::Sigma2
        };
        Ok(Self {
            basis,
            form,
            alpha,
            polarization,
            q_complex,
            positive_block,
        })
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn form(&self) -> &Arc<HermitianForm> {
        &self.form
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn polarization(&self) -> &Polarization {
        &self.polarization
    }

    pub fn positive_block(&self) -> Embedding {
        self.positive_block
    }

    /// `Q(x, y)` on `H_C`.
    pub fn q(&self, x: &DVector<C64>, y: &DVector<C64>) -> C64 {
        (y.transpose() * &self.q_complex * x)[(0, 0)]
    }

    /// Builds the frame at the point with `σ1`-coordinates `v`.
    pub fn frame(&self, v: &BallPoint) -> Result<HodgeFrame, HodgeError> {
        if !Arc::ptr_eq(v.ambient(), &self.form) && v.ambient().matrix() != self.form.matrix() {
            return Err(HodgeError::Degenerate("point lives on a different form".into()));
        }
        self.frame_vec(v.rep())
    }

    fn frame_vec(&self, v: &Vec3) -> Result<HodgeFrame, HodgeError> {
        let j1 = self.form.matrix_at(Embedding::Sigma1)?;
        let vv = herm(&j1, v, v).re;
        if !(vv < 0.0) {
            return Err(HodgeError::NotNegative);
        }
        let v = v / C64::new(v.norm(), 0.0);
        // v^⊥ under J1: kernel of the row vᴴJ1
        let mut rows = Mat3::zeros();
        rows.set_row(0, &(v.adjoint() * j1));
        let perp = null_space(&rows, 1e-12);
        if perp.len() != 2 {
            return Err(HodgeError::Degenerate(format!(
                "orthogonal complement has dimension {}",
                perp.len()
            )));
        }
        let mut b = DMatrix::<C64>::zeros(12, 6);
        for k in 0..3 {
            b[(block(Embedding::Sigma1) + k, 0)] = v[k];
        }
        for (col, u) in perp.iter().enumerate() {
            let u = u / C64::new(u.norm(), 0.0);
            for k in 0..3 {
                b[(block(Embedding::Sigma1Bar) + k, 1 + col)] = u[k].conj();
            }
        }
        for k in 0..3 {
            b[(block(self.positive_block) + k, 3 + k)] = C64::new(1.0, 0.0);
        }
        let (r, _) = rank(&b);
        if r != 6 {
            return Err(HodgeError::Degenerate(format!("H^(-1,0) has rank {r}")));
        }
        Ok(HodgeFrame {
            v,
            h_minus10: b,
            positive_block: self.positive_block,
        })
    }

    /// Both Riemann relations on a frame.
    pub fn riemann(&self, frame: &HodgeFrame) -> RiemannReport {
        let b = &frame.h_minus10;
        let n = b.ncols();
        let cols: Vec<DVector<C64>> = (0..n).map(|j| b.column(j).into_owned()).collect();
        let mut iso = 0.0f64;
        let mut gram = DMatrix::<C64>::zeros(n, n);
        for a in 0..n {
            for bb in 0..n {
                iso = iso.max(self.q(&cols[a], &cols[bb]).norm());
                gram[(a, bb)] = c(0.0, -1.0) * self.q(&cols[a], &conjugate_coords(&cols[bb]));
            }
        }
        let herm_defect = (&gram - gram.adjoint()).norm();
        let sym = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
        let eig = sym.symmetric_eigen().eigenvalues;
        let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let union = {
            let mut u = DMatrix::<C64>::zeros(12, 12);
            u.columns_mut(0, 6).copy_from(b);
            u.columns_mut(6, 6).copy_from(&conjugate_columns(b));
            rank(&u).0
        };
        RiemannReport {
            dimension: n,
            union_rank: union,
            max_isotropy: iso,
            gram_hermitian_defect: herm_defect,
            min_eigenvalue: min_eig,
            holds: iso < ISOTROPY_TOL && min_eig > 0.0 && union == 12,
        }
    }

    /// 6×12 period matrix: `H^{−1,0}`-coordinates of the lattice basis modulo `conj(H^{−1,0})`.
    pub fn period_matrix(&self, frame: &HodgeFrame) -> Result<PeriodMatrix, HodgeError> {
        let b = &frame.h_minus10;
        let mut w = DMatrix::<C64>::zeros(12, 12);
        w.columns_mut(0, 6).copy_from(b);
        w.columns_mut(6, 6).copy_from(&conjugate_columns(b));
        let inv = w
            .try_inverse()
            .ok_or_else(|| HodgeError::Degenerate("H^(-1,0) and its conjugate are not complementary".into()))?;
        let coords = inv * self.basis.embedding();
        let pi = coords.rows(0, 6).into_owned();
        let (r, smallest) = rank(&pi);
        if r != 6 {
            return Err(HodgeError::Degenerate(format!("period matrix has rank {r}")));
        }
        let real = DMatrix::<f64>::from_fn(12, 12, |i, j| if i < 6 { pi[(i, j)].re } else { pi[(i - 6, j)].im });
        Ok(PeriodMatrix {
            matrix: pi,
            smallest_singular_value: smallest,
            real_lattice_det: real.determinant(),
        })
    }

    /// Checks that `M ∈ Γ` moves frames compatibly with its integral action on the lattice.
    pub fn equivariance(&self, m: &FieldMatrix, v: &BallPoint) -> Result<EquivarianceReport, HodgeError> {
        let n = self.basis.vectors().len();
        let mut action = vec![vec![0i64; n]; n];
        for (j, b) in self.basis.vectors().iter().enumerate() {
            let coords = self
                .basis
                .coordinates(&m.mul_vec(b))
                .ok_or(HodgeError::NotIntegralAction)?;
            for (i, x) in coords.iter().enumerate() {
                action[i][j] = x.to_i64().ok_or(HodgeError::NotIntegralAction)?;
            }
        }
        let q = &self.polarization.entries;
        let preserves_q = (0..n).all(|a| {
            (0..n).all(|b| {
                let mut s: i128 = 0;
                for i in 0..n {
                    for k in 0..n {
                        s += action[i][a] as i128 * q[i][k] as i128 * action[k][b] as i128;
                    }
                }
                s == q[a][b] as i128
            })
        });
        let mut e = DMatrix::<C64>::zeros(12, 12);
        for s in Embedding::ALL {
            let ms = m.embed(s);
            for k in 0..3 {
                for l in 0..3 {
                    e[(block(s) + k, block(s) + l)] = ms[(k, l)];
                }
            }
        }
        let r = DMatrix::<C64>::from_fn(n, n, |i, j| C64::new(action[i][j] as f64, 0.0));
        let p = self.basis.embedding();
        let intertwining_error = (p * &r - &e * p).norm() / p.norm();
        let here = self.frame(v)?;
        let moved = self.frame_vec(&(m.embed(Embedding::Sigma1) * v.rep()))?;
        let transported = &e * &here.h_minus10;
        let mut both = DMatrix::<C64>::zeros(12, 12);
        both.columns_mut(0, 6).copy_from(&moved.h_minus10);
        both.columns_mut(6, 6).copy_from(&transported);
        let combined_rank = rank(&both).0;
        Ok(EquivarianceReport {
            integral_action: action,
            preserves_polarization: preserves_q,
            intertwining_error,
            combined_rank,
            equivariant: preserves_q && intertwining_error < 1e-9 && combined_rank == 6,
        })
    }
}

#[derive(Clone, Debug)]
pub struct HodgeFrame {
    /// Unit-normalized `σ1` representative.
    pub v: Vec3,
    /// 12×6, columns spanning `H^{−1,0}`.
    pub h_minus10: DMatrix<C64>,
    pub positive_block: Embedding,
}

impl HodgeFrame {
    pub fn dimension(&self) -> usize {
        self.h_minus10.ncols()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RiemannReport {
    pub dimension: usize,
    /// Rank of `H^{−1,0} ∪ conj(H^{−1,0})`; 12 means they are complementary.
    pub union_rank: usize,
    pub max_isotropy: f64,
    pub gram_hermitian_defect: f64,
    pub min_eigenvalue: f64,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    pub matrix: DMatrix<C64>,
    pub smallest_singular_value: f64,
    /// Determinant of the 12×12 real matrix `[Re Π; Im Π]`; nonzero for a lattice.
    pub real_lattice_det: f64,
}

impl PeriodMatrix {
    pub fn rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.matrix.nrows())
            .map(|i| {
                (0..self.matrix.ncols())
                    .map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im])
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceReport {
    /// `M·b_j = Σ_i R_ij b_i`.
    pub integral_action: Vec<Vec<i64>>,
    pub preserves_polarization: bool,
    pub intertwining_error: f64,
    pub combined_rank: usize,
    pub equivariant: bool,
}
