//! Isometries of the ball: `SU(J)` membership, the trace discriminant
//! `f(t) = |t|⁴ − 8 Re(t³) + 18|t|² − 27`, classification, eigenframes,
//! displacement and the proximity certificates for elliptic elements.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::ball::{BallError, BallPoint};
use crate::cmfield::{Embedding, FieldElement, FieldMatrix, FieldVector, KElement, RealEmbedding};
use crate::hermitian::{FormError, HermitianForm, SignClass};
use crate::numeric::{self, real, Mat3, Vec3, C64};

/// Numeric `|f|` below this is refused rather than classified.
pub const BORDERLINE_F: f64 = 1e-9;
/// Residual tolerance for numeric membership.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsometryError {
    #[error("matrix does not preserve the form (residual {0:e})")]
    NotUnitary(f64),
    #[error("determinant is not 1")]
    DeterminantNotOne,
    #[error("entries are not in the ring of the form")]
    FieldMismatch,
    #[error(
        "trace discriminant f = {0:e} is too close to 0; use exact mode or accept the repeated-eigenvalue stratum"
    )]
    Borderline(f64),
    #[error("exact element is not diagonalizable")]
    NotDiagonalizable,
    #[error("element has the wrong type for this operation: {0}")]
    WrongClass(String),
    #[error("eigenstructure is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Ball(#[from] BallError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum IsometryLabel {
    Identity,
    ScalarCube,
    Loxodromic,
    PureParabolic,
    ScrewParabolic,
    RegularElliptic,
    ReflectionAboutPoint,
    ReflectionAboutLine,
}

impl IsometryLabel {
    pub fn is_elliptic(self) -> bool {
        matches!(
            self,
            IsometryLabel::RegularElliptic | IsometryLabel::ReflectionAboutPoint | IsometryLabel::ReflectionAboutLine
        )
    }
}

/// Fixed set in the closed ball, as projective representatives.
#[derive(Clone, Debug)]
pub enum FixedLocus {
    Whole,
    Point(Vec3),
    Line { polar: Vec3 },
    BoundaryPair(Vec3, Vec3),
    BoundaryPoint(Vec3),
}

/// The trace `t` and `f(t)`, exactly for lattice elements.
#[derive(Clone, Debug)]
pub enum TraceInvariant {
    Exact { t: FieldElement, f: KElement },
    Numeric { t: C64, f: f64 },
}

impl TraceInvariant {
    pub fn trace_shadow(&self) -> C64 {
        match self {
            TraceInvariant::Exact { t, .. } => t.embed(Embedding::Sigma1),
            TraceInvariant::Numeric { t, .. } => *t,
        }
    }

    pub fn f_shadow(&self) -> f64 {
        match self {
            TraceInvariant::Exact { t, f } => t.field().base().embed(f, RealEmbedding::Plus),
            TraceInvariant::Numeric { f, .. } => *f,
        }
    }

    /// Sign of `f`; exact for exact traces.
    pub fn f_sign(&self) -> Ordering {
        match self {
            TraceInvariant::Exact { t, f } => t.field().base().sign(f, RealEmbedding::Plus),
            TraceInvariant::Numeric { f, .. } => f.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        }
    }
}

/// An element of `SU(J)`, exact over `F` or numeric.
#[derive(Clone, Debug)]
pub struct Isometry {
    numeric: Mat3,
    exact: Option<FieldMatrix>,
    ambient: Arc<HermitianForm>,
}

/// Eigenvectors with their eigenvalues and realized inner products.
///
/// Elliptic frames put the negative vector first; line reflections put the
/// polar (simple eigenvector) last. Loxodromic frames are ordered
/// `(|λ| > 1, |λ| < 1, |λ| = 1)`.
#[derive(Clone, Debug)]
pub struct Eigenframe {
    pub vectors: [Vec3; 3],
    pub eigenvalues: [C64; 3],
    pub gram: [[C64; 3]; 3],
    pub pattern_ok: bool,
}

#[derive(Clone, Debug)]
pub struct IsometryClass {
    pub label: IsometryLabel,
    pub eigenvalues: [C64; 3],
    pub eigenframe: Option<Eigenframe>,
    pub fixed_locus: FixedLocus,
    pub trace: TraceInvariant,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// In numeric mode, treat `|f| < 1e-9` as lying on the repeated-eigenvalue stratum instead of refusing.
    pub assume_repeated_eigenvalue: bool,
}

impl Isometry {
    pub fn exact(ambient: Arc<HermitianForm>, m: FieldMatrix) -> Result<Self, IsometryError> {
        let j = ambient.exact_matrix().ok_or(FormError::NotExact)?;
        if m.field() != j.field() {
            return Err(IsometryError::FieldMismatch);
        }
        if m.adjoint().mul(j).mul(&m) != *j {
            let num = m.embed(Embedding::Sigma1);
            let res = numeric::max_abs(&(num.adjoint() * ambient.matrix() * num - ambient.matrix()));
            return Err(IsometryError::NotUnitary(res));
        }
        if !m.det().is_one() {
            return Err(IsometryError::DeterminantNotOne);
        }
        Ok(Self {
            numeric: m.embed(Embedding::Sigma1),
            exact: Some(m),
            ambient,
        })
    }

    pub fn numeric(ambient: Arc<HermitianForm>, m: Mat3) -> Result<Self, IsometryError> {
        let j = ambient.matrix();
        let scale = numeric::max_abs(j) * numeric::max_abs(&m).powi(2).max(1.0);
        let res = numeric::max_abs(&(m.adjoint() * j * m - j));
        if res > MEMBERSHIP_TOL * scale {
            return Err(IsometryError::NotUnitary(res));
        }
        if (m.determinant() - real(1.0)).norm() > MEMBERSHIP_TOL * numeric::max_abs(&m).powi(3).max(1.0) {
            return Err(IsometryError::DeterminantNotOne);
        }
        Ok(Self {
            numeric: m,
            exact: None,
            ambient,
        })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.numeric
    }

    pub fn exact_matrix(&self) -> Option<&FieldMatrix> {
        self.exact.as_ref()
    }

    pub fn ambient(&self) -> &Arc<HermitianForm> {
        &self.ambient
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `M⁻¹ = J⁻¹ M^H J`.
    pub fn inverse(&self) -> Self {
        let exact = self.exact.as_ref().map(|m| {
            let j = self.ambient.exact_matrix().expect("exact ambient");
            j.inverse().expect("nondegenerate").mul(&m.adjoint()).mul(j)
        });
        let j = self.ambient.matrix();
        let ji = j.try_inverse().expect("nondegenerate form");
        Self {
            numeric: exact
                .as_ref()
                .map(|m| m.embed(Embedding::Sigma1))
                .unwrap_or_else(|| ji * self.numeric.adjoint() * j),
            exact,
            ambient: self.ambient.clone(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        Self {
            numeric: exact
                .as_ref()
                .map(|m| m.embed(Embedding::Sigma1))
                .unwrap_or(self.numeric * other.numeric),
            exact,
            ambient: self.ambient.clone(),
        }
    }

    pub fn trace_invariant(&self) -> TraceInvariant {
        match &self.exact {
            Some(m) => {
                let t = m.trace();
                let f = goldman_f_exact(&t);
                TraceInvariant::Exact { t, f }
            }
            None => {
                let t = self.numeric.trace();
                TraceInvariant::Numeric { t, f: goldman_f(t) }
            }
        }
    }

    /// Coefficients `(1, −t, t̄, −1)` of `λ³ − tλ² + t̄λ − 1`, numerically.
    pub fn char_poly(&self) -> [C64; 4] {
        let t = self.trace_invariant().trace_shadow();
        [real(1.0), -t, t.conj(), real(-1.0)]
    }

    /// Exact coefficients of the characteristic polynomial.
    pub fn char_poly_exact(&self) -> Option<[FieldElement; 4]> {
        let m = self.exact.as_ref()?;
        let f = m.field();
        let t = m.trace();
        Some([
            FieldElement::one(f),
            -&t,
            t.cm_conjugate(),
            FieldElement::from_int(f, -1),
        ])
    }
}

/// `f(t) = |t|⁴ − 8 Re(t³) + 18|t|² − 27`.
pub fn goldman_f(t: C64) -> f64 {
    let n = t.norm_sqr();
    n * n - 8.0 * (t * t * t).re + 18.0 * n - 27.0
}

/// Exact `f(t) ∈ K`, with `|t|² = t·t̄`.
pub fn goldman_f_exact(t: &FieldElement) -> KElement {
    let field = t.field();
    let k = field.base();
    let n = t.abs_squared();
    let re_t3 = t.pow(3).real_part();
    let n2 = k.mul(&n, &n);
    let a = k.sub(&n2, &k.mul(&KElement::from_int(8), &re_t3));
    let b = k.add(&a, &k.mul(&KElement::from_int(18), &n));
    k.sub(&b, &KElement::from_int(27))
}

/// Gram matrix of the three vectors.
fn gram(j: &HermitianForm, v: &[Vec3; 3]) -> [[C64; 3]; 3] {
    std::array::from_fn(|a| std::array::from_fn(|b| j.eval(&v[a], &v[b])))
}

/// J-orthogonal basis of the span of `basis`, from the eigenvectors of its Gram matrix.
fn orthogonalize(j: &HermitianForm, basis: &[Vec3]) -> Vec<(Vec3, f64)> {
    let n = basis.len();
    if n == 0 {
        return vec![];
    }
    if n == 1 {
        return vec![(basis[0], j.norm_sq(&basis[0]))];
    }
    let g = nalgebra::DMatrix::from_fn(n, n, |a, b| j.eval(&basis[b], &basis[a]));
    let eig = nalgebra::SymmetricEigen::new((g.clone() + g.adjoint()) * real(0.5));
    let mut out: Vec<(Vec3, f64)> = (0..n)
        .map(|k| {
            let c = eig.eigenvectors.column(k);
            let mut v = Vec3::zeros();
            for (i, b) in basis.iter().enumerate() {
                v += b * c[i];
            }
            let v = numeric::normalize_phase(&v);
            (v, j.norm_sq(&v))
        })
        .collect();
    out.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"));
    out
}

fn frame_pattern_ok(label: IsometryLabel, j: &HermitianForm, v: &[Vec3; 3], g: &[[C64; 3]; 3]) -> bool {
    let scale = numeric::max_abs(j.matrix());
    let tol = 1e-10 * scale;
    let small = |z: C64| z.norm() <= tol;
    if label == IsometryLabel::Loxodromic {
        small(g[0][0]) && small(g[1][1]) && g[2][2].re > tol && small(g[0][2]) && small(g[1][2]) && !small(g[0][1])
    } else {
        let _ = v;
        small(g[0][1]) && small(g[0][2]) && small(g[1][2]) && g[0][0].re < -tol && g[1][1].re > tol && g[2][2].re > tol
    }
}

fn finish_frame(label: IsometryLabel, j: &HermitianForm, vectors: [Vec3; 3], eigenvalues: [C64; 3]) -> Eigenframe {
    let vectors = vectors.map(|v| numeric::normalize_phase(&v));
    let g = gram(j, &vectors);
    let pattern_ok = frame_pattern_ok(label, j, &vectors, &g);
    Eigenframe {
        vectors,
        eigenvalues,
        gram: g,
        pattern_ok,
    }
}

/// Monic polynomial remainder over `F`, coefficients highest degree first.
fn poly_rem(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut r: Vec<FieldElement> = a.to_vec();
    let lead_inv = b[0].inv().expect("nonzero leading coefficient");
    while r.len() >= b.len() {
        if r[0].is_zero() {
            r.remove(0);
            continue;
        }
        let factor = &r[0] * &lead_inv;
        for i in 0..b.len() {
            r[i] = &r[i] - &(&factor * &b[i]);
        }
        r.remove(0);
    }
    while r.len() > 1 && r[0].is_zero() {
        r.remove(0);
    }
    r
}

fn eval_poly(p: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = FieldElement::zero(x.field());
    for c in p {
        acc = &(&acc * x) + c;
    }
    acc
}

/// The repeated root of `λ³ − tλ² + t̄λ − 1` when `f(t) = 0`; it lies in `F`.
pub fn repeated_eigenvalue_exact(t: &FieldElement) -> Result<FieldElement, IsometryError> {
    let f = t.field();
    let p = [
        FieldElement::one(f),
        -t,
        t.cm_conjugate(),
        FieldElement::from_int(f, -1),
    ];
    let dp = [FieldElement::from_int(f, 3), -&(t + t), t.cm_conjugate()];
    let r = poly_rem(&p, &dp);
    let lam = if r.iter().all(FieldElement::is_zero) {
        t.scale(&num_rational::BigRational::new(1.into(), 3.into()))
    } else if r.len() == 2 {
        (-&r[1]).checked_div(&r[0]).expect("nonzero linear coefficient")
    } else {
        return Err(IsometryError::Inconsistent(
            "characteristic polynomial has no repeated root".into(),
        ));
    };
    if !eval_poly(&p, &lam).is_zero() || !eval_poly(&dp, &lam).is_zero() {
        return Err(IsometryError::Inconsistent("gcd root is not a double root".into()));
    }
    Ok(lam)
}

pub fn classify(m: &Isometry) -> Result<IsometryClass, IsometryError> {
    classify_with(m, ClassifyOptions::default())
}

pub fn classify_with(m: &Isometry, opts: ClassifyOptions) -> Result<IsometryClass, IsometryError> {
    let trace = m.trace_invariant();
    let sign = match &trace {
        TraceInvariant::Exact { .. } => trace.f_sign(),
        TraceInvariant::Numeric { f, .. } => {
            if f.abs() < BORDERLINE_F {
                if !opts.assume_repeated_eigenvalue {
                    return Err(IsometryError::Borderline(*f));
                }
                Ordering::Equal
            } else if *f > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
    };
    match sign {
        Ordering::Greater => classify_loxodromic(m, trace),
        Ordering::Less => classify_regular_elliptic(m, trace),
        Ordering::Equal => classify_repeated(m, trace),
    }
}

fn cubic_eigenvalues(t: C64) -> [C64; 3] {
    numeric::cubic_roots(-t, t.conj(), real(-1.0))
}

fn classify_loxodromic(m: &Isometry, trace: TraceInvariant) -> Result<IsometryClass, IsometryError> {
    let mut ev = cubic_eigenvalues(trace.trace_shadow());
    ev.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).expect("finite"));
    ev.swap(1, 2);
    let j = &m.ambient;
    let mat = m.numeric;
    let vecs: [Vec3; 3] = ev.map(|l| numeric::kernel_vector(&(mat - Mat3::identity() * l)));
    let frame = finish_frame(IsometryLabel::Loxodromic, j, vecs, ev);
    Ok(IsometryClass {
        label: IsometryLabel::Loxodromic,
        eigenvalues: ev,
        fixed_locus: FixedLocus::BoundaryPair(frame.vectors[0], frame.vectors[1]),
        eigenframe: Some(frame),
        trace,
    })
}

fn classify_regular_elliptic(m: &Isometry, trace: TraceInvariant) -> Result<IsometryClass, IsometryError> {
    let ev = cubic_eigenvalues(trace.trace_shadow());
    let j = &m.ambient;
    let mat = m.numeric;
    let mut pairs: Vec<(C64, Vec3, f64)> = ev
        .iter()
        .map(|&l| {
            let v = numeric::normalize_phase(&numeric::kernel_vector(&(mat - Mat3::identity() * l)));
            (l, v, j.norm_sq(&v))
        })
        .collect();
    pairs.sort_by(|a, b| {
        a.2.partial_cmp(&b.2)
            .expect("finite")
            .then(a.0.arg().partial_cmp(&b.0.arg()).expect("finite"))
    });
    if !(pairs[0].2 < 0.0 && pairs[1].2 > 0.0) {
        return Err(IsometryError::Inconsistent(
            "elliptic element without a unique negative eigenvector".into(),
        ));
    }
    let ev = [pairs[0].0, pairs[1].0, pairs[2].0];
    let frame = finish_frame(
        IsometryLabel::RegularElliptic,
        j,
        [pairs[0].1, pairs[1].1, pairs[2].1],
        ev,
    );
    Ok(IsometryClass {
        label: IsometryLabel::RegularElliptic,
        eigenvalues: ev,
        fixed_locus: FixedLocus::Point(frame.vectors[0]),
        eigenframe: Some(frame),
        trace,
    })
}

/// `f = 0`: a repeated eigenvalue. Exact elements use exact kernels over `F`.
fn classify_repeated(m: &Isometry, trace: TraceInvariant) -> Result<IsometryClass, IsometryError> {
    let j = &m.ambient;
    let (lam, triple, eigenspace, simple): (C64, bool, Vec<Vec3>, Option<(C64, Vec3)>) = match (&m.exact, &trace) {
        (Some(mx), TraceInvariant::Exact { t, .. }) => {
            let f = mx.field();
            let lam = repeated_eigenvalue_exact(t)?;
            let mu = lam.pow(2).inv().expect("unit eigenvalue");
            let triple = mu == lam;
            let id = FieldMatrix::identity(f);
            let es: Vec<FieldVector> = mx.sub(&id.scale(&lam)).kernel();
            let simple = if triple {
                None
            } else {
                let ks = mx.sub(&id.scale(&mu)).kernel();
                if ks.len() != 1 {
                    return Err(IsometryError::Inconsistent(
                        "simple eigenvalue with eigenspace of dimension ≠ 1".into(),
                    ));
                }
                Some((mu.embed(Embedding::Sigma1), ks[0].embed(Embedding::Sigma1)))
            };
            let full = if triple { 3 } else { 2 };
            if es.len() < full {
                return Err(IsometryError::NotDiagonalizable);
            }
            (
                lam.embed(Embedding::Sigma1),
                triple,
                es.iter().map(|v| v.embed(Embedding::Sigma1)).collect(),
                simple,
            )
        }
        _ => {
            let t = trace.trace_shadow();
            let p = |x: C64| ((x - t) * x + t.conj()) * x - 1.0;
            // roots of p' = 3x² − 2tx + t̄
            let disc = (4.0 * t * t - 12.0 * t.conj()).sqrt();
            let r1 = (2.0 * t + disc) / 6.0;
            let r2 = (2.0 * t - disc) / 6.0;
            let triple = (r1 - r2).norm() < 1e-6;
            let lam = if triple {
                t / 3.0
            } else if p(r1).norm() <= p(r2).norm() {
                r1
            } else {
                r2
            };
            let mat = m.numeric;
            let es = numeric::null_space(&(mat - Mat3::identity() * lam), 1e-7);
            let simple = if triple {
                None
            } else {
                let mu = 1.0 / (lam * lam);
                Some((mu, numeric::kernel_vector(&(mat - Mat3::identity() * mu))))
            };
            let full = if triple { 3 } else { 2 };
            if es.len() < full {
                let label = if triple {
                    IsometryLabel::PureParabolic
                } else {
                    IsometryLabel::ScrewParabolic
                };
                let fixed = es.first().copied().unwrap_or_else(Vec3::zeros);
                let ev = match simple {
                    Some((mu, _)) => [lam, lam, mu],
                    None => [lam; 3],
                };
                return Ok(IsometryClass {
                    label,
                    eigenvalues: ev,
                    eigenframe: None,
                    fixed_locus: FixedLocus::BoundaryPoint(numeric::normalize_phase(&fixed)),
                    trace,
                });
            }
            (lam, triple, es, simple)
        }
    };

    if triple {
        let label = if (lam - 1.0).norm() < 1e-9 {
            IsometryLabel::Identity
        } else {
            IsometryLabel::ScalarCube
        };
        let basis = orthogonalize(j, &eigenspace);
        let vecs = [basis[0].0, basis[1].0, basis[2].0];
        let frame = finish_frame(label, j, vecs, [lam; 3]);
        return Ok(IsometryClass {
            label,
            eigenvalues: [lam; 3],
            eigenframe: Some(frame),
            fixed_locus: FixedLocus::Whole,
            trace,
        });
    }

    let (mu, w) = simple.expect("simple eigenvalue present");
    let wn = numeric::normalize_phase(&w);
    match j.sign_class(&wn) {
        SignClass::Negative => {
            let basis = orthogonalize(j, &eigenspace);
            let frame = finish_frame(
                IsometryLabel::ReflectionAboutPoint,
                j,
                [wn, basis[0].0, basis[1].0],
                [mu, lam, lam],
            );
            Ok(IsometryClass {
                label: IsometryLabel::ReflectionAboutPoint,
                eigenvalues: [mu, lam, lam],
                fixed_locus: FixedLocus::Point(wn),
                eigenframe: Some(frame),
                trace,
            })
        }
        SignClass::Positive => {
            let basis = orthogonalize(j, &eigenspace);
            let frame = finish_frame(
                IsometryLabel::ReflectionAboutLine,
                j,
                [basis[0].0, basis[1].0, wn],
                [lam, lam, mu],
            );
            Ok(IsometryClass {
                label: IsometryLabel::ReflectionAboutLine,
                eigenvalues: [lam, lam, mu],
                fixed_locus: FixedLocus::Line { polar: wn },
                eigenframe: Some(frame),
                trace,
            })
        }
        SignClass::Null => Err(IsometryError::Inconsistent("null simple eigenvector".into())),
    }
}

/// Eigenvectors with the orthogonality certificate.
pub fn eigenframe(m: &Isometry) -> Result<Eigenframe, IsometryError> {
    classify(m)?.eigenframe.ok_or(IsometryError::NotDiagonalizable)
}

/// Reconstruction of `u` from the frame and the realized sum of the expansion
/// terms (`Σ tance(u, v_j)` for elliptic frames, `w + w̄ + tance(u, v₃)` for loxodromic ones).
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionCheck {
    pub sum: f64,
    pub imaginary_part: f64,
    pub reconstruction_residual: f64,
}

pub fn expansion_check(j: &HermitianForm, frame: &Eigenframe, loxodromic: bool, u: &Vec3) -> ExpansionCheck {
    let v = &frame.vectors;
    let uu = j.eval(u, u);
    let (recon, sum) = if loxodromic {
        let c1 = j.eval(u, &v[1]) / j.eval(&v[0], &v[1]);
        let c2 = j.eval(u, &v[0]) / j.eval(&v[1], &v[0]);
        let c3 = j.eval(u, &v[2]) / j.eval(&v[2], &v[2]);
        let recon = v[0] * c1 + v[1] * c2 + v[2] * c3;
        let w = j.eval(u, &v[1]) * j.eval(&v[0], u) / (j.eval(&v[0], &v[1]) * uu);
        let ta3 = j.eval(u, &v[2]) * j.eval(&v[2], u) / (j.eval(&v[2], &v[2]) * uu);
        (recon, w + w.conj() + ta3)
    } else {
        let mut recon = Vec3::zeros();
        let mut s = C64::new(0.0, 0.0);
        for vj in v {
            let vv = j.eval(vj, vj);
            recon += vj * (j.eval(u, vj) / vv);
            s += j.eval(u, vj) * j.eval(vj, u) / (vv * uu);
        }
        (recon, s)
    };
    ExpansionCheck {
        sum: sum.re,
        imaginary_part: sum.im,
        reconstruction_residual: (recon - u).norm() / u.norm(),
    }
}

/// `Σ_{j,k} λ_j μ_k tance(u_j, v_k)` for two J-orthogonal elliptic frames; equals `trace(M₁M₂)`.
pub fn trace_sum(j: &HermitianForm, a: &Eigenframe, b: &Eigenframe) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for (u, l) in a.vectors.iter().zip(&a.eigenvalues) {
        for (v, m) in b.vectors.iter().zip(&b.eigenvalues) {
            let ta = j.eval(u, v) * j.eval(v, u) / (j.eval(u, u) * j.eval(v, v));
            s += l * m * ta;
        }
    }
    s
}

/// Largest deviation of `Σ_j tance(v_k, u_j)` from 1 over the vectors `v_k` of `b`.
pub fn expansion_error(j: &HermitianForm, a: &Eigenframe, b: &Eigenframe) -> f64 {
    b.vectors
        .iter()
        .map(|v| {
            let s: C64 = a
                .vectors
                .iter()
                .map(|u| j.eval(u, v) * j.eval(v, u) / (j.eval(u, u) * j.eval(v, v)))
                .sum();
            (s - 1.0).norm()
        })
        .fold(0.0, f64::max)
}

/// `d(u, Mu)` from `cosh(d/2) = |⟨Mu, u⟩ / ⟨u, u⟩|`.
pub fn displacement(m: &Isometry, u: &BallPoint) -> Result<f64, IsometryError> {
    let c = displacement_cosh_half(m, u.rep());
    Ok(2.0 * c.max(1.0).acosh())
}

fn displacement_cosh_half(m: &Isometry, u: &Vec3) -> f64 {
    let j = &m.ambient;
    (j.eval(&(m.numeric * u), u) / j.eval(u, u)).norm()
}

/// Lower bound `2·acosh((|t| − 3)/2 + 1)` on the displacement of a loxodromic element with `|t| > 3`.
pub fn loxodromic_displacement_floor(t: C64) -> Option<f64> {
    let a = t.norm();
    (a > 3.0).then(|| 2.0 * ((a - 3.0) / 2.0 + 1.0).acosh())
}

/// Smallest `n ≤ max_n` with `λⁿ = 1` for all eigenvalues (numerically).
pub fn finite_order(ev: &[C64; 3], max_n: u32) -> Option<u32> {
    (1..=max_n).find(|&n| ev.iter().all(|l| (l.powu(n) - 1.0).norm() < 1e-8))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProximityCertificate {
    pub order: u32,
    /// Largest real part of a nontrivial `n`-th root of unity.
    pub k: f64,
    pub displacement: f64,
    pub distance_to_fixed: f64,
    /// `|⟨Mu,u⟩/⟨u,u⟩| = cosh(d(u, Mu)/2)`.
    pub lhs: f64,
    /// `(1 − k)·tance(u, v₁) + k`.
    pub rhs: f64,
    pub slack: f64,
    /// `acosh(2(lhs − k)/(1 − k) − 1)`, an upper bound on `d(u, v₁)` that never exceeds the displacement.
    pub implied_bound: f64,
    pub holds: bool,
}

/// Certificate that points moved little by an elliptic element of order 2, 3, 4 or 6
/// with an isolated fixed point are close to that point.
pub fn elliptic_proximity(m: &Isometry, u: &BallPoint) -> Result<ProximityCertificate, IsometryError> {
    let cls = classify(m)?;
    if !matches!(
        cls.label,
        IsometryLabel::RegularElliptic | IsometryLabel::ReflectionAboutPoint
    ) {
        return Err(IsometryError::WrongClass(format!(
            "{:?} has no isolated fixed point",
            cls.label
        )));
    }
    let order = finite_order(&cls.eigenvalues, 18).ok_or_else(|| IsometryError::WrongClass("infinite order".into()))?;
    let k = match order {
        2 => -1.0,
        3 => -0.5,
        4 => 0.0,
        6 => 0.5,
        n => return Err(IsometryError::WrongClass(format!("order {n} is outside {{2,3,4,6}}"))),
    };
    let FixedLocus::Point(v1) = cls.fixed_locus else {
        unreachable!("isolated fixed point");
    };
    let j = &m.ambient;
    let ta = j.tance(u.rep(), &v1)?;
    let lhs = displacement_cosh_half(m, u.rep());
    let rhs = (1.0 - k) * ta + k;
    let disp = 2.0 * lhs.max(1.0).acosh();
    let dist = 2.0 * (ta - 1.0).max(0.0).sqrt().asinh();
    let implied = (2.0 * (lhs - k) / (1.0 - k) - 1.0).max(1.0).acosh();
    let tol = 1e-9 * lhs.max(1.0);
    Ok(ProximityCertificate {
        order,
        k,
        displacement: disp,
        distance_to_fixed: dist,
        lhs,
        rhs,
        slack: lhs - rhs,
        implied_bound: implied,
        holds: lhs >= rhs - tol && dist <= implied + 1e-7 && implied <= disp + 1e-7,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LineProximityCertificate {
    pub displacement: f64,
    pub distance_to_line: f64,
    /// `|⟨Mu,u⟩/⟨u,u⟩|`.
    pub lhs: f64,
    /// `1 − 2·tance(u, n)`.
    pub rhs: f64,
    pub equality_residual: f64,
    pub holds: bool,
}

/// For an involutive line reflection: `|⟨Mu,u⟩/⟨u,u⟩| = 1 − 2·tance(u, n)` and `d(u, L) ≤ d(u, Mu)/2`.
pub fn line_proximity(m: &Isometry, u: &BallPoint) -> Result<LineProximityCertificate, IsometryError> {
    let cls = classify(m)?;
    let FixedLocus::Line { polar } = cls.fixed_locus else {
        return Err(IsometryError::WrongClass(format!(
            "{:?} does not fix a line",
            cls.label
        )));
    };
    if (cls.eigenvalues[0] + 1.0).norm() > 1e-9 {
        return Err(IsometryError::WrongClass("line reflection is not an involution".into()));
    }
    let j = &m.ambient;
    let ta = j.tance(u.rep(), &polar)?;
    let lhs = displacement_cosh_half(m, u.rep());
    let rhs = 1.0 - 2.0 * ta;
    let disp = 2.0 * lhs.max(1.0).acosh();
    let dist = 2.0 * (-ta).max(0.0).sqrt().asinh();
    let resid = (lhs - rhs).abs();
    Ok(LineProximityCertificate {
        displacement: disp,
        distance_to_line: dist,
        lhs,
        rhs,
        equality_residual: resid,
        holds: resid <= 1e-9 * rhs.max(1.0) && dist <= disp / 2.0 + 1e-9,
    })
}

/// Random elements of `SU(2,1)` for `J = diag(1,1,−1)` as words in fixed generator families.
pub mod sample {
    use super::*;
    use rand::Rng;

    pub fn boost13(s: f64) -> Mat3 {
        let (c, h) = (real(s.cosh()), real(s.sinh()));
        let z = real(0.0);
        Mat3::new(c, z, h, z, real(1.0), z, h, z, c)
    }

    pub fn boost23(s: f64) -> Mat3 {
        let (c, h) = (real(s.cosh()), real(s.sinh()));
        let z = real(0.0);
        Mat3::new(real(1.0), z, z, z, c, h, z, h, c)
    }

    pub fn rotation(a: f64, b: f64) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(
            C64::from_polar(1.0, a),
            C64::from_polar(1.0, b),
            C64::from_polar(1.0, -a - b),
        ))
    }

    /// A word of length 1–4 in boosts and rotations, or a rotation conjugated by such a word.
    pub fn random_element<R: Rng>(rng: &mut R) -> Mat3 {
        let len = rng.gen_range(1..=4);
        let mut w = Mat3::identity();
        for _ in 0..len {
            let g = match rng.gen_range(0..3) {
                0 => boost13(rng.gen_range(0.3..0.8) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }),
                1 => boost23(rng.gen_range(0.3..0.8) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }),
                _ => rotation(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
            };
            w *= g;
        }
        if rng.gen_bool(0.35) {
            let r = rotation(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let ji = super::super::hermitian::std_matrix();
            let winv = ji * w.adjoint() * ji;
            w * r * winv
        } else {
            w
        }
    }
}
