use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;

use super::KahlerError;
use crate::numeric::{real, C64};

pub type Mat2 = Matrix2<C64>;

/// A (1,1)-form on `B²` in standard coordinates, represented by `M_jk = ω(∂_j, ∂̄_k)`.
#[derive(Clone)]
pub struct FormMatrix {
    name: String,
    eval: Arc<dyn Fn(C64, C64) -> Mat2 + Send + Sync>,
}

impl fmt::Debug for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormMatrix").field("name", &self.name).finish()
    }
}

impl FormMatrix {
    pub fn new(name: impl Into<String>, eval: impl Fn(C64, C64) -> Mat2 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluates at an interior point.
    pub fn eval(&self, z: C64, w: C64) -> Result<Mat2, KahlerError> {
        if z.norm_sqr() + w.norm_sqr() >= 1.0 {
            return Err(KahlerError::OutsideBall { z, w });
        }
        Ok((self.eval)(z, w))
    }

    /// Pointwise difference `self − other`.
    pub fn minus(&self, other: &FormMatrix) -> FormMatrix {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        FormMatrix::new(format!("{} - {}", self.name, other.name), move |z, w| a(z, w) - b(z, w))
    }

    /// Pullback density along a tangent vector `φ′`: `Σ M_jk φ′_j conj(φ′_k)`.
    pub fn density(&self, z: C64, w: C64, dz: C64, dw: C64) -> f64 {
        let m = (self.eval)(z, w);
        let v = [dz, dw];
        let mut s = C64::new(0.0, 0.0);
        for j in 0..2 {
            for k in 0..2 {
                s += m[(j, k)] * v[j] * v[k].conj();
            }
        }
        s.re
    }
}

fn m2(a: f64, b: C64, d: f64) -> Mat2 {
    Mat2::new(real(a), b, b.conj(), real(d))
}

/// The Bergman Kähler form, `2/(1−|z|²−|w|²)² · [[1−|w|², z̄w], [zw̄, 1−|z|²]]`.
pub fn bergman_form() -> FormMatrix {
    FormMatrix::new("bergman", |z, w| {
        let (a, b) = (z.norm_sqr(), w.norm_sqr());
        let k = 2.0 / (1.0 - a - b).powi(2);
        m2(k * (1.0 - b), z.conj() * w * k, k * (1.0 - a))
    })
}

/// `i∂∂̄μ̃` and `i∂μ̃ ∧ ∂̄μ̃` for `μ̃ = |z|²/(1 − |w|²)`.
pub fn mu_forms() -> (FormMatrix, FormMatrix) {
    let ddbar = FormMatrix::new("ddbar_mu", |z, w| {
        let (a, b) = (z.norm_sqr(), w.norm_sqr());
        let q = 1.0 - b;
        m2(1.0 / q, z.conj() * w / (q * q), a * (1.0 + b) / q.powi(3))
    });
    let dd = FormMatrix::new("dmu_dmubar", |z, w| {
        let (a, b) = (z.norm_sqr(), w.norm_sqr());
        let q = 1.0 - b;
        let mu = a / q;
        m2(mu / q, z.conj() * w * (mu / (q * q)), mu * a * b / q.powi(3))
    });
    (ddbar, dd)
}

/// The rank-one factors of `i∂∂̄ f(log μ̃) = f″·A + f′·B`, valid off `z = 0`.
pub fn log_mu_factors(z: C64, w: C64) -> (Mat2, Mat2) {
    let (a, b) = (z.norm_sqr(), w.norm_sqr());
    let q = 1.0 - b;
    let fa = m2(1.0 / a, z.conj() * w / (a * q), b / (q * q));
    let fb = m2(0.0, C64::new(0.0, 0.0), 1.0 / (q * q));
    (fa, fb)
}

/// `i∂∂̄ log μ̃` away from `z = 0`; equals the factor `B` above.
pub fn ddbar_log_mu_smooth() -> FormMatrix {
    FormMatrix::new("ddbar_log_mu_smooth", |_z, w| {
        let q = 1.0 - w.norm_sqr();
        m2(0.0, C64::new(0.0, 0.0), 1.0 / (q * q))
    })
}

/// `2·i∂∂̄(|z|² + |w|²)`.
pub fn flat_form() -> FormMatrix {
    FormMatrix::new("flat", |_z, _w| m2(2.0, C64::new(0.0, 0.0), 2.0))
}

pub fn big_f(s: f64) -> f64 {
    -2.0 * (1.0 - s.exp()).ln()
}

pub fn big_f1(s: f64) -> f64 {
    let e = s.exp();
    2.0 * e / (1.0 - e)
}

pub fn big_f2(s: f64) -> f64 {
    let e = s.exp();
    2.0 * e / (1.0 - e).powi(2)
}

/// `ω_F = i∂∂̄ F(log μ̃)` for `F(s) = −2 log(1 − eˢ)`, in closed form (finite at `z = 0`):
/// `2/(1−|z|²−|w|²)² · [[1−|w|², z̄w], [zw̄, |z|²(1−|z|²−|w|⁴)/(1−|w|²)²]]`.
pub fn omega_f() -> FormMatrix {
    FormMatrix::new("omega_F", |z, w| {
        let (a, b) = (z.norm_sqr(), w.norm_sqr());
        let k = 2.0 / (1.0 - a - b).powi(2);
        let q = 1.0 - b;
        m2(k * q, z.conj() * w * k, k * a * (1.0 - a - b * b) / (q * q))
    })
}

/// `ω_F` assembled as `F″(log μ̃)·A + F′(log μ̃)·B`; an independent route used for cross-checks.
pub fn omega_f_composed() -> FormMatrix {
    FormMatrix::new("omega_F_composed", |z, w| {
        let (fa, fb) = log_mu_factors(z, w);
        let s = (z.norm_sqr() / (1.0 - w.norm_sqr())).ln();
        fa * real(big_f2(s)) + fb * real(big_f1(s))
    })
}

/// Eigenvalues of a 2×2 Hermitian matrix, ascending.
pub fn eig2(m: &Mat2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
    [mean - rad, mean + rad]
}

/// Largest deviation from Hermitian symmetry, relative to the entry scale.
pub fn hermitian_defect(m: &Mat2) -> f64 {
    let scale = m.iter().map(|x| x.norm()).fold(1.0, f64::max);
    (m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max) / scale
}
