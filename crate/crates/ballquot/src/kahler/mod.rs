//! Kähler-form calculus on `B²` in standard coordinates `J = diag(1, 1, −1)`.
//!
//! A (1,1)-form is a [`FormMatrix`]: a Hermitian 2×2 field `M` with
//! `ω = i Σ M_jk dx_j ∧ dx̄_k`. Pulled back along a holomorphic curve `φ` it
//! becomes `2·φ′ᵀ M conj(φ′) dx dy` on the parameter disc.
//!
//! The module provides the Bergman form, the forms built from
//! `μ̃ = |z|²/(1 − |w|²)`, the comparison form `ω_F`, curve-volume integrals over
//! geodesic balls and tubes, Lelong-ratio extraction, monotonicity scans and the
//! genus certificate arithmetic.

mod curve;
mod forms;
mod genus;
pub mod quadrature;
mod volume;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ball::BallError;
use crate::hermitian::FormError;
use crate::numeric::C64;

pub use curve::{CurveFamily, CurvePatch, CurveSpec, MarkedPoint};
pub use forms::{
    bergman_form, big_f, big_f1, big_f2, ddbar_log_mu_smooth, eig2, flat_form, hermitian_defect, log_mu_factors,
    mu_forms, omega_f, omega_f_composed, FormMatrix, Mat2,
};
pub use genus::{
    genus_certificate, Bound, GenusCertificate, GenusInput, LineVariant, Step2Record, BALL_DIVISOR, STEP2_COVER_BALLS,
    STEP2_COVER_TUBES, STEP2_GROWTH, TUBE_DIVISOR,
};
pub use volume::{
    hwang_to_check, lelong_ratio, monotonicity_scan, pullback_integral, stokes_check, HwangToReport, Integral,
    LelongReport, MonotonicityMode, MonotonicityReport, QuadSpec, StdRegion, StepStatus, StokesReport,
    DEFAULT_LELONG_GRID, HWANG_TO_TOLERANCE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KahlerError {
    #[error("point ({z}, {w}) is outside the unit ball")]
    OutsideBall { z: C64, w: C64 },
    #[error("invalid curve: {0}")]
    BadCurve(String),
    #[error("invalid radius grid: {0}")]
    BadGrid(String),
    #[error("invalid quadrature spec: {0}")]
    BadQuad(String),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// `f′` and `f″` of a profile `f` composed with `log μ̃`, defined for `s ≤ s_star`.
#[derive(Clone)]
pub struct PshSpec {
    pub name: String,
    pub f1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub s_star: f64,
}

impl std::fmt::Debug for PshSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PshSpec")
            .field("name", &self.name)
            .field("s_star", &self.s_star)
            .finish()
    }
}

impl PshSpec {
    pub fn new(
        name: impl Into<String>,
        f1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        s_star: f64,
    ) -> Self {
        Self {
            name: name.into(),
            f1: Arc::new(f1),
            f2: Arc::new(f2),
            s_star,
        }
    }

    /// `f(s) = s`.
    pub fn log() -> Self {
        Self::new("log", |_| 1.0, |_| 0.0, 0.0)
    }

    /// `F(s) = −2 log(1 − eˢ)`; the cap keeps `F′` finite.
    pub fn big_f() -> Self {
        Self::new("F", big_f1, big_f2, -1e-3)
    }

    pub fn neg_log() -> Self {
        Self::new("-log", |_| -1.0, |_| 0.0, 0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PshWitness {
    pub z: [f64; 2],
    pub w: [f64; 2],
    pub s: f64,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PshVerdict {
    pub name: String,
    pub samples: usize,
    pub psh: bool,
    /// Both rank-one factors had `det ≈ 0` and positive trace at every sample.
    pub factors_ok: bool,
    /// Smallest eigenvalue of `f″A + f′B` divided by its norm.
    pub min_scaled_eigenvalue: f64,
    pub witness: Option<PshWitness>,
}

/// Samples `W = {μ̃ < e^{s*}}` off `z = 0` and tests `f″A + f′B ≥ 0`.
pub fn psh_check(spec: &PshSpec, samples: usize, seed: u64) -> PshVerdict {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = spec.s_star.exp().min(1.0);
    let mut factors_ok = true;
    let mut min_scaled = f64::INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let w = C64::from_polar(
            0.999 * rng.gen::<f64>().sqrt(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let mu = cap * rng.gen_range(1e-9..1.0);
        let z = C64::from_polar(
            (mu * (1.0 - w.norm_sqr())).sqrt(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let s = mu.ln();
        let (a, b) = log_mu_factors(z, w);
        for f in [&a, &b] {
            let tr = f[(0, 0)].re + f[(1, 1)].re;
            let det = f.determinant().norm();
            if tr <= 0.0 || det > 1e-9 * tr * tr {
                factors_ok = false;
            }
        }
        let m = a * crate::numeric::real((spec.f2)(s)) + b * crate::numeric::real((spec.f1)(s));
        let scale = m.norm();
        let lam = eig2(&m)[0];
        let scaled = if scale > 0.0 { lam / scale } else { 0.0 };
        if scaled < min_scaled {
            min_scaled = scaled;
        }
        if lam < -TOL * scale.max(1.0) && witness.is_none() {
            witness = Some(PshWitness {
                z: [z.re, z.im],
                w: [w.re, w.im],
                s,
                min_eigenvalue: lam,
            });
        }
    }
    PshVerdict {
        name: spec.name.clone(),
        samples,
        psh: witness.is_none(),
        factors_ok,
        min_scaled_eigenvalue: min_scaled,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_and_f_are_psh() {
        for spec in [PshSpec::log(), PshSpec::big_f()] {
            let v = psh_check(&spec, 2000, 7);
            assert!(v.psh, "{}: {:?}", spec.name, v.witness);
            assert!(v.factors_ok);
        }
    }

    #[test]
    fn negative_coefficient_fails_with_witness() {
        let v = psh_check(&PshSpec::neg_log(), 200, 7);
        assert!(!v.psh);
        let w = v.witness.unwrap();
        assert!(w.min_eigenvalue < 0.0);
        assert!(v.factors_ok);
    }
}
