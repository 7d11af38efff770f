//! Curve integrals of (1,1)-forms over geodesic balls and tubes.
//!
//! The parameter disc is cut into `θ` panels. For a fixed ray the region is a
//! union of radial intervals found by sampling the region's defining function
//! and bisecting every sign change; each interval is integrated with adaptive
//! Gauss–Kronrod, and the resulting function of `θ` is integrated the same way.

use std::cell::Cell;
use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::quadrature::adaptive;
use super::{bergman_form, ddbar_log_mu_smooth, omega_f, CurvePatch, FormMatrix, KahlerError};
use crate::ball::Region;
use crate::hermitian::std_matrix;
use crate::numeric::{herm, real, Vec3, C64};
use crate::par::{self, pairwise_sum, Execution};

/// Slack allowed below 1 in the Hwang–To ratio.
pub const HWANG_TO_TOLERANCE: f64 = 0.005;
pub const DEFAULT_LELONG_GRID: [f64; 3] = [0.2, 0.1, 0.05];

const UNIFORM_SAMPLES: usize = 64;
const GEOMETRIC_SAMPLES: i32 = 32;
const BISECTIONS: usize = 60;
const INNER_REL_TOL: f64 = 1e-10;
const INNER_DEPTH: u32 = 30;

/// A ball or tube in standard coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum StdRegion {
    Ball { center: Vec3, cosh2: f64 },
    Tube { polar: Vec3, tanh2: f64 },
}

impl StdRegion {
    fn check_radius(r: f64) -> Result<(), KahlerError> {
        if r.is_finite() && r > 0.0 {
            Ok(())
        } else {
            Err(KahlerError::BadGrid(format!("radius must be positive, got {r}")))
        }
    }

    /// Ball of radius `r` about the point with affine coordinates `(z, w)`.
    pub fn ball(z: C64, w: C64, r: f64) -> Result<Self, KahlerError> {
        Self::check_radius(r)?;
        if z.norm_sqr() + w.norm_sqr() >= 1.0 {
            return Err(KahlerError::OutsideBall { z, w });
        }
        Ok(StdRegion::Ball {
            center: Vec3::new(z, w, real(1.0)),
            cosh2: (r / 2.0).cosh().powi(2),
        })
    }

    /// Tube of radius `r` about `L = {z = 0}`.
    pub fn tube_z0(r: f64) -> Result<Self, KahlerError> {
        Self::check_radius(r)?;
        Ok(StdRegion::Tube {
            polar: Vec3::new(real(1.0), real(0.0), real(0.0)),
            tanh2: (r / 2.0).tanh().powi(2),
        })
    }

    /// Transports a region on any signature-(2,1) form to standard coordinates.
    pub fn from_region(region: &Region) -> Result<Self, KahlerError> {
        let r = region.radius();
        match region {
            Region::Ball { center, .. } => {
                let t = center.ambient().cayley_to_std()?;
                let (z, w) = center.std_coords(&t);
                Self::ball(z, w, r)
            }
            Region::Tube { line, .. } => {
                let t = line.ambient().cayley_to_std()?;
                Ok(StdRegion::Tube {
                    polar: t * line.polar(),
                    tanh2: (r / 2.0).tanh().powi(2),
                })
            }
        }
    }

    /// Negative exactly on the open region.
    pub fn defining_function(&self, z: C64, w: C64) -> f64 {
        let j = std_matrix();
        let p = Vec3::new(z, w, real(1.0));
        let pp = herm(&j, &p, &p).re;
        match self {
            StdRegion::Ball { center, cosh2 } => {
                let pc = herm(&j, &p, center);
                let cc = herm(&j, center, center).re;
                pc.norm_sqr() / (pp * cc) - cosh2
            }
            StdRegion::Tube { polar, tanh2 } => {
                let pn = herm(&j, &p, polar);
                let nn = herm(&j, polar, polar).re;
                let s = -pn.norm_sqr() / (pp * nn);
                s / (1.0 + s) - tanh2
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadSpec {
    /// Target relative error of the outer integral.
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub panels: usize,
    pub max_depth: u32,
    /// Restrict to `θ ∈ [θ0, θ1]`; the full circle otherwise.
    pub sector: Option<[f64; 2]>,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            abs_tol: 1e-13,
            panels: 16,
            max_depth: 24,
            sector: None,
            exec: Execution::Parallel,
        }
    }
}

impl QuadSpec {
    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_sector(mut self, a: f64, b: f64) -> Self {
        self.sector = Some([a, b]);
        self
    }

    fn validate(&self) -> Result<(), KahlerError> {
        if !(self.rel_tol > 0.0 && self.abs_tol >= 0.0) {
            return Err(KahlerError::BadQuad("tolerances must be positive".into()));
        }
        if self.panels == 0 {
            return Err(KahlerError::BadQuad("at least one panel is required".into()));
        }
        if let Some([a, b]) = self.sector {
            if !(b > a && b - a <= TAU + 1e-12) {
                return Err(KahlerError::BadQuad(format!("bad sector [{a}, {b}]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    /// The region reaches the edge of the parameter disc, so the value is truncated.
    pub touches_boundary: bool,
}

/// In-region radial intervals on the ray of angle `theta`, and whether the last one ends at `ρ`.
fn radial_intervals(curve: &CurvePatch, region: &StdRegion, theta: f64) -> (Vec<(f64, f64)>, bool) {
    let rho = curve.rho();
    let dir = C64::from_polar(1.0, theta);
    let g = |t: f64| {
        let (z, w) = curve.point(dir * t);
        region.defining_function(z, w)
    };
    let mut ts: Vec<f64> = (0..=UNIFORM_SAMPLES)
        .map(|i| rho * i as f64 / UNIFORM_SAMPLES as f64)
        .collect();
    ts.extend((1..=GEOMETRIC_SAMPLES).map(|k| rho * 0.5f64.powi(k)));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let inside: Vec<bool> = ts.iter().map(|&t| g(t) < 0.0).collect();
    let crossing = |mut lo: f64, mut hi: f64, lo_in: bool| {
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if (g(mid) < 0.0) == lo_in {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut out = Vec::new();
    let mut start = if inside[0] { Some(0.0) } else { None };
    for i in 1..ts.len() {
        if inside[i] == inside[i - 1] {
            continue;
        }
        let x = crossing(ts[i - 1], ts[i], inside[i - 1]);
        match start.take() {
            Some(a) => out.push((a, x)),
            None => start = Some(x),
        }
    }
    let touches = start.is_some();
    if let Some(a) = start {
        out.push((a, rho));
    }
    (out, touches)
}

/// `∫_{φ⁻¹(R)} 2·φ′ᵀ M conj(φ′) dx dy` over the parameter disc (or sector).
pub fn pullback_integral(
    curve: &CurvePatch,
    form: &FormMatrix,
    region: &StdRegion,
    quad: &QuadSpec,
) -> Result<Integral, KahlerError> {
    quad.validate()?;
    let [a, b] = quad.sector.unwrap_or([0.0, TAU]);
    let h = (b - a) / quad.panels as f64;
    let panels = par::map_range(quad.exec, quad.panels, |i| {
        let inner_err = Cell::new(0.0f64);
        let inner_ok = Cell::new(true);
        let touches = Cell::new(false);
        let ray = |theta: f64| {
            let (ivs, hit) = radial_intervals(curve, region, theta);
            if hit {
                touches.set(true);
            }
            let dir = C64::from_polar(1.0, theta);
            let f = |t: f64| {
                let s = dir * t;
                let (z, w) = curve.point(s);
                let (dz, dw) = curve.tangent(s);
                2.0 * form.density(z, w, dz, dw) * t
            };
            let parts: Vec<f64> = ivs
                .iter()
                .map(|&(lo, hi)| {
                    let e = adaptive(&f, lo, hi, INNER_REL_TOL, 1e-300, INNER_DEPTH);
                    inner_err.set(inner_err.get().max(e.error));
                    inner_ok.set(inner_ok.get() && e.converged);
                    e.value
                })
                .collect();
            pairwise_sum(&parts)
        };
        let lo = a + h * i as f64;
        let hi = if i + 1 == quad.panels { b } else { lo + h };
        let est = adaptive(
            &ray,
            lo,
            hi,
            quad.rel_tol,
            quad.abs_tol / quad.panels as f64,
            quad.max_depth,
        );
        (
            est.value,
            est.error + (hi - lo) * inner_err.get(),
            est.converged && inner_ok.get(),
            touches.get(),
        )
    });
    let values: Vec<f64> = panels.iter().map(|p| p.0).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.1).collect();
    let value = pairwise_sum(&values);
    let error = pairwise_sum(&errors);
    Ok(Integral {
        value,
        error,
        converged: panels.iter().all(|p| p.2) && error <= (quad.rel_tol * value.abs()).max(quad.abs_tol) * 10.0,
        touches_boundary: panels.iter().any(|p| p.3),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HwangToReport {
    pub curve: String,
    pub center_parameter: [f64; 2],
    pub radius: f64,
    pub volume: f64,
    pub error: f64,
    pub multiplicity: u32,
    /// `4π sinh²(r/2)·mult`.
    pub normalizer: f64,
    pub ratio: f64,
    pub passes: bool,
    pub converged: bool,
    pub touches_boundary: bool,
}

/// Bergman volume of the curve inside the ball of radius `r` about `φ(s0)`, against `4π sinh²(r/2)·mult`.
pub fn hwang_to_check(
    curve: &CurvePatch,
    s0: C64,
    r: f64,
    mult: Option<u32>,
    quad: &QuadSpec,
) -> Result<HwangToReport, KahlerError> {
    let (z, w) = curve.point(s0);
    let region = StdRegion::ball(z, w, r)?;
    let vol = pullback_integral(curve, &bergman_form(), &region, quad)?;
    let multiplicity = mult.unwrap_or_else(|| curve.multiplicity_at(s0));
    let normalizer = 4.0 * PI * (r / 2.0).sinh().powi(2) * multiplicity as f64;
    let ratio = vol.value / normalizer;
    Ok(HwangToReport {
        curve: curve.name().to_string(),
        center_parameter: [s0.re, s0.im],
        radius: r,
        volume: vol.value,
        error: vol.error,
        multiplicity,
        normalizer,
        ratio,
        passes: ratio >= 1.0 - HWANG_TO_TOLERANCE,
        converged: vol.converged,
        touches_boundary: vol.touches_boundary,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LelongReport {
    pub curve: String,
    /// Descending.
    pub radii: Vec<f64>,
    pub integrals: Vec<f64>,
    pub errors: Vec<f64>,
    /// `∫ω_F / (2 sinh²(r/2))`.
    pub ratios: Vec<f64>,
    /// Two-point `r²` extrapolation from the two smallest radii.
    pub limit: f64,
    pub intersection_number: u32,
    /// `2π·(C·L)`.
    pub expected: f64,
    /// `limit/expected`, or `limit` itself when nothing is expected.
    pub normalized_limit: f64,
    pub touches_boundary: bool,
}

fn check_grid(grid: &[f64], min_len: usize) -> Result<(), KahlerError> {
    if grid.len() < min_len {
        return Err(KahlerError::BadGrid(format!(
            "need at least {min_len} radii, got {}",
            grid.len()
        )));
    }
    if let Some(r) = grid.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(KahlerError::BadGrid(format!("radius must be positive, got {r}")));
    }
    Ok(())
}

/// `∫_{C∩W_r} ω_F / (2 sinh²(r/2))` around `L = {z = 0}` and its small-`r` limit.
pub fn lelong_ratio(curve: &CurvePatch, grid: &[f64], quad: &QuadSpec) -> Result<LelongReport, KahlerError> {
    check_grid(grid, 2)?;
    let mut radii = grid.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.dedup();
    if radii.len() < 2 {
        return Err(KahlerError::BadGrid("need two distinct radii".into()));
    }
    let form = omega_f();
    let mut integrals = Vec::new();
    let mut errors = Vec::new();
    let mut ratios = Vec::new();
    let mut touches = false;
    for &r in &radii {
        let i = pullback_integral(curve, &form, &StdRegion::tube_z0(r)?, quad)?;
        let norm = 2.0 * (r / 2.0).sinh().powi(2);
        touches |= i.touches_boundary;
        integrals.push(i.value);
        errors.push(i.error);
        ratios.push(i.value / norm);
    }
    let n = radii.len();
    let (r1, r2) = (radii[n - 2], radii[n - 1]);
    let (q1, q2) = (ratios[n - 2], ratios[n - 1]);
    let limit = (q2 * r1 * r1 - q1 * r2 * r2) / (r1 * r1 - r2 * r2);
    let intersection_number = curve.intersection_number();
    let expected = TAU * intersection_number as f64;
    Ok(LelongReport {
        curve: curve.name().to_string(),
        radii,
        integrals,
        errors,
        ratios,
        limit,
        intersection_number,
        expected,
        normalized_limit: if expected > 0.0 { limit / expected } else { limit },
        touches_boundary: touches,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityMode {
    /// `∫_{C∩W_r} ω_F / sinh²(r/2)` about `z = 0`.
    OmegaFOverSinh2,
    /// `vol(C∩W_r) / cosh²(r/2)` about `z = 0`.
    VolOverCosh2Tube,
    /// `vol(C∩B_r) / cosh²(r/2)` about the origin.
    VolOverCosh2Ball,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Increase,
    FlatWithinError,
    Decrease,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub curve: String,
    pub mode: MonotonicityMode,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub normalizers: Vec<f64>,
    pub normalized: Vec<f64>,
    pub normalized_errors: Vec<f64>,
    /// The region reached the edge of the patch; these radii are left out of the verdict.
    pub exhausted: Vec<bool>,
    /// Status between consecutive radii that are not exhausted.
    pub steps: Vec<StepStatus>,
    pub nondecreasing: bool,
    /// Some step fell within error bars with a negative difference.
    pub inconclusive: bool,
}

pub fn monotonicity_scan(
    curve: &CurvePatch,
    mode: MonotonicityMode,
    grid: &[f64],
    quad: &QuadSpec,
) -> Result<MonotonicityReport, KahlerError> {
    check_grid(grid, 2)?;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(KahlerError::BadGrid("radii must be strictly increasing".into()));
    }
    let mut rep = MonotonicityReport {
        curve: curve.name().to_string(),
        mode,
        radii: grid.to_vec(),
        values: Vec::new(),
        errors: Vec::new(),
        normalizers: Vec::new(),
        normalized: Vec::new(),
        normalized_errors: Vec::new(),
        exhausted: Vec::new(),
        steps: Vec::new(),
        nondecreasing: true,
        inconclusive: false,
    };
    for &r in grid {
        let (form, region, norm) = match mode {
            MonotonicityMode::OmegaFOverSinh2 => (omega_f(), StdRegion::tube_z0(r)?, (r / 2.0).sinh().powi(2)),
            MonotonicityMode::VolOverCosh2Tube => (bergman_form(), StdRegion::tube_z0(r)?, (r / 2.0).cosh().powi(2)),
            MonotonicityMode::VolOverCosh2Ball => (
                bergman_form(),
                StdRegion::ball(real(0.0), real(0.0), r)?,
                (r / 2.0).cosh().powi(2),
            ),
        };
        let i = pullback_integral(curve, &form, &region, quad)?;
        rep.values.push(i.value);
        rep.errors.push(i.error);
        rep.normalizers.push(norm);
        rep.normalized.push(i.value / norm);
        rep.normalized_errors.push(i.error / norm);
        rep.exhausted.push(i.touches_boundary);
    }
    let kept: Vec<usize> = (0..grid.len()).filter(|&i| !rep.exhausted[i]).collect();
    for w in kept.windows(2) {
        let (i, j) = (w[0], w[1]);
        let diff = rep.normalized[j] - rep.normalized[i];
        let bar = rep.normalized_errors[i] + rep.normalized_errors[j];
        let status = if diff > bar {
            StepStatus::Increase
        } else if diff >= -bar {
            if diff < 0.0 {
                rep.inconclusive = true;
            }
            StepStatus::FlatWithinError
        } else {
            rep.nondecreasing = false;
            StepStatus::Decrease
        };
        rep.steps.push(status);
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct StokesReport {
    pub radius: f64,
    /// `∫_{C∩W_r} ω_F`.
    pub lhs: f64,
    pub lhs_error: f64,
    /// `∫_{C∩W_r}` of the smooth part of `i∂∂̄ log μ̃`.
    pub smooth: f64,
    pub smooth_error: f64,
    pub intersection_number: u32,
    /// `2 sinh²(r/2)·(2π(C·L) + smooth)`.
    pub rhs: f64,
    pub rhs_error: f64,
    pub consistent: bool,
}

/// Compares `∫ω_F` with `F′(log tanh²(r/2))·∫ i∂∂̄ log μ̃` on the tube about `z = 0`.
pub fn stokes_check(curve: &CurvePatch, r: f64, quad: &QuadSpec) -> Result<StokesReport, KahlerError> {
    let region = StdRegion::tube_z0(r)?;
    let lhs = pullback_integral(curve, &omega_f(), &region, quad)?;
    let smooth = pullback_integral(curve, &ddbar_log_mu_smooth(), &region, quad)?;
    let k = 2.0 * (r / 2.0).sinh().powi(2);
    let n = curve.intersection_number();
    let rhs = k * (TAU * n as f64 + smooth.value);
    let rhs_error = k * smooth.error;
    let floor = 1e-9 * lhs.value.abs().max(1e-12);
    Ok(StokesReport {
        radius: r,
        lhs: lhs.value,
        lhs_error: lhs.error,
        smooth: smooth.value,
        smooth_error: smooth.error,
        intersection_number: n,
        rhs,
        rhs_error,
        consistent: (lhs.value - rhs).abs() <= lhs.error + rhs_error + floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kahler::{CurveFamily, CurveSpec};

    fn patch(f: CurveFamily) -> CurvePatch {
        CurvePatch::from_spec(&CurveSpec { family: f, rho: None }).unwrap()
    }

    /// Area of the geodesic disc by the one-dimensional radial integral of `2·2/(1−t²)²·t` over `t < tanh(r/2)`.
    fn disc_area_oracle(r: f64) -> f64 {
        let top = (r / 2.0).tanh();
        let e = adaptive(
            &|t: f64| TAU * 4.0 * t / (1.0 - t * t).powi(2),
            0.0,
            top,
            1e-13,
            0.0,
            40,
        );
        e.value
    }

    #[test]
    fn geodesic_disc_area() {
        let line = patch(CurveFamily::Line);
        for r in [0.5, 1.0, 1.5] {
            let got = pullback_integral(
                &line,
                &bergman_form(),
                &StdRegion::ball(real(0.0), real(0.0), r).unwrap(),
                &QuadSpec::default(),
            )
            .unwrap();
            let want = 4.0 * PI * (r / 2.0).sinh().powi(2);
            assert!((disc_area_oracle(r) / want - 1.0).abs() < 1e-10);
            assert!((got.value / want - 1.0).abs() < 1e-6, "r={r}: {got:?} vs {want}");
            assert!(got.converged && !got.touches_boundary);
        }
    }

    #[test]
    fn empty_intersection_is_zero() {
        let line = patch(CurveFamily::Line);
        let far = StdRegion::ball(real(0.0), real(0.9), 0.3).unwrap();
        let got = pullback_integral(&line, &bergman_form(), &far, &QuadSpec::default()).unwrap();
        assert_eq!(got.value, 0.0);
    }

    #[test]
    fn reparametrization_and_additivity() {
        let line = patch(CurveFamily::Line);
        let sq = CurvePatch::new("square", vec![real(0.0), real(0.0), real(1.0)], vec![], 0.95f64.sqrt()).unwrap();
        let region = StdRegion::ball(real(0.1), real(0.0), 1.0).unwrap();
        let q = QuadSpec::default();
        let full = pullback_integral(&line, &bergman_form(), &region, &q).unwrap();
        let half = pullback_integral(&sq, &bergman_form(), &region, &q.with_sector(0.0, PI)).unwrap();
        assert!(
            (full.value - half.value).abs() <= 10.0 * (full.error + half.error) + 1e-9,
            "{full:?} {half:?}"
        );
        let other = pullback_integral(&sq, &bergman_form(), &region, &q.with_sector(PI, TAU)).unwrap();
        let whole = pullback_integral(&sq, &bergman_form(), &region, &q).unwrap();
        assert!((half.value + other.value - whole.value).abs() < 1e-8 * whole.value);
        assert!((whole.value - 2.0 * full.value).abs() < 1e-6 * whole.value);
    }

    #[test]
    fn sequential_matches_parallel_bitwise() {
        let g = patch(CurveFamily::Graph { k: 2 });
        let region = StdRegion::tube_z0(0.8).unwrap();
        let a = pullback_integral(
            &g,
            &omega_f(),
            &region,
            &QuadSpec::default().with_exec(Execution::Sequential),
        )
        .unwrap();
        let b = pullback_integral(&g, &omega_f(), &region, &QuadSpec::default()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn hwang_to_ratios() {
        let q = QuadSpec::default();
        let line = hwang_to_check(&patch(CurveFamily::Line), real(0.0), 1.0, None, &q).unwrap();
        assert!((line.ratio - 1.0).abs() < 1e-6);
        for (f, m) in [(CurveFamily::Parabola, 1), (CurveFamily::Cusp, 2)] {
            let c = patch(f);
            let rep = hwang_to_check(&c, real(0.0), 0.8, None, &q).unwrap();
            assert_eq!(rep.multiplicity, m);
            assert!(rep.passes && rep.ratio >= 1.0, "{rep:?}");
            assert!(!rep.touches_boundary);
        }
    }

    #[test]
    fn lelong_limits() {
        for k in 1..=3 {
            let c = patch(CurveFamily::Graph { k });
            let rep = lelong_ratio(&c, &DEFAULT_LELONG_GRID, &QuadSpec::default()).unwrap();
            assert_eq!(rep.intersection_number, k);
            assert!((rep.normalized_limit - 1.0).abs() < 0.05, "k={k}: {rep:?}");
        }
        let line = patch(CurveFamily::Line);
        let rep = lelong_ratio(&line, &DEFAULT_LELONG_GRID, &QuadSpec::default()).unwrap();
        assert!((rep.normalized_limit - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lelong_disjoint_curve_is_zero() {
        // z = 0.5 + s/4 never vanishes on |s| < 0.6
        let c = CurvePatch::new("offset", vec![real(0.5), real(0.25)], vec![real(0.0), real(0.5)], 0.6).unwrap();
        let rep = lelong_ratio(&c, &DEFAULT_LELONG_GRID, &QuadSpec::default()).unwrap();
        assert_eq!(rep.intersection_number, 0);
        assert_eq!(rep.limit, 0.0);
        assert!(lelong_ratio(&c, &[0.1], &QuadSpec::default()).is_err());
    }

    #[test]
    fn stokes_identity() {
        for f in [CurveFamily::Line, CurveFamily::Graph { k: 2 }, CurveFamily::Parabola] {
            let c = patch(f);
            for r in [0.3, 1.0] {
                let s = stokes_check(&c, r, &QuadSpec::default()).unwrap();
                assert!(s.consistent, "{s:?}");
            }
        }
    }

    #[test]
    fn monotone_scans() {
        let grid: Vec<f64> = (1..=8).map(|i| 0.2 * i as f64).collect();
        for f in [CurveFamily::Line, CurveFamily::Graph { k: 2 }] {
            let c = patch(f);
            for mode in [
                MonotonicityMode::OmegaFOverSinh2,
                MonotonicityMode::VolOverCosh2Tube,
                MonotonicityMode::VolOverCosh2Ball,
            ] {
                let rep = monotonicity_scan(&c, mode, &grid, &QuadSpec::default()).unwrap();
                assert!(rep.nondecreasing, "{mode:?}: {rep:?}");
            }
        }
        assert!(monotonicity_scan(
            &patch(CurveFamily::Line),
            MonotonicityMode::VolOverCosh2Ball,
            &[0.5, 0.4],
            &QuadSpec::default()
        )
        .is_err());
    }

    #[test]
    fn exhausted_radii_are_flagged() {
        // the small patch is swallowed by large balls
        let c = CurvePatch::new("small", vec![real(0.0), real(1.0)], vec![], 0.2).unwrap();
        let rep = monotonicity_scan(
            &c,
            MonotonicityMode::VolOverCosh2Ball,
            &[0.2, 0.3, 1.0, 2.0],
            &QuadSpec::default(),
        )
        .unwrap();
        assert_eq!(rep.exhausted, vec![false, false, true, true]);
        assert_eq!(rep.steps.len(), 1);
    }

    #[test]
    fn region_transport_matches_standard() {
        use crate::ball::{BallPoint, ComplexLine};
        use crate::hermitian::HermitianForm;
        use std::sync::Arc;
        let j = Arc::new(HermitianForm::standard());
        let p = BallPoint::new(j.clone(), Vec3::new(real(0.2), real(0.1), real(1.0))).unwrap();
        let r = StdRegion::from_region(&Region::ball(p, 0.7).unwrap()).unwrap();
        assert_eq!(r, StdRegion::ball(real(0.2), real(0.1), 0.7).unwrap());
        let l = ComplexLine::new(j, Vec3::new(real(1.0), real(0.0), real(0.0))).unwrap();
        let t = StdRegion::from_region(&Region::tube(l, 0.7).unwrap()).unwrap();
        let (z, w) = (C64::new(0.1, 0.2), C64::new(-0.3, 0.1));
        assert!((t.defining_function(z, w) - StdRegion::tube_z0(0.7).unwrap().defining_function(z, w)).abs() < 1e-14);
    }
}
