use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::KahlerError;
use crate::numeric::{real, C64};

/// Derivatives below this modulus count as vanishing.
const VANISH_TOL: f64 = 1e-9;
/// Roots of `z(s)` closer than this are merged.
const ROOT_CLUSTER: f64 = 1e-6;
/// Boundary samples used to certify that the patch stays inside the ball.
const BOUNDARY_SAMPLES: usize = 2048;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveFamily {
    /// `s ↦ (s, 0)`.
    Line,
    /// `s ↦ (s^k, s)`.
    Graph { k: u32 },
    /// `s ↦ (s², s³)`.
    Cusp,
    /// `s ↦ (s, s²/2)`.
    Parabola,
    /// Ascending coefficient lists, each coefficient `[re, im]`.
    Polynomial { z: Vec<[f64; 2]>, w: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(flatten)]
    pub family: CurveFamily,
    /// Parameter disc radius; each family has a default.
    #[serde(default)]
    pub rho: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkedPoint {
    pub s: [f64; 2],
    /// Multiplicity of the curve at `φ(s)`.
    pub multiplicity: u32,
    /// Local intersection number with `L = {z = 0}` (order of vanishing of `z`).
    pub intersection_with_l: u32,
}

/// A polynomial disc `φ(s) = (z(s), w(s))`, `|s| < ρ`, inside `B²`.
#[derive(Clone, Debug)]
pub struct CurvePatch {
    name: String,
    z: Vec<C64>,
    w: Vec<C64>,
    rho: f64,
    marked: Vec<MarkedPoint>,
}

fn horner(p: &[C64], s: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * s + c)
}

fn derivative(p: &[C64]) -> Vec<C64> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

fn trim(mut p: Vec<C64>) -> Vec<C64> {
    while p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    p
}

/// Roots by eigenvalues of the companion matrix, after splitting off exact zeros at the origin.
fn roots(p: &[C64]) -> Vec<C64> {
    let p = trim(p.to_vec());
    let at_zero = p.iter().take_while(|c| c.norm() == 0.0).count();
    let mut out = vec![C64::new(0.0, 0.0); at_zero.min(p.len().saturating_sub(1))];
    let q = &p[at_zero.min(p.len())..];
    let n = q.len().saturating_sub(1);
    if n == 0 {
        return out;
    }
    let lead = q[n];
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = real(1.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -q[i] / lead;
    }
    if let Some(e) = m.try_schur(1e-14, 10_000).and_then(|s| s.eigenvalues()) {
        out.extend(e.iter().copied());
    }
    out
}

fn monomial(k: usize, c: C64) -> Vec<C64> {
    let mut p = vec![C64::new(0.0, 0.0); k + 1];
    p[k] = c;
    p
}

impl CurvePatch {
    pub fn from_spec(spec: &CurveSpec) -> Result<Self, KahlerError> {
        let one = real(1.0);
        let (name, z, w, rho) = match &spec.family {
            CurveFamily::Line => ("line".to_string(), monomial(1, one), Vec::new(), 0.95),
            CurveFamily::Graph { k } => {
                if *k == 0 {
                    return Err(KahlerError::BadCurve("graph exponent must be at least 1".into()));
                }
                let rho = if *k == 1 { 0.7 } else { 0.75 };
                (
                    format!("graph k={k}"),
                    monomial(*k as usize, one),
                    monomial(1, one),
                    rho,
                )
            }
            CurveFamily::Cusp => ("cusp".to_string(), monomial(2, one), monomial(3, one), 0.75),
            CurveFamily::Parabola => ("parabola".to_string(), monomial(1, one), monomial(2, real(0.5)), 0.8),
            CurveFamily::Polynomial { z, w } => {
                let conv = |v: &Vec<[f64; 2]>| v.iter().map(|c| C64::new(c[0], c[1])).collect::<Vec<_>>();
                let rho = spec
                    .rho
                    .ok_or_else(|| KahlerError::BadCurve("polynomial curves need an explicit rho".into()))?;
                ("polynomial".to_string(), conv(z), conv(w), rho)
            }
        };
        Self::new(name, z, w, spec.rho.unwrap_or(rho))
    }

    pub fn new(name: impl Into<String>, z: Vec<C64>, w: Vec<C64>, rho: f64) -> Result<Self, KahlerError> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(KahlerError::BadCurve(format!(
                "patch radius must be positive, got {rho}"
            )));
        }
        let (z, w) = (trim(z), trim(w));
        if z.len() <= 1 && w.len() <= 1 {
            return Err(KahlerError::BadCurve("constant map".into()));
        }
        let mut patch = Self {
            name: name.into(),
            z,
            w,
            rho,
            marked: Vec::new(),
        };
        // |z|²+|w|² is subharmonic, so the boundary circle bounds it
        let worst = (0..BOUNDARY_SAMPLES)
            .map(|i| {
                let s = C64::from_polar(rho, std::f64::consts::TAU * i as f64 / BOUNDARY_SAMPLES as f64);
                let (z, w) = patch.point(s);
                z.norm_sqr() + w.norm_sqr()
            })
            .fold(0.0, f64::max);
        if worst >= 1.0 - 1e-9 {
            return Err(KahlerError::BadCurve(format!(
                "patch leaves the ball: |z|²+|w|² reaches {worst} on |s| = {rho}"
            )));
        }
        patch.marked = patch.find_marked();
        Ok(patch)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn marked(&self) -> &[MarkedPoint] {
        &self.marked
    }

    pub fn point(&self, s: C64) -> (C64, C64) {
        (horner(&self.z, s), horner(&self.w, s))
    }

    pub fn tangent(&self, s: C64) -> (C64, C64) {
        (horner(&derivative(&self.z), s), horner(&derivative(&self.w), s))
    }

    /// First `k ≥ 1` with `φ^{(k)}(s) ≠ 0`.
    pub fn multiplicity_at(&self, s: C64) -> u32 {
        let (mut dz, mut dw) = (derivative(&self.z), derivative(&self.w));
        let mut k = 1;
        loop {
            if horner(&dz, s).norm() > VANISH_TOL || horner(&dw, s).norm() > VANISH_TOL {
                return k;
            }
            if dz.is_empty() && dw.is_empty() {
                return 0;
            }
            dz = derivative(&dz);
            dw = derivative(&dw);
            k += 1;
        }
    }

    /// Order of vanishing of `z` at `s`.
    pub fn z_order_at(&self, s: C64) -> u32 {
        let mut p = self.z.clone();
        let mut k = 0;
        while !p.is_empty() && horner(&p, s).norm() <= VANISH_TOL {
            p = derivative(&p);
            k += 1;
        }
        k
    }

    /// Total `(C·L)` with `L = {z = 0}` over the given marked points.
    pub fn intersection_number(&self) -> u32 {
        self.marked.iter().map(|m| m.intersection_with_l).sum()
    }

    fn find_marked(&self) -> Vec<MarkedPoint> {
        let mut pts: Vec<C64> = Vec::new();
        for r in roots(&self.z) {
            if r.norm() < self.rho && !pts.iter().any(|p| (p - r).norm() < ROOT_CLUSTER) {
                pts.push(r);
            }
        }
        if !pts.iter().any(|p| p.norm() < ROOT_CLUSTER) {
            pts.push(C64::new(0.0, 0.0));
        }
        pts.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
        pts.into_iter()
            .map(|s| {
                // snap clustered roots onto the exact origin when they are that close
                let s = if s.norm() < ROOT_CLUSTER { C64::new(0.0, 0.0) } else { s };
                MarkedPoint {
                    s: [s.re, s.im],
                    multiplicity: self.multiplicity_at(s),
                    intersection_with_l: self.z_order_at(s),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn patch(f: CurveFamily) -> CurvePatch {
        CurvePatch::from_spec(&CurveSpec { family: f, rho: None }).unwrap()
    }

    #[test]
    fn named_families_metadata() {
        let line = patch(CurveFamily::Line);
        assert_eq!(line.intersection_number(), 1);
        assert_eq!(line.marked()[0].multiplicity, 1);
        for k in 1..=3 {
            let g = patch(CurveFamily::Graph { k });
            assert_eq!(g.intersection_number(), k);
            assert_eq!(g.marked()[0].multiplicity, 1);
        }
        let cusp = patch(CurveFamily::Cusp);
        assert_eq!(cusp.marked()[0].multiplicity, 2);
        assert_eq!(cusp.intersection_number(), 2);
    }

    #[test]
    fn off_origin_zero_is_found() {
        // z = s − 0.3, w = s²
        let p = CurvePatch::new(
            "shifted",
            vec![real(-0.3), real(1.0)],
            vec![real(0.0), real(0.0), real(1.0)],
            0.5,
        )
        .unwrap();
        assert_eq!(p.intersection_number(), 1);
        assert!(p.marked().iter().any(|m| (m.s[0] - 0.3).abs() < 1e-9));
    }

    #[test]
    fn rejects_bad_patches() {
        assert!(CurvePatch::new("big", vec![real(0.0), real(1.0)], vec![], 1.0).is_err());
        assert!(CurvePatch::new("const", vec![real(0.1)], vec![], 0.5).is_err());
        let spec = CurveSpec {
            family: CurveFamily::Polynomial {
                z: vec![[0.0, 0.0], [1.0, 0.0]],
                w: vec![],
            },
            rho: None,
        };
        assert!(CurvePatch::from_spec(&spec).is_err());
    }

    #[test]
    fn spec_json_roundtrip() {
        let s: CurveSpec = serde_json::from_str(r#"{"family":"graph","k":2}"#).unwrap();
        assert_eq!(s.family, CurveFamily::Graph { k: 2 });
        let back: CurveSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let p: CurveSpec =
            serde_json::from_str(r#"{"family":"polynomial","z":[[0,0],[0,0],[1,0]],"w":[],"rho":0.9}"#).unwrap();
        assert_eq!(CurvePatch::from_spec(&p).unwrap().intersection_number(), 2);
    }
}
