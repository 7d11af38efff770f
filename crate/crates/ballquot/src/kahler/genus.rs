//! Genus-exclusion arithmetic: the volume upper bound from Gauss–Bonnet plus
//! elliptic-point counts, and the covering contradiction used to rule curves out.

use std::f64::consts::PI;

use serde::Serialize;

use crate::lattice::{STABILIZER_ORDER_CAP, TUBE_FIBER_CAP};

/// Elliptic points from isolated points cost `vol / ((π/12) sinh²(r/2))`.
pub const BALL_DIVISOR: f64 = 12.0;
/// Elliptic points from elliptic lines cost `vol / ((π/6) sinh²(r/2))`.
pub const TUBE_DIVISOR: f64 = 6.0;
/// Required volume growth between the two radii of the covering argument.
pub const STEP2_GROWTH: u32 = 26;
pub const STEP2_COVER_BALLS: u32 = 1;
pub const STEP2_COVER_TUBES: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenusInput {
    pub g: i64,
    /// `sinh²(r/2)`.
    pub sinh2: f64,
    pub ball_divisor: f64,
    pub tube_divisor: f64,
}

impl GenusInput {
    pub fn new(g: i64, sinh2: f64) -> Self {
        Self {
            g,
            sinh2,
            ball_divisor: BALL_DIVISOR,
            tube_divisor: TUBE_DIVISOR,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Bound {
    /// `vol_X(C) ≤ value`.
    Upper { value: f64 },
    /// The right-hand side is nonpositive, so no curve of positive volume exists.
    EmptyBound { value: f64 },
    /// The elliptic-point coefficient is at least `1/(4π)`; no bound follows.
    Infeasible { threshold: f64 },
}

impl Bound {
    pub fn value(&self) -> Option<f64> {
        match self {
            Bound::Upper { value } | Bound::EmptyBound { value } => Some(*value),
            Bound::Infeasible { .. } => None,
        }
    }
}

/// `(1/4π)·vol ≤ k·(2g − 2) + c·vol` solved for `vol`.
fn solve(numerator: f64, c: f64, threshold: f64, sinh2: f64) -> Bound {
    let denom = 1.0 / (4.0 * PI) - c;
    if !(sinh2 > threshold) || denom <= 0.0 {
        return Bound::Infeasible { threshold };
    }
    let value = numerator / denom;
    if numerator <= 0.0 {
        Bound::EmptyBound { value }
    } else {
        Bound::Upper { value }
    }
}

/// The same bound for a component of an elliptic complex line: only isolated
/// points count and the right-hand side is halved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineVariant {
    pub coefficient: f64,
    pub threshold: f64,
    pub bound: Bound,
}

/// The covering contradiction `growth·vol ≤ (balls + tubes)·vol`, recorded with its assumptions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step2Record {
    pub growth: u32,
    pub cover_balls: u32,
    pub cover_tubes: u32,
    pub cover_total: u32,
    pub contradiction: bool,
    /// Tube radii must satisfy `cosh²(R₂/2) ≥ tube_factor·cosh²(R₁/2)`.
    pub tube_factor: f64,
    /// Ball radii (balls of radius `2R`) must satisfy `cosh²(R₂) ≥ ball_factor·cosh²(R₁)`.
    pub ball_factor: f64,
    pub assumptions: Vec<String>,
}

impl Step2Record {
    pub fn new(growth: u32, cover_balls: u32, cover_tubes: u32) -> Self {
        let cover_total = cover_balls + cover_tubes;
        Self {
            growth,
            cover_balls,
            cover_tubes,
            cover_total,
            contradiction: growth > cover_total,
            tube_factor: (TUBE_FIBER_CAP * growth) as f64,
            ball_factor: (STABILIZER_ORDER_CAP * growth) as f64,
            assumptions: vec![
                format!(
                    "each point of the enlarged cover lies in at most {cover_balls} ball(s) and {cover_tubes} tube(s)"
                ),
                format!("relative volume growth of at least {growth} between R1 and R2"),
            ],
        }
    }

    /// Whether given radii realize the growth factor through the relative volume inequalities.
    pub fn radii_sufficient(&self, r1: f64, r2: f64) -> bool {
        let tube = (r2 / 2.0).cosh().powi(2) >= self.tube_factor * (r1 / 2.0).cosh().powi(2);
        let ball = r2.cosh().powi(2) >= self.ball_factor * r1.cosh().powi(2);
        tube && ball
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenusCertificate {
    pub input: GenusInput,
    /// `(tube_divisor + ball_divisor)/(π sinh²(r/2))`, i.e. `18/(π sinh²)` with the defaults.
    pub coefficient: f64,
    /// `sinh²(r/2)` must exceed this.
    pub threshold: f64,
    pub bound: Bound,
    pub line_variant: LineVariant,
    pub step2: Step2Record,
    /// Quotient lower bounds per unit `sinh²(r/2)`: `4π/24` near lines, `4π/48` near points.
    pub descent_tube: f64,
    pub descent_point: f64,
}

pub fn genus_certificate(input: GenusInput) -> GenusCertificate {
    let s = input.sinh2;
    let combined = input.ball_divisor + input.tube_divisor;
    let coefficient = combined / (PI * s);
    // 1/(4π) > combined/(π s)  ⟺  s > 4·combined
    let threshold = 4.0 * combined;
    let bound = solve((2 * input.g - 2) as f64, coefficient, threshold, s);
    let half_ball = input.ball_divisor / 2.0;
    let line_threshold = 4.0 * half_ball;
    let line_coefficient = half_ball / (PI * s);
    let line_variant = LineVariant {
        coefficient: line_coefficient,
        threshold: line_threshold,
        bound: solve((input.g - 1) as f64, line_coefficient, line_threshold, s),
    };
    GenusCertificate {
        input,
        coefficient,
        threshold,
        bound,
        line_variant,
        step2: Step2Record::new(STEP2_GROWTH, STEP2_COVER_BALLS, STEP2_COVER_TUBES),
        descent_tube: 4.0 * PI / TUBE_FIBER_CAP as f64,
        descent_point: 4.0 * PI / STABILIZER_ORDER_CAP as f64,
    }
}
