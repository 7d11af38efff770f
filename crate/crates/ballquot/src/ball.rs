//! Points, complex lines, geodesic balls and tubes in the projective ball model.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::cmfield::{Embedding, FieldVector};
use crate::hermitian::{FormError, HermitianForm, SignClass};
use crate::numeric::{self, Vec3};

/// Relative tolerance for the `tance = 1` branch of [`line_relation`].
pub const ASYMPTOTIC_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BallError {
    #[error("representative is not a negative vector")]
    NotNegative,
    #[error("polar vector is not positive")]
    NotPositive,
    #[error("arguments live in different ambient forms")]
    AmbientMismatch,
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A point of the ball, stored as an unnormalized negative vector.
#[derive(Clone, Debug)]
pub struct BallPoint {
    rep: Vec3,
    ambient: Arc<HermitianForm>,
}

/// A complex line, stored through its positive polar vector.
#[derive(Clone, Debug)]
pub struct ComplexLine {
    polar: Vec3,
    ambient: Arc<HermitianForm>,
}

#[derive(Clone, Debug)]
pub enum Region {
    Ball { center: BallPoint, radius: f64 },
    Tube { line: ComplexLine, radius: f64 },
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum LineRelation {
    Ultraparallel { cosh2_half_distance: f64, distance: f64 },
    AsymptoticOrEqual,
    Intersecting { point: [[f64; 2]; 3] },
}

fn same_ambient(a: &Arc<HermitianForm>, b: &Arc<HermitianForm>) -> Result<(), BallError> {
    if Arc::ptr_eq(a, b) {
        return Ok(());
    }
    let scale = numeric::max_abs(a.matrix()).max(1.0);
    if numeric::max_abs(&(a.matrix() - b.matrix())) <= 1e-12 * scale {
        Ok(())
    } else {
        Err(BallError::AmbientMismatch)
    }
}

/// `(re, im)` pairs after scaling the last coordinate to 1 when possible.
pub fn vector_pairs(v: &Vec3) -> [[f64; 2]; 3] {
    let w = if v[2].norm() > 1e-300 { v / v[2] } else { *v };
    [[w[0].re, w[0].im], [w[1].re, w[1].im], [w[2].re, w[2].im]]
}

impl BallPoint {
    pub fn new(ambient: Arc<HermitianForm>, rep: Vec3) -> Result<Self, BallError> {
        if ambient.sign_class(&rep) != SignClass::Negative {
            return Err(BallError::NotNegative);
        }
        Ok(Self { rep, ambient })
    }

    pub fn from_exact(ambient: Arc<HermitianForm>, v: &FieldVector) -> Result<Self, BallError> {
        if ambient.sign_class_exact(v)? != SignClass::Negative {
            return Err(BallError::NotNegative);
        }
        Ok(Self {
            rep: v.embed(Embedding::Sigma1),
            ambient,
        })
    }

    /// The point `[z, w, 1]` of the standard ball.
    pub fn standard(z: crate::numeric::C64, w: crate::numeric::C64) -> Result<Self, BallError> {
        Self::new(Arc::new(HermitianForm::standard()), Vec3::new(z, w, numeric::real(1.0)))
    }

    pub fn rep(&self) -> &Vec3 {
        &self.rep
    }

    pub fn ambient(&self) -> &Arc<HermitianForm> {
        &self.ambient
    }

    /// Affine coordinates `(z, w)` after a transform `T` to the standard form.
    pub fn std_coords(&self, t: &numeric::Mat3) -> (numeric::C64, numeric::C64) {
        let v = t * self.rep;
        (v[0] / v[2], v[1] / v[2])
    }
}

impl ComplexLine {
    pub fn new(ambient: Arc<HermitianForm>, polar: Vec3) -> Result<Self, BallError> {
        if ambient.sign_class(&polar) != SignClass::Positive {
            return Err(BallError::NotPositive);
        }
        Ok(Self { polar, ambient })
    }

    pub fn polar(&self) -> &Vec3 {
        &self.polar
    }

    pub fn ambient(&self) -> &Arc<HermitianForm> {
        &self.ambient
    }

    pub fn contains(&self, p: &BallPoint) -> bool {
        let h = self.ambient.eval(&p.rep, &self.polar).norm();
        h <= 1e-12 * p.rep.norm() * self.polar.norm() * numeric::max_abs(self.ambient.matrix())
    }
}

/// Hyperbolic distance with `cosh²(d/2) = tance(p, q)`.
pub fn distance(p: &BallPoint, q: &BallPoint) -> Result<f64, BallError> {
    same_ambient(&p.ambient, &q.ambient)?;
    let ta = p.ambient.tance(&p.rep, &q.rep)?;
    Ok(2.0 * (ta - 1.0).max(0.0).sqrt().asinh())
}

/// `tanh²(d(p, L)/2)`, the function `μ̃` of the tube around `L`.
pub fn mu_tilde(p: &BallPoint, line: &ComplexLine) -> Result<f64, BallError> {
    same_ambient(&p.ambient, &line.ambient)?;
    let ta = p.ambient.tance(&p.rep, &line.polar)?;
    let s = (-ta).max(0.0);
    Ok(s / (1.0 + s))
}

/// Distance to a complex line: `cosh²(d/2) = 1 − tance(p, n)`.
pub fn dist_point_line(p: &BallPoint, line: &ComplexLine) -> Result<f64, BallError> {
    same_ambient(&p.ambient, &line.ambient)?;
    let ta = p.ambient.tance(&p.rep, &line.polar)?;
    Ok(2.0 * (-ta).max(0.0).sqrt().asinh())
}

pub fn line_relation(a: &ComplexLine, b: &ComplexLine) -> Result<LineRelation, BallError> {
    same_ambient(&a.ambient, &b.ambient)?;
    let j = &a.ambient;
    let ta = j.tance(&a.polar, &b.polar)?;
    if (ta - 1.0).abs() <= ASYMPTOTIC_TOL * ta.abs().max(1.0) {
        return Ok(LineRelation::AsymptoticOrEqual);
    }
    if ta > 1.0 {
        return Ok(LineRelation::Ultraparallel {
            cosh2_half_distance: ta,
            distance: 2.0 * (ta - 1.0).sqrt().asinh(),
        });
    }
    // rows n_i^H J; their bilinear cross product is J-orthogonal to both polars
    let ra = (a.polar.adjoint() * j.matrix()).transpose();
    let rb = (b.polar.adjoint() * j.matrix()).transpose();
    let x = numeric::cross(&ra, &rb);
    Ok(LineRelation::Intersecting {
        point: vector_pairs(&x),
    })
}

impl Region {
    pub fn ball(center: BallPoint, radius: f64) -> Result<Self, BallError> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(BallError::BadRadius(radius));
        }
        Ok(Region::Ball { center, radius })
    }

    pub fn tube(line: ComplexLine, radius: f64) -> Result<Self, BallError> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(BallError::BadRadius(radius));
        }
        Ok(Region::Tube { line, radius })
    }

    pub fn radius(&self) -> f64 {
        match self {
            Region::Ball { radius, .. } | Region::Tube { radius, .. } => *radius,
        }
    }

    /// Strict membership; tubes use `μ̃ < tanh²(r/2)`.
    pub fn contains(&self, p: &BallPoint) -> Result<bool, BallError> {
        match self {
            Region::Ball { center, radius } => {
                same_ambient(&center.ambient, &p.ambient)?;
                let ta = p.ambient.tance(&p.rep, &center.rep)?;
                let c = (radius / 2.0).cosh();
                Ok(ta < c * c)
            }
            Region::Tube { line, radius } => {
                let t = (radius / 2.0).tanh();
                Ok(mu_tilde(p, line)? < t * t)
            }
        }
    }
}
