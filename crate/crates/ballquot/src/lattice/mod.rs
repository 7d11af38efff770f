//! The arithmetic lattice `Γ = SU(J, O_F)`: membership, torsion eigenvalue
//! triples, reflections, torsion search and repulsion certificates.

mod certificate;
mod search;
mod triples;

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::cmfield::{
    herm_exact, CmField, CmFieldError, FieldElement, FieldMatrix, FieldVector, KElement, RealEmbedding,
};
use crate::hermitian::{FormError, HermitianForm};
use crate::isometry::{Isometry, IsometryError};

pub use certificate::{pair_certificate, RepulsionCertificate, SigmaGapWitness, TraceClass, Verdict};
pub use search::{torsion_datum, torsion_search, SearchReport, TorsionDatum, TorsionLocus, ENUMERATION_BUDGET};
pub use triples::{allowed_triples, search_order_bound, EigenTriple, ExceptionalField, TripleReport};

/// Upper bound on the order of a finite subgroup fixing a point.
pub const STABILIZER_ORDER_CAP: u32 = 48;
/// Upper bound on the stabilizer acting on the fiber of a tube.
pub const TUBE_FIBER_CAP: u32 = 24;

pub fn stabilizer_order_cap() -> u32 {
    STABILIZER_ORDER_CAP
}

pub fn tube_fiber_cap() -> u32 {
    TUBE_FIBER_CAP
}

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("lattice needs an exact Hermitian form")]
    NotExact,
    #[error("form is not admissible: signature (2,1) under σ1 and definite under σ2 required")]
    NotAdmissible,
    #[error("the restricted torsion statement needs D > 21 (got D = {0})")]
    UnsupportedRange(i64),
    #[error("reflection rejected: {0}")]
    ReflectionRejected(String),
    #[error("λ is not a root of unity in F")]
    NotRootOfUnity,
    #[error("vector is null")]
    NullVector,
    #[error("element is not a torsion member of the lattice")]
    NotTorsion,
    #[error("enumeration needs {needed} candidate combinations, above the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Isometry(#[from] IsometryError),
    #[error(transparent)]
    Field(#[from] CmFieldError),
    #[error(transparent)]
    Ball(#[from] crate::ball::BallError),
}

#[derive(Clone, Debug)]
pub struct ArithmeticLattice {
    field: Arc<CmField>,
    form: Arc<HermitianForm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum MembershipFailure {
    FieldMismatch,
    NonIntegral { row: usize, col: usize },
    NotUnitary,
    DeterminantNotOne,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    pub failure: Option<MembershipFailure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LoxodromicFloor {
    pub d: i64,
    pub value: f64,
    pub in_range: bool,
}

/// Exact data behind `|trace|² ≥ √D` for a loxodromic member.
#[derive(Clone, Debug)]
pub struct LoxodromicWitness {
    pub trace_norm: KElement,
    pub sigma1: f64,
    pub sigma2: f64,
    /// `n − n^{σ2}` for `n = |trace|²`.
    pub gap: KElement,
    pub gap_at_least_sqrt_d: bool,
}

#[derive(Clone, Debug)]
pub struct ReflectionOutcome {
    pub matrix: FieldMatrix,
    pub det: FieldElement,
    /// Multiplicative order of λ.
    pub order: u32,
    /// Present exactly when the matrix lies in `Γ` (integral, unitary, determinant 1).
    pub isometry: Option<Isometry>,
}

impl ReflectionOutcome {
    pub fn det_is_one(&self) -> bool {
        self.det.is_one()
    }
}

impl ArithmeticLattice {
    pub fn new(form: Arc<HermitianForm>) -> Result<Self, LatticeError> {
        let field = form.field().ok_or(LatticeError::NotExact)?.clone();
        if !form.is_admissible()? {
            return Err(LatticeError::NotAdmissible);
        }
        Ok(Self { field, form })
    }

    /// `J = diag(1, 1, −√D)` over `F = Q(√D, √α)`.
    pub fn diagonal(d: i64, alpha: i64) -> Result<Self, LatticeError> {
        let field = CmField::from_ints(d, alpha, 0)?;
        Self::new(Arc::new(HermitianForm::diagonal_sqrt_d(&field)))
    }

    pub fn field(&self) -> &Arc<CmField> {
        &self.field
    }

    pub fn form(&self) -> &Arc<HermitianForm> {
        &self.form
    }

    pub fn j(&self) -> &FieldMatrix {
        self.form.exact_matrix().expect("lattice forms are exact")
    }

    pub fn discriminant(&self) -> i64 {
        self.field.base().discriminant()
    }

    pub fn is_member(&self, m: &FieldMatrix) -> MembershipReport {
        let fail = |f| MembershipReport {
            member: false,
            failure: Some(f),
        };
        if m.field() != &self.field {
            return fail(MembershipFailure::FieldMismatch);
        }
        for r in 0..3 {
            for c in 0..3 {
                if !m.get(r, c).is_integral() {
                    return fail(MembershipFailure::NonIntegral { row: r, col: c });
                }
            }
        }
        let j = self.j();
        if m.adjoint().mul(j).mul(m) != *j {
            return fail(MembershipFailure::NotUnitary);
        }
        if !m.det().is_one() {
            return fail(MembershipFailure::DeterminantNotOne);
        }
        MembershipReport {
            member: true,
            failure: None,
        }
    }

    /// Wraps a member as an exact isometry.
    pub fn element(&self, m: FieldMatrix) -> Result<Isometry, LatticeError> {
        let rep = self.is_member(&m);
        if !rep.member {
            return Err(LatticeError::NotTorsion);
        }
        Ok(Isometry::exact(self.form.clone(), m)?)
    }

    /// `acosh((D^{1/4} − 1)/2)`, positive only for `D > 81`.
    pub fn loxodromic_floor(&self) -> LoxodromicFloor {
        loxodromic_floor(self.discriminant())
    }

    pub fn loxodromic_witness(&self, m: &Isometry) -> Result<LoxodromicWitness, LatticeError> {
        let mx = m.exact_matrix().ok_or(LatticeError::NotExact)?;
        let k = self.field.base();
        let n = mx.trace().abs_squared();
        let gap = k.sub(&n, &k.conjugate(&n));
        let diff = k.sub(&gap, &k.sqrt_d());
        Ok(LoxodromicWitness {
            sigma1: k.embed(&n, RealEmbedding::Plus),
            sigma2: k.embed(&n, RealEmbedding::Minus),
            gap_at_least_sqrt_d: k.sign(&diff, RealEmbedding::Plus) != std::cmp::Ordering::Less,
            trace_norm: n,
            gap,
        })
    }

    /// `R(x) = x − (1 − λ)·(⟨x,v⟩/⟨v,v⟩)·v`, accepted when every correction term is integral.
    pub fn reflection_about_vector(
        &self,
        v: &FieldVector,
        lambda: &FieldElement,
    ) -> Result<ReflectionOutcome, LatticeError> {
        let f = &self.field;
        let order = root_of_unity_order(lambda).ok_or(LatticeError::NotRootOfUnity)?;
        let j = self.j();
        let vv = herm_exact(j, v, v);
        if vv.is_zero() {
            return Err(LatticeError::NullVector);
        }
        let c = (&FieldElement::one(f) - lambda).checked_div(&vv)?;
        let mut cols = Vec::with_capacity(3);
        for k in 0..3 {
            let ek = FieldVector::unit(f, k);
            let coeff = &c * &herm_exact(j, &ek, v);
            let corr = v.scale(&coeff);
            if let Some(i) = (0..3).find(|&i| !corr.0[i].is_integral()) {
                return Err(LatticeError::ReflectionRejected(format!(
                    "correction for basis vector e{} has non-integral entry {} at row {}",
                    k + 1,
                    corr.0[i],
                    i + 1
                )));
            }
            cols.push(ek.sub(&corr));
        }
        let m = FieldMatrix::from_columns(&[cols[0].clone(), cols[1].clone(), cols[2].clone()]);
        Ok(self.outcome(m, order))
    }

    fn outcome(&self, m: FieldMatrix, order: u32) -> ReflectionOutcome {
        let det = m.det();
        let isometry = self
            .is_member(&m)
            .member
            .then(|| Isometry::exact(self.form.clone(), m.clone()).expect("member"));
        ReflectionOutcome {
            matrix: m,
            det,
            order,
            isometry,
        }
    }

    /// Exact product of two reflection outcomes, re-checked for membership.
    pub fn compose(&self, a: &ReflectionOutcome, b: &ReflectionOutcome) -> ReflectionOutcome {
        let m = a.matrix.mul(&b.matrix);
        let order = exact_order(&m, 42).unwrap_or(0);
        self.outcome(m, order)
    }
}

pub fn loxodromic_floor(d: i64) -> LoxodromicFloor {
    let x = ((d as f64).powf(0.25) - 1.0) / 2.0;
    let in_range = x >= 1.0;
    LoxodromicFloor {
        d,
        value: if in_range { x.acosh() } else { 0.0 },
        in_range,
    }
}

/// Smallest `k ≤ max` with `Mᵏ = I`, by exact powers.
pub fn exact_order(m: &FieldMatrix, max: u32) -> Option<u32> {
    let mut p = m.clone();
    for k in 1..=max {
        if p.is_identity() {
            return Some(k);
        }
        p = p.mul(m);
    }
    None
}

fn root_of_unity_order(l: &FieldElement) -> Option<u32> {
    if l.abs_squared() != KElement::from_int(1) {
        return None;
    }
    let one = FieldElement::one(l.field());
    let mut p = l.clone();
    for k in 1..=42 {
        if p == one {
            return Some(k);
        }
        p = &p * l;
    }
    None
}

/// `BigInt` helper for tests and reports.
pub(crate) fn big(n: i64) -> BigInt {
    BigInt::from(n)
}
