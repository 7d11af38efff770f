use std::cmp::Ordering;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::search::TorsionDatum;
use super::triples::EigenTriple;
use super::{ArithmeticLattice, LatticeError};
use crate::ball::{self, BallPoint, ComplexLine, LineRelation};
use crate::cmfield::{Embedding, FieldElement, KElement, RealEmbedding};
use crate::isometry::{classify, expansion_error, trace_sum, IsometryLabel};

/// Which branch of the trace trichotomy `|trace(M₁M₂)|²` falls into.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum TraceClass {
    RationalAtMostNine { value: i64 },
    IrrationalSigma2Bounded,
    OutsideRange,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// One of the elements is the identity.
    Trivial,
    Coincide,
    IntersectAtIsolatedPoint {
        point: [[f64; 2]; 3],
        product_label: Option<IsometryLabel>,
    },
    /// A fixed point lying on a fixed line.
    Incident,
    Asymptotic,
    Separated {
        distance: f64,
    },
}

/// `8·tance = 2·trace(M₁M₂) + 2` for involution pairs, with its realized σ-gap.
#[derive(Clone, Debug)]
pub struct SigmaGapWitness {
    pub eight_tance: KElement,
    pub sigma1: f64,
    pub sigma2: f64,
    /// `x − x^{σ2}`, an integral multiple of `√D`.
    pub gap: KElement,
    pub gap_at_least_sqrt_d: bool,
    pub rational: bool,
}

#[derive(Clone, Debug)]
pub struct RepulsionCertificate {
    pub labels: [IsometryLabel; 2],
    pub trace_product: FieldElement,
    pub trace_inverse_product: FieldElement,
    pub trace_norm: KElement,
    pub trace_class: TraceClass,
    pub product_label: Option<IsometryLabel>,
    /// `(trace(M₁M₂) + 1)/4` when both elements are involutions.
    pub involution_tance: Option<KElement>,
    /// Whether the exact tance of the eigenvalue-1 eigenvectors equals `involution_tance`.
    pub exact_tance_consistent: Option<bool>,
    pub witness: Option<SigmaGapWitness>,
    pub verdict: Verdict,
    pub trace_sum_error: f64,
    pub expansion_error: f64,
}

fn trace_class(lat: &ArithmeticLattice, n: &KElement) -> TraceClass {
    let k = lat.field().base();
    if n.is_rational() {
        if let Some(v) = n.a.to_integer().to_i64().filter(|_| n.a.is_integer()) {
            if (0..=9).contains(&v) {
                return TraceClass::RationalAtMostNine { value: v };
            }
        }
        return TraceClass::OutsideRange;
    }
    let nine = k.sub(n, &KElement::from_int(9));
    if n.is_integral()
        && k.sign(n, RealEmbedding::Minus) != Ordering::Less
        && k.sign(&nine, RealEmbedding::Minus) != Ordering::Greater
    {
        TraceClass::IrrationalSigma2Bounded
    } else {
        TraceClass::OutsideRange
    }
}

fn geometry(
    lat: &ArithmeticLattice,
    a: &TorsionDatum,
    b: &TorsionDatum,
    product: Option<IsometryLabel>,
) -> Result<Verdict, LatticeError> {
    let j = lat.form().clone();
    let (Some(u), Some(v)) = (&a.locus_vector, &b.locus_vector) else {
        return Ok(Verdict::Trivial);
    };
    let is_line = |t: &TorsionDatum| t.label == IsometryLabel::ReflectionAboutLine;
    let tol = 1e-9;
    Ok(match (is_line(a), is_line(b)) {
        (false, false) => {
            let d = ball::distance(&BallPoint::new(j.clone(), *u)?, &BallPoint::new(j, *v)?)?;
            if d < tol {
                Verdict::Coincide
            } else {
                Verdict::Separated { distance: d }
            }
        }
        (true, true) => {
            let (la, lb) = (ComplexLine::new(j.clone(), *u)?, ComplexLine::new(j, *v)?);
            match ball::line_relation(&la, &lb)? {
                LineRelation::AsymptoticOrEqual => {
                    if (u - v).norm() < tol {
                        Verdict::Coincide
                    } else {
                        Verdict::Asymptotic
                    }
                }
                LineRelation::Ultraparallel { distance, .. } => Verdict::Separated { distance },
                LineRelation::Intersecting { point } => Verdict::IntersectAtIsolatedPoint {
                    point,
                    product_label: product,
                },
            }
        }
        (pa, _) => {
            let (p, l) = if pa { (v, u) } else { (u, v) };
            let d = ball::dist_point_line(&BallPoint::new(j.clone(), *p)?, &ComplexLine::new(j, *l)?)?;
            if d < tol {
                Verdict::Incident
            } else {
                Verdict::Separated { distance: d }
            }
        }
    })
}

/// Exact trace data and the geometric verdict for a pair of torsion members.
pub fn pair_certificate(
    lat: &ArithmeticLattice,
    a: &TorsionDatum,
    b: &TorsionDatum,
) -> Result<RepulsionCertificate, LatticeError> {
    let k = lat.field().base();
    let (m1, m2) = (a.matrix(), b.matrix());
    let prod = m1.mul(m2);
    let t12 = prod.trace();
    let inv = a.element.inverse();
    let t1i2 = inv.exact_matrix().expect("exact").mul(m2).trace();
    let n = t12.abs_squared();
    let product_label = lat.element(prod).ok().and_then(|p| classify(&p).ok()).map(|c| c.label);

    let both_involutions = a.triple == Some(EigenTriple::Involution) && b.triple == Some(EigenTriple::Involution);
    let (involution_tance, exact_tance_consistent, witness) = if both_involutions && t12.is_real() {
        let eight = k.add(
            &k.scale(&t12.x, &num_rational::BigRational::from_integer(2.into())),
            &KElement::from_int(2),
        );
        let ta = k.scale(&eight, &num_rational::BigRational::new(1.into(), 8.into()));
        let consistent = match (&a.one_eigenvector, &b.one_eigenvector) {
            (Some(u), Some(v)) => Some(lat.form().tance_exact(u, v)? == ta),
            _ => None,
        };
        let gap = k.sub(&eight, &k.conjugate(&eight));
        let diff = k.sub(&k.mul(&gap, &KElement::from_int(1)), &k.sqrt_d());
        let w = SigmaGapWitness {
            sigma1: k.embed(&eight, RealEmbedding::Plus),
            sigma2: k.embed(&eight, RealEmbedding::Minus),
            gap_at_least_sqrt_d: k.sign(&diff, RealEmbedding::Plus) != Ordering::Less,
            rational: eight.is_rational(),
            gap,
            eight_tance: eight,
        };
        (Some(ta), consistent, Some(w))
    } else {
        (None, None, None)
    };

    let verdict = if a.label == IsometryLabel::Identity || b.label == IsometryLabel::Identity {
        Verdict::Trivial
    } else if m1 == m2 || inv.exact_matrix() == Some(m2) {
        Verdict::Coincide
    } else {
        geometry(lat, a, b, product_label)?
    };

    let j = lat.form();
    let ts = trace_sum(j, &a.frame, &b.frame);
    Ok(RepulsionCertificate {
        labels: [a.label, b.label],
        trace_class: trace_class(lat, &n),
        trace_sum_error: (ts - t12.embed(Embedding::Sigma1)).norm(),
        expansion_error: expansion_error(j, &a.frame, &b.frame).max(expansion_error(j, &b.frame, &a.frame)),
        trace_product: t12,
        trace_inverse_product: t1i2,
        trace_norm: n,
        product_label,
        involution_tance,
        exact_tance_consistent,
        witness,
        verdict,
    })
}
