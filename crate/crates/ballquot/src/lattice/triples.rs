use num_rational::BigRational;
use serde::Serialize;

use super::{big, LatticeError};
use crate::cmfield::{CmField, FieldElement};
use crate::numeric::C64;

/// Eigenvalue triples of torsion elements, up to a global scalar that is not in `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum EigenTriple {
    /// `(1, −1, −1)`
    Involution,
    /// `(1, ω, ω²)`
    Order3,
    /// `(1, i, −i)`
    Order4,
    /// `(1, −ω, −ω²)`
    Order6,
}

impl EigenTriple {
    pub const ALL: [EigenTriple; 4] = [Self::Involution, Self::Order3, Self::Order4, Self::Order6];

    pub fn order(self) -> u32 {
        match self {
            Self::Involution => 2,
            Self::Order3 => 3,
            Self::Order4 => 4,
            Self::Order6 => 6,
        }
    }

    /// Sum of the eigenvalues.
    pub fn trace(self) -> i64 {
        match self {
            Self::Involution => -1,
            Self::Order3 => 0,
            Self::Order4 => 1,
            Self::Order6 => 2,
        }
    }

    pub fn eigenvalues(self) -> [C64; 3] {
        let n = self.order() as f64;
        let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / n);
        [C64::new(1.0, 0.0), z, z.conj()]
    }

    /// Matches an exact trace against the list.
    pub fn from_trace(t: &FieldElement) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|e| *t == FieldElement::from_int(t.field(), e.trace()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionalField {
    /// `α ≡ −c` modulo squares of `K`.
    pub c: i64,
    pub extra_orders: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleReport {
    pub d: i64,
    pub triples: Vec<EigenTriple>,
    pub max_order: u32,
    pub exceptional: Option<ExceptionalField>,
}

/// Detects `F = K(√−c)` for `c ∈ {1, 2, 3, 7}`.
pub fn exceptional_field(field: &CmField) -> Option<ExceptionalField> {
    let k = field.base();
    [(1, vec![8, 12]), (2, vec![8]), (3, vec![9, 12, 18]), (7, vec![7, 14])]
        .into_iter()
        .find(|(c, _)| {
            let q = k.scale(&k.neg(field.alpha()), &BigRational::new(big(1), big(*c)));
            k.is_square(&q)
        })
        .map(|(c, extra_orders)| ExceptionalField { c, extra_orders })
}

/// Possible torsion eigenvalue triples for `D > 21`.
pub fn allowed_triples(field: &CmField) -> Result<TripleReport, LatticeError> {
    let d = field.base().discriminant();
    if d <= 21 {
        return Err(LatticeError::UnsupportedRange(d));
    }
    let exceptional = exceptional_field(field);
    let max_order = if exceptional.is_some() { 18 } else { 6 };
    Ok(TripleReport {
        d,
        triples: EigenTriple::ALL.to_vec(),
        max_order,
        exceptional,
    })
}

/// Order bound used by exact torsion enumeration: 6 in the restricted range, 18 for
/// exceptional fields, and 42 (every `n` with `φ(n) ≤ 12`) when `D ≤ 21`.
pub fn search_order_bound(field: &CmField) -> u32 {
    if field.base().discriminant() <= 21 {
        42
    } else if exceptional_field(field).is_some() {
        18
    } else {
        6
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restricted_and_exceptional_fields() {
        let f = CmField::from_ints(29, -11, 0).unwrap();
        let r = allowed_triples(&f).unwrap();
        assert_eq!(r.triples.len(), 4);
        assert_eq!(r.max_order, 6);
        assert!(r.exceptional.is_none());
        let f = CmField::from_ints(29, -1, 0).unwrap();
        let r = allowed_triples(&f).unwrap();
        assert_eq!(r.max_order, 18);
        assert_eq!(r.exceptional.unwrap().extra_orders, vec![8, 12]);
        let f = CmField::from_ints(29, -3, 0).unwrap();
        assert_eq!(
            allowed_triples(&f).unwrap().exceptional.unwrap().extra_orders,
            vec![9, 12, 18]
        );
        // −12 = −3·2²
        let f = CmField::from_ints(29, -12, 0).unwrap();
        assert_eq!(allowed_triples(&f).unwrap().exceptional.unwrap().c, 3);
        let f = CmField::from_ints(5, -11, 0).unwrap();
        assert!(matches!(allowed_triples(&f), Err(LatticeError::UnsupportedRange(5))));
        assert_eq!(search_order_bound(&f), 42);
    }

    #[test]
    fn triple_traces_and_discriminant() {
        let f = CmField::from_ints(29, -11, 0).unwrap();
        for e in EigenTriple::ALL {
            let ev = e.eigenvalues();
            let t: C64 = ev.iter().sum();
            assert!((t - C64::new(e.trace() as f64, 0.0)).norm() < 1e-12);
            assert!((ev[0] * ev[1] * ev[2] - 1.0).norm() < 1e-12);
            assert!(ev.iter().all(|l| (l.powu(e.order()) - 1.0).norm() < 1e-12));
            assert_eq!(EigenTriple::from_trace(&FieldElement::from_int(&f, e.trace())), Some(e));
            // distinct eigenvalues for every nontrivial triple except the involution
            let fv = crate::isometry::goldman_f_exact(&FieldElement::from_int(&f, e.trace()));
            assert_eq!(fv.is_zero(), e == EigenTriple::Involution);
        }
    }
}
