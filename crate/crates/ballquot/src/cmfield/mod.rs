//! Exact arithmetic in a real quadratic field `K = Q(√D)` and its CM
//! extension `F = K(√α)`, with the embeddings `σ1, σ̄1, σ2, σ̄2`.
//!
//! Conventions: `σ1(√D) = +√D`, `σ2(√D) = −√D`, and `Im σ1(√α) > 0`,
//! `Im σ2(√α) > 0`. Integrality is membership in the order `O_K ⊕ O_K·√α`.

mod element;
mod matrix;
mod quadratic;
mod search;

use thiserror::Error;

pub use element::{CmField, Embedding, FieldElement};
pub use matrix::{herm_exact, FieldMatrix, FieldVector};
pub use quadratic::{is_fundamental_discriminant, KElement, RealEmbedding, RealQuadraticField};
pub use search::{check_no_small_nonreal_integers, SmallIntegerReport};

#[cfg(test)]
use quadratic::to_f64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CmFieldError {
    #[error("{0} is not the discriminant of a real quadratic field")]
    NotFundamentalDiscriminant(i64),
    #[error("alpha = {0} is not in O_K")]
    AlphaNotIntegral(String),
    #[error("alpha = {0} is not totally negative")]
    AlphaNotTotallyNegative(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    SingularMatrix,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn field(d: i64, a: i64) -> Arc<CmField> {
        CmField::from_ints(d, a, 0).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn rho_squared_is_alpha() {
        let f = field(5, -11);
        let r = FieldElement::rho(&f);
        assert_eq!(&r * &r, FieldElement::from_int(&f, -11));
    }

    #[test]
    fn conjugation_negates_rho_part() {
        let f = field(5, -11);
        let z = FieldElement::from_int_quad(&f, [2, 3, -1, 4]);
        assert_eq!(z.cm_conjugate(), FieldElement::from_int_quad(&f, [2, 3, 1, -4]));
        assert_eq!(z.cm_conjugate().cm_conjugate(), z);
    }

    #[test]
    fn one_plus_rho_times_one_minus_rho() {
        let f = field(5, -11);
        let a = FieldElement::from_int_quad(&f, [1, 0, 1, 0]);
        let b = FieldElement::from_int_quad(&f, [1, 0, -1, 0]);
        assert_eq!(&a * &b, FieldElement::from_int(&f, 12));
    }

    #[test]
    fn division_and_zero_divisor() {
        let f = field(29, -11);
        let a = FieldElement::from_int_quad(&f, [3, -1, 2, 1]);
        let b = FieldElement::from_int_quad(&f, [0, 2, 1, -1]);
        let qt = a.checked_div(&b).unwrap();
        assert_eq!(&qt * &b, a);
        assert_eq!(
            a.checked_div(&FieldElement::zero(&f)),
            Err(CmFieldError::DivisionByZero)
        );
    }

    #[test]
    fn embedding_conventions() {
        let f = field(5, -11);
        let one = FieldElement::one(&f);
        for s in Embedding::ALL {
            assert!((one.embed(s) - 1.0).norm() < 1e-15);
        }
        let sd = FieldElement::sqrt_d(&f);
        assert!((sd.embed(Embedding::Sigma1).re - 5f64.sqrt()).abs() < 1e-14);
        assert!((sd.embed(Embedding::Sigma2).re + 5f64.sqrt()).abs() < 1e-14);
        let r = FieldElement::rho(&f);
        assert!(r.embed(Embedding::Sigma1).im > 0.0);
        assert!(r.embed(Embedding::Sigma2).im > 0.0);
        assert_eq!(r.embed(Embedding::Sigma1Bar), r.embed(Embedding::Sigma1).conj());
    }

    #[test]
    fn traces() {
        let f = field(5, -11);
        assert_eq!(FieldElement::one(&f).trace_q(), q(4));
        assert_eq!(FieldElement::sqrt_d(&f).trace_q(), q(0));
        assert_eq!(FieldElement::rho(&f).trace_q(), q(0));
        assert_eq!(FieldElement::omega(&f).trace_q(), q(2));
    }

    #[test]
    fn integrality() {
        let f = field(5, -11);
        assert!(FieldElement::one(&f).is_integral());
        let half = FieldElement::from_k(
            &f,
            KElement::new(BigRational::new(1.into(), 2.into()), BigRational::zero()),
        );
        assert!(!half.is_integral());
        assert!(FieldElement::omega(&f).is_integral());
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(matches!(
            CmField::from_ints(20, -1, 0),
            Err(CmFieldError::NotFundamentalDiscriminant(20))
        ));
        assert!(matches!(
            CmField::from_ints(5, 1, 0),
            Err(CmFieldError::AlphaNotTotallyNegative(_))
        ));
        // 3 − 2ω has embeddings ≈ −0.236 and ≈ 4.236: not totally negative
        assert!(matches!(
            CmField::from_ints(5, 3, -2),
            Err(CmFieldError::AlphaNotTotallyNegative(_))
        ));
        let half = KElement::new(BigRational::new((-1).into(), 2.into()), BigRational::zero());
        assert!(matches!(
            CmField::new(RealQuadraticField::new(5).unwrap(), half),
            Err(CmFieldError::AlphaNotIntegral(_))
        ));
    }

    #[test]
    fn relative_discriminant_norm() {
        let f = field(5, -11);
        assert_eq!(*f.rel_disc_norm(), 1936.into());
        let g = CmField::from_ints(8, -1, 0).unwrap();
        assert_eq!(*g.rel_disc_norm(), 16.into());
    }

    #[test]
    fn gaussian_unit_is_found() {
        let f = field(5, -1);
        let rep = check_no_small_nonreal_integers(&f, 3.0, 1, crate::par::Execution::Sequential);
        assert!(rep.witnesses.contains(&[0, 0, 1, 0]));
        assert_eq!(rep.conclusion, "found");
    }

    #[test]
    fn nothing_below_one() {
        // a nonzero algebraic integer has some embedding of modulus ≥ 1
        let f = field(5, -1);
        let rep = check_no_small_nonreal_integers(&f, 0.5, 3, crate::par::Execution::Parallel);
        assert!(rep.witnesses.is_empty());
        assert_eq!(rep.conclusion, "none found up to cap");
    }

    #[test]
    fn large_relative_discriminant_has_no_small_integers() {
        let f = field(5, -163);
        let rep = check_no_small_nonreal_integers(&f, 3.0, 10, crate::par::Execution::Parallel);
        assert!(rep.witnesses.is_empty(), "{:?}", rep.witnesses);
    }

    fn elem() -> impl Strategy<Value = [i64; 4]> {
        prop::array::uniform4(-1000i64..=1000)
    }

    proptest! {
        #[test]
        fn embeddings_are_ring_homomorphisms(a in elem(), b in elem(), d in prop::sample::select(vec![5i64, 8, 13, 29]), al in -20i64..=-1) {
            let f = field(d, al);
            let x = FieldElement::from_int_quad(&f, a);
            let y = FieldElement::from_int_quad(&f, b);
            for s in Embedding::ALL {
                let (ex, ey) = (x.embed(s), y.embed(s));
                let sum = (&x + &y).embed(s);
                let prod = (&x * &y).embed(s);
                prop_assert!((sum - (ex + ey)).norm() <= 1e-12 * (1.0 + ex.norm() + ey.norm()));
                prop_assert!((prod - ex * ey).norm() <= 1e-12 * (1.0 + ex.norm() * ey.norm()));
            }
        }

        #[test]
        fn trace_matches_sum_of_embeddings(a in elem(), d in prop::sample::select(vec![5i64, 12, 29]), al in -20i64..=-1) {
            let f = field(d, al);
            let x = FieldElement::from_int_quad(&f, a);
            let s: f64 = Embedding::ALL.iter().map(|&e| x.embed(e).re).sum();
            prop_assert!((to_f64(&x.trace_q()) - s).abs() <= 1e-10 * (1.0 + s.abs()));
        }

        #[test]
        fn integral_elements_form_a_ring(a in elem(), b in elem()) {
            let f = field(29, -11);
            let x = FieldElement::from_int_quad(&f, a);
            let y = FieldElement::from_int_quad(&f, b);
            prop_assert!((&x * &y).is_integral());
            prop_assert!((&x + &y).is_integral());
        }

        #[test]
        fn conjugation_is_complex_conjugation_under_sigma1(a in elem()) {
            let f = field(13, -7);
            let x = FieldElement::from_int_quad(&f, a);
            prop_assert_eq!(x.cm_conjugate().cm_conjugate(), x.clone());
            let l = x.cm_conjugate().embed(Embedding::Sigma1);
            let r = x.embed(Embedding::Sigma1).conj();
            prop_assert!((l - r).norm() <= 1e-12 * (1.0 + r.norm()));
        }

        #[test]
        fn inverse_is_exact(a in elem()) {
            let f = field(5, -11);
            let x = FieldElement::from_int_quad(&f, a);
            prop_assume!(!x.is_zero());
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }
}
