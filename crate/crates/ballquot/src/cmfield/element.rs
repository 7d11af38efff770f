use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::quadratic::{q, KElement, RealEmbedding, RealQuadraticField};
use super::CmFieldError;
use crate::numeric::C64;

/// The four complex embeddings of `F`, in the order `σ1, σ̄1, σ2, σ̄2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Embedding {
    Sigma1,
    Sigma1Bar,
    Sigma2,
    Sigma2Bar,
}

impl Embedding {
    pub const ALL: [Embedding; 4] = [
        Embedding::Sigma1,
        Embedding::Sigma1Bar,
        Embedding::Sigma2,
        Embedding::Sigma2Bar,
    ];

    /// 1-based index used in reports.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i.wrapping_sub(1)).copied()
    }

    pub fn real_part(self) -> RealEmbedding {
        match self {
            Embedding::Sigma1 | Embedding::Sigma1Bar => RealEmbedding::Plus,
            Embedding::Sigma2 | Embedding::Sigma2Bar => RealEmbedding::Minus,
        }
    }

    pub fn is_conjugated(self) -> bool {
        matches!(self, Embedding::Sigma1Bar | Embedding::Sigma2Bar)
    }

    /// The embedding composed with complex conjugation.
    pub fn conjugate(self) -> Self {
        match self {
            Embedding::Sigma1 => Embedding::Sigma1Bar,
            Embedding::Sigma1Bar => Embedding::Sigma1,
            Embedding::Sigma2 => Embedding::Sigma2Bar,
            Embedding::Sigma2Bar => Embedding::Sigma2,
        }
    }
}

/// `F = K(√α)` with `α ∈ O_K` totally negative, carrying the order `O_K[√α]`.
#[derive(Clone, Debug)]
pub struct CmField {
    base: RealQuadraticField,
    alpha: KElement,
    sqrt_alpha: [C64; 4],
    rel_disc_norm: BigInt,
}

impl PartialEq for CmField {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.alpha == other.alpha
    }
}

impl Eq for CmField {}

impl CmField {
    pub fn new(base: RealQuadraticField, alpha: KElement) -> Result<Arc<Self>, CmFieldError> {
        if !alpha.is_integral() {
            return Err(CmFieldError::AlphaNotIntegral(alpha.to_string()));
        }
        if !base.is_totally_negative(&alpha) {
            return Err(CmFieldError::AlphaNotTotallyNegative(alpha.to_string()));
        }
        let s1 = (-base.embed(&alpha, RealEmbedding::Plus)).sqrt();
        let s2 = (-base.embed(&alpha, RealEmbedding::Minus)).sqrt();
        let sqrt_alpha = [
            C64::new(0.0, s1),
            C64::new(0.0, -s1),
            C64::new(0.0, s2),
            C64::new(0.0, -s2),
        ];
        // disc(x² − α) = 4α, relative norm 16·N(α)
        let n = base.norm(&alpha) * q(16);
        let rel_disc_norm = n.to_integer();
        Ok(Arc::new(Self {
            base,
            alpha,
            sqrt_alpha,
            rel_disc_norm,
        }))
    }

    /// Convenience constructor from `D` and `α = a + b·ω` with integer coordinates.
    pub fn from_ints(d: i64, alpha_a: i64, alpha_b: i64) -> Result<Arc<Self>, CmFieldError> {
        Self::new(RealQuadraticField::new(d)?, KElement::from_ints(alpha_a, alpha_b))
    }

    pub fn base(&self) -> &RealQuadraticField {
        &self.base
    }

    pub fn alpha(&self) -> &KElement {
        &self.alpha
    }

    /// Images of `√α` under `σ1, σ̄1, σ2, σ̄2`.
    pub fn embedding_table(&self) -> [C64; 4] {
        self.sqrt_alpha
    }

    /// Norm of the relative discriminant of `O_K[√α]` over `O_K`.
    pub fn rel_disc_norm(&self) -> &BigInt {
        &self.rel_disc_norm
    }
}

/// `x + y·√α` with `x, y ∈ K`.
#[derive(Clone)]
pub struct FieldElement {
    pub x: KElement,
    pub y: KElement,
    field: Arc<CmField>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.x.hash(state);
        self.y.hash(state);
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            write!(f, "{}", self.x)
        } else {
            write!(f, "({}) + ({})·√α", self.x, self.y)
        }
    }
}

impl FieldElement {
    pub fn new(field: &Arc<CmField>, x: KElement, y: KElement) -> Self {
        Self {
            x,
            y,
            field: Arc::clone(field),
        }
    }

    /// From the coordinate quadruple `(a, b, c, d)` meaning `(a + bω) + (c + dω)√α`.
    pub fn from_quad(field: &Arc<CmField>, c: [BigRational; 4]) -> Self {
        let [a, b, cc, d] = c;
        Self::new(field, KElement::new(a, b), KElement::new(cc, d))
    }

    pub fn from_int_quad(field: &Arc<CmField>, c: [i64; 4]) -> Self {
        Self::new(field, KElement::from_ints(c[0], c[1]), KElement::from_ints(c[2], c[3]))
    }

    pub fn from_int(field: &Arc<CmField>, n: i64) -> Self {
        Self::from_k(field, KElement::from_int(n))
    }

    pub fn from_k(field: &Arc<CmField>, x: KElement) -> Self {
        Self::new(field, x, KElement::from_int(0))
    }

    pub fn zero(field: &Arc<CmField>) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Arc<CmField>) -> Self {
        Self::from_int(field, 1)
    }

    /// The order generator `ρ = √α`.
    pub fn rho(field: &Arc<CmField>) -> Self {
        Self::new(field, KElement::from_int(0), KElement::from_int(1))
    }

    pub fn omega(field: &Arc<CmField>) -> Self {
        Self::from_k(field, field.base.omega())
    }

    pub fn sqrt_d(field: &Arc<CmField>) -> Self {
        Self::from_k(field, field.base.sqrt_d())
    }

    pub fn field(&self) -> &Arc<CmField> {
        &self.field
    }

    pub fn quad(&self) -> [BigRational; 4] {
        [self.x.a.clone(), self.x.b.clone(), self.y.a.clone(), self.y.b.clone()]
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.y.is_zero() && self.x == KElement::from_int(1)
    }

    /// Fixed by the CM involution.
    pub fn is_real(&self) -> bool {
        self.y.is_zero()
    }

    /// Membership in `O_K ⊕ O_K·√α`.
    pub fn is_integral(&self) -> bool {
        self.x.is_integral() && self.y.is_integral()
    }

    /// Largest absolute coordinate numerator or denominator.
    pub fn height(&self) -> BigInt {
        self.x.height().max(self.y.height())
    }

    pub fn cm_conjugate(&self) -> Self {
        Self::new(&self.field, self.x.clone(), self.field.base.neg(&self.y))
    }

    /// `z·z̄ = x² − α y² ∈ K`.
    pub fn abs_squared(&self) -> KElement {
        let k = &self.field.base;
        let x2 = k.mul(&self.x, &self.x);
        let y2 = k.mul(&self.y, &self.y);
        k.sub(&x2, &k.mul(&self.field.alpha, &y2))
    }

    /// `(z + z̄)/2 = x`.
    pub fn real_part(&self) -> KElement {
        self.x.clone()
    }

    pub fn inv(&self) -> Result<Self, CmFieldError> {
        let n = self.abs_squared();
        let k = &self.field.base;
        let ni = k.inv(&n)?;
        let c = self.cm_conjugate();
        Ok(Self::new(&self.field, k.mul(&c.x, &ni), k.mul(&c.y, &ni)))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, CmFieldError> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let k = &self.field.base;
        Self::new(&self.field, k.scale(&self.x, s), k.scale(&self.y, s))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn embed(&self, sigma: Embedding) -> C64 {
        let k = &self.field.base;
        let r = sigma.real_part();
        let x = k.embed(&self.x, r);
        let y = k.embed(&self.y, r);
        C64::new(x, 0.0) + self.field.sqrt_alpha[sigma as usize] * y
    }

    /// Exact sign of a real element under the real embedding `r`.
    pub fn real_sign(&self, r: RealEmbedding) -> Option<Ordering> {
        if !self.is_real() {
            return None;
        }
        Some(self.field.base.sign(&self.x, r))
    }

    /// Exact `Tr_{F/Q}`: twice the trace of `x` in `K`.
    pub fn trace_q(&self) -> BigRational {
        self.field.base.trace(&self.x) * q(2)
    }

    /// Exact `N_{F/Q}`.
    pub fn norm_q(&self) -> BigRational {
        self.field.base.norm(&self.abs_squared())
    }
}

fn same_field(a: &FieldElement, b: &FieldElement) {
    debug_assert!(
        Arc::ptr_eq(&a.field, &b.field) || a.field == b.field,
        "operands live in different fields"
    );
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        same_field(self, rhs);
        let k = &self.field.base;
        FieldElement::new(&self.field, k.add(&self.x, &rhs.x), k.add(&self.y, &rhs.y))
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        same_field(self, rhs);
        let k = &self.field.base;
        FieldElement::new(&self.field, k.sub(&self.x, &rhs.x), k.sub(&self.y, &rhs.y))
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        same_field(self, rhs);
        let k = &self.field.base;
        let xx = k.mul(&self.x, &rhs.x);
        let yy = k.mul(&self.y, &rhs.y);
        let x = k.add(&xx, &k.mul(&self.field.alpha, &yy));
        let y = k.add(&k.mul(&self.x, &rhs.y), &k.mul(&self.y, &rhs.x));
        FieldElement::new(&self.field, x, y)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let k = &self.field.base;
        FieldElement::new(&self.field, k.neg(&self.x), k.neg(&self.y))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}
