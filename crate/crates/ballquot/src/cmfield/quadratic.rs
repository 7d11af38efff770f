use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::CmFieldError;

/// A real embedding of the quadratic field: `Plus` sends `√D ↦ +√D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RealEmbedding {
    Plus,
    Minus,
}

/// `Q(√D)` with integral basis `{1, ω}`, `ω = (1+√D)/2` for `D ≡ 1 (mod 4)`
/// and `ω = √(D/4)` for `D ≡ 0 (mod 4)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealQuadraticField {
    d: i64,
    /// `ω² = t·ω − n`.
    t: i64,
    n: i64,
}

/// `a + b·ω` with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KElement {
    pub a: BigRational,
    pub b: BigRational,
}

pub(crate) fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn is_squarefree(mut m: i64) -> bool {
    let mut p = 2i64;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        if m % p == 0 {
            m /= p;
        }
        p += 1;
    }
    true
}

/// True when `d` is the discriminant of a real quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d <= 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

fn sign_of(x: &BigRational) -> Ordering {
    x.cmp(&BigRational::zero())
}

impl RealQuadraticField {
    pub fn new(d: i64) -> Result<Self, CmFieldError> {
        if !is_fundamental_discriminant(d) {
            return Err(CmFieldError::NotFundamentalDiscriminant(d));
        }
        let (t, n) = if d % 4 == 1 { (1, (1 - d) / 4) } else { (0, -d / 4) };
        Ok(Self { d, t, n })
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    /// `(t, n)` with `ω² = t·ω − n`.
    pub fn omega_relation(&self) -> (i64, i64) {
        (self.t, self.n)
    }

    pub fn zero(&self) -> KElement {
        KElement::from_int(0)
    }

    pub fn one(&self) -> KElement {
        KElement::from_int(1)
    }

    pub fn omega(&self) -> KElement {
        KElement::new(q(0), q(1))
    }

    /// `√D` as `2ω − 1` or `2ω`.
    pub fn sqrt_d(&self) -> KElement {
        KElement::new(q(-self.t), q(2))
    }

    pub fn add(&self, x: &KElement, y: &KElement) -> KElement {
        KElement::new(&x.a + &y.a, &x.b + &y.b)
    }

    pub fn sub(&self, x: &KElement, y: &KElement) -> KElement {
        KElement::new(&x.a - &y.a, &x.b - &y.b)
    }

    pub fn neg(&self, x: &KElement) -> KElement {
        KElement::new(-&x.a, -&x.b)
    }

    pub fn mul(&self, x: &KElement, y: &KElement) -> KElement {
        let bd = &x.b * &y.b;
        KElement::new(
            &x.a * &y.a - &bd * q(self.n),
            &x.a * &y.b + &x.b * &y.a + bd * q(self.t),
        )
    }

    pub fn scale(&self, x: &KElement, s: &BigRational) -> KElement {
        KElement::new(&x.a * s, &x.b * s)
    }

    /// Galois conjugate `√D ↦ −√D`.
    pub fn conjugate(&self, x: &KElement) -> KElement {
        // ω' = t − ω
        KElement::new(&x.a + &x.b * q(self.t), -&x.b)
    }

    pub fn norm(&self, x: &KElement) -> BigRational {
        &x.a * &x.a + &x.a * &x.b * q(self.t) + &x.b * &x.b * q(self.n)
    }

    pub fn trace(&self, x: &KElement) -> BigRational {
        &x.a * q(2) + &x.b * q(self.t)
    }

    pub fn inv(&self, x: &KElement) -> Result<KElement, CmFieldError> {
        let n = self.norm(x);
        if n.is_zero() {
            return Err(CmFieldError::DivisionByZero);
        }
        let c = self.conjugate(x);
        Ok(KElement::new(c.a / &n, c.b / n))
    }

    pub fn div(&self, x: &KElement, y: &KElement) -> Result<KElement, CmFieldError> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// Split `x = p + s·√D`.
    fn split(&self, x: &KElement) -> (BigRational, BigRational) {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        (&x.a + &x.b * q(self.t) * &half, &x.b * half)
    }

    /// Exact sign of the real number `σ(x)`.
    pub fn sign(&self, x: &KElement, sigma: RealEmbedding) -> Ordering {
        let (p, mut s) = self.split(x);
        if sigma == RealEmbedding::Minus {
            s = -s;
        }
        let sp = sign_of(&p);
        let ss = sign_of(&s);
        if ss == Ordering::Equal {
            return sp;
        }
        if sp == Ordering::Equal || sp == ss {
            return ss;
        }
        // opposite signs: compare p² with s²·D (never equal, D is not a square)
        let p2 = &p * &p;
        let s2d = &s * &s * q(self.d);
        if p2 > s2d {
            sp
        } else {
            ss
        }
    }

    /// Exact comparison `σ(x)` vs `σ(y)`.
    pub fn cmp(&self, x: &KElement, y: &KElement, sigma: RealEmbedding) -> Ordering {
        self.sign(&self.sub(x, y), sigma)
    }

    pub fn is_totally_negative(&self, x: &KElement) -> bool {
        self.sign(x, RealEmbedding::Plus) == Ordering::Less && self.sign(x, RealEmbedding::Minus) == Ordering::Less
    }

    pub fn embed(&self, x: &KElement, sigma: RealEmbedding) -> f64 {
        let (p, s) = self.split(x);
        let r = (self.d as f64).sqrt();
        let r = if sigma == RealEmbedding::Plus { r } else { -r };
        to_f64(&p) + to_f64(&s) * r
    }

    /// True when `x` is a square in `K` (decided exactly).
    pub fn is_square(&self, x: &KElement) -> bool {
        if x.is_zero() {
            return true;
        }
        if x.b.is_zero() {
            if let Some(_r) = rational_sqrt(&x.a) {
                return true;
            }
        }
        // (u + v√D)² = u² + D v² + 2uv√D; need N(x) a rational square first
        let nx = self.norm(x);
        let Some(rn) = rational_sqrt(&nx) else {
            return false;
        };
        // x = (p + s√D); u² + D v² = p, 2uv = s, u² − D v² = ±rn
        let (p, s) = self.split(x);
        for sign in [1i64, -1] {
            let u2 = (&p + &rn * q(sign)) / q(2);
            if u2.is_negative() {
                continue;
            }
            let Some(u) = rational_sqrt(&u2) else { continue };
            if u.is_zero() {
                let v2 = &p / q(self.d);
                if s.is_zero() && rational_sqrt(&v2).is_some() && !v2.is_negative() {
                    return true;
                }
                continue;
            }
            let v = &s / (&u * q(2));
            if &u * &u + &v * &v * q(self.d) == p {
                return true;
            }
        }
        false
    }
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &n * &n == *x.numer() && &d * &d == *x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl KElement {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn from_int(a: i64) -> Self {
        Self::new(q(a), q(0))
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self::new(q(a), q(b))
    }

    pub fn from_rational(a: BigRational) -> Self {
        Self::new(a, q(0))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Membership in `O_K = Z[ω]`.
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Largest absolute value among the numerators and denominators of the coordinates.
    pub fn height(&self) -> BigInt {
        [self.a.numer(), self.a.denom(), self.b.numer(), self.b.denom()]
            .into_iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_default()
    }
}

impl fmt::Display for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}·ω", self.b)
        } else {
            write!(f, "{} + {}·ω", self.a, self.b)
        }
    }
}
