//! Scalar fields the engines are generic over.
//!
//! Every algebraic routine in this crate is written against [`RealScalar`],
//! and complex coefficients are `Complex<R>`. Two regimes are supported:
//!
//! - exact: [`Rational`] (arbitrary precision). Convolution, involution, the
//!   derivation, Cayley transform, modular function and trace identities are
//!   all computed without rounding. Transcendental operations return `None`
//!   unless the result is itself rational.
//! - floating point: `f64` (and `f32`). Comparisons go through
//!   [`RealScalar::near`] with a caller-supplied tolerance.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational numbers.
pub type Rational = BigRational;

/// Real field of coefficients, cocycle values and measure weights.
pub trait RealScalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Num
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic in this field is exact.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    /// `num / den`. Panics on a zero denominator.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Lossy for exact fields that are not representable; `None` for
    /// non-finite input.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Square root, `None` when it leaves the field (or the input is negative).
    fn sqrt(&self) -> Option<Self>;

    /// Exponential, `None` when it leaves the field.
    fn exp(&self) -> Option<Self>;

    /// Natural logarithm, `None` when it leaves the field.
    fn ln(&self) -> Option<Self>;

    /// The value as an integer, if it is one.
    fn to_integer(&self) -> Option<i64>;

    /// Equality up to `tol`, relative to the larger magnitude with floor 1.
    /// Exact fields ignore the tolerance.
    fn near(&self, other: &Self, tol: f64) -> bool;

    /// Parse a canonical textual form (`"p/q"` or a decimal for floats).
    fn parse_literal(s: &str) -> Option<Self>;

    fn literal(&self) -> String;
}

impl RealScalar for f64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| Float::sqrt(*self))
    }

    fn exp(&self) -> Option<Self> {
        Some(Float::exp(*self))
    }

    fn ln(&self) -> Option<Self> {
        (*self > 0.0).then(|| Float::ln(*self))
    }

    fn to_integer(&self) -> Option<i64> {
        (self.fract() == 0.0 && Float::abs(*self) < 9.0e15).then_some(*self as i64)
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        let scale = 1.0f64.max(Float::abs(*self)).max(Float::abs(*other));
        (self - other).abs() <= tol * scale
    }

    fn parse_literal(s: &str) -> Option<Self> {
        s.parse().ok()
    }

    fn literal(&self) -> String {
        format!("{self}")
    }
}

impl RealScalar for f32 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f32
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        (num as f64 / den as f64) as f32
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x as f32)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| Float::sqrt(*self))
    }

    fn exp(&self) -> Option<Self> {
        Some(Float::exp(*self))
    }

    fn ln(&self) -> Option<Self> {
        (*self > 0.0).then(|| Float::ln(*self))
    }

    fn to_integer(&self) -> Option<i64> {
        (self.fract() == 0.0 && Float::abs(*self) < 1.6e7).then_some(*self as i64)
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        let (a, b) = (f64::from(*self), f64::from(*other));
        let scale = 1.0f64.max(a.abs()).max(b.abs());
        (a - b).abs() <= tol * scale
    }

    fn parse_literal(s: &str) -> Option<Self> {
        s.parse().ok()
    }

    fn literal(&self) -> String {
        format!("{self}")
    }
}

fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

impl RealScalar for Rational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        Rational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sqrt(&self) -> Option<Self> {
        let num = perfect_sqrt(self.numer())?;
        let den = perfect_sqrt(self.denom())?;
        Some(Rational::new(num, den))
    }

    fn exp(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }

    fn ln(&self) -> Option<Self> {
        self.is_one().then(Rational::zero)
    }

    fn to_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn parse_literal(s: &str) -> Option<Self> {
        s.parse().ok()
    }

    fn literal(&self) -> String {
        format!("{self}")
    }
}

/// `a ≈ b` for complex values: exact equality for exact fields, otherwise
/// the modulus of the difference against `tol` relative to the larger
/// modulus with floor 1.
pub fn complex_near<R: RealScalar>(a: &Complex<R>, b: &Complex<R>, tol: f64) -> bool {
    if R::EXACT {
        return a == b;
    }
    let (a, b) = (to_c64(a), to_c64(b));
    let scale = 1.0f64.max(a.norm()).max(b.norm());
    (a - b).norm() <= tol * scale
}

pub fn to_c64<R: RealScalar>(z: &Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn modulus<R: RealScalar>(z: &Complex<R>) -> f64 {
    to_c64(z).norm()
}

/// Lift a real value into the complex field.
pub fn real<R: RealScalar>(r: R) -> Complex<R> {
    Complex::new(r, R::zero())
}

/// `e^{iθ}` for an angle given in floating point; `None` in exact fields
/// unless θ = 0.
pub fn cis<R: RealScalar>(theta: f64) -> Option<Complex<R>> {
    if theta == 0.0 {
        return Some(Complex::one());
    }
    if R::EXACT {
        return None;
    }
    Some(Complex::new(R::from_f64(theta.cos())?, R::from_f64(theta.sin())?))
}
