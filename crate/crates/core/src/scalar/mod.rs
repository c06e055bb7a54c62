//! The scalar tower: exact rationals, one-square-root extensions, floats,
//! dual numbers (for conformal linearization) and truncated multivariate jets.
//!
//! Every tensor and geometry type is generic over [`Scalar`]. Kinds never mix
//! implicitly; conversions go through [`Scalar::from_rational`], the `From`
//! impls on [`QuadExt`], or [`Scalar::to_f64`].

mod dual;
mod jet;
mod quad;

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use dual::Dual;
pub use jet::{Jet, JetLayout};
pub use quad::QuadExt;

/// Exact rational numbers, always in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    Rational,
    QuadExt,
    Float,
    Dual,
    Jet,
}

impl ScalarKind {
    pub fn name(self) -> &'static str {
        match self {
            ScalarKind::Rational => "rational",
            ScalarKind::QuadExt => "quadratic-extension",
            ScalarKind::Float => "float",
            ScalarKind::Dual => "dual",
            ScalarKind::Jet => "jet",
        }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    const KIND: ScalarKind;

    /// Whether arithmetic in this kind is free of rounding.
    const EXACT: bool;

    fn from_rational(q: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Square root, when it exists in this kind.
    fn sqrt(&self) -> Option<Self>;

    /// Exponential, when it exists in this kind.
    fn exp(&self) -> Option<Self>;

    /// True when the value has a multiplicative inverse.
    fn is_invertible(&self) -> bool {
        !self.is_zero()
    }

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Magnitude used for residual reporting.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn scale_i64(&self, k: i64) -> Self {
        self.clone() * &Self::from_i64(k)
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }

    fn exp(&self) -> Option<Self> {
        Some(f64::exp(*self))
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    const KIND: ScalarKind = ScalarKind::Float;
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f32(q).unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f32::sqrt(*self))
    }

    fn exp(&self) -> Option<Self> {
        Some(f32::exp(*self))
    }
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Rational;
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sqrt(&self) -> Option<Self> {
        rational_sqrt(self)
    }

    fn exp(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = exact_isqrt(q.numer())?;
    let d = exact_isqrt(q.denom())?;
    Some(Rational::new(n, d))
}

fn exact_isqrt(v: &BigInt) -> Option<BigInt> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

/// Parses `p/q`, an integer, or a finite decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Ok(i) = text.parse::<BigInt>() {
        return Some(Rational::from_integer(i));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.')?;
    let negative = int_part.starts_with('-');
    let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut value = Rational::new(
        digits.parse::<BigInt>().ok()?,
        BigInt::from(10u32).pow(frac_part.len() as u32),
    );
    let ten = Rational::from_integer(BigInt::from(10));
    for _ in 0..exponent.unsigned_abs() {
        value = if exponent > 0 { value * &ten } else { value / &ten };
    }
    Some(if negative { -value } else { value })
}

/// Converts a finite float into the exact rational it denotes.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_lowest_terms() {
        let q = Rational::new(BigInt::from(6), BigInt::from(-4));
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
    }

    #[test]
    fn parses_rational_literals() {
        assert_eq!(parse_rational("1/4"), Some(Rational::from_ratio(1, 4)));
        assert_eq!(parse_rational("-9"), Some(Rational::from_i64(-9)));
        assert_eq!(parse_rational("0.25"), Some(Rational::from_ratio(1, 4)));
        assert_eq!(parse_rational("-1.5e1"), Some(Rational::from_i64(-15)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(rational_sqrt(&Rational::from_ratio(9, 4)), Some(Rational::from_ratio(3, 2)));
        assert_eq!(rational_sqrt(&Rational::from_i64(2)), None);
        assert_eq!(rational_sqrt(&Rational::from_i64(-4)), None);
    }
}
