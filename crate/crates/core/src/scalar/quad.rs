use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{rational_sqrt, Rational, Scalar, ScalarKind};

/// Numbers `a + b·√D` with rational `a`, `b` and a fixed non-square integer `D > 0`.
///
/// Any `√(p/q)` is `√(pq)/q`, so an integer radicand covers every rational one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadExt<const D: i64> {
    pub a: Rational,
    pub b: Rational,
}

impl<const D: i64> QuadExt<D> {
    /// Panics when `D` is a perfect square or not positive; such a
    /// radicand gives a non-canonical representation.
    pub fn new(a: Rational, b: Rational) -> Self {
        assert!(Self::radicand_is_valid(), "QuadExt radicand {D} must be a positive non-square");
        QuadExt { a, b }
    }

    pub fn radicand_is_valid() -> bool {
        D > 0 && rational_sqrt(&Rational::from_integer(BigInt::from(D))).is_none()
    }

    pub fn radicand() -> Rational {
        Rational::from_integer(BigInt::from(D))
    }

    /// `√D` itself.
    pub fn root() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn conjugate(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone() }
    }

    /// `a² − b²D`, never zero for nonzero values.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Self::radicand()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }
}

impl<const D: i64> From<Rational> for QuadExt<D> {
    fn from(a: Rational) -> Self {
        QuadExt::new(a, Rational::zero())
    }
}

impl<const D: i64> fmt::Debug for QuadExt<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<const D: i64> fmt::Display for QuadExt<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}·√{}", self.a, self.b, D)
        }
    }
}

impl<const D: i64> Zero for QuadExt<D> {
    fn zero() -> Self {
        QuadExt { a: Rational::zero(), b: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl<const D: i64> One for QuadExt<D> {
    fn one() -> Self {
        QuadExt { a: Rational::one(), b: Rational::zero() }
    }
}

impl<const D: i64> Neg for QuadExt<D> {
    type Output = Self;
    fn neg(self) -> Self {
        QuadExt { a: -self.a, b: -self.b }
    }
}

impl<const D: i64> Add<&QuadExt<D>> for QuadExt<D> {
    type Output = Self;
    fn add(self, rhs: &Self) -> Self {
        QuadExt { a: self.a + &rhs.a, b: self.b + &rhs.b }
    }
}

impl<const D: i64> Sub<&QuadExt<D>> for QuadExt<D> {
    type Output = Self;
    fn sub(self, rhs: &Self) -> Self {
        QuadExt { a: self.a - &rhs.a, b: self.b - &rhs.b }
    }
}

impl<const D: i64> Mul<&QuadExt<D>> for QuadExt<D> {
    type Output = Self;
    fn mul(self, rhs: &Self) -> Self {
        let d = Self::radicand();
        QuadExt {
            a: &self.a * &rhs.a + &self.b * &rhs.b * d,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl<const D: i64> Div<&QuadExt<D>> for QuadExt<D> {
    type Output = Self;
    fn div(self, rhs: &Self) -> Self {
        let n = rhs.norm();
        assert!(!n.is_zero(), "division by zero in QuadExt");
        let num = self * &rhs.conjugate();
        QuadExt { a: num.a / &n, b: num.b / &n }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl<const D: i64> $tr<QuadExt<D>> for QuadExt<D> {
            type Output = Self;
            fn $m(self, rhs: Self) -> Self {
                $tr::$m(self, &rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl<const D: i64> AddAssign<&QuadExt<D>> for QuadExt<D> {
    fn add_assign(&mut self, rhs: &Self) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl<const D: i64> SubAssign<&QuadExt<D>> for QuadExt<D> {
    fn sub_assign(&mut self, rhs: &Self) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl<const D: i64> Scalar for QuadExt<D> {
    const KIND: ScalarKind = ScalarKind::QuadExt;
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        QuadExt::from(q.clone())
    }

    fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * (D as f64).sqrt()
    }

    /// Exact for rational squares and for rationals of the form `r²·D`.
    fn sqrt(&self) -> Option<Self> {
        if !self.b.is_zero() {
            // (x + y√D)² = x² + y²D + 2xy√D: solve via the norm.
            let n = rational_sqrt(&self.norm())?;
            for s in [&self.a + &n, &self.a - &n] {
                let two = Rational::from_integer(BigInt::from(2));
                if let Some(x) = rational_sqrt(&(s / &two)) {
                    if x.is_zero() {
                        continue;
                    }
                    let y = &self.b / (&x * &two);
                    let cand = QuadExt::new(x, y);
                    if cand.clone() * &cand == *self && cand.to_f64() >= 0.0 {
                        return Some(cand);
                    }
                }
            }
            return None;
        }
        if self.a.is_negative() {
            return None;
        }
        if let Some(r) = rational_sqrt(&self.a) {
            return Some(QuadExt::from(r));
        }
        rational_sqrt(&(&self.a / Self::radicand())).map(|r| QuadExt::new(Rational::zero(), r))
    }

    fn exp(&self) -> Option<Self> {
        self.is_zero().then(Self::one)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q2 = QuadExt<2>;

    #[test]
    fn field_arithmetic_is_closed() {
        let x = Q2::new(Rational::from_i64(1), Rational::from_i64(1));
        let inv = Q2::one() / &x;
        assert_eq!(inv.clone() * &x, Q2::one());
        assert_eq!(inv, Q2::new(Rational::from_i64(-1), Rational::from_i64(1)));
    }

    #[test]
    fn sqrt_of_non_square_rational() {
        let eight = Q2::from(Rational::from_i64(8));
        let r = eight.sqrt().unwrap();
        assert_eq!(r, Q2::new(Rational::zero(), Rational::from_i64(2)));
        assert_eq!(Q2::from(Rational::from_i64(3)).sqrt(), None);
        let sq = Q2::new(Rational::from_i64(3), Rational::from_i64(2));
        assert_eq!((sq.clone() * &sq).sqrt(), Some(sq));
    }

    #[test]
    #[should_panic]
    fn square_radicand_rejected() {
        let _ = QuadExt::<4>::new(Rational::one(), Rational::one());
    }
}
