use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::{Rational, Scalar, ScalarKind};

/// `re + eps·t` with `t² = 0`; the nilpotent parameter of a conformal variation.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Dual { re, eps }
    }

    pub fn real(re: S) -> Self {
        Dual { re, eps: S::zero() }
    }

    /// The nilpotent generator `t`.
    pub fn t() -> Self {
        Dual { re: S::zero(), eps: S::one() }
    }
}

impl<S: Scalar> Zero for Dual<S> {
    fn zero() -> Self {
        Dual::real(S::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<S: Scalar> One for Dual<S> {
    fn one() -> Self {
        Dual::real(S::one())
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { re: -self.re, eps: -self.eps }
    }
}

impl<S: Scalar> Add<&Dual<S>> for Dual<S> {
    type Output = Self;
    fn add(self, rhs: &Self) -> Self {
        Dual { re: self.re + &rhs.re, eps: self.eps + &rhs.eps }
    }
}

impl<S: Scalar> Sub<&Dual<S>> for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: &Self) -> Self {
        Dual { re: self.re - &rhs.re, eps: self.eps - &rhs.eps }
    }
}

impl<S: Scalar> Mul<&Dual<S>> for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: &Self) -> Self {
        let eps = self.re.clone() * &rhs.eps + &(self.eps * &rhs.re);
        Dual { re: self.re * &rhs.re, eps }
    }
}

impl<S: Scalar> Div<&Dual<S>> for Dual<S> {
    type Output = Self;
    fn div(self, rhs: &Self) -> Self {
        let re = self.re.clone() / &rhs.re;
        let eps = (self.eps - &(re.clone() * &rhs.eps)) / &rhs.re;
        Dual { re, eps }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl<S: Scalar> $tr<Dual<S>> for Dual<S> {
            type Output = Self;
            fn $m(self, rhs: Self) -> Self {
                $tr::$m(self, &rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl<S: Scalar> AddAssign<&Dual<S>> for Dual<S> {
    fn add_assign(&mut self, rhs: &Self) {
        self.re += &rhs.re;
        self.eps += &rhs.eps;
    }
}

impl<S: Scalar> SubAssign<&Dual<S>> for Dual<S> {
    fn sub_assign(&mut self, rhs: &Self) {
        self.re -= &rhs.re;
        self.eps -= &rhs.eps;
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    const KIND: ScalarKind = ScalarKind::Dual;
    const EXACT: bool = S::EXACT;

    fn from_rational(q: &Rational) -> Self {
        Dual::real(S::from_rational(q))
    }

    fn to_f64(&self) -> f64 {
        self.re.to_f64()
    }

    fn sqrt(&self) -> Option<Self> {
        let r = self.re.sqrt()?;
        if !r.is_invertible() {
            return self.eps.is_zero().then(|| Dual::real(r));
        }
        let eps = self.eps.clone() / &(r.clone() + &r);
        Some(Dual { re: r, eps })
    }

    fn exp(&self) -> Option<Self> {
        let e = self.re.exp()?;
        Some(Dual { eps: e.clone() * &self.eps, re: e })
    }

    fn is_invertible(&self) -> bool {
        self.re.is_invertible()
    }

    fn magnitude(&self) -> f64 {
        self.re.magnitude().max(self.eps.magnitude())
    }
}
