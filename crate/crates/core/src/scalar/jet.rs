//! Truncated multivariate Taylor expansions at a base point.
//!
//! Coefficients are stored in a degree-graded order that does not depend on
//! the truncation order, so a jet of order `K` restricted to order `K' < K`
//! is a prefix of its coefficient vector.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Rational, Scalar, ScalarKind};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// Monomial tables for a fixed number of variables and truncation order.
pub struct JetLayout {
    vars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    degree: Vec<usize>,
    /// `prefix[d]` = number of monomials of degree `<= d`.
    prefix: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    mul: Vec<u32>,
    raise: Vec<u32>,
}

impl fmt::Debug for JetLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetLayout(vars={}, order={})", self.vars, self.order)
    }
}

fn monomials_of_degree(vars: usize, degree: usize, out: &mut Vec<Vec<u8>>) {
    fn rec(vars: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() + 1 == vars {
            cur.push(left as u8);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u8);
            rec(vars, left - e, cur, out);
            cur.pop();
        }
    }
    if vars == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return;
    }
    rec(vars, degree, &mut Vec::with_capacity(vars), out);
}

impl JetLayout {
    fn build(vars: usize, order: usize) -> Self {
        let mut exponents = Vec::new();
        let mut prefix = Vec::with_capacity(order + 1);
        for d in 0..=order {
            monomials_of_degree(vars, d, &mut exponents);
            prefix.push(exponents.len());
        }
        let degree: Vec<usize> =
            exponents.iter().map(|e| e.iter().map(|&x| x as usize).sum()).collect();
        let index: HashMap<Vec<u8>, usize> =
            exponents.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let count = exponents.len();
        let mut mul = vec![NONE; count * count];
        for i in 0..count {
            for j in 0..count {
                if degree[i] + degree[j] > order {
                    continue;
                }
                let e: Vec<u8> = exponents[i].iter().zip(&exponents[j]).map(|(a, b)| a + b).collect();
                mul[i * count + j] = index[&e] as u32;
            }
        }
        let mut raise = vec![NONE; count * vars];
        for i in 0..count {
            if degree[i] == order {
                continue;
            }
            for v in 0..vars {
                let mut e = exponents[i].clone();
                e[v] += 1;
                raise[i * vars + v] = index[&e] as u32;
            }
        }
        JetLayout { vars, order, exponents, degree, prefix, index, mul, raise }
    }

    /// Shared layout for `vars` variables truncated at total degree `order`.
    pub fn get(vars: usize, order: usize) -> Arc<JetLayout> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetLayout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet layout cache poisoned");
        guard
            .entry((vars, order))
            .or_insert_with(|| Arc::new(JetLayout::build(vars, order)))
            .clone()
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exponents[i]
    }

    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        self.index.get(exponents).copied()
    }

    /// Number of monomials of degree `<= d`.
    pub fn count_up_to(&self, d: usize) -> usize {
        self.prefix[d.min(self.order)]
    }
}

/// A truncated Taylor expansion in several variables.
///
/// A jet without a layout is a constant, valid to every order; this is how
/// homogeneous-frame quantities ride through the same machinery as charts.
#[derive(Clone)]
pub struct Jet<S> {
    layout: Option<Arc<JetLayout>>,
    coeffs: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.layout {
            None => write!(f, "Jet::const({:?})", self.coeffs[0]),
            Some(l) => write!(f, "Jet(vars={}, order={}, {:?})", l.vars, l.order, self.coeffs),
        }
    }
}

impl<S: Scalar> Jet<S> {
    pub fn constant(value: S) -> Self {
        Jet { layout: None, coeffs: vec![value] }
    }

    /// `base + h_v`: the coordinate function `x_v` expanded around `base`.
    pub fn variable(vars: usize, order: usize, v: usize, base: S) -> Self {
        assert!(v < vars, "variable {v} out of range for {vars} variables");
        let layout = JetLayout::get(vars, order);
        let mut coeffs = vec![S::zero(); layout.len()];
        coeffs[0] = base;
        if order > 0 {
            let mut e = vec![0u8; vars];
            e[v] = 1;
            coeffs[layout.index_of(&e).unwrap()] = S::one();
        }
        Jet { layout: Some(layout), coeffs }
    }

    /// A constant embedded with an explicit layout (useful for exact order bookkeeping).
    pub fn constant_with(vars: usize, order: usize, value: S) -> Self {
        let layout = JetLayout::get(vars, order);
        let mut coeffs = vec![S::zero(); layout.len()];
        coeffs[0] = value;
        Jet { layout: Some(layout), coeffs }
    }

    pub fn from_coeffs(vars: usize, order: usize, coeffs: Vec<S>) -> Result<Self> {
        let layout = JetLayout::get(vars, order);
        if coeffs.len() != layout.len() {
            return Err(Error::ShapeMismatch(format!(
                "jet with {} vars at order {} needs {} coefficients, got {}",
                vars,
                order,
                layout.len(),
                coeffs.len()
            )));
        }
        Ok(Jet { layout: Some(layout), coeffs })
    }

    pub fn is_constant(&self) -> bool {
        self.layout.is_none()
    }

    pub fn layout(&self) -> Option<&Arc<JetLayout>> {
        self.layout.as_ref()
    }

    pub fn vars(&self) -> Option<usize> {
        self.layout.as_ref().map(|l| l.vars)
    }

    /// Truncation order; `None` for constants.
    pub fn order(&self) -> Option<usize> {
        self.layout.as_ref().map(|l| l.order)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Value at the base point.
    pub fn value(&self) -> &S {
        &self.coeffs[0]
    }

    pub fn into_value(self) -> S {
        self.coeffs.into_iter().next().unwrap()
    }

    /// Taylor coefficient of the monomial with the given exponents.
    pub fn coeff(&self, exponents: &[u8]) -> Option<S> {
        match &self.layout {
            None => Some(if exponents.iter().all(|&e| e == 0) { self.coeffs[0].clone() } else { S::zero() }),
            Some(l) => {
                let deg: usize = exponents.iter().map(|&e| e as usize).sum();
                if deg > l.order || exponents.len() != l.vars {
                    return None;
                }
                Some(self.coeffs[l.index_of(exponents)?].clone())
            }
        }
    }

    /// Partial derivative at the base point for the multi-index `alpha`.
    pub fn partial(&self, alpha: &[u8]) -> Result<S> {
        let deg: usize = alpha.iter().map(|&e| e as usize).sum();
        if let Some(l) = &self.layout {
            if deg > l.order {
                return Err(Error::OrderExhausted(format!(
                    "derivative of order {} requested from a jet of order {}",
                    deg, l.order
                )));
            }
            if alpha.len() != l.vars {
                return Err(Error::ShapeMismatch(format!(
                    "multi-index has {} entries, jet has {} variables",
                    alpha.len(),
                    l.vars
                )));
            }
        }
        let c = self.coeff(alpha).unwrap_or_else(S::zero);
        let fact: u64 = alpha.iter().map(|&e| (1..=e as u64).product::<u64>()).product();
        Ok(c * &S::from_i64(fact as i64))
    }

    /// `∂/∂x_v`; the result is valid to one order less.
    pub fn derivative(&self, v: usize) -> Result<Self> {
        let l = match &self.layout {
            None => return Ok(Jet::zero()),
            Some(l) => l,
        };
        if v >= l.vars {
            return Err(Error::InvalidArgument(format!("variable {v} out of range for {} variables", l.vars)));
        }
        if l.order == 0 {
            return Err(Error::OrderExhausted("cannot differentiate a jet of order 0".into()));
        }
        let lower = JetLayout::get(l.vars, l.order - 1);
        let coeffs = (0..lower.len())
            .map(|i| {
                let src = l.raise[i * l.vars + v] as usize;
                let k = l.exponents[i][v] as i64 + 1;
                self.coeffs[src].clone() * &S::from_i64(k)
            })
            .collect();
        Ok(Jet { layout: Some(lower), coeffs })
    }

    pub fn truncate(&self, order: usize) -> Self {
        match &self.layout {
            Some(l) if order < l.order => {
                let layout = JetLayout::get(l.vars, order);
                let coeffs = self.coeffs[..layout.len()].to_vec();
                Jet { layout: Some(layout), coeffs }
            }
            _ => self.clone(),
        }
    }

    /// Re-expresses the jet in `total` variables, its own occupying `offset..offset+vars`.
    pub fn embed(&self, total: usize, offset: usize) -> Self {
        let l = match &self.layout {
            None => return self.clone(),
            Some(l) => l,
        };
        assert!(offset + l.vars <= total, "embedding out of range");
        let layout = JetLayout::get(total, l.order);
        let mut coeffs = vec![S::zero(); layout.len()];
        let mut e = vec![0u8; total];
        for (i, c) in self.coeffs.iter().enumerate() {
            e[offset..offset + l.vars].copy_from_slice(&l.exponents[i]);
            coeffs[layout.index_of(&e).unwrap()] = c.clone();
        }
        Jet { layout: Some(layout), coeffs }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        Jet { layout: self.layout.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// `Σ c_r (self − self(0))^r` for the supplied Taylor coefficients of an analytic function.
    pub fn compose_series(&self, series: &[S]) -> Self {
        let order = match &self.layout {
            None => return Jet::constant(series[0].clone()),
            Some(l) => l.order,
        };
        let mut u = self.clone();
        u.coeffs[0] = S::zero();
        let top = order.min(series.len() - 1);
        let mut acc = Jet::constant(series[top].clone());
        for r in (0..top).rev() {
            acc = acc * &u;
            acc.coeffs[0] += &series[r];
        }
        acc
    }

    pub fn try_recip(&self) -> Option<Self> {
        let b0 = self.value().clone();
        if !b0.is_invertible() {
            return None;
        }
        let inv0 = S::one() / &b0;
        let order = self.order().unwrap_or(0);
        // 1/(b0 + u) = Σ (−1)^r u^r / b0^{r+1}
        let mut series = Vec::with_capacity(order + 1);
        let mut p = inv0.clone();
        for r in 0..=order {
            series.push(if r % 2 == 0 { p.clone() } else { -p.clone() });
            p = p * &inv0;
        }
        Some(self.compose_series(&series))
    }

    /// Rational power `x^q` via its binomial series around the base value.
    pub fn try_powq(&self, q: &Rational) -> Option<Self> {
        let b0 = self.value().clone();
        let order = self.order().unwrap_or(0);
        let base_pow = scalar_powq(&b0, q)?;
        let inv0 = S::one() / &b0;
        let mut series = Vec::with_capacity(order + 1);
        let mut binom = Rational::one();
        let mut p = base_pow;
        for r in 0..=order {
            series.push(p.clone() * &S::from_rational(&binom));
            let rr = Rational::from_integer(BigInt::from(r as i64));
            binom = binom * (q - &rr) / (rr + Rational::one());
            p = p * &inv0;
        }
        Some(self.compose_series(&series))
    }

    fn align<'a>(&'a self, other: &'a Self) -> Option<&'a Arc<JetLayout>> {
        match (&self.layout, &other.layout) {
            (None, None) => None,
            (Some(l), None) | (None, Some(l)) => Some(l),
            (Some(a), Some(b)) => {
                assert_eq!(a.vars, b.vars, "jet variable count mismatch");
                Some(if a.order <= b.order { a } else { b })
            }
        }
    }
}

fn scalar_powq<S: Scalar>(x: &S, q: &Rational) -> Option<S> {
    use num_traits::Signed;
    let (n, d) = (q.numer().clone(), q.denom().clone());
    let d: i64 = num_traits::ToPrimitive::to_i64(&d)?;
    let mut root = x.clone();
    match d {
        1 => {}
        2 => root = x.sqrt()?,
        _ => return None,
    }
    let e: u64 = num_traits::ToPrimitive::to_u64(&n.abs())?;
    let mut acc = S::one();
    for _ in 0..e {
        acc = acc * &root;
    }
    if n.is_negative() {
        if !acc.is_invertible() {
            return None;
        }
        acc = S::one() / &acc;
    }
    Some(acc)
}

impl<S: Scalar> PartialEq for Jet<S> {
    fn eq(&self, other: &Self) -> bool {
        let n = match self.align(other) {
            None => 1,
            Some(l) => l.len(),
        };
        (0..n).all(|i| {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(S::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(S::zero);
            a == b
        })
    }
}

impl<S: Scalar> Zero for Jet<S> {
    fn zero() -> Self {
        Jet::constant(S::zero())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl<S: Scalar> One for Jet<S> {
    fn one() -> Self {
        Jet::constant(S::one())
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in &mut self.coeffs {
            *c = -c.clone();
        }
        self
    }
}

impl<S: Scalar> AddAssign<&Jet<S>> for Jet<S> {
    fn add_assign(&mut self, rhs: &Self) {
        let layout = self.align(rhs).cloned();
        match layout {
            None => self.coeffs[0] += &rhs.coeffs[0],
            Some(l) => {
                if self.layout.is_none() {
                    let c = std::mem::take(&mut self.coeffs).into_iter().next().unwrap();
                    let mut coeffs = rhs.coeffs[..l.len()].to_vec();
                    coeffs[0] += &c;
                    *self = Jet { layout: Some(l), coeffs };
                    return;
                }
                self.coeffs.truncate(l.len());
                self.layout = Some(l);
                if rhs.layout.is_none() {
                    self.coeffs[0] += &rhs.coeffs[0];
                } else {
                    for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                        *a += b;
                    }
                }
            }
        }
    }
}

impl<S: Scalar> SubAssign<&Jet<S>> for Jet<S> {
    fn sub_assign(&mut self, rhs: &Self) {
        *self += &(-rhs.clone());
    }
}

impl<S: Scalar> Add<&Jet<S>> for Jet<S> {
    type Output = Self;
    fn add(mut self, rhs: &Self) -> Self {
        self += rhs;
        self
    }
}

impl<S: Scalar> Sub<&Jet<S>> for Jet<S> {
    type Output = Self;
    fn sub(mut self, rhs: &Self) -> Self {
        self -= rhs;
        self
    }
}

impl<S: Scalar> Mul<&Jet<S>> for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: &Self) -> Self {
        match (&self.layout, &rhs.layout) {
            (None, None) => Jet::constant(self.coeffs[0].clone() * &rhs.coeffs[0]),
            (None, Some(_)) => {
                let c = &self.coeffs[0];
                Jet { layout: rhs.layout.clone(), coeffs: rhs.coeffs.iter().map(|x| c.clone() * x).collect() }
            }
            (Some(_), None) => {
                let c = &rhs.coeffs[0];
                let coeffs = self.coeffs.into_iter().map(|x| x * c).collect();
                Jet { layout: self.layout, coeffs }
            }
            (Some(_), Some(_)) => {
                let l = self.align(rhs).unwrap().clone();
                let count = l.len();
                let mut out = vec![S::zero(); count];
                for i in 0..count {
                    let a = &self.coeffs[i];
                    if a.is_zero() {
                        continue;
                    }
                    let lim = l.prefix[l.order - l.degree[i]];
                    let row = &l.mul[i * count..i * count + lim];
                    for (j, &k) in row.iter().enumerate() {
                        let b = &rhs.coeffs[j];
                        if b.is_zero() {
                            continue;
                        }
                        out[k as usize] += &(a.clone() * b);
                    }
                }
                Jet { layout: Some(l), coeffs: out }
            }
        }
    }
}

impl<S: Scalar> Div<&Jet<S>> for Jet<S> {
    type Output = Self;
    fn div(self, rhs: &Self) -> Self {
        if rhs.layout.is_none() {
            let c = &rhs.coeffs[0];
            let coeffs = self.coeffs.into_iter().map(|x| x / c).collect();
            return Jet { layout: self.layout, coeffs };
        }
        let inv = rhs.try_recip().expect("division by a non-unit jet");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl<S: Scalar> $tr<Jet<S>> for Jet<S> {
            type Output = Self;
            fn $m(self, rhs: Self) -> Self {
                $tr::$m(self, &rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl<S: Scalar> Scalar for Jet<S> {
    const KIND: ScalarKind = ScalarKind::Jet;
    const EXACT: bool = S::EXACT;

    fn from_rational(q: &Rational) -> Self {
        Jet::constant(S::from_rational(q))
    }

    fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }

    fn sqrt(&self) -> Option<Self> {
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        if !self.value().is_invertible() {
            return if self.is_zero() { Some(Jet::zero()) } else { None };
        }
        self.try_powq(&half)
    }

    fn exp(&self) -> Option<Self> {
        let e0 = self.value().exp()?;
        let order = self.order().unwrap_or(0);
        let mut series = Vec::with_capacity(order + 1);
        let mut fact = 1i64;
        for r in 0..=order {
            if r > 0 {
                fact *= r as i64;
            }
            series.push(e0.clone() / &S::from_i64(fact));
        }
        Some(self.compose_series(&series))
    }

    fn is_invertible(&self) -> bool {
        self.value().is_invertible()
    }

    fn magnitude(&self) -> f64 {
        self.value().magnitude()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_second_derivative() {
        let x = Jet::variable(1, 2, 0, 1.0);
        let f = x.clone() * &x;
        assert_eq!(f.partial(&[2]).unwrap(), 2.0);
        assert_eq!(f.partial(&[1]).unwrap(), 2.0);
        assert!(f.partial(&[3]).is_err());
    }

    #[test]
    fn exp_of_linear_function() {
        // exp(2Υ) with Υ = 3x + y at 0: ∂x∂y e^{2Υ} = 2·3·2·1 = 12
        let x = Jet::variable(2, 4, 0, 0.0f64);
        let y = Jet::variable(2, 4, 1, 0.0);
        let ups = x * &Jet::constant(3.0) + &y;
        let e = (ups.clone() + &ups).exp().unwrap();
        assert!((e.partial(&[1, 1]).unwrap() - 12.0).abs() < 1e-12);
        assert!((e.partial(&[2, 2]).unwrap() - 6.0f64.powi(2) * 2.0f64.powi(2)).abs() < 1e-9);
    }

    #[test]
    fn reciprocal_is_exact_over_rationals() {
        let x = Jet::variable(1, 5, 0, Rational::from_i64(0));
        let one = Jet::<Rational>::one();
        let f = one.clone() / &(one + &x);
        for k in 0..=5u8 {
            let expected = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(f.coeff(&[k]).unwrap(), Rational::from_i64(expected));
        }
    }

    #[test]
    fn derivative_drops_order() {
        let x = Jet::variable(2, 3, 0, 2.0);
        let f = x.clone() * &x * &x;
        let d = f.derivative(0).unwrap();
        assert_eq!(d.order(), Some(2));
        assert_eq!(*d.value(), 12.0);
    }

    #[test]
    fn embed_moves_variables() {
        let x = Jet::variable(1, 3, 0, 0.0);
        let f = (x.clone() * &x).embed(3, 2);
        assert_eq!(f.coeff(&[0, 0, 2]).unwrap(), 1.0);
        assert_eq!(f.coeff(&[2, 0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Jet::variable(2, 4, 0, Rational::from_i64(0));
        let y = Jet::variable(2, 4, 1, Rational::from_i64(0));
        let f = Jet::constant(Rational::from_i64(4)) + &x + &(y.clone() * &y);
        let r = f.sqrt().unwrap();
        assert_eq!(r.clone() * &r, f);
    }
}
