use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Jet, Scalar};

/// A polynomial in `vars` variables: a list of (exponents, coefficient) terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial<S> {
    pub vars: usize,
    pub terms: Vec<(Vec<u32>, S)>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(vars: usize) -> Self {
        Polynomial { vars, terms: Vec::new() }
    }

    pub fn constant(vars: usize, c: S) -> Self {
        Polynomial { vars, terms: vec![(vec![0; vars], c)] }
    }

    /// The coordinate function `x_v`.
    pub fn coordinate(vars: usize, v: usize) -> Self {
        let mut e = vec![0; vars];
        e[v] = 1;
        Polynomial { vars, terms: vec![(e, S::one())] }
    }

    pub fn monomial(exponents: Vec<u32>, c: S) -> Self {
        Polynomial { vars: exponents.len(), terms: vec![(exponents, c)] }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Polynomial { vars: self.vars, terms }
    }

    pub fn scale(&self, c: &S) -> Self {
        Polynomial { vars: self.vars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x.clone() * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, a) in &self.terms {
            for (eb, b) in &other.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                terms.push((e, a.clone() * b));
            }
        }
        Polynomial { vars: self.vars, terms }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial { vars: self.vars, terms: self.terms.iter().map(|(e, c)| (e.clone(), f(c))).collect() }
    }

    pub fn eval(&self, point: &[S]) -> S {
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = term * x;
                }
            }
            acc += &term;
        }
        acc
    }

    /// Taylor expansion at `point` to total order `order`.
    pub fn jet(&self, point: &[S], order: usize) -> Result<Jet<S>> {
        if point.len() != self.vars {
            return Err(Error::ShapeMismatch(format!(
                "polynomial in {} variables evaluated at a {}-point",
                self.vars,
                point.len()
            )));
        }
        let xs: Vec<Jet<S>> =
            (0..self.vars).map(|v| Jet::variable(self.vars, order, v, point[v].clone())).collect();
        let mut acc = Jet::constant_with(self.vars, order, S::zero());
        for (e, c) in &self.terms {
            if e.len() != self.vars {
                return Err(Error::ShapeMismatch("monomial exponent length".into()));
            }
            let mut term = Jet::constant(c.clone());
            for (x, &k) in xs.iter().zip(e) {
                for _ in 0..k {
                    term = term * x;
                }
            }
            acc += &term;
        }
        Ok(acc)
    }
}

/// A quotient of polynomials, expanded as a jet wherever the denominator is nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction<S> {
    pub num: Polynomial<S>,
    pub den: Polynomial<S>,
}

impl<S: Scalar> RationalFunction<S> {
    pub fn polynomial(p: Polynomial<S>) -> Self {
        let den = Polynomial::constant(p.vars, S::one());
        RationalFunction { num: p, den }
    }

    pub fn new(num: Polynomial<S>, den: Polynomial<S>) -> Result<Self> {
        if num.vars != den.vars {
            return Err(Error::ShapeMismatch("numerator and denominator variable counts differ".into()));
        }
        Ok(RationalFunction { num, den })
    }

    pub fn vars(&self) -> usize {
        self.num.vars
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> RationalFunction<T> {
        RationalFunction { num: self.num.map(f), den: self.den.map(f) }
    }

    pub fn jet(&self, point: &[S], order: usize) -> Result<Jet<S>> {
        let d = self.den.jet(point, order)?;
        if !d.value().is_invertible() {
            return Err(Error::Pole("denominator vanishes at the base point".into()));
        }
        Ok(self.num.jet(point, order)? / &d)
    }
}
