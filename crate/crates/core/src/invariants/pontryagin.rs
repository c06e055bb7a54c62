//! Pontryagin-type forms of the Weyl curvature and the one-form ρ^Φ.
//!
//! Forms of high degree are evaluated one increasing index tuple at a time.
//! A `2k`-form in dimension 8 would otherwise need `8^8` stored components.

use std::sync::OnceLock;

use num_traits::Zero;

use super::phi::{InvariantPolynomial, Matrix};
use super::WeightedOneForm;
use crate::error::{Error, Result};
use crate::geometry::CurvatureStack;
use crate::scalar::{Jet, Rational, Scalar};
use crate::tensor::{antisymmetric_from_sorted, for_each_permutation, Down, Tensor};

fn factorial(k: usize) -> Rational {
    Rational::from_integer((1..=k as i64).product::<i64>().into())
}

/// Orderings of `len` positions into an optional leading singleton followed by
/// pairs `(x, y)` with `x < y`, each with its sign.
fn orderings(len: usize, singleton: bool) -> &'static [(Vec<usize>, i8)] {
    static CACHE: OnceLock<std::sync::Mutex<Vec<((usize, bool), &'static [(Vec<usize>, i8)])>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap();
    if let Some((_, v)) = guard.iter().find(|(key, _)| *key == (len, singleton)) {
        return v;
    }
    let start = usize::from(singleton);
    let mut out = Vec::new();
    for_each_permutation(len, |images, sign| {
        if images[start..].chunks(2).all(|p| p[0] < p[1]) {
            out.push((images.to_vec(), sign));
        }
    });
    let leaked: &'static [(Vec<usize>, i8)] = Box::leak(out.into_boxed_slice());
    guard.push(((len, singleton), leaked));
    leaked
}

/// Matrix-valued two-forms `M(x,y)[t][s] = W_{xyt}{}^s` and one-forms
/// `N(c)[t][s] = C_t{}^s{}_c` from which Pontryagin-type forms are assembled.
pub struct CurvatureMatrices<T> {
    n: usize,
    pairs: Vec<Matrix<T>>,
    singles: Vec<Matrix<T>>,
}

impl<T: Scalar> CurvatureMatrices<T> {
    /// `weyl` all-down `W_ijkl`, `cotton` all-down `C_ijk`, `ginv` the inverse metric.
    pub fn new(weyl: &Tensor<T>, cotton: Option<&Tensor<T>>, ginv: &Tensor<T>) -> Result<Self> {
        let n = weyl.dim();
        if weyl.valence() != [Down; 4] {
            return Err(Error::VarianceMismatch("expected all-down W_ijkl".into()));
        }
        let w = weyl.raise(3, ginv)?;
        let mut pairs = vec![Vec::new(); n * n];
        for x in 0..n {
            for y in x + 1..n {
                pairs[x * n + y] =
                    (0..n).map(|t| (0..n).map(|s| w.get(&[x, y, t, s]).clone()).collect()).collect();
            }
        }
        let singles = match cotton {
            None => Vec::new(),
            Some(c) => {
                if c.valence() != [Down; 3] {
                    return Err(Error::VarianceMismatch("expected all-down C_ijk".into()));
                }
                let c = c.raise(1, ginv)?;
                (0..n)
                    .map(|cc| (0..n).map(|t| (0..n).map(|s| c.get(&[t, s, cc]).clone()).collect()).collect())
                    .collect()
            }
        };
        Ok(CurvatureMatrices { n, pairs, singles })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn pair(&self, x: usize, y: usize) -> &Matrix<T> {
        &self.pairs[x * self.n + y]
    }

    /// `(Φ W^k)_I` at an increasing `2k`-tuple `I`, where `Φ` has degree `k`.
    pub fn star_p_component(&self, phi: &InvariantPolynomial, idx: &[usize]) -> T {
        let k = phi.degree();
        debug_assert_eq!(idx.len(), 2 * k);
        let mut acc = T::zero();
        let mut args: Vec<&Matrix<T>> = Vec::with_capacity(k);
        for (seq, sign) in orderings(2 * k, false) {
            args.clear();
            args.extend(seq.chunks(2).map(|p| self.pair(idx[p[0]], idx[p[1]])));
            let v = phi.evaluate_unchecked(&args);
            if v.is_zero() {
                continue;
            }
            if *sign > 0 {
                acc += &v;
            } else {
                acc -= &v;
            }
        }
        acc * &T::from_rational(&(Rational::from_integer((1i64 << k).into()) / factorial(2 * k)))
    }

    /// `(Φ W^{k−1} C)_I` at an increasing `(2k−1)`-tuple `I`.
    pub fn phi_wc_component(&self, phi: &InvariantPolynomial, idx: &[usize]) -> Result<T> {
        if self.singles.is_empty() {
            return Err(Error::InvalidArgument("Cotton matrices were not supplied".into()));
        }
        let k = phi.degree();
        debug_assert_eq!(idx.len(), 2 * k - 1);
        let mut acc = T::zero();
        let mut args: Vec<&Matrix<T>> = Vec::with_capacity(k);
        for (seq, sign) in orderings(2 * k - 1, true) {
            args.clear();
            args.push(&self.singles[idx[seq[0]]]);
            args.extend(seq[1..].chunks(2).map(|p| self.pair(idx[p[0]], idx[p[1]])));
            let v = phi.evaluate_unchecked(&args);
            if v.is_zero() {
                continue;
            }
            if *sign > 0 {
                acc += &v;
            } else {
                acc -= &v;
            }
        }
        let scale = Rational::from_integer((1i64 << (k - 1)).into()) / factorial(2 * k - 1);
        Ok(acc * &T::from_rational(&scale))
    }
}

fn matrices<S: Scalar>(stack: &CurvatureStack<S>) -> Result<CurvatureMatrices<Jet<S>>> {
    CurvatureMatrices::new(stack.weyl(), Some(stack.cotton()), stack.inverse_metric())
}

fn check_degree(n: usize, degree: usize, form_degree: usize) -> Result<()> {
    if degree == 0 || form_degree > n {
        return Err(Error::Dimension { dim: n, requirement: format!("form degree {form_degree} ≤ n") });
    }
    Ok(())
}

/// The `2k`-form `Φ(W, …, W)` for `Φ` of degree `k`.
pub fn star_p<S: Scalar>(stack: &CurvatureStack<S>, phi: &InvariantPolynomial) -> Result<Tensor<Jet<S>>> {
    let k = phi.degree();
    check_degree(stack.dim(), k, 2 * k)?;
    let m = CurvatureMatrices::new(stack.weyl(), None, stack.inverse_metric())?;
    Ok(antisymmetric_from_sorted(stack.dim(), 2 * k, |idx| m.star_p_component(phi, idx)))
}

/// The `(2k−1)`-form `Φ(C, W, …, W)` with `C` read as a matrix-valued one-form.
pub fn phi_wc<S: Scalar>(stack: &CurvatureStack<S>, phi: &InvariantPolynomial) -> Result<Tensor<Jet<S>>> {
    let k = phi.degree();
    check_degree(stack.dim(), k, 2 * k - 1)?;
    let m = matrices(stack)?;
    let mut err = None;
    let t = antisymmetric_from_sorted(stack.dim(), 2 * k - 1, |idx| match m.phi_wc_component(phi, idx) {
        Ok(v) => v,
        Err(e) => {
            err = Some(e);
            Jet::zero()
        }
    });
    err.map_or(Ok(t), Err)
}

/// `p_Φ(W)` as a function, from the top component of the `n`-form: requires `n = 2k`.
pub fn pontryagin_function<S: Scalar>(stack: &CurvatureStack<S>, phi: &InvariantPolynomial) -> Result<Jet<S>> {
    let n = stack.dim();
    let k = phi.degree();
    if n != 2 * k {
        return Err(Error::Dimension { dim: n, requirement: format!("n = 2·deg Φ = {}", 2 * k) });
    }
    let m = CurvatureMatrices::new(stack.weyl(), None, stack.inverse_metric())?;
    let top: Vec<usize> = (0..n).collect();
    let vol = stack.volume_form()?;
    Ok(m.star_p_component(phi, &top) * &vol.upper(&top))
}

/// `ρ^Φ = −★(Φ W^{k−1} C) + (1/2k) ∇ p_Φ(W)` in dimension `n = 2k`.
pub fn rho<S: Scalar>(stack: &CurvatureStack<S>, phi: &InvariantPolynomial) -> Result<WeightedOneForm<Jet<S>>> {
    let k = phi.degree();
    let p = pontryagin_function(stack, phi)?;
    let x = phi_wc(stack, phi)?;
    let star = stack.hodge(&x)?;
    let grad = stack.gradient(&p)?;
    let coef = Jet::constant(S::from_ratio(1, 2 * k as i64));
    let form = grad.scale(&coef).try_sub(&star)?;
    Ok(WeightedOneForm { form, weight: -(2 * k as i32) })
}

/// `★ρ^Φ = Φ W^{k−1} C − (1/(n−4k)) ∇^i (Φ W^k)_{i…}`, defined for `n ≠ 4k`.
pub fn star_rho<S: Scalar>(stack: &CurvatureStack<S>, phi: &InvariantPolynomial) -> Result<Tensor<Jet<S>>> {
    let n = stack.dim() as i64;
    let k = phi.degree() as i64;
    if n == 4 * k {
        return Err(Error::Pole(format!("★ρ has a pole at n = 4k = {n}")));
    }
    let x = phi_wc(stack, phi)?;
    let div = stack.divergence(&star_p(stack, phi)?, 0)?;
    x.try_sub(&div.scale(&Jet::constant(S::from_ratio(1, n - 4 * k))))
}

/// `(Φ W^{k−1} C)` at one increasing index tuple, on base-point values only.
pub fn phi_wc_at<S: Scalar>(stack: &CurvatureStack<S>, phi: &InvariantPolynomial, idx: &[usize]) -> Result<S> {
    let m = CurvatureMatrices::new(
        &stack.weyl().values(),
        Some(&stack.cotton().values()),
        &stack.inverse_metric().values(),
    )?;
    m.phi_wc_component(phi, idx)
}

/// `(Φ W^k)` at one increasing index tuple, on base-point values only.
pub fn star_p_at<S: Scalar>(stack: &CurvatureStack<S>, phi: &InvariantPolynomial, idx: &[usize]) -> Result<S> {
    let m = CurvatureMatrices::new(&stack.weyl().values(), None, &stack.inverse_metric().values())?;
    Ok(m.star_p_component(phi, idx))
}
