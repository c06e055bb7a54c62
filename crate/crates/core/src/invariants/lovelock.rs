//! Pfaffians, the one-form ξ and the Lovelock-type tensors built from generalized
//! Kronecker deltas.

use crate::error::{Error, Result};
use crate::geometry::CurvatureStack;
use crate::scalar::{Jet, Rational, Scalar};
use crate::tensor::{delta_contract, BoundFactor, DeltaSlot, Tensor};

use super::WeightedOneForm;

use DeltaSlot::{Lower, Upper};

fn factorial(k: usize) -> Rational {
    Rational::from_integer((1..=k as i64).product::<i64>().into())
}

fn constant<S: Scalar>(q: &Rational) -> Jet<S> {
    Jet::constant(S::from_rational(q))
}

fn check_curvature_like<S: Scalar>(a: &Tensor<S>) -> Result<()> {
    use crate::tensor::{Down, Up};
    if a.valence() != [Down, Down, Up, Up] {
        return Err(Error::VarianceMismatch(format!("expected A_ij^kl, got {:?}", a.valence())));
    }
    Ok(())
}

/// `(1/k!) δ_{i_1…i_2k}^{j_1…j_2k} A_{j_1 j_2}^{i_1 i_2} ⋯ A_{j_{2k−1} j_2k}^{i_{2k−1} i_2k}`
/// for `A` with slots (down, down, up, up).
pub fn pfaffian<S: Scalar>(a: &Tensor<S>, k: usize) -> Result<S> {
    check_curvature_like(a)?;
    if k == 0 {
        return Ok(S::one());
    }
    let n = a.dim();
    let factors: Vec<_> = (0..k)
        .map(|m| BoundFactor::new(a, vec![Upper(2 * m), Upper(2 * m + 1), Lower(2 * m), Lower(2 * m + 1)]))
        .collect();
    let t = delta_contract(n, 2 * k, &factors)?;
    Ok(t.as_scalar().clone() / &S::from_rational(&factorial(k)))
}

/// `(1/k!) δ_{i i_2…i_2k}^{j j_2…j_2k} C_{j j_2}^{i_2} W_{j_3 j_4}^{i_3 i_4} ⋯` with
/// `C_ab^c` given with slots (down, down, up).
pub fn xi_contraction<S: Scalar>(c_mixed: &Tensor<S>, w_mixed: &Tensor<S>, k: usize) -> Result<Tensor<S>> {
    check_curvature_like(w_mixed)?;
    if k == 0 {
        return Err(Error::InvalidArgument("ξ needs k ≥ 1".into()));
    }
    let n = w_mixed.dim();
    let mut factors = vec![BoundFactor::new(c_mixed, vec![Upper(0), Upper(1), Lower(1)])];
    for m in 1..k {
        factors.push(BoundFactor::new(w_mixed, vec![Upper(2 * m), Upper(2 * m + 1), Lower(2 * m), Lower(2 * m + 1)]));
    }
    let t = delta_contract(n, 2 * k, &factors)?;
    Ok(t.scale(&(S::one() / &S::from_rational(&factorial(k)))))
}

/// `C_ij^k` with the last slot raised.
pub fn cotton_mixed<S: Scalar>(stack: &CurvatureStack<S>) -> Result<Tensor<Jet<S>>> {
    stack.raise(stack.cotton(), 2)
}

/// `ξ^(k)_i = (1/k!) δ C W^{k−1} + (1/(2nk)) ∇_i Pf(W)` evaluated in the stack's
/// dimension without a dimension check.
pub fn xi_formula<S: Scalar>(stack: &CurvatureStack<S>, k: usize) -> Result<Tensor<Jet<S>>> {
    let n = stack.dim();
    let w = stack.weyl_mixed()?;
    let main = xi_contraction(&cotton_mixed(stack)?, &w, k)?;
    let pf = pfaffian(&w, k)?;
    let grad = stack.gradient(&pf)?;
    let coef = constant::<S>(&Rational::new(1.into(), ((2 * n * k) as i64).into()));
    main.try_add(&grad.scale(&coef))
}

/// The conformally invariant one-form `ξ^(k)` of a `2k`-dimensional metric.
pub fn xi<S: Scalar>(stack: &CurvatureStack<S>, k: usize) -> Result<WeightedOneForm<Jet<S>>> {
    let n = stack.dim();
    if n != 2 * k {
        return Err(Error::Dimension { dim: n, requirement: format!("n = 2k = {}", 2 * k) });
    }
    Ok(WeightedOneForm { form: xi_formula(stack, k)?, weight: -(2 * k as i32) })
}

/// `(1/k!) δ_{i i_1…i_2k}^{j j_1…j_2k} A_{j_1 j_2}^{i_1 i_2} ⋯` as a (down, up) tensor.
fn lovelock_mixed<S: Scalar>(a: &Tensor<Jet<S>>, k: usize) -> Result<Tensor<Jet<S>>> {
    check_curvature_like(a)?;
    let n = a.dim();
    let factors: Vec<_> = (0..k)
        .map(|m| {
            let (x, y) = (2 * m + 1, 2 * m + 2);
            BoundFactor::new(a, vec![Upper(x), Upper(y), Lower(x), Lower(y)])
        })
        .collect();
    let t = delta_contract(n, 2 * k + 1, &factors)?;
    Ok(t.scale(&constant(&(Rational::from_integer(1.into()) / factorial(k)))))
}

/// `T^(k)_ij`: the Lovelock-type tensor of `W`, with the second slot lowered.
pub fn t_tensor<S: Scalar>(stack: &CurvatureStack<S>, k: usize) -> Result<Tensor<Jet<S>>> {
    stack.lower(&lovelock_mixed(&stack.weyl_mixed()?, k)?, 1)
}

/// `E^(k)_ij`: the Lovelock tensor of the full curvature, with the second slot lowered.
pub fn lovelock_tensor<S: Scalar>(stack: &CurvatureStack<S>, k: usize) -> Result<Tensor<Jet<S>>> {
    stack.lower(&lovelock_mixed(&stack.riemann_mixed()?, k)?, 1)
}

/// Normalization of `Ω^(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaMode {
    /// Coefficients `4^{k−ℓ} / (ℓ!(k−ℓ))`; requires `n = 2k`.
    CriticalDimension,
    /// Coefficients `4^{k−ℓ} C(k,ℓ) (n−k−ℓ−1)! / (k!(n−2k)!)`; requires `n > 2k`.
    General,
}

fn binomial(n: usize, k: usize) -> Rational {
    factorial(n) / factorial(k) / factorial(n - k)
}

pub fn omega_coefficient(n: usize, k: usize, l: usize, mode: OmegaMode) -> Rational {
    let four = Rational::from_integer((4i64.pow((k - l) as u32)).into());
    match mode {
        OmegaMode::CriticalDimension => four / factorial(l) / Rational::from_integer(((k - l) as i64).into()),
        OmegaMode::General => four * binomial(k, l) * factorial(n - k - l - 1) / factorial(k) / factorial(n - 2 * k),
    }
}

/// `Ω^(k)_ij = Σ_{ℓ<k} a_ℓ δ^{(k+ℓ+1)} W^ℓ P^{k−ℓ}`, second slot lowered.
pub fn omega<S: Scalar>(stack: &CurvatureStack<S>, k: usize, mode: OmegaMode) -> Result<Tensor<Jet<S>>> {
    let n = stack.dim();
    match mode {
        OmegaMode::CriticalDimension if n != 2 * k => {
            return Err(Error::Dimension { dim: n, requirement: format!("n = 2k = {}", 2 * k) })
        }
        OmegaMode::General if n <= 2 * k => {
            return Err(Error::Dimension { dim: n, requirement: format!("n > 2k = {}", 2 * k) })
        }
        _ => {}
    }
    if k == 0 {
        return Err(Error::InvalidArgument("Ω needs k ≥ 1".into()));
    }
    let w = stack.weyl_mixed()?;
    let p = stack.schouten_mixed()?;
    let mut total = Tensor::zeros(n, vec![crate::tensor::Down, crate::tensor::Up]);
    for l in 0..k {
        let p_order = k + l + 1;
        let mut factors = Vec::new();
        let mut pos = 1;
        for _ in 0..l {
            factors.push(BoundFactor::new(&w, vec![Upper(pos), Upper(pos + 1), Lower(pos), Lower(pos + 1)]));
            pos += 2;
        }
        for _ in 0..k - l {
            factors.push(BoundFactor::new(&p, vec![Upper(pos), Lower(pos)]));
            pos += 1;
        }
        let term = delta_contract(n, p_order, &factors)?;
        total = total.try_add(&term.scale(&constant(&omega_coefficient(n, k, l, mode))))?;
    }
    stack.lower(&total, 1)
}
