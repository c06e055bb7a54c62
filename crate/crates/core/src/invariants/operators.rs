use crate::error::{Error, Result};
use crate::geometry::{Context, CurvatureStack};
use crate::scalar::{Jet, Scalar};
use crate::tensor::{Down, Tensor, Up};

/// Conformal Killing operator `K(α)_ij = 2∇_(i α_j) − (2/n)(∇^k α_k) g_ij`.
pub fn conformal_killing<S: Scalar>(stack: &CurvatureStack<S>, alpha: &Tensor<Jet<S>>) -> Result<Tensor<Jet<S>>> {
    if alpha.valence() != [Down] {
        return Err(Error::VarianceMismatch("K acts on one-forms".into()));
    }
    let d = stack.nabla(alpha)?;
    let sym = d.try_add(&d.permute(&[1, 0])?)?;
    let div = stack.trace(&d)?;
    let coef = Jet::constant(S::from_ratio(2, stack.dim() as i64));
    sym.try_sub(&stack.metric().scale(&(div * &coef)))
}

/// Formal adjoint `K*(A)_i = −2∇^k A_ki` on symmetric trace-free tensors.
pub fn conformal_killing_adjoint<S: Scalar>(stack: &CurvatureStack<S>, a: &Tensor<Jet<S>>) -> Result<Tensor<Jet<S>>> {
    if a.valence() != [Down, Down] {
        return Err(Error::VarianceMismatch("K* acts on (0,2)-tensors".into()));
    }
    Ok(stack.divergence(a, 0)?.scale(&Jet::constant(S::from_i64(-2))))
}

/// `ω_i X^i` on a homogeneous context, where both are constant in the frame.
pub fn functional_density<S: Scalar>(ctx: &Context<S>, omega: &Tensor<S>, x: &Tensor<S>) -> Result<S> {
    if !ctx.is_homogeneous() {
        return Err(Error::NotHomogeneous(format!("{} has position-dependent components", ctx.label())));
    }
    if omega.valence() != [Down] || x.valence() != [Up] || omega.dim() != ctx.dim() || x.dim() != ctx.dim() {
        return Err(Error::ShapeMismatch("density pairs a one-form with a vector".into()));
    }
    Ok(omega.contract_with(x, &[(0, 0)])?.as_scalar().clone())
}
