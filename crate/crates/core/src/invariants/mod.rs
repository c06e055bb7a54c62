//! Natural conformal invariants built from the curvature stack.

mod lovelock;
mod operators;
mod phi;
mod pontryagin;

pub use lovelock::{
    cotton_mixed, lovelock_tensor, omega, omega_coefficient, pfaffian, t_tensor, xi, xi_contraction, xi_formula,
    OmegaMode,
};
pub use operators::{conformal_killing, conformal_killing_adjoint, functional_density};
pub use phi::{InvariantPolynomial, Matrix, PhiSpec, PhiTerm};
pub use pontryagin::{
    phi_wc, phi_wc_at, pontryagin_function, rho, star_p, star_p_at, star_rho, CurvatureMatrices,
};

use crate::scalar::{Jet, Scalar};
use crate::tensor::Tensor;

/// A one-form together with its conformal weight `w`: under `ĝ = e^{2Υ} g`
/// an invariant one-form satisfies `ω̂ = e^{wΥ} ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedOneForm<T: Scalar> {
    pub form: Tensor<T>,
    pub weight: i32,
}

impl<S: Scalar> WeightedOneForm<Jet<S>> {
    pub fn values(&self) -> WeightedOneForm<S> {
        WeightedOneForm { form: self.form.values(), weight: self.weight }
    }
}
