//! Identity checks. Each function evaluates one family of identities on one
//! sample and pushes named residuals into a [`Collector`].

mod algebra;
mod berger;
mod lemmas;
mod naturality;
mod product;
mod theorems;

pub use algebra::{algebra_checks, fixture_checks, pfaffian_oracle, sphere_from_flat, stack_checks};
pub use berger::berger_checks;
pub use lemmas::{finite_difference_checks, lemma1_checks, lemma_linearization_checks, one_form_rule, rescale_constant};
pub use naturality::{displayed_linearizations, naturality_checks, numerical_rank, rank_check, NaturalityRows};
pub use product::product_checks;
pub use theorems::{ac_checks, invariance_checks, invariant_quantities, pfaffian_checks};

use crate::error::Result;
use crate::geometry::{Context, CurvatureStack};
use crate::scalar::{Jet, Scalar};
use crate::tensor::Tensor;

use super::report::{Residual, Tolerance};

/// Default tolerances, one per family of identities.
pub mod tol {
    pub const INVARIANCE: f64 = 1e-8;
    pub const INVARIANCE_DIM6: f64 = 1e-7;
    pub const PFAFFIAN: f64 = 1e-8;
    pub const DIMENSIONAL: f64 = 1e-7;
    pub const LEMMA: f64 = 1e-7;
    pub const ONE_FORM_RULE: f64 = 1e-8;
    pub const LINEARIZATION: f64 = 1e-8;
    pub const FINITE_DIFFERENCE: f64 = 1e-5;
    pub const TF_WEYL_SQUARE: f64 = 1e-10;
    pub const BACH_DIVERGENCE: f64 = 1e-6;
    pub const FIXTURE: f64 = 1e-9;
    pub const PRODUCT: f64 = 1e-6;
    pub const RANK_THRESHOLD: f64 = 1e-6;
}

/// Tolerance policy: per-check defaults unless overridden.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tolerances {
    pub override_rel: Option<f64>,
}

impl Tolerances {
    pub fn get(&self, default: f64) -> Tolerance {
        Tolerance::relative(self.override_rel.unwrap_or(default))
    }
}

/// A metric together with a conformal factor and an auxiliary one-form.
#[derive(Clone, Debug)]
pub struct Sample<S: Scalar> {
    pub ctx: Context<S>,
    pub upsilon: Jet<S>,
    pub alpha: Tensor<Jet<S>>,
}

impl<S: Scalar> Sample<S> {
    pub fn stacks(&self) -> Result<(CurvatureStack<S>, CurvatureStack<S>)> {
        Ok((self.ctx.build_stack()?, self.ctx.rescale(&self.upsilon)?.build_stack()?))
    }
}

/// Residual of a quantity expected to vanish, measured against `scale`.
pub fn vanishes<S: Scalar>(t: &Tensor<S>, scale: f64) -> Residual {
    Residual { diff: t.max_magnitude(), scale, exact_zero: t.is_zero() }
}

/// Residual of a field expected to vanish identically, over every jet coefficient.
pub fn vanishes_identically<S: Scalar>(t: &Tensor<Jet<S>>, scale: f64) -> Residual {
    let mut diff: f64 = 0.0;
    let mut zero = true;
    for j in t.data() {
        for c in j.coeffs() {
            diff = diff.max(c.magnitude());
            zero &= c.is_zero();
        }
    }
    Residual { diff, scale, exact_zero: zero }
}

fn constant<S: Scalar>(num: i64, den: i64) -> Jet<S> {
    Jet::constant(S::from_ratio(num, den))
}
