use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Context, CurvatureStack};
use crate::invariants::{
    phi_wc, pfaffian, rho, star_p, star_rho, t_tensor, xi, InvariantPolynomial,
};
use crate::scalar::{Dual, Jet, Scalar};
use crate::tensor::Tensor;

/// Natural tensors the lab can rescale and linearize.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    /// `W_ijkl`, all indices down.
    Weyl,
    /// `C_ijk`, all indices down.
    Cotton,
    Schouten,
    J,
    Bach,
    Xi(usize),
    Rho(InvariantPolynomial),
    StarRho(InvariantPolynomial),
    PhiWC(InvariantPolynomial),
    StarP(InvariantPolynomial),
    /// `∇^i (Φ W^k)_{i…}`.
    DivStarP(InvariantPolynomial),
    PfaffianWeyl(usize),
    GradPfaffianWeyl(usize),
    GradJ,
    /// `∇^i ∇_i J`.
    LaplacianJ,
    /// `W_isjt P^st`.
    WeylSchouten,
    /// `tf(P_i^s P_sj)`.
    TfSchoutenSquare,
    /// `tf(J P_ij)`.
    TfJSchouten,
    /// `tf ∇²_ij J`.
    TfHessianJ,
    TfT(usize),
    /// `∇^j (tf T^(k))_ij`.
    DivTfT(usize),
}

impl Quantity {
    /// Conformal weight `w` with `D_g` as in `e^{−wtΥ} Q(e^{2tΥ} g)`.
    pub fn weight(&self) -> i32 {
        match self {
            Quantity::Weyl => 2,
            Quantity::Cotton | Quantity::Schouten | Quantity::StarP(_) => 0,
            Quantity::J
            | Quantity::Bach
            | Quantity::StarRho(_)
            | Quantity::PhiWC(_)
            | Quantity::DivStarP(_)
            | Quantity::GradJ
            | Quantity::WeylSchouten
            | Quantity::TfSchoutenSquare
            | Quantity::TfJSchouten
            | Quantity::TfHessianJ => -2,
            Quantity::LaplacianJ => -4,
            Quantity::Xi(k) | Quantity::PfaffianWeyl(k) | Quantity::GradPfaffianWeyl(k) | Quantity::DivTfT(k) => {
                -2 * *k as i32
            }
            Quantity::Rho(phi) => -2 * phi.degree() as i32,
            Quantity::TfT(k) => 2 - 2 * *k as i32,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Quantity::Weyl => "weyl".into(),
            Quantity::Cotton => "cotton".into(),
            Quantity::Schouten => "schouten".into(),
            Quantity::J => "j".into(),
            Quantity::Bach => "bach".into(),
            Quantity::Xi(k) => format!("xi{k}"),
            Quantity::Rho(p) => format!("rho_deg{}", p.degree()),
            Quantity::StarRho(p) => format!("star_rho_deg{}", p.degree()),
            Quantity::PhiWC(p) => format!("phi_wc_deg{}", p.degree()),
            Quantity::StarP(p) => format!("star_p_deg{}", p.degree()),
            Quantity::DivStarP(p) => format!("div_star_p_deg{}", p.degree()),
            Quantity::PfaffianWeyl(k) => format!("pfaffian{k}_weyl"),
            Quantity::GradPfaffianWeyl(k) => format!("grad_pfaffian{k}_weyl"),
            Quantity::GradJ => "grad_j".into(),
            Quantity::LaplacianJ => "laplacian_j".into(),
            Quantity::WeylSchouten => "weyl_schouten".into(),
            Quantity::TfSchoutenSquare => "tf_schouten_square".into(),
            Quantity::TfJSchouten => "tf_j_schouten".into(),
            Quantity::TfHessianJ => "tf_hessian_j".into(),
            Quantity::TfT(k) => format!("tf_t{k}"),
            Quantity::DivTfT(k) => format!("div_tf_t{k}"),
        }
    }

    pub fn evaluate<T: Scalar>(&self, s: &CurvatureStack<T>) -> Result<Tensor<Jet<T>>> {
        let n = s.dim();
        let scalar = |j: Jet<T>| Tensor::scalar(n, j);
        Ok(match self {
            Quantity::Weyl => s.weyl().clone(),
            Quantity::Cotton => s.cotton().clone(),
            Quantity::Schouten => s.schouten().clone(),
            Quantity::J => scalar(s.j().clone()),
            Quantity::Bach => s.bach()?.clone(),
            Quantity::Xi(k) => xi(s, *k)?.form,
            Quantity::Rho(p) => rho(s, p)?.form,
            Quantity::StarRho(p) => star_rho(s, p)?,
            Quantity::PhiWC(p) => phi_wc(s, p)?,
            Quantity::StarP(p) => star_p(s, p)?,
            Quantity::DivStarP(p) => s.divergence(&star_p(s, p)?, 0)?,
            Quantity::PfaffianWeyl(k) => scalar(pfaffian(&s.weyl_mixed()?, *k)?),
            Quantity::GradPfaffianWeyl(k) => s.gradient(&pfaffian(&s.weyl_mixed()?, *k)?)?,
            Quantity::GradJ => s.gradient(s.j())?,
            Quantity::LaplacianJ => s.divergence(&s.gradient(s.j())?, 0)?,
            Quantity::WeylSchouten => weyl_schouten(s)?,
            Quantity::TfSchoutenSquare => s.trace_free(&schouten_square(s)?)?,
            Quantity::TfJSchouten => s.trace_free(&s.schouten().scale(s.j()))?,
            Quantity::TfHessianJ => s.trace_free(&s.nabla(&s.gradient(s.j())?)?)?,
            Quantity::TfT(k) => s.trace_free(&t_tensor(s, *k)?)?,
            Quantity::DivTfT(k) => s.divergence(&s.trace_free(&t_tensor(s, *k)?)?, 1)?,
        })
    }
}

/// `W_isjt P^st`.
pub fn weyl_schouten<T: Scalar>(s: &CurvatureStack<T>) -> Result<Tensor<Jet<T>>> {
    let p_up = s.raise_all(s.schouten())?;
    s.weyl().contract_with(&p_up, &[(1, 0), (3, 1)])
}

/// `P_i^s P_sj`.
pub fn schouten_square<T: Scalar>(s: &CurvatureStack<T>) -> Result<Tensor<Jet<T>>> {
    s.schouten_mixed()?.contract_with(s.schouten(), &[(1, 0)])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    JetExact,
    FiniteDifference,
}

/// `D_g Q(Υ)` at the base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Linearization<S: Scalar> {
    pub value: Tensor<S>,
    pub method: Method,
}

fn not_representable<S: Scalar>(quantity: &str) -> Error {
    Error::NotRepresentable { quantity: quantity.into(), kind: S::KIND.name() }
}

/// `e^{c·x}` for a base-point value, failing when the kind has no such element.
pub fn exp_scaled<S: Scalar>(x: &S, c: i64, quantity: &str) -> Result<S> {
    x.scale_i64(c).exp().ok_or_else(|| not_representable::<S>(quantity))
}

/// The curvature stack of `e^{2tΥ} g` over dual numbers in `t`, shared by every
/// quantity linearized at the same `(g, Υ)`.
pub struct Linearizer<S: Scalar> {
    stack: CurvatureStack<Dual<S>>,
    upsilon_t: Jet<Dual<S>>,
}

impl<S: Scalar> Linearizer<S> {
    pub fn new(ctx: &Context<S>, upsilon: &Jet<S>) -> Result<Self> {
        let lifted = ctx.lift(|x: &S| Dual::real(x.clone()));
        let upsilon_t = upsilon.map(|c| Dual::new(S::zero(), c.clone()));
        let stack = lifted.rescale(&upsilon_t)?.build_stack()?;
        Ok(Linearizer { stack, upsilon_t })
    }

    /// `D_g Q(Υ)` as a field of jets, for quantities whose linearization is differentiated further.
    pub fn field(&self, q: &Quantity, w: i32) -> Result<Tensor<Jet<S>>> {
        let value = q.evaluate(&self.stack)?;
        let weight = self
            .upsilon_t
            .scale_i64(-(w as i64))
            .exp()
            .ok_or_else(|| not_representable::<S>("e^{-wtΥ}"))?;
        Ok(value.scale(&weight).map(|j| j.map(|d| d.eps.clone())))
    }

    pub fn at_point(&self, q: &Quantity, w: i32) -> Result<Linearization<S>> {
        Ok(Linearization { value: self.field(q, w)?.values(), method: Method::JetExact })
    }

    /// `|∂_t Q(e^{2tΥ} g)|` without the weight correction: the size of what the
    /// weight has to cancel, used as a residual scale.
    pub fn unweighted_size(&self, q: &Quantity) -> Result<f64> {
        Ok(self.field(q, 0)?.values().max_magnitude())
    }
}

pub fn linearize_field<S: Scalar>(ctx: &Context<S>, q: &Quantity, upsilon: &Jet<S>, w: i32) -> Result<Tensor<Jet<S>>> {
    Linearizer::new(ctx, upsilon)?.field(q, w)
}

pub fn linearize<S: Scalar>(ctx: &Context<S>, q: &Quantity, upsilon: &Jet<S>, w: i32) -> Result<Linearization<S>> {
    Linearizer::new(ctx, upsilon)?.at_point(q, w)
}

/// Default step of the central finite difference.
pub const FD_STEP: f64 = 1e-4;

/// Central difference of `t ↦ e^{−wtΥ} Q(e^{2tΥ} g)` at `t = 0`.
pub fn linearize_fd(ctx: &Context<f64>, q: &Quantity, upsilon: &Jet<f64>, w: i32, h: f64) -> Result<Linearization<f64>> {
    let eval = |t: f64| -> Result<Tensor<f64>> {
        let u = upsilon.map(|c| c * t);
        let stack = ctx.rescale(&u)?.build_stack()?;
        let factor = (-(w as f64) * t * upsilon.value()).exp();
        Ok(q.evaluate(&stack)?.values().scale(&factor))
    };
    let d = eval(h)?.try_sub(&eval(-h)?)?.scale(&(0.5 / h));
    Ok(Linearization { value: d, method: Method::FiniteDifference })
}
