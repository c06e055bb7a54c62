use super::{constant, tol, vanishes, Tolerances};
use crate::error::Result;
use crate::geometry::{Context, CurvatureStack};
use crate::invariants::{cotton_mixed, InvariantPolynomial};
use crate::lab::linearize::{linearize_fd, Linearizer, Quantity, FD_STEP};
use crate::lab::report::{compare, Collector};
use crate::scalar::{Jet, Scalar};
use crate::tensor::Tensor;

/// `2∇_[i P_j]k = C_ijk`, `∇^s W_ijsk = (n−3) C_ijk` and
/// `∇_[i W_jk]^lm = −2 C_[ij^[l δ_k]^m]`.
pub fn lemma1_checks<S: Scalar>(c: &mut Collector, cfg: &Tolerances, s: &CurvatureStack<S>) -> Result<()> {
    let n = s.dim();
    let t = cfg.get(tol::LEMMA);
    let cotton = s.cotton().values();

    let dp = s.nabla(s.schouten())?.values();
    let skew = dp.try_sub(&dp.permute(&[1, 0, 2])?)?;
    c.push("lemmas.cotton_schouten", compare(&skew, &cotton, &[&dp])?, t);

    let div_w = s.divergence(s.weyl(), 2)?.values();
    let rhs = cotton.scale(&S::from_i64(n as i64 - 3));
    c.push("lemmas.weyl_divergence", compare(&div_w, &rhs, &[])?, t);

    let dw = s.nabla(&s.weyl_mixed()?)?.values();
    let lhs = dw.antisymmetrize(&[0, 1, 2])?;
    let delta = Tensor::<S>::identity(n);
    let cd = cotton_mixed(s)?.values().outer(&delta)?.permute(&[0, 1, 3, 2, 4])?;
    let rhs = cd.antisymmetrize(&[0, 1, 2])?.antisymmetrize(&[3, 4])?.scale(&S::from_i64(-2));
    c.push("lemmas.weyl_bianchi", compare(&lhs, &rhs, &[&dw])?, t);
    Ok(())
}

/// Conformal linearization of `W`, `C`, scalar gradients and divergences.
pub fn lemma_linearization_checks<S: Scalar>(
    c: &mut Collector,
    cfg: &Tolerances,
    ctx: &Context<S>,
    upsilon: &Jet<S>,
) -> Result<()> {
    let s = ctx.build_stack()?;
    let n = s.dim();
    let t = cfg.get(tol::LINEARIZATION);
    let lin = Linearizer::new(ctx, upsilon)?;
    let du = s.gradient(upsilon)?;
    let du_up = s.raise(&du, 0)?;

    let dw = lin.at_point(&Quantity::Weyl, 2)?.value;
    c.push("lemmas.linearized_weyl", vanishes(&dw, lin.unweighted_size(&Quantity::Weyl)?), t);

    let dc = lin.at_point(&Quantity::Cotton, 0)?.value;
    let rhs = s.raise(s.weyl(), 2)?.contract_with(&du, &[(2, 0)])?.values();
    c.push("lemmas.linearized_cotton", compare(&dc, &rhs, &[])?, t);

    for (f, grad, w) in [
        (Quantity::PfaffianWeyl(2), Quantity::GradPfaffianWeyl(2), -4),
        (Quantity::J, Quantity::GradJ, -2),
    ] {
        let lhs = lin.at_point(&grad, w)?.value;
        let df = lin.field(&f, w)?;
        let fv = f.evaluate(&s)?.as_scalar().clone();
        let first = du.scale(&(fv * &Jet::constant(S::from_i64(w as i64)))).values();
        let second = s.gradient(df.as_scalar())?.values();
        let rhs = first.try_add(&second)?;
        c.push(&format!("lemmas.linearized_gradient.{}", f.name()), compare(&lhs, &rhs, &[&first, &second])?, t);
    }

    let phi = InvariantPolynomial::half_trace();
    for (alpha, div, w, p) in [
        (Quantity::StarP(phi.clone()), Quantity::DivStarP(phi), 0i64, 4i64),
        (Quantity::GradJ, Quantity::LaplacianJ, -2, 1),
    ] {
        let lhs = lin.at_point(&div, (w - 2) as i32)?.value;
        let a = alpha.evaluate(&s)?;
        let first = du_up.contract_with(&a, &[(0, 0)])?.scale(&constant(n as i64 + w - 2 * p, 1)).values();
        let second = s.divergence(&lin.field(&alpha, w as i32)?, 0)?.values();
        let rhs = first.try_add(&second)?;
        c.push(&format!("lemmas.linearized_divergence.{}", alpha.name()), compare(&lhs, &rhs, &[&first, &second])?, t);
    }

    // linearity in Υ
    let half = upsilon.map(|x| x.clone() * &S::from_ratio(1, 2));
    let d_half = Linearizer::new(ctx, &half)?.at_point(&Quantity::Cotton, 0)?.value;
    c.push("lemmas.linearity", compare(&d_half.scale(&S::from_i64(2)), &dc, &[])?, t);
    let other = upsilon.clone() * upsilon;
    let d_sum = Linearizer::new(ctx, &(upsilon.clone() + &other))?.at_point(&Quantity::Cotton, 0)?.value;
    let d_other = Linearizer::new(ctx, &other)?.at_point(&Quantity::Cotton, 0)?.value;
    c.push("lemmas.linearity", compare(&d_sum, &dc.try_add(&d_other)?, &[&dc, &d_other])?, t);

    constant_factor_checks(c, cfg, ctx, upsilon.value())
}

/// `D_g Q(c) = 0` for constant `c` and every correctly weighted invariant.
fn constant_factor_checks<S: Scalar>(c: &mut Collector, cfg: &Tolerances, ctx: &Context<S>, value: &S) -> Result<()> {
    let n = ctx.dim();
    let k = constant_like(ctx, value);
    let lin = Linearizer::new(ctx, &k)?;
    let mut quantities = vec![Quantity::Weyl, Quantity::Cotton];
    if n.is_multiple_of(2) && n <= 6 {
        quantities.push(Quantity::Xi(n / 2));
    }
    if n == 4 {
        quantities.push(Quantity::Bach);
    }
    if n != 8 {
        quantities.push(Quantity::StarRho(InvariantPolynomial::half_trace()));
    }
    for q in quantities {
        let d = lin.at_point(&q, q.weight())?.value;
        c.push(&format!("lemmas.constant_factor.{}", q.name()), vanishes(&d, lin.unweighted_size(&q)?), cfg.get(tol::LINEARIZATION));
    }
    Ok(())
}

fn constant_like<S: Scalar>(ctx: &Context<S>, value: &S) -> Jet<S> {
    let v = if value.is_zero() { S::from_ratio(3, 8) } else { value.clone() };
    match ctx.jet_order() {
        Some(order) => Jet::constant_with(ctx.vars(), order, v),
        None => Jet::constant(v),
    }
}

/// `∇̂_i α_j = ∇_i α_j − Υ_i α_j − α_i Υ_j + Υ^s α_s g_ij` under a finite rescaling.
pub fn one_form_rule<S: Scalar>(
    c: &mut Collector,
    cfg: &Tolerances,
    base: &CurvatureStack<S>,
    hat: &CurvatureStack<S>,
    upsilon: &Jet<S>,
    alpha: &Tensor<Jet<S>>,
) -> Result<()> {
    let lhs = hat.nabla(alpha)?.values();
    let na = base.nabla(alpha)?;
    let du = base.gradient(upsilon)?;
    let cross = du.outer(alpha)?.try_add(&alpha.outer(&du)?)?;
    let pairing = base.raise(&du, 0)?.contract_with(alpha, &[(0, 0)])?.as_scalar().clone();
    let rhs = na.try_sub(&cross)?.try_add(&base.metric().scale(&pairing))?.values();
    c.push("lemmas.one_form_rule", compare(&lhs, &rhs, &[&na.values(), &cross.values()])?, cfg.get(tol::ONE_FORM_RULE));
    Ok(())
}

/// Constant rescaling `ĝ = e^{2c} g`: `Rm` and `W` (all down) scale by `e^{2c}`,
/// the scalar curvature by `e^{−2c}`; `Υ = 0` changes nothing.
pub fn rescale_constant(c: &mut Collector, cfg: &Tolerances, ctx: &Context<f64>) -> Result<()> {
    let t = cfg.get(tol::FIXTURE);
    let s = ctx.build_stack()?;
    let k = 0.3;
    let hat = ctx.rescale(&constant_like(ctx, &k))?.build_stack()?;
    let up = (2.0 * k).exp();
    c.push("lemmas.rescale_constant", compare(&hat.riemann_down().values(), &s.riemann_down().values().scale(&up), &[])?, t);
    c.push("lemmas.rescale_constant", compare(&hat.weyl().values(), &s.weyl().values().scale(&up), &[])?, t);
    let r = Tensor::scalar(s.dim(), s.scalar_curvature().value() / up);
    c.push("lemmas.rescale_constant", compare(&Tensor::scalar(s.dim(), *hat.scalar_curvature().value()), &r, &[])?, t);

    let zero = constant_like(ctx, &0.0).map(|_| 0.0);
    let same = ctx.rescale(&zero)?.build_stack()?;
    c.push("lemmas.rescale_identity", compare(&same.riemann_down().values(), &s.riemann_down().values(), &[])?, t);
    Ok(())
}

/// Jet-exact against central-difference linearizations.
pub fn finite_difference_checks(c: &mut Collector, cfg: &Tolerances, ctx: &Context<f64>, upsilon: &Jet<f64>) -> Result<()> {
    let lin = Linearizer::new(ctx, upsilon)?;
    let mut quantities = vec![Quantity::Weyl, Quantity::Cotton];
    if ctx.dim() == 4 {
        quantities.extend([Quantity::Xi(2), Quantity::Bach]);
    }
    for q in quantities {
        let w = q.weight();
        let exact = lin.at_point(&q, w)?.value;
        let fd = linearize_fd(ctx, &q, upsilon, w, FD_STEP)?.value;
        let r = compare(&exact, &fd, &[])?.widen(lin.unweighted_size(&q)?);
        c.push(&format!("lemmas.finite_difference.{}", q.name()), r, cfg.get(tol::FINITE_DIFFERENCE));
    }
    Ok(())
}
