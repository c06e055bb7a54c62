use super::{constant, tol, vanishes, Tolerances};
use crate::error::Result;
use crate::geometry::CurvatureStack;
use crate::invariants::{
    lovelock_tensor, omega, pfaffian, t_tensor, xi_contraction, xi_formula, cotton_mixed, InvariantPolynomial,
    OmegaMode,
};
use crate::lab::linearize::{exp_scaled, Quantity};
use crate::lab::report::{compare, compare_scalars, Collector};
use crate::scalar::{Jet, Scalar};

/// The conformally invariant quantities defined in dimension `n`, each with its tolerance.
pub fn invariant_quantities(n: usize) -> Vec<(Quantity, f64)> {
    let phi = InvariantPolynomial::half_trace();
    let mut out = Vec::new();
    if n.is_multiple_of(2) && n <= 6 {
        out.push((Quantity::Xi(n / 2), tol::INVARIANCE));
    }
    if n == 4 {
        out.push((Quantity::Rho(phi.clone()), tol::INVARIANCE));
        out.push((Quantity::Bach, tol::INVARIANCE));
    }
    if n >= 3 && n != 8 {
        let t = if n == 4 { tol::INVARIANCE } else { tol::INVARIANCE_DIM6 };
        out.push((Quantity::StarRho(phi), t));
    }
    out
}

/// `e^{−wΥ} Q(ĝ) = Q(g)` at the base point.
pub fn invariance_checks<S: Scalar>(
    c: &mut Collector,
    cfg: &Tolerances,
    base: &CurvatureStack<S>,
    hat: &CurvatureStack<S>,
    upsilon: &Jet<S>,
    quantities: &[(Quantity, f64)],
) -> Result<()> {
    let n = base.dim();
    for (q, t) in quantities {
        let w = q.weight();
        let a = q.evaluate(base)?.values();
        let b = q.evaluate(hat)?.values();
        let f = exp_scaled(upsilon.value(), -(w as i64), "e^{-wΥ}")?;
        c.push(&format!("thm_invariance.{}.n{n}", q.name()), compare(&b.scale(&f), &a, &[])?, cfg.get(*t));
    }
    Ok(())
}

/// `trΩ = Pf(Rm) − Pf(W)`, `∇^jΩ_ij = (2k/k!) δ C W^{k−1}` and
/// `2kξ = ∇^j(tf Ω)_ij + (1/2k) ∇ Pf(Rm)` in dimension `n = 2k`.
pub fn pfaffian_checks<S: Scalar>(
    c: &mut Collector,
    cfg: &Tolerances,
    prefix: &str,
    s: &CurvatureStack<S>,
) -> Result<()> {
    let n = s.dim();
    let k = n / 2;
    let t = cfg.get(tol::PFAFFIAN);
    let om = omega(s, k, OmegaMode::CriticalDimension)?;
    let pf_rm = pfaffian(&s.riemann_mixed()?, k)?;
    let pf_w = pfaffian(&s.weyl_mixed()?, k)?;
    let tr = s.trace(&om)?;
    let rhs = pf_rm.clone() - &pf_w;
    c.push(&format!("{prefix}.omega_trace"), compare_scalars(tr.value(), rhs.value(), &[pf_rm.value(), pf_w.value()]), t);

    let omv = om.values();
    c.push(&format!("{prefix}.omega_symmetric"), compare(&omv, &omv.permute(&[1, 0])?, &[])?, t);

    let div = s.divergence(&om, 1)?;
    let contraction = xi_contraction(&cotton_mixed(s)?, &s.weyl_mixed()?, k)?;
    let rhs = contraction.scale(&constant(2 * k as i64, 1));
    c.push(&format!("{prefix}.omega_divergence"), compare(&div.values(), &rhs.values(), &[])?, t);

    let lhs = xi_formula(s, k)?.scale(&constant(2 * k as i64, 1));
    let div_tf = s.divergence(&s.trace_free(&om)?, 1)?;
    let grad = s.gradient(&pf_rm)?.scale(&constant(1, 2 * k as i64));
    let rhs = div_tf.try_add(&grad)?;
    c.push(
        &format!("{prefix}.decomposition"),
        compare(&lhs.values(), &rhs.values(), &[&div_tf.values(), &grad.values()])?,
        t,
    );
    Ok(())
}

/// The dimensional identities for `n > 2k`, including the transformation law
/// of `∇·tf T^(k)` under `ĝ = e^{2Υ} g`.
pub fn ac_checks<S: Scalar>(
    c: &mut Collector,
    cfg: &Tolerances,
    s: &CurvatureStack<S>,
    hat: &CurvatureStack<S>,
    upsilon: &Jet<S>,
    k: usize,
) -> Result<()> {
    let n = s.dim();
    let t = cfg.get(tol::DIMENSIONAL);
    let m = (n - 2 * k) as i64;
    let name = |x: &str| format!("ac_identities.{x}.n{n}k{k}");

    let tt = t_tensor(s, k)?;
    let tf_t = s.trace_free(&tt)?;
    let div_t = s.divergence(&tf_t, 1)?;
    let xi_f = xi_formula(s, k)?;
    let rhs = xi_f.scale(&constant(-2 * k as i64 * m, 1));
    c.push(&name("divergence"), compare(&div_t.values(), &rhs.values(), &[])?, t);

    let e = lovelock_tensor(s, k)?;
    let om = omega(s, k, OmegaMode::General)?;
    let split = tt.try_add(&om.scale(&constant(m, 1)))?;
    c.push(&name("einstein_split"), compare(&e.values(), &split.values(), &[&tt.values()])?, t);

    let pf_rm = pfaffian(&s.riemann_mixed()?, k)?;
    let tr_e = s.trace(&e)?;
    c.push(
        &name("einstein_trace"),
        compare_scalars(tr_e.value(), &(pf_rm.value().clone() * &S::from_i64(m)), &[]),
        t,
    );

    let div_e = s.divergence(&e, 1)?.values();
    let scale = s.nabla(&e)?.values().max_magnitude();
    c.push(&name("einstein_divergence"), vanishes(&div_e, scale), t);

    let div_tf_om = s.divergence(&s.trace_free(&om)?, 1)?;
    let lhs = s.gradient(&pf_rm)?.scale(&constant(-m, n as i64));
    let rhs = div_t.try_add(&div_tf_om.scale(&constant(m, 1)))?;
    c.push(&name("pfaffian_gradient"), compare(&lhs.values(), &rhs.values(), &[&div_t.values()])?, t);

    // e^{2kΥ} ∇̂^j(tf T̂)_ij = ∇^j(tf T)_ij + (n−2k) Υ^j (tf T)_ij
    let e2k = exp_scaled(upsilon.value(), 2 * k as i64, "e^{2kΥ}")?;
    let div_hat = hat.divergence(&hat.trace_free(&t_tensor(hat, k)?)?, 1)?.values().scale(&e2k);
    let du_up = s.raise(&s.gradient(upsilon)?, 0)?;
    let contracted = tf_t.contract_with(&du_up, &[(1, 0)])?;
    let rhs = div_t.try_add(&contracted.scale(&constant(m, 1)))?;
    c.push(&name("conformal"), compare(&div_hat, &rhs.values(), &[&div_t.values()])?, t);

    // combined: e^{2kΥ} ξ̂ = ξ − (1/2k) Υ^j (tf T)_ij
    let xi_hat = xi_formula(hat, k)?.values().scale(&e2k);
    let rhs = xi_f.try_sub(&contracted.scale(&constant(1, 2 * k as i64)))?;
    c.push(&name("xi_transformation"), compare(&xi_hat, &rhs.values(), &[&xi_f.values()])?, t);
    Ok(())
}
