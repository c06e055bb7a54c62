use super::{tol, vanishes_identically, Tolerances};
use crate::error::Result;
use crate::geometry::CurvatureStack;
use crate::invariants::{pfaffian, rho, xi, InvariantPolynomial};
use crate::lab::report::{compare, compare_scalars, Collector, Residual};
use crate::models::{flat, round_sphere};
use crate::scalar::{Jet, Scalar};
use crate::tensor::{
    antisymmetric_from_sorted, delta_contract, generalized_delta, hodge_star, sort_sign, BoundFactor, DeltaSlot,
    Down, Tensor, VolumeForm,
};

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

fn diagonal_metric<S: Scalar>(n: usize) -> (Tensor<S>, Tensor<S>) {
    let entries = [(4, 1), (1, 9), (1, 1), (9, 4), (1, 4)];
    let g = Tensor::from_fn(n, vec![Down, Down], |i| {
        if i[0] == i[1] {
            S::from_ratio(entries[i[0]].0, entries[i[0]].1)
        } else {
            S::zero()
        }
    });
    let ginv = Tensor::from_fn(n, vec![crate::tensor::Up, crate::tensor::Up], |i| {
        if i[0] == i[1] {
            S::from_ratio(entries[i[0]].1, entries[i[0]].0)
        } else {
            S::zero()
        }
    });
    (g, ginv)
}

fn distinct_tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    crate::tensor::all_indices(n, m).into_iter().filter(|t| sort_sign(t) != 0).collect()
}

fn delta_oracle(lower: &[usize], upper: &[usize]) -> i64 {
    let (mut a, mut b) = (lower.to_vec(), upper.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return 0;
    }
    (sort_sign(lower) * sort_sign(upper)) as i64
}

/// `ε·ε = k!δ`, `★★ = (−1)^{k(n−k)}` and the full trace of `δ^(p)` in dimensions 2 to 5.
pub fn algebra_checks<S: Scalar>(c: &mut Collector, cfg: &Tolerances) -> Result<()> {
    let t = cfg.get(tol::FIXTURE);
    for n in 2..=5 {
        let (g, ginv) = diagonal_metric::<S>(n);
        let vol = VolumeForm::new(&g, 1)?;
        for k in 0..=n {
            let m = n - k;
            let sums = distinct_tuples(n, k);
            let frees = if m == 0 { vec![Vec::new()] } else { distinct_tuples(n, m) };
            let mut worst = Residual::zero();
            let mut full = vec![0; n];
            let mut full_up = vec![0; n];
            for i in &frees {
                for j in &frees {
                    let mut acc = S::zero();
                    for s in &sums {
                        full[..k].copy_from_slice(s);
                        full[k..].copy_from_slice(i);
                        full_up[..k].copy_from_slice(s);
                        full_up[k..].copy_from_slice(j);
                        acc += &(vol.lower(&full) * &vol.upper(&full_up));
                    }
                    let expected = S::from_i64(factorial(k) * delta_oracle(i, j));
                    worst = worst.worst(compare_scalars(&acc, &expected, &[]));
                }
            }
            c.push(&format!("core_identities.epsilon_contraction.n{n}"), worst, t);

            let alpha = antisymmetric_from_sorted(n, k, |idx| {
                let h: usize = idx.iter().enumerate().map(|(p, &v)| (p + 2) * (v + 3)).sum();
                S::from_ratio((h % 11) as i64 - 5, 1 + k as i64)
            });
            let twice = hodge_star(&hodge_star(&alpha, &ginv, &vol)?, &ginv, &vol)?;
            let sign = if (k * (n - k)) % 2 == 0 { S::one() } else { -S::one() };
            c.push(&format!("core_identities.double_hodge.n{n}"), compare(&twice, &alpha.scale(&sign), &[])?, t);
        }
        for p in 1..=n {
            let expected = S::from_i64(factorial(n) / factorial(n - p));
            let id = Tensor::<S>::identity(n);
            let factors: Vec<_> =
                (0..p).map(|m| BoundFactor::new(&id, vec![DeltaSlot::Upper(m), DeltaSlot::Lower(m)])).collect();
            let traced = delta_contract(n, p, &factors)?;
            let name = format!("core_identities.delta_trace.n{n}");
            c.push(&name, compare_scalars(traced.as_scalar(), &expected, &[]), t);
            if n.pow(2 * p as u32) <= 1 << 16 {
                let d = generalized_delta::<S>(p, n)?;
                let pairs: Vec<(usize, usize)> = (0..p).map(|s| (s, p + s)).collect();
                c.push(&name, compare_scalars(d.contract(&pairs)?.as_scalar(), &expected, &[]), t);
            }
        }
    }
    Ok(())
}

/// `Pf^(2)(Rm)` by an explicit sum against the materialized `δ^(4)`; dimension 4 only.
pub fn pfaffian_oracle<S: Scalar>(stack: &CurvatureStack<S>) -> Result<S> {
    let n = stack.dim();
    let r = stack.riemann_mixed()?.values();
    let d = generalized_delta::<S>(4, n)?;
    let mut acc = S::zero();
    let mut idx = [0usize; 8];
    for lower in crate::tensor::all_indices(n, 4) {
        if sort_sign(&lower) == 0 {
            continue;
        }
        for upper in crate::tensor::all_indices(n, 4) {
            idx[..4].copy_from_slice(&lower);
            idx[4..].copy_from_slice(&upper);
            let dv = d.get(&idx);
            if dv.is_zero() {
                continue;
            }
            let a = r.get(&[upper[0], upper[1], lower[0], lower[1]]).clone();
            let b = r.get(&[upper[2], upper[3], lower[2], lower[3]]).clone();
            acc += &(dv.clone() * &a * &b);
        }
    }
    Ok(acc / S::from_i64(2))
}

/// Flat space and the unit round `S⁴`: `ξ = ρ = 0` as jets, and `Pf^(2)(Rm) = 48` on the sphere.
pub fn fixture_checks<S: Scalar>(c: &mut Collector, cfg: &Tolerances, order: usize) -> Result<()> {
    let t = cfg.get(tol::FIXTURE);
    let phi = InvariantPolynomial::half_trace();
    let origin = vec![S::zero(); 4];
    for (name, ctx) in [("flat", flat::<S>(4, order)?), ("round_s4", round_sphere::<S>(4, &origin, order)?)] {
        let s = ctx.build_stack()?;
        c.push(&format!("core_identities.fixture.{name}.xi"), vanishes_identically(&xi(&s, 2)?.form, 1.0), t);
        c.push(&format!("core_identities.fixture.{name}.rho"), vanishes_identically(&rho(&s, &phi)?.form, 1.0), t);
        c.push(&format!("core_identities.fixture.{name}.weyl"), vanishes_identically(s.weyl(), 1.0), t);
        if name == "round_s4" {
            let pf = pfaffian(&s.riemann_mixed()?.values(), 2)?;
            let oracle = pfaffian_oracle(&s)?;
            c.push("core_identities.fixture.round_s4.pfaffian_oracle", compare_scalars(&pf, &oracle, &[]), t);
            c.push("core_identities.fixture.round_s4.pfaffian_value", compare_scalars(&pf, &S::from_i64(48), &[]), t);
            c.note("core_identities.fixture.round_s4.pfaffian_value", "Pf^(2)(Rm) = 48 on the unit 4-sphere");
        }
    }
    Ok(())
}

/// Algebraic and differential symmetries of a curvature stack.
pub fn stack_checks<S: Scalar>(c: &mut Collector, cfg: &Tolerances, prefix: &str, stack: &CurvatureStack<S>) -> Result<()> {
    for (name, r) in stack.invariant_residuals()? {
        let res = Residual { diff: r, scale: 1.0, exact_zero: r == 0.0 };
        c.push(&format!("{prefix}.{}", name.replace(' ', "_")), res, cfg.get(tol::FIXTURE));
    }
    Ok(())
}

/// Flat `R⁴` rescaled by `Υ = log(2/(1+|x|²))` against the stereographic round sphere.
pub fn sphere_from_flat(c: &mut Collector, cfg: &Tolerances, order: usize) -> Result<()> {
    let n = 4;
    let mut q = Jet::constant_with(n, order, 1.0);
    for v in 0..n {
        let x = Jet::variable(n, order, v, 0.0);
        q += &(x.clone() * &x);
    }
    let series: Vec<f64> =
        (0..=order).map(|r| if r == 0 { 0.0 } else { (if r % 2 == 1 { 1.0 } else { -1.0 }) / r as f64 }).collect();
    let upsilon = Jet::constant(std::f64::consts::LN_2) - q.compose_series(&series);
    let hat = flat::<f64>(n, order)?.rescale(&upsilon)?.build_stack()?;
    let sphere = round_sphere::<f64>(n, &[0.0; 4], order)?.build_stack()?;
    let t = cfg.get(tol::FIXTURE);
    let name = "core_identities.rescale.sphere_from_flat";
    c.push(name, compare(&hat.riemann_down().values(), &sphere.riemann_down().values(), &[])?, t);
    c.push(name, compare(&hat.ricci().values(), &sphere.ricci().values(), &[])?, t);
    c.push(name, compare(&hat.metric().values(), &sphere.metric().values(), &[])?, t);
    c.push(name, compare_scalars(hat.scalar_curvature().value(), sphere.scalar_curvature().value(), &[]), t);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn algebra_is_exact_over_rationals() {
        let mut c = Collector::new();
        algebra_checks::<Rational>(&mut c, &Tolerances::default()).unwrap();
        let checks = c.finish(true);
        assert_eq!(checks.len(), 12);
        assert!(checks.iter().all(|k| k.pass), "{checks:#?}");
    }

    #[test]
    fn sphere_pfaffian_oracle() {
        let s = round_sphere::<Rational>(4, &vec![Rational::from_i64(0); 4], 3).unwrap().build_stack().unwrap();
        assert_eq!(pfaffian_oracle(&s).unwrap(), Rational::from_i64(48));
    }
}
