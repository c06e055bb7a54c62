use conformal_core::models::{berger_cp2, berger_product, berger_sweep, fubini_study, random_chart, round_sphere};
use conformal_core::scalar::{Rational, Scalar};
use conformal_core::tensor::{all_indices, Down, Tensor};
use conformal_core::StackF64;
use proptest::prelude::*;

const CHART_TOL: f64 = 1e-10;

fn relative(diff: &Tensor<f64>, scale: &Tensor<f64>) -> f64 {
    diff.max_magnitude() / scale.max_magnitude().max(1.0)
}

fn chart(n: usize, seed: u64) -> StackF64 {
    random_chart(n, seed, 0, 3).unwrap().build_stack().unwrap()
}

/// `P_ik g_jl − P_il g_jk + P_jl g_ik − P_jk g_il`.
fn kulkarni_nomizu(p: &Tensor<f64>, g: &Tensor<f64>) -> Tensor<f64> {
    Tensor::from_fn(p.dim(), vec![Down; 4], |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        p.get(&[i, k]) * g.get(&[j, l]) - p.get(&[i, l]) * g.get(&[j, k]) + p.get(&[j, l]) * g.get(&[i, k])
            - p.get(&[j, k]) * g.get(&[i, l])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_stacks_satisfy_curvature_symmetries(n in 3usize..=5, seed in any::<u64>()) {
        for (name, r) in chart(n, seed).invariant_residuals().unwrap() {
            prop_assert!(r <= CHART_TOL, "{} at {:e}", name, r);
        }
    }

    #[test]
    fn riemann_splits_into_weyl_and_schouten(n in 3usize..=5, seed in any::<u64>()) {
        let s = chart(n, seed);
        let rm = s.riemann_down().values();
        let rebuilt = s.weyl().values().try_add(&kulkarni_nomizu(&s.schouten().values(), &s.metric().values())).unwrap();
        prop_assert!(relative(&rm.try_sub(&rebuilt).unwrap(), &rm) <= CHART_TOL);
    }

    #[test]
    fn cotton_is_the_exterior_derivative_of_schouten(n in 3usize..=5, seed in any::<u64>()) {
        let s = chart(n, seed);
        let dp = s.nabla(s.schouten()).unwrap().values();
        let expected = dp.try_sub(&dp.permute(&[1, 0, 2]).unwrap()).unwrap();
        let c = s.cotton().values();
        prop_assert!(relative(&c.try_sub(&expected).unwrap(), &expected) <= CHART_TOL);
    }

    #[test]
    fn weyl_divergence_is_a_multiple_of_cotton(n in 4usize..=5, seed in any::<u64>()) {
        let s = chart(n, seed);
        // ∇^p W_{ijpq}
        let div = s.divergence(s.weyl(), 2).unwrap().values();
        let expected = s.cotton().values().scale(&((n - 3) as f64));
        prop_assert!(relative(&div.try_sub(&expected).unwrap(), &expected) <= 1e-9);
    }

    #[test]
    fn round_sphere_is_conformally_flat(x in prop::collection::vec(-0.8f64..0.8, 4)) {
        let s = round_sphere(4, &x, 3).unwrap().build_stack().unwrap();
        prop_assert!(s.weyl().values().max_magnitude() <= 1e-9);
        let g = s.metric().values();
        let p = s.schouten().values();
        prop_assert!(relative(&p.try_sub(&g.scale(&0.5)).unwrap(), &g) <= 1e-9);
    }

    #[test]
    fn fubini_study_is_einstein(x in prop::collection::vec(-0.8f64..0.8, 4)) {
        let s = fubini_study(&x, 3).unwrap().build_stack().unwrap();
        let ric = s.ricci().values();
        let tf = s.trace_free(s.ricci()).unwrap().values();
        prop_assert!(relative(&tf, &ric) <= 1e-8);
        prop_assert!(s.weyl().values().max_magnitude() > 1e-3);
    }
}

#[test]
fn berger_stacks_are_exact() {
    for t in berger_sweep() {
        let s = berger_product(&t).unwrap().build_stack().unwrap();
        for (name, r) in s.invariant_residuals().unwrap() {
            assert_eq!(r, 0.0, "{name} at t = {t}");
        }
        let div = s.divergence(s.weyl(), 2).unwrap().values();
        assert_eq!(div, s.cotton().values(), "t = {t}");
    }
}

#[test]
fn berger_structure_constants_satisfy_jacobi() {
    let ctx = berger_product(&Rational::from_i64(4)).unwrap();
    let c = ctx.structure();
    let n = ctx.dim();
    for x in all_indices(n, 4) {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        assert_eq!(*c.get(&[i, j, l]), -c.get(&[j, i, l]).clone());
        let mut sum = Rational::from_i64(0);
        for m in 0..n {
            sum += &(c.get(&[i, j, m]).clone() * c.get(&[m, k, l]));
            sum += &(c.get(&[j, k, m]).clone() * c.get(&[m, i, l]));
            sum += &(c.get(&[k, i, m]).clone() * c.get(&[m, j, l]));
        }
        assert_eq!(sum, Rational::from_i64(0));
    }
}

#[test]
fn product_curvature_is_block_diagonal() {
    let s = berger_cp2(&4.0, &[0.5, 0.0, -1.0, 1.0 / 3.0], 3).unwrap().build_stack().unwrap();
    let rm = s.riemann_down().values();
    for x in all_indices(8, 4) {
        if x.iter().any(|&i| i < 4) && x.iter().any(|&i| i >= 4) {
            assert_eq!(*rm.get(&x), 0.0, "{x:?}");
        }
    }
}
