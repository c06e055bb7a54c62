use conformal_core::invariants::{InvariantPolynomial, Matrix};
use conformal_core::lab::{linearize, linearize_fd, run_suite, ModelChoice, Precision, Quantity, SuiteName, SuiteOptions};
use conformal_core::models::{random_chart, random_factor};
use conformal_core::scalar::{Jet, Rational, Scalar};
use conformal_core::tensor::Tensor;
use conformal_core::ContextF64;
use proptest::prelude::*;

const ORDER: usize = 5;

fn catalog() -> Vec<Quantity> {
    vec![
        Quantity::Weyl,
        Quantity::Cotton,
        Quantity::Xi(2),
        Quantity::StarRho(InvariantPolynomial::half_trace()),
        Quantity::Bach,
    ]
}

fn sample(seed: u64) -> (ContextF64, Jet<f64>, Jet<f64>) {
    let ctx = random_chart(4, seed, 0, ORDER).unwrap();
    (ctx, random_factor(4, seed, 1, ORDER).unwrap(), random_factor(4, seed, 2, ORDER).unwrap())
}

fn d(ctx: &ContextF64, q: &Quantity, u: &Jet<f64>) -> Tensor<f64> {
    linearize(ctx, q, u, q.weight()).unwrap().value
}

fn relative(a: &Tensor<f64>, b: &Tensor<f64>) -> f64 {
    a.try_sub(b).unwrap().max_magnitude() / a.max_magnitude().max(b.max_magnitude()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn linearization_is_linear_in_the_factor(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (ctx, u1, u2) = sample(seed);
        let combo = u1.map(|c| c * a) + &u2.map(|c| c * b);
        for q in catalog() {
            let lhs = d(&ctx, &q, &combo);
            let rhs = d(&ctx, &q, &u1).scale(&a).try_add(&d(&ctx, &q, &u2).scale(&b)).unwrap();
            prop_assert!(relative(&lhs, &rhs) <= 1e-9, "{}", q.name());
        }
    }

    #[test]
    fn constant_factors_do_not_linearize(seed in any::<u64>(), c in -3.0f64..3.0) {
        let (ctx, _, _) = sample(seed);
        let u = Jet::constant_with(4, ORDER, c);
        for q in catalog() {
            let size = linearize(&ctx, &q, &u, 0).unwrap().value.max_magnitude().max(1.0);
            prop_assert!(d(&ctx, &q, &u).max_magnitude() <= 1e-10 * size, "{}", q.name());
        }
    }

    #[test]
    fn jet_and_finite_difference_linearizations_agree(seed in any::<u64>()) {
        let (ctx, u, _) = sample(seed);
        for q in [Quantity::Schouten, Quantity::J, Quantity::Cotton] {
            let exact = d(&ctx, &q, &u);
            let fd = linearize_fd(&ctx, &q, &u, q.weight(), 1e-4).unwrap().value;
            prop_assert!(relative(&exact, &fd) <= 1e-5, "{}", q.name());
        }
    }

    #[test]
    fn symmetrized_polynomials_ignore_argument_order(
        entries in prop::collection::vec(-4i64..=4, 27),
        order in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let phi = InvariantPolynomial::from_cycles(3, &[(Rational::from_i64(1), vec![vec![0, 1, 2]]), (Rational::from_i64(2), vec![vec![0], vec![1, 2]])])
            .unwrap()
            .symmetrized();
        prop_assert!(phi.is_symmetric());
        let mats: Vec<Matrix<Rational>> = entries
            .chunks(9)
            .map(|m| m.chunks(3).map(|row| row.iter().map(|&v| Rational::from_i64(v)).collect()).collect())
            .collect();
        let args: Vec<&Matrix<Rational>> = mats.iter().collect();
        let permuted: Vec<&Matrix<Rational>> = order.iter().map(|&i| &mats[i]).collect();
        prop_assert_eq!(phi.evaluate(&args).unwrap(), phi.evaluate(&permuted).unwrap());
    }
}

#[test]
fn reports_are_reproducible_from_the_seed() {
    let opts = |seed| SuiteOptions {
        model: ModelChoice::Random { dim: Some(4) },
        seed,
        trials: Some(3),
        precision: Precision::Float,
        ..SuiteOptions::default()
    };
    let run = |seed| run_suite(SuiteName::ThmInvariance, &opts(seed)).unwrap().to_json();
    assert_eq!(run(7), run(7));
    assert_ne!(run(7), run(8));
}

#[test]
fn exact_suites_on_frames_have_zero_residuals() {
    for suite in [SuiteName::Berger, SuiteName::ThmPfaffian, SuiteName::Lemmas] {
        for t in ["1", "4", "9", "1/4"] {
            let opts = SuiteOptions {
                model: ModelChoice::named("berger-s1", Some(t)).unwrap(),
                precision: Precision::Exact,
                t: Some(t.to_string()),
                ..SuiteOptions::default()
            };
            let report = run_suite(suite, &opts).unwrap();
            assert!(report.pass, "{suite} at t = {t}");
            for c in &report.checks {
                assert!(c.exact && c.max_residual == 0.0, "{} at t = {t}", c.name);
            }
        }
    }
}

#[test]
fn irrational_quantities_are_reported_in_exact_mode() {
    let opts = SuiteOptions {
        model: ModelChoice::named("berger-s1", Some("2")).unwrap(),
        precision: Precision::Exact,
        t: Some("2".into()),
        ..SuiteOptions::default()
    };
    let err = run_suite(SuiteName::Berger, &opts).unwrap_err().to_string();
    assert!(err.contains("not representable"), "{err}");
}
