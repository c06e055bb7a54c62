//! Acceptance criteria, one line each. Tolerances are pinned here and every
//! check of a criterion must stay within them regardless of suite defaults.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use conformal_core::invariants::{functional_density, rho, star_rho, xi, InvariantPolynomial};
use conformal_core::lab::{run_suite, ModelChoice, Precision, SuiteName, SuiteOptions, VerificationReport};
use conformal_core::models::berger_product;
use conformal_core::scalar::{Rational, Scalar};
use conformal_core::tensor::{Tensor, Up};
use conformal_core::Result;

const INVARIANCE_TOL: f64 = 1e-8;
const PFAFFIAN_TOL: f64 = 1e-8;
const DIMENSIONAL_TOL: f64 = 1e-7;
const LEMMA_TOL: f64 = 1e-7;
const BACH_INVARIANCE_TOL: f64 = 1e-8;
const TF_WEYL_SQUARE_TOL: f64 = 1e-10;
const BACH_DIVERGENCE_TOL: f64 = 1e-6;
const PRODUCT_TOL: f64 = 1e-6;

const BERGER_BUDGET: Duration = Duration::from_secs(5);
const INVARIANCE_BUDGET: Duration = Duration::from_secs(120);
const PRODUCT_BUDGET: Duration = Duration::from_secs(600);

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn opts(model: ModelChoice, precision: Precision) -> SuiteOptions {
    SuiteOptions { model, precision, ..SuiteOptions::default() }
}

fn random(dim: usize) -> ModelChoice {
    ModelChoice::Random { dim: Some(dim) }
}

fn named(name: &str) -> ModelChoice {
    ModelChoice::named(name, None).expect("built-in model")
}

/// Passing report whose checks under `prefix` all stay within `bound`.
fn within(report: &VerificationReport, prefix: &str, bound: f64) -> std::result::Result<f64, String> {
    let mut worst: f64 = 0.0;
    let mut seen = false;
    for c in report.checks.iter().filter(|c| c.name.starts_with(prefix)) {
        seen = true;
        if !c.pass {
            return Err(format!("{} failed (max {:.3e})", c.name, c.max_residual));
        }
        if !c.exact && c.max_residual > bound {
            return Err(format!("{} at {:.3e} exceeds {bound:.0e}", c.name, c.max_residual));
        }
        worst = worst.max(c.max_residual);
    }
    if seen {
        Ok(worst)
    } else {
        Err(format!("no checks named {prefix}*"))
    }
}

fn all_exact(report: &VerificationReport) -> bool {
    report.pass && report.checks.iter().all(|c| c.exact)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn berger_reproduction() -> Result<Outcome> {
    let (report, elapsed) = timed(|| run_suite(SuiteName::Berger, &opts(named("berger-s1"), Precision::Exact)));
    let report = report?;
    let s = berger_product(&Rational::from_i64(4))?.build_stack()?;
    let ricci = s.ricci().values();
    let ricci_ok = [(0, 32), (1, -4), (2, -4), (3, 0)].iter().all(|&(i, v)| *ricci.get(&[i, i]) == Rational::from_i64(v));
    let star = star_rho(&s, &InvariantPolynomial::half_trace())?.values();
    let star_ok = *star.get(&[0, 1, 2]) == Rational::from_i64(-96);
    let weyl_ok = *s.weyl().values().get(&[0, 1, 0, 1]) == Rational::from_i64(8);
    let cotton_ok = *s.cotton().values().get(&[0, 1, 2]) == Rational::from_i64(24);
    let pass = all_exact(&report) && ricci_ok && star_ok && weyl_ok && cotton_ok && elapsed < BERGER_BUDGET;
    Ok(outcome(pass, format!("{} exact checks, ★ρ_XYZ = {}, {elapsed:.2?}", report.checks.len(), star.get(&[0, 1, 2]))))
}

fn random_invariance() -> Result<Outcome> {
    let (report, elapsed) = timed(|| run_suite(SuiteName::ThmInvariance, &opts(random(4), Precision::Float)));
    let report = report?;
    let xi = within(&report, "thm_invariance.xi2", INVARIANCE_TOL);
    let rho = within(&report, "thm_invariance.rho_deg2", INVARIANCE_TOL);
    let trials = report.checks.iter().find(|c| c.name.starts_with("thm_invariance.xi2")).map_or(0, |c| c.residuals.len());
    Ok(match (xi, rho) {
        (Ok(a), Ok(b)) => outcome(
            trials == 20 && elapsed < INVARIANCE_BUDGET,
            format!("{trials} charts, ξ {a:.2e}, ρ {b:.2e}, {elapsed:.2?}"),
        ),
        (Err(e), _) | (_, Err(e)) => outcome(false, e),
    })
}

fn pfaffian_decomposition() -> Result<Outcome> {
    let random = run_suite(SuiteName::ThmPfaffian, &opts(random(4), Precision::Float))?;
    let berger = run_suite(SuiteName::ThmPfaffian, &opts(named("berger-s1"), Precision::Exact))?;
    let worst = within(&random, "thm_pfaffian.", PFAFFIAN_TOL);
    Ok(match worst {
        Ok(w) => outcome(all_exact(&berger), format!("random max {w:.2e}, Berger product exact: {}", all_exact(&berger))),
        Err(e) => outcome(false, e),
    })
}

fn dimensional_identities() -> Result<Outcome> {
    let report = run_suite(SuiteName::AcIdentities, &opts(random(6), Precision::Float))?;
    let names = ["divergence", "conformal", "einstein_split", "einstein_trace", "einstein_divergence", "pfaffian_gradient"];
    let mut worst: f64 = 0.0;
    for n in names {
        match within(&report, &format!("ac_identities.{n}.n6k2"), DIMENSIONAL_TOL) {
            Ok(w) => worst = worst.max(w),
            Err(e) => return Ok(outcome(false, e)),
        }
    }
    Ok(outcome(report.pass, format!("n = 6, k = 2, 10 charts, max {worst:.2e}")))
}

fn lemmas() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let mut o = opts(random(4), Precision::Float);
        o.seed = seed;
        o.trials = Some(1);
        let report = run_suite(SuiteName::Lemmas, &o)?;
        for prefix in ["lemmas.cotton_schouten", "lemmas.weyl_", "lemmas.linearized_", "lemmas.one_form_rule"] {
            match within(&report, prefix, LEMMA_TOL) {
                Ok(w) => worst = worst.max(w),
                Err(e) => return Ok(outcome(false, format!("seed {seed}: {e}"))),
            }
        }
    }
    let frame = run_suite(SuiteName::Lemmas, &opts(named("berger-s1"), Precision::Exact))?;
    Ok(outcome(all_exact(&frame), format!("10 seeds, max {worst:.2e}, Berger product exact: {}", all_exact(&frame))))
}

fn naturality() -> Result<Outcome> {
    let report = run_suite(SuiteName::Naturality, &opts(random(4), Precision::Float))?;
    let checks = [
        ("naturality.bach_invariance", BACH_INVARIANCE_TOL),
        ("naturality.tf_weyl_square", TF_WEYL_SQUARE_TOL),
        ("naturality.bach_divergence", BACH_DIVERGENCE_TOL),
        ("naturality.linearization.", INVARIANCE_TOL),
    ];
    for (prefix, bound) in checks {
        if let Err(e) = within(&report, prefix, bound) {
            return Ok(outcome(false, e));
        }
    }
    let rank = report.checks.iter().find(|c| c.name == "naturality.rank");
    Ok(match rank {
        Some(r) => outcome(r.pass && report.pass, r.note.clone().unwrap_or_default()),
        None => outcome(false, "no rank check"),
    })
}

fn densities() -> Result<Outcome> {
    let phi = InvariantPolynomial::half_trace();
    let field = Tensor::from_fn(4, vec![Up], |i| if i[0] == 3 { Rational::from_i64(1) } else { Rational::from_i64(0) });
    let density = |t: i64, orientation: i8| -> Result<(Rational, Rational)> {
        let ctx = berger_product(&Rational::from_i64(t))?.with_orientation(orientation)?;
        let s = ctx.build_stack()?;
        let p = functional_density(&ctx, &rho(&s, &phi)?.form.values(), &field)?;
        let x = functional_density(&ctx, &xi(&s, 2)?.form.values(), &field)?;
        Ok((x, p))
    };
    let (xi4, p4) = density(4, 1)?;
    let (_, p1) = density(1, 1)?;
    let (xi_flip, p_flip) = density(4, -1)?;
    let zero = Rational::from_i64(0);
    let pass = xi4 == zero && p4 == Rational::from_i64(48) && p1 == zero && p_flip == -p4.clone() && xi_flip == zero;
    Ok(outcome(pass, format!("Ξ(T) = {xi4}, P(T) = {p4} at t = 4, {p1} at t = 1, {p_flip} reversed")))
}

fn fixtures() -> Result<Outcome> {
    let report = run_suite(SuiteName::CoreIdentities, &opts(random(4), Precision::Exact))?;
    let fixtures: Vec<_> = report.checks.iter().filter(|c| c.name.contains(".fixture.")).collect();
    let pfaffian = ["pfaffian_value", "pfaffian_oracle"].iter().all(|k| fixtures.iter().any(|c| c.name.ends_with(k)));
    let pass = pfaffian && fixtures.iter().all(|c| c.pass && c.exact);
    Ok(outcome(pass, format!("{} fixture checks exact, Pf(Rm) on S⁴ = 48", fixtures.len())))
}

fn algebra() -> Result<Outcome> {
    let report = run_suite(SuiteName::CoreIdentities, &opts(random(4), Precision::Exact))?;
    let algebra: Vec<_> = report
        .checks
        .iter()
        .filter(|c| ["epsilon_contraction", "double_hodge", "delta_trace"].iter().any(|k| c.name.contains(k)))
        .collect();
    let dims = (2..=5).all(|n| algebra.iter().filter(|c| c.name.ends_with(&format!(".n{n}"))).count() == 3);
    let pass = dims && algebra.iter().all(|c| c.pass && c.exact);
    Ok(outcome(pass, format!("{} exact checks over n = 2..5", algebra.len())))
}

fn product() -> Result<Outcome> {
    let (report, elapsed) = timed(|| run_suite(SuiteName::ProductFactorization, &opts(named("berger-cp2"), Precision::Float)));
    let report = report?;
    if let Err(e) = within(&report, "product_factorization.", PRODUCT_TOL) {
        return Ok(outcome(false, e));
    }
    let note = report
        .checks
        .iter()
        .find(|c| c.name == "product_factorization.block_ratio_nonzero")
        .and_then(|c| c.note.clone())
        .unwrap_or_default();
    Ok(outcome(report.pass && elapsed < PRODUCT_BUDGET, format!("{note}, {elapsed:.2?}")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Berger sphere closed forms at t = 4", berger_reproduction),
        ("conformal invariance of ξ and ρ on random charts", random_invariance),
        ("Pfaffian decomposition and trace of Ω", pfaffian_decomposition),
        ("dimensional identities in dimension 6", dimensional_identities),
        ("curvature and linearization lemmas", lemmas),
        ("Bach tensor and naturality rank", naturality),
        ("functional densities on the Berger product", densities),
        ("flat and spherical fixtures", fixtures),
        ("exterior algebra identities", algebra),
        ("product factorization in dimension 8", product),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
