use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::checks::{self, Tolerances};
use super::report::{Check, Collector, VerificationReport};
use crate::error::{Error, Result};
use crate::geometry::Context;
use crate::models::{random_chart, random_factor, ModelSpec};
use crate::scalar::{parse_rational, Jet, Rational, Scalar};
use crate::tensor::{Down, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuiteName {
    CoreIdentities,
    ThmInvariance,
    ThmPfaffian,
    AcIdentities,
    Lemmas,
    Berger,
    ProductFactorization,
    Naturality,
    All,
}

impl SuiteName {
    pub const EVERY: [SuiteName; 8] = [
        SuiteName::CoreIdentities,
        SuiteName::ThmInvariance,
        SuiteName::ThmPfaffian,
        SuiteName::AcIdentities,
        SuiteName::Lemmas,
        SuiteName::Berger,
        SuiteName::ProductFactorization,
        SuiteName::Naturality,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::CoreIdentities => "core_identities",
            SuiteName::ThmInvariance => "thm_invariance",
            SuiteName::ThmPfaffian => "thm_pfaffian",
            SuiteName::AcIdentities => "ac_identities",
            SuiteName::Lemmas => "lemmas",
            SuiteName::Berger => "berger",
            SuiteName::ProductFactorization => "product_factorization",
            SuiteName::Naturality => "naturality",
            SuiteName::All => "all",
        }
    }

    fn default_exact(self) -> bool {
        matches!(self, SuiteName::CoreIdentities | SuiteName::Berger)
    }

    fn default_trials(self) -> usize {
        match self {
            SuiteName::ThmInvariance | SuiteName::ThmPfaffian => 20,
            SuiteName::AcIdentities | SuiteName::Lemmas => 10,
            SuiteName::Naturality => 40,
            _ => 1,
        }
    }

    fn default_dim(self) -> usize {
        match self {
            SuiteName::AcIdentities => 6,
            _ => 4,
        }
    }

    fn default_order(self, dim: usize) -> usize {
        match self {
            SuiteName::AcIdentities if dim > 4 => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::EVERY
            .into_iter()
            .chain([SuiteName::All])
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    #[default]
    Default,
    Exact,
    Float,
}

/// Random charts from the seeded ensemble, or one fixed model.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelChoice {
    Random { dim: Option<usize> },
    Spec { name: String, spec: ModelSpec },
}

impl ModelChoice {
    /// `random`, `random4`, `random6`, a built-in name, or an already parsed spec.
    pub fn named(name: &str, t: Option<&str>) -> Result<Self> {
        match name {
            "random" => Ok(ModelChoice::Random { dim: None }),
            _ if name.starts_with("random") => {
                let dim = name["random".len()..]
                    .parse()
                    .map_err(|_| Error::Config(format!("unknown model {name:?}")))?;
                Ok(ModelChoice::Random { dim: Some(dim) })
            }
            "flat" => Ok(ModelChoice::Spec { name: name.into(), spec: ModelSpec::named("flat4", t)? }),
            _ => Ok(ModelChoice::Spec { name: name.into(), spec: ModelSpec::named(name, t)? }),
        }
    }

    fn label(&self, suite: SuiteName) -> String {
        match self {
            ModelChoice::Random { dim } => format!("random{}", dim.unwrap_or(suite.default_dim())),
            ModelChoice::Spec { name, .. } => name.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub model: ModelChoice,
    pub seed: u64,
    pub trials: Option<usize>,
    pub jet_order: Option<usize>,
    pub tol: Option<f64>,
    pub precision: Precision,
    /// Berger parameter as a rational literal.
    pub t: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            model: ModelChoice::Random { dim: None },
            seed: 0,
            trials: None,
            jet_order: None,
            tol: None,
            precision: Precision::Default,
            t: None,
        }
    }
}

/// Runs one suite (or all of them) and assembles the report.
pub fn run_suite(suite: SuiteName, opts: &SuiteOptions) -> Result<VerificationReport> {
    let checks = if suite == SuiteName::All {
        let mut all = Vec::new();
        for s in SuiteName::EVERY {
            all.extend(run_one(s, opts)?);
        }
        all
    } else {
        run_one(suite, opts)?
    };
    let model = match suite {
        SuiteName::Berger => format!("berger-s1 (t = {})", t_literal(opts)),
        SuiteName::ProductFactorization => format!("berger-cp2 (t = {})", t_literal(opts)),
        SuiteName::All => "all".into(),
        _ => opts.model.label(suite),
    };
    Ok(VerificationReport::new(suite.as_str(), model, Some(opts.seed), checks))
}

fn t_literal(opts: &SuiteOptions) -> &str {
    opts.t.as_deref().unwrap_or("4")
}

fn exact_for(suite: SuiteName, opts: &SuiteOptions) -> bool {
    match opts.precision {
        Precision::Exact => true,
        Precision::Float => false,
        Precision::Default => suite.default_exact(),
    }
}

fn run_one(suite: SuiteName, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let cfg = Tolerances { override_rel: opts.tol };
    let exact = exact_for(suite, opts);
    match suite {
        SuiteName::CoreIdentities => core_identities(&cfg, opts, exact),
        SuiteName::Berger => {
            let t = parse_rational(t_literal(opts))
                .ok_or_else(|| Error::Config(format!("not a rational number: {:?}", t_literal(opts))))?;
            let mut c = Collector::new();
            if exact {
                checks::berger_checks(&mut c, &cfg, &t)?;
            } else {
                checks::berger_checks(&mut c, &cfg, &Rational::to_f64(&t))?;
            }
            Ok(c.finish(exact))
        }
        SuiteName::ProductFactorization => {
            if exact {
                return Err(Error::Config("product_factorization runs in floating point only".into()));
            }
            let t = parse_rational(t_literal(opts))
                .ok_or_else(|| Error::Config(format!("not a rational number: {:?}", t_literal(opts))))?;
            let mut c = Collector::new();
            checks::product_checks(&mut c, &cfg, Rational::to_f64(&t))?;
            Ok(c.finish(false))
        }
        SuiteName::Naturality => naturality(&cfg, opts, exact),
        SuiteName::All => unreachable!("expanded by run_suite"),
        _ => {
            if exact {
                trial_suite::<Rational>(suite, &cfg, opts, true)
            } else {
                trial_suite::<f64>(suite, &cfg, opts, false)
            }
        }
    }
}

fn core_identities(cfg: &Tolerances, opts: &SuiteOptions, exact: bool) -> Result<Vec<Check>> {
    let order = opts.jet_order.unwrap_or(5);
    let mut c = Collector::new();
    if exact {
        checks::algebra_checks::<Rational>(&mut c, cfg)?;
        checks::fixture_checks::<Rational>(&mut c, cfg, order)?;
    } else {
        checks::algebra_checks::<f64>(&mut c, cfg)?;
        checks::fixture_checks::<f64>(&mut c, cfg, order)?;
    }
    if let ModelChoice::Spec { name, spec } = &opts.model {
        let prefix = format!("core_identities.model.{}", name.replace(['-', '/', '.'], "_"));
        if exact {
            checks::stack_checks(&mut c, cfg, &prefix, &spec.build::<Rational>()?.build_stack()?)?;
        } else {
            checks::stack_checks(&mut c, cfg, &prefix, &spec.build::<f64>()?.build_stack()?)?;
        }
    }
    let mut out = c.finish(exact);
    let mut float = Collector::new();
    checks::sphere_from_flat(&mut float, cfg, order)?;
    out.extend(float.finish(false));
    Ok(out)
}

/// The kinds the trial suites run in: charts become concrete contexts per trial.
trait TrialScalar: Scalar {
    fn sample(n: usize, seed: u64, trial: u64, order: usize) -> Result<Context<Self>>;
    fn from_spec(spec: &ModelSpec) -> Result<Context<Self>>;
    fn factor(ctx: &Context<Self>, seed: u64, trial: u64) -> Result<Jet<Self>>;
}

impl TrialScalar for f64 {
    fn sample(n: usize, seed: u64, trial: u64, order: usize) -> Result<Context<f64>> {
        random_chart(n, seed, trial, order)
    }

    fn from_spec(spec: &ModelSpec) -> Result<Context<f64>> {
        spec.build()
    }

    fn factor(ctx: &Context<f64>, seed: u64, trial: u64) -> Result<Jet<f64>> {
        match ctx.jet_order() {
            Some(order) => {
                let u = random_factor(ctx.vars(), seed, trial, order)?;
                Ok(u)
            }
            None => Ok(Jet::constant(0.3)),
        }
    }
}

impl TrialScalar for Rational {
    fn sample(_: usize, _: u64, _: u64, _: usize) -> Result<Context<Rational>> {
        Err(Error::NotRepresentable { quantity: "random chart coefficients".into(), kind: Rational::KIND.name() })
    }

    fn from_spec(spec: &ModelSpec) -> Result<Context<Rational>> {
        spec.build()
    }

    fn factor(ctx: &Context<Rational>, seed: u64, trial: u64) -> Result<Jet<Rational>> {
        rational_factor(ctx, seed, trial)
    }
}

/// A polynomial conformal factor with coefficients in `(1/8)ℤ` and `Υ(p) = 0`, so that
/// `e^{2Υ}` stays rational at the base point.
fn rational_factor<S: Scalar>(ctx: &Context<S>, seed: u64, trial: u64) -> Result<Jet<S>> {
    let Some(order) = ctx.jet_order() else {
        return Ok(Jet::constant(S::zero()));
    };
    let n = ctx.vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    rng.set_stream(trial);
    let mut coef = || S::from_ratio(rng.gen_range(-4i64..=4), 8);
    let zero = Jet::constant_with(n, order, S::zero());
    let x: Vec<Jet<S>> = (0..n).map(|v| Jet::variable(n, order, v, S::zero())).collect();
    let mut u = zero;
    for i in 0..n {
        u += &(x[i].clone() * &Jet::constant(coef()));
        for j in i..n {
            u += &(x[i].clone() * &x[j] * &Jet::constant(coef()));
        }
    }
    Ok(u)
}

fn auxiliary_form<S: Scalar>(ctx: &Context<S>, seed: u64, trial: u64) -> Result<Tensor<Jet<S>>> {
    let n = ctx.dim();
    let comps: Vec<Jet<S>> =
        (0..n).map(|i| rational_factor(ctx, seed.wrapping_add(7919), trial * 64 + i as u64)).collect::<Result<_>>()?;
    let constant = |i: usize| Jet::constant(S::from_ratio(i as i64 + 1, 4));
    Ok(Tensor::from_fn(n, vec![Down], |i| comps[i[0]].clone() + &constant(i[0])))
}

fn contexts<S: TrialScalar>(suite: SuiteName, opts: &SuiteOptions) -> Result<(usize, Box<dyn Fn(u64) -> Result<Context<S>> + Sync>)> {
    match &opts.model {
        ModelChoice::Random { dim } => {
            let n = dim.unwrap_or(suite.default_dim());
            let order = opts.jet_order.unwrap_or(suite.default_order(n));
            let seed = opts.seed;
            Ok((n, Box::new(move |trial| S::sample(n, seed, trial, order))))
        }
        ModelChoice::Spec { spec, .. } => {
            let spec = match opts.jet_order {
                Some(order) => spec.with_jet_order(order),
                None => spec.clone(),
            };
            let ctx = S::from_spec(&spec)?;
            Ok((ctx.dim(), Box::new(move |_| Ok(ctx.clone()))))
        }
    }
}

fn trial_suite<S: TrialScalar>(suite: SuiteName, cfg: &Tolerances, opts: &SuiteOptions, exact: bool) -> Result<Vec<Check>> {
    let trials = opts.trials.unwrap_or(suite.default_trials());
    let (n, make) = contexts::<S>(suite, opts)?;
    let seed = opts.seed;
    let results: Vec<Result<Collector>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let ctx = make(trial)?;
            let upsilon = S::factor(&ctx, seed, trial)?;
            let mut c = Collector::new();
            match suite {
                SuiteName::ThmInvariance => {
                    let (base, hat) = (ctx.build_stack()?, ctx.rescale(&upsilon)?.build_stack()?);
                    checks::invariance_checks(&mut c, cfg, &base, &hat, &upsilon, &checks::invariant_quantities(n))?;
                }
                SuiteName::ThmPfaffian => {
                    if n % 2 != 0 {
                        return Err(Error::Dimension { dim: n, requirement: "even dimension n = 2k".into() });
                    }
                    checks::pfaffian_checks(&mut c, cfg, "thm_pfaffian", &ctx.build_stack()?)?;
                }
                SuiteName::AcIdentities => {
                    let (base, hat) = (ctx.build_stack()?, ctx.rescale(&upsilon)?.build_stack()?);
                    for k in 1..=((n - 1) / 2).min(2) {
                        if 2 * k < n {
                            checks::ac_checks(&mut c, cfg, &base, &hat, &upsilon, k)?;
                        }
                    }
                }
                SuiteName::Lemmas => lemma_trial(&mut c, cfg, &ctx, &upsilon, seed, trial)?,
                _ => unreachable!("not a trial suite"),
            }
            Ok(c)
        })
        .collect();
    let mut all = Collector::new();
    for r in results {
        all.merge(r?);
    }
    Ok(all.finish(exact))
}

fn lemma_trial<S: TrialScalar>(
    c: &mut Collector,
    cfg: &Tolerances,
    ctx: &Context<S>,
    upsilon: &Jet<S>,
    seed: u64,
    trial: u64,
) -> Result<()> {
    let base = ctx.build_stack()?;
    checks::lemma1_checks(c, cfg, &base)?;
    checks::lemma_linearization_checks(c, cfg, ctx, upsilon)?;
    let alpha = auxiliary_form(ctx, seed, trial)?;
    let hat = ctx.rescale(upsilon)?.build_stack()?;
    checks::one_form_rule(c, cfg, &base, &hat, upsilon, &alpha)?;
    if let Some(ctx) = as_float(ctx) {
        let u = as_float_jet(upsilon);
        checks::rescale_constant(c, cfg, &ctx)?;
        checks::finite_difference_checks(c, cfg, &ctx, &u)?;
    }
    Ok(())
}

fn as_float<S: Scalar>(ctx: &Context<S>) -> Option<Context<f64>> {
    (S::KIND == f64::KIND && ctx.jet_order().is_some()).then(|| ctx.lift(|x: &S| x.to_f64()))
}

fn as_float_jet<S: Scalar>(u: &Jet<S>) -> Jet<f64> {
    u.map(|x| x.to_f64())
}

fn naturality(cfg: &Tolerances, opts: &SuiteOptions, exact: bool) -> Result<Vec<Check>> {
    if exact {
        return Err(Error::NotRepresentable { quantity: "e^{2Υ} on random samples".into(), kind: Rational::KIND.name() });
    }
    let suite = SuiteName::Naturality;
    let trials = opts.trials.unwrap_or(suite.default_trials()) as u64;
    let (n, make) = contexts::<f64>(suite, opts)?;
    if n != 4 {
        return Err(Error::Dimension { dim: n, requirement: "n = 4".into() });
    }
    let mut c = Collector::new();
    const ATTEMPTS: u64 = 4;
    for attempt in 0..ATTEMPTS {
        let offset = attempt * trials;
        let results: Vec<Result<(Collector, checks::NaturalityRows)>> = (offset..offset + trials)
            .into_par_iter()
            .map(|trial| {
                let ctx = make(trial)?;
                let upsilon = f64::factor(&ctx, opts.seed, trial)?;
                let mut local = Collector::new();
                let rows = checks::naturality_checks(&mut local, cfg, &ctx, &upsilon)?;
                Ok((local, rows))
            })
            .collect();
        let mut round = Collector::new();
        let mut rows = Vec::new();
        for r in results {
            let (local, r) = r?;
            round.merge(local);
            rows.push(r);
        }
        let last = attempt + 1 == ATTEMPTS;
        if last || checks::numerical_rank(&rows, checks::tol::RANK_THRESHOLD) == 4 {
            checks::rank_check(&mut round, &rows, attempt as usize + 1);
            c.merge(round);
            break;
        }
    }
    Ok(c.finish(false))
}
