use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conformal_core::lab::{run_suite, ModelChoice, Precision, SuiteName, SuiteOptions};
use conformal_core::models::ModelSpec;
use conformal_core::Error;

#[derive(Parser)]
#[command(name = "conformal", version, about = "Verify curvature identities and conformal invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and report residuals.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// core_identities, thm_invariance, thm_pfaffian, ac_identities, lemmas, berger,
    /// product_factorization, naturality or all.
    #[arg(long)]
    suite: String,

    /// Built-in model name (random4, random6, flat4, round-s4, berger, berger-s1, fs-cp2,
    /// berger-cp2) or a path to a JSON model description.
    #[arg(long, default_value = "random")]
    model: String,

    /// Berger parameter as a rational literal such as `4` or `9/4`.
    #[arg(long)]
    t: Option<String>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long)]
    trials: Option<usize>,

    #[arg(long)]
    jet_order: Option<usize>,

    /// Relative tolerance applied to every check in place of its default.
    #[arg(long)]
    tol: Option<f64>,

    #[arg(long, conflicts_with = "float")]
    exact: bool,

    #[arg(long)]
    float: bool,

    /// Write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn model_choice(name: &str, t: Option<&str>) -> Result<ModelChoice, Error> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        return Ok(ModelChoice::Spec { name: name.to_string(), spec: ModelSpec::from_json(&text)? });
    }
    ModelChoice::named(name, t)
}

fn options(args: &VerifyArgs) -> Result<(SuiteName, SuiteOptions), Error> {
    let suite: SuiteName = args.suite.parse()?;
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }
    }
    let precision = match (args.exact, args.float) {
        (true, _) => Precision::Exact,
        (_, true) => Precision::Float,
        _ => Precision::Default,
    };
    let opts = SuiteOptions {
        model: model_choice(&args.model, args.t.as_deref())?,
        seed: args.seed,
        trials: args.trials,
        jet_order: args.jet_order,
        tol: args.tol,
        precision,
        t: args.t.clone(),
    };
    Ok((suite, opts))
}

fn verify(args: &VerifyArgs) -> ExitCode {
    let result = options(args).and_then(|(suite, opts)| run_suite(suite, &opts));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &args.json {
        if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    print!("{}", report.table());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        let failed = report.failures().count();
        eprintln!("{failed} of {} checks failed", report.checks.len());
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify(args) => verify(args),
    }
}
