//! Command-line front end: validate pipeline files, compute per-stage and
//! total entropy, refit hypotheses to their Bayesian optimum, and run the
//! functor law suites.
//!
//! JSON results go to standard output, human-readable summaries to
//! standard error. Exit codes: 0 on success, 1 on a validation or law
//! failure, 2 on usage or parse errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use finstat::{
    check_convex_linearity, check_fp_vanishing, check_functoriality, check_lower_semicontinuity,
    builtin_families, default_t_sequence, find_distinguisher, EntropyFunctor, Error,
    FinStatMorphism, GenConfig, LawReport, Pipeline, ZeroFiberPolicy,
};

#[derive(Parser)]
#[command(
    name = "finstat-cli",
    about = "Finite probability pipelines: validation, relative entropy, Bayesian refitting, and functor law checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a pipeline file: stage morphisms and composability
    Check {
        file: PathBuf,
        /// Override the intermediate-distribution matching tolerance
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Per-stage and total functor values, computed along both paths
    Entropy {
        file: PathBuf,
        /// Functor to evaluate: RE, G, Gprime, or broken-fixture
        #[arg(long)]
        functor: Option<String>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Rewrite every stage with its optimal hypothesis
    Bayes {
        file: PathBuf,
        /// Rule for fibers of zero mass: "uniform" or "point:<label>"
        #[arg(long, default_value = "uniform")]
        policy: String,
        /// Write the refitted pipeline here instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the law suites for a functor over seeded random morphisms
    Laws {
        /// Functor to test: RE, G, Gprime, or broken-fixture
        #[arg(long, default_value = "RE")]
        functor: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { file, tolerance } => cmd_check(&file, tolerance),
        Command::Entropy {
            file,
            functor,
            tolerance,
        } => cmd_entropy(&file, functor.as_deref(), tolerance),
        Command::Bayes {
            file,
            policy,
            output,
        } => cmd_bayes(&file, &policy, output.as_deref()),
        Command::Laws {
            functor,
            seed,
            trials,
        } => cmd_laws(&functor, seed, trials),
    };
    ExitCode::from(code)
}

/// Parse errors are usage-level (exit 2); everything else is a
/// validation failure (exit 1).
fn failure_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn emit_error(err: &Error) -> u8 {
    let stage = match err {
        Error::Stage { stage, .. } => Some(*stage),
        _ => None,
    };
    print_json(&json!({ "valid": false, "error": err.to_string(), "stage": stage }));
    eprintln!("error: {err}");
    failure_code(err)
}

fn print_json(value: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports always serialize")
    );
}

fn load_pipeline(path: &Path, tolerance: Option<f64>) -> Result<Pipeline, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut pipeline: Pipeline =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if tolerance.is_some() {
        pipeline.options.tolerance = tolerance;
    }
    pipeline.validate()?;
    Ok(pipeline)
}

fn cmd_check(file: &Path, tolerance: Option<f64>) -> u8 {
    match load_pipeline(file, tolerance) {
        Ok(pipeline) => {
            print_json(&json!({ "valid": true, "stages": pipeline.stages.len() }));
            eprintln!(
                "{}: {} stage(s), composable",
                file.display(),
                pipeline.stages.len()
            );
            0
        }
        Err(err) => emit_error(&err),
    }
}

fn cmd_entropy(file: &Path, functor: Option<&str>, tolerance: Option<f64>) -> u8 {
    let result = load_pipeline(file, tolerance).and_then(|pipeline| {
        let functor = match functor {
            Some(name) => EntropyFunctor::from_name(name)?,
            None => pipeline.functor()?,
        };
        pipeline.entropy_report(&functor)
    });
    match result {
        Ok(report) => {
            print_json(&report);
            eprintln!(
                "total {} over {} stage(s); compose-then-evaluate deviates by {}",
                report.total,
                report.per_stage.len(),
                report.path_deviation
            );
            0
        }
        Err(err) => emit_error(&err),
    }
}

fn parse_policy(value: &str) -> Result<ZeroFiberPolicy, Error> {
    if value == "uniform" {
        Ok(ZeroFiberPolicy::Uniform)
    } else if let Some(label) = value.strip_prefix("point:") {
        Ok(ZeroFiberPolicy::PointMass(label.to_string()))
    } else {
        Err(Error::Parse(format!(
            "unknown policy `{value}` (expected \"uniform\" or \"point:<label>\")"
        )))
    }
}

fn cmd_bayes(file: &Path, policy: &str, output: Option<&Path>) -> u8 {
    let result = parse_policy(policy).and_then(|policy| {
        let pipeline = load_pipeline(file, None)?;
        pipeline.bayes(&policy)
    });
    match result {
        Ok(fitted) => {
            let text = fitted.to_json();
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_USAGE;
                    }
                    eprintln!("wrote refitted pipeline to {}", path.display());
                }
                None => print!("{text}"),
            }
            0
        }
        Err(err) => emit_error(&err),
    }
}

#[derive(Serialize)]
struct LawsBundle {
    functor: String,
    seed: u64,
    trials: usize,
    reports: Vec<LawReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distinguisher: Option<(FinStatMorphism, FinStatMorphism)>,
    passed: bool,
}

fn cmd_laws(functor_name: &str, seed: u64, trials: usize) -> u8 {
    let functor = match EntropyFunctor::from_name(functor_name) {
        Ok(f) => f,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    let cfg = GenConfig {
        seed,
        trials,
        ..GenConfig::default()
    };

    let mut reports = vec![
        check_functoriality(&functor, &cfg),
        check_convex_linearity(&functor, &cfg),
        check_fp_vanishing(&functor, &cfg),
    ];
    // the support functor G is the known counterexample that fails lower
    // semicontinuity, so its suite replaces those families with the
    // distinguisher search against relative entropy
    let mut distinguisher = None;
    if functor == EntropyFunctor::G || functor == EntropyFunctor::GPrime {
        distinguisher = find_distinguisher(&functor, &EntropyFunctor::Re, &cfg);
    }
    if functor != EntropyFunctor::G {
        let t_seq = default_t_sequence();
        for family in builtin_families() {
            match check_lower_semicontinuity(&functor, &family, &t_seq) {
                Ok(report) => reports.push(report),
                Err(err) => return emit_error(&err),
            }
        }
    }

    let passed = reports.iter().all(|r| r.passed());
    for report in &reports {
        eprintln!(
            "{:<28} {} (max deviation {}, tolerance {:e}, {} trial(s))",
            report.law,
            if report.passed() { "pass" } else { "FAIL" },
            report.max_deviation,
            report.tolerance,
            report.trials
        );
    }
    if distinguisher.is_some() {
        eprintln!("distinguisher vs RE: witness pair found (no common scalar c fits both)");
    }
    let bundle = LawsBundle {
        functor: functor_name.to_string(),
        seed,
        trials,
        reports,
        distinguisher,
        passed,
    };
    print_json(&bundle);
    if passed {
        0
    } else {
        EXIT_FAIL
    }
}
