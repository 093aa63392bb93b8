use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use inverseopt::harness::{gen_instance, verify, GenKind, GenMode, GenSpec};
use inverseopt::mst::{solve_deterministic, solve_linear, solve_naive, solve_randomized};
use inverseopt::{parse_instance, serialize_instance, solve_inverse, Instance, SolveOptions, SolveOutcome, TargetKind};
use serde_json::Value;

/// Inverse parametric optimization on graphs.
///
/// Exit codes: 0 feasible, 2 infeasible, 1 error.
#[derive(Parser)]
#[command(name = "inverseopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find parameters making the target the unique optimum.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        #[arg(long, env = "INVERSEOPT_SEED", default_value_t = 0)]
        seed: u64,
        /// Ellipsoid only: maximize the margin instead of stopping at the
        /// first separating point.
        #[arg(long)]
        second_best: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a random instance; the hidden parameters of a feasible
    /// instance go to standard error.
    Gen {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, env = "INVERSEOPT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        mode: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check whether the target is the unique optimum at given parameters.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated parameter values.
        #[arg(long, allow_hyphen_values = true)]
        params: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Naive,
    Randomized,
    Linear,
    Deterministic,
    Ellipsoid,
}

fn load(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn solve(instance: &Instance, algorithm: Algorithm, seed: u64, second_best: bool) -> Result<SolveOutcome> {
    if algorithm != Algorithm::Ellipsoid && instance.target.kind != TargetKind::SpanningTree {
        bail!(
            "the {} algorithm handles spanning trees only; use --algorithm ellipsoid for {} targets",
            algorithm.to_possible_value().expect("no skipped variants").get_name(),
            instance.target.kind.name()
        );
    }
    let (g, t) = (&instance.graph, &instance.target.edges);
    Ok(match algorithm {
        Algorithm::Naive => solve_naive(g, t)?,
        Algorithm::Randomized => solve_randomized(g, t, seed)?,
        Algorithm::Linear => solve_linear(g, t, seed)?,
        Algorithm::Deterministic => solve_deterministic(g, t, None, seed)?,
        Algorithm::Ellipsoid => solve_inverse(
            instance,
            &SolveOptions {
                use_second_best: second_best,
                seed,
                ..SolveOptions::default()
            },
        )?,
    })
}

fn parse_params(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad parameter value {x:?}")))
        .collect()
}

fn status_code(feasible: bool) -> ExitCode {
    if feasible {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve {
            input,
            algorithm,
            seed,
            second_best,
            output,
        } => {
            let instance = load(&input)?;
            let out = solve(&instance, algorithm, seed, second_best)?;
            emit(&out.to_json().to_string(), output.as_deref())?;
            Ok(status_code(out.is_feasible()))
        }
        Command::Gen {
            kind,
            n,
            m,
            d,
            seed,
            mode,
            output,
        } => {
            let spec = GenSpec {
                kind: GenKind::parse(&kind).with_context(|| format!("unknown kind {kind:?}"))?,
                n,
                m,
                d,
                seed,
                mode: GenMode::parse(&mode).with_context(|| format!("unknown mode {mode:?}"))?,
            };
            let generated = gen_instance(&spec)?;
            if let Some(p) = &generated.hidden {
                eprintln!("hidden p*: {}", Value::from(p.clone()));
            }
            emit(&serialize_instance(&generated.instance), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { input, params } => {
            let instance = load(&input)?;
            let report = verify(&instance, &parse_params(&params)?)?;
            println!("{}", report.to_json());
            Ok(status_code(report.feasible))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
