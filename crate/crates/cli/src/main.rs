//! `perfdir`: command-line front end.
//!
//! Exit status: 0 on success, 1 on bad input, 2 when a computed result
//! contradicts a proven statement or a construction's prediction (which
//! can only mean a bug).

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use perfdir::analysis::{perfect_directions, redei_megyesi_check, verify_main_theorem};
use perfdir::constructions::{
    power_graph_example, small_support_example, so2_orbit_example, two_lines_example,
    ConstructionResult,
};
use perfdir::search::{run_search_with, SearchMode, SearchOptions, SearchSpec};
use perfdir::spectral::{check_support_bound, check_uncertainty, fourier_support};
use perfdir::weights::{format_rational, parse_weight, rationalize, RealWeightInput};
use perfdir::{Error, Point, PrimeModulus, WeightFunction};

#[derive(Parser)]
#[command(
    name = "perfdir",
    version,
    about = "Perfect and determined directions on F_p^2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    So2,
    Power,
    Twolines,
    Smallsupport,
}

#[derive(Subcommand)]
enum Command {
    /// Line sums and perfect/determined flags for every direction.
    Analyze {
        /// Weight JSON: a path, `-` for stdin, or an inline document.
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Support of the Fourier transform and the support-count bound.
    Spectrum {
        #[arg(long)]
        input: String,
    },
    /// Build one of the extremal examples.
    Construct {
        #[arg(value_enum)]
        kind: Construction,
        #[arg(long)]
        p: u64,
        /// Half the orbit size (so2).
        #[arg(long)]
        n: Option<usize>,
        /// Base point `x,y` (so2); defaults to `1,0`.
        #[arg(long)]
        z: Option<String>,
        /// Use two parallel lines (twolines).
        #[arg(long)]
        parallel_lines: bool,
        /// Run the analysis and compare with the predictions.
        #[arg(long)]
        check: bool,
    },
    /// Check `N <= |S|/2` and the uncertainty dichotomy.
    Verify {
        #[arg(long)]
        input: String,
    },
    /// Count determined directions of a p-point support.
    Redei {
        #[arg(long)]
        input: String,
    },
    /// Extremal search driven by a JSON search spec.
    Search {
        #[arg(long)]
        input: String,
        /// Worker threads.
        #[arg(long)]
        parallel: Option<usize>,
        /// Override the seed of a randomized spec.
        #[arg(long)]
        seed: Option<u64>,
        /// Checkpoint file listing completed ranges; read and updated.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Approximate decimal weights by rationals with a common denominator.
    Rationalize {
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_q: u64,
    },
}

enum Failure {
    Input(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_input(arg: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(arg).map_err(|e| Failure::Input(format!("cannot read {arg}: {e}")))
}

fn read_weight(arg: &str) -> Result<WeightFunction, Failure> {
    Ok(parse_weight(&read_input(arg)?)?)
}

fn emit<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization cannot fail")
    );
}

fn parse_point(p: PrimeModulus, s: &str) -> Result<Point, Failure> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Failure::Input(format!("bad point {s:?}, expected x,y")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Failure::Input(format!("bad point {s:?}")))
    };
    Ok(Point::checked(p, parse(x)?, parse(y)?)?)
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Analyze { input, format } => {
            let w = read_weight(&input)?;
            let report = perfect_directions(&w)?;
            match format {
                Format::Json => emit(&report.to_doc()),
                Format::Csv => print!("{}", report.to_csv()),
            }
            Ok(())
        }
        Command::Spectrum { input } => {
            let w = read_weight(&input)?;
            let n = perfect_directions(&w)?.n;
            let spectrum = fourier_support(&w);
            let bound = check_support_bound(&w, n)?;
            emit(&json!({
                "spectrum": spectrum.to_doc(),
                "supportBound": { "N": n, "lhs": bound.lhs, "rhs": bound.rhs, "holds": bound.holds },
            }));
            if bound.holds {
                Ok(())
            } else {
                Err(Failure::Violation("support bound violated".into()))
            }
        }
        Command::Construct {
            kind,
            p,
            n,
            z,
            parallel_lines,
            check,
        } => {
            let p = PrimeModulus::new(p)?;
            let result: ConstructionResult = match kind {
                Construction::So2 => {
                    let n = n.ok_or_else(|| Failure::Input("so2 needs --n".into()))?;
                    let z = match z {
                        Some(s) => parse_point(p, &s)?,
                        None => Point::new(1, 0),
                    };
                    so2_orbit_example(p, n, z)?
                }
                Construction::Power => power_graph_example(p),
                Construction::Twolines => two_lines_example(p, parallel_lines),
                Construction::Smallsupport => small_support_example(p)?,
            };
            let outcome = if check { Some(result.check()?) } else { None };
            emit(&result.to_doc(outcome));
            match outcome {
                Some(c) if !c.ok() => Err(Failure::Violation(format!(
                    "prediction mismatch: predicted N = {}, computed N = {}, D = {}",
                    result.predicted_n, c.n, c.d
                ))),
                _ => Ok(()),
            }
        }
        Command::Verify { input } => {
            let w = read_weight(&input)?;
            let verdict = verify_main_theorem(&w)?;
            let unc = check_uncertainty(&w);
            emit(&json!({
                "verdict": {
                    "N": verdict.n,
                    "bound": format_rational(&verdict.bound),
                    "exempt": verdict.exempt,
                    "pass": verdict.pass,
                },
                "uncertainty": {
                    "lhs": format_rational(&unc.lhs),
                    "rhs": unc.rhs,
                    "holds": unc.holds,
                    "constantDirection": unc.constant_direction,
                },
            }));
            if !verdict.pass {
                Err(Failure::Violation("N exceeds |S|/2".into()))
            } else if !unc.dichotomy_satisfied() {
                Err(Failure::Violation("uncertainty dichotomy violated".into()))
            } else {
                Ok(())
            }
        }
        Command::Redei { input } => {
            let w = read_weight(&input)?;
            let pts: Vec<Point> = w.support().collect();
            let record = redei_megyesi_check(&pts, w.modulus())?;
            emit(&record);
            if record.pass {
                Ok(())
            } else {
                Err(Failure::Violation("too few determined directions".into()))
            }
        }
        Command::Search {
            input,
            parallel,
            seed,
            resume,
        } => {
            let text = read_input(&input)?;
            let mut spec: SearchSpec = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("malformed search spec: {e}")))?;
            if let (Some(s), SearchMode::Randomized { .. }) = (seed, spec.mode) {
                spec.mode = SearchMode::Randomized { seed: s };
            }
            let mut completed = BTreeSet::new();
            if let Some(path) = &resume {
                if path.exists() {
                    let text = fs::read_to_string(path).map_err(|e| {
                        Failure::Input(format!("cannot read {}: {e}", path.display()))
                    })?;
                    let ids: Vec<String> = serde_json::from_str(&text)
                        .map_err(|e| Failure::Input(format!("malformed checkpoint: {e}")))?;
                    completed.extend(ids);
                }
            }
            let opts = SearchOptions {
                completed: completed.clone(),
                threads: parallel,
            };
            let result = run_search_with(&spec, &opts)?;
            if let Some(path) = &resume {
                completed.extend(result.ranges_completed.iter().cloned());
                let ids: Vec<&String> = completed.iter().collect();
                fs::write(path, serde_json::to_string(&ids).expect("string list"))
                    .map_err(|e| Failure::Input(format!("cannot write checkpoint: {e}")))?;
            }
            emit(&result.to_doc());
            if result.witnesses_verified {
                Ok(())
            } else {
                Err(Failure::Violation(
                    "a witness failed re-verification".into(),
                ))
            }
        }
        Command::Rationalize { input, max_q } => {
            let real = RealWeightInput::parse(&read_input(&input)?)?;
            let out = rationalize(&real, max_q)?;
            let bound = format!("1/{}", 2 * real.modulus().as_u64() * out.q);
            emit(&json!({
                "q": out.q,
                "maxError": format_rational(&out.max_error),
                "errorBound": bound,
                "weight": out.weight.to_doc(),
                "integerWeight": out.integer_weight.to_doc(),
            }));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(2)
        }
    }
}
