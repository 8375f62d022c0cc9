use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use solid_angle::MeasureMethod;
use solid_angle_cli::{input, report, run, Failure};

/// Normalized solid angles of polyhedral cones.
#[derive(Debug, Parser)]
#[command(name = "solid-angle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure every cone in a cone file.
    Measure(MeasureArgs),
    /// List the signed pieces each cone is decomposed into.
    Decompose(DecomposeArgs),
    /// Tridiagonal series diagnostics: λ_min, boundary residual, tail decay.
    Probe(ProbeArgs),
    /// Monte Carlo estimates.
    Estimate(EstimateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Cone file; `-` reads standard input.
    #[arg(default_value = "-")]
    input: String,
    /// Worker threads; 0 uses one per CPU.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the JSON report here instead of printing a table; `-` is stdout.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[command(flatten)]
    common: Common,
    /// decomp1, decomp2, decomp2-tridiag, closed-form or mc.
    #[arg(long, default_value = "decomp2-tridiag", value_parser = parse_method)]
    method: MeasureMethod,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value = "5e7", value_parser = parse_count)]
    max_terms: u64,
    /// Monte Carlo samples, for `--method mc`.
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Normalize by the sphere of the cone's linear span.
    #[arg(long)]
    span_relative: bool,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "decomp2-tridiag", value_parser = parse_method)]
    method: MeasureMethod,
    /// Re-verify the piece properties against each piece's parent.
    #[arg(long)]
    check: bool,
    /// Split badly conditioned simplices first, as `measure` does.
    #[arg(long)]
    split: bool,
}

#[derive(Debug, Args)]
struct ProbeArgs {
    #[command(flatten)]
    common: Common,
    /// Probe these couplings instead of a cone file.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Option<Vec<f64>>,
    /// Truncation cap N in every coordinate.
    #[arg(long, default_value_t = 20)]
    caps: usize,
    /// Largest shift ℓ of the ratio table.
    #[arg(long, default_value_t = 10)]
    shift: usize,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_method(s: &str) -> Result<MeasureMethod, String> {
    MeasureMethod::from_str(s).map_err(|e| e.to_string())
}

/// Positive integers, also written as `5e7`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("`{s}` is not a count"))
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("reading stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("reading {path}: {e}")))
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Input(format!("cannot start {jobs} workers: {e}")))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Measure(a) => {
            let file = input::parse(&read_input(&a.common.input)?).map_err(Failure::Input)?;
            let settings = run::MeasureSettings {
                method: a.method,
                tol: a.tol,
                max_terms: a.max_terms,
                samples: a.samples,
                seed: a.seed,
                span_relative: a.span_relative,
            };
            let out = pool(a.common.jobs)?.install(|| run::measure(&file, &settings));
            let report = run::measure_report(&a.common.input, a.common.jobs, &settings, out);
            run::emit(&report, a.common.json.as_deref(), report::measure_table)?;
            run::status(report.results.iter().map(|r| (&r.name, &r.error)))
        }
        Command::Decompose(a) => {
            let file = input::parse(&read_input(&a.common.input)?).map_err(Failure::Input)?;
            let out =
                pool(a.common.jobs)?.install(|| run::decompose(&file, a.method, a.check, a.split));
            let report = run::decompose_report(
                &a.common.input,
                a.common.jobs,
                a.method,
                a.check,
                a.split,
                out,
            );
            run::emit(&report, a.common.json.as_deref(), report::decompose_text)?;
            run::status(report.results.iter().map(|r| (&r.name, &r.error)))?;
            if report.results.iter().any(|r| r.check_passed == Some(false)) {
                eprintln!("error: piece property check failed");
                return Err(Failure::Numeric);
            }
            Ok(())
        }
        Command::Probe(a) => {
            let file = match &a.beta {
                Some(_) => None,
                None => Some(input::parse(&read_input(&a.common.input)?).map_err(Failure::Input)?),
            };
            let out = pool(a.common.jobs)?
                .install(|| run::probe(file.as_ref(), a.beta.as_deref(), a.caps, a.shift));
            let report = run::probe_report(
                &a.common.input,
                a.common.jobs,
                &a.beta,
                a.caps,
                a.shift,
                out,
            );
            run::emit(&report, a.common.json.as_deref(), report::probe_table)?;
            run::status(report.results.iter().map(|r| (&r.name, &r.error)))
        }
        Command::Estimate(a) => {
            let file = input::parse(&read_input(&a.common.input)?).map_err(Failure::Input)?;
            let out = pool(a.common.jobs)?.install(|| run::estimate(&file, a.samples, a.seed));
            let report =
                run::estimate_report(&a.common.input, a.common.jobs, a.samples, a.seed, out);
            run::emit(&report, a.common.json.as_deref(), report::estimate_table)?;
            run::status(report.results.iter().map(|r| (&r.name, &r.error)))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SOLID_ANGLE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric) => ExitCode::from(3),
    }
}
