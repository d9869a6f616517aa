//! The `twoview` command-line tool.
//!
//! Subcommands: `triangulate` (single or JSON-lines batch), `verify` (exact
//! identity suite, genericity census and oracle agreement), `synth`
//! (deterministic synthetic datasets) and `bench` (timing percentiles).
//!
//! Exit codes: 0 on success, 1 on input or I/O errors, 2 when a problem has
//! no real feasible critical point, 3 when a `verify` check fails.

mod bench;
mod records;
mod synth;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::triangulate::{triangulate, TriangulateConfig, TriangulationError};

pub use records::{PointRecord, ProblemInput, ResultRecord, SynthRecord, TruthRecord};
pub use verify::{run_verify, Check, VerifyReport};

#[derive(Debug, Parser)]
#[command(name = "twoview", version, about = "Optimal two-view triangulation through the Lagrange multiplier sextic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangulate one problem or a JSON-lines batch.
    Triangulate(TriangulateArgs),
    /// Run the exact identity suite, the genericity census and oracle agreement.
    Verify(VerifyArgs),
    /// Write a deterministic JSON-lines dataset of synthetic problems.
    Synth(SynthArgs),
    /// Time `triangulate` over a dataset and report percentiles.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct TriangulateArgs {
    /// Path to a JSON or JSON-lines file, inline JSON, or `-` for stdin.
    #[arg(default_value = "-")]
    pub input: String,
    /// Include every critical point, complex ones with imaginary parts.
    #[arg(long)]
    pub all: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Scale applied to root_tol, real_tol and kkt_tol together.
    #[arg(long, default_value_t = 1.0)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    pub n_instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Noise level of the census and oracle instances.
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
    /// Instances compared against the brute-force oracle (defaults to all).
    #[arg(long)]
    pub oracle_instances: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// JSON-lines dataset; synthesized from --n/--seed/--noise when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("MalformedJson: {context}: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error("{context}: {source}")]
    Geometry { context: String, source: GeometryError },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error("EmptyInput: no problems found")]
    EmptyInput,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_MINIMIZER: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Parses `args` (program name first) and runs the command. Normal output
/// goes to `out` unless redirected by `--out`; diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ =
                if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Triangulate(a) => cmd_triangulate(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Synth(a) => synth::cmd_synth(&a, out).map(|_| EXIT_OK),
        Command::Bench(a) => bench::cmd_bench(&a, out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn read_input(input: &str) -> Result<String, CliError> {
    if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    if input.trim_start().starts_with('{') {
        return Ok(input.to_string());
    }
    let path = PathBuf::from(input);
    fs::read_to_string(&path).map_err(|source| CliError::Read { path, source })
}

/// A whole-document JSON object, or else one object per non-empty line.
pub fn parse_problems(text: &str) -> Result<Vec<ProblemInput>, CliError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(CliError::EmptyInput);
    }
    match serde_json::from_str::<ProblemInput>(trimmed) {
        Ok(p) => return Ok(vec![p]),
        Err(e) if !trimmed.contains('\n') => {
            return Err(CliError::Json { context: "input".into(), source: e });
        }
        Err(_) => {}
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            serde_json::from_str(l).map_err(|source| CliError::Json { context: format!("line {}", k + 1), source })
        })
        .collect()
}

fn open_output<'a>(path: &Option<PathBuf>, out: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    match path {
        Some(p) => {
            let f = fs::File::create(p).map_err(|source| CliError::Write { path: p.clone(), source })?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(out)),
    }
}

fn write_failed(path: &Option<PathBuf>) -> impl Fn(io::Error) -> CliError + '_ {
    move |source| match path {
        Some(p) => CliError::Write { path: p.clone(), source },
        None => CliError::Io(source),
    }
}

fn cmd_triangulate(a: &TriangulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(CliError::InvalidArgument(format!("--tol must be a positive scale, got {}", a.tol)));
    }
    let inputs = parse_problems(&read_input(&a.input)?)?;
    let batch = inputs.len() > 1;
    let problems = inputs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            p.to_problem().map_err(|source| CliError::Geometry {
                context: if batch { format!("line {}", k + 1) } else { "input".into() },
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let cfg = TriangulateConfig::default().with_tol_scale(a.tol);
    let outcomes: Vec<Result<ResultRecord, TriangulationError>> = problems
        .par_iter()
        .map(|p| match triangulate(p, &cfg) {
            Ok(r) => Ok(ResultRecord::from_result(&r, a.all, None)),
            Err(e) => match &e {
                TriangulationError::NoRealCriticalPoint(r) => {
                    Ok(ResultRecord::from_result(r, a.all, Some(e.to_string())))
                }
                _ => Err(e),
            },
        })
        .collect();

    let mut records = Vec::with_capacity(outcomes.len());
    let mut code = EXIT_OK;
    for (k, o) in outcomes.into_iter().enumerate() {
        let where_ = if batch { format!("line {}: ", k + 1) } else { String::new() };
        match o {
            Ok(r) => {
                if let Some(e) = &r.error {
                    writeln!(err, "error: {where_}{e}")?;
                    code = EXIT_NO_MINIMIZER;
                }
                records.push(r);
            }
            Err(e) => {
                writeln!(err, "error: {where_}{e}")?;
                return Ok(EXIT_INPUT);
            }
        }
    }

    let mut w = open_output(&a.out, out)?;
    match a.format {
        Format::Json => {
            for r in &records {
                let line = serde_json::to_string(r).expect("records hold only finite numbers");
                writeln!(w, "{line}").map_err(write_failed(&a.out))?;
            }
        }
        Format::Csv => records::write_csv(&mut w, &records, a.all, batch)?,
    }
    w.flush().map_err(write_failed(&a.out))?;
    Ok(code)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(a.noise >= 0.0 && a.noise.is_finite()) {
        return Err(CliError::InvalidArgument(format!("--noise must be finite and >= 0, got {}", a.noise)));
    }
    let report = run_verify(a.n_instances, a.seed, a.noise, a.oracle_instances.unwrap_or(a.n_instances));
    write!(out, "{report}")?;
    Ok(verify_exit_code(&report))
}

fn verify_exit_code(report: &VerifyReport) -> i32 {
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Reads a JSON-lines file into problems (used by `bench`).
fn read_dataset(path: &Path) -> Result<Vec<ProblemInput>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_problems(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_check_maps_to_exit_code() {
        let check = |passed| Check { name: "c".into(), passed, total: 2, required: 2 };
        let pass = VerifyReport { checks: vec![check(2)] };
        let fail = VerifyReport { checks: vec![check(2), check(1)] };
        assert_eq!(verify_exit_code(&pass), EXIT_OK);
        assert_eq!(verify_exit_code(&fail), EXIT_CHECK_FAILED);
        assert!(fail.to_string().contains("FAIL  c"));
    }

    #[test]
    fn batch_lines_and_single_documents() {
        let one = "{\"F\": [[0, 0, 0], [0, 0, -1], [0, 1, 0]],\n \"u1\": [0, 0], \"u2\": [1, 0]}";
        assert_eq!(parse_problems(one).unwrap().len(), 1);
        let line = "{\"F\": [[0, 0, 0], [0, 0, -1], [0, 1, 0]], \"u1\": [0, 0], \"u2\": [1, 0]}";
        assert_eq!(parse_problems(&format!("{line}\n\n{line}\n")).unwrap().len(), 2);
        assert!(matches!(parse_problems("  \n"), Err(CliError::EmptyInput)));
        let err = parse_problems(&format!("{line}\n{{oops")).unwrap_err();
        assert!(err.to_string().starts_with("MalformedJson: line 2"), "{err}");
    }
}
