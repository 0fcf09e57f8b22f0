use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boyd::ncmatrix::{singular_step, MatrixObservable};
use boyd::spaces::{IndexGrid, SpaceSpec};
use boyd::suites::{self, Calibration};
use boyd::{Error, StepFunction};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "boyd",
    version,
    about = "Symmetric space norms, Boyd indices and interpolation checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a step function or matrix in a symmetric space.
    Norm(NormArgs),
    /// Lower and upper Boyd indices of a space.
    Indices(IndicesArgs),
    /// Run a named verification suite and write its JSON report.
    Verify(VerifyArgs),
    /// Recompute the baselines used by the matrix suites.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct NormArgs {
    /// Space, e.g. `lp:2`, `lorentz:3,inf`, `weak-lp:3`, `orlicz:powerlog:2,1`.
    #[arg(long)]
    space: String,
    /// Step function as inline JSON `[[right, value], ...]`, or a path to
    /// a JSON or CSV (`right,value`) file.
    #[arg(
        long = "fn",
        value_name = "FN",
        conflicts_with = "matrix",
        required_unless_present = "matrix"
    )]
    function: Option<String>,
    /// Matrix as inline JSON `{"n":..,"re":..,"im":..}` or a path to one.
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Args)]
struct IndicesArgs {
    #[arg(long)]
    space: String,
    /// Dilation grid for Orlicz fits as `lo,hi,points`.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    cases: usize,
    /// Pass threshold on the largest violation margin; defaults per suite.
    #[arg(long)]
    tol: Option<f64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    cases: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// `x` rounded to 12 significant digits, printed in shortest form.
fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x > 0.0 { "inf".into() } else { x.to_string() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

/// Inline JSON, or the contents of the file it names.
fn inline_or_file(arg: &str) -> Result<(String, Option<&Path>), Failure> {
    let path = Path::new(arg);
    let looks_inline = arg.trim_start().starts_with(['[', '{']);
    if !looks_inline && path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read `{arg}`: {e}")))?;
        return Ok((text, Some(path)));
    }
    if !looks_inline {
        return Err(Failure::Usage(format!(
            "cannot parse `{arg}`: neither inline JSON nor a readable file"
        )));
    }
    Ok((arg.to_string(), None))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("cannot parse `{origin}`: {e}")))
}

fn read_function(arg: &str) -> Result<StepFunction, Failure> {
    let (text, path) = inline_or_file(arg)?;
    if path.is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))) {
        return Ok(StepFunction::from_csv(text.as_bytes())?);
    }
    parse_json(&text, arg)
}

fn norm(args: NormArgs) -> Result<(), Failure> {
    let space: SpaceSpec = args.space.parse()?;
    let f = match (&args.function, &args.matrix) {
        (Some(f), _) => read_function(f)?,
        (None, Some(m)) => {
            let (text, _) = inline_or_file(m)?;
            let x: MatrixObservable = parse_json(&text, m)?;
            singular_step(&x)
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    println!("{}", sig12(space.norm(&f)));
    Ok(())
}

fn indices(args: IndicesArgs) -> Result<(), Failure> {
    let space: SpaceSpec = args.space.parse()?;
    let grid = match &args.grid {
        Some(g) => IndexGrid::default().with_s_grid(g)?,
        None => IndexGrid::default(),
    };
    println!("{}", space.boyd_indices(&grid));
    Ok(())
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::Usage(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let Some(default_tol) = suites::default_tolerance(&args.suite) else {
        return Err(Failure::Usage(format!(
            "cannot parse `{}`: unknown suite; expected one of {}",
            args.suite,
            suites::SUITES.join(", ")
        )));
    };
    let tol = args.tol.unwrap_or(default_tol);
    let report = suites::run_suite_with(&args.suite, args.seed, args.cases, tol, &Calibration::bundled())?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_or_print(args.out.as_deref(), &json)?;
    let summary = format!(
        "{}: {} cases, {} violations, max_violation {:e} (tol {:e})",
        report.suite, report.cases, report.violation_count, report.max_violation, tol
    );
    if report.passes() {
        eprintln!("{summary}");
        Ok(())
    } else {
        Err(Failure::Violation(summary))
    }
}

fn calibrate(args: CalibrateArgs) -> Result<(), Failure> {
    let cal: Calibration = suites::calibrate(args.seed, args.cases)?;
    let json = serde_json::to_string_pretty(&cal).expect("calibration serializes");
    write_or_print(args.out.as_deref(), &json)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Norm(a) => norm(a),
        Command::Indices(a) => indices(a),
        Command::Verify(a) => verify(a),
        Command::Calibrate(a) => calibrate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
