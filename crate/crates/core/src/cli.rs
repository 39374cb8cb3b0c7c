//! Command-line front end.
//!
//! Every subcommand emits a table, either CSV (17 significant digits, `.`
//! decimal separator) or JSON lines. Exit codes: 0 success, 1 usage or
//! validation error, 2 verification failure, 3 unattainable tolerance.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::lattice::{classify, kissing_number, packing_density};
use crate::limits::{verify_a_to_inf, verify_a_to_zero, verify_s_to_inf, LimitReport};
use crate::minimum::{
    default_scan_tol, density_table, scan_l, uniform_grid, verify_theorem_with, TheoremOptions,
    DEFAULT_TOL_FIRST, DEFAULT_TOL_SECOND_REL,
};
use crate::zeta::{epstein_zeta, epstein_zeta_transformed, SumSpec, ZetaValue};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_UNATTAINABLE: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CUBOIDAL_THREADS";

/// Grid of the lattice-sum figure: `A = 1/3 + k/60`, `k = 0..=40`.
pub const FIGURE2_STEPS: usize = 41;
pub const FIGURE2_EXPONENTS: [f64; 3] = [3.0, 6.0, 20.0];

#[derive(Debug, Parser)]
#[command(
    name = "cuboidal",
    version,
    about = "Lattice sums, packing density and kissing numbers of cuboidal lattices"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write the table here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One value of L(A; s) with its tail bound.
    Eval(EvalArgs),
    /// L(A; s) on a uniform grid of A.
    Scan(ScanArgs),
    /// Check the stationary minimum at A = 1/2.
    Verify(VerifyArgs),
    /// Packing density at a point or on a grid.
    Density(DensityArgs),
    /// Kissing number by enumeration.
    Kissing(KissingArgs),
    /// Degenerate limits A -> inf, A -> 0 and s -> inf.
    Limits(LimitsArgs),
    /// The three lattice-sum curves plus the kissing-number curve.
    Figure2(Figure2Args),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Anisotropy A, decimal or exact fraction "p/q".
    #[arg(long = "A", value_parser = parse_anisotropy, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    /// Relative tail tolerance (default 1e-8 for s >= 4, else 1e-6).
    #[arg(long, conflicts_with = "cutoff", allow_hyphen_values = true)]
    pub tol: Option<f64>,
    /// Fixed cube half-width N instead of a tolerance.
    #[arg(long)]
    pub cutoff: Option<u32>,
    /// Sum in the permuted coordinates (I,J,K) = (i-j, -k, j).
    #[arg(long)]
    pub transformed: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, value_parser = parse_anisotropy, default_value = "1/3", allow_hyphen_values = true)]
    pub min: f64,
    #[arg(long, value_parser = parse_anisotropy, default_value = "1", allow_hyphen_values = true)]
    pub max: f64,
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
    /// Relative tail tolerance per row.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_FIRST, allow_hyphen_values = true)]
    pub tol_first: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_SECOND_REL, allow_hyphen_values = true)]
    pub tol_second_rel: f64,
    /// Common cutoff for all series and stencil points.
    #[arg(long, default_value_t = TheoremOptions::default().cutoff)]
    pub cutoff: u32,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Single point; otherwise the grid flags are used.
    #[arg(long = "A", value_parser = parse_anisotropy, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, value_parser = parse_anisotropy, default_value = "1/10", allow_hyphen_values = true)]
    pub min: f64,
    #[arg(long, value_parser = parse_anisotropy, default_value = "3/2", allow_hyphen_values = true)]
    pub max: f64,
    #[arg(long, default_value_t = 15)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct KissingArgs {
    #[arg(long = "A", value_parser = parse_anisotropy, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1e-9, allow_hyphen_values = true)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    AToInf,
    AToZero,
    SToInf,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    /// Exponent for the A -> inf comparison.
    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    pub s: f64,
    /// Anisotropy for the s -> inf comparison.
    #[arg(long = "A", value_parser = parse_anisotropy, default_value = "1/2", allow_hyphen_values = true)]
    pub a: f64,
    /// Comma-separated probe values (A for the A limits, s for s -> inf).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub probes: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct Figure2Args {}

/// Parse `A` from a decimal or an exact fraction `p/q`. The fraction is
/// converted to a float once, so `1/3` lands exactly on the boundary value.
pub fn parse_anisotropy(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p
                .trim()
                .parse()
                .map_err(|_| format!("bad fraction numerator in '{text}'"))?;
            let q: i64 = q
                .trim()
                .parse()
                .map_err(|_| format!("bad fraction denominator in '{text}'"))?;
            if q == 0 {
                return Err(format!("zero denominator in '{text}'"));
            }
            p as f64 / q as f64
        }
        None => text
            .parse::<f64>()
            .map_err(|_| format!("'{text}' is not a number or fraction p/q"))?,
    };
    Ok(value)
}

/// `%.17g`-style formatting: 17 significant digits, trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exp}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(format_float(*x))),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str(&self.header.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Format::Jsonl => {
                for row in &self.rows {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), v.json()))
                        .collect();
                    out.push_str(&Value::Object(obj).to_string());
                    out.push('\n');
                }
            }
        }
        out
    }
}

pub const ZETA_HEADER: [&str; 5] = ["A", "s", "value", "tail_bound", "cutoff"];

fn zeta_row(a: f64, s: f64, z: &ZetaValue) -> Vec<Cell> {
    vec![
        Cell::Float(a),
        Cell::Float(s),
        Cell::Float(z.value),
        Cell::Float(z.tail_bound),
        Cell::Int(z.cutoff_used as u64),
    ]
}

/// A failure with the flag it should be reported against.
#[derive(Debug)]
struct Failure {
    flag: &'static str,
    error: Error,
}

fn on(flag: &'static str) -> impl Fn(Error) -> Failure {
    move |error| Failure { flag, error }
}

/// Pick the flag that caused an engine error.
fn blame(error: Error, default: &'static str) -> Failure {
    let flag = match &error {
        Error::InvalidAnisotropy(_) | Error::RegimeMismatch { .. } => "--A",
        Error::Divergent { .. } => "--s",
        Error::InvalidCutoff(_) => "--cutoff",
        Error::InvalidTolerance(_) | Error::CutoffCapExceeded { .. } | Error::GateExceeded { .. } => {
            "--tol"
        }
        Error::InvalidGrid(_) => "--min/--max/--steps",
        Error::InvalidProbes(_) => "--probes",
    };
    Failure {
        flag: if flag == "--tol" { default } else { flag },
        error,
    }
}

struct Outcome {
    table: Table,
    passed: bool,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self {
            table,
            passed: true,
        }
    }
}

fn eval(args: &EvalArgs) -> Result<Outcome, Failure> {
    let param = classify(args.a).map_err(on("--A"))?;
    let spec = match (args.cutoff, args.tol) {
        (Some(n), _) => SumSpec::cutoff(n),
        (None, Some(t)) => SumSpec::rel_tol(t),
        (None, None) => SumSpec::rel_tol(default_scan_tol(args.s)),
    };
    let flag = if args.cutoff.is_some() { "--cutoff" } else { "--tol" };
    let z = if args.transformed {
        epstein_zeta_transformed(&param, args.s, &spec)
    } else {
        epstein_zeta(&param, args.s, &spec)
    }
    .map_err(|e| blame(e, flag))?;
    let mut table = Table::new(&ZETA_HEADER);
    table.push(zeta_row(args.a, args.s, &z));
    Ok(Outcome::ok(table))
}

fn scan(args: &ScanArgs) -> Result<Outcome, Failure> {
    let tol = args.tol.unwrap_or_else(|| default_scan_tol(args.s));
    let t = scan_l(args.s, args.min, args.max, args.steps, tol).map_err(|e| blame(e, "--tol"))?;
    let mut table = Table::new(&ZETA_HEADER);
    for r in &t.rows {
        table.push(vec![
            Cell::Float(r.a),
            Cell::Float(args.s),
            Cell::Float(r.value),
            Cell::Float(r.tail_bound),
            Cell::Int(r.cutoff as u64),
        ]);
    }
    Ok(Outcome::ok(table))
}

fn verify(args: &VerifyArgs) -> Result<Outcome, Failure> {
    let opts = TheoremOptions {
        cutoff: args.cutoff,
        ..TheoremOptions::default()
    };
    let report = verify_theorem_with(args.s, args.tol_first, args.tol_second_rel, &opts)
        .map_err(|e| blame(e, "--tol-first/--tol-second-rel"))?;
    let mut table = Table::new(&["s", "check", "value", "threshold", "passed"]);
    for c in &report.checks {
        table.push(vec![
            Cell::Float(report.s),
            Cell::Text(c.name.to_string()),
            Cell::Float(c.value),
            Cell::Float(c.threshold),
            Cell::Bool(c.passed),
        ]);
    }
    Ok(Outcome {
        table,
        passed: report.passed,
    })
}

fn density(args: &DensityArgs) -> Result<Outcome, Failure> {
    let mut table = Table::new(&["A", "density"]);
    match args.a {
        Some(a) => {
            let param = classify(a).map_err(on("--A"))?;
            table.push(vec![Cell::Float(a), Cell::Float(packing_density(&param))]);
        }
        None => {
            for row in density_table(args.min, args.max, args.steps).map_err(|e| blame(e, "--min"))? {
                table.push(vec![Cell::Float(row.a), Cell::Float(row.density)]);
            }
        }
    }
    Ok(Outcome::ok(table))
}

fn kissing(args: &KissingArgs) -> Result<Outcome, Failure> {
    let param = classify(args.a).map_err(on("--A"))?;
    let k = kissing_number(&param, args.tol).map_err(on("--tol"))?;
    let mut table = Table::new(&["A", "kissing_number"]);
    table.push(vec![Cell::Float(args.a), Cell::Int(k as u64)]);
    Ok(Outcome::ok(table))
}

fn limits(args: &LimitsArgs) -> Result<Outcome, Failure> {
    let report: LimitReport = match args.direction {
        Direction::AToInf => {
            let probes = args.probes.clone().unwrap_or_else(|| vec![4.0, 16.0, 64.0]);
            verify_a_to_inf(args.s, &probes).map_err(|e| blame(e, "--s"))?
        }
        Direction::AToZero => {
            let probes = args.probes.clone().unwrap_or_else(|| vec![0.3, 0.1, 0.01]);
            verify_a_to_zero(&probes).map_err(|e| blame(e, "--probes"))?
        }
        Direction::SToInf => {
            let probes = args.probes.clone().unwrap_or_else(|| vec![10.0, 20.0, 50.0]);
            verify_s_to_inf(args.a, &probes).map_err(|e| blame(e, "--probes"))?
        }
    };
    let name = match args.direction {
        Direction::AToInf => "a_to_inf",
        Direction::AToZero => "a_to_zero",
        Direction::SToInf => "s_to_inf",
    };
    let mut table = Table::new(&[
        "direction",
        "probe",
        "deviation",
        "tail_bound",
        "threshold",
        "converged",
    ]);
    for ((p, d), t) in report
        .probes
        .iter()
        .zip(&report.deviations)
        .zip(&report.tail_bounds)
    {
        table.push(vec![
            Cell::Text(name.into()),
            Cell::Float(*p),
            Cell::Float(*d),
            Cell::Float(*t),
            Cell::Float(report.threshold),
            Cell::Bool(report.converged),
        ]);
    }
    Ok(Outcome {
        table,
        passed: report.converged,
    })
}

fn figure2() -> Result<Outcome, Failure> {
    let mut table = Table::new(&ZETA_HEADER);
    for s in FIGURE2_EXPONENTS {
        let t = scan_l(s, 1.0 / 3.0, 1.0, FIGURE2_STEPS, default_scan_tol(s))
            .map_err(|e| blame(e, "--tol"))?;
        for r in &t.rows {
            table.push(vec![
                Cell::Float(r.a),
                Cell::Float(s),
                Cell::Float(r.value),
                Cell::Float(r.tail_bound),
                Cell::Int(r.cutoff as u64),
            ]);
        }
    }
    for a in uniform_grid(1.0 / 3.0, 1.0, FIGURE2_STEPS) {
        let k = kissing_number(&classify(a).map_err(on("--A"))?, 1e-9).map_err(on("--tol"))?;
        table.push(vec![
            Cell::Float(a),
            Cell::Float(f64::INFINITY),
            Cell::Float(k as f64),
            Cell::Float(0.0),
            Cell::Int(0),
        ]);
    }
    Ok(Outcome::ok(table))
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a pool may already exist when called repeatedly in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn write_output(cli: &Cli, text: &str, stdout: &mut dyn Write) -> io::Result<()> {
    match &cli.output {
        Some(path) => File::create(path)?.write_all(text.as_bytes()),
        None => stdout.write_all(text.as_bytes()),
    }
}

/// Parse arguments, run the subcommand and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    configure_threads();
    let outcome = match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Scan(a) => scan(a),
        Command::Verify(a) => verify(a),
        Command::Density(a) => density(a),
        Command::Kissing(a) => kissing(a),
        Command::Limits(a) => limits(a),
        Command::Figure2(_) => figure2(),
    };
    match outcome {
        Ok(out) => {
            if let Err(e) = write_output(&cli, &out.table.render(cli.format), stdout) {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_USAGE;
            }
            if out.passed {
                EXIT_OK
            } else {
                let _ = writeln!(stderr, "verification failed");
                EXIT_VERIFY_FAILED
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}: {}", f.flag, f.error);
            if f.error.is_unattainable() {
                EXIT_UNATTAINABLE
            } else {
                EXIT_USAGE
            }
        }
    }
}
