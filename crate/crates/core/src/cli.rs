//! Command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input or usage, 2 boundary or
//! self-map violation, 3 solver ran out of rounds (report still printed),
//! 4 an internal check failed.

use std::io::{self, Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::counterexample::{run_demo, CounterexampleReport, DEFAULT_DEPTH};
use crate::expr::Expr;
use crate::plmap::{theorem_roundtrip, PlMap};
use crate::scalar::Rational;
use crate::solver::{self, FixPointResult, Mode, SolveError, SolveReport, SolverConfig};
use crate::sperner::{parse_labels, Grid, Labeling, LabelingError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_UNCONVERGED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Fractional digits in decimal renderings.
pub const DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Refine,
    SingleGrid,
}

#[derive(Debug, Parser)]
#[command(
    name = "sperner1d",
    version,
    about = "Exact Sperner search and certified fixed points on the line"
)]
struct Cli {
    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        env = "SPERNER1D_FORMAT",
        default_value = "human"
    )]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find a transition edge of a 0/1 labeling by scan and by bisection.
    Sperner {
        /// Comma-separated labels, e.g. 0,0,1,1.
        labels: String,
        /// Comma-separated vertex list (rational literals).
        #[arg(long, conflicts_with = "vertices_file", allow_hyphen_values = true)]
        vertices: Option<String>,
        /// File holding the comma-separated vertex list.
        #[arg(long)]
        vertices_file: Option<std::path::PathBuf>,
    },
    /// Bracket a fixed point of f on [a, b].
    Solve {
        /// Function of x, or `-` to read it from stdin.
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value = "1/1000000")]
        epsilon: String,
        /// Declared Lipschitz bound of f.
        #[arg(long)]
        lipschitz: Option<String>,
        #[arg(long, default_value_t = 2)]
        branching: usize,
        #[arg(long, default_value_t = 100)]
        max_rounds: usize,
        #[arg(long, value_enum, default_value = "refine")]
        mode: ModeArg,
    },
    /// Piecewise-linear map induced by a labeling.
    Plmap {
        labels: String,
        /// Comma-separated vertex list; defaults to 0,1,...,n.
        #[arg(long, allow_hyphen_values = true)]
        vertices: Option<String>,
        #[command(subcommand)]
        action: PlAction,
    },
    /// Bisect the fixed-point-free step map on [1, 2] over the rationals.
    Counterexample {
        #[arg(long, default_value_t = DEFAULT_DEPTH as u32, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
    },
}

#[derive(Debug, Subcommand)]
enum PlAction {
    /// Evaluate the interpolant at x.
    Eval {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// List every fixed point exactly.
    FixedPoints,
    /// Sample (x, f(x)) as CSV.
    Trace {
        #[arg(long, default_value_t = 16)]
        resolution: usize,
    },
}

/// Failure carrying its exit code; the message goes to stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn violation(message: impl ToString) -> Failure {
        Failure {
            code: EXIT_VIOLATION,
            message: message.to_string(),
        }
    }

    fn internal(message: impl ToString) -> Failure {
        Failure {
            code: EXIT_INTERNAL,
            message: message.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::internal(err)
    }
}

fn labeling_failure(err: LabelingError) -> Failure {
    match err {
        LabelingError::BoundaryViolation => Failure::violation(err),
        _ => Failure::usage(err),
    }
}

fn literal(text: &str, what: &str) -> Result<Rational, Failure> {
    text.parse()
        .map_err(|e| Failure::usage(format!("{what}: {e}")))
}

fn with_decimal(x: &Rational) -> String {
    format!("{x} (~{})", x.to_decimal(DECIMAL_DIGITS))
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli, stdin, out) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(cli: Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32, Failure> {
    let format = cli.format;
    match cli.command {
        Command::Sperner {
            labels,
            vertices,
            vertices_file,
        } => {
            let vertices = match (vertices, vertices_file) {
                (Some(v), _) => Some(v),
                (None, Some(path)) => Some(
                    std::fs::read_to_string(&path)
                        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
                ),
                (None, None) => None,
            };
            cmd_sperner(format, &labels, vertices.as_deref(), out)
        }
        Command::Solve {
            expr,
            a,
            b,
            epsilon,
            lipschitz,
            branching,
            max_rounds,
            mode,
        } => {
            let source = if expr == "-" {
                let mut text = String::new();
                stdin.read_to_string(&mut text)?;
                text
            } else {
                expr
            };
            let f = Expr::parse(source.trim())
                .map_err(|e| Failure::usage(format!("expression: {e}")))?;
            let config = SolverConfig {
                epsilon: literal(&epsilon, "epsilon")?,
                lipschitz: lipschitz
                    .as_deref()
                    .map(|l| literal(l, "lipschitz"))
                    .transpose()?,
                branching,
                max_rounds,
                mode: match mode {
                    ModeArg::Refine => Mode::Refine,
                    ModeArg::SingleGrid => Mode::SingleGrid,
                },
            };
            cmd_solve(
                format,
                &f,
                &literal(&a, "a")?,
                &literal(&b, "b")?,
                &config,
                out,
            )
        }
        Command::Plmap {
            labels,
            vertices,
            action,
        } => cmd_plmap(format, &labels, vertices.as_deref(), action, out),
        Command::Counterexample { depth } => cmd_counterexample(format, depth as usize, out),
    }
}

fn edge_record(labeling: &Labeling, grid: Option<&Grid>, edge: usize) -> serde_json::Value {
    let labels = labeling.labels();
    let mut record = json!({
        "edge": edge,
        "left_label": labels[edge - 1].to_string(),
        "right_label": labels[edge].to_string(),
    });
    if let Some(grid) = grid {
        let (lo, hi) = grid.edge(edge);
        record["lo"] = json!(lo);
        record["hi"] = json!(hi);
    }
    record
}

fn cmd_sperner(
    format: OutputFormat,
    labels: &str,
    vertices: Option<&str>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let raw = parse_labels(labels).map_err(labeling_failure)?;
    let grid = vertices
        .map(Grid::parse_csv)
        .transpose()
        .map_err(|e| Failure::usage(format!("vertices: {e}")))?;
    let labeling = match &grid {
        Some(grid) => Labeling::for_grid(raw, grid),
        None => Labeling::new(raw),
    }
    .map_err(labeling_failure)?;
    let scan = labeling.find_transition_scan();
    let (bisect, queries) = labeling.find_transition_bisect_counted();
    match format {
        OutputFormat::Json => {
            let mut doc = json!({ "scan": scan, "bisect": bisect });
            if let Some(grid) = &grid {
                doc["scan_edge"] = edge_record(&labeling, Some(grid), scan);
                doc["bisect_edge"] = edge_record(&labeling, Some(grid), bisect);
            }
            writeln!(out, "{doc}")?;
        }
        OutputFormat::Csv => {
            let with_vertices = grid.is_some();
            write!(out, "method,edge,left_label,right_label")?;
            writeln!(out, "{}", if with_vertices { ",lo,hi" } else { "" })?;
            for (method, edge) in [("scan", scan), ("bisect", bisect)] {
                let l = labeling.labels();
                write!(out, "{method},{edge},{},{}", l[edge - 1], l[edge])?;
                match &grid {
                    Some(grid) => {
                        let (lo, hi) = grid.edge(edge);
                        writeln!(out, ",{lo},{hi}")?;
                    }
                    None => writeln!(out)?,
                }
            }
        }
        OutputFormat::Human => {
            writeln!(out, "labels: {labeling}")?;
            for (method, edge, note) in [
                ("scan", scan, String::new()),
                ("bisect", bisect, format!(", {queries} label queries")),
            ] {
                let l = labeling.labels();
                write!(
                    out,
                    "{method:<7} edge {edge} (labels {} -> {}{note})",
                    l[edge - 1],
                    l[edge]
                )?;
                match &grid {
                    Some(grid) => {
                        let (lo, hi) = grid.edge(edge);
                        writeln!(out, " [{}, {}]", with_decimal(lo), with_decimal(hi))?;
                    }
                    None => writeln!(out)?,
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_solve(
    format: OutputFormat,
    f: &Expr,
    a: &Rational,
    b: &Rational,
    config: &SolverConfig,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let solution = solver::solve(f, a, b, config).map_err(|e| match e {
        SolveError::NotSelfMap { .. } => Failure::violation(e),
        _ => Failure::usage(e),
    })?;
    let report =
        SolveReport::new(&solution, config.lipschitz.as_ref()).with_decimals(DECIMAL_DIGITS);
    match format {
        OutputFormat::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        )?,
        OutputFormat::Csv => {
            writeln!(out, "mode,kind,converged,rounds_used,lo,hi,g_lo,g_hi")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                mode_name(report.mode),
                match solution.result {
                    FixPointResult::ExactVertex(_) => "exact_vertex",
                    FixPointResult::Bracket(_) => "bracket",
                },
                report.converged,
                report.rounds_used,
                report.lo,
                report.hi,
                report.g_lo,
                report.g_hi
            )?;
        }
        OutputFormat::Human => {
            writeln!(out, "mode:   {}", mode_name(report.mode))?;
            match &solution.result {
                FixPointResult::ExactVertex(x) => {
                    writeln!(
                        out,
                        "result: exact fixed point after {} rounds",
                        report.rounds_used
                    )?;
                    writeln!(out, "x:      {}", with_decimal(x))?;
                }
                FixPointResult::Bracket(bracket) => {
                    let status = if report.converged {
                        "converged"
                    } else {
                        "NOT converged"
                    };
                    writeln!(
                        out,
                        "result: certified bracket, {status} after {} rounds",
                        report.rounds_used
                    )?;
                    writeln!(out, "lo:     {}", with_decimal(&bracket.lo))?;
                    writeln!(out, "hi:     {}", with_decimal(&bracket.hi))?;
                    writeln!(out, "g(lo):  {}", with_decimal(&bracket.g_lo))?;
                    writeln!(out, "g(hi):  {}", with_decimal(&bracket.g_hi))?;
                    if let Some(bound) = &report.residual_bound {
                        writeln!(out, "|g(mid)| <= {}", with_decimal(bound))?;
                    }
                }
            }
        }
    }
    Ok(if solution.converged {
        EXIT_OK
    } else {
        EXIT_UNCONVERGED
    })
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Refine => "refine",
        Mode::SingleGrid => "single_grid",
    }
}

fn cmd_plmap(
    format: OutputFormat,
    labels: &str,
    vertices: Option<&str>,
    action: PlAction,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let raw = parse_labels(labels).map_err(labeling_failure)?;
    let grid = match vertices {
        Some(v) => Grid::parse_csv(v).map_err(|e| Failure::usage(format!("vertices: {e}")))?,
        None => Grid::new((0..raw.len() as i64).map(Rational::from).collect())
            .map_err(|e| Failure::usage(format!("labels: {e}")))?,
    };
    let labeling = Labeling::for_grid(raw, &grid).map_err(labeling_failure)?;
    let map = PlMap::from_labeling(&grid, &labeling).map_err(labeling_failure)?;
    match action {
        PlAction::Eval { x } => {
            let x = literal(&x, "x")?;
            let fx = map.evaluate(&x).map_err(Failure::usage)?;
            match format {
                OutputFormat::Json => writeln!(out, "{}", json!({ "x": x, "fx": fx }))?,
                OutputFormat::Csv => writeln!(out, "x,fx\n{x},{fx}")?,
                OutputFormat::Human => writeln!(out, "f({x}) = {}", with_decimal(&fx))?,
            }
        }
        PlAction::FixedPoints => {
            let report = theorem_roundtrip(&grid, &labeling).map_err(Failure::internal)?;
            match format {
                OutputFormat::Json => {
                    let xs: Vec<&Rational> = report.fixed_points.iter().map(|w| &w.x).collect();
                    writeln!(
                        out,
                        "{}",
                        serde_json::to_string(&xs).expect("literals serialize")
                    )?;
                }
                OutputFormat::Csv => {
                    writeln!(out, "x,edge,left_label,right_label")?;
                    for w in &report.fixed_points {
                        writeln!(out, "{},{},{},{}", w.x, w.edge, w.left_label, w.right_label)?;
                    }
                }
                OutputFormat::Human => {
                    for w in &report.fixed_points {
                        let (lo, hi) = grid.edge(w.edge);
                        writeln!(
                            out,
                            "{} on edge {} [{lo}, {hi}] (labels {} -> {})",
                            with_decimal(&w.x),
                            w.edge,
                            w.left_label,
                            w.right_label
                        )?;
                    }
                }
            }
        }
        PlAction::Trace { resolution } => {
            if resolution == 0 {
                return Err(Failure::usage("resolution must be positive"));
            }
            let csv = map.trace_csv(resolution);
            match format {
                OutputFormat::Json => {
                    let rows: Vec<_> = csv
                        .lines()
                        .skip(1)
                        .map(|line| {
                            let (x, fx) = line.split_once(',').expect("two columns");
                            json!({ "x": x, "fx": fx })
                        })
                        .collect();
                    writeln!(out, "{}", serde_json::Value::Array(rows))?;
                }
                OutputFormat::Csv | OutputFormat::Human => out.write_all(csv.as_bytes())?,
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RoundRecord<'a> {
    depth: usize,
    lo: &'a Rational,
    hi: &'a Rational,
    g_lo: &'a Rational,
    g_hi: &'a Rational,
    width: Rational,
    midpoint: &'a Rational,
    midpoint_residual: &'a Rational,
    residual_floor_check: bool,
    contains_sqrt2: bool,
    decimal: RoundDecimals,
}

#[derive(Serialize)]
struct RoundDecimals {
    lo: String,
    hi: String,
    width: String,
    midpoint: String,
    midpoint_residual: String,
}

impl<'a> From<&'a CounterexampleReport> for RoundRecord<'a> {
    fn from(r: &'a CounterexampleReport) -> Self {
        let width = r.bracket.width();
        RoundRecord {
            depth: r.depth,
            lo: &r.bracket.lo,
            hi: &r.bracket.hi,
            g_lo: &r.bracket.g_lo,
            g_hi: &r.bracket.g_hi,
            midpoint: &r.midpoint,
            midpoint_residual: &r.midpoint_residual,
            residual_floor_check: r.residual_floor_check,
            contains_sqrt2: r.contains_sqrt2,
            decimal: RoundDecimals {
                lo: r.bracket.lo.to_decimal(DECIMAL_DIGITS),
                hi: r.bracket.hi.to_decimal(DECIMAL_DIGITS),
                width: width.to_decimal(DECIMAL_DIGITS),
                midpoint: r.midpoint.to_decimal(DECIMAL_DIGITS),
                midpoint_residual: r.midpoint_residual.to_decimal(DECIMAL_DIGITS),
            },
            width,
        }
    }
}

fn cmd_counterexample(
    format: OutputFormat,
    depth: usize,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let reports = run_demo(depth).map_err(Failure::internal)?;
    match format {
        OutputFormat::Json => {
            let records: Vec<RoundRecord> = reports.iter().map(RoundRecord::from).collect();
            writeln!(
                out,
                "{}",
                serde_json::to_string(&records).expect("records serialize")
            )?;
        }
        OutputFormat::Csv => {
            writeln!(out, "depth,width,abs_residual")?;
            for r in &reports {
                writeln!(
                    out,
                    "{},{},{}",
                    r.depth,
                    r.bracket.width(),
                    r.midpoint_residual.abs()
                )?;
            }
        }
        OutputFormat::Human => {
            writeln!(
                out,
                "f(x) = {} on [1, 2] over the rationals",
                crate::counterexample::counterexample_expr()
            )?;
            for r in &reports {
                writeln!(
                    out,
                    "depth {:>2}  width {}  |g(mid)| {}  floor {}  sqrt2 inside {}",
                    r.depth,
                    r.bracket.width().to_decimal(DECIMAL_DIGITS),
                    r.midpoint_residual.abs().to_decimal(DECIMAL_DIGITS),
                    if r.residual_floor_check { "ok" } else { "FAIL" },
                    if r.contains_sqrt2 { "yes" } else { "NO" },
                )?;
            }
        }
    }
    if reports.iter().all(CounterexampleReport::holds) {
        Ok(EXIT_OK)
    } else {
        Err(Failure::internal("a round assertion failed"))
    }
}
