//! Command-line front end.
//!
//! Exit codes: 0 solution(s) found or plain success, 3 provably no solution,
//! 2 usage error, 4 argument outside the engine range, 1 internal error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::engine::{
    parse_count, EngineConfig, EngineStats, PrimeEngine, LARGE_SUPPORTED_MAX, SIEVE_LIMIT_ENV,
};
use crate::error::{Error, Result};
use crate::ingest::{self, BatchReport, BatchRow, PairReport, SequenceSource, MAX_FIBONACCI_INDEX};
use crate::oracle::{self, BisectionRun};
use crate::solver::{EquationSpec, Outcome, Solver};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Solution = 0,
    Internal = 1,
    Usage = 2,
    NoSolution = 3,
    Range = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn for_error(e: &Error) -> Self {
        match e {
            Error::Range { .. } | Error::IndexRange { .. } => ExitStatus::Range,
            Error::InvalidSpec(_) | Error::Config(_) | Error::Parse { .. } | Error::Io(_) => {
                ExitStatus::Usage
            }
            _ => ExitStatus::Internal,
        }
    }

    fn for_solutions(found: bool) -> Self {
        if found {
            ExitStatus::Solution
        } else {
            ExitStatus::NoSolution
        }
    }
}

fn count_arg(s: &str) -> std::result::Result<u64, String> {
    parse_count(s).ok_or_else(|| format!("{s:?} is not a nonnegative integer"))
}

#[derive(Debug, Parser)]
#[command(
    name = "primepoint",
    version,
    about = "Solve n = a*k + b*p_k by fixed-point iteration on π"
)]
pub struct Cli {
    #[command(flatten)]
    engine: EngineArgs,

    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct EngineArgs {
    /// Highest x served by the resident prime table
    #[arg(long, global = true, env = SIEVE_LIMIT_ENV, value_parser = count_arg)]
    sieve_limit: Option<u64>,

    /// Highest argument accepted by the engine (default 1e11)
    #[arg(long, global = true, value_parser = count_arg)]
    supported_max: Option<u64>,

    /// Raise the engine ceiling to 2e14 (slow: minutes per large π evaluation)
    #[arg(long, global = true)]
    large: bool,
}

impl EngineArgs {
    fn config(&self) -> EngineConfig {
        let mut config = EngineConfig::default();
        if self.large {
            config.supported_max = LARGE_SUPPORTED_MAX;
        }
        if let Some(max) = self.supported_max {
            config.supported_max = max;
        }
        if let Some(limit) = self.sieve_limit {
            config.sieve_limit = limit;
        }
        config
    }
}

#[derive(Debug, Args, Clone, Copy)]
struct EquationArgs {
    /// Coefficient of k (nonzero)
    #[arg(short = 'a', default_value_t = 1, allow_negative_numbers = true)]
    a: i64,
    /// Coefficient of p_k (positive)
    #[arg(short = 'b', default_value_t = 1)]
    b: u64,
    /// Target value
    #[arg(short = 'n', value_parser = count_arg)]
    n: u64,
}

impl EquationArgs {
    fn spec(&self) -> Result<EquationSpec> {
        EquationSpec::new(self.a, self.b, self.n)
    }
}

#[derive(Debug, Args, Clone, Copy)]
struct TemplateArgs {
    #[arg(short = 'a', default_value_t = 1, allow_negative_numbers = true)]
    a: i64,
    #[arg(short = 'b', default_value_t = 1)]
    b: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide n = a*k + b*p_k and print the trajectory and verdict
    Solve {
        #[command(flatten)]
        eq: EquationArgs,
    },
    /// Number of primes <= x
    Pi {
        #[arg(value_parser = count_arg)]
        x: u64,
    },
    /// The k-th prime
    Nthprime {
        #[arg(value_parser = count_arg)]
        k: u64,
    },
    /// Primality of x
    Isprime {
        #[arg(value_parser = count_arg)]
        x: u64,
    },
    /// Bisection and brute-force answers for comparison
    Oracle {
        #[command(flatten)]
        eq: EquationArgs,
        /// Enumerate k in [1, K] instead of the automatic bound
        #[arg(long, value_parser = count_arg)]
        k_max: Option<u64>,
    },
    /// Fibonacci table: iterations, k* or cycle, verdict, ⌊log2 F_m⌋
    Table {
        #[arg(long, default_value_t = 42)]
        fib_max: u32,
        /// First index (default: 12, or fib-max when smaller)
        #[arg(long)]
        fib_min: Option<u32>,
        /// Omit non-solution fixed points for 15 < m <= 65
        #[arg(long)]
        compact: bool,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Solve every term of a b-file or built-in sequence
    Batch {
        #[arg(long, conflicts_with = "seq", required_unless_present = "seq")]
        bfile: Option<PathBuf>,
        /// Built-in sequence: fibonacci (A000045) or k-plus-pk (A014688)
        #[arg(long)]
        seq: Option<String>,
        /// Last index to generate for built-in sequences
        #[arg(long, default_value_t = 42)]
        max: u32,
        /// Treat consecutive terms as pairs and report which members are representable
        #[arg(long)]
        pairs: bool,
        #[command(flatten)]
        template: TemplateArgs,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub engine_build_ms: f64,
    pub solve_ms: f64,
}

/// JSON document emitted by `solve --json`.
#[derive(Debug, Serialize)]
pub struct TraceDocument {
    pub schema_version: u32,
    pub spec: EquationSpec,
    pub iterates: Vec<u64>,
    pub steps_to_settle: Option<usize>,
    pub admissible: bool,
    pub outcome: Outcome,
    pub solutions: Vec<u64>,
    pub summary: String,
    pub timings: Timings,
    pub engine: EngineConfig,
    pub engine_stats: EngineStats,
}

#[derive(Debug, Serialize)]
struct ValueDocument<T: Serialize> {
    schema_version: u32,
    query: &'static str,
    argument: u64,
    value: T,
    engine: EngineConfig,
}

#[derive(Debug, Serialize)]
struct OracleDocument {
    schema_version: u32,
    spec: EquationSpec,
    bisection: Option<BisectionRun>,
    bisection_skipped: Option<String>,
    brute_solutions: Vec<u64>,
    engine: EngineConfig,
}

#[derive(Debug, Serialize)]
pub struct TableRow {
    pub m: i64,
    pub n: u64,
    pub status: ingest::RowStatus,
    pub iterations: Option<usize>,
    pub pattern: String,
    pub solution: String,
    pub log2_n: u32,
    pub outcome: Option<Outcome>,
    pub note: Option<String>,
}

impl From<&BatchRow> for TableRow {
    fn from(r: &BatchRow) -> Self {
        TableRow {
            m: r.index,
            n: r.n,
            status: r.status,
            iterations: r.iterations,
            pattern: r
                .outcome
                .as_ref()
                .map_or_else(|| "-".to_string(), Outcome::pattern),
            solution: r.verdict_label(),
            log2_n: r.bisection_estimate,
            outcome: r.outcome.clone(),
            note: r.note.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct TableDocument {
    schema_version: u32,
    iteration_convention: &'static str,
    rows: Vec<TableRow>,
    engine: EngineConfig,
}

#[derive(Debug, Serialize)]
struct BatchDocument {
    schema_version: u32,
    #[serde(flatten)]
    report: BatchReport,
    engine: EngineConfig,
}

#[derive(Debug, Serialize)]
struct PairsDocument {
    schema_version: u32,
    source: String,
    a: i64,
    b: u64,
    pairs: Vec<PairReport>,
    engine: EngineConfig,
}

/// Parses `args` (including the program name), runs the command, writes to `out`
/// and `err`, and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    ExitStatus::Solution.code()
                }
                _ => {
                    let _ = write!(err, "{text}");
                    ExitStatus::Usage.code()
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitStatus::for_error(&e).code()
        }
    }
}

fn build_engine(args: &EngineArgs) -> Result<(PrimeEngine, f64)> {
    let start = Instant::now();
    let engine = PrimeEngine::new(args.config())?;
    Ok((engine, ms(start)))
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn emit_json<T: Serialize>(out: &mut dyn Write, doc: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| Error::Invariant(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<ExitStatus> {
    // validate cheap arguments before paying for the engine
    match &cli.command {
        Command::Solve { eq } | Command::Oracle { eq, .. } => {
            eq.spec()?;
        }
        Command::Table { fib_max, .. } if *fib_max == 0 || *fib_max > MAX_FIBONACCI_INDEX => {
            return Err(Error::InvalidSpec(format!(
                "--fib-max must lie in 1..={MAX_FIBONACCI_INDEX}"
            )));
        }
        Command::Batch { template, .. } => {
            EquationSpec::new(template.a, template.b, 1)?;
        }
        _ => {}
    }
    let (engine, build_ms) = build_engine(&cli.engine)?;
    let config = engine.config();
    match &cli.command {
        Command::Solve { eq } => cmd_solve(&engine, build_ms, eq.spec()?, cli.json, out),
        Command::Pi { x } => {
            let value = engine.pi(*x)?;
            value_out(out, cli.json, "pi", *x, value, config)
        }
        Command::Nthprime { k } => {
            let value = engine.nth_prime(*k)?;
            value_out(out, cli.json, "nthprime", *k, value, config)
        }
        Command::Isprime { x } => {
            let value = engine.is_prime(*x)?;
            value_out(out, cli.json, "isprime", *x, value, config)
        }
        Command::Oracle { eq, k_max } => cmd_oracle(&engine, eq.spec()?, *k_max, cli.json, out),
        Command::Table {
            fib_max,
            fib_min,
            compact,
            threads,
        } => {
            let min = fib_min.unwrap_or((*fib_max).min(12));
            cmd_table(&engine, min, *fib_max, *compact, *threads, cli.json, out)
        }
        Command::Batch {
            bfile,
            seq,
            max,
            pairs,
            template,
            threads,
        } => {
            let source = match (bfile, seq) {
                (Some(path), _) => {
                    let file = File::open(path).map_err(|e| {
                        Error::InvalidSpec(format!("cannot read {}: {e}", path.display()))
                    })?;
                    ingest::parse_bfile(format!("file:{}", path.display()), BufReader::new(file))?
                }
                (None, Some(name)) => builtin_sequence(&engine, name, *max)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            if *pairs {
                let reports = ingest::check_pairs(&engine, &source, template.a, template.b)?;
                pairs_out(out, cli.json, &source, template, reports, config)
            } else {
                let report = ingest::run_batch(&engine, &source, template.a, template.b, *threads)?;
                batch_out(out, cli.json, report, config)
            }
        }
    }
}

fn builtin_sequence(engine: &PrimeEngine, name: &str, max: u32) -> Result<SequenceSource> {
    match name.to_ascii_lowercase().as_str() {
        "fibonacci" | "fib" | "a000045" => ingest::fibonacci(max),
        "k-plus-pk" | "a014688" => ingest::k_plus_pk(engine, max as u64),
        other => Err(Error::InvalidSpec(format!(
            "unknown sequence {other:?} (known: fibonacci, k-plus-pk)"
        ))),
    }
}

fn cmd_solve(
    engine: &PrimeEngine,
    build_ms: f64,
    spec: EquationSpec,
    json: bool,
    out: &mut dyn Write,
) -> Result<ExitStatus> {
    let start = Instant::now();
    let solved = Solver::new(engine).solve_traced(&spec)?;
    let solve_ms = ms(start);
    let solutions = solved.outcome.solutions();
    let status = ExitStatus::for_solutions(!solutions.is_empty());
    let doc = TraceDocument {
        schema_version: SCHEMA_VERSION,
        spec,
        iterates: solved
            .trajectory
            .as_ref()
            .map(|t| t.iterates().to_vec())
            .unwrap_or_default(),
        steps_to_settle: solved.trajectory.as_ref().map(|t| t.steps_to_settle()),
        admissible: solved.trajectory.is_some(),
        summary: solved.outcome.to_string(),
        outcome: solved.outcome,
        solutions,
        timings: Timings {
            engine_build_ms: build_ms,
            solve_ms,
        },
        engine: engine.config(),
        engine_stats: engine.stats(),
    };
    if json {
        emit_json(out, &doc)?;
    } else {
        write!(out, "{}", render_trace(&doc))?;
    }
    Ok(status)
}

fn render_trace(doc: &TraceDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "equation:  {}", doc.spec);
    if doc.admissible {
        let its: Vec<String> = doc.iterates.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "iterates:  {}", its.join(" "));
        let _ = writeln!(s, "steps:     {}", doc.steps_to_settle.unwrap_or(0));
    } else {
        let _ = writeln!(s, "iterates:  (not admissible, enumerated directly)");
    }
    let _ = writeln!(
        s,
        "outcome:   {} [{}]",
        doc.summary,
        doc.outcome.variant_name()
    );
    let sols: Vec<String> = doc.solutions.iter().map(u64::to_string).collect();
    let _ = writeln!(s, "solutions: [{}]", sols.join(", "));
    let _ = writeln!(
        s,
        "engine:    sieve_limit={} supported_max={} (build {:.1} ms, solve {:.1} ms)",
        doc.engine.sieve_limit,
        doc.engine.supported_max,
        doc.timings.engine_build_ms,
        doc.timings.solve_ms
    );
    s
}

fn value_out<T: Serialize + std::fmt::Display>(
    out: &mut dyn Write,
    json: bool,
    query: &'static str,
    argument: u64,
    value: T,
    engine: EngineConfig,
) -> Result<ExitStatus> {
    if json {
        emit_json(
            out,
            &ValueDocument {
                schema_version: SCHEMA_VERSION,
                query,
                argument,
                value,
                engine,
            },
        )?;
    } else {
        writeln!(out, "{value}")?;
    }
    Ok(ExitStatus::Solution)
}

fn cmd_oracle(
    engine: &PrimeEngine,
    spec: EquationSpec,
    k_max: Option<u64>,
    json: bool,
    out: &mut dyn Write,
) -> Result<ExitStatus> {
    let (bisection, bisection_skipped) = match oracle::bisect(engine, &spec) {
        Ok(run) => (Some(run), None),
        Err(Error::InvalidSpec(why)) => (None, Some(why)),
        Err(e) => return Err(e),
    };
    let brute = oracle::brute_solutions(engine, &spec, k_max)?;
    let status = ExitStatus::for_solutions(!brute.is_empty());
    if json {
        emit_json(
            out,
            &OracleDocument {
                schema_version: SCHEMA_VERSION,
                spec,
                bisection,
                bisection_skipped,
                brute_solutions: brute,
                engine: engine.config(),
            },
        )?;
    } else {
        writeln!(out, "equation:   {spec}")?;
        match (&bisection, &bisection_skipped) {
            (Some(run), _) => writeln!(
                out,
                "bisection:  {} after {} iterations (bracket {}..{})",
                run.result
                    .map_or("no solution".to_string(), |k| format!("k = {k}")),
                run.iterations,
                run.lo,
                run.hi
            )?,
            (None, Some(why)) => writeln!(out, "bisection:  skipped ({why})")?,
            (None, None) => {}
        }
        let sols: Vec<String> = brute.iter().map(u64::to_string).collect();
        writeln!(out, "brute:      [{}]", sols.join(", "))?;
    }
    Ok(status)
}

fn cmd_table(
    engine: &PrimeEngine,
    min: u32,
    max: u32,
    compact: bool,
    threads: usize,
    json: bool,
    out: &mut dyn Write,
) -> Result<ExitStatus> {
    let source = ingest::fibonacci(max)?.index_range(min as i64, max as i64);
    let report = ingest::run_batch(engine, &source, 1, 1, threads)?;
    let rows: Vec<TableRow> = report
        .rows
        .iter()
        .filter(|r| {
            let omitted = (16..=65).contains(&r.index)
                && matches!(
                    r.outcome,
                    Some(Outcome::FixedPoint {
                        is_solution: false,
                        ..
                    })
                );
            !(compact && omitted)
        })
        .map(TableRow::from)
        .collect();
    if json {
        emit_json(
            out,
            &TableDocument {
                schema_version: SCHEMA_VERSION,
                iteration_convention: ingest::ITERATION_CONVENTION,
                rows,
                engine: engine.config(),
            },
        )?;
    } else {
        write!(out, "{}", render_table(&rows))?;
    }
    Ok(ExitStatus::Solution)
}

pub fn render_table(rows: &[TableRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<6} {:>22} {:>10}  {:<34} {:<10} {:>6}",
        "m", "F_m", "iterations", "k* or {k',k''}", "solution?", "log2"
    );
    for r in rows {
        let iterations = r.iterations.map_or("-".to_string(), |i| i.to_string());
        let pattern = r
            .note
            .clone()
            .filter(|_| r.outcome.is_none())
            .unwrap_or_else(|| r.pattern.clone());
        let _ = writeln!(
            s,
            "{:<6} {:>22} {:>10}  {:<34} {:<10} {:>6}",
            format!("F_{}", r.m),
            r.n,
            iterations,
            pattern,
            r.solution,
            r.log2_n
        );
    }
    s
}

fn batch_out(
    out: &mut dyn Write,
    json: bool,
    report: BatchReport,
    engine: EngineConfig,
) -> Result<ExitStatus> {
    if json {
        emit_json(
            out,
            &BatchDocument {
                schema_version: SCHEMA_VERSION,
                report,
                engine,
            },
        )?;
        return Ok(ExitStatus::Solution);
    }
    writeln!(
        out,
        "source: {}  equation: n = {}k + {}p_k",
        report.source, report.a, report.b
    )?;
    for r in &report.rows {
        let iterations = r.iterations.map_or("-".to_string(), |i| i.to_string());
        let detail = match (&r.outcome, &r.note) {
            (Some(o), _) => o.to_string(),
            (None, Some(note)) => note.clone(),
            (None, None) => String::new(),
        };
        writeln!(
            out,
            "{:>6} {:>22} {:>4}  {}",
            r.index, r.n, iterations, detail
        )?;
    }
    let sm = &report.summary;
    writeln!(
        out,
        "total {}: {} with solution, {} without, {} skipped, {} errors",
        sm.total, sm.with_solution, sm.without_solution, sm.skipped, sm.errors
    )?;
    Ok(ExitStatus::Solution)
}

fn pairs_out(
    out: &mut dyn Write,
    json: bool,
    source: &SequenceSource,
    template: &TemplateArgs,
    pairs: Vec<PairReport>,
    engine: EngineConfig,
) -> Result<ExitStatus> {
    if json {
        emit_json(
            out,
            &PairsDocument {
                schema_version: SCHEMA_VERSION,
                source: source.name.clone(),
                a: template.a,
                b: template.b,
                pairs,
                engine,
            },
        )?;
        return Ok(ExitStatus::Solution);
    }
    let show = |w: &[u64]| {
        if w.is_empty() {
            "-".to_string()
        } else {
            w.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        }
    };
    for p in &pairs {
        let [m1, m2] = &p.members;
        writeln!(
            out,
            "({}, {})  {:?}  witnesses: {} / {}",
            m1.n,
            m2.n,
            p.verdict,
            show(&m1.witnesses),
            show(&m2.witnesses)
        )?;
    }
    Ok(ExitStatus::Solution)
}
