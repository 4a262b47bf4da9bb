//! Sequence sources and batch runs: OEIS b-files, built-in generators, amicable
//! pairs.

use std::io::BufRead;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::PrimeEngine;
use crate::error::{Error, Result};
use crate::solver::{EquationSpec, Outcome, Solver};

/// How `iterations` is counted in every report: step applications after `k_0` until
/// the settled pattern is first confirmed, i.e. `j + 1` when `k_{j+1} = k_j` and
/// `j + 2` when `k_{j+2} = k_j`.
pub const ITERATION_CONVENTION: &str =
    "steps after k_0 until k_{j+1} = k_j (fixed point) or k_{j+2} = k_j (cycle) is first observed";

/// Largest Fibonacci index whose value fits comfortably in 64 bits.
pub const MAX_FIBONACCI_INDEX: u32 = 90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Term {
    pub index: i64,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceSource {
    pub name: String,
    pub terms: Vec<Term>,
}

impl SequenceSource {
    pub fn new(name: impl Into<String>, terms: Vec<Term>) -> Self {
        SequenceSource {
            name: name.into(),
            terms,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms whose index lies in `[lo, hi]`.
    pub fn index_range(&self, lo: i64, hi: i64) -> SequenceSource {
        let terms = self
            .terms
            .iter()
            .copied()
            .filter(|t| (lo..=hi).contains(&t.index))
            .collect();
        SequenceSource {
            name: self.name.clone(),
            terms,
        }
    }

    /// b-file text, one `index value` line per term.
    pub fn to_bfile(&self) -> String {
        self.terms
            .iter()
            .map(|t| format!("{} {}\n", t.index, t.value))
            .collect()
    }
}

/// Parses OEIS b-file text: `index value` per line, `#` comments and blank lines
/// ignored, indices strictly increasing.
pub fn parse_bfile<R: BufRead>(name: impl Into<String>, reader: R) -> Result<SequenceSource> {
    let mut terms: Vec<Term> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let mut tokens = body.split_whitespace();
        let (Some(idx), Some(val), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(err(format!("expected `index value`, got {body:?}")));
        };
        let index: i64 = idx
            .parse()
            .map_err(|_| err(format!("index {idx:?} is not an integer")))?;
        let value: u64 = val
            .parse()
            .map_err(|_| err(format!("value {val:?} is not a nonnegative 64-bit integer")))?;
        if let Some(prev) = terms.last() {
            if index <= prev.index {
                return Err(err(format!(
                    "index {index} does not increase (previous {})",
                    prev.index
                )));
            }
        }
        terms.push(Term { index, value });
    }
    Ok(SequenceSource::new(name, terms))
}

/// `F_1 = F_2 = 1`, ..., through `F_upto` (A000045 indexing, `F_12 = 144`).
pub fn fibonacci(upto_index: u32) -> Result<SequenceSource> {
    if upto_index == 0 || upto_index > MAX_FIBONACCI_INDEX {
        return Err(Error::InvalidSpec(format!(
            "Fibonacci index must lie in 1..={MAX_FIBONACCI_INDEX}, got {upto_index}"
        )));
    }
    let mut terms = Vec::with_capacity(upto_index as usize);
    let (mut prev, mut cur) = (0u64, 1u64);
    for m in 1..=upto_index {
        terms.push(Term {
            index: m as i64,
            value: cur,
        });
        (prev, cur) = (cur, prev + cur);
    }
    Ok(SequenceSource::new("A000045", terms))
}

/// `k + p_k` for `k = 1..=count` (A014688).
pub fn k_plus_pk(engine: &PrimeEngine, count: u64) -> Result<SequenceSource> {
    let terms = engine
        .primes_from(2)
        .take(count as usize)
        .zip(1u64..)
        .map(|(p, k)| Term {
            index: k as i64,
            value: k + p,
        })
        .collect::<Vec<_>>();
    if (terms.len() as u64) < count {
        return Err(Error::Range {
            value: count,
            limit: engine.supported_max(),
        });
    }
    Ok(SequenceSource::new("A014688", terms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairVerdict {
    Both,
    One,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairMember {
    pub n: u64,
    /// Solutions `k` of `n = a k + b p_k`.
    pub witnesses: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub members: [PairMember; 2],
    pub verdict: PairVerdict,
}

/// Solves `m = a k + b p_k` for both members of a pair.
pub fn check_pair(engine: &PrimeEngine, m1: u64, m2: u64, a: i64, b: u64) -> Result<PairReport> {
    let solver = Solver::new(engine);
    let member = |n| -> Result<PairMember> {
        let outcome = solver.solve(&EquationSpec::new(a, b, n)?)?;
        Ok(PairMember {
            n,
            witnesses: outcome.solutions(),
        })
    };
    let members = [member(m1)?, member(m2)?];
    let verdict = match members.iter().filter(|m| !m.witnesses.is_empty()).count() {
        2 => PairVerdict::Both,
        1 => PairVerdict::One,
        _ => PairVerdict::Neither,
    };
    Ok(PairReport { members, verdict })
}

/// Pairs consecutive terms `(t_1, t_2), (t_3, t_4), ...` as A259180 lists them.
pub fn check_pairs(
    engine: &PrimeEngine,
    source: &SequenceSource,
    a: i64,
    b: u64,
) -> Result<Vec<PairReport>> {
    if !source.terms.len().is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!(
            "{} has an odd number of terms ({}), cannot form pairs",
            source.name,
            source.terms.len()
        )));
    }
    source
        .terms
        .chunks(2)
        .map(|pair| check_pair(engine, pair[0].value, pair[1].value, a, b))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Solution,
    NoSolution,
    Skipped,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchRow {
    pub index: i64,
    pub n: u64,
    pub status: RowStatus,
    /// Step count under [`ITERATION_CONVENTION`]; absent for enumerated or failed rows.
    pub iterations: Option<usize>,
    pub outcome: Option<Outcome>,
    pub solutions: Vec<u64>,
    /// `⌊log2 n⌋`, the bisection cost estimate for comparison.
    pub bisection_estimate: u32,
    pub note: Option<String>,
}

impl BatchRow {
    /// The "is k* a solution?" column: yes/no for fixed points, `---` for cycles.
    pub fn verdict_label(&self) -> String {
        match &self.outcome {
            Some(Outcome::TwoCycle { .. }) => "---".into(),
            Some(Outcome::GapCycle {
                interior_solutions, ..
            }) if interior_solutions.is_empty() => "---".into(),
            Some(o) if o.has_solution() => "yes".into(),
            Some(_) => "no".into(),
            None => "-".into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub total: usize,
    pub with_solution: usize,
    pub without_solution: usize,
    pub skipped: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchReport {
    pub source: String,
    pub a: i64,
    pub b: u64,
    pub iteration_convention: &'static str,
    pub rows: Vec<BatchRow>,
    pub summary: BatchSummary,
}

fn floor_log2(n: u64) -> u32 {
    if n == 0 {
        0
    } else {
        63 - n.leading_zeros()
    }
}

fn run_row(solver: &Solver<'_>, term: Term, a: i64, b: u64) -> BatchRow {
    let mut row = BatchRow {
        index: term.index,
        n: term.value,
        status: RowStatus::Error,
        iterations: None,
        outcome: None,
        solutions: Vec::new(),
        bisection_estimate: floor_log2(term.value),
        note: None,
    };
    if term.value > solver.engine().supported_max() {
        row.status = RowStatus::Skipped;
        row.note = Some("skipped(range)".into());
        return row;
    }
    let solved = EquationSpec::new(a, b, term.value).and_then(|spec| solver.solve_traced(&spec));
    match solved {
        Ok(solved) => {
            row.iterations = solved.trajectory.as_ref().map(|t| t.steps_to_settle());
            row.solutions = solved.outcome.solutions();
            row.status = if row.solutions.is_empty() {
                RowStatus::NoSolution
            } else {
                RowStatus::Solution
            };
            row.outcome = Some(solved.outcome);
        }
        Err(e) if e.is_range() => {
            row.status = RowStatus::Skipped;
            row.note = Some(format!("skipped(range): {e}"));
        }
        Err(e) => row.note = Some(e.to_string()),
    }
    row
}

/// Solves every term of `source` for the template `(a, b)`. Rows come back in source
/// order; `threads` bounds the worker pool (0 = available parallelism).
pub fn run_batch(
    engine: &PrimeEngine,
    source: &SequenceSource,
    a: i64,
    b: u64,
    threads: usize,
) -> Result<BatchReport> {
    let solver = Solver::new(engine);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Invariant(format!("worker pool: {e}")))?;
    let rows: Vec<BatchRow> = pool.install(|| {
        source
            .terms
            .par_iter()
            .map(|&t| run_row(&solver, t, a, b))
            .collect()
    });
    let mut summary = BatchSummary {
        total: rows.len(),
        ..Default::default()
    };
    for row in &rows {
        match row.status {
            RowStatus::Solution => summary.with_solution += 1,
            RowStatus::NoSolution => summary.without_solution += 1,
            RowStatus::Skipped => summary.skipped += 1,
            RowStatus::Error => summary.errors += 1,
        }
    }
    Ok(BatchReport {
        source: source.name.clone(),
        a,
        b,
        iteration_convention: ITERATION_CONVENTION,
        rows,
        summary,
    })
}
