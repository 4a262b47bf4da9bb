mod common;

use std::io::Cursor;
use std::thread;

use proptest::prelude::*;

use common::{small_engine, small_sieve, solution_table};
use primepoint::ingest::{self, parse_bfile, SequenceSource, Term};
use primepoint::oracle::brute_solutions;
use primepoint::solver::{Outcome, Settled, Solver};
use primepoint::EquationSpec;

fn spec(a: i64, b: u64, n: u64) -> EquationSpec {
    EquationSpec::new(a, b, n).unwrap()
}

#[test]
fn pi_steps_by_zero_or_one_and_matches_primality() {
    let engine = small_engine();
    let sieve = small_sieve();
    // crosses the small engine's table limit
    let mut prev = engine.pi(900_000).unwrap();
    for x in 900_001..=1_100_000 {
        let cur = engine.pi(x).unwrap();
        assert_eq!(cur - prev, sieve.is_prime(x) as u64, "x = {x}");
        prev = cur;
    }
}

#[test]
fn n_prime_is_the_largest_reachable_value() {
    let engine = small_engine();
    let solver = Solver::new(engine);
    let primes = small_sieve().primes();
    // best[n] = max{j + p_j <= n}
    let n_max = 100_000usize;
    let mut best = vec![0u64; n_max + 1];
    for (i, &p) in primes.iter().enumerate() {
        let v = i + 1 + p as usize;
        if v > n_max {
            break;
        }
        best[v] = v as u64;
    }
    for n in 1..=n_max {
        best[n] = best[n].max(best[n - 1]);
    }
    for n in 4..=n_max as u64 {
        if let Outcome::FixedPoint {
            n_prime,
            is_solution,
            ..
        } = solver.solve(&spec(1, 1, n)).unwrap()
        {
            assert_eq!(n_prime, best[n as usize], "n = {n}");
            assert_eq!(is_solution, n_prime == n);
        }
    }
}

#[test]
fn unit_two_cycles_certify_no_solution() {
    let engine = small_engine();
    let solver = Solver::new(engine);
    let sieve = small_sieve();
    let table = solution_table(&sieve.primes(), 1, 1, 100_000);
    let mut cycles = 0;
    for n in 4..=100_000u64 {
        let solved = solver.solve_traced(&spec(1, 1, n)).unwrap();
        if let Some(Settled::Cycle { lo, hi }) = solved.trajectory.map(|t| t.settled()) {
            assert_eq!(hi, lo + 1);
            assert!(sieve.is_prime(n - lo), "n = {n}");
            assert!(table[n as usize].is_empty(), "n = {n}");
            cycles += 1;
        }
    }
    assert!(cycles > 1000);
}

#[test]
fn complete_for_small_coefficients() {
    let engine = small_engine();
    let solver = Solver::new(engine);
    let primes = small_sieve().primes();
    for a in 1..=4i64 {
        for b in 1..=3u64 {
            let table = solution_table(&primes, a, b, 5000);
            for n in 1..=5000u64 {
                let got = solver.solve(&spec(a, b, n)).unwrap().solutions();
                assert_eq!(got, table[n as usize], "({a},{b},{n})");
                assert!(got.len() <= 1, "a > 0 admits at most one solution");
            }
        }
    }
}

/// For negative a every solution lies strictly above the starting point `π(n/b)`.
#[test]
fn negative_solutions_lie_above_the_start() {
    let engine = small_engine();
    let solver = Solver::new(engine);
    let primes = small_sieve().primes();
    for a in -6..=-1i64 {
        for b in 1..=4u64 {
            let table = solution_table(&primes, a, b, 5000);
            for n in 1..=5000u64 {
                let s = spec(a, b, n);
                let k0 = solver.start(&s).unwrap();
                assert!(table[n as usize].iter().all(|&k| k > k0), "({a},{b},{n})");
                assert_eq!(
                    solver.solve(&s).unwrap().solutions(),
                    table[n as usize],
                    "({a},{b},{n})"
                );
            }
        }
    }
}

#[test]
fn concurrent_queries_agree() {
    let engine = small_engine();
    let points: Vec<u64> = (0..64).map(|i| 3_000_000 + i * 7_919_113).collect();
    let expected: Vec<u64> = points.iter().map(|&x| engine.pi(x).unwrap()).collect();
    thread::scope(|s| {
        for t in 0..4 {
            let points = &points;
            let expected = &expected;
            s.spawn(move || {
                for (i, &x) in points.iter().enumerate().rev().skip(t) {
                    assert_eq!(engine.pi(x).unwrap(), expected[i]);
                    assert_eq!(
                        engine
                            .pi(engine.nth_prime(expected[i].max(1)).unwrap())
                            .unwrap(),
                        expected[i].max(1)
                    );
                }
            });
        }
    });
}

#[test]
fn batch_is_deterministic_across_thread_counts() {
    let engine = small_engine();
    let source = ingest::fibonacci(40).unwrap();
    let one = ingest::run_batch(engine, &source, 1, 1, 1).unwrap();
    let many = ingest::run_batch(engine, &source, 1, 1, 4).unwrap();
    assert_eq!(one, many);
    assert_eq!(one.summary.total, 40);
}

#[test]
fn k_plus_pk_terms_are_all_solutions() {
    let engine = small_engine();
    let source = ingest::k_plus_pk(engine, 500).unwrap();
    let report = ingest::run_batch(engine, &source, 1, 1, 0).unwrap();
    for row in &report.rows {
        assert_eq!(row.solutions, vec![row.index as u64]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn nth_prime_and_pi_are_inverse(k in 1u64..2_000_000) {
        let engine = small_engine();
        let p = engine.nth_prime(k).unwrap();
        prop_assert!(engine.is_prime(p).unwrap());
        prop_assert_eq!(engine.pi(p).unwrap(), k);
        prop_assert_eq!(engine.pi(p - 1).unwrap(), k - 1);
    }

    #[test]
    fn solver_agrees_with_brute(a in prop_oneof![-5i64..=-1, 1i64..=9], b in 1u64..=4, n in 1u64..200_000) {
        let engine = small_engine();
        let s = spec(a, b, n);
        let got = Solver::new(engine).solve(&s).unwrap().solutions();
        prop_assert_eq!(got, brute_solutions(engine, &s, None).unwrap());
    }

    #[test]
    fn alternation_holds(a in 1i64..=9, b in 1u64..=4, n in 1_000u64..50_000_000) {
        let engine = small_engine();
        let s = spec(a, b, n);
        let solver = Solver::new(engine);
        if let Some(traj) = solver.solve_traced(&s).unwrap().trajectory {
            let k = traj.iterates();
            for j in 1..k.len() {
                if j % 2 == 1 {
                    prop_assert!(k[j] <= k[j - 1]);
                } else {
                    prop_assert!(k[j] >= k[j - 1]);
                }
                if j >= 2 {
                    let ordered = if j % 2 == 0 { k[j] <= k[j - 2] } else { k[j] >= k[j - 2] };
                    prop_assert!(ordered, "iterates {:?}", k);
                }
            }
            prop_assert!(traj.steps_to_settle() <= s.iteration_budget());
        }
    }

    #[test]
    fn bfile_round_trip(values in prop::collection::vec(any::<u64>(), 0..50), start in -5i64..100) {
        let terms: Vec<Term> =
            values.iter().enumerate().map(|(i, &v)| Term { index: start + i as i64, value: v }).collect();
        let source = SequenceSource::new("rt", terms);
        let text = format!("# comment\n\n{}", source.to_bfile());
        let parsed = parse_bfile("rt", Cursor::new(text)).unwrap();
        prop_assert_eq!(parsed, source);
    }
}

#[test]
fn bfile_rejects_malformed_lines() {
    for (text, line) in [
        ("1 2\n1 3\n", 2),
        ("1 2 3\n", 1),
        ("x 2\n", 1),
        ("1 -2\n", 1),
        ("1 2\n\n3\n", 3),
    ] {
        match parse_bfile("bad", Cursor::new(text)) {
            Err(primepoint::Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}
