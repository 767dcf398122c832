//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`). Tolerances are exact rational
//! equalities unless a runtime bound is stated.

use jetlct_core::fp::{
    count_jet_points, count_system_points, cusp_recursion_check, DEFAULT_BUDGET,
};
use jetlct_core::jet::{build_jet_system, JetConvention};
use jetlct_core::jet_dim::{certificate_level, check_divisor_fiber_bound, jet_dim_monomial, lct_via_jets};
use jetlct_core::newton::lct_monomial;
use jetlct_core::theorems::{sample_monomial_ideal, sample_plane_ideal};
use jetlct_core::{parse_ideal, MonomialIdeal, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::process::Command;
use std::time::{Duration, Instant};

fn rq(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn run_binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_jetlct"))
        .args(args)
        .env_remove("JETLCT_BUDGET")
        .output()
        .expect("binary runs")
}

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

impl Outcome {
    fn report(self) {
        let status = if self.passed { "PASS" } else { "FAIL" };
        println!("acceptance {}: {status} ({})", self.name, self.detail);
        assert!(self.passed, "{}: {}", self.name, self.detail);
    }
}

/// Criterion 1: the cusp threshold estimate is exactly 5/6 at the
/// normalized-max level m = 5, with cross-prime agreement at every level,
/// inside two minutes.
#[test]
fn criterion_1_cusp_lct_estimate() {
    let start = Instant::now();
    let out = run_binary(&[
        "estimate",
        "--ideal",
        "u^2 - v^3",
        "--prime",
        "5",
        "--prime",
        "7",
        "--levels",
        "8",
    ]);
    let elapsed = start.elapsed();
    let value: Value = serde_json::from_slice(&out.stdout).expect("JSON output");
    let est_exact = value["est_lct"] == "5/6";
    let best_level = value["best_level"] == 5;
    let all_agree = value["disagreeing_levels"].as_array().map(Vec::len) == Some(0);
    let in_time = elapsed < Duration::from_secs(120);
    Outcome {
        name: "1 (cusp LCT estimate)",
        passed: out.status.success() && est_exact && best_level && all_agree && in_time,
        detail: format!(
            "est_lct={} best_level={} disagreeing={} elapsed={elapsed:?}",
            value["est_lct"], value["best_level"], value["disagreeing_levels"]
        ),
    }
    .report();
}

/// Criterion 2: the six-step dimension recursion of the cusp holds on
/// dimension estimates at p = 7 through level 8, as exact integer equalities.
#[test]
fn criterion_2_cusp_recursion() {
    let recursion = cusp_recursion_check(7, 8, DEFAULT_BUDGET).expect("within budget");
    let cusp = parse_ideal("u^2 - v^3", None).unwrap();
    let report = count_jet_points(&cusp, 7, 8, false, DEFAULT_BUDGET, 1).expect("within budget");
    let e = |m: u32| report.est_dim_at(m).expect("nonzero counts");
    let jumps = e(6) == e(0) + 7 && e(7) == e(1) + 7;
    Outcome {
        name: "2 (cusp recursion)",
        passed: recursion && jumps,
        detail: format!(
            "est_dim(0..=8)={:?}",
            (0..=8).map(e).collect::<Vec<_>>()
        ),
    }
    .report();
}

/// Criterion 3: the monomial formula matches the product formula on
/// (x^2, y^3): 5/6 = 1/2 + 1/3, exactly.
#[test]
fn criterion_3_monomial_vs_product_formula() {
    let pair = MonomialIdeal::new(2, vec![vec![2, 0], vec![0, 3]]);
    let x2 = MonomialIdeal::new(1, vec![vec![2]]);
    let y3 = MonomialIdeal::new(1, vec![vec![3]]);
    let lhs = lct_monomial(&pair).unwrap().lct;
    let parts = (lct_monomial(&x2).unwrap().lct, lct_monomial(&y3).unwrap().lct);
    let sum = &parts.0 + &parts.1;
    Outcome {
        name: "3 (monomial vs product formula)",
        passed: lhs == rq(5, 6) && sum == lhs && parts.0 == rq(1, 2) && parts.1 == rq(1, 3),
        detail: format!("lct={lhs} = {} + {}", parts.0, parts.1),
    }
    .report();
}

/// Criterion 4: for 100 seeded random monomial ideals, the jet-dimension
/// formula at the certificate level reproduces the polar optimum exactly and
/// the one-sided bound holds at every level up to 30, inside five minutes.
#[test]
fn criterion_4_jet_formula_constructivity() {
    let start = Instant::now();
    let seed = 42u64;
    let mut violations = 0usize;
    let mut max_level = 0u64;
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let n = rng.gen_range(1..=4usize);
        let d = rng.gen_range(1..=6u32);
        let g = rng.gen_range(1..=5usize);
        let ideal = sample_monomial_ideal(&mut rng, n, d, g);
        let cert = lct_monomial(&ideal).unwrap();
        let required = certificate_level(&cert);
        max_level = max_level.max(required);
        // The sweep cap covers both the certificate and the required m <= 30.
        match lct_via_jets(&ideal, required.max(30)) {
            Ok(jet) => {
                if jet.lct != cert.lct {
                    violations += 1;
                }
            }
            Err(_) => violations += 1,
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        name: "4 (jet-formula constructivity)",
        passed: violations == 0 && elapsed < Duration::from_secs(300),
        detail: format!("violations={violations} max m*={max_level} elapsed={elapsed:?}"),
    }
    .report();
}

/// Criterion 5: oracle dimension estimates equal the exact integer-program
/// dimensions at every prime-agreeing level for 30 seeded plane monomial
/// ideals, with at least 95% of levels agreeing, inside five minutes.
#[test]
fn criterion_5_oracle_ip_cross_validation() {
    let start = Instant::now();
    let seed = 158u64;
    let mut agreeing = 0usize;
    let mut total = 0usize;
    let mut mismatches = 0usize;
    for trial in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let d = rng.gen_range(1..=4u32);
        let g = rng.gen_range(3..=6usize);
        let ideal = sample_monomial_ideal(&mut rng, 2, d, g);
        let as_ideal = ideal.to_ideal(None);
        let by_prime: Vec<_> = [5u64, 7]
            .iter()
            .map(|&p| count_jet_points(&as_ideal, p, 6, false, DEFAULT_BUDGET, 1).unwrap())
            .collect();
        for m in 0..=6u32 {
            total += 1;
            let ests: Vec<_> = by_prime.iter().map(|r| r.est_dim_at(m)).collect();
            if ests[0] == ests[1] {
                agreeing += 1;
                let exact = jet_dim_monomial(&ideal, m as u64, false).dim;
                if ests[0] != exact {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let agreement_ok = agreeing * 100 >= total * 95;
    Outcome {
        name: "5 (oracle/IP cross-validation)",
        passed: mismatches == 0 && agreement_ok && elapsed < Duration::from_secs(300),
        detail: format!(
            "agreeing={agreeing}/{total} est!=IP at {mismatches} levels elapsed={elapsed:?}"
        ),
    }
    .report();
}

/// Criterion 6: the full property suite at seed 42 with 200 trials reports
/// zero violations through the command line.
#[test]
fn criterion_6_property_suites() {
    let out = run_binary(&[
        "check",
        "--property",
        "all",
        "--seed",
        "42",
        "--trials",
        "200",
    ]);
    let value: Value = serde_json::from_slice(&out.stdout).expect("JSON output");
    let count = value["violations"].as_array().map(Vec::len);
    Outcome {
        name: "6 (property suites)",
        passed: out.status.code() == Some(0) && count == Some(0),
        detail: format!("exit={:?} violations={count:?}", out.status.code()),
    }
    .report();
}

/// Criterion 7: the divisor fiber bound holds for every principal monomial
/// ideal with n <= 3 and generator degree <= 5, at every level up to 20.
#[test]
fn criterion_7_divisor_fiber_bound() {
    let mut checked = 0u64;
    let mut failures = 0u64;
    for n in 1..=3usize {
        let mut b = vec![0u32; n];
        loop {
            if b.iter().any(|&e| e > 0) && b.iter().sum::<u32>() <= 5 {
                let ideal = MonomialIdeal::new(n, vec![b.clone()]);
                for m in 0..=20u64 {
                    checked += 1;
                    if !check_divisor_fiber_bound(&ideal, m).unwrap() {
                        failures += 1;
                    }
                }
            }
            let mut pos = n;
            let mut done = false;
            loop {
                if pos == 0 {
                    done = true;
                    break;
                }
                pos -= 1;
                b[pos] += 1;
                if b[pos] <= 5 {
                    break;
                }
                b[pos] = 0;
            }
            if done {
                break;
            }
        }
    }
    Outcome {
        name: "7 (divisor fiber bound)",
        passed: failures == 0 && checked > 0,
        detail: format!("{checked} (ideal, level) pairs, {failures} failures"),
    }
    .report();
}

/// Criterion 8: the derivation and coefficient jet systems have equal
/// F_p point counts for p in {11, 13} on 20 seeded plane ideals (monomial
/// and binomial), levels at most 6; exact equality of counts.
#[test]
fn criterion_8_convention_equivalence() {
    let seed = 91u64;
    let budget = 2_500_000u64;
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for trial in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let ideal = sample_plane_ideal(&mut rng, 3);
        let m = rng.gen_range(0..=6u32);
        let derivation = build_jet_system(&ideal, m, JetConvention::Derivation);
        let coefficient = build_jet_system(&ideal, m, JetConvention::Coefficient);
        for p in [11u64, 13] {
            let a = count_system_points(&derivation, p, None, budget).expect("within budget");
            let b = count_system_points(&coefficient, p, None, budget).expect("within budget");
            checked += 1;
            if a != b {
                mismatches += 1;
            }
        }
    }
    Outcome {
        name: "8 (convention equivalence)",
        passed: mismatches == 0 && checked == 40,
        detail: format!("{checked} counts compared, {mismatches} mismatches"),
    }
    .report();
}
