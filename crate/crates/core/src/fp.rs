//! Brute-force counting of truncated arcs over small prime fields.
//!
//! A level-`m` arc on the subscheme cut out by an ideal is an assignment of
//! `m+1` coefficients per variable with every generator vanishing mod
//! `t^(m+1)`. Arcs are counted level by level: the degree-`m` coefficient
//! equation of a fixed level-`(m-1)` arc is affine in the `n` new top
//! coefficients, with linear part the Jacobian at the base point, so each
//! parent contributes either nothing or `p^(n - rank)` extensions. The search
//! materializes every arc below the target level and counts the final
//! extensions in closed form per parent; the budget caps the number of
//! materialized candidates.
//!
//! Counts are exact cardinalities. The derived `est_dim = round(log_p count)`
//! is a heuristic dimension estimate; it is validated by cross-prime
//! agreement and is known to overshoot when many top-dimensional components
//! pile up, which is why it is never consumed by an exact path.

use crate::jet::JetSystem;
use crate::newton::LctValue;
use crate::parse::parse_ideal;
use crate::poly::{Ideal, Polynomial, Rational};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

/// Largest admissible prime; keeps all modular products inside `u64`.
pub const MAX_PRIME: u64 = 1 << 20;

/// Default cap on materialized arc candidates.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    NotPrime(u64),
    PrimeTooLarge(u64),
    DenominatorDivisibleByPrime { prime: u64 },
    BudgetExceeded { partial: FpCountReport },
    /// No level had matching dimension estimates across the supplied primes.
    Inconclusive,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::NotPrime(p) => write!(f, "{p} is not prime"),
            OracleError::PrimeTooLarge(p) => write!(f, "prime {p} exceeds the cap {MAX_PRIME}"),
            OracleError::DenominatorDivisibleByPrime { prime } => {
                write!(f, "a coefficient denominator is divisible by {prime}")
            }
            OracleError::BudgetExceeded { partial } => write!(
                f,
                "candidate budget exhausted after {} levels",
                partial.levels.len()
            ),
            OracleError::Inconclusive => {
                write!(f, "no level had matching estimates across all primes")
            }
        }
    }
}

impl std::error::Error for OracleError {}

/// Exact arc count at one level with the heuristic dimension estimate;
/// `est_dim` is absent when the count is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpLevelCount {
    pub level: u32,
    pub count: BigUint,
    pub est_dim: Option<i64>,
}

/// Per-prime counting report. `levels` holds every fully counted level in
/// order; a budget abort leaves the completed prefix in place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpCountReport {
    pub prime: u64,
    pub fiber_over_origin: bool,
    pub levels: Vec<FpLevelCount>,
    /// Materialized candidates charged against the budget.
    pub visited: u64,
}

impl FpCountReport {
    pub fn est_dim_at(&self, level: u32) -> Option<i64> {
        self.levels
            .iter()
            .find(|l| l.level == level)
            .and_then(|l| l.est_dim)
    }
}

/// Multi-prime estimate of the threshold from normalized dimension
/// estimates, an estimate by construction: only levels where every prime
/// reports the same `est_dim` participate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LctEstimateReport {
    pub ambient_dim: usize,
    pub m_max: u32,
    pub fiber_over_origin: bool,
    pub reports: Vec<FpCountReport>,
    pub agreeing_levels: Vec<u32>,
    pub disagreeing_levels: Vec<u32>,
    pub est_lct: LctValue,
    /// Level attaining the maximal normalized estimate, when finite.
    pub best_level: Option<u32>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// A polynomial with coefficients reduced into `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPolynomial {
    pub prime: u64,
    /// `(coefficient, exponent vector)`; zero coefficients dropped.
    pub terms: Vec<(u64, Vec<u32>)>,
}

impl FpPolynomial {
    pub fn reduce(poly: &Polynomial, prime: u64) -> Result<FpPolynomial, OracleError> {
        let big_p = num_bigint::BigInt::from(prime);
        let mut terms = Vec::with_capacity(poly.num_terms());
        for (coeff, mono) in poly.terms() {
            let den = coeff.denom().mod_floor(&big_p).to_u64().unwrap();
            if den == 0 {
                return Err(OracleError::DenominatorDivisibleByPrime { prime });
            }
            let num = coeff.numer().mod_floor(&big_p).to_u64().unwrap();
            let c = num * inv_mod(den, prime) % prime;
            if c != 0 {
                terms.push((c, mono.exponents().to_vec()));
            }
        }
        Ok(FpPolynomial { prime, terms })
    }

    /// Value at a point with all coordinates already reduced mod `p`.
    pub fn eval(&self, point: &[u64]) -> u64 {
        let p = self.prime;
        let mut total = 0u64;
        for (c, exps) in &self.terms {
            let mut v = *c;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    v = v * pow_mod(point[i], e as u64, p) % p;
                }
            }
            total = (total + v) % p;
        }
        total
    }

    /// Partial derivative evaluated at a point.
    fn derivative_eval(&self, var: usize, point: &[u64]) -> u64 {
        let p = self.prime;
        let mut total = 0u64;
        for (c, exps) in &self.terms {
            let e = exps[var];
            if e == 0 {
                continue;
            }
            let mut v = *c * (e as u64 % p) % p;
            for (i, &ei) in exps.iter().enumerate() {
                let ei = if i == var { ei - 1 } else { ei };
                if ei > 0 {
                    v = v * pow_mod(point[i], ei as u64, p) % p;
                }
            }
            total = (total + v) % p;
        }
        total
    }
}

struct FpIdeal {
    prime: u64,
    n: usize,
    generators: Vec<FpPolynomial>,
}

impl FpIdeal {
    fn reduce(ideal: &Ideal, prime: u64) -> Result<FpIdeal, OracleError> {
        Ok(FpIdeal {
            prime,
            n: ideal.ambient_dim(),
            generators: ideal
                .generators()
                .iter()
                .map(|g| FpPolynomial::reduce(g, prime))
                .collect::<Result<_, _>>()?,
        })
    }
}

/// Disjoint mutable views of two rows of a matrix.
fn split_rows(rows: &mut [Vec<u64>], source: usize, target: usize) -> (&[u64], &mut [u64]) {
    debug_assert_ne!(source, target);
    if source < target {
        let (head, tail) = rows.split_at_mut(target);
        (&head[source], &mut tail[0])
    } else {
        let (head, tail) = rows.split_at_mut(source);
        (&tail[0], &mut head[target])
    }
}

/// Reduced row echelon form of the Jacobian at one base point, with the row
/// transform recorded so each parent's right-hand side can be checked for
/// consistency and solved in place.
struct AffineSolver {
    p: u64,
    rank: usize,
    rref: Vec<Vec<u64>>,
    transform: Vec<Vec<u64>>,
    pivot_cols: Vec<usize>,
    free_cols: Vec<usize>,
}

impl AffineSolver {
    fn new(p: u64, jacobian: Vec<Vec<u64>>, n: usize) -> AffineSolver {
        let g = jacobian.len();
        let mut rref = jacobian;
        let mut transform: Vec<Vec<u64>> = (0..g)
            .map(|i| (0..g).map(|j| u64::from(i == j)).collect())
            .collect();
        let mut pivot_cols = Vec::new();
        let mut row = 0usize;
        for col in 0..n {
            let Some(pivot) = (row..g).find(|&r| rref[r][col] != 0) else {
                continue;
            };
            rref.swap(row, pivot);
            transform.swap(row, pivot);
            let inv = inv_mod(rref[row][col], p);
            for v in rref[row].iter_mut() {
                *v = *v * inv % p;
            }
            for v in transform[row].iter_mut() {
                *v = *v * inv % p;
            }
            for r in 0..g {
                if r == row || rref[r][col] == 0 {
                    continue;
                }
                let factor = rref[r][col];
                let (source, target) = split_rows(&mut rref, row, r);
                for (slot, &v) in target.iter_mut().zip(source.iter()) {
                    *slot = (*slot + p - factor * v % p) % p;
                }
                let (source, target) = split_rows(&mut transform, row, r);
                for (slot, &v) in target.iter_mut().zip(source.iter()) {
                    *slot = (*slot + p - factor * v % p) % p;
                }
            }
            pivot_cols.push(col);
            row += 1;
            if row == g {
                break;
            }
        }
        let rank = row;
        let free_cols = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        AffineSolver {
            p,
            rank,
            rref,
            transform,
            pivot_cols,
            free_cols,
        }
    }

    /// Applies the recorded row transform to `rhs` into `out` and reports
    /// whether the system is consistent.
    fn transform_rhs(&self, rhs: &[u64], out: &mut Vec<u64>) -> bool {
        out.clear();
        for row in &self.transform {
            let mut acc = 0u64;
            for (&t, &r) in row.iter().zip(rhs) {
                if t != 0 && r != 0 {
                    acc = (acc + t * r) % self.p;
                }
            }
            out.push(acc);
        }
        out[self.rank..].iter().all(|&v| v == 0)
    }

    /// Writes the solution for the given free-column assignment into `x`.
    fn solution(&self, transformed: &[u64], free_values: &[u64], x: &mut [u64]) {
        let p = self.p;
        for (slot, &col) in free_values.iter().zip(&self.free_cols) {
            x[col] = *slot;
        }
        for (r, &col) in self.pivot_cols.iter().enumerate() {
            let mut v = transformed[r];
            for (&f, &fv) in self.free_cols.iter().zip(free_values) {
                if self.rref[r][f] != 0 && fv != 0 {
                    v = (v + p - self.rref[r][f] * fv % p) % p;
                }
            }
            x[col] = v;
        }
    }
}

/// Truncated product `out = a * b mod t^len` over `F_p`; coefficients of the
/// inputs must already be reduced.
fn trunc_mul(a: &[u64], b: &[u64], out: &mut [u64], p: u64) {
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0u64;
        for i in 0..=k {
            let ai = a[i];
            if ai != 0 {
                acc += ai * b[k - i];
            }
        }
        *slot = acc % p;
    }
}

/// Arc coefficients during the depth-first walk, one series per variable.
struct ArcState {
    coeffs: Vec<Vec<u64>>,
}

impl ArcState {
    fn new(base: &[u64]) -> ArcState {
        ArcState {
            coeffs: base.iter().map(|&v| vec![v]).collect(),
        }
    }

    fn push(&mut self, values: &[u64]) {
        for (series, &v) in self.coeffs.iter_mut().zip(values) {
            series.push(v);
        }
    }

    fn pop(&mut self) {
        for series in self.coeffs.iter_mut() {
            series.pop();
        }
    }

    fn depth(&self) -> usize {
        self.coeffs[0].len()
    }
}

struct Scratch {
    acc: Vec<u64>,
    tmp: Vec<u64>,
    series: Vec<u64>,
    rhs: Vec<u64>,
    transformed: Vec<u64>,
    child: Vec<u64>,
}

impl Scratch {
    fn new(n: usize) -> Scratch {
        Scratch {
            acc: Vec::new(),
            tmp: Vec::new(),
            series: Vec::new(),
            rhs: Vec::new(),
            transformed: Vec::new(),
            child: vec![0; n],
        }
    }
}

/// Coefficient of `t^level` in a generator evaluated on the arc extended by
/// zero at the top order.
fn generator_rhs(
    gen: &FpPolynomial,
    arc: &ArcState,
    level: usize,
    scratch: &mut Scratch,
    p: u64,
) -> u64 {
    let len = level + 1;
    let mut total = 0u64;
    for (coeff, exps) in &gen.terms {
        scratch.acc.clear();
        scratch.acc.resize(len, 0);
        scratch.acc[0] = *coeff;
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            scratch.series.clear();
            scratch.series.extend_from_slice(&arc.coeffs[i]);
            scratch.series.resize(len, 0);
            for _ in 0..e {
                scratch.tmp.clear();
                scratch.tmp.resize(len, 0);
                trunc_mul(&scratch.acc, &scratch.series, &mut scratch.tmp, p);
                std::mem::swap(&mut scratch.acc, &mut scratch.tmp);
            }
        }
        total = (total + scratch.acc[level]) % p;
    }
    total
}

struct BudgetGate<'a> {
    visited: &'a AtomicU64,
    budget: u64,
    abort: &'a AtomicBool,
}

impl BudgetGate<'_> {
    /// Charges one candidate; false once the budget is gone.
    fn charge(&self) -> bool {
        if self.visited.fetch_add(1, Ordering::Relaxed) + 1 > self.budget {
            self.abort.store(true, Ordering::Relaxed);
            return false;
        }
        !self.abort.load(Ordering::Relaxed)
    }
}

/// Counts the level-`target` extensions below one materialized arc.
fn dfs_count(
    sys: &FpIdeal,
    solver: &AffineSolver,
    arc: &mut ArcState,
    target: u32,
    gate: &BudgetGate,
    scratch: &mut Scratch,
) -> Result<u128, ()> {
    let p = sys.prime;
    let level = arc.depth();
    scratch.rhs.clear();
    for gen in &sys.generators {
        let d = generator_rhs(gen, arc, level, scratch, p);
        scratch.rhs.push((p - d) % p);
    }
    let mut transformed = std::mem::take(&mut scratch.transformed);
    let consistent = solver.transform_rhs(&scratch.rhs, &mut transformed);
    if !consistent {
        scratch.transformed = transformed;
        return Ok(0);
    }
    let k = solver.free_cols.len();
    if level as u32 == target {
        scratch.transformed = transformed;
        return Ok((p as u128).pow(k as u32));
    }

    let mut total = 0u128;
    let mut free_values = vec![0u64; k];
    let mut child = std::mem::take(&mut scratch.child);
    child.clear();
    child.resize(sys.n, 0);
    loop {
        if !gate.charge() {
            scratch.transformed = transformed;
            scratch.child = child;
            return Err(());
        }
        solver.solution(&transformed, &free_values, &mut child);
        arc.push(&child);
        let sub = dfs_count(sys, solver, arc, target, gate, scratch);
        arc.pop();
        match sub {
            Ok(c) => total += c,
            Err(()) => {
                scratch.transformed = transformed;
                scratch.child = child;
                return Err(());
            }
        }
        // Odometer over the free coordinates.
        let mut pos = k;
        loop {
            if pos == 0 {
                scratch.transformed = transformed;
                scratch.child = child;
                return Ok(total);
            }
            pos -= 1;
            free_values[pos] += 1;
            if free_values[pos] < p {
                break;
            }
            free_values[pos] = 0;
        }
    }
}

fn enumerate_base_points(
    sys: &FpIdeal,
    fiber_over_origin: bool,
    gate: &BudgetGate,
) -> Result<Vec<Vec<u64>>, ()> {
    let p = sys.prime;
    let n = sys.n;
    let mut out = Vec::new();
    if fiber_over_origin {
        if !gate.charge() {
            return Err(());
        }
        let origin = vec![0u64; n];
        if sys.generators.iter().all(|g| g.eval(&origin) == 0) {
            out.push(origin);
        }
        return Ok(out);
    }
    let mut point = vec![0u64; n];
    loop {
        if !gate.charge() {
            return Err(());
        }
        if sys.generators.iter().all(|g| g.eval(&point) == 0) {
            out.push(point.clone());
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            point[pos] += 1;
            if point[pos] < p {
                break;
            }
            point[pos] = 0;
        }
    }
}

fn count_at_level(
    sys: &FpIdeal,
    bases: &[(Vec<u64>, AffineSolver)],
    target: u32,
    gate: &BudgetGate,
    threads: usize,
) -> Result<u128, ()> {
    if target == 0 {
        return Ok(bases.len() as u128);
    }
    let work = |slice: &[(Vec<u64>, AffineSolver)]| -> Result<u128, ()> {
        let mut scratch = Scratch::new(sys.n);
        let mut total = 0u128;
        for (base, solver) in slice {
            let mut arc = ArcState::new(base);
            total += dfs_count(sys, solver, &mut arc, target, gate, &mut scratch)?;
        }
        Ok(total)
    };
    if threads <= 1 || bases.len() < 2 {
        return work(bases);
    }
    let chunk = bases.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = bases
            .chunks(chunk)
            .map(|slice| scope.spawn(move || work(slice)))
            .collect();
        let mut total = 0u128;
        for h in handles {
            total += h.join().expect("worker panicked")?;
        }
        Ok(total)
    })
}

fn estimate_dimension(count: &BigUint, p: u64) -> Option<i64> {
    if count.is_zero() {
        return None;
    }
    let bits = count.bits();
    let log2 = if bits <= 53 {
        (count.to_u64().unwrap() as f64).log2()
    } else {
        let shift = bits - 53;
        let top = (count >> shift).to_u64().unwrap() as f64;
        top.log2() + shift as f64
    };
    Some((log2 / (p as f64).log2()).round() as i64)
}

fn validate_prime(p: u64) -> Result<(), OracleError> {
    if !is_prime(p) {
        return Err(OracleError::NotPrime(p));
    }
    if p >= MAX_PRIME {
        return Err(OracleError::PrimeTooLarge(p));
    }
    Ok(())
}

/// Counts arcs on the subscheme of `ideal` over `F_p` at every level up to
/// `m_max`, materializing candidates level by level against the budget.
/// Counting runs in the arc-coefficient presentation, which is valid in any
/// characteristic. A budget abort reports the completed levels.
pub fn count_jet_points(
    ideal: &Ideal,
    prime: u64,
    m_max: u32,
    fiber_over_origin: bool,
    budget: u64,
    threads: usize,
) -> Result<FpCountReport, OracleError> {
    validate_prime(prime)?;
    let sys = FpIdeal::reduce(ideal, prime)?;
    let visited = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let gate = BudgetGate {
        visited: &visited,
        budget,
        abort: &abort,
    };

    let mut report = FpCountReport {
        prime,
        fiber_over_origin,
        levels: Vec::with_capacity(m_max as usize + 1),
        visited: 0,
    };

    let bases = match enumerate_base_points(&sys, fiber_over_origin, &gate) {
        Ok(b) => b,
        Err(()) => {
            report.visited = visited.load(Ordering::Relaxed);
            return Err(OracleError::BudgetExceeded { partial: report });
        }
    };
    let bases: Vec<(Vec<u64>, AffineSolver)> = bases
        .into_iter()
        .map(|point| {
            let jacobian: Vec<Vec<u64>> = sys
                .generators
                .iter()
                .map(|g| (0..sys.n).map(|i| g.derivative_eval(i, &point)).collect())
                .collect();
            let solver = AffineSolver::new(prime, jacobian, sys.n);
            (point, solver)
        })
        .collect();

    for target in 0..=m_max {
        match count_at_level(&sys, &bases, target, &gate, threads) {
            Ok(count) => {
                let count = BigUint::from(count);
                let est_dim = estimate_dimension(&count, prime);
                report.levels.push(FpLevelCount {
                    level: target,
                    count,
                    est_dim,
                });
            }
            Err(()) => {
                report.visited = visited.load(Ordering::Relaxed);
                return Err(OracleError::BudgetExceeded { partial: report });
            }
        }
    }
    report.visited = visited.load(Ordering::Relaxed);
    Ok(report)
}

/// Threshold estimate across several primes: `n` minus the best normalized
/// dimension estimate over the levels where every prime agrees. Disagreeing
/// levels are excluded and reported.
pub fn estimate_lct(
    ideal: &Ideal,
    primes: &[u64],
    m_max: u32,
    fiber_over_origin: bool,
    budget: u64,
    threads: usize,
) -> Result<LctEstimateReport, OracleError> {
    assert!(!primes.is_empty(), "at least one prime required");
    let mut reports = Vec::with_capacity(primes.len());
    for &p in primes {
        reports.push(count_jet_points(
            ideal,
            p,
            m_max,
            fiber_over_origin,
            budget,
            threads,
        )?);
    }

    let mut agreeing = Vec::new();
    let mut disagreeing = Vec::new();
    for m in 0..=m_max {
        let first = reports[0].est_dim_at(m);
        if reports.iter().all(|r| r.est_dim_at(m) == first) {
            agreeing.push(m);
        } else {
            disagreeing.push(m);
        }
    }
    if agreeing.is_empty() {
        return Err(OracleError::Inconclusive);
    }

    let mut best: Option<(Rational, u32)> = None;
    for &m in &agreeing {
        if let Some(est) = reports[0].est_dim_at(m) {
            let normalized = Rational::new(est.into(), (m as i64 + 1).into());
            match &best {
                Some((value, _)) if *value >= normalized => {}
                _ => best = Some((normalized, m)),
            }
        }
    }
    let n = ideal.ambient_dim();
    let (est_lct, best_level) = match best {
        // Every agreeing level was empty: the subscheme misses the locus.
        None => (LctValue::Infinite, None),
        Some((normalized, level)) => (
            LctValue::Finite(Rational::from_integer((n as i64).into()) - normalized),
            Some(level),
        ),
    };

    Ok(LctEstimateReport {
        ambient_dim: n,
        m_max,
        fiber_over_origin,
        reports,
        agreeing_levels: agreeing,
        disagreeing_levels: disagreeing,
        est_lct,
        best_level,
    })
}

/// Verifies the six-step dimension recursion of the cuspidal curve
/// `u^2 = v^3` on dimension estimates: `est_dim(m) = est_dim(m-6) + 7` for
/// all `6 <= m <= m_max`.
pub fn cusp_recursion_check(prime: u64, m_max: u32, budget: u64) -> Result<bool, OracleError> {
    assert!(m_max >= 8, "recursion needs at least levels 0..=8");
    let cusp = parse_ideal("u^2 - v^3", None).expect("fixed input");
    let report = count_jet_points(&cusp, prime, m_max, false, budget, 1)?;
    for m in 6..=m_max {
        let (Some(now), Some(then)) = (report.est_dim_at(m), report.est_dim_at(m - 6)) else {
            return Ok(false);
        };
        if now != then + 7 {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Generic counter over an explicit jet system, used to compare the two
// presentations: it reads the equations as given, level by level, without
// assuming where their linear structure comes from.
// ---------------------------------------------------------------------------

struct CompiledTerm {
    coeff: u64,
    /// Factors over variables of order below the current level.
    known: Vec<(usize, u32)>,
    /// Factors over the current level's variables, by base index.
    top: Vec<(usize, u32)>,
}

struct CompiledEquation {
    terms: Vec<CompiledTerm>,
    nonlinear: bool,
}

/// Counts `F_p` points of an explicit jet system, optionally only over one
/// base point. Returns the exact solution count of the full system.
pub fn count_system_points(
    system: &JetSystem,
    prime: u64,
    base_point: Option<&[u64]>,
    budget: u64,
) -> Result<BigUint, OracleError> {
    validate_prime(prime)?;
    let n = system.source().ambient_dim();
    let m = system.level();
    let stride = m as usize + 1;

    // Group the generators by their order and compile against that order.
    let mut by_level: Vec<Vec<CompiledEquation>> = (0..stride).map(|_| Vec::new()).collect();
    for alpha in 0..system.source().generators().len() {
        for j in 0..=m {
            let reduced = FpPolynomial::reduce(system.generator(alpha, j), prime)?;
            let mut terms = Vec::with_capacity(reduced.terms.len());
            let mut nonlinear = false;
            for (coeff, exps) in &reduced.terms {
                let mut known = Vec::new();
                let mut top = Vec::new();
                for (idx, &e) in exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let order = (idx % stride) as u32;
                    debug_assert!(order <= j, "jet generator exceeds its order");
                    if order == j {
                        top.push((idx / stride, e));
                    } else {
                        known.push((idx, e));
                    }
                }
                if top.iter().map(|&(_, e)| e as u64).sum::<u64>() > 1 {
                    nonlinear = true;
                }
                terms.push(CompiledTerm {
                    coeff: *coeff,
                    known,
                    top,
                });
            }
            by_level[j as usize].push(CompiledEquation { terms, nonlinear });
        }
    }

    let visited = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let gate = BudgetGate {
        visited: &visited,
        budget,
        abort: &abort,
    };

    let mut vals = vec![0u64; n * stride];
    let count = generic_dfs(
        prime,
        n,
        stride,
        &by_level,
        base_point,
        &mut vals,
        0,
        &gate,
    )
    .map_err(|()| OracleError::BudgetExceeded {
        partial: FpCountReport {
            prime,
            fiber_over_origin: base_point.is_some(),
            levels: Vec::new(),
            visited: visited.load(Ordering::Relaxed),
        },
    })?;
    Ok(BigUint::from(count))
}

fn eval_known(factors: &[(usize, u32)], vals: &[u64], p: u64) -> u64 {
    let mut v = 1u64;
    for &(idx, e) in factors {
        v = v * pow_mod(vals[idx], e as u64, p) % p;
    }
    v
}

#[allow(clippy::too_many_arguments)]
fn generic_dfs(
    p: u64,
    n: usize,
    stride: usize,
    by_level: &[Vec<CompiledEquation>],
    base_point: Option<&[u64]>,
    vals: &mut Vec<u64>,
    level: usize,
    gate: &BudgetGate,
) -> Result<u128, ()> {
    let eqs = &by_level[level];
    let assign = |vals: &mut [u64], x: &[u64]| {
        for i in 0..n {
            vals[i * stride + level] = x[i];
        }
    };

    // Fully evaluates an equation with the candidate already written in.
    let eval_full = |eq: &CompiledEquation, vals: &[u64]| -> u64 {
        let mut acc = 0u64;
        for term in &eq.terms {
            let mut v = term.coeff * eval_known(&term.known, vals, p) % p;
            for &(base, e) in &term.top {
                v = v * pow_mod(vals[base * stride + level], e as u64, p) % p;
            }
            acc = (acc + v) % p;
        }
        acc
    };

    let nonlinear = eqs.iter().any(|eq| eq.nonlinear);
    let last = level == stride - 1;

    // Candidate extensions at this level.
    let mut candidates: Vec<Vec<u64>> = Vec::new();
    let mut closed_form: Option<u128> = None;

    if let (0, Some(base)) = (level, base_point) {
        let x = base.to_vec();
        assign(vals, &x);
        if !gate.charge() {
            return Err(());
        }
        if eqs.iter().all(|eq| eval_full(eq, vals) == 0) {
            candidates.push(x);
        }
    } else if nonlinear || level == 0 {
        // Plain exhaustive scan of the p^n assignments.
        let mut x = vec![0u64; n];
        loop {
            if !gate.charge() {
                return Err(());
            }
            assign(vals, &x);
            if eqs.iter().all(|eq| eval_full(eq, vals) == 0) {
                candidates.push(x.clone());
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                x[pos] += 1;
                if x[pos] < p {
                    break;
                }
                x[pos] = 0;
            }
            if x.iter().all(|&v| v == 0) {
                break;
            }
        }
    } else {
        // Affine in the top-order variables: solve the small linear system.
        let mut jacobian = Vec::with_capacity(eqs.len());
        let mut rhs = Vec::with_capacity(eqs.len());
        for eq in eqs {
            let mut row = vec![0u64; n];
            let mut constant = 0u64;
            for term in &eq.terms {
                let v = term.coeff * eval_known(&term.known, vals, p) % p;
                match term.top.as_slice() {
                    [] => constant = (constant + v) % p,
                    [(base, 1)] => row[*base] = (row[*base] + v) % p,
                    _ => unreachable!("nonlinear term in affine path"),
                }
            }
            jacobian.push(row);
            rhs.push((p - constant) % p);
        }
        let solver = AffineSolver::new(p, jacobian, n);
        let mut transformed = Vec::new();
        if solver.transform_rhs(&rhs, &mut transformed) {
            let k = solver.free_cols.len();
            if last {
                closed_form = Some((p as u128).pow(k as u32));
            } else {
                let mut free_values = vec![0u64; k];
                let mut x = vec![0u64; n];
                loop {
                    if !gate.charge() {
                        return Err(());
                    }
                    solver.solution(&transformed, &free_values, &mut x);
                    candidates.push(x.clone());
                    let mut pos = k;
                    let mut done = false;
                    loop {
                        if pos == 0 {
                            done = true;
                            break;
                        }
                        pos -= 1;
                        free_values[pos] += 1;
                        if free_values[pos] < p {
                            break;
                        }
                        free_values[pos] = 0;
                    }
                    if done {
                        break;
                    }
                }
            }
        }
    }

    if let Some(count) = closed_form {
        return Ok(count);
    }
    if last {
        return Ok(candidates.len() as u128);
    }
    let mut total = 0u128;
    for x in candidates {
        assign(vals, &x);
        total += generic_dfs(p, n, stride, by_level, base_point, vals, level + 1, gate)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{build_jet_system, JetConvention};

    fn cusp() -> Ideal {
        parse_ideal("u^2 - v^3", None).unwrap()
    }

    #[test]
    fn cusp_base_points_over_f5() {
        let report = count_jet_points(&cusp(), 5, 0, false, DEFAULT_BUDGET, 1).unwrap();
        assert_eq!(report.levels[0].count, BigUint::from(5u32));
        assert_eq!(report.levels[0].est_dim, Some(1));
    }

    #[test]
    fn smooth_point_in_the_line_has_one_arc_per_level() {
        let ideal = parse_ideal("x", None).unwrap();
        let report = count_jet_points(&ideal, 7, 4, false, DEFAULT_BUDGET, 1).unwrap();
        for level in &report.levels {
            assert_eq!(level.count, BigUint::from(1u32));
            assert_eq!(level.est_dim, Some(0));
        }
    }

    #[test]
    fn unit_ideal_has_no_arcs() {
        let ideal = parse_ideal("x + 1; 1", None).unwrap();
        let report = count_jet_points(&ideal, 5, 3, false, DEFAULT_BUDGET, 1).unwrap();
        for level in &report.levels {
            assert_eq!(level.count, BigUint::from(0u32), "level {}", level.level);
            assert_eq!(level.est_dim, None);
        }
    }

    #[test]
    fn smooth_hypersurface_counts_are_exact() {
        // V(v) in the plane: p base points, each lifting freely in one
        // coordinate: count = p^(m+1) ... times 1 for the cut coordinate.
        let line = parse_ideal("v", Some(&["u".into(), "v".into()])).unwrap();
        for p in [5u64, 7] {
            let report = count_jet_points(&line, p, 4, false, DEFAULT_BUDGET, 1).unwrap();
            for level in &report.levels {
                let expected = BigUint::from(p).pow(level.level + 1);
                assert_eq!(level.count, expected);
                assert_eq!(level.est_dim, Some(level.level as i64 + 1));
            }
        }
        // Same for the diagonal u = v.
        let diagonal = parse_ideal("u - v", None).unwrap();
        let report = count_jet_points(&diagonal, 5, 3, false, DEFAULT_BUDGET, 1).unwrap();
        for level in &report.levels {
            assert_eq!(level.count, BigUint::from(5u64).pow(level.level + 1));
        }
    }

    #[test]
    fn lifting_bound_holds() {
        let report = count_jet_points(&cusp(), 5, 6, false, DEFAULT_BUDGET, 1).unwrap();
        for pair in report.levels.windows(2) {
            let bound = &pair[0].count * BigUint::from(25u32);
            assert!(pair[1].count <= bound);
        }
    }

    #[test]
    fn cusp_counts_match_direct_enumeration() {
        // Cross-check the solver-based walk against full enumeration of all
        // p^(n(m+1)) assignments on the coefficient system.
        let p = 3u64;
        for m in 0..3u32 {
            let system = build_jet_system(&cusp(), m, JetConvention::Coefficient);
            let fast = count_jet_points(&cusp(), p, m, false, DEFAULT_BUDGET, 1).unwrap();
            let brute = brute_force_system_count(&system, p);
            assert_eq!(
                fast.levels[m as usize].count,
                BigUint::from(brute),
                "level {m}"
            );
            let generic = count_system_points(&system, p, None, DEFAULT_BUDGET).unwrap();
            assert_eq!(generic, BigUint::from(brute), "generic level {m}");
        }
    }

    fn brute_force_system_count(system: &JetSystem, p: u64) -> u64 {
        let dim = system.num_jet_vars();
        let gens: Vec<FpPolynomial> = system
            .generators()
            .iter()
            .map(|g| FpPolynomial::reduce(g, p).unwrap())
            .collect();
        let mut count = 0u64;
        let total = p.pow(dim as u32);
        for code in 0..total {
            let mut point = Vec::with_capacity(dim);
            let mut c = code;
            for _ in 0..dim {
                point.push(c % p);
                c /= p;
            }
            if gens.iter().all(|g| g.eval(&point) == 0) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn fiber_restriction_counts_only_origin_arcs() {
        let report = count_jet_points(&cusp(), 5, 2, true, DEFAULT_BUDGET, 1).unwrap();
        // Over the origin: level 0 is the origin itself, level 1 all (u1,v1),
        // level 2 forces u1 = 0.
        assert_eq!(report.levels[0].count, BigUint::from(1u32));
        assert_eq!(report.levels[1].count, BigUint::from(25u32));
        assert_eq!(report.levels[2].count, BigUint::from(125u32));
    }

    #[test]
    fn threads_do_not_change_counts() {
        let a = count_jet_points(&cusp(), 5, 4, false, DEFAULT_BUDGET, 1).unwrap();
        let b = count_jet_points(&cusp(), 5, 4, false, DEFAULT_BUDGET, 3).unwrap();
        for (x, y) in a.levels.iter().zip(&b.levels) {
            assert_eq!(x.count, y.count);
        }
    }

    #[test]
    fn budget_abort_reports_completed_levels() {
        let err = count_jet_points(&cusp(), 7, 8, false, 2_000, 1).unwrap_err();
        let OracleError::BudgetExceeded { partial } = err else {
            panic!("expected budget error");
        };
        assert!(!partial.levels.is_empty());
        assert!(partial.levels.len() < 9);
        assert!(partial.visited >= 2_000);
    }

    #[test]
    fn estimate_for_the_cusp_converges_from_above() {
        // The acceptance suite runs the full two-minute configuration; this
        // covers the same path at a cheaper cap.
        let report = estimate_lct(&cusp(), &[5, 7], 6, false, DEFAULT_BUDGET, 1).unwrap();
        assert_eq!(report.disagreeing_levels, Vec::<u32>::new());
        assert_eq!(report.best_level, Some(5));
        assert_eq!(
            report.est_lct,
            LctValue::Finite(Rational::new(5.into(), 6.into()))
        );
    }

    #[test]
    fn estimate_of_the_monomial_pair_matches_the_exact_threshold() {
        // (x^2, y^3) runs through the same estimate path as the cusp and
        // must land on the exact polar value.
        let pair = parse_ideal("x^2; y^3", None).unwrap();
        let report = estimate_lct(&pair, &[5, 7], 6, false, DEFAULT_BUDGET, 1).unwrap();
        let exact = crate::newton::lct_monomial(
            &pair.as_monomial_ideal().unwrap(),
        )
        .unwrap()
        .lct;
        assert_eq!(report.est_lct, LctValue::Finite(exact));
        assert_eq!(report.best_level, Some(5));
    }

    #[test]
    fn estimate_for_the_origin_is_exact() {
        let origin = parse_ideal("x1; x2", None).unwrap();
        let report = estimate_lct(&origin, &[5, 7], 4, false, DEFAULT_BUDGET, 1).unwrap();
        assert_eq!(
            report.est_lct,
            LctValue::Finite(Rational::from_integer(2.into()))
        );
        for r in &report.reports {
            for level in &r.levels {
                assert_eq!(level.count, BigUint::from(1u32));
            }
        }
    }

    #[test]
    fn estimate_of_empty_scheme_is_infinite() {
        let unit = parse_ideal("x + 1; x", None).unwrap();
        let report = estimate_lct(&unit, &[5, 7], 3, false, DEFAULT_BUDGET, 1).unwrap();
        assert_eq!(report.est_lct, LctValue::Infinite);
    }

    #[test]
    fn recursion_check_passes_for_the_cusp() {
        // The p = 7 run is part of the acceptance suite.
        assert!(cusp_recursion_check(5, 8, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn conventions_count_equally_for_large_primes() {
        let ideal = parse_ideal("u^2 - v^3", None).unwrap();
        for m in 0..=3u32 {
            let derivation = build_jet_system(&ideal, m, JetConvention::Derivation);
            let coefficient = build_jet_system(&ideal, m, JetConvention::Coefficient);
            for p in [11u64, 13] {
                let a = count_system_points(&derivation, p, None, DEFAULT_BUDGET).unwrap();
                let b = count_system_points(&coefficient, p, None, DEFAULT_BUDGET).unwrap();
                assert_eq!(a, b, "prime {p} level {m}");
            }
        }
    }

    #[test]
    fn fiber_system_counts_match_the_fast_path() {
        let ideal = parse_ideal("u^2 - v^3 + u*v", None).unwrap();
        let p = 7u64;
        for m in 0..=3u32 {
            let system = build_jet_system(&ideal, m, JetConvention::Coefficient);
            let origin = vec![0u64, 0];
            let generic = count_system_points(&system, p, Some(&origin), DEFAULT_BUDGET).unwrap();
            let fast = count_jet_points(&ideal, p, m, true, DEFAULT_BUDGET, 1).unwrap();
            assert_eq!(generic, fast.levels[m as usize].count, "level {m}");
        }
    }

    #[test]
    fn bad_primes_are_rejected() {
        assert!(matches!(
            count_jet_points(&cusp(), 6, 2, false, DEFAULT_BUDGET, 1),
            Err(OracleError::NotPrime(6))
        ));
        let fractional = parse_ideal("1/5*x - 1", None).unwrap();
        assert!(matches!(
            count_jet_points(&fractional, 5, 2, false, DEFAULT_BUDGET, 1),
            Err(OracleError::DenominatorDivisibleByPrime { prime: 5 })
        ));
    }
}
