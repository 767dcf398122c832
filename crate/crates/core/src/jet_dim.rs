//! Exact jet-scheme dimensions of monomial ideals, level by level, and the
//! threshold recovered from them.
//!
//! The level-`m` jets of a monomial subscheme decompose into order strata:
//! fix the `t`-order `a_i` of each coordinate (with `a_i = m+1` encoding the
//! zero coordinate). A stratum is nonempty exactly when every generator
//! exponent row `b` satisfies `<a, b> >= m+1`, and then has dimension
//! `(m+1)n - sum(a)`. The jet dimension is therefore `(m+1)n` minus the
//! optimum of a small covering integer program, solved here by depth-first
//! branch and bound on the exact rational relaxation. Restricting to the
//! fiber over the origin adds the box constraint `a_i >= 1`.

use crate::newton::{self, NewtonError};
use crate::poly::{MonomialIdeal, Rational};
use crate::simplex::{self, Constraint, LinearProgram, LpOutcome, Relation};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JetDimError {
    UnitIdeal,
    OriginNotInY,
    NotPrincipal,
    CertificateLevelTooLarge { required_level: u64, cap: u64 },
    CertificateMismatch { lct: Box<Rational>, via_jets: Box<Rational>, level: u64 },
    BoundViolated { level: u64, dim: i64 },
}

impl fmt::Display for JetDimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetDimError::UnitIdeal => write!(f, "unit ideal: empty subscheme"),
            JetDimError::OriginNotInY => write!(f, "the origin does not lie on the subscheme"),
            JetDimError::NotPrincipal => write!(f, "ideal has more than one minimal generator"),
            JetDimError::CertificateLevelTooLarge { required_level, cap } => write!(
                f,
                "certificate level {required_level} exceeds the cap {cap}"
            ),
            JetDimError::CertificateMismatch { lct, via_jets, level } => write!(
                f,
                "jet formula at level {level} gave {via_jets}, polar program gave {lct}"
            ),
            JetDimError::BoundViolated { level, dim } => write!(
                f,
                "dimension {dim} at level {level} violates the threshold bound"
            ),
        }
    }
}

impl std::error::Error for JetDimError {}

/// The stratum integer program for one ideal and level.
#[derive(Clone, Debug)]
pub struct StratumIp {
    pub ideal: MonomialIdeal,
    pub level: u64,
    pub fiber_over_origin: bool,
}

/// Jet dimension at one level. `dim` is `None` when the jet scheme is empty
/// (dimension minus infinity); that happens only for the unit ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetDimReport {
    pub level: u64,
    pub dim: Option<i64>,
    pub argmin: Option<Vec<u64>>,
    pub normalized: Option<Rational>,
}

/// Exact threshold certified through a jet dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetLctCertificate {
    pub lct: Rational,
    /// Level whose jet dimension recovers the threshold exactly: one less
    /// than the least common multiple of the optimal-vertex denominators.
    pub certificate_level: u64,
    pub dim_at_certificate: i64,
    /// The one-sided bound `dim <= (m+1)(n - lct)` was verified for all
    /// levels up to this cap.
    pub swept_to: u64,
}

/// Value of the fiber-over-origin formula after a level sweep; an upper bound
/// for the threshold that tightens as the cap grows but need not attain it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberLctEstimate {
    pub value: Rational,
    pub best_level: u64,
    pub swept_to: u64,
}

fn rat_u64(x: u64) -> Rational {
    Rational::from_integer(x.into())
}

fn floor_u64(r: &Rational) -> u64 {
    r.floor().to_integer().to_u64().expect("small nonnegative value")
}

fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

fn ceil_big(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Minimizes `sum(a)` over integer vectors with `lower <= a_i <= m+1` and
/// `<a, b> >= m+1` for every generator row `b`. Returns `None` when
/// infeasible, which happens only for the unit ideal (a zero row).
fn solve_stratum_ip(
    rows: &[Vec<u32>],
    n: usize,
    level: u64,
    lower: u64,
) -> Option<(u64, Vec<u64>)> {
    let cap = level + 1;
    if rows.iter().any(|r| r.iter().all(|&e| e == 0)) {
        return None;
    }

    let relax = |lb: &[u64], ub: &[u64]| -> Option<(Rational, Vec<Rational>)> {
        let mut constraints: Vec<Constraint> = rows
            .iter()
            .map(|row| {
                Constraint::new(
                    row.iter().map(|&e| rat_u64(e as u64)).collect(),
                    Relation::Ge,
                    rat_u64(cap),
                )
            })
            .collect();
        for i in 0..n {
            if lb[i] > 0 {
                let mut c = vec![Rational::zero(); n];
                c[i] = Rational::one();
                constraints.push(Constraint::new(c, Relation::Ge, rat_u64(lb[i])));
            }
            let mut c = vec![Rational::zero(); n];
            c[i] = Rational::one();
            constraints.push(Constraint::new(c, Relation::Le, rat_u64(ub[i])));
        }
        match simplex::solve(&LinearProgram {
            num_vars: n,
            objective: vec![Rational::one(); n],
            constraints,
        }) {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => unreachable!("box-bounded program"),
        }
    };

    let mut best: Option<(u64, Vec<u64>)> = None;
    let mut stack = vec![(vec![lower; n], vec![cap; n])];
    while let Some((lb, ub)) = stack.pop() {
        if lb.iter().zip(&ub).any(|(l, u)| l > u) {
            continue;
        }
        let Some((value, point)) = relax(&lb, &ub) else {
            continue;
        };
        if let Some((incumbent, _)) = &best {
            if ceil_big(&value) >= BigInt::from(*incumbent) {
                continue;
            }
        }
        // Rounding the relaxation up coordinatewise stays inside the box and
        // can only help the covering rows, so it is always a candidate.
        let rounded: Vec<u64> = point.iter().map(|v| ceil_big(v).to_u64().unwrap()).collect();
        let rounded_sum: u64 = rounded.iter().sum();
        if best.as_ref().is_none_or(|(s, _)| rounded_sum < *s) {
            best = Some((rounded_sum, rounded));
        }
        // Branch on the most fractional coordinate.
        let mut branch: Option<(usize, Rational)> = None;
        for (i, v) in point.iter().enumerate() {
            if is_integer(v) {
                continue;
            }
            let frac = v - v.floor();
            let dist = if frac <= Rational::new(1.into(), 2.into()) {
                frac
            } else {
                Rational::one() - frac
            };
            match &branch {
                Some((_, best_dist)) if dist <= *best_dist => {}
                _ => branch = Some((i, dist)),
            }
        }
        let Some((i, _)) = branch else {
            // Integral relaxation: the rounded candidate above was the point
            // itself, already recorded.
            continue;
        };
        let split = floor_u64(&point[i]);
        let mut up_lb = lb.clone();
        up_lb[i] = split + 1;
        let mut down_ub = ub.clone();
        down_ub[i] = split;
        stack.push((up_lb, ub));
        stack.push((lb, down_ub));
    }
    best
}

/// Jet dimension of a monomial subscheme at one level, optionally of the
/// fiber over the origin only.
pub fn jet_dim_monomial(ideal: &MonomialIdeal, level: u64, fiber_over_origin: bool) -> JetDimReport {
    let n = ideal.ambient_dim();
    let lower = if fiber_over_origin { 1 } else { 0 };
    match solve_stratum_ip(ideal.generators(), n, level, lower) {
        Some((min_sum, argmin)) => {
            let dim = ((level + 1) * n as u64) as i64 - min_sum as i64;
            JetDimReport {
                level,
                dim: Some(dim),
                normalized: Some(Rational::new(dim.into(), (level + 1).into())),
                argmin: Some(argmin),
            }
        }
        None => JetDimReport {
            level,
            dim: None,
            argmin: None,
            normalized: None,
        },
    }
}

/// Level at which the jet formula recovers the threshold exactly: one less
/// than the least common multiple of the optimal-vertex denominators.
pub fn certificate_level(cert: &newton::LctCertificate) -> u64 {
    let mut lcm = BigInt::one();
    for v in &cert.vertex {
        lcm = lcm.lcm(v.denom());
    }
    (lcm - BigInt::one())
        .to_u64()
        .expect("vertex denominators fit in u64")
}

/// Recovers the threshold from a single jet dimension.
///
/// The certificate level is `lcm(denominators of the optimal vertex) - 1`:
/// there the scaled vertex is an integral stratum witness, the relaxation
/// bound matches it, and `n - dim/(m+1)` equals the threshold exactly. The
/// one-sided bound `dim <= (m+1)(n - lct)` is verified at every level up to
/// `m_max` on the way.
pub fn lct_via_jets(ideal: &MonomialIdeal, m_max: u64) -> Result<JetLctCertificate, JetDimError> {
    let cert = newton::lct_monomial(ideal).map_err(|NewtonError::UnitIdeal| JetDimError::UnitIdeal)?;
    let n = ideal.ambient_dim();

    let required_level = certificate_level(&cert);
    if required_level > m_max {
        return Err(JetDimError::CertificateLevelTooLarge {
            required_level,
            cap: m_max,
        });
    }

    let at_cert = jet_dim_monomial(ideal, required_level, false);
    let dim_at_certificate = at_cert.dim.expect("non-unit ideal has nonempty jets");
    let via_jets = rat_u64(n as u64)
        - Rational::new(dim_at_certificate.into(), (required_level + 1).into());
    if via_jets != cert.lct {
        return Err(JetDimError::CertificateMismatch {
            lct: Box::new(cert.lct),
            via_jets: Box::new(via_jets),
            level: required_level,
        });
    }

    for m in 0..=m_max {
        let report = jet_dim_monomial(ideal, m, false);
        let dim = report.dim.expect("non-unit ideal");
        let bound = (rat_u64(n as u64) - &cert.lct) * rat_u64(m + 1);
        if Rational::from_integer(dim.into()) > bound {
            return Err(JetDimError::BoundViolated { level: m, dim });
        }
    }

    Ok(JetLctCertificate {
        lct: cert.lct,
        certificate_level: required_level,
        dim_at_certificate,
        swept_to: m_max,
    })
}

/// Threshold upper bound from fiber-over-origin dimensions only, refined over
/// all levels up to the cap. Exact in the limit; equal to the threshold at
/// any level where the unrestricted optimum already has every order positive.
pub fn lct_origin_via_fibers(
    ideal: &MonomialIdeal,
    m_max: u64,
) -> Result<FiberLctEstimate, JetDimError> {
    if ideal.is_unit() {
        return Err(JetDimError::OriginNotInY);
    }
    let n = ideal.ambient_dim();
    let mut best: Option<(Rational, u64)> = None;
    for m in 0..=m_max {
        let report = jet_dim_monomial(ideal, m, true);
        let normalized = report.normalized.expect("non-unit ideal");
        match &best {
            Some((value, _)) if *value >= normalized => {}
            _ => best = Some((normalized, m)),
        }
    }
    let (max_normalized, best_level) = best.expect("at least one level");
    Ok(FiberLctEstimate {
        value: rat_u64(n as u64) - max_normalized,
        best_level,
        swept_to: m_max,
    })
}

/// For a principal monomial ideal (a divisor through the origin), checks the
/// fiber dimension bound `dim <= n*m - floor(m / mult)` at one level.
pub fn check_divisor_fiber_bound(ideal: &MonomialIdeal, level: u64) -> Result<bool, JetDimError> {
    if ideal.is_unit() {
        return Err(JetDimError::OriginNotInY);
    }
    if ideal.generators().len() != 1 {
        return Err(JetDimError::NotPrincipal);
    }
    let n = ideal.ambient_dim() as u64;
    let mult = ideal.multiplicity();
    let report = jet_dim_monomial(ideal, level, true);
    let dim = report.dim.expect("non-unit ideal");
    let bound = (n * level) as i64 - (level / mult) as i64;
    Ok(dim <= bound)
}
