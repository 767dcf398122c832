//! Newton polytope of a monomial ideal, its polar polyhedron, and the log
//! canonical threshold as the minimal coordinate sum over the polar region.
//!
//! For a monomial ideal the Newton polytope is the convex hull of the minimal
//! generator exponents plus the nonnegative orthant, so the polar region
//! `{u >= 0 : <u,v> >= 1 for all v in the polytope}` is cut out by the
//! generator rows alone: any monomial in the ideal dominates a generator
//! componentwise and `u >= 0` preserves the inequality. The LCT is the
//! optimum of `min sum(u)` over that region, solved by exact rational
//! simplex; the optimal vertex is the certificate.

use crate::poly::{MonomialIdeal, Rational};
use crate::simplex::{self, Constraint, LinearProgram, LpOutcome, Relation};
use num_traits::{One, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NewtonError {
    /// The unit ideal cuts out the empty subscheme; its threshold is infinite.
    UnitIdeal,
}

impl fmt::Display for NewtonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NewtonError::UnitIdeal => write!(f, "unit ideal: empty subscheme, infinite threshold"),
        }
    }
}

impl std::error::Error for NewtonError {}

/// The polar-region linear program `u >= 0, B u >= 1` with one row per
/// minimal generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarProgram {
    pub ambient_dim: usize,
    /// Rows are the minimal generator exponent vectors, every row nonzero.
    pub rows: Vec<Vec<u32>>,
}

/// Optimal value and vertex of the polar program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LctCertificate {
    pub lct: Rational,
    /// Lexicographically smallest optimal vertex; lies in `[0,1]^n`.
    pub vertex: Vec<Rational>,
    /// Indices of generators met with equality by the vertex.
    pub tight_rows: Vec<usize>,
}

/// Finite or infinite threshold, the infinite case being the unit ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LctValue {
    Finite(Rational),
    Infinite,
}

impl LctValue {
    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            LctValue::Finite(r) => Some(r),
            LctValue::Infinite => None,
        }
    }
}

impl fmt::Display for LctValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LctValue::Finite(r) => write!(f, "{r}"),
            LctValue::Infinite => write!(f, "inf"),
        }
    }
}

pub fn polar_program(ideal: &MonomialIdeal) -> Result<PolarProgram, NewtonError> {
    if ideal.is_unit() {
        return Err(NewtonError::UnitIdeal);
    }
    Ok(PolarProgram {
        ambient_dim: ideal.ambient_dim(),
        rows: ideal.generators().to_vec(),
    })
}

fn row_constraints(program: &PolarProgram) -> Vec<Constraint> {
    program
        .rows
        .iter()
        .map(|row| {
            Constraint::new(
                row.iter().map(|&e| Rational::from_integer(e.into())).collect(),
                Relation::Ge,
                Rational::one(),
            )
        })
        .collect()
}

/// The LCT of a monomial ideal with its optimal-vertex certificate.
///
/// Ties between optimal vertices are broken by lexicographic minimization:
/// after the optimum is known, each coordinate is minimized in turn on the
/// optimal face. Every coordinate of the result is at most one (clamping a
/// coordinate to one preserves feasibility and can only lower the sum).
pub fn lct_monomial(ideal: &MonomialIdeal) -> Result<LctCertificate, NewtonError> {
    let program = polar_program(ideal)?;
    let n = program.ambient_dim;
    let base = row_constraints(&program);

    let lp = LinearProgram {
        num_vars: n,
        objective: vec![Rational::one(); n],
        constraints: base.clone(),
    };
    let LpOutcome::Optimal { value: lct, .. } = simplex::solve(&lp) else {
        unreachable!("polar program is feasible and bounded below");
    };

    // Lexicographically smallest optimal vertex: pin the objective to the
    // optimum, then minimize the coordinates one at a time.
    let mut constraints = base;
    constraints.push(Constraint::new(
        vec![Rational::one(); n],
        Relation::Eq,
        lct.clone(),
    ));
    let mut vertex = Vec::with_capacity(n);
    for i in 0..n {
        let mut objective = vec![Rational::zero(); n];
        objective[i] = Rational::one();
        let lp = LinearProgram {
            num_vars: n,
            objective,
            constraints: constraints.clone(),
        };
        let LpOutcome::Optimal { value, .. } = simplex::solve(&lp) else {
            unreachable!("optimal face is nonempty and coordinates are bounded below");
        };
        let mut pin = vec![Rational::zero(); n];
        pin[i] = Rational::one();
        constraints.push(Constraint::new(pin, Relation::Eq, value.clone()));
        vertex.push(value);
    }

    debug_assert_eq!(vertex.iter().sum::<Rational>(), lct);
    // The optimum never exceeds one in any coordinate; clamp defensively so
    // the certificate invariant is explicit.
    let one = Rational::one();
    for v in vertex.iter_mut() {
        debug_assert!(*v <= one);
        if *v > one {
            *v = one.clone();
        }
    }

    let tight_rows = program
        .rows
        .iter()
        .enumerate()
        .filter(|(_, row)| {
            row.iter()
                .zip(&vertex)
                .map(|(&e, v)| v * Rational::from_integer(e.into()))
                .sum::<Rational>()
                .is_one()
        })
        .map(|(j, _)| j)
        .collect();

    Ok(LctCertificate { lct, vertex, tight_rows })
}

/// Threshold with the unit ideal mapped to infinity.
pub fn lct_value(ideal: &MonomialIdeal) -> LctValue {
    match lct_monomial(ideal) {
        Ok(cert) => LctValue::Finite(cert.lct),
        Err(NewtonError::UnitIdeal) => LctValue::Infinite,
    }
}

/// Threshold of the pair of the ambient space with itself (the zero ideal),
/// by convention. The zero ideal is rejected at parse time, so the
/// convention lives here rather than on a parseable input.
pub fn lct_of_whole_space() -> Rational {
    Rational::zero()
}

/// Decides whether the all-ones vector lies in `r` times the Newton polytope,
/// for `r > 0`: a convex combination of the generators must fit under `e/r`
/// componentwise, the slack being absorbed by the orthant part.
pub fn point_in_scaled_polytope(ideal: &MonomialIdeal, r: &Rational) -> bool {
    assert!(*r > Rational::zero(), "scale must be positive");
    if ideal.is_unit() {
        // The polytope is the whole orthant; e/r always fits.
        return true;
    }
    let g = ideal.generators().len();
    let n = ideal.ambient_dim();
    // Variables: lambda_1..lambda_g, s_1..s_n, all >= 0.
    let mut constraints = Vec::with_capacity(n + 1);
    let target = Rational::one() / r;
    for i in 0..n {
        let mut coeffs = vec![Rational::zero(); g + n];
        for (j, row) in ideal.generators().iter().enumerate() {
            coeffs[j] = Rational::from_integer(row[i].into());
        }
        coeffs[g + i] = Rational::one();
        constraints.push(Constraint::new(coeffs, Relation::Eq, target.clone()));
    }
    let mut coeffs = vec![Rational::zero(); g + n];
    for c in coeffs.iter_mut().take(g) {
        *c = Rational::one();
    }
    constraints.push(Constraint::new(coeffs, Relation::Eq, Rational::one()));
    simplex::feasible(g + n, &constraints)
}
