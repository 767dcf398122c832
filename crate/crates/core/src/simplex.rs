//! Dense two-phase simplex over exact rationals.
//!
//! Minimizes a linear objective subject to `<=` / `>=` / `=` rows and `x >= 0`.
//! Bland's rule picks the lowest-index candidate on entering and leaving, so
//! the method never cycles and the returned vertex is deterministic. Problem
//! sizes here are tiny (tens of rows), so a dense rational tableau is the
//! right tool; there is no floating point anywhere.

use crate::poly::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

/// `minimize objective . x  subject to  constraints, x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    // rows[i] = coefficients over all columns, then rhs[i] separately
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    num_cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone();
        debug_assert!(!inv.is_zero());
        for v in self.rows[row].iter_mut() {
            *v /= &inv;
        }
        self.rhs[row] /= &inv;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.num_cols {
                let delta = &self.rows[row][j] * &factor;
                self.rows[i][j] -= delta;
            }
            let delta = &self.rhs[row] * &factor;
            self.rhs[i] -= delta;
        }
        self.basis[row] = col;
    }

    /// Reduced-cost minimization with Bland's rule over the allowed columns.
    /// Returns `false` when the objective is unbounded below.
    fn run(&mut self, cost: &[Rational], allowed_cols: usize) -> bool {
        loop {
            // Reduced costs z_j = c_j - c_B . B^{-1} A_j, recomputed per
            // iteration; the tableaus here are far too small for incremental
            // maintenance to matter.
            let mut entering = None;
            for j in 0..allowed_cols {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut z = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        z -= &cost[b] * &self.rows[i][j];
                    }
                }
                if z.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][col];
                    match &leaving {
                        None => leaving = Some((i, ratio)),
                        Some((best_i, best)) => {
                            // Bland tie-break: smallest basis variable index.
                            if ratio < *best
                                || (ratio == *best && self.basis[i] < self.basis[*best_i])
                            {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Solves the program exactly. On `Optimal` the point lists the structural
/// variables only.
pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let n = lp.num_vars;
    let m = lp.constraints.len();
    debug_assert!(lp.objective.len() == n);
    debug_assert!(lp.constraints.iter().all(|c| c.coeffs.len() == n));

    // Normalize rows to nonnegative rhs, then add one slack per inequality
    // and one artificial wherever the identity column is missing.
    let mut num_slacks = 0usize;
    let mut num_arts = 0usize;
    for c in &lp.constraints {
        let flip = c.rhs.is_negative();
        let rel = effective_relation(c.relation, flip);
        match rel {
            Relation::Le => num_slacks += 1,
            Relation::Ge => {
                num_slacks += 1;
                num_arts += 1;
            }
            Relation::Eq => num_arts += 1,
        }
    }
    let num_cols = n + num_slacks + num_arts;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack_at = n;
    let mut art_at = n + num_slacks;

    for c in &lp.constraints {
        let flip = c.rhs.is_negative();
        let rel = effective_relation(c.relation, flip);
        let mut row = vec![Rational::zero(); num_cols];
        for (j, v) in c.coeffs.iter().enumerate() {
            row[j] = if flip { -v } else { v.clone() };
        }
        let b = if flip { -&c.rhs } else { c.rhs.clone() };
        match rel {
            Relation::Le => {
                row[slack_at] = Rational::one();
                basis.push(slack_at);
                slack_at += 1;
            }
            Relation::Ge => {
                row[slack_at] = -Rational::one();
                slack_at += 1;
                row[art_at] = Rational::one();
                basis.push(art_at);
                art_at += 1;
            }
            Relation::Eq => {
                row[art_at] = Rational::one();
                basis.push(art_at);
                art_at += 1;
            }
        }
        rows.push(row);
        rhs.push(b);
    }

    let mut tab = Tableau { rows, rhs, basis, num_cols };

    if num_arts > 0 {
        let mut phase1 = vec![Rational::zero(); num_cols];
        for c in phase1.iter_mut().skip(n + num_slacks) {
            *c = Rational::one();
        }
        let bounded = tab.run(&phase1, num_cols);
        debug_assert!(bounded, "phase-1 objective is bounded below by zero");
        let art_sum: Rational = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= n + num_slacks)
            .map(|(i, _)| tab.rhs[i].clone())
            .sum();
        if !art_sum.is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive leftover artificial basics out; drop rows that are redundant.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n + num_slacks {
                let col = (0..n + num_slacks).find(|&j| !tab.rows[i][j].is_zero());
                match col {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); num_cols];
    cost[..n].clone_from_slice(&lp.objective);
    if !tab.run(&cost, n + num_slacks) {
        return LpOutcome::Unbounded;
    }

    let mut point = vec![Rational::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            point[b] = tab.rhs[i].clone();
        }
    }
    let value = lp
        .objective
        .iter()
        .zip(&point)
        .map(|(c, x)| c * x)
        .sum();
    LpOutcome::Optimal { value, point }
}

fn effective_relation(rel: Relation, flip: bool) -> Relation {
    if !flip {
        return rel;
    }
    match rel {
        Relation::Le => Relation::Ge,
        Relation::Ge => Relation::Le,
        Relation::Eq => Relation::Eq,
    }
}

/// Phase-1 feasibility of `constraints, x >= 0`.
pub fn feasible(num_vars: usize, constraints: &[Constraint]) -> bool {
    let lp = LinearProgram {
        num_vars,
        objective: vec![Rational::zero(); num_vars],
        constraints: constraints.to_vec(),
    };
    !matches!(solve(&lp), LpOutcome::Infeasible)
}
