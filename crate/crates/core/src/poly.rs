//! Multivariate polynomials with exact rational coefficients, ideals, and
//! monomial ideals given by their minimal generating antichain.
//!
//! Polynomials are kept in canonical form at all times: no zero coefficients,
//! pairwise distinct monomials, terms sorted in graded lexicographic order
//! (total degree first, earlier variables taking precedence inside a degree,
//! lowest degree listed first). Canonical form makes equality structural.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

/// Exponent vector; the length is the ambient variable count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// The constant monomial (all exponents zero).
    pub fn unit(ambient_dim: usize) -> Self {
        Monomial(vec![0; ambient_dim])
    }

    pub fn variable(ambient_dim: usize, index: usize) -> Self {
        let mut exps = vec![0; ambient_dim];
        exps[index] = 1;
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.len(), other.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    /// Componentwise `<=`, i.e. this monomial divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: lower total degree first; inside a degree the
    /// monomial with the larger exponent on the earliest variable comes first
    /// (so `x^2, x*y, y^2` is the listing order in degree two).
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyError {
    DimensionMismatch { left: usize, right: usize },
    NotMonomial { generator_index: usize },
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::DimensionMismatch { left, right } => {
                write!(f, "ambient dimension mismatch: {left} vs {right}")
            }
            PolyError::NotMonomial { generator_index } => {
                write!(
                    f,
                    "generator {} has more than one term; not a monomial ideal",
                    generator_index + 1
                )
            }
        }
    }
}

impl std::error::Error for PolyError {}

/// Polynomial in canonical form over a fixed ambient variable count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    ambient_dim: usize,
    terms: Vec<(Rational, Monomial)>,
}

impl Polynomial {
    pub fn zero(ambient_dim: usize) -> Self {
        Polynomial {
            ambient_dim,
            terms: Vec::new(),
        }
    }

    pub fn constant(ambient_dim: usize, value: Rational) -> Self {
        Self::from_terms(ambient_dim, [(value, Monomial::unit(ambient_dim))])
    }

    pub fn one(ambient_dim: usize) -> Self {
        Self::constant(ambient_dim, Rational::one())
    }

    pub fn variable(ambient_dim: usize, index: usize) -> Self {
        Self::from_terms(
            ambient_dim,
            [(Rational::one(), Monomial::variable(ambient_dim, index))],
        )
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and
    /// dropping zero coefficients.
    pub fn from_terms<I>(ambient_dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Monomial)>,
    {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (coeff, mono) in terms {
            assert_eq!(mono.len(), ambient_dim, "monomial length != ambient dim");
            let entry = map.entry(mono).or_insert_with(Rational::zero);
            *entry += coeff;
        }
        Polynomial {
            ambient_dim,
            terms: map
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (c, m))
                .collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Terms in canonical (graded lexicographic, lowest degree first) order.
    pub fn terms(&self) -> &[(Rational, Monomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the constant monomial; the value at the origin.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .iter()
            .find(|(_, m)| m.is_unit())
            .map(|(c, _)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Smallest total degree among terms; `None` for the zero polynomial.
    pub fn min_total_degree(&self) -> Option<u64> {
        // Terms are sorted by degree, so the first term is minimal.
        self.terms.first().map(|(_, m)| m.total_degree())
    }

    pub fn max_total_degree(&self) -> Option<u64> {
        self.terms.last().map(|(_, m)| m.total_degree())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(PolyError::DimensionMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        Ok(Polynomial::from_terms(
            self.ambient_dim,
            self.terms.iter().chain(&other.terms).cloned(),
        ))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(PolyError::DimensionMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        let mut products = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, m1) in &self.terms {
            for (c2, m2) in &other.terms {
                products.push((c1 * c2, m1.mul(m2)));
            }
        }
        Ok(Polynomial::from_terms(self.ambient_dim, products))
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(self.ambient_dim);
        }
        Polynomial {
            ambient_dim: self.ambient_dim,
            terms: self
                .terms
                .iter()
                .map(|(c, m)| (c * factor, m.clone()))
                .collect(),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("ambient dimension mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("ambient dimension mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ambient_dim: self.ambient_dim,
            terms: self.terms.iter().map(|(c, m)| (-c, m.clone())).collect(),
        }
    }
}

/// Renders a polynomial against a variable-name list, `2*u*u' - 3*v^2*v'`
/// style. Inverse of the parser on parser-accepted names.
pub fn render_polynomial(poly: &Polynomial, names: &[String]) -> String {
    assert_eq!(poly.ambient_dim(), names.len());
    if poly.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (coeff, mono)) in poly.terms().iter().enumerate() {
        let negative = coeff.is_negative();
        let abs = coeff.abs();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mut factors: Vec<String> = Vec::new();
        if !abs.is_one() || mono.is_unit() {
            factors.push(abs.to_string());
        }
        for (idx, &exp) in mono.exponents().iter().enumerate() {
            if exp == 0 {
                continue;
            }
            if exp == 1 {
                factors.push(names[idx].clone());
            } else {
                factors.push(format!("{}^{}", names[idx], exp));
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

/// An ideal presented by a nonempty list of nonzero generators sharing one
/// ambient variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    vars: Vec<String>,
    generators: Vec<Polynomial>,
}

impl Ideal {
    pub fn new(vars: Vec<String>, generators: Vec<Polynomial>) -> Ideal {
        assert!(!generators.is_empty(), "ideal needs at least one generator");
        for g in &generators {
            assert_eq!(g.ambient_dim(), vars.len(), "generator dimension mismatch");
            assert!(!g.is_zero(), "zero generator");
        }
        Ideal { vars, generators }
    }

    pub fn ambient_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    /// One-line rendering, generators separated by `; `.
    pub fn render(&self) -> String {
        self.generators
            .iter()
            .map(|g| render_polynomial(g, &self.vars))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Succeeds iff every generator is a single term; returns the minimal
    /// generating antichain with divisible generators removed. A constant
    /// generator yields the unit ideal.
    pub fn as_monomial_ideal(&self) -> Result<MonomialIdeal, PolyError> {
        let mut exponents = Vec::with_capacity(self.generators.len());
        for (index, g) in self.generators.iter().enumerate() {
            if g.num_terms() != 1 {
                return Err(PolyError::NotMonomial {
                    generator_index: index,
                });
            }
            exponents.push(g.terms()[0].1.exponents().to_vec());
        }
        Ok(MonomialIdeal::new(self.ambient_dim(), exponents))
    }

    /// Largest `q` with the ideal contained in the `q`-th power of the maximal
    /// ideal at the origin: the minimum over generators of their smallest term
    /// degree. Zero iff some generator has a constant term.
    pub fn multiplicity_at_origin(&self) -> u64 {
        self.generators
            .iter()
            .map(|g| g.min_total_degree().expect("nonzero generator"))
            .min()
            .expect("nonempty ideal")
    }

    /// Generators of the product subscheme: both ideals in disjoint variable
    /// blocks. Clashing names from the right block get a numeric suffix.
    pub fn block_sum(&self, other: &Ideal) -> Ideal {
        let n1 = self.ambient_dim();
        let n2 = other.ambient_dim();
        let n = n1 + n2;
        let mut vars = self.vars.clone();
        for name in &other.vars {
            let mut candidate = name.clone();
            let mut suffix = 2;
            while vars.contains(&candidate) {
                candidate = format!("{name}_{suffix}");
                suffix += 1;
            }
            vars.push(candidate);
        }
        let mut generators = Vec::with_capacity(self.generators.len() + other.generators.len());
        for g in &self.generators {
            generators.push(pad_exponents(g, n, 0));
        }
        for g in &other.generators {
            generators.push(pad_exponents(g, n, n1));
        }
        Ideal::new(vars, generators)
    }
}

fn pad_exponents(poly: &Polynomial, new_dim: usize, shift: usize) -> Polynomial {
    Polynomial::from_terms(
        new_dim,
        poly.terms().iter().map(|(c, m)| {
            let mut exps = vec![0u32; new_dim];
            for (i, &e) in m.exponents().iter().enumerate() {
                exps[shift + i] = e;
            }
            (c.clone(), Monomial::new(exps))
        }),
    )
}

/// Monomial ideal stored as the minimal generating antichain of exponent
/// vectors. If the zero vector appears it is the only generator (unit ideal,
/// empty subscheme).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    ambient_dim: usize,
    generators: Vec<Vec<u32>>,
}

impl MonomialIdeal {
    /// Canonicalizes: deduplicates, keeps divisibility-minimal vectors, sorts.
    pub fn new(ambient_dim: usize, generators: Vec<Vec<u32>>) -> MonomialIdeal {
        assert!(!generators.is_empty(), "monomial ideal needs a generator");
        for g in &generators {
            assert_eq!(g.len(), ambient_dim, "exponent vector length mismatch");
        }
        let mut monos: Vec<Monomial> = generators.into_iter().map(Monomial::new).collect();
        monos.sort();
        monos.dedup();
        let mut kept: Vec<Monomial> = Vec::new();
        for cand in monos {
            if !kept.iter().any(|k| k.divides(&cand)) {
                kept.push(cand);
            }
        }
        MonomialIdeal {
            ambient_dim,
            generators: kept.into_iter().map(|m| m.0).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Minimal generators, sorted in the canonical monomial order.
    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    /// The unit ideal cuts out the empty subscheme.
    pub fn is_unit(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].iter().all(|&e| e == 0)
    }

    /// Minimum total degree of a generator; zero iff unit.
    pub fn multiplicity(&self) -> u64 {
        self.generators
            .iter()
            .map(|g| g.iter().map(|&e| e as u64).sum())
            .min()
            .expect("nonempty")
    }

    /// Ideal sum (union of generating sets, re-minimalized). Same ambient.
    pub fn sum(&self, other: &MonomialIdeal) -> MonomialIdeal {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut gens = self.generators.clone();
        gens.extend(other.generators.clone());
        MonomialIdeal::new(self.ambient_dim, gens)
    }

    /// Both ideals in disjoint variable blocks; cuts out the product of the
    /// two subschemes.
    pub fn block_sum(&self, other: &MonomialIdeal) -> MonomialIdeal {
        let n = self.ambient_dim + other.ambient_dim;
        let mut gens = Vec::with_capacity(self.generators.len() + other.generators.len());
        for g in &self.generators {
            let mut v = g.clone();
            v.resize(n, 0);
            gens.push(v);
        }
        for g in &other.generators {
            let mut v = vec![0u32; self.ambient_dim];
            v.extend_from_slice(g);
            gens.push(v);
        }
        MonomialIdeal::new(n, gens)
    }

    /// Every exponent multiplied by `k >= 1`.
    pub fn scale(&self, k: u32) -> MonomialIdeal {
        assert!(k >= 1);
        MonomialIdeal::new(
            self.ambient_dim,
            self.generators
                .iter()
                .map(|g| g.iter().map(|&e| e.checked_mul(k).expect("overflow")).collect())
                .collect(),
        )
    }

    /// Restriction to the coordinate hyperplane where the last variable
    /// vanishes: generators containing that variable drop out, the rest lose
    /// their last coordinate. `None` when nothing survives (the restriction
    /// is the zero ideal and the intersection is the whole hyperplane).
    pub fn restrict_last_var_zero(&self) -> Option<MonomialIdeal> {
        assert!(self.ambient_dim >= 1);
        let survivors: Vec<Vec<u32>> = self
            .generators
            .iter()
            .filter(|g| g[self.ambient_dim - 1] == 0)
            .map(|g| g[..self.ambient_dim - 1].to_vec())
            .collect();
        if survivors.is_empty() {
            None
        } else {
            Some(MonomialIdeal::new(self.ambient_dim - 1, survivors))
        }
    }

    /// Containment as ideals: every generator of `other` is divisible by some
    /// generator of `self`.
    pub fn contains(&self, other: &MonomialIdeal) -> bool {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        other.generators.iter().all(|g| {
            let g = Monomial::new(g.clone());
            self.generators
                .iter()
                .any(|s| Monomial::new(s.clone()).divides(&g))
        })
    }

    /// Ideal view with the given (or default `x1..xn`) variable names.
    pub fn to_ideal(&self, vars: Option<Vec<String>>) -> Ideal {
        let vars = vars.unwrap_or_else(|| {
            (1..=self.ambient_dim).map(|i| format!("x{i}")).collect()
        });
        assert_eq!(vars.len(), self.ambient_dim);
        let generators = self
            .generators
            .iter()
            .map(|g| {
                Polynomial::from_terms(
                    self.ambient_dim,
                    [(Rational::one(), Monomial::new(g.clone()))],
                )
            })
            .collect();
        Ideal::new(vars, generators)
    }

    pub fn render(&self) -> String {
        self.to_ideal(None).render()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ideal;

    fn rat(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn canonical_form_merges_and_drops_zeros() {
        let n = 2;
        let x = Polynomial::variable(n, 0);
        let y = Polynomial::variable(n, 1);
        let sum = &(&x + &y) + &(-&x);
        assert_eq!(sum, y);
        let p = &x + &y;
        assert_eq!(&p + &Polynomial::zero(n), p);
        assert_eq!(&x + &x, x.scale(&rat(2)));
    }

    #[test]
    fn product_difference_of_squares() {
        let n = 2;
        let u = Polynomial::variable(n, 0);
        let v = Polynomial::variable(n, 1);
        let lhs = &(&u - &v) * &(&u + &v);
        let rhs = &(&u * &u) - &(&v * &v);
        assert_eq!(lhs, rhs);
        let p = &u + &v.scale(&rat(3));
        assert_eq!(&p * &Polynomial::one(n), p);
        let x3 = &u * &(&u * &u);
        assert_eq!(x3.terms().len(), 1);
        assert_eq!(x3.terms()[0].1.exponents(), &[3, 0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = Polynomial::variable(1, 0);
        let q = Polynomial::variable(2, 0);
        assert!(matches!(
            p.checked_add(&q),
            Err(PolyError::DimensionMismatch { left: 1, right: 2 })
        ));
        assert!(p.checked_mul(&q).is_err());
    }

    #[test]
    fn term_order_lists_low_degree_first() {
        let ideal = parse_ideal("u^2 - v^3", None).unwrap();
        assert_eq!(ideal.render(), "u^2 - v^3");
        // Degree ties break toward earlier variables (y appears first here).
        let p = parse_ideal("y^2 + x^2 + x*y", None).unwrap();
        assert_eq!(p.render(), "y^2 + y*x + x^2");
    }

    #[test]
    fn monomial_ideal_reduction_examples() {
        let ideal = parse_ideal("x^2; x^2*y; y^3", None).unwrap();
        let mi = ideal.as_monomial_ideal().unwrap();
        assert_eq!(mi.generators(), &[vec![2, 0], vec![0, 3]]);

        let cusp = parse_ideal("u^2 - v^3", None).unwrap();
        assert!(matches!(
            cusp.as_monomial_ideal(),
            Err(PolyError::NotMonomial { generator_index: 0 })
        ));

        let two = parse_ideal("x^2; y^3", None).unwrap();
        let mi = two.as_monomial_ideal().unwrap();
        assert_eq!(mi.generators(), &[vec![2, 0], vec![0, 3]]);
    }

    #[test]
    fn unit_ideal_is_flagged() {
        let mi = MonomialIdeal::new(2, vec![vec![0, 0], vec![1, 2]]);
        assert!(mi.is_unit());
        assert_eq!(mi.generators(), &[vec![0, 0]]);
        assert_eq!(mi.multiplicity(), 0);
    }

    #[test]
    fn antichain_reduction_is_a_fixed_point() {
        let mi = MonomialIdeal::new(3, vec![vec![1, 2, 0], vec![2, 2, 0], vec![0, 0, 5]]);
        let again = MonomialIdeal::new(3, mi.generators().to_vec());
        assert_eq!(mi, again);
        for a in mi.generators() {
            for b in mi.generators() {
                if a != b {
                    let (a, b) = (Monomial::new(a.clone()), Monomial::new(b.clone()));
                    assert!(!a.divides(&b));
                }
            }
        }
    }

    #[test]
    fn multiplicity_examples() {
        let i = parse_ideal("x^2; y^3", None).unwrap();
        assert_eq!(i.multiplicity_at_origin(), 2);
        let maximal = parse_ideal("x1; x2; x3; x4", None).unwrap();
        assert_eq!(maximal.multiplicity_at_origin(), 1);
        let unit_at_origin = parse_ideal("x + 1", None).unwrap();
        assert_eq!(unit_at_origin.multiplicity_at_origin(), 0);
    }

    #[test]
    fn multiplicity_positive_iff_all_generators_vanish_at_origin() {
        for text in ["x^2 + x*y; y^3", "x + 1; y", "x*y - x; y - 1"] {
            let ideal = parse_ideal(text, None).unwrap();
            let vanish = ideal
                .generators()
                .iter()
                .all(|g| g.constant_term().is_zero());
            assert_eq!(ideal.multiplicity_at_origin() >= 1, vanish, "{text}");
        }
    }

    #[test]
    fn block_sum_renames_clashing_vars() {
        let a = parse_ideal("x^2", None).unwrap();
        let b = parse_ideal("x^3", None).unwrap();
        let s = a.block_sum(&b);
        assert_eq!(s.vars(), &["x".to_string(), "x_2".to_string()]);
        assert_eq!(s.render(), "x^2; x_2^3");
    }

    #[test]
    fn monomial_ideal_contains() {
        let small = MonomialIdeal::new(2, vec![vec![2, 0]]);
        let big = MonomialIdeal::new(2, vec![vec![2, 0], vec![0, 3]]);
        assert!(big.contains(&small));
        assert!(!small.contains(&big));
    }
}
