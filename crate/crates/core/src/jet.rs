//! Level-`m` jet systems of an ideal: one new variable per base variable and
//! order, one new generator per source generator and order.
//!
//! Two presentations are built. Under the derivation convention the order-`j`
//! generator is the `j`-th iterate of the derivation sending each jet
//! variable to the next-order one (top order maps to zero). Under the
//! coefficient convention it is the coefficient of `t^j` after substituting
//! the truncated arc `x_i(t) = sum_j x_i^(j) t^j` and reducing mod
//! `t^(m+1)`. The two differ by the factorial rescaling `x^(j) <-> j! x^(j)`,
//! which is invertible in characteristic zero and over `F_p` for `p > m`; the
//! coefficient form is the one that is safe in any characteristic.

use crate::poly::{Ideal, Monomial, Polynomial, Rational};
use num_traits::One;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetConvention {
    Derivation,
    Coefficient,
}

impl fmt::Display for JetConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetConvention::Derivation => write!(f, "derivation"),
            JetConvention::Coefficient => write!(f, "coefficient"),
        }
    }
}

/// A jet variable: base variable index and derivative order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetVar {
    pub base: usize,
    pub order: u32,
}

/// Flattened index of a jet variable among the `n*(m+1)` jet variables.
pub fn jet_index(base: usize, order: u32, level: u32) -> usize {
    debug_assert!(order <= level);
    base * (level as usize + 1) + order as usize
}

/// Inverse of [`jet_index`].
pub fn jet_var_of_index(index: usize, level: u32) -> JetVar {
    let stride = level as usize + 1;
    JetVar {
        base: index / stride,
        order: (index % stride) as u32,
    }
}

/// Display name of a jet variable: primes up to order three, `x^(j)` beyond.
pub fn jet_var_name(base_name: &str, order: u32) -> String {
    if order <= 3 {
        format!("{base_name}{}", "'".repeat(order as usize))
    } else {
        format!("{base_name}^({order})")
    }
}

/// The level-`m` jet system of an ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSystem {
    source: Ideal,
    level: u32,
    convention: JetConvention,
    /// Generator `(alpha, j)` sits at position `alpha*(m+1)+j`.
    generators: Vec<Polynomial>,
}

impl JetSystem {
    pub fn source(&self) -> &Ideal {
        &self.source
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn convention(&self) -> JetConvention {
        self.convention
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    /// Generator for source generator `alpha` at order `j`.
    pub fn generator(&self, alpha: usize, order: u32) -> &Polynomial {
        &self.generators[alpha * (self.level as usize + 1) + order as usize]
    }

    /// Generators of order `j`, one per source generator.
    pub fn order_slice(&self, order: u32) -> Vec<&Polynomial> {
        (0..self.source.generators().len())
            .map(|alpha| self.generator(alpha, order))
            .collect()
    }

    /// Ambient count of the jet polynomial ring.
    pub fn num_jet_vars(&self) -> usize {
        self.source.ambient_dim() * (self.level as usize + 1)
    }

    /// Jet variable names in flattened order.
    pub fn var_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.num_jet_vars());
        for base in self.source.vars() {
            for j in 0..=self.level {
                names.push(jet_var_name(base, j));
            }
        }
        names
    }
}

/// Lifts a base-ring polynomial into the jet ring at order zero.
fn embed_at_order_zero(poly: &Polynomial, level: u32) -> Polynomial {
    let n = poly.ambient_dim();
    let jet_dim = n * (level as usize + 1);
    Polynomial::from_terms(
        jet_dim,
        poly.terms().iter().map(|(c, m)| {
            let mut exps = vec![0u32; jet_dim];
            for (i, &e) in m.exponents().iter().enumerate() {
                exps[jet_index(i, 0, level)] = e;
            }
            (c.clone(), Monomial::new(exps))
        }),
    )
}

/// One application of the derivation: each jet variable maps to the
/// next-order one, top-order variables map to zero, extended by the Leibniz
/// rule. The input must live in the jet ring of the given level.
pub fn derive_once(poly: &Polynomial, level: u32) -> Polynomial {
    let stride = level as usize + 1;
    let jet_dim = poly.ambient_dim();
    assert_eq!(jet_dim % stride, 0, "polynomial is not in a level-{level} jet ring");
    let mut terms: Vec<(Rational, Monomial)> = Vec::new();
    for (coeff, mono) in poly.terms() {
        for (idx, &exp) in mono.exponents().iter().enumerate() {
            if exp == 0 {
                continue;
            }
            let var = jet_var_of_index(idx, level);
            if var.order == level {
                // The derivation kills top-order variables.
                continue;
            }
            let mut exps = mono.exponents().to_vec();
            exps[idx] -= 1;
            exps[jet_index(var.base, var.order + 1, level)] += 1;
            terms.push((
                coeff * Rational::from_integer(exp.into()),
                Monomial::new(exps),
            ));
        }
    }
    Polynomial::from_terms(jet_dim, terms)
}

/// Truncated power series with polynomial coefficients, used to extract the
/// coefficient-convention generators.
fn series_mul(a: &[Polynomial], b: &[Polynomial], jet_dim: usize) -> Vec<Polynomial> {
    let len = a.len();
    let mut out = vec![Polynomial::zero(jet_dim); len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            if bj.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    out
}

fn coefficient_generators(poly: &Polynomial, level: u32) -> Vec<Polynomial> {
    let n = poly.ambient_dim();
    let stride = level as usize + 1;
    let jet_dim = n * stride;
    // Arc series of each variable: component j is the single jet variable of
    // that order.
    let arcs: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| {
            (0..stride)
                .map(|j| {
                    Polynomial::from_terms(
                        jet_dim,
                        [(
                            Rational::one(),
                            Monomial::variable(jet_dim, jet_index(i, j as u32, level)),
                        )],
                    )
                })
                .collect()
        })
        .collect();
    let mut value = vec![Polynomial::zero(jet_dim); stride];
    for (coeff, mono) in poly.terms() {
        let mut term = vec![Polynomial::zero(jet_dim); stride];
        term[0] = Polynomial::constant(jet_dim, coeff.clone());
        for (i, &exp) in mono.exponents().iter().enumerate() {
            for _ in 0..exp {
                term = series_mul(&term, &arcs[i], jet_dim);
            }
        }
        for (slot, t) in value.iter_mut().zip(term) {
            *slot = &*slot + &t;
        }
    }
    value
}

/// The full level-`m` jet system of an ideal in the requested convention.
pub fn build_jet_system(ideal: &Ideal, level: u32, convention: JetConvention) -> JetSystem {
    let mut generators = Vec::with_capacity(ideal.generators().len() * (level as usize + 1));
    for f in ideal.generators() {
        match convention {
            JetConvention::Derivation => {
                let mut current = embed_at_order_zero(f, level);
                for j in 0..=level {
                    generators.push(current.clone());
                    if j < level {
                        current = derive_once(&current, level);
                    }
                }
            }
            JetConvention::Coefficient => {
                generators.extend(coefficient_generators(f, level));
            }
        }
    }
    JetSystem {
        source: ideal.clone(),
        level,
        convention,
        generators,
    }
}

/// Jet system of the product subscheme: both ideals in disjoint variable
/// blocks. Equal, up to the block renaming, to the disjoint union of the two
/// individual jet systems.
pub fn jet_of_product(
    left: &Ideal,
    right: &Ideal,
    level: u32,
    convention: JetConvention,
) -> JetSystem {
    build_jet_system(&left.block_sum(right), level, convention)
}

/// Weight of a term when the order-`j` variables carry weight `j`; the
/// order-`j` generator of a jet system is homogeneous of weight `j` under
/// this grading (the arc-rescaling torus action).
pub fn term_weight(mono: &Monomial, level: u32) -> u64 {
    mono.exponents()
        .iter()
        .enumerate()
        .map(|(idx, &e)| e as u64 * jet_var_of_index(idx, level).order as u64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ideal;
    use crate::poly::render_polynomial;

    fn cusp() -> Ideal {
        parse_ideal("u^2 - v^3", None).unwrap()
    }

    fn render_system(system: &JetSystem) -> Vec<String> {
        let names = system.var_names();
        system
            .generators()
            .iter()
            .map(|g| render_polynomial(g, &names))
            .collect()
    }

    #[test]
    fn derivation_of_cusp_at_level_one() {
        let system = build_jet_system(&cusp(), 1, JetConvention::Derivation);
        assert_eq!(
            render_system(&system),
            vec!["u^2 - v^3".to_string(), "2*u*u' - 3*v^2*v'".to_string()]
        );
    }

    #[test]
    fn derivation_of_cusp_at_level_two() {
        let system = build_jet_system(&cusp(), 2, JetConvention::Derivation);
        let rendered = render_system(&system);
        assert_eq!(rendered.len(), 3);
        assert_eq!(rendered[2], "2*u*u'' + 2*u'^2 - 3*v^2*v'' - 6*v*v'^2");
    }

    #[test]
    fn level_zero_recovers_the_ideal() {
        for convention in [JetConvention::Derivation, JetConvention::Coefficient] {
            let ideal = parse_ideal("x^2 - y; x*y - 1", None).unwrap();
            let system = build_jet_system(&ideal, 0, convention);
            assert_eq!(system.generators().len(), ideal.generators().len());
            for (g, f) in system.generators().iter().zip(ideal.generators()) {
                assert_eq!(g, f);
            }
        }
    }

    #[test]
    fn derive_once_follows_the_leibniz_rule() {
        // D(u * u') = u'^2 + u * u'' at level >= 2.
        let level = 2;
        let jet_dim = 2 * 3;
        let u = Polynomial::variable(jet_dim, jet_index(0, 0, level));
        let u1 = Polynomial::variable(jet_dim, jet_index(0, 1, level));
        let d = derive_once(&(&u * &u1), level);
        let u2 = Polynomial::variable(jet_dim, jet_index(0, 2, level));
        assert_eq!(d, &(&u1 * &u1) + &(&u * &u2));

        let constant = Polynomial::constant(jet_dim, Rational::from_integer(7.into()));
        assert!(derive_once(&constant, level).is_zero());

        // D at the top order truncates: D(u'') = 0 at level 2.
        assert!(derive_once(&u2, level).is_zero());
    }

    #[test]
    fn generator_count_is_generators_times_levels() {
        let ideal = parse_ideal("x^2 - y; x*y - 1; y^4", None).unwrap();
        for m in 0..5 {
            for convention in [JetConvention::Derivation, JetConvention::Coefficient] {
                let system = build_jet_system(&ideal, m, convention);
                assert_eq!(
                    system.generators().len(),
                    ideal.generators().len() * (m as usize + 1)
                );
            }
        }
    }

    #[test]
    fn conventions_agree_up_to_factorials() {
        let ideal = parse_ideal("u^2 - v^3 + u*v", None).unwrap();
        let m = 4;
        let derivation = build_jet_system(&ideal, m, JetConvention::Derivation);
        let coefficient = build_jet_system(&ideal, m, JetConvention::Coefficient);
        let mut factorial = Rational::one();
        for j in 0..=m {
            if j > 0 {
                factorial *= Rational::from_integer(j.into());
            }
            // Substituting x^(k) -> k! x^(k) into D^j(f) gives j! times the
            // order-j arc coefficient of f.
            let rescaled = rescale_by_factorials(derivation.generator(0, j), m);
            assert_eq!(
                rescaled,
                coefficient.generator(0, j).scale(&factorial),
                "order {j}"
            );
        }
    }

    fn rescale_by_factorials(poly: &Polynomial, level: u32) -> Polynomial {
        Polynomial::from_terms(
            poly.ambient_dim(),
            poly.terms().iter().map(|(c, mono)| {
                let mut factor = Rational::one();
                for (idx, &e) in mono.exponents().iter().enumerate() {
                    let order = jet_var_of_index(idx, level).order;
                    let mut fact = Rational::one();
                    for k in 2..=order {
                        fact *= Rational::from_integer(k.into());
                    }
                    for _ in 0..e {
                        factor *= &fact;
                    }
                }
                (c * &factor, mono.clone())
            }),
        )
    }

    #[test]
    fn generators_are_weight_homogeneous()  {
        let ideal = parse_ideal("u^2 - v^3; u*v - u", None).unwrap();
        let m = 3;
        for convention in [JetConvention::Derivation, JetConvention::Coefficient] {
            let system = build_jet_system(&ideal, m, convention);
            for alpha in 0..ideal.generators().len() {
                for j in 0..=m {
                    let g = system.generator(alpha, j);
                    assert!(!g.is_zero(), "jet generators of nonzero generators are nonzero");
                    for (_, mono) in g.terms() {
                        assert_eq!(term_weight(mono, m), j as u64, "alpha={alpha} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn product_system_splits_into_blocks() {
        let left = parse_ideal("x^2", None).unwrap();
        let right = parse_ideal("y^3", None).unwrap();
        let m = 1;
        let product = jet_of_product(&left, &right, m, JetConvention::Derivation);
        let left_sys = build_jet_system(&left, m, JetConvention::Derivation);
        let right_sys = build_jet_system(&right, m, JetConvention::Derivation);

        let stride = m as usize + 1;
        // Left block: variables keep their indices.
        for (k, g) in left_sys.generators().iter().enumerate() {
            let lifted = pad_jet_poly(g, 2 * stride, 0);
            assert_eq!(product.generators()[k], lifted);
        }
        // Right block: variable indices shift by one block.
        for (k, g) in right_sys.generators().iter().enumerate() {
            let lifted = pad_jet_poly(g, 2 * stride, stride);
            assert_eq!(product.generators()[left_sys.generators().len() + k], lifted);
        }
    }

    fn pad_jet_poly(poly: &Polynomial, new_dim: usize, shift: usize) -> Polynomial {
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

    #[test]
    fn product_with_unit_ideal_contains_one() {
        let left = parse_ideal("x^2", None).unwrap();
        let unit = parse_ideal("1", None).unwrap();
        let product = jet_of_product(&left, &unit, 1, JetConvention::Coefficient);
        assert!(product
            .generators()
            .iter()
            .any(|g| g.num_terms() == 1 && g.terms()[0].1.is_unit()));
    }

    #[test]
    fn two_disjoint_copies_are_renamed_copies() {
        let ideal = parse_ideal("x^2 - y", None).unwrap();
        let m = 2;
        let product = jet_of_product(&ideal, &ideal, m, JetConvention::Derivation);
        let single = build_jet_system(&ideal, m, JetConvention::Derivation);
        let stride = (m as usize + 1) * ideal.ambient_dim();
        let count = single.generators().len();
        for (k, g) in single.generators().iter().enumerate() {
            assert_eq!(product.generators()[k], pad_jet_poly(g, 2 * stride, 0));
            assert_eq!(product.generators()[count + k], pad_jet_poly(g, 2 * stride, stride));
        }
        assert_eq!(
            product.var_names()[stride..stride + 3],
            ["x_2".to_string(), "x_2'".to_string(), "x_2''".to_string()]
        );
    }
}
