//! Seeded property harness for the threshold identities on monomial ideals.
//!
//! Every check draws random monomial ideals from a counter-based generator
//! (ChaCha8 keyed by the config seed, one stream per property and trial, so a
//! violation report pins down its inputs exactly) and verifies an identity or
//! inequality with exact rational arithmetic. Violations are returned as
//! data; an empty list is the expected outcome at any scale.
//!
//! All checks consume the exact paths only. Where an identity is stated at
//! the origin, the harness uses the global threshold (for a monomial ideal
//! the orbit structure pulls the worst singularity into the origin) and
//! guards that reading at runtime with a fiber-dimension sandwich at the
//! certificate level.

use crate::jet_dim;
use crate::newton::{self, LctValue};
use crate::poly::{Ideal, Monomial, MonomialIdeal, Polynomial, Rational};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Shape of one randomized run. Ranges are inclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: u64,
    pub ambient_range: (usize, usize),
    pub degree_range: (u32, u32),
    pub generator_range: (usize, usize),
}

impl TrialConfig {
    pub fn new(seed: u64, trials: u64) -> TrialConfig {
        TrialConfig {
            seed,
            trials,
            ambient_range: (1, 3),
            degree_range: (1, 4),
            generator_range: (1, 4),
        }
    }
}

/// A failed identity with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub property: String,
    pub trial: u64,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub relation: String,
    pub values: Vec<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated at trial {} (seed {}): {} with {:?} on {:?}",
            self.property, self.trial, self.seed, self.relation, self.values, self.inputs
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertyKind {
    Product,
    Intersection,
    Bounds,
    Monotonic,
    Restriction,
    All,
}

impl PropertyKind {
    pub fn parse(name: &str) -> Option<PropertyKind> {
        Some(match name {
            "product" => PropertyKind::Product,
            "intersection" => PropertyKind::Intersection,
            "bounds" => PropertyKind::Bounds,
            "monotonic" => PropertyKind::Monotonic,
            "restriction" => PropertyKind::Restriction,
            "all" => PropertyKind::All,
            _ => return None,
        })
    }

    fn stream_id(self) -> u64 {
        match self {
            PropertyKind::Product => 0,
            PropertyKind::Intersection => 1,
            PropertyKind::Bounds => 2,
            PropertyKind::Monotonic => 3,
            PropertyKind::Restriction => 4,
            PropertyKind::All => unreachable!("dispatched before streaming"),
        }
    }
}

/// One RNG per (seed, property, trial): ChaCha8 keyed by the seed with the
/// trial index in the stream word, so trials are independent and replayable.
fn trial_rng(seed: u64, property: PropertyKind, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((property.stream_id() << 48) | trial);
    rng
}

/// Uniform exponent vectors in the degree box, zero vector excluded, reduced
/// to the minimal antichain. Never the unit ideal.
pub fn sample_monomial_ideal(
    rng: &mut ChaCha8Rng,
    ambient_dim: usize,
    degree_max: u32,
    generators: usize,
) -> MonomialIdeal {
    let mut gens = Vec::with_capacity(generators);
    for _ in 0..generators {
        loop {
            let v: Vec<u32> = (0..ambient_dim)
                .map(|_| rng.gen_range(0..=degree_max))
                .collect();
            if v.iter().any(|&e| e > 0) {
                gens.push(v);
                break;
            }
        }
    }
    MonomialIdeal::new(ambient_dim, gens)
}

fn sample_from_config(rng: &mut ChaCha8Rng, cfg: &TrialConfig) -> MonomialIdeal {
    let n = rng.gen_range(cfg.ambient_range.0..=cfg.ambient_range.1);
    let d = rng.gen_range(cfg.degree_range.0..=cfg.degree_range.1);
    let g = rng.gen_range(cfg.generator_range.0..=cfg.generator_range.1);
    sample_monomial_ideal(rng, n, d, g)
}

/// Plane-curve ideals for characteristic comparisons: either a monomial pair
/// or a binomial `x^a - c y^b`, with small exponents.
pub fn sample_plane_ideal(rng: &mut ChaCha8Rng, degree_max: u32) -> Ideal {
    let vars = vec!["u".to_string(), "v".to_string()];
    let mono = |e: &[u32]| Monomial::new(e.to_vec());
    if rng.gen_bool(0.5) {
        let count = rng.gen_range(1..=2);
        let mi = sample_monomial_ideal(rng, 2, degree_max, count);
        mi.to_ideal(Some(vars))
    } else {
        let a = rng.gen_range(1..=degree_max);
        let b = rng.gen_range(1..=degree_max);
        let c = rng.gen_range(1..=4i64);
        let f = Polynomial::from_terms(
            2,
            [
                (Rational::one(), mono(&[a, 0])),
                (-Rational::from_integer(c.into()), mono(&[0, b])),
            ],
        );
        Ideal::new(vars, vec![f])
    }
}

fn lct(ideal: &MonomialIdeal) -> Rational {
    newton::lct_monomial(ideal)
        .expect("samplers never produce the unit ideal")
        .lct
}

fn violation(
    property: &str,
    cfg: &TrialConfig,
    trial: u64,
    inputs: &[&MonomialIdeal],
    relation: &str,
    values: &[Rational],
) -> Violation {
    Violation {
        property: property.to_string(),
        trial,
        seed: cfg.seed,
        inputs: inputs.iter().map(|mi| mi.render()).collect(),
        relation: relation.to_string(),
        values: values.iter().map(|v| v.to_string()).collect(),
    }
}

/// Threshold is additive across products of pairs in disjoint variables.
pub fn check_product(cfg: &TrialConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, PropertyKind::Product, trial);
        let left = sample_from_config(&mut rng, cfg);
        let right = sample_from_config(&mut rng, cfg);
        let block = left.block_sum(&right);
        let (l, r, b) = (lct(&left), lct(&right), lct(&block));
        if b != &l + &r {
            out.push(violation(
                "product",
                cfg,
                trial,
                &[&left, &right, &block],
                "lct(product) = lct(left) + lct(right)",
                &[l, r, b],
            ));
        }
    }
    out
}

/// Subadditivity: the threshold of the scheme intersection (ideal sum) is at
/// most the sum of the thresholds, all at the origin.
pub fn check_intersection(cfg: &TrialConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, PropertyKind::Intersection, trial);
        let n = rng.gen_range(cfg.ambient_range.0..=cfg.ambient_range.1);
        let d = rng.gen_range(cfg.degree_range.0..=cfg.degree_range.1);
        let g_left = rng.gen_range(cfg.generator_range.0..=cfg.generator_range.1);
        let left = sample_monomial_ideal(&mut rng, n, d, g_left);
        let g_right = rng.gen_range(cfg.generator_range.0..=cfg.generator_range.1);
        let right = sample_monomial_ideal(&mut rng, n, d, g_right);
        let sum = left.sum(&right);
        let (l, r, s) = (lct(&left), lct(&right), lct(&sum));
        if &l + &r < s {
            out.push(violation(
                "intersection",
                cfg,
                trial,
                &[&left, &right, &sum],
                "lct(left) + lct(right) >= lct(intersection)",
                &[l, r, s],
            ));
        }
        out.extend(origin_grounding("intersection", cfg, trial, &sum));
    }
    out
}

/// The global threshold of a monomial ideal is its threshold at the origin:
/// guarded by the fiber-dimension sandwich at the certificate level.
fn origin_grounding(
    property: &str,
    cfg: &TrialConfig,
    trial: u64,
    ideal: &MonomialIdeal,
) -> Vec<Violation> {
    let cert = newton::lct_monomial(ideal).expect("samplers never produce the unit ideal");
    let m = jet_dim::certificate_level(&cert);
    let n = ideal.ambient_dim();
    let fiber = jet_dim::jet_dim_monomial(ideal, m, true);
    let via_origin = Rational::from_integer((n as i64).into())
        - fiber.normalized.expect("non-unit ideal");
    let slack = Rational::new((n as i64).into(), (m as i64 + 1).into());
    if via_origin < cert.lct || via_origin > &cert.lct + &slack {
        return vec![violation(
            &format!("{property}/origin-grounding"),
            cfg,
            trial,
            &[ideal],
            "lct <= n - fiber_dim/(m*+1) <= lct + n/(m*+1)",
            &[cert.lct, via_origin],
        )];
    }
    Vec::new()
}

/// Codimension and multiplicity bounds.
pub fn check_bounds(cfg: &TrialConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, PropertyKind::Bounds, trial);
        let ideal = sample_from_config(&mut rng, cfg);
        let n = Rational::from_integer((ideal.ambient_dim() as i64).into());
        let value = lct(&ideal);
        if value > n {
            out.push(violation(
                "bounds",
                cfg,
                trial,
                &[&ideal],
                "lct <= ambient dimension",
                &[value.clone(), n.clone()],
            ));
        }
        let q = Rational::from_integer((ideal.multiplicity() as i64).into());
        let lower = Rational::one() / &q;
        let upper = &n / &q;
        if value < lower || value > upper {
            out.push(violation(
                "bounds",
                cfg,
                trial,
                &[&ideal],
                "1/mult <= lct <= n/mult",
                &[lower, value, upper],
            ));
        }
    }
    out
}

/// Enlarging an ideal (shrinking the subscheme) cannot lower the threshold.
pub fn check_monotonicity(cfg: &TrialConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, PropertyKind::Monotonic, trial);
        let ideal = sample_from_config(&mut rng, cfg);
        let d = rng.gen_range(cfg.degree_range.0..=cfg.degree_range.1);
        let extra = sample_monomial_ideal(&mut rng, ideal.ambient_dim(), d, 1);
        let enlarged = ideal.sum(&extra);
        debug_assert!(enlarged.contains(&ideal));
        let (small, big) = (lct(&ideal), lct(&enlarged));
        if big < small {
            out.push(violation(
                "monotonic",
                cfg,
                trial,
                &[&ideal, &enlarged],
                "lct(enlarged) >= lct(ideal)",
                &[small, big],
            ));
        }
    }
    out
}

/// Restriction to a coordinate hyperplane cannot raise the threshold above
/// the ambient one; an empty restriction falls back to the zero convention.
pub fn check_restriction(cfg: &TrialConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, PropertyKind::Restriction, trial);
        let ideal = sample_from_config(&mut rng, cfg);
        let ambient_lct = lct(&ideal);
        match ideal.restrict_last_var_zero() {
            None => {
                // Restriction is the zero ideal: the subscheme contains the
                // hyperplane and the restricted threshold is zero.
            }
            Some(restricted) => {
                let restricted_lct = lct(&restricted);
                if ambient_lct < restricted_lct {
                    out.push(violation(
                        "restriction",
                        cfg,
                        trial,
                        &[&ideal, &restricted],
                        "lct(ambient) >= lct(restricted)",
                        &[ambient_lct.clone(), restricted_lct],
                    ));
                }
                out.extend(origin_grounding("restriction", cfg, trial, &restricted));
            }
        }
        out.extend(origin_grounding("restriction", cfg, trial, &ideal));
    }
    out
}

pub fn check_all(cfg: &TrialConfig) -> Vec<Violation> {
    let mut out = check_product(cfg);
    out.extend(check_intersection(cfg));
    out.extend(check_bounds(cfg));
    out.extend(check_monotonicity(cfg));
    out.extend(check_restriction(cfg));
    out
}

pub fn run(kind: PropertyKind, cfg: &TrialConfig) -> Vec<Violation> {
    match kind {
        PropertyKind::Product => check_product(cfg),
        PropertyKind::Intersection => check_intersection(cfg),
        PropertyKind::Bounds => check_bounds(cfg),
        PropertyKind::Monotonic => check_monotonicity(cfg),
        PropertyKind::Restriction => check_restriction(cfg),
        PropertyKind::All => check_all(cfg),
    }
}

/// Unit-ideal convention: a product against the empty subscheme is empty.
pub fn product_with_unit_is_infinite() -> bool {
    let left = MonomialIdeal::new(2, vec![vec![2, 1]]);
    let unit = MonomialIdeal::new(1, vec![vec![0]]);
    matches!(newton::lct_value(&left.block_sum(&unit)), LctValue::Infinite)
}
