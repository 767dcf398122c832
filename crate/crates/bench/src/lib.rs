//! Shared fixtures for the benchmarks.

use jetlct_core::{parse_ideal, Ideal, MonomialIdeal};

/// The cuspidal plane curve, the running example of the toolkit.
pub fn cusp() -> Ideal {
    parse_ideal("u^2 - v^3", None).expect("fixed input")
}

/// Exponents of the cusp after passing to the monomial ideal (x^2, y^3).
pub fn cusp_exponents() -> MonomialIdeal {
    MonomialIdeal::new(2, vec![vec![2, 0], vec![0, 3]])
}

/// A three-variable ideal with a moderately interesting polar program.
pub fn space_ideal() -> MonomialIdeal {
    MonomialIdeal::new(
        3,
        vec![vec![3, 1, 0], vec![0, 2, 2], vec![1, 0, 4], vec![0, 5, 0]],
    )
}
