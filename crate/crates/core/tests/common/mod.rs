#![allow(dead_code)]

use jbtriple::Factor;

/// The factors exercised by the property sweeps.
pub fn factors() -> Vec<Factor> {
    [
        "matrix:2x2",
        "matrix:2x3",
        "matrix:3x3",
        "commutative:2",
        "commutative:4",
        "matrix:2x2+commutative:1",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

pub fn square_factors() -> Vec<Factor> {
    factors()
        .into_iter()
        .filter(|f| f.has_unitaries())
        .collect()
}
