//! Fixed inputs shared by the benchmarks.

use simplex_sections::{facet_direction, DirectionVector};

/// Named directions, one per sign case of `Σ u_j` plus the reference vector.
pub fn fixtures() -> Vec<(&'static str, DirectionVector)> {
    let unit = |v: &[f64]| DirectionVector::validate_unit(v).expect("fixture is a unit vector");
    vec![
        ("reference", DirectionVector::reference()),
        ("positive_sum", unit(&[0.8, 0.6])),
        ("negative_sum", unit(&[0.62f64.sqrt(), -0.19f64.sqrt(), -0.19f64.sqrt()])),
        ("facet_8", facet_direction(8).expect("n >= 2")),
    ]
}
