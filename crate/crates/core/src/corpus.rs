//! Seeded direction corpora: uniform samples on the sphere plus hand-picked edge cases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::direction::{facet_direction, DirectionVector};

fn gaussian(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

fn normalized(mut v: Vec<f64>) -> DirectionVector {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    DirectionVector::validate_unit(&v).expect("normalized Gaussian is a unit vector")
}

/// Uniform random unit vector in `R^dim`.
pub fn random_unit(rng: &mut impl Rng, dim: usize) -> DirectionVector {
    normalized(gaussian(rng, dim))
}

/// Uniform random unit vector in `R^dim` orthogonal to `(1, …, 1)`; `dim ≥ 2`.
pub fn random_centered(rng: &mut impl Rng, dim: usize) -> DirectionVector {
    assert!(dim >= 2, "a centered unit vector needs at least two entries");
    let mut v = gaussian(rng, dim);
    let mean = v.iter().sum::<f64>() / dim as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    let mut u = normalized(v);
    // re-center after normalization so the sum sits at rounding level
    if !u.is_centered() {
        let mut e = u.entries().to_vec();
        let mean = e.iter().sum::<f64>() / dim as f64;
        e.iter_mut().for_each(|x| *x -= mean);
        u = normalized(e);
    }
    u
}

/// `count` random unit vectors, lengths cycling through `dims`.
pub fn random_corpus(seed: u64, count: usize, dims: std::ops::RangeInclusive<usize>) -> Vec<DirectionVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<usize> = dims.collect();
    (0..count).map(|k| random_unit(&mut rng, dims[k % dims.len()])).collect()
}

/// `count` random centered directions paired with their simplex dimension `n`
/// (vector length `n + 1`), `n` cycling through `ns`.
pub fn centered_corpus(
    seed: u64,
    count: usize,
    ns: std::ops::RangeInclusive<usize>,
) -> Vec<(usize, DirectionVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ns: Vec<usize> = ns.collect();
    (0..count)
        .map(|k| {
            let n = ns[k % ns.len()];
            (n, random_centered(&mut rng, n + 1))
        })
        .collect()
}

/// Random unit vectors whose entries are pairwise at least `min_gap` apart.
pub fn distinct_corpus(
    seed: u64,
    count: usize,
    dims: std::ops::RangeInclusive<usize>,
    min_gap: f64,
) -> Vec<DirectionVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<usize> = dims.collect();
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    while out.len() < count {
        let u = random_unit(&mut rng, dims[k % dims.len()]);
        let mut s = u.entries().to_vec();
        s.sort_by(f64::total_cmp);
        if s.windows(2).all(|w| w[1] - w[0] >= min_gap) && s.iter().all(|x| x.abs() >= min_gap) {
            out.push(u);
            k += 1;
        }
    }
    out
}

/// Constructed directions covering the awkward regimes.
pub fn edge_cases() -> Vec<DirectionVector> {
    let raw: Vec<Vec<f64>> = vec![
        vec![1.0],
        vec![-1.0],
        vec![1.0, 0.0, 0.0],
        vec![0.8, 0.6],
        vec![0.6, -0.8],
        vec![0.8, -0.6],
        vec![-0.8, -0.6],
        vec![0.62f64.sqrt(), -0.19f64.sqrt(), -0.19f64.sqrt()],
        vec![0.42f64.sqrt(), 0.38f64.sqrt(), 0.20f64.sqrt()],
        // near-degenerate pair
        vec![0.5, 0.501, 0.3, -0.2],
        vec![0.4, 0.401, -0.4, -0.401, 0.2],
        // near-axis
        vec![0.999, (1.0 - 0.999f64 * 0.999).sqrt()],
        vec![0.999, 0.03, -0.02, 0.01],
        vec![-0.999, 0.03, 0.02, 0.01],
        // tiny entry
        vec![0.7, 0.7, 1e-3],
    ];
    let mut out: Vec<DirectionVector> = raw.into_iter().map(normalized).collect();
    for n in 2..=6 {
        let a = facet_direction(n).expect("n ≥ 2");
        out.push(a.negated());
        out.push(a);
    }
    out
}

/// At least 200 directions: edge cases, random unit vectors of length 2..=12 and
/// random centered vectors of length 3..=13.
pub fn verification_corpus(seed: u64) -> Vec<DirectionVector> {
    let mut out = edge_cases();
    out.extend(random_corpus(seed, 110, 2..=12));
    out.extend(centered_corpus(seed ^ 0x5eed, 80, 2..=12).into_iter().map(|(_, u)| u));
    out
}
