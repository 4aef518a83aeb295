//! Unit direction vectors and the closed-form geometry of the regular simplex.
//!
//! The simplex `Δ_n` is the convex hull of the standard basis of `R^{n+1}`
//! (side length `√2`). A central section is cut by the hyperplane through the
//! centroid orthogonal to a unit vector `a` with `Σ a_j = 0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default tolerance on `|‖u‖ - 1|` accepted by [`DirectionVector::validate_unit`].
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Entries with magnitude below this are dropped by [`DirectionVector::canonicalize`].
pub const ZERO_ENTRY_THRESHOLD: f64 = 1e-14;

/// `|Σ u_j|` at or below this marks the direction as centered (`u ⊥ 1`).
pub const CENTERED_TOLERANCE: f64 = 1e-12;

/// Largest `k` whose factorial is finite in `f64`.
const MAX_FACTORIAL: usize = 170;

/// A validated unit vector together with its sign census.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionVector {
    entries: Vec<f64>,
    m_plus: usize,
    m_minus: usize,
    sum: f64,
    is_centered: bool,
}

impl DirectionVector {
    /// Validates `entries` as a unit vector using [`NORM_TOLERANCE`].
    pub fn validate_unit(entries: &[f64]) -> Result<Self> {
        Self::validate_unit_with(entries, NORM_TOLERANCE)
    }

    /// Validates `entries` as a unit vector, then rescales them to unit norm.
    pub fn validate_unit_with(entries: &[f64], tolerance: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if entries.iter().all(|&v| v == 0.0) {
            return Err(Error::AllZero);
        }
        let norm = entries.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tolerance {
            return Err(Error::NotUnitNorm { norm, tolerance });
        }
        Ok(Self::from_entries(entries.iter().map(|v| v / norm).collect()))
    }

    fn from_entries(entries: Vec<f64>) -> Self {
        let m_plus = entries.iter().filter(|&&v| v > 0.0).count();
        let m_minus = entries.iter().filter(|&&v| v < 0.0).count();
        let sum: f64 = entries.iter().sum();
        DirectionVector {
            entries,
            m_plus,
            m_minus,
            sum,
            is_centered: sum.abs() <= CENTERED_TOLERANCE,
        }
    }

    /// The reference vector `v = (1)`.
    pub fn reference() -> Self {
        Self::from_entries(vec![1.0])
    }

    /// Drops entries that are zero (below [`ZERO_ENTRY_THRESHOLD`] in magnitude).
    pub fn canonicalize(&self) -> Self {
        if self.is_canonical() {
            return self.clone();
        }
        Self::from_entries(
            self.entries
                .iter()
                .copied()
                .filter(|v| v.abs() >= ZERO_ENTRY_THRESHOLD)
                .collect(),
        )
    }

    pub fn is_canonical(&self) -> bool {
        self.entries.iter().all(|v| v.abs() >= ZERO_ENTRY_THRESHOLD)
    }

    /// `-u`.
    pub fn negated(&self) -> Self {
        Self::from_entries(self.entries.iter().map(|v| -v).collect())
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn m_plus(&self) -> usize {
        self.m_plus
    }

    pub fn m_minus(&self) -> usize {
        self.m_minus
    }

    pub fn nonzero_count(&self) -> usize {
        self.m_plus + self.m_minus
    }

    /// Raw floating-point sum `Σ u_j`.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn is_centered(&self) -> bool {
        self.is_centered
    }

    /// Drift rate `μ = Σ u_j`, snapped to exactly zero for centered directions.
    ///
    /// Every phase and modulus computation uses this value so that centered
    /// directions see an exactly non-oscillating exponential factor.
    pub fn mu(&self) -> f64 {
        if self.is_centered {
            0.0
        } else {
            self.sum
        }
    }

    /// Pole ordinates `1/u_j` (infinite for zero entries).
    pub fn poles(&self) -> Vec<f64> {
        self.entries.iter().map(|v| 1.0 / v).collect()
    }

    /// The direction with a single nonzero entry equal to `±1`.
    pub fn is_axis(&self) -> bool {
        self.nonzero_count() == 1
    }
}

/// Unit normal of the central hyperplane parallel to a facet of `Δ_n`.
pub fn facet_direction(n: usize) -> Result<DirectionVector> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    let nf = n as f64;
    let scale = (nf * (nf + 1.0)).sqrt();
    let mut entries = vec![-1.0 / scale; n + 1];
    entries[0] = nf / scale;
    DirectionVector::validate_unit(&entries)
}

/// `k!` in floating point; exact for `k ≤ 22`, relative error at most `k·ε` beyond.
pub fn factorial(k: usize) -> Result<f64> {
    if k > MAX_FACTORIAL {
        return Err(Error::Overflow(k));
    }
    Ok((2..=k).fold(1.0, |acc, i| acc * i as f64))
}

/// `vol_n(Δ_n) = √(n+1)/n!`.
pub fn simplex_volume(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    Ok(((n + 1) as f64).sqrt() / factorial(n)?)
}

/// Volume of the facet-parallel central section, `(√n/(n-1)!)·(n/(n+1))^{n-1}`.
pub fn facet_section_volume(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    let nf = n as f64;
    Ok(nf.sqrt() / factorial(n - 1)? * (nf / (nf + 1.0)).powi(n as i32 - 1))
}

/// Prefactor `√(n+1)/(n-1)!` linking a section volume to the density at zero.
pub fn volume_prefactor(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    Ok(((n + 1) as f64).sqrt() / factorial(n - 1)?)
}

/// Section volume `√(n+1)/(n-1)! · g0` from the density at zero.
pub fn section_volume_from_density(n: usize, g0: f64) -> Result<f64> {
    if g0.is_nan() {
        return Err(Error::BadParameters("density is NaN".into()));
    }
    if g0 < 0.0 {
        return Err(Error::NegativeDensity(g0));
    }
    Ok(volume_prefactor(n)? * g0)
}

/// Lower bound `√(n+1)/((n-1)!·e)` on every central section volume.
pub fn section_volume_lower_bound(n: usize) -> Result<f64> {
    Ok(volume_prefactor(n)? * (-1.0f64).exp())
}
