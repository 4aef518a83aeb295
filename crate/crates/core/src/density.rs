//! The density at zero `G_u(0)` of `Z = Σ u_j (Y_j - 1)`, `Y_j` i.i.d. standard
//! exponential, by four independent routes:
//!
//! * [`density_contour`]: `(1/2π) ∫_{E_u} F̃_u`, a positive integrand on the zero-phase contour;
//! * [`density_realaxis`]: `(1/2π) ∫_R F_u`, the oscillatory Fourier inversion integral;
//! * [`density_partial_fractions`]: the closed-form hypoexponential density;
//! * [`density_monte_carlo`]: a seeded window-count estimate.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::charfun::eval_f;
use crate::contour::{domain, eval_f_tilde, solve_y, ContourCase};
use crate::direction::{volume_prefactor, DirectionVector};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, EpsilonTable, QuadResult};

use std::f64::consts::PI;

/// Smallest admissible gap between entries for partial fractions.
pub const PF_MIN_GAP: f64 = 1e-4;

/// Largest admissible partial-fraction coefficient.
pub const PF_MAX_COEFFICIENT: f64 = 1e8;

const MC_BATCH: u64 = 1 << 16;
const MIN_MC_SAMPLES: u64 = 10_000;
const MAX_TAIL_CYCLES: usize = 4000;
const MIN_TAIL_CYCLES: usize = 8;

/// Tolerances and budgets for the quadrature-based estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationConfig {
    /// Absolute tolerance on the density.
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisection budget of the adaptive quadrature.
    pub max_subdivisions: usize,
    /// Bound on the discarded tail of an unbounded contour, in density units.
    pub tail_epsilon: f64,
    /// Fraction of a bounded contour domain left out next to its endpoint.
    pub endpoint_margin: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_subdivisions: 50_000,
            tail_epsilon: 1e-10,
            endpoint_margin: 1e-6,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.abs_tol, self.rel_tol, self.tail_epsilon, self.endpoint_margin]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !positive || self.max_subdivisions == 0 || self.endpoint_margin >= 1.0 {
            return Err(Error::BadParameters(format!("invalid integration config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Contour,
    RealAxis,
    PartialFractions,
    MonteCarlo,
}

/// Method-specific diagnostics; absent fields are omitted from JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EstimateMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<ContourCase>,
    /// Truncation point of the integration range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
    /// Bound on the part of the integral beyond the truncation point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    /// Half-period cycles summed before extrapolation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
    pub meta: EstimateMeta,
}

/// `e^{-1}`, the density at zero of `Y - 1` obtained from the residue of `F_v` at `t = i`.
pub fn residue_reference() -> f64 {
    (-1.0f64).exp()
}

/// Breakpoints `0, 1, 2, 4, …` up to `end`.
fn geometric_breakpoints(end: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut p = 1.0;
    while p < end {
        pts.push(p);
        p *= 2.0;
    }
    pts.push(end);
    pts
}

/// Density at zero by integrating the positive function `F̃_u` over `E_u`.
///
/// Bounded domains (`Σu_j ≠ 0`) are integrated up to `(1 - margin)·d`; the
/// neglected end is bounded by `δ·e^{-y_u Σu_j}/Π_j(|u_j| x)` since `|y_u|`
/// grows monotonically towards the endpoint. Unbounded domains are cut at the
/// point where the `1/x²` envelope leaves at most `tail_epsilon`.
pub fn density_contour(u: &DirectionVector, cfg: &IntegrationConfig) -> Result<DensityEstimate> {
    cfg.validate()?;
    let u = u.canonicalize();
    let dom = domain(&u);
    let (end, tail_bound) = if dom.is_bounded() {
        let end = dom.right * (1.0 - cfg.endpoint_margin);
        let delta = dom.right - end;
        let y_end = solve_y(&u, end)?;
        let log_bound = delta.ln() - y_end * u.mu()
            - u.entries().iter().map(|&v| (v.abs() * end).ln()).sum::<f64>();
        (end, if log_bound.is_nan() { f64::INFINITY } else { log_bound.exp() / PI })
    } else {
        let mut mags: Vec<f64> = u.entries().iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let c = 2.0 / (mags[0] * mags[1]);
        let min_mag = mags[mags.len() - 1];
        // (1/2π)·2∫_X^∞ C/x² dx = C/(πX)
        let end = (1.0 / min_mag).max(c / (PI * cfg.tail_epsilon));
        (end, c / (PI * end))
    };
    let quad = integrate(
        |x| eval_f_tilde(&u, x),
        &geometric_breakpoints(end),
        cfg.abs_tol * PI,
        cfg.rel_tol,
        cfg.max_subdivisions,
    )?;
    Ok(DensityEstimate {
        value: quad.value / PI,
        method: Method::Contour,
        error_estimate: quad.error / PI + tail_bound,
        meta: EstimateMeta {
            case: Some(dom.case),
            truncation: Some(end),
            tail_bound: Some(tail_bound),
            nodes: Some(quad.evaluations),
            ..Default::default()
        },
    })
}

fn re_f(u: &DirectionVector, t: f64) -> Result<f64> {
    eval_f(u, Complex64::new(t, 0.0)).map(|z| z.re)
}

fn im_f(u: &DirectionVector, t: f64) -> Result<f64> {
    eval_f(u, Complex64::new(t, 0.0)).map(|z| z.im)
}

/// Density at zero by the Fourier inversion integral `(1/2π)∫_R F_u(t) dt`.
///
/// A core interval `[0, T₀]` is integrated on quarter-period panels of the
/// drift `e^{itΣu_j}`. Beyond `T₀` the integral is summed half-period by
/// half-period and the partial sums are extrapolated with Wynn's epsilon
/// algorithm; when `Σu_j = 0` there is no oscillation and the tail is mapped
/// onto a finite interval by `t = 1/s`. Requires two nonzero entries, without
/// which `F_u` is not integrable.
pub fn density_realaxis(u: &DirectionVector, cfg: &IntegrationConfig) -> Result<DensityEstimate> {
    cfg.validate()?;
    let u = u.canonicalize();
    if u.dim() < 2 {
        return Err(Error::FewerThanTwoEntries(u.dim()));
    }
    let mu = u.mu();
    let min_mag = u.entries().iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let tol = cfg.abs_tol * PI;

    let (core_end, core_pts) = if mu == 0.0 {
        let end = 4.0 / min_mag;
        (end, geometric_breakpoints(end))
    } else {
        let half_period = PI / mu.abs();
        let quarter = 0.5 * half_period;
        let target = (4.0 / min_mag).min(2000.0 * half_period).max(2.0 * half_period);
        let cycles = (target / half_period).ceil();
        let end = cycles * half_period;
        let panels = (end / quarter).round() as usize;
        let pts: Vec<f64> = (0..=panels).map(|k| k as f64 * quarter).collect();
        (end, pts)
    };

    let core = integrate(|t| re_f(&u, t), &core_pts, tol, cfg.rel_tol, cfg.max_subdivisions)?;

    // F(-t) = conj F(t): the two halves of the imaginary part must cancel.
    let neg_pts: Vec<f64> = core_pts.iter().rev().map(|t| -t).collect();
    let im_pos = integrate(|t| im_f(&u, t), &core_pts, tol, cfg.rel_tol, cfg.max_subdivisions)?;
    let im_neg = integrate(|t| im_f(&u, t), &neg_pts, tol, cfg.rel_tol, cfg.max_subdivisions)?;
    let imag = (im_pos.value + im_neg.value) / (2.0 * PI);
    if imag.abs() > 1e-8 {
        return Err(Error::ImaginaryResidueTooLarge { real: core.value / PI, imag });
    }

    let mut nodes = core.evaluations + im_pos.evaluations + im_neg.evaluations;
    let (half, err, cycles) = if mu == 0.0 {
        let m = u.dim() as i32;
        let tail_integrand = |s: f64| -> Result<f64> {
            let mut z = Complex64::new(s.powi(m - 2), 0.0);
            for &uj in u.entries() {
                z /= Complex64::new(s, uj);
            }
            Ok(z.re)
        };
        let tail: QuadResult =
            integrate(tail_integrand, &[0.0, 1.0 / core_end], tol, cfg.rel_tol, cfg.max_subdivisions)?;
        nodes += tail.evaluations;
        (core.value + tail.value, core.error + tail.error, None)
    } else {
        let half_period = PI / mu.abs();
        let mut table = EpsilonTable::new();
        let mut partial = core.value;
        let mut quad_err = core.error;
        let mut estimate = partial;
        let mut change = f64::INFINITY;
        let mut settled = 0;
        let mut k = 0;
        while k < MAX_TAIL_CYCLES {
            let a = core_end + k as f64 * half_period;
            let b = a + half_period;
            let piece = integrate(
                |t| re_f(&u, t),
                &[a, 0.5 * (a + b), b],
                0.01 * tol,
                0.0,
                cfg.max_subdivisions,
            )?;
            nodes += piece.evaluations;
            partial += piece.value;
            quad_err += piece.error;
            let (est, ch) = table.push(partial);
            estimate = est;
            change = ch;
            k += 1;
            settled = if change <= 0.1 * tol { settled + 1 } else { 0 };
            if k >= MIN_TAIL_CYCLES && settled >= 2 {
                break;
            }
        }
        if change > tol {
            return Err(Error::ToleranceNotMet { achieved: change / PI, requested: cfg.abs_tol });
        }
        (estimate, quad_err + change, Some(k))
    };

    Ok(DensityEstimate {
        value: half / PI,
        method: Method::RealAxis,
        error_estimate: err / PI,
        meta: EstimateMeta {
            case: Some(domain(&u).case),
            truncation: Some(core_end),
            nodes: Some(nodes),
            cycles,
            ..Default::default()
        },
    })
}

/// Coefficients `A_j = Π_{k≠j} u_j/(u_j - u_k)` of `Π_k 1/(1 - u_k z) = Σ_j A_j/(1 - u_j z)`.
pub fn partial_fraction_coefficients(u: &DirectionVector) -> Result<Vec<f64>> {
    let u = u.canonicalize();
    let mut sorted = u.entries().to_vec();
    sorted.sort_by(f64::total_cmp);
    let min_gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if min_gap == 0.0 {
        return Err(Error::RepeatedEntries);
    }
    if min_gap < PF_MIN_GAP {
        return Err(Error::IllConditioned(format!("entry gap {min_gap:e} below {PF_MIN_GAP:e}")));
    }
    let entries = u.entries();
    let coeffs: Vec<f64> = entries
        .iter()
        .enumerate()
        .map(|(j, &uj)| {
            entries
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &uk)| uj / (uj - uk))
                .product()
        })
        .collect();
    if let Some(big) = coeffs.iter().map(|a| a.abs()).find(|&a| a > PF_MAX_COEFFICIENT) {
        return Err(Error::IllConditioned(format!("coefficient {big:e} above {PF_MAX_COEFFICIENT:e}")));
    }
    Ok(coeffs)
}

/// Density of `Σ u_j Y_j` at `μ = Σ u_j` from the hypoexponential closed form.
///
/// Each simple fraction `A_j/(1 - i u_j s)` inverts to `A_j e^{-w/u_j}/|u_j|`
/// supported on the side `w/u_j > 0`, so at `w = μ > 0` only positive entries
/// contribute and at `μ < 0` only negative ones. At `μ = 0` both one-sided
/// limits agree (two or more entries) and the positive side is used.
pub fn density_partial_fractions(u: &DirectionVector) -> Result<f64> {
    Ok(partial_fraction_terms(u)?.0)
}

/// Value and summed term magnitudes, the latter scaling the rounding error.
fn partial_fraction_terms(u: &DirectionVector) -> Result<(f64, f64)> {
    let coeffs = partial_fraction_coefficients(u)?;
    let u = u.canonicalize();
    let mu = u.mu();
    let positive_side = mu >= 0.0;
    let (mut value, mut scale) = (0.0, 0.0);
    for (&uj, &a) in u.entries().iter().zip(&coeffs) {
        if (uj > 0.0) == positive_side {
            let term = a / uj.abs() * (-mu / uj).exp();
            value += term;
            scale += term.abs();
        }
    }
    Ok((value, scale))
}

/// [`density_partial_fractions`] packaged as an estimate with a rounding-error bound.
pub fn partial_fractions_estimate(u: &DirectionVector) -> Result<DensityEstimate> {
    let (value, scale) = partial_fraction_terms(u)?;
    Ok(DensityEstimate {
        value,
        method: Method::PartialFractions,
        error_estimate: 8.0 * u.dim() as f64 * f64::EPSILON * scale,
        meta: EstimateMeta::default(),
    })
}

/// Window estimate `P(|Z| ≤ h)/(2h)` from `n_samples` draws of `Z`.
///
/// Draws are split into fixed batches, each with its own ChaCha stream
/// derived from `seed`, so the result does not depend on thread scheduling.
/// The error estimate is the binomial standard error scaled by `1/(2h)`.
pub fn density_monte_carlo(
    u: &DirectionVector,
    n_samples: u64,
    bandwidth: f64,
    seed: u64,
) -> Result<DensityEstimate> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::BadParameters(format!(
            "need at least {MIN_MC_SAMPLES} samples, got {n_samples}"
        )));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::BadParameters(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let u = u.canonicalize();
    let entries = u.entries();
    let batches = n_samples.div_ceil(MC_BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let count = MC_BATCH.min(n_samples - batch * MC_BATCH);
            let mut hits = 0u64;
            for _ in 0..count {
                let z: f64 = entries
                    .iter()
                    .map(|&uj| {
                        let y: f64 = Exp1.sample(&mut rng);
                        uj * (y - 1.0)
                    })
                    .sum();
                if z.abs() <= bandwidth {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let n = n_samples as f64;
    let p = hits as f64 / n;
    let p_err = p.max(1.0 / n);
    Ok(DensityEstimate {
        value: p / (2.0 * bandwidth),
        method: Method::MonteCarlo,
        error_estimate: (p_err * (1.0 - p_err) / n).sqrt() / (2.0 * bandwidth),
        meta: EstimateMeta {
            samples: Some(n_samples),
            bandwidth: Some(bandwidth),
            seed: Some(seed),
            ..Default::default()
        },
    })
}

/// `vol_{n-1}(T(a)) = √(n+1)/(n-1)! · G_a(0)` for a centered unit `a ∈ R^{n+1}`.
pub fn section_volume(a: &DirectionVector, n: usize, cfg: &IntegrationConfig) -> Result<f64> {
    if a.dim() != n + 1 {
        return Err(Error::DimensionMismatch { got: a.dim(), expected: n + 1 });
    }
    if !a.is_centered() {
        return Err(Error::NotCentered(a.sum()));
    }
    let prefactor = volume_prefactor(n)?;
    Ok(prefactor * density_contour(a, cfg)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::{facet_direction, facet_section_volume};
    use approx::assert_relative_eq;

    fn dir(v: &[f64]) -> DirectionVector {
        DirectionVector::validate_unit(v).unwrap()
    }

    // 5e^{-7/4} - 5e^{-7/3}, evaluated at 30 digits
    const PF_08_06: f64 = 0.38400987793020031935405299684;

    #[test]
    fn contour_reference_is_inverse_e() {
        let est = density_contour(&DirectionVector::reference(), &IntegrationConfig::default()).unwrap();
        assert!((est.value - residue_reference()).abs() < 1e-10, "{}", est.value);
        assert_eq!(est.meta.case, Some(ContourCase::PositiveSum));
        let neg = density_contour(&dir(&[-1.0]), &IntegrationConfig::default()).unwrap();
        assert!((neg.value - residue_reference()).abs() < 1e-10);
    }

    #[test]
    fn residue_reference_value() {
        assert_eq!(residue_reference(), 0.36787944117144233);
    }

    #[test]
    fn contour_facet_two() {
        let est = density_contour(&facet_direction(2).unwrap(), &IntegrationConfig::default()).unwrap();
        assert_relative_eq!(est.value, 0.544331053951817355, max_relative = 1e-9);
        assert_eq!(est.meta.case, Some(ContourCase::ZeroSum));
    }

    #[test]
    fn contour_two_entries_matches_closed_form() {
        let est = density_contour(&dir(&[0.8, 0.6]), &IntegrationConfig::default()).unwrap();
        assert!((est.value - PF_08_06).abs() < 1e-9, "{}", est.value);
    }

    #[test]
    fn partial_fractions_two_entries() {
        let u = dir(&[0.8, 0.6]);
        let coeffs = partial_fraction_coefficients(&u).unwrap();
        assert_relative_eq!(coeffs[0], 4.0, max_relative = 1e-14);
        assert_relative_eq!(coeffs[1], -3.0, max_relative = 1e-14);
        let g = density_partial_fractions(&u).unwrap();
        assert_relative_eq!(g, PF_08_06, max_relative = 1e-14);
        assert!(g >= residue_reference());
    }

    #[test]
    fn partial_fractions_mixed_signs_match_convolution() {
        // Direct convolution integrals of the two one-sided densities, 30 digits.
        let conv = 0.556286273622432048746550190699;
        assert_relative_eq!(density_partial_fractions(&dir(&[0.6, -0.8])).unwrap(), conv, max_relative = 1e-13);
        assert_relative_eq!(density_partial_fractions(&dir(&[0.8, -0.6])).unwrap(), conv, max_relative = 1e-13);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(density_partial_fractions(&dir(&[s, -s])).unwrap(), s, max_relative = 1e-13);
    }

    #[test]
    fn partial_fractions_rejects() {
        let u = dir(&[0.6, 0.6, 0.28f64.sqrt()]);
        assert_eq!(density_partial_fractions(&u), Err(Error::RepeatedEntries));
        let u = DirectionVector::validate_unit_with(&[0.6, 0.6 + 1e-5, 0.28f64.sqrt()], 1e-4).unwrap();
        assert!(matches!(density_partial_fractions(&u), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn realaxis_requires_two_entries() {
        assert_eq!(
            density_realaxis(&DirectionVector::reference(), &IntegrationConfig::default()),
            Err(Error::FewerThanTwoEntries(1))
        );
    }

    #[test]
    fn realaxis_matches_contour() {
        let cfg = IntegrationConfig::default();
        for u in [
            dir(&[0.8, 0.6]),
            dir(&[0.6, -0.8]),
            dir(&[-0.8, -0.6]),
            facet_direction(3).unwrap(),
            dir(&[0.6, -0.48, -0.64]),
        ] {
            let c = density_contour(&u, &cfg).unwrap().value;
            let r = density_realaxis(&u, &cfg).unwrap().value;
            assert!((c - r).abs() < 1e-8, "u={:?}: {c} vs {r}", u.entries());
        }
    }

    #[test]
    fn monte_carlo_agrees_and_is_deterministic() {
        let v = DirectionVector::reference();
        let a = density_monte_carlo(&v, 1_000_000, 0.01, 42).unwrap();
        assert!((a.value - residue_reference()).abs() < 3.0 * a.error_estimate);
        let b = density_monte_carlo(&v, 1_000_000, 0.01, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let u = dir(&[0.8, 0.6]);
        let m = density_monte_carlo(&u, 1_000_000, 0.01, 7).unwrap();
        assert!((m.value - PF_08_06).abs() < 3.0 * m.error_estimate);
        assert!(m.error_estimate > 0.0);
        assert!(density_monte_carlo(&u, 100, 0.01, 7).is_err());
        assert!(density_monte_carlo(&u, 100_000, 0.0, 7).is_err());
    }

    #[test]
    fn section_volume_facet() {
        let cfg = IntegrationConfig::default();
        for n in 2..=4 {
            let vol = section_volume(&facet_direction(n).unwrap(), n, &cfg).unwrap();
            assert_relative_eq!(vol, facet_section_volume(n).unwrap(), max_relative = 1e-9);
        }
        assert!(matches!(
            section_volume(&dir(&[1.0, 0.0, 0.0]), 2, &cfg),
            Err(Error::NotCentered(_))
        ));
        assert!(matches!(
            section_volume(&facet_direction(3).unwrap(), 2, &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
