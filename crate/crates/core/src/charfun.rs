//! The characteristic function `F_u(t) = Π_j e^{i u_j t}/(1 + i u_j t)` of
//! `Z = Σ u_j (Y_j - 1)` and its real phase lift.
//!
//! All evaluations go through logarithms so that products of many factors (or
//! large `e^{-u_j y}` terms far from the real axis) neither overflow nor
//! underflow before the final exponential.

use num_complex::Complex64;

use crate::direction::DirectionVector;
use crate::error::{Error, Result};

/// `|1 + i u_j t|` below this is reported as a pole hit.
const POLE_GUARD: f64 = 1e-300;

/// `φ(θ)` switches to its Taylor series below this magnitude.
const PHI_SERIES_CUTOFF: f64 = 1e-4;

/// One evaluation of the phase lift together with the modulus at the same point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub phi: f64,
    pub modulus: f64,
}

impl PhasePoint {
    pub fn at(u: &DirectionVector, x: f64, y: f64) -> Result<Self> {
        Ok(PhasePoint {
            x,
            y,
            phi: eval_phase_lift(u, x, y)?,
            modulus: eval_modulus(u, x, y)?,
        })
    }
}

/// Continuous `arccot` with range `(0, π)`.
pub fn arccot(z: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 - z.atan()
}

/// `φ(θ) = arctan(θ)/θ`, extended by `φ(0) = 1`.
pub fn phi_sinc(theta: f64) -> f64 {
    if theta.abs() < PHI_SERIES_CUTOFF {
        let t2 = theta * theta;
        1.0 - t2 / 3.0 + t2 * t2 / 5.0
    } else {
        theta.atan() / theta
    }
}

/// `ln |F_u(x + iy)|`, or [`Error::PoleHit`] at a pole.
pub fn log_modulus(u: &DirectionVector, x: f64, y: f64) -> Result<f64> {
    let mut acc = -y * u.mu();
    for &uj in u.entries() {
        if uj == 0.0 {
            continue;
        }
        let r = (1.0 - uj * y).hypot(uj * x);
        if r < POLE_GUARD {
            return Err(Error::PoleHit);
        }
        acc -= r.ln();
    }
    Ok(acc)
}

/// `|F_u(x + iy)| = e^{-yΣu_j} / Π_j √(u_j²x² + (1 - u_j y)²)`.
pub fn eval_modulus(u: &DirectionVector, x: f64, y: f64) -> Result<f64> {
    log_modulus(u, x, y).map(f64::exp)
}

/// `F_u(t)` for complex `t`.
pub fn eval_f(u: &DirectionVector, t: Complex64) -> Result<Complex64> {
    let (x, y) = (t.re, t.im);
    let mut log_re = -y * u.mu();
    let mut arg = x * u.mu();
    for &uj in u.entries() {
        if uj == 0.0 {
            continue;
        }
        let (re, im) = (1.0 - uj * y, uj * x);
        let r = re.hypot(im);
        if r < POLE_GUARD {
            return Err(Error::PoleHit);
        }
        log_re -= r.ln();
        arg -= im.atan2(re);
    }
    Ok(Complex64::from_polar(log_re.exp(), arg))
}

/// Certified upper bound on `|F_u(x + iy)|` decaying like `1/x²`.
///
/// With `j₁, j₂` the two largest `|u_j|` and `m = min_j |1/u_j - y|`,
/// the bound is `2/(|u_{j₁}||u_{j₂}|) · e^{-yΣu_j}/(x² + m²)` times
/// `Π_{j ≠ j₁,j₂} max(1, 1/(|u_j||x|))`; the trailing product is 1 once
/// `|x| ≥ 1/min_j |u_j|`.
pub fn tail_envelope(u: &DirectionVector, x: f64, y: f64) -> Result<f64> {
    let mut mags: Vec<(f64, f64)> = u
        .entries()
        .iter()
        .filter(|&&v| v != 0.0)
        .map(|&v| (v.abs(), v))
        .collect();
    if mags.len() < 2 {
        return Err(Error::FewerThanTwoEntries(mags.len()));
    }
    if x == 0.0 {
        return Ok(f64::INFINITY);
    }
    mags.sort_by(|a, b| b.0.total_cmp(&a.0));
    let min_gap_sq = mags
        .iter()
        .map(|&(_, v)| {
            let d = 1.0 / v - y;
            d * d
        })
        .fold(f64::INFINITY, f64::min);
    let mut log_env = (2.0 / (mags[0].0 * mags[1].0)).ln() - y * u.mu() - (x * x + min_gap_sq).ln();
    for &(a, _) in &mags[2..] {
        log_env += (-(a * x.abs()).ln()).max(0.0);
    }
    Ok(log_env.exp())
}

/// The phase lift `Φ_u(x, y) = xΣu_j - Σ_{u_j>0} α_j + Σ_{u_j<0} β_j`, `x > 0`.
///
/// `α_j = arccot((1/u_j - y)/x)` and `β_j = arccot(-(1/u_j - y)/x)` are
/// evaluated as `atan2(|u_j| x, 1 - u_j y)`, which is the same angle in
/// `(0, π)` without forming `1/u_j`.
pub fn eval_phase_lift(u: &DirectionVector, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonpositiveX(x));
    }
    Ok(phase_lift_unchecked(u, x, y))
}

pub(crate) fn phase_lift_unchecked(u: &DirectionVector, x: f64, y: f64) -> f64 {
    let mut phi = x * u.mu();
    for &uj in u.entries() {
        if uj == 0.0 {
            continue;
        }
        let angle = (uj.abs() * x).atan2(1.0 - uj * y);
        if uj > 0.0 {
            phi -= angle;
        } else {
            phi += angle;
        }
    }
    phi
}

/// Partial derivatives `(∂Φ/∂x, ∂Φ/∂y)` of the phase lift.
///
/// `∂Φ/∂y = -Σ_j x/(x² + (1/u_j - y)²) < 0`, which makes every zero-phase
/// solve a monotone root problem.
pub fn phase_lift_partials(u: &DirectionVector, x: f64, y: f64) -> (f64, f64) {
    let mut dx = u.mu();
    let mut dy = 0.0;
    for &uj in u.entries() {
        if uj == 0.0 {
            continue;
        }
        let w = 1.0 - uj * y;
        let q = uj * uj * x * x + w * w;
        dx -= uj * w / q;
        dy -= uj * uj * x / q;
    }
    (dx, dy)
}

/// Smooth extension `ψ_u(x, y) = Σu_j - Σ_j c_j φ(x c_j)` with `c_j = u_j/(1 - u_j y)`.
///
/// Equals `Φ_u(x, y)/x` for `x > 0` and is analytic on `R × (-1, 1)`.
pub fn eval_psi(u: &DirectionVector, x: f64, y: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(Error::YOutOfRange(y));
    }
    let mut psi = u.mu();
    for &uj in u.entries() {
        if uj == 0.0 {
            continue;
        }
        let c = uj / (1.0 - uj * y);
        psi -= c * phi_sinc(x * c);
    }
    Ok(psi)
}
