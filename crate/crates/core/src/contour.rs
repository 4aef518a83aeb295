//! The zero-phase contour `γ_u = {x + i y_u(x)}` on which `F_u` is real and positive.
//!
//! For `x > 0`, `y_u(x)` is the unique root of `Φ_u(x, ·)`; it exists exactly
//! when `-m_-π < xΣu_j < m_+π`. The contour is extended evenly through
//! `y_u(0) = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::charfun::{eval_f, log_modulus, phase_lift_partials, phase_lift_unchecked};
use crate::direction::DirectionVector;
use crate::error::{Error, Result};

/// Absolute tolerance on `|Φ_u(x, y_u(x))|` after a root solve.
pub const PHASE_TOLERANCE: f64 = 1e-12;

/// Admissible `|Im F| / |Re F|` on the contour.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-9;

const NEWTON_TARGET: f64 = 1e-14;
const MAX_BRACKET_STEPS: usize = 2100;
const MAX_REFINE_STEPS: usize = 200;

/// Sign case of `Σ u_j`, which decides whether the contour domain is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourCase {
    PositiveSum,
    NegativeSum,
    ZeroSum,
}

/// `E_u = (-d, d)` where `d` is the right endpoint of `D_u` (infinite when `Σu_j = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourDomain {
    pub case: ContourCase,
    pub right: f64,
}

impl ContourDomain {
    pub fn contains(&self, x: f64) -> bool {
        x.abs() < self.right
    }

    pub fn is_bounded(&self) -> bool {
        self.right.is_finite()
    }
}

/// Domain of the zero-phase contour.
pub fn domain(u: &DirectionVector) -> ContourDomain {
    let mu = u.mu();
    let pi = std::f64::consts::PI;
    if mu > 0.0 {
        ContourDomain { case: ContourCase::PositiveSum, right: u.m_plus() as f64 * pi / mu }
    } else if mu < 0.0 {
        ContourDomain { case: ContourCase::NegativeSum, right: u.m_minus() as f64 * pi / -mu }
    } else {
        ContourDomain { case: ContourCase::ZeroSum, right: f64::INFINITY }
    }
}

/// One point of the contour with the real integrand value there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSample {
    pub x: f64,
    pub y: f64,
    pub y_prime: f64,
    pub f_tilde: f64,
    pub residual_phase: f64,
}

/// A zero-phase root and the phase residual achieved there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRoot {
    pub y: f64,
    pub residual: f64,
}

/// `y_u(x)`; even in `x`, zero at the origin.
pub fn solve_y(u: &DirectionVector, x: f64) -> Result<f64> {
    solve_y_seeded(u, x, 0.0).map(|r| r.y)
}

/// Root solve of `Φ_u(|x|, y) = 0` started from `seed`.
///
/// Φ is strictly decreasing in `y`, so a bracket found by geometric expansion
/// always contains exactly one root; Newton steps are taken whenever they stay
/// inside the bracket and bisection is used otherwise.
pub fn solve_y_seeded(u: &DirectionVector, x: f64, seed: f64) -> Result<PhaseRoot> {
    if !x.is_finite() {
        return Err(Error::XOutsideDomain { x, bound: domain(u).right });
    }
    let ax = x.abs();
    if ax == 0.0 {
        return Ok(PhaseRoot { y: 0.0, residual: 0.0 });
    }
    let dom = domain(u);
    if !dom.contains(ax) {
        return Err(Error::XOutsideDomain { x, bound: dom.right });
    }
    let f = |y: f64| phase_lift_unchecked(u, ax, y);

    let y0 = if seed.is_finite() { seed } else { 0.0 };
    let f0 = f(y0);
    if f0 == 0.0 {
        return Ok(PhaseRoot { y: y0, residual: 0.0 });
    }

    // Expand away from the seed in the direction of the root until Φ changes sign.
    let dir = if f0 > 0.0 { 1.0 } else { -1.0 };
    let mut step = if seed == 0.0 { 0.5 } else { 1e-2 * y0.abs().max(1.0) };
    let (mut near, mut f_near) = (y0, f0);
    let mut far;
    let mut steps = 0;
    loop {
        far = near + dir * step;
        let f_far = f(far);
        if f_far.is_nan() || far.abs() > 1e300 || steps >= MAX_BRACKET_STEPS {
            return Err(Error::BracketFailure(x));
        }
        if f_far == 0.0 {
            return Ok(PhaseRoot { y: far, residual: 0.0 });
        }
        if (f_far > 0.0) != (f_near > 0.0) {
            break;
        }
        near = far;
        f_near = f_far;
        step *= 2.0;
        steps += 1;
    }
    let (mut lo, mut hi) = if dir > 0.0 { (near, far) } else { (far, near) };

    let mut best = PhaseRoot { y: near, residual: f_near.abs() };
    let mut y = 0.5 * (lo + hi);
    for _ in 0..MAX_REFINE_STEPS {
        let fy = f(y);
        if fy.abs() < best.residual {
            best = PhaseRoot { y, residual: fy.abs() };
        }
        if fy.abs() <= NEWTON_TARGET {
            break;
        }
        if fy > 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        let (_, dy) = phase_lift_partials(u, ax, y);
        let newton = y - fy / dy;
        y = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    Ok(best)
}

/// `y_v(x) = 1 - x cot x` on `(-π, π)` for the reference vector `v = (1)`.
pub fn y_v_closed(x: f64) -> Result<f64> {
    let pi = std::f64::consts::PI;
    if !(x.abs() < pi) {
        return Err(Error::XOutsideDomain { x, bound: pi });
    }
    if x.abs() < 1e-3 {
        let x2 = x * x;
        return Ok(x2 / 3.0 + x2 * x2 / 45.0);
    }
    Ok(1.0 - x / x.tan())
}

/// The two sums of the contour's differential equation at `(x, y)`:
/// `A = Σ_j x/(x² + (1/u_j - y)²)` and `B = Σ_j (-y + u_j(x² + y²))/(x² + (1/u_j - y)²)`.
pub fn ode_sums(u: &DirectionVector, x: f64, y: f64) -> (f64, f64) {
    let r2 = x * x + y * y;
    let mut a = 0.0;
    let mut b = 0.0;
    for &uj in u.entries() {
        if uj == 0.0 {
            continue;
        }
        let w = 1.0 - uj * y;
        // u_j² / (u_j²x² + (1 - u_j y)²) = 1 / (x² + (1/u_j - y)²)
        let inv_d = uj * uj / (uj * uj * x * x + w * w);
        a += x * inv_d;
        b += (-y + uj * r2) * inv_d;
    }
    (a, b)
}

/// Slope `y_u'(x) = B/A` of the contour from its differential equation.
pub fn y_prime(u: &DirectionVector, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonpositiveX(x));
    }
    let (a, b) = ode_sums(u, x, y);
    Ok(b / a)
}

/// Closed-form `d/dx log F̃_u(x) = -(A² + B²)/A`.
pub fn log_f_tilde_slope(u: &DirectionVector, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonpositiveX(x));
    }
    let (a, b) = ode_sums(u, x, y);
    Ok(-(a * a + b * b) / a)
}

/// `F̃_u(x) = F_u(x + i y_u(x))`, a positive real even function.
pub fn eval_f_tilde(u: &DirectionVector, x: f64) -> Result<f64> {
    let root = solve_y_seeded(u, x, 0.0)?;
    f_tilde_at(u, x.abs(), root.y)
}

fn f_tilde_at(u: &DirectionVector, ax: f64, y: f64) -> Result<f64> {
    if ax == 0.0 {
        return Ok(1.0);
    }
    let f = eval_f(u, Complex64::new(ax, y))?;
    if f.im.abs() > IMAGINARY_RESIDUE_TOLERANCE * f.re.abs() + f64::MIN_POSITIVE {
        return Err(Error::ImaginaryResidueTooLarge { real: f.re, imag: f.im });
    }
    Ok(f.re)
}

/// `log F̃_u(x)`, evaluated from the modulus so that it stays finite far out.
pub fn log_f_tilde(u: &DirectionVector, x: f64) -> Result<f64> {
    let root = solve_y_seeded(u, x, 0.0)?;
    log_modulus(u, x.abs(), root.y)
}

/// Full contour sample at `x`, solving from `seed`.
pub fn sample(u: &DirectionVector, x: f64, seed: f64) -> Result<ContourSample> {
    let root = solve_y_seeded(u, x, seed)?;
    let ax = x.abs();
    let y_prime = if ax == 0.0 {
        0.0
    } else {
        // y_u is even, so its slope is odd
        let slope = y_prime(u, ax, root.y)?;
        if x < 0.0 {
            -slope
        } else {
            slope
        }
    };
    Ok(ContourSample {
        x,
        y: root.y,
        y_prime,
        f_tilde: f_tilde_at(u, ax, root.y)?,
        residual_phase: root.residual,
    })
}

/// Samples the contour along `grid`, seeding each solve with the previous root.
pub fn trace(u: &DirectionVector, grid: &[f64]) -> Result<Vec<ContourSample>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut seed = 0.0;
    for &x in grid {
        let s = sample(u, x, seed)?;
        seed = s.y;
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::facet_direction;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, FRAC_PI_2, PI};

    fn dir(v: &[f64]) -> DirectionVector {
        DirectionVector::validate_unit(v).unwrap()
    }

    /// Plain bisection on the phase lift, independent of the Newton solver.
    fn bisect_root(u: &DirectionVector, x: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phase_lift_unchecked(u, x, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn domain_cases() {
        let d = domain(&DirectionVector::reference());
        assert_eq!(d.case, ContourCase::PositiveSum);
        assert_relative_eq!(d.right, PI, max_relative = 1e-15);
        let d = domain(&facet_direction(4).unwrap());
        assert_eq!(d.case, ContourCase::ZeroSum);
        assert!(!d.is_bounded());
        let d = domain(&dir(&[0.8, 0.6]));
        assert_relative_eq!(d.right, 4.487989505128276, max_relative = 1e-14);
        let d = domain(&dir(&[-0.8, -0.6]));
        assert_eq!(d.case, ContourCase::NegativeSum);
        assert_relative_eq!(d.right, 2.0 * PI / 1.4, max_relative = 1e-14);
        let d = domain(&dir(&[0.6, -0.8]));
        assert_eq!(d.case, ContourCase::NegativeSum);
        assert_relative_eq!(d.right, PI / 0.2, max_relative = 1e-12);
    }

    #[test]
    fn solve_reference_at_half_pi() {
        let v = DirectionVector::reference();
        assert_relative_eq!(solve_y(&v, FRAC_PI_2).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(solve_y(&v, 0.0).unwrap(), 0.0);
        assert!(matches!(solve_y(&v, 3.2), Err(Error::XOutsideDomain { .. })));
    }

    #[test]
    fn solve_matches_bisection_oracle() {
        let u = dir(&[0.8, 0.6]);
        let y = solve_y(&u, 1.0).unwrap();
        let oracle = bisect_root(&u, 1.0, -10.0, 10.0);
        assert!((y - oracle).abs() < 1e-13, "{y} vs {oracle}");
        // computed independently at 30 digits
        assert!((y - 0.24992659117251723).abs() < 1e-13);
    }

    #[test]
    fn solve_is_even() {
        let u = dir(&[0.6, -0.48, -0.64]);
        for &x in &[0.3, 1.7, 2.9] {
            assert_eq!(solve_y(&u, x).unwrap(), solve_y(&u, -x).unwrap());
        }
    }

    #[test]
    fn residual_within_tolerance_on_grid() {
        for u in [dir(&[0.8, 0.6]), dir(&[0.6, -0.48, -0.64]), facet_direction(5).unwrap()] {
            let d = domain(&u);
            let right = d.right.min(40.0);
            for k in 1..400 {
                let x = right * k as f64 / 400.0;
                let r = solve_y_seeded(&u, x, 0.0).unwrap();
                assert!(r.residual <= PHASE_TOLERANCE, "x={x} residual={}", r.residual);
            }
        }
    }

    #[test]
    fn closed_form_reference_contour() {
        assert_eq!(y_v_closed(0.0).unwrap(), 0.0);
        assert_relative_eq!(y_v_closed(FRAC_PI_2).unwrap(), 1.0, epsilon = 1e-15);
        // series branch agrees with the direct formula at the switch point
        let x = 1.0001e-3;
        assert_relative_eq!(y_v_closed(x).unwrap(), 1.0 - x / x.tan(), max_relative = 1e-9);
        let mut prev = 0.0;
        for k in 1..=8 {
            let x = PI - 10f64.powi(-k);
            let y = y_v_closed(x).unwrap();
            assert!(y > prev);
            prev = y;
        }
        assert!(prev > 1e7);
        assert!(y_v_closed(PI).is_err());
    }

    #[test]
    fn trace_reference_matches_closed_form() {
        let v = DirectionVector::reference();
        let grid: Vec<f64> = (0..601).map(|k| -3.0 + 6.0 * k as f64 / 600.0).collect();
        let samples = trace(&v, &grid).unwrap();
        assert_eq!(samples.len(), 601);
        for s in &samples {
            let expected = y_v_closed(s.x).unwrap();
            assert!((s.y - expected).abs() <= 1e-10 * expected.abs().max(1.0), "x={}", s.x);
        }
        assert!(trace(&v, &[]).unwrap().is_empty());
    }

    #[test]
    fn trace_facet_positive() {
        let a = facet_direction(3).unwrap();
        let grid: Vec<f64> = (0..=400).map(|k| -20.0 + 0.1 * k as f64).collect();
        for s in trace(&a, &grid).unwrap() {
            assert!(s.f_tilde > 0.0, "x={} f={}", s.x, s.f_tilde);
        }
    }

    #[test]
    fn reference_slope_closed_form() {
        let v = DirectionVector::reference();
        for &x in &[0.2, 1.0, 2.0, 3.0] {
            let y = y_v_closed(x).unwrap();
            assert_relative_eq!(
                y_prime(&v, x, y).unwrap(),
                (-y + x * x + y * y) / x,
                max_relative = 1e-12
            );
        }
        assert_eq!(y_prime(&v, 0.0, 0.0), Err(Error::NonpositiveX(0.0)));
    }

    #[test]
    fn slope_matches_finite_difference() {
        let u = dir(&[0.8, 0.6]);
        let h = 1e-5;
        for k in 1..40 {
            let x = 0.1 * k as f64;
            let y = solve_y(&u, x).unwrap();
            let fd = (solve_y(&u, x + h).unwrap() - solve_y(&u, x - h).unwrap()) / (2.0 * h);
            let yp = y_prime(&u, x, y).unwrap();
            assert!((yp - fd).abs() <= 1e-6 * yp.abs().max(1.0), "x={x}: {yp} vs {fd}");
        }
    }

    #[test]
    fn f_tilde_values() {
        let u = dir(&[0.6, -0.48, -0.64]);
        assert_eq!(eval_f_tilde(&u, 0.0).unwrap(), 1.0);
        let v = DirectionVector::reference();
        assert_relative_eq!(eval_f_tilde(&v, FRAC_PI_2).unwrap(), 2.0 / (E * PI), max_relative = 1e-13);
        for &x in &[0.5, 1.5, 2.5] {
            assert_eq!(eval_f_tilde(&u, x).unwrap(), eval_f_tilde(&u, -x).unwrap());
            assert_relative_eq!(
                log_f_tilde(&u, x).unwrap(),
                eval_f_tilde(&u, x).unwrap().ln(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn contour_is_smooth_through_origin() {
        let u = dir(&[0.6, -0.48, -0.64]);
        let mut prev_ratio = f64::INFINITY;
        for k in 1..6 {
            let h = 10f64.powi(-k);
            let yh = solve_y(&u, h).unwrap();
            // second difference / h² stays bounded near the origin
            let second = (yh - 2.0 * solve_y(&u, 0.0).unwrap() + solve_y(&u, -h).unwrap()) / (h * h);
            assert!(second.abs() < 10.0);
            let ratio = yh.abs() / h;
            assert!(ratio < prev_ratio);
            prev_ratio = ratio;
        }
        assert!(prev_ratio < 1e-4);
    }

    #[test]
    fn contour_diverges_at_finite_endpoint() {
        for u in [dir(&[0.8, 0.6]), DirectionVector::reference(), dir(&[-0.8, -0.6])] {
            let d = domain(&u);
            let sign = if d.case == ContourCase::PositiveSum { 1.0 } else { -1.0 };
            let mut prev = 0.0;
            for k in 1..=7 {
                let x = d.right * (1.0 - 10f64.powi(-k));
                let y = sign * solve_y(&u, x).unwrap();
                assert!(y > prev, "u={:?} x={x} y={y}", u.entries());
                prev = y;
            }
            assert!(prev > 1e5);
        }
    }
}
