//! Numerical certification of the inequalities behind the `1/e` lower bound.
//!
//! Every check returns a [`VerificationReport`] whose `worst_residual` is the
//! largest signed violation seen: negative or zero means every instance held,
//! and `passed` is exactly `worst_residual ≤ tolerance`. Computation failures
//! count as an infinite residual rather than aborting the check.

use rayon::prelude::*;
use serde::Serialize;

use std::f64::consts::PI;

use crate::contour::{
    domain, eval_f_tilde, log_f_tilde, log_f_tilde_slope, ode_sums, solve_y, y_prime, y_v_closed,
};
use crate::corpus::{edge_cases, verification_corpus};
use crate::density::{density_contour, density_realaxis, residue_reference, IntegrationConfig};
use crate::direction::{facet_direction, DirectionVector};
use crate::error::Result;

pub const LOWER_BOUND_TOLERANCE: f64 = 1e-9;
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-6;
pub const POINTWISE_TOLERANCE: f64 = 1e-10;
pub const SANDWICH_TOLERANCE: f64 = 1e-10;
pub const ODE_TOLERANCE: f64 = 1e-6;
pub const CAUCHY_SCHWARZ_TOLERANCE: f64 = 1e-12;
pub const LOGDERIV_TOLERANCE: f64 = 1e-6;
/// Tolerance of the slope comparison against the reference vector.
pub const LOGDERIV_INEQUALITY_TOLERANCE: f64 = 1e-8;

const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub passed: bool,
    pub worst_residual: f64,
    pub worst_location: String,
    pub grid_spec: String,
    pub tolerance: f64,
    /// Number of (direction, point) instances evaluated.
    pub instances: usize,
    /// Per-direction margins `G_u(0) - 1/e`, in corpus order (lower-bound check only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margins: Option<Vec<f64>>,
}

/// Running maximum of signed residuals.
struct Worst {
    residual: f64,
    location: String,
    instances: usize,
}

impl Worst {
    fn new() -> Self {
        Worst { residual: f64::NEG_INFINITY, location: String::new(), instances: 0 }
    }

    fn record(&mut self, residual: f64, location: impl FnOnce() -> String) {
        self.instances += 1;
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if residual > self.residual || self.location.is_empty() {
            self.residual = residual;
            self.location = location();
        }
    }

    fn record_result(&mut self, r: Result<f64>, location: impl Fn() -> String) {
        match r {
            Ok(v) => self.record(v, location),
            Err(e) => {
                let loc = format!("{} ({e})", location());
                self.record(f64::INFINITY, || loc)
            }
        }
    }

    fn finish(self, name: &str, grid_spec: String, tolerance: f64) -> VerificationReport {
        let worst_residual = if self.instances == 0 { 0.0 } else { self.residual };
        VerificationReport {
            check_name: name.to_string(),
            passed: worst_residual <= tolerance,
            worst_residual,
            worst_location: self.location,
            grid_spec,
            tolerance,
            instances: self.instances,
            margins: None,
        }
    }
}

fn fmt_u(u: &DirectionVector) -> String {
    let parts: Vec<String> = u.entries().iter().map(|v| format!("{v:.6}")).collect();
    format!("u=({})", parts.join(","))
}

/// `n` midpoints of equal cells of `(a, b)`; never touches the endpoints.
pub fn open_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    (0..n).map(|k| a + (k as f64 + 0.5) * h).collect()
}

fn describe_grid(grid: &[f64]) -> String {
    match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => format!("{} points in [{a:.6}, {b:.6}]", grid.len()),
        _ => "empty grid".to_string(),
    }
}

/// `G_u(0) ≥ 1/e` for every direction, with equality for axis directions.
pub fn check_lower_bound(corpus: &[DirectionVector], cfg: &IntegrationConfig) -> VerificationReport {
    let floor = residue_reference();
    let results: Vec<Result<f64>> =
        corpus.par_iter().map(|u| density_contour(u, cfg).map(|d| d.value)).collect();
    let mut worst = Worst::new();
    let mut margins = Vec::with_capacity(corpus.len());
    for (u, r) in corpus.iter().zip(results) {
        margins.push(r.as_ref().map(|g| g - floor).unwrap_or(f64::NAN));
        let residual = r.map(|g| {
            if u.canonicalize().is_axis() {
                (g - floor).abs()
            } else {
                floor - g
            }
        });
        worst.record_result(residual, || fmt_u(u));
    }
    let mut report = worst.finish(
        "lower_bound",
        format!("{} directions", corpus.len()),
        LOWER_BOUND_TOLERANCE,
    );
    report.margins = Some(margins);
    report
}

/// `|contour - real axis| ≤ 1e-6` for each direction and its negation.
/// Directions with fewer than two nonzero entries are skipped.
pub fn check_contour_equivalence(corpus: &[DirectionVector], cfg: &IntegrationConfig) -> VerificationReport {
    let usable: Vec<DirectionVector> = corpus
        .iter()
        .filter(|u| u.nonzero_count() >= 2)
        .flat_map(|u| [u.clone(), u.negated()])
        .collect();
    let gaps: Vec<Result<f64>> = usable
        .par_iter()
        .map(|u| {
            let c = density_contour(u, cfg)?.value;
            let r = density_realaxis(u, cfg)?.value;
            Ok((c - r).abs())
        })
        .collect();
    let mut worst = Worst::new();
    for (u, g) in usable.iter().zip(gaps) {
        worst.record_result(g, || fmt_u(u));
    }
    let skipped = corpus.len() - usable.len() / 2;
    worst.finish(
        "contour_equivalence",
        format!("{} directions and negations, {skipped} skipped", usable.len() / 2),
        EQUIVALENCE_TOLERANCE,
    )
}

/// `F̃_u(x) ≥ F̃_v(x)` on a grid inside `(-π, π)`.
pub fn check_pointwise(u: &DirectionVector, grid: &[f64]) -> VerificationReport {
    let v = DirectionVector::reference();
    let mut worst = Worst::new();
    for &x in grid {
        let r = (|| -> Result<f64> { Ok(eval_f_tilde(&v, x)? - eval_f_tilde(u, x)?) })();
        worst.record_result(r, || format!("{}, x={x:.6e}", fmt_u(u)));
    }
    worst.finish("pointwise", describe_grid(grid), POINTWISE_TOLERANCE)
}

/// `-y_v(x) ≤ y_u(x) ≤ y_v(x)` on a grid inside `(-π, π)`.
pub fn check_sandwich(u: &DirectionVector, grid: &[f64]) -> VerificationReport {
    let mut worst = Worst::new();
    for &x in grid {
        let r = (|| -> Result<f64> { Ok(solve_y(u, x)?.abs() - y_v_closed(x)?) })();
        worst.record_result(r, || format!("{}, x={x:.6e}", fmt_u(u)));
    }
    worst.finish("sandwich", describe_grid(grid), SANDWICH_TOLERANCE)
}

fn central_difference(f: &impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Central difference with step `min(1e-5, x/4)`, refined by one Richardson
/// step when the plain estimate misses `target` by more than a tenth of `tol`.
fn fd_slope(f: impl Fn(f64) -> Result<f64>, x: f64, target: f64, tol: f64) -> Result<f64> {
    let h = FD_STEP.min(0.25 * x.abs());
    let d1 = central_difference(&f, x, h)?;
    if relative_gap(d1, target) <= 0.1 * tol {
        return Ok(d1);
    }
    let d2 = central_difference(&f, x, 0.5 * h)?;
    let rich = (4.0 * d2 - d1) / 3.0;
    Ok(if relative_gap(rich, target) < relative_gap(d1, target) { rich } else { d1 })
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// The contour's differential equation against finite differences of `solve_y`,
/// as a relative residual. For `u = v` the closed-form slope is checked too.
pub fn check_ode(u: &DirectionVector, grid: &[f64]) -> VerificationReport {
    let is_v = u.canonicalize().entries() == [1.0];
    let mut worst = Worst::new();
    for &x in grid {
        let r = (|| -> Result<f64> {
            let y = solve_y(u, x)?;
            let yp = y_prime(u, x, y)?;
            let fd = fd_slope(|t| solve_y(u, t), x, yp, ODE_TOLERANCE)?;
            let mut res = relative_gap(fd, yp);
            if is_v {
                let yv = y_v_closed(x)?;
                res = res.max(relative_gap(yp, (-yv + x * x + yv * yv) / x));
            }
            Ok(res)
        })();
        worst.record_result(r, || format!("{}, x={x:.6e}", fmt_u(u)));
    }
    worst.finish("ode", describe_grid(grid), ODE_TOLERANCE)
}

/// Slacks of the two Cauchy–Schwarz inequalities on the contour and the
/// per-entry identity `x² + (-y + u_j r)² = r (u_j² x² + (1 - u_j y)²)`
/// (the `1/u_j`-form multiplied through by `u_j²`), `r = x² + y²`.
/// Returns `(worst negative slack, worst identity residual)`, both relative
/// to `max(1, |right-hand side|)`.
pub fn cauchy_schwarz_residuals(u: &DirectionVector, x: f64, y: f64) -> (f64, f64) {
    let r = x * x + y * y;
    let (a, b) = ode_sums(u, x, y);
    let (mut rhs1, mut rhs2, mut collapsed) = (0.0, 0.0, 0.0);
    let mut identity: f64 = 0.0;
    for &uj in u.entries() {
        if uj == 0.0 {
            continue;
        }
        let w = 1.0 - uj * y;
        let q = uj * uj * x * x + w * w;
        let c = -y + uj * r;
        let uq = uj / q;
        // (x/u_j)²/D_j² and (-y/u_j + r)²/D_j² with D_j = q/u_j²
        rhs1 += x * x * uq * uq;
        rhs2 += c * c * uq * uq;
        collapsed += r * uj * uj / q;
        let lhs = x * x + c * c;
        let rhs = r * q;
        identity = identity.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    let slack1 = (rhs1 - a * a) / rhs1.max(1.0);
    let slack2 = (rhs2 - b * b) / rhs2.max(1.0);
    let sum_gap = ((rhs1 + rhs2) - collapsed).abs() / collapsed.abs().max(1.0);
    ((-slack1).max(-slack2), identity.max(sum_gap))
}

/// Both Cauchy–Schwarz inequalities at `(x, y_u(x))` with slack `≥ -1e-12`,
/// and the per-entry collapse identity to `1e-12`.
pub fn check_cauchy_schwarz(u: &DirectionVector, grid: &[f64]) -> VerificationReport {
    let mut worst = Worst::new();
    for &x in grid {
        let r = solve_y(u, x).map(|y| {
            let (slack, identity) = cauchy_schwarz_residuals(u, x, y);
            slack.max(identity)
        });
        worst.record_result(r, || format!("{}, x={x:.6e}", fmt_u(u)));
    }
    worst.finish("cauchy_schwarz", describe_grid(grid), CAUCHY_SCHWARZ_TOLERANCE)
}

/// Log-derivative checks on a grid inside `(0, π)`:
/// the closed-form slope against finite differences of `log F̃_u` and, for
/// the reference vector, against `-(x² + y_v²)/x` (relative, `1e-6`); and the
/// comparison `slope_u ≥ -(x² + y_v²)/x` (absolute, `1e-8`).
pub fn check_logderiv(u: &DirectionVector, grid: &[f64]) -> Vec<VerificationReport> {
    let v = DirectionVector::reference();
    let mut closed = Worst::new();
    let mut ineq = Worst::new();
    for &x in grid {
        let loc = || format!("{}, x={x:.6e}", fmt_u(u));
        let r = (|| -> Result<(f64, f64)> {
            let y = solve_y(u, x)?;
            let slope = log_f_tilde_slope(u, x, y)?;
            let fd = fd_slope(|t| log_f_tilde(u, t), x, slope, LOGDERIV_TOLERANCE)?;
            let yv = y_v_closed(x)?;
            let slope_v = -(x * x + yv * yv) / x;
            let closed_v = log_f_tilde_slope(&v, x, yv)?;
            Ok((relative_gap(fd, slope).max(relative_gap(closed_v, slope_v)), slope_v - slope))
        })();
        match r {
            Ok((c, i)) => {
                closed.record(c, loc);
                ineq.record(i, loc);
            }
            Err(e) => {
                closed.record_result(Err(e.clone()), loc);
                ineq.record_result(Err(e), loc);
            }
        }
    }
    vec![
        closed.finish("logderiv", describe_grid(grid), LOGDERIV_TOLERANCE),
        ineq.finish("logderiv_inequality", describe_grid(grid), LOGDERIV_INEQUALITY_TOLERANCE),
    ]
}

/// Merges per-direction reports of one check into a single report.
pub fn merge(name: &str, reports: Vec<VerificationReport>, grid_spec: String) -> VerificationReport {
    let tolerance = reports.first().map_or(0.0, |r| r.tolerance);
    let instances = reports.iter().map(|r| r.instances).sum();
    let worst = reports
        .into_iter()
        .max_by(|a, b| a.worst_residual.total_cmp(&b.worst_residual));
    let (worst_residual, worst_location) =
        worst.map_or((0.0, String::new()), |r| (r.worst_residual, r.worst_location));
    VerificationReport {
        check_name: name.to_string(),
        passed: worst_residual <= tolerance,
        worst_residual,
        worst_location,
        grid_spec,
        tolerance,
        instances,
        margins: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    LowerBound,
    ContourEquivalence,
    Pointwise,
    Sandwich,
    Ode,
    CauchySchwarz,
    Logderiv,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::LowerBound,
        Check::ContourEquivalence,
        Check::Pointwise,
        Check::Sandwich,
        Check::Ode,
        Check::CauchySchwarz,
        Check::Logderiv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::LowerBound => "lower_bound",
            Check::ContourEquivalence => "contour_equivalence",
            Check::Pointwise => "pointwise",
            Check::Sandwich => "sandwich",
            Check::Ode => "ode",
            Check::CauchySchwarz => "cauchy_schwarz",
            Check::Logderiv => "logderiv",
        }
    }

    pub fn from_name(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Grid sizes used by [`run_checks`].
#[derive(Debug, Clone, Copy)]
pub struct GridSizes {
    /// Points on `(-π, π)` for the pointwise and sandwich checks.
    pub symmetric: usize,
    /// Points on `(0, X)` for the differential checks.
    pub positive: usize,
}

impl Default for GridSizes {
    fn default() -> Self {
        GridSizes { symmetric: 1000, positive: 200 }
    }
}

/// Upper end of the grid for the differential checks: inside `(0, π)` and
/// clear of a finite endpoint of the domain.
fn positive_grid_end(u: &DirectionVector) -> f64 {
    let d = domain(u);
    (0.98 * d.right).min(PI)
}

fn per_direction<F>(corpus: &[DirectionVector], name: &str, spec: &str, f: F) -> Vec<VerificationReport>
where
    F: Fn(&DirectionVector) -> Vec<VerificationReport> + Sync + Send,
{
    let per: Vec<Vec<VerificationReport>> = corpus.par_iter().map(f).collect();
    let width = per.first().map_or(0, Vec::len);
    (0..width)
        .map(|k| {
            let parts: Vec<VerificationReport> = per.iter().map(|r| r[k].clone()).collect();
            let name = parts.first().map_or(name.to_string(), |r| r.check_name.clone());
            merge(&name, parts, format!("{} directions, {spec}", corpus.len()))
        })
        .collect()
}

/// Runs `checks` over `corpus`; reports come back sorted by check name.
pub fn run_checks(
    checks: &[Check],
    corpus: &[DirectionVector],
    cfg: &IntegrationConfig,
    grids: GridSizes,
) -> Vec<VerificationReport> {
    let sym = open_grid(-PI, PI, grids.symmetric);
    let sym_spec = format!("{} midpoints of (-pi, pi)", grids.symmetric);
    let pos_spec = format!("{} midpoints of (0, min(pi, 0.98 d))", grids.positive);
    let mut reports: Vec<VerificationReport> = checks
        .par_iter()
        .flat_map(|&check| match check {
            Check::LowerBound => vec![check_lower_bound(corpus, cfg)],
            Check::ContourEquivalence => vec![check_contour_equivalence(corpus, cfg)],
            Check::Pointwise => {
                per_direction(corpus, "pointwise", &sym_spec, |u| vec![check_pointwise(u, &sym)])
            }
            Check::Sandwich => {
                per_direction(corpus, "sandwich", &sym_spec, |u| vec![check_sandwich(u, &sym)])
            }
            Check::Ode => per_direction(corpus, "ode", &pos_spec, |u| {
                vec![check_ode(u, &open_grid(0.0, positive_grid_end(u), grids.positive))]
            }),
            Check::CauchySchwarz => per_direction(corpus, "cauchy_schwarz", &pos_spec, |u| {
                vec![check_cauchy_schwarz(u, &open_grid(0.0, positive_grid_end(u), grids.positive))]
            }),
            Check::Logderiv => per_direction(corpus, "logderiv", &pos_spec, |u| {
                check_logderiv(u, &open_grid(0.0, positive_grid_end(u), grids.positive))
            }),
        })
        .collect();
    reports.sort_by(|a, b| a.check_name.cmp(&b.check_name));
    reports
}

/// The full suite on the seeded verification corpus.
pub fn run_suite(seed: u64, cfg: &IntegrationConfig) -> Vec<VerificationReport> {
    run_checks(&Check::ALL, &verification_corpus(seed), cfg, GridSizes::default())
}

/// Facet directions for `n = 2..=nmax`.
pub fn facet_corpus(nmax: usize) -> Result<Vec<DirectionVector>> {
    (2..=nmax.max(2)).map(facet_direction).collect()
}

/// Constructed edge cases alone, for quick runs.
pub fn edge_corpus() -> Vec<DirectionVector> {
    edge_cases()
}

/// One JSON object per line.
pub fn to_json_lines(reports: &[VerificationReport]) -> String {
    reports
        .iter()
        .map(|r| serde_json::to_string(r).expect("reports serialize") + "\n")
        .collect()
}
