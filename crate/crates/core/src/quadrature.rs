//! Globally adaptive Gauss–Kronrod (7/15) quadrature and Wynn's epsilon
//! algorithm for accelerating partial sums of oscillatory tails.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1); odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// QUADPACK error rescaling for the 15-point Kronrod rule.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// Single 15-point Gauss–Kronrod panel on `[a, b]`.
pub fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let err = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    Ok((value, err))
}

/// Integrates `f` over the polyline of `breakpoints` (at least two, increasing).
///
/// Bisects the panel with the largest error estimate until the summed error
/// falls below `max(abs_tol, rel_tol·|I|)`, or fails with
/// [`Error::ToleranceNotMet`] once `max_subdivisions` bisections are spent.
pub fn integrate<F>(
    mut f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if breakpoints.len() < 2 {
        return Err(Error::BadParameters("need at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            return Err(Error::BadParameters(format!("breakpoints not increasing: {a}, {b}")));
        }
        let (value, error) = gauss_kronrod(&mut f, a, b)?;
        total += value;
        total_err += error;
        heap.push(Segment { a, b, value, error });
    }
    let mut evaluations = 15 * heap.len();
    let mut splits = 0;
    loop {
        let tol = abs_tol.max(rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if splits >= max_subdivisions {
            return Err(Error::ToleranceNotMet { achieved: total_err, requested: tol });
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // panel can no longer be split in floating point
            heap.push(seg);
            return Err(Error::ToleranceNotMet { achieved: total_err, requested: tol });
        }
        let (v1, e1) = gauss_kronrod(&mut f, seg.a, mid)?;
        let (v2, e2) = gauss_kronrod(&mut f, mid, seg.b)?;
        evaluations += 30;
        splits += 1;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    // re-sum to shed drift from the incremental updates
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadResult { value, error, evaluations, intervals: heap.len() })
}

/// Wynn's epsilon algorithm over a growing sequence of partial sums.
#[derive(Debug, Clone, Default)]
pub struct EpsilonTable {
    sums: Vec<f64>,
    last: Option<f64>,
}

/// Number of trailing partial sums fed to the extrapolation.
const EPSILON_WINDOW: usize = 40;

impl EpsilonTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a partial sum and returns `(extrapolated limit, change since last call)`.
    pub fn push(&mut self, s: f64) -> (f64, f64) {
        self.sums.push(s);
        let start = self.sums.len().saturating_sub(EPSILON_WINDOW);
        let est = extrapolate(&self.sums[start..]);
        let change = match self.last {
            Some(prev) => (est - prev).abs(),
            None => f64::INFINITY,
        };
        self.last = Some(est);
        (est, change)
    }
}

fn extrapolate(seq: &[f64]) -> f64 {
    let n = seq.len();
    let mut best = seq[n - 1];
    let mut prev = vec![0.0; n + 1];
    let mut cur = seq.to_vec();
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                return if k % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            let v = cur[cur.len() - 1];
            if v.is_finite() {
                best = v;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_exact_on_polynomials() {
        for k in 0..=22 {
            let mut f = |x: f64| Ok(x.powi(k));
            let (v, _) = gauss_kronrod(&mut f, 0.0, 1.0).unwrap();
            assert_relative_eq!(v, 1.0 / (k as f64 + 1.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn adaptive_smooth_and_peaked() {
        let r = integrate(|x: f64| Ok(x.sin()), &[0.0, std::f64::consts::PI], 1e-13, 0.0, 100).unwrap();
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-13);
        let r = integrate(|x: f64| Ok(1.0 / (1e-4 + x * x)), &[-1.0, 1.0], 1e-10, 0.0, 500).unwrap();
        assert_relative_eq!(r.value, 2.0 * (1.0f64 / 1e-2).atan() / 1e-2, max_relative = 1e-10);
        assert!(r.error <= 1e-10);
    }

    #[test]
    fn adaptive_endpoint_singularity() {
        let r = integrate(|x: f64| Ok(x.sqrt().ln()), &[0.0, 1.0], 1e-10, 0.0, 200).unwrap();
        assert_relative_eq!(r.value, -0.5, epsilon = 1e-10);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate(|x: f64| Ok((1.0 / x).sin()), &[1e-9, 1.0], 1e-14, 0.0, 5);
        assert!(matches!(r, Err(Error::ToleranceNotMet { .. })));
    }

    #[test]
    fn epsilon_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut table = EpsilonTable::new();
        let mut s = 0.0;
        let mut est = 0.0;
        for k in 1..=20 {
            s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            est = table.push(s).0;
        }
        assert!((est - 2f64.ln()).abs() < 1e-12, "{est}");
    }
}
