//! Acceptance criteria, one `[PASS]`/`[FAIL]` line each. Exits nonzero on any failure.

use std::f64::consts::{E, PI};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use simplex_sections::contour::ContourCase;
use simplex_sections::corpus::{centered_corpus, distinct_corpus, edge_cases, random_corpus};
use simplex_sections::density::{
    density_contour, density_monte_carlo, density_partial_fractions, residue_reference, section_volume,
    IntegrationConfig,
};
use simplex_sections::direction::{facet_direction, DirectionVector};
use simplex_sections::verify::{
    cauchy_schwarz_residuals, check_contour_equivalence, check_pointwise, check_sandwich, merge, open_grid,
    run_checks, Check, GridSizes,
};
use simplex_sections::domain;

const SEED: u64 = 42;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within_budget(elapsed: Duration, budget: Duration) -> bool {
    elapsed < budget
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Closed-form facet density `√(n/(n+1)) (n/(n+1))^{n-1}`.
fn facet_density(n: usize) -> f64 {
    let r = n as f64 / (n as f64 + 1.0);
    r.sqrt() * r.powi(n as i32 - 1)
}

fn criterion_1(cfg: &IntegrationConfig) -> Outcome {
    let t = Instant::now();
    let g = density_contour(&DirectionVector::reference(), cfg).map(|d| d.value);
    let elapsed = t.elapsed();
    match g {
        Ok(g) => {
            let diff = (g - (-1.0f64).exp()).abs();
            outcome(
                diff <= 1e-9 && within_budget(elapsed, Duration::from_secs(1)),
                format!("|G - 1/e| = {diff:.3e} (tol 1e-9), {elapsed:.2?} (budget 1 s)"),
            )
        }
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn criterion_2(cfg: &IntegrationConfig) -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        let expected = (n as f64).sqrt() / factorial(n - 1) * (n as f64 / (n as f64 + 1.0)).powi(n as i32 - 1);
        match facet_direction(n).and_then(|a| section_volume(&a, n, cfg)) {
            Ok(vol) => worst = worst.max((vol - expected).abs() / expected),
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        }
    }
    let elapsed = t.elapsed();
    outcome(
        worst <= 1e-8 && within_budget(elapsed, Duration::from_secs(10)),
        format!("worst relative error {worst:.3e} (tol 1e-8) over n=2..10, {elapsed:.2?} (budget 10 s)"),
    )
}

fn criterion_3(cfg: &IntegrationConfig) -> Outcome {
    let t = Instant::now();
    let corpus = centered_corpus(SEED, 200, 2..=12);
    let slacks: Vec<Result<f64, String>> = corpus
        .par_iter()
        .map(|(n, a)| {
            let bound = (*n as f64 + 1.0).sqrt() / factorial(n - 1) / E;
            section_volume(a, *n, cfg).map(|v| v - bound).map_err(|e| format!("n={n}: {e}"))
        })
        .collect();
    let elapsed = t.elapsed();
    let mut min_slack = f64::INFINITY;
    for s in slacks {
        match s {
            Ok(s) => min_slack = min_slack.min(s),
            Err(e) => return outcome(false, e),
        }
    }
    outcome(
        min_slack >= -1e-9 && within_budget(elapsed, Duration::from_secs(120)),
        format!("200 centered directions, n=2..12: min(vol - bound) = {min_slack:.3e}, {elapsed:.2?} (budget 120 s)"),
    )
}

fn criterion_4(cfg: &IntegrationConfig) -> Outcome {
    let corpus = random_corpus(SEED + 1, 200, 2..=12);
    let vals: Vec<_> = corpus.par_iter().map(|u| density_contour(u, cfg)).collect();
    let mut min_slack = f64::INFINITY;
    for v in vals {
        match v {
            Ok(d) => min_slack = min_slack.min(d.value - residue_reference()),
            Err(e) => return outcome(false, format!("error: {e}")),
        }
    }
    outcome(
        min_slack >= -1e-9,
        format!("200 unit directions, lengths 2..12: min(G - 1/e) = {min_slack:.3e} (tol 1e-9)"),
    )
}

fn criterion_5(cfg: &IntegrationConfig) -> Outcome {
    let t = Instant::now();
    let mut corpus = edge_cases();
    corpus.extend(random_corpus(SEED + 2, 40, 2..=12));
    corpus.extend(centered_corpus(SEED + 3, 40, 2..=12).into_iter().map(|(_, u)| u));
    let mut cases: Vec<ContourCase> = corpus.iter().map(|u| domain(u).case).collect();
    cases.sort_by_key(|c| *c as u8);
    cases.dedup();
    let r = check_contour_equivalence(&corpus, cfg);
    let elapsed = t.elapsed();
    outcome(
        r.passed && cases.len() == 3 && within_budget(elapsed, Duration::from_secs(120)),
        format!(
            "{}: worst gap {:.3e} (tol 1e-6) at {}, sign cases covered {}, {elapsed:.2?} (budget 120 s)",
            r.grid_spec,
            r.worst_residual,
            r.worst_location,
            cases.len()
        ),
    )
}

fn criterion_6(cfg: &IntegrationConfig) -> Outcome {
    let corpus = distinct_corpus(SEED + 4, 50, 2..=12, 1e-2);
    let rows: Vec<Result<(f64, f64), String>> = corpus
        .par_iter()
        .enumerate()
        .map(|(k, u)| {
            let c = density_contour(u, cfg).map_err(|e| e.to_string())?.value;
            let pf = density_partial_fractions(u).map_err(|e| e.to_string())?;
            let mc = density_monte_carlo(u, 1_000_000, 0.01, SEED + k as u64).map_err(|e| e.to_string())?;
            Ok(((c - pf).abs(), (mc.value - pf).abs() / mc.error_estimate))
        })
        .collect();
    let (mut worst_pf, mut worst_sigma): (f64, f64) = (0.0, 0.0);
    for r in rows {
        match r {
            Ok((d, s)) => {
                worst_pf = worst_pf.max(d);
                worst_sigma = worst_sigma.max(s);
            }
            Err(e) => return outcome(false, format!("error: {e}")),
        }
    }
    outcome(
        worst_pf <= 1e-8 && worst_sigma <= 3.0,
        format!(
            "50 distinct-entry directions: max |contour - pf| = {worst_pf:.3e} (tol 1e-8), \
             max |mc - pf|/sigma = {worst_sigma:.2} (tol 3, N=1e6, h=0.01)"
        ),
    )
}

/// Fifty directions: every constructed edge case plus random fill.
fn grid_corpus() -> Vec<DirectionVector> {
    let mut corpus = edge_cases();
    let fill = 50usize.saturating_sub(corpus.len());
    corpus.extend(random_corpus(SEED + 5, fill, 2..=12));
    corpus.truncate(50);
    corpus
}

fn criterion_7_8(sandwich: bool) -> Outcome {
    let corpus = grid_corpus();
    let grid = open_grid(-PI, PI, 1000);
    let reports: Vec<_> = corpus
        .par_iter()
        .map(|u| if sandwich { check_sandwich(u, &grid) } else { check_pointwise(u, &grid) })
        .collect();
    let name = if sandwich { "sandwich" } else { "pointwise" };
    let r = merge(name, reports, String::new());
    outcome(
        r.passed,
        format!(
            "{} directions x 1000 points on (-pi, pi): worst violation {:.3e} (tol 1e-10) at {}",
            corpus.len(),
            r.worst_residual,
            r.worst_location
        ),
    )
}

fn criterion_9(cfg: &IntegrationConfig) -> Outcome {
    let corpus = grid_corpus();
    let reports = run_checks(
        &[Check::Ode, Check::Logderiv, Check::CauchySchwarz],
        &corpus,
        cfg,
        GridSizes { symmetric: 0, positive: 500 },
    );
    // collapse identity at scattered (x, y, u_j), off the contour
    let mut identity: f64 = 0.0;
    let mut s = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..10_000 {
        let uj = 2.0 * next() - 1.0;
        let x = 10.0 * next() + 1e-3;
        let y = 20.0 * next() - 10.0;
        let u = DirectionVector::validate_unit(&[uj, (1.0 - uj * uj).sqrt()]).expect("unit");
        identity = identity.max(cauchy_schwarz_residuals(&u, x, y).1);
    }
    let mut passed = identity <= 1e-12;
    let mut parts = vec![format!("collapse identity off-contour {identity:.3e} (tol 1e-12)")];
    for r in reports.iter().filter(|r| r.check_name != "logderiv_inequality") {
        passed &= r.passed;
        parts.push(format!("{} {:.3e} (tol {:.0e})", r.check_name, r.worst_residual, r.tolerance));
    }
    outcome(passed, parts.join(", "))
}

fn criterion_10(cfg: &IntegrationConfig) -> Outcome {
    let mut ratios = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 2..=30 {
        match facet_direction(n).and_then(|a| density_contour(&a, cfg)) {
            Ok(d) => {
                let ratio = d.value * E;
                worst = worst.max((ratio - facet_density(n) * E).abs());
                ratios.push(ratio);
            }
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        }
    }
    let monotone = ratios.windows(2).all(|w| w[1] < w[0] && w[1] > 1.0);
    outcome(
        monotone && worst <= 1e-8,
        format!(
            "e*G(facet) decreasing to 1 over n=2..30 ({:.9} -> {:.9}): {monotone}, worst error {worst:.3e} (tol 1e-8)",
            ratios[0],
            ratios[ratios.len() - 1]
        ),
    )
}

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn main() {
    let cfg = IntegrationConfig::default();
    let criteria: Vec<Criterion> = vec![
        ("1 equality case", Box::new(move || criterion_1(&cfg))),
        ("2 facet volume chain", Box::new(move || criterion_2(&cfg))),
        ("3 section volume lower bound", Box::new(move || criterion_3(&cfg))),
        ("4 density lower bound", Box::new(move || criterion_4(&cfg))),
        ("5 contour vs real axis", Box::new(move || criterion_5(&cfg))),
        ("6 partial fractions and Monte Carlo", Box::new(move || criterion_6(&cfg))),
        ("7 pointwise comparison", Box::new(|| criterion_7_8(false))),
        ("8 sandwich", Box::new(|| criterion_7_8(true))),
        ("9 ODE, log-derivative, Cauchy-Schwarz", Box::new(move || criterion_9(&cfg))),
        ("10 asymptotic sharpness", Box::new(move || criterion_10(&cfg))),
    ];
    let mut failures = 0;
    for (name, run) in &criteria {
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!("[{}] {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
