use num_complex::Complex64;
use serde_json::{json, Value};

use simplex_sections::contour::trace;
use simplex_sections::density::partial_fractions_estimate;
use simplex_sections::direction::{facet_section_volume, section_volume_from_density, section_volume_lower_bound};
use simplex_sections::verify::{edge_corpus, facet_corpus, run_checks, Check, GridSizes};
use simplex_sections::{
    corpus::verification_corpus, density_contour, density_monte_carlo, density_realaxis, domain, eval_f,
    facet_direction, DensityEstimate, DirectionVector, Error,
};

use crate::output::{csv, emit, json as stamp, num, pick};
use crate::{ArgandArgs, CliError, ContourArgs, CorpusArg, DensityArgs, MethodArg, VerifyArgs, VolumeArgs};

/// Hand-typed directions such as `0.7071,-0.7071,0` are accepted within this
/// distance from unit norm and rescaled.
const INPUT_NORM_TOLERANCE: f64 = 1e-3;

fn parse_dir(s: &str) -> Result<DirectionVector, CliError> {
    let entries = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| CliError::Usage(format!("cannot parse direction {s:?}: {e}")))?;
    Ok(DirectionVector::validate_unit_with(&entries, INPUT_NORM_TOLERANCE)?)
}

fn resolve(arg: &crate::DirectionArg) -> Result<DirectionVector, CliError> {
    match (&arg.dir, arg.facet) {
        (Some(s), None) => parse_dir(s),
        (None, Some(n)) => Ok(facet_direction(n)?),
        _ => Err(CliError::Usage("give exactly one of --dir or --facet".into())),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|k| if k == n - 1 { b } else { a + k as f64 * h }).collect()
}

fn check_range(lo: f64, hi: f64, what: &str) -> Result<(), CliError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Usage(format!("{what} range must be finite and increasing, got [{lo}, {hi}]")));
    }
    Ok(())
}

pub fn volume(a: &VolumeArgs) -> Result<(), CliError> {
    let cfg = a.common.config()?;
    let n = a.n;
    let u = match (&a.dir, a.facet) {
        (Some(s), false) => parse_dir(s)?,
        (None, true) => facet_direction(n)?,
        _ => return Err(CliError::Usage("give exactly one of --dir or --facet".into())),
    };
    if u.dim() != n + 1 {
        return Err(Error::DimensionMismatch { got: u.dim(), expected: n + 1 }.into());
    }
    if !u.is_centered() {
        return Err(Error::NotCentered(u.sum()).into());
    }
    let d = density_contour(&u, &cfg)?;
    let volume = section_volume_from_density(n, d.value)?;
    let lower_bound = section_volume_lower_bound(n)?;
    let facet = facet_section_volume(n)?;
    let text = pick(
        &a.common,
        || {
            stamp(
                "volume",
                json!({
                    "n": n,
                    "direction": u.entries(),
                    "volume": volume,
                    "density": d.value,
                    "density_error": d.error_estimate,
                    "lower_bound": lower_bound,
                    "facet_volume": facet,
                    "ratio_to_facet": volume / facet,
                }),
            )
        },
        || {
            csv(
                &["n", "volume", "density", "density_error", "lower_bound", "facet_volume", "ratio_to_facet"],
                [vec![
                    n.to_string(),
                    num(volume),
                    num(d.value),
                    num(d.error_estimate),
                    num(lower_bound),
                    num(facet),
                    num(volume / facet),
                ]],
            )
        },
    )?;
    emit(&a.common, &text)
}

pub fn density(a: &DensityArgs) -> Result<(), CliError> {
    let cfg = a.common.config()?;
    let u = resolve(&a.direction)?;
    let methods: &[(MethodArg, &str)] = match a.method {
        MethodArg::All => &[
            (MethodArg::Contour, "contour"),
            (MethodArg::Realaxis, "realaxis"),
            (MethodArg::Pf, "pf"),
            (MethodArg::Mc, "mc"),
        ],
        MethodArg::Contour => &[(MethodArg::Contour, "contour")],
        MethodArg::Realaxis => &[(MethodArg::Realaxis, "realaxis")],
        MethodArg::Pf => &[(MethodArg::Pf, "pf")],
        MethodArg::Mc => &[(MethodArg::Mc, "mc")],
    };
    let mut estimates: Vec<DensityEstimate> = Vec::new();
    let mut failures: Vec<(&str, Error)> = Vec::new();
    for &(m, name) in methods {
        let r = match m {
            MethodArg::Contour => density_contour(&u, &cfg),
            MethodArg::Realaxis => density_realaxis(&u, &cfg),
            MethodArg::Pf => partial_fractions_estimate(&u),
            MethodArg::Mc => density_monte_carlo(&u, a.samples, a.bandwidth, a.common.seed),
            MethodArg::All => unreachable!("expanded above"),
        };
        match r {
            Ok(e) => estimates.push(e),
            Err(e) => failures.push((name, e)),
        }
    }
    if estimates.is_empty() {
        let (_, e) = failures.into_iter().next().expect("at least one method ran");
        return Err(e.into());
    }
    let spread = if estimates.len() > 1 {
        let (lo, hi) = estimates
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e.value), hi.max(e.value)));
        Some(hi - lo)
    } else {
        None
    };
    let text = pick(
        &a.common,
        || {
            let errors: Vec<Value> = failures
                .iter()
                .map(|(m, e)| json!({ "method": m, "message": e.to_string() }))
                .collect();
            let mut body = json!({ "direction": u.entries(), "estimates": estimates, "errors": errors });
            if let Some(s) = spread {
                body["spread"] = s.into();
            }
            stamp("density", body)
        },
        || {
            let rows = estimates.iter().map(|e| {
                let method = serde_json::to_value(e.method).expect("method serializes");
                vec![method.as_str().unwrap_or_default().to_string(), num(e.value), num(e.error_estimate)]
            });
            csv(&["method", "value", "error_estimate"], rows)
        },
    )?;
    for (m, e) in &failures {
        eprintln!("{m}: {e}");
    }
    emit(&a.common, &text)
}

pub fn contour_dump(a: &ContourArgs) -> Result<(), CliError> {
    let u = resolve(&a.direction)?;
    if a.resolution < 2 {
        return Err(CliError::Usage("resolution must be at least 2".into()));
    }
    check_range(a.xmin, a.xmax, "x")?;
    let dom = domain(&u);
    for x in [a.xmin, a.xmax] {
        if !dom.contains(x) {
            return Err(Error::XOutsideDomain { x, bound: dom.right }.into());
        }
    }
    let samples = trace(&u, &linspace(a.xmin, a.xmax, a.resolution))?;
    let text = pick(
        &a.common,
        || {
            stamp(
                "contour-dump",
                json!({
                    "direction": u.entries(),
                    "case": dom.case,
                    "domain_right": if dom.right.is_finite() { Some(dom.right) } else { None },
                    "samples": samples,
                }),
            )
        },
        || {
            let rows = samples
                .iter()
                .map(|s| vec![num(s.x), num(s.y), num(s.y_prime), num(s.f_tilde), num(s.residual_phase)]);
            csv(&["x", "y", "y_prime", "f_tilde", "residual_phase"], rows)
        },
    )?;
    emit(&a.common, &text)
}

pub fn argand_grid(a: &ArgandArgs) -> Result<(), CliError> {
    let u = resolve(&a.direction)?;
    if a.resolution < 2 {
        return Err(CliError::Usage("resolution must be at least 2".into()));
    }
    check_range(a.re_min, a.re_max, "real")?;
    check_range(a.im_min, a.im_max, "imaginary")?;
    let xs = linspace(a.re_min, a.re_max, a.resolution);
    let ys = linspace(a.im_min, a.im_max, a.resolution);
    let mut cells = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            let (modulus, argument) = match eval_f(&u, Complex64::new(x, y)) {
                Ok(z) if z.norm().is_finite() => (z.norm(), z.arg()),
                Ok(_) | Err(Error::PoleHit) => (f64::INFINITY, f64::NAN),
                Err(e) => return Err(e.into()),
            };
            cells.push((x, y, modulus, argument));
        }
    }
    let text = pick(
        &a.common,
        || {
            let cells: Vec<Value> = cells
                .iter()
                .map(|&(x, y, m, g)| json!({ "x": x, "y": y, "modulus": m, "argument": g }))
                .collect();
            stamp(
                "argand-grid",
                json!({ "direction": u.entries(), "nx": xs.len(), "ny": ys.len(), "cells": cells }),
            )
        },
        || {
            let rows = cells.iter().map(|&(x, y, m, g)| vec![num(x), num(y), num(m), num(g)]);
            csv(&["x", "y", "modulus", "argument"], rows)
        },
    )?;
    emit(&a.common, &text)
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let cfg = a.common.config()?;
    let checks: Vec<Check> = if a.all || a.check.is_empty() {
        Check::ALL.to_vec()
    } else {
        a.check
            .iter()
            .map(|s| Check::from_name(s).ok_or_else(|| CliError::Usage(format!("unknown check {s:?}"))))
            .collect::<Result<_, _>>()?
    };
    let corpus = match (&a.dir, a.corpus) {
        (Some(s), _) => vec![parse_dir(s)?],
        (None, CorpusArg::Default) => verification_corpus(a.common.seed),
        (None, CorpusArg::Facet) => facet_corpus(a.nmax)?,
        (None, CorpusArg::Edge) => edge_corpus(),
    };
    let reports = run_checks(&checks, &corpus, &cfg, GridSizes::default());
    let text = pick(
        &a.common,
        || {
            reports
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(r).expect("reports serialize");
                    v["schema_version"] = crate::output::SCHEMA_VERSION.into();
                    serde_json::to_string(&v).expect("JSON values serialize") + "\n"
                })
                .collect()
        },
        || {
            let rows = reports.iter().map(|r| {
                vec![
                    r.check_name.clone(),
                    r.passed.to_string(),
                    num(r.worst_residual),
                    num(r.tolerance),
                    r.instances.to_string(),
                    r.worst_location.clone(),
                    r.grid_spec.clone(),
                ]
            });
            csv(
                &["check_name", "passed", "worst_residual", "tolerance", "instances", "worst_location", "grid_spec"],
                rows,
            )
        },
    )?;
    emit(&a.common, &text)?;
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}
