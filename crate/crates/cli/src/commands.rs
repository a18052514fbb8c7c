//! Command implementations and exit-code mapping.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use cogcap_core::analytic::{
    fit_scaling_exponent, lambda_star_siso, scaling_bounds, transmission_capacity,
    CrossPowerMode, ScalingVariable,
};
use cogcap_core::mc::{
    max_intensity_search, validate_lemmas, validate_power_marks, validate_superposition,
    LemmaCheck,
};
use cogcap_core::scenario::Regime;
use cogcap_core::{Error, Result};

use crate::output::{emit_csv, emit_json, fmt_sig, Provenance, ResultRow};
use crate::spec::ExperimentSpec;
use crate::svg::{emit_plot, PlotSpec, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VALIDATION_FAILURE: i32 = 4;
pub const EXIT_IO: i32 = 5;

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_INVALID_CONFIG,
    }
}

pub fn out_dir(spec: &ExperimentSpec) -> PathBuf {
    spec.out_dir.clone().unwrap_or_else(|| PathBuf::from("cogcap-out"))
}

pub fn ensure_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))
}

fn elapsed_if(timings: bool, start: Instant) -> Option<f64> {
    timings.then(|| start.elapsed().as_secs_f64())
}

/// One analytic-plus-optional-MC evaluation of a scenario.
fn evaluate_row(spec: &ExperimentSpec, regime: Regime, mode: CrossPowerMode) -> Result<ResultRow> {
    let start = Instant::now();
    let cfg = spec.scenario.resolve()?;
    let plan = spec.plan.to_plan();
    let mut row = ResultRow::analytic(cfg, plan.master_seed);

    let closed_form = matches!(regime, Regime::Siso | Regime::Baseline);
    if closed_form {
        let analytic = lambda_star_siso(&cfg, mode)?;
        row.lambda_star_analytic = Some(analytic.lambda_star);
        row.binding_constraint = Some(analytic.binding_constraint);
        row.capacity = Some(analytic.capacity);
    } else if !spec.mc {
        return Err(Error::InvalidParameter(format!(
            "no closed-form intensity for the {regime} regime; enable the Monte Carlo search (mc)"
        )));
    }
    if spec.mc {
        let search = max_intensity_search(&cfg, regime, &plan, spec.search_tolerance())?;
        row = row.with_search(&search, plan.trials);
        if !closed_form {
            row.binding_constraint = Some(search.binding_constraint);
            row.capacity =
                Some(transmission_capacity(search.lambda_star_mc, cfg.eps_s, cfg.beta_s)?);
        }
    }
    row.wall_time_s = elapsed_if(spec.timings, start);
    Ok(row)
}

pub fn run_capacity(spec: &ExperimentSpec) -> Result<i32> {
    let regime = spec.regime();
    let mode = spec.mode();
    let row = evaluate_row(spec, regime, mode)?;
    let dir = out_dir(spec);
    ensure_out(&dir)?;
    let prov = Provenance::new("capacity", spec);
    emit_csv(std::slice::from_ref(&row), &prov, &dir.join("capacity.csv"))?;
    emit_json(std::slice::from_ref(&row), &prov, &dir.join("capacity.json"))?;
    println!(
        "capacity: regime={regime} mode={mode} lambda_star_analytic={} lambda_star_mc={} binding={} capacity={}",
        row.lambda_star_analytic.map(fmt_sig).unwrap_or_else(|| "-".into()),
        row.lambda_star_mc.map(fmt_sig).unwrap_or_else(|| "-".into()),
        row.binding_constraint.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
        row.capacity.map(fmt_sig).unwrap_or_else(|| "-".into()),
    );
    Ok(EXIT_OK)
}

pub fn run_sweep(spec: &ExperimentSpec) -> Result<i32> {
    let sweep = spec
        .sweep
        .clone()
        .ok_or_else(|| Error::InvalidParameter("sweep needs an axis and values".into()))?;
    if sweep.values.is_empty() {
        return Err(Error::InvalidParameter("sweep value list is empty".into()));
    }
    let regime = spec.regime();
    let mode = spec.mode();
    let mut rows = Vec::with_capacity(sweep.values.len());
    for &value in &sweep.values {
        let mut point = spec.clone();
        point.set_axis_value(&sweep.axis, value)?;
        rows.push(evaluate_row(&point, regime, mode)?);
    }
    let dir = out_dir(spec);
    ensure_out(&dir)?;
    let prov = Provenance::new("sweep", spec);
    emit_csv(&rows, &prov, &dir.join("sweep.csv"))?;
    emit_json(&rows, &prov, &dir.join("sweep.json"))?;

    let mut series = Vec::new();
    if rows.iter().all(|r| r.lambda_star_analytic.is_some()) {
        series.push(Series {
            label: "analytic".into(),
            points: sweep
                .values
                .iter()
                .zip(&rows)
                .map(|(&v, r)| (v, r.lambda_star_analytic.unwrap()))
                .collect(),
        });
    }
    if rows.iter().all(|r| r.lambda_star_mc.is_some()) {
        series.push(Series {
            label: "monte carlo".into(),
            points: sweep
                .values
                .iter()
                .zip(&rows)
                .map(|(&v, r)| (v, r.lambda_star_mc.unwrap()))
                .collect(),
        });
    }
    if !series.is_empty() && sweep.values.len() >= 2 {
        let plot = PlotSpec {
            title: format!("maximum secondary intensity vs {}", sweep.axis),
            x_label: sweep.axis.clone(),
            y_label: "lambda_star (nodes/m^2)".into(),
            ..Default::default()
        };
        emit_plot(&series, &plot, &dir.join("sweep.svg"))?;
    }
    println!("sweep: {} rows over {} -> {}", rows.len(), sweep.axis, dir.display());
    Ok(EXIT_OK)
}

pub fn run_validate(spec: &ExperimentSpec) -> Result<i32> {
    let cfg = spec.scenario.resolve()?;
    let plan = spec.plan.to_plan();
    let mut checks = validate_lemmas(plan.trials as usize, plan.master_seed)?;

    let sup = validate_superposition(&cfg, &plan)?;
    checks.push(LemmaCheck {
        name: "two-network interference matches single equivalent PPP".into(),
        statistic: sup.matched.statistic,
        p_value: sup.matched.p_value,
        pass: sup.matched.p_value > 0.01,
        detail: format!("equivalent intensity {}", fmt_sig(sup.equivalent_intensity)),
    });
    checks.push(LemmaCheck {
        name: "negative control (half intensity) is rejected".into(),
        statistic: sup.control.statistic,
        p_value: sup.control.p_value,
        pass: sup.control.p_value < 0.01,
        detail: "mis-scaled construction must fail the KS test".into(),
    });
    let marks = validate_power_marks(&cfg, &plan)?;
    checks.push(LemmaCheck {
        name: "power-marked union PPP matches two-network construction".into(),
        statistic: marks.statistic,
        p_value: marks.p_value,
        pass: marks.p_value > 0.01,
        detail: format!("P_p share {}", fmt_sig(cfg.lambda_p / (cfg.lambda_p + cfg.lambda_s))),
    });

    let mut all_pass = true;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        let p = if c.p_value.is_nan() {
            format!("stat={:.3e}", c.statistic)
        } else {
            format!("D={:.4}, p={:.4}", c.statistic, c.p_value)
        };
        println!("{status}  {}  ({p}; {})", c.name, c.detail);
        all_pass &= c.pass;
    }
    let dir = out_dir(spec);
    ensure_out(&dir)?;
    let report = json!({
        "tool": "cogcap",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "validate",
        "samples": plan.trials,
        "master_seed": plan.master_seed,
        "checks": checks,
        "all_pass": all_pass,
    });
    std::fs::write(
        dir.join("validate.json"),
        serde_json::to_string_pretty(&report).unwrap() + "\n",
    )
    .map_err(|e| Error::Io(format!("cannot write validate.json: {e}")))?;
    Ok(if all_pass { EXIT_OK } else { EXIT_VALIDATION_FAILURE })
}

/// Antenna-count grid of one scaling experiment.
pub struct ScalingPoint {
    pub size: usize,
    pub row: ResultRow,
}

/// Run the intensity search over a grid of antenna counts and fit the
/// log-log slope.
pub fn run_scaling(spec: &ExperimentSpec, variable: ScalingVariable) -> Result<i32> {
    let regime = match spec.regime() {
        r @ (Regime::Miso | Regime::Mimo) => r,
        other => {
            return Err(Error::InvalidParameter(format!(
                "scaling needs the miso or mimo regime, got {other}"
            )))
        }
    };
    let sizes = spec.sizes.clone().unwrap_or_else(|| vec![2, 4, 8, 16]);
    if sizes.len() < 3 {
        return Err(Error::InvalidParameter("scaling needs at least 3 sizes".into()));
    }
    let theta = spec.theta.unwrap_or(0.5);
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0,1], got {theta}")));
    }

    let points = scaling_rows(spec, regime, variable, &sizes, theta)?;
    let dir = out_dir(spec);
    ensure_out(&dir)?;
    let rows: Vec<ResultRow> = points.iter().map(|p| p.row.clone()).collect();
    let prov = Provenance::new("scaling", spec);
    emit_csv(&rows, &prov, &dir.join("scaling.csv"))?;
    emit_json(&rows, &prov, &dir.join("scaling.json"))?;

    let fit_points: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.row.lambda_star_mc.filter(|&l| l > 0.0).map(|l| (p.size as f64, l)))
        .collect();
    let fitted = if fit_points.len() >= 3 { Some(fit_scaling_exponent(&fit_points)?) } else { None };
    let cfg0 = spec.scenario.resolve()?;
    let (n_ref, m_ref) = match (regime, variable) {
        (Regime::Miso, _) => (*sizes.last().unwrap(), 1),
        (Regime::Mimo, ScalingVariable::N) => (*sizes.last().unwrap(), *sizes.last().unwrap()),
        (Regime::Mimo, ScalingVariable::M) => (1, *sizes.last().unwrap()),
        _ => unreachable!(),
    };
    let bounds = scaling_bounds(regime, cfg0.alpha, n_ref, m_ref)?;
    let summary = json!({
        "tool": "cogcap",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "scaling",
        "regime": regime.to_string(),
        "variable": variable.to_string(),
        "theta": theta,
        "sizes": sizes,
        "lambda_star_mc": points.iter().map(|p| p.row.lambda_star_mc).collect::<Vec<_>>(),
        "fitted_slope": fitted.map(|f| f.0),
        "fitted_intercept": fitted.map(|f| f.1),
        "fit_rms_residual": fitted.map(|f| f.2),
        "bound_lower_exponent": bounds.lower_exponent,
        "bound_upper_exponent": bounds.upper_exponent,
        "bound_variable": bounds.variable.to_string(),
    });
    std::fs::write(
        dir.join("scaling_summary.json"),
        serde_json::to_string_pretty(&summary).unwrap() + "\n",
    )
    .map_err(|e| Error::Io(format!("cannot write scaling_summary.json: {e}")))?;

    if fit_points.len() >= 2 {
        let plot = PlotSpec {
            title: format!("intensity scaling in {variable} ({regime}, theta = {theta})"),
            x_label: variable.to_string(),
            y_label: "lambda_star_mc (nodes/m^2)".into(),
            log_x: true,
            log_y: true,
            slope_annotation: fitted.map(|f| f.0),
        };
        let series = [Series { label: "measured".into(), points: fit_points.clone() }];
        emit_plot(&series, &plot, &dir.join("scaling.svg"))?;
    }
    match fitted {
        Some((slope, _, _)) => println!(
            "scaling: fitted exponent {slope:.3} (bounds {:.3}..{:.3} in {})",
            bounds.lower_exponent, bounds.upper_exponent, bounds.variable
        ),
        None => println!("scaling: too few positive intensities to fit an exponent"),
    }
    Ok(EXIT_OK)
}

/// Search lambda* over a size grid (shared by `scaling` and the figure
/// presets).
pub fn scaling_rows(
    spec: &ExperimentSpec,
    regime: Regime,
    variable: ScalingVariable,
    sizes: &[usize],
    theta: f64,
) -> Result<Vec<ScalingPoint>> {
    let mut out = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let start = Instant::now();
        let mut point = spec.clone();
        match (regime, variable) {
            (Regime::Miso, _) => {
                point.scenario.n_tx = size;
                point.scenario.m_rx = 1;
                point.scenario.k_null = ((theta * size as f64).ceil() as usize).clamp(1, size - 1);
                point.scenario.m_cancel = 0;
            }
            (Regime::Mimo, ScalingVariable::N) => {
                point.scenario.n_tx = size;
                point.scenario.m_rx = size;
                point.scenario.k_null = size - 1;
                point.scenario.m_cancel =
                    ((theta * size as f64).ceil() as usize).min(size.saturating_sub(1));
            }
            (Regime::Mimo, ScalingVariable::M) => {
                point.scenario.n_tx = 1;
                point.scenario.m_rx = size;
                point.scenario.k_null = 0;
                point.scenario.m_cancel =
                    ((theta * size as f64).ceil() as usize).min(size.saturating_sub(1));
            }
            _ => unreachable!(),
        }
        let cfg = point.scenario.resolve()?;
        let plan = point.plan.to_plan();
        let search = max_intensity_search(&cfg, regime, &plan, point.search_tolerance())?;
        let mut row = ResultRow::analytic(cfg, plan.master_seed).with_search(&search, plan.trials);
        row.capacity = Some(transmission_capacity(search.lambda_star_mc, cfg.eps_s, cfg.beta_s)?);
        row.wall_time_s = elapsed_if(point.timings, start);
        out.push(ScalingPoint { size, row });
    }
    Ok(out)
}
