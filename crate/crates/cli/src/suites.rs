//! The three verification suites run against a catalog entry.

use fpe_core::families::moment_integral;
use fpe_core::mc_verify::{moment_check, simulate, McConfig};
use fpe_core::numerics::seeded_stream;
use fpe_core::pde_verify::{evolve_physical, evolve_similarity_frame, truncation_window, Grid1D};
use fpe_core::similarity::{PhysicalPoint, SimilaritySolution};
use fpe_core::{FpeError, Result};
use serde_json::{json, Value};

use crate::catalog::{Entry, Regularity};
use crate::report::{json_params, ErrorInfo, Metrics, Report, Suite};

pub const DEFAULT_MC_PATHS: usize = 1_000_000;
/// Paths per family in `fpe report --all`.
pub const REPORT_MC_PATHS: usize = 50_000;
pub const RESIDUAL_POINTS: usize = 100;
pub const RESIDUAL_STEP: f64 = 1e-2;
pub const MASS_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
pub const MC_T0: f64 = 1.0;
pub const MC_T1: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub workers: usize,
    pub paths: Option<usize>,
    pub dt: Option<f64>,
    pub cells: Option<usize>,
}

struct Outcome {
    metrics: Metrics,
    thresholds: Metrics,
    details: Value,
}

/// `max |J|` just inside each wall (or at the cut-off of an infinite side)
/// relative to the largest interior `|J|`, at time `t`.
pub fn boundary_flux_ratio(sol: &SimilaritySolution, t: f64) -> Result<f64> {
    let d = sol.support();
    let (zl, zh) = sol.effective_z_range(1e-14)?;
    let a = if d.z_lo.is_finite() { d.z_lo } else { zl };
    let b = if d.z_hi.is_finite() { d.z_hi } else { zh };
    let s = t.powf(sol.alpha());
    let current = |z: f64| -> Result<f64> { Ok(sol.probability_current(&PhysicalPoint::new(z * s, t)?)?.abs()) };
    let n = 2000;
    let mut interior: f64 = 0.0;
    for i in 1..n {
        interior = interior.max(current(a + (b - a) * i as f64 / n as f64)?);
    }
    let delta = 1e-12 * (b - a);
    let edge = current(a + delta)?.max(current(b - delta)?);
    Ok(edge / interior)
}

/// Largest deviation of `t^α W(z t^α, t)` from `y(z)` over `t ∈ {0.5,1,2,4}`,
/// relative to `y(z)`.
pub fn self_similarity_defect(sol: &SimilaritySolution, n: usize) -> Result<f64> {
    let (zl, zh) = sol.effective_z_range(1e-10)?;
    let mut worst: f64 = 0.0;
    for i in 1..n {
        let z = zl + (zh - zl) * i as f64 / n as f64;
        let y = sol.y(z)?;
        if y == 0.0 {
            continue;
        }
        for t in MASS_TIMES {
            let s = t.powf(sol.alpha());
            worst = worst.max((s * sol.pdf_xt(z * s, t)? - y).abs() / y);
        }
    }
    Ok(worst)
}

fn interior_sampler(sol: &SimilaritySolution) -> Result<(f64, f64)> {
    let (zl, zh) = sol.effective_z_range(1e-10)?;
    let margin = 1e-2 * (zh - zl);
    Ok((zl + margin, zh - margin))
}

fn residual_suite(entry: &Entry, opts: &SuiteOptions) -> Result<Outcome> {
    let sol = &entry.solution;
    let alpha = sol.alpha();
    let (zl, zh) = interior_sampler(sol)?;
    let mut rng = seeded_stream(opts.seed, 0);
    let mut residual: f64 = 0.0;
    let mut residual_plain: f64 = 0.0;
    let mut first_integral: f64 = 0.0;
    let mut closed: f64 = 0.0;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < RESIDUAL_POINTS {
        attempts += 1;
        if attempts > 100 * RESIDUAL_POINTS {
            return Err(FpeError::StencilOutOfDomain);
        }
        let z = zl + (zh - zl) * rng.uniform_open();
        let t = 0.5 + 3.5 * rng.uniform_open();
        let p = PhysicalPoint::new(z * t.powf(alpha), t)?;
        match sol.fpe_residual_extrapolated(&p, RESIDUAL_STEP, RESIDUAL_STEP) {
            Ok(r) => residual = residual.max(r),
            Err(FpeError::StencilOutOfDomain) => continue,
            Err(e) => return Err(e),
        }
        residual_plain = residual_plain.max(sol.fpe_residual(&p, RESIDUAL_STEP, RESIDUAL_STEP)?);
        accepted += 1;
        first_integral = first_integral.max(sol.first_integral_residual(z, 1e-3)?.abs());
        if let Some(exact) = entry.closed_form(p.x, p.t) {
            if exact > 1e-300 {
                closed = closed.max((sol.pdf(&p)? - exact).abs() / exact);
            }
        }
    }
    let mut mass: f64 = 0.0;
    for t in MASS_TIMES {
        mass = mass.max((sol.mass_at(t)? - 1.0).abs());
    }
    let mut flux: f64 = 0.0;
    for t in [0.5, 1.0, 4.0] {
        flux = flux.max(boundary_flux_ratio(sol, t)?);
    }
    let has_closed = entry.has_closed_form();
    let closed_tol = if matches!(entry.family, "diffusion" | "exponential" | "gaussian") { 1e-12 } else { 1e-10 };
    let mut details = json!({
        "residual_points": RESIDUAL_POINTS,
        "residual_step": RESIDUAL_STEP,
        "residual_max_5point": residual_plain,
    });
    if entry.family == "moment" {
        details["moment_integrals"] = moment_table();
    }
    Ok(Outcome {
        metrics: Metrics {
            residual_max: Some(residual),
            normalization: Some(mass),
            first_integral_max: Some(first_integral),
            boundary_flux: Some(flux),
            self_similarity: Some(self_similarity_defect(sol, 50)?),
            closed_form_rel: has_closed.then_some(closed),
            ..Default::default()
        },
        thresholds: Metrics {
            residual_max: Some(1e-6),
            normalization: Some(1e-8),
            first_integral_max: Some(1e-8),
            boundary_flux: Some(1e-8),
            self_similarity: Some(1e-12),
            closed_form_rel: has_closed.then_some(closed_tol),
            ..Default::default()
        },
        details,
    })
}

/// `I_k` by quadrature next to `2^k Γ((k+1)/2)` and the tabulated values;
/// odd orders disagree with the table by `2^{(k+1)/2}`.
pub fn moment_table() -> Value {
    let rows: Vec<Value> = (0..=8)
        .map(|k| {
            let m = moment_integral(k);
            json!({
                "k": k,
                "quadrature": m.value,
                "closed_form": m.closed_form,
                "tabulated": m.tabulated,
                "closed_over_tabulated": m.closed_form / m.tabulated,
            })
        })
        .collect();
    Value::Array(rows)
}

fn pde_suite(entry: &Entry, opts: &SuiteOptions) -> Result<Outcome> {
    let sol = &entry.solution;
    if entry.is_moving() {
        let d = sol.support();
        let cells = opts.cells.unwrap_or(400);
        let dt = opts.dt.unwrap_or(1e-3);
        let grid = Grid1D::new(d.z_lo, d.z_hi, cells, dt, 0.0, 1.0)?;
        let run = evolve_similarity_frame(sol, &grid, None)?;
        return Ok(Outcome {
            metrics: Metrics {
                l1: Some(run.report.l1_error),
                linf: Some(run.report.linf_error),
                mass_drift: Some(run.report.mass_drift),
                ..Default::default()
            },
            thresholds: Metrics {
                l1: Some(1e-4),
                mass_drift: Some(1e-10),
                ..Default::default()
            },
            details: json!({
                "frame": "similarity", "z_lo": d.z_lo, "z_hi": d.z_hi, "tau1": 1.0,
                "cells": cells, "dt": dt, "steps": run.report.steps, "min_ratio": run.report.min_ratio,
            }),
        });
    }
    let (lo, hi) = truncation_window(sol, 1.0, 2.0, 1e-16)?;
    let cells = opts.cells.unwrap_or(1201.max(((hi - lo) / 0.02).ceil() as usize));
    let dt = opts.dt.unwrap_or(5e-4);
    let grid = Grid1D::new(lo, hi, cells, dt, 1.0, 2.0)?;
    let run = evolve_physical(sol, &grid)?;
    let l1_tol = if entry.family == "diffusion" { 5e-4 } else { 1e-3 };
    Ok(Outcome {
        metrics: Metrics {
            l1: Some(run.report.l1_error),
            linf: Some(run.report.linf_error),
            mass_drift: Some(run.report.mass_drift),
            ..Default::default()
        },
        thresholds: Metrics {
            l1: Some(l1_tol),
            mass_drift: Some(1e-10),
            ..Default::default()
        },
        details: json!({
            "frame": "physical", "x_lo": lo, "x_hi": hi, "t0": 1.0, "t1": 2.0,
            "cells": cells, "dt": dt, "steps": run.report.steps, "min_ratio": run.report.min_ratio,
        }),
    })
}

/// KS allowance on top of the 1% critical value `1.63/√n`.
pub fn ks_allowance(regularity: Regularity) -> f64 {
    match regularity {
        Regularity::Smooth => 0.0014,
        Regularity::Wall => 0.0024,
        Regularity::SingularDrift => 0.0034,
    }
}

pub fn mc_config(entry: &Entry, opts: &SuiteOptions, default_paths: usize) -> McConfig {
    let default_dt = if entry.family == "moment" && entry.regularity == Regularity::SingularDrift { 2e-4 } else { 1e-3 };
    McConfig {
        n_paths: opts.paths.unwrap_or(default_paths),
        t0: MC_T0,
        t1: MC_T1,
        dt: opts.dt.unwrap_or(default_dt),
        seed: opts.seed,
        workers: opts.workers,
    }
}

fn mc_suite(entry: &Entry, cfg: &McConfig) -> Result<Outcome> {
    let sol = &entry.solution;
    let run = simulate(sol, cfg)?;
    let moments = moment_check(&run.samples, sol, cfg.t1, &[1, 2])?;
    let z_max = moments.iter().map(|m| m.z_score.abs()).fold(0.0, f64::max);
    let ks_tol = 1.63 / (cfg.n_paths as f64).sqrt() + ks_allowance(entry.regularity);
    let moment_rows: Vec<Value> = moments
        .iter()
        .map(|m| json!({ "order": m.order, "empirical": m.empirical, "exact": m.exact, "z": m.z_score }))
        .collect();
    Ok(Outcome {
        metrics: Metrics {
            ks: Some(run.report.ks_distance),
            moment_z_max: Some(z_max),
            ..Default::default()
        },
        thresholds: Metrics {
            ks: Some(ks_tol),
            moment_z_max: Some(4.0),
            ..Default::default()
        },
        details: json!({
            "paths": cfg.n_paths, "dt": cfg.dt, "t0": cfg.t0, "t1": cfg.t1, "seed": cfg.seed,
            "workers": cfg.workers, "boundary_reflections": run.report.boundary_reflections,
            "moments": moment_rows,
        }),
    })
}

fn error_kind(e: &FpeError) -> &'static str {
    match e {
        FpeError::QuadratureFailure { .. } => "quadrature_failure",
        FpeError::SingularIntegrand { .. } => "singular_integrand",
        FpeError::NonFiniteIntegrand { .. } => "non_finite_integrand",
        FpeError::DegenerateDiffusion { .. } => "degenerate_diffusion",
        FpeError::NegativeDiffusion { .. } => "negative_diffusion",
        FpeError::NotNormalizable(_) => "not_normalizable",
        FpeError::InteriorSingularity { .. } => "interior_singularity",
        FpeError::PreSingularityTime { .. } => "pre_singularity_time",
        FpeError::StencilOutOfDomain => "stencil_out_of_domain",
        FpeError::NonNormalizableParameters(_) => "non_normalizable_parameters",
        FpeError::DeformationNotNormalizable(_) => "deformation_not_normalizable",
        FpeError::AsymmetricDensity { .. } => "asymmetric_density",
        FpeError::NodeInGroundState { .. } => "node_in_ground_state",
        FpeError::DeformingFunctionNode { .. } => "deforming_function_node",
        FpeError::InvalidParameters(_) => "invalid_parameters",
        FpeError::SolverDiverged { .. } => "solver_diverged",
        FpeError::SimulationDiverged { .. } => "simulation_diverged",
        FpeError::NotAsymptotic(_) => "not_asymptotic",
        FpeError::InvalidConfig(_) => "invalid_config",
    }
}

/// Runs `suite` (every suite for `Suite::All`). Failures of the numerical
/// work land in `error`; the caller maps them to exit code 2.
pub fn run(entry: &Entry, suite: Suite, opts: &SuiteOptions, default_paths: usize) -> Report {
    let stages: &[Suite] = match suite {
        Suite::All => &[Suite::Residual, Suite::Pde, Suite::Mc],
        Suite::Pde => &[Suite::Pde],
        Suite::Mc => &[Suite::Mc],
        Suite::Residual => &[Suite::Residual],
    };
    let mut metrics = Metrics::default();
    let mut thresholds = Metrics::default();
    let mut details = serde_json::Map::new();
    let mut error = None;
    for &stage in stages {
        let outcome = match stage {
            Suite::Residual => residual_suite(entry, opts),
            Suite::Pde => pde_suite(entry, opts),
            _ => mc_suite(entry, &mc_config(entry, opts, default_paths)),
        };
        match outcome {
            Ok(o) => {
                metrics.absorb(&o.metrics);
                thresholds.absorb(&o.thresholds);
                let key = serde_json::to_value(stage).expect("suite name");
                details.insert(key.as_str().expect("string").to_string(), o.details);
            }
            Err(e) => {
                error = Some(ErrorInfo {
                    kind: error_kind(&e).into(),
                    message: e.to_string(),
                    stage,
                });
                break;
            }
        }
    }
    let pass = error.is_none() && metrics.failures(&thresholds).is_empty();
    Report {
        family: entry.family.to_string(),
        params: json_params(entry),
        suite,
        metrics,
        thresholds,
        pass,
        error,
        details: Some(Value::Object(details)),
    }
}
