//! Euler–Maruyama simulation of the Itô process
//! `dX = D¹(X,t) dt + √(2D²(X,t)) dB`, whose forward equation is
//! `∂ₜW = −∂ₓ(D¹W) + ∂ₓ²(D²W)`. The factor 2 under the root is what
//! matches the `∂ₓ²(D²W)` form.
//!
//! The drift increment is tamed, `D¹dt/(1 + |D¹|dt)`: drifts like `k/x`
//! otherwise throw paths that land next to a wall arbitrarily far. Where
//! `|D¹|dt` is small this differs from plain Euler by `O(dt²)` per step.
//!
//! Walls reflect: a step landing past `x_b(t + dt)` is mirrored to
//! `2x_b − x`. Paths are grouped in blocks of 2¹⁴; block `i` draws from
//! `seeded_stream(seed, i)` and blocks are merged in order, so results do
//! not depend on the number of workers.

use rayon::prelude::*;

use crate::error::{FpeError, Result};
use crate::numerics::{seeded_stream, MonotoneCubic};
use crate::similarity::SimilaritySolution;

pub const BLOCK_SIZE: usize = 1 << 14;
pub const MIN_PATHS: usize = 10_000;
/// Nodes of the inverse-CDF table used for initial sampling.
pub const INITIAL_TABLE: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < MIN_PATHS {
            return Err(FpeError::InvalidConfig(format!(
                "n_paths = {} is below the minimum {MIN_PATHS}",
                self.n_paths
            )));
        }
        if !(self.t0 > 0.0 && self.t1 > self.t0) {
            return Err(FpeError::InvalidConfig("need 0 < t0 < t1".into()));
        }
        if !(self.dt > 0.0 && self.dt <= (self.t1 - self.t0) / 100.0) {
            return Err(FpeError::InvalidConfig("need 0 < dt <= (t1 - t0)/100".into()));
        }
        if self.workers == 0 {
            return Err(FpeError::InvalidConfig("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t1 - self.t0) / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub ks_distance: f64,
    pub n_effective: usize,
    pub boundary_reflections: u64,
}

#[derive(Debug, Clone)]
pub struct McRun {
    /// Terminal positions in path order.
    pub samples: Vec<f64>,
    pub report: McReport,
}

/// CDF of `W(·, t)` from a quadrature-built table in `z`.
pub struct ExactCdf {
    table: MonotoneCubic,
    scale: f64,
}

impl ExactCdf {
    pub fn new(sol: &SimilaritySolution, t: f64, nodes: usize) -> Result<Self> {
        Ok(ExactCdf {
            table: sol.cdf_table_z(nodes)?,
            scale: t.powf(sol.alpha()),
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.table.eval(x / self.scale)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.table.inverse(u) * self.scale
    }
}

struct BlockResult {
    samples: Vec<f64>,
    reflections: u64,
    failed_path: Option<usize>,
}

fn simulate_block(
    sol: &SimilaritySolution,
    initial: &ExactCdf,
    cfg: &McConfig,
    block: usize,
) -> BlockResult {
    let sys = sol.system();
    let alpha = sol.alpha();
    let first = block * BLOCK_SIZE;
    let n = BLOCK_SIZE.min(cfg.n_paths - first);
    let mut rng = seeded_stream(cfg.seed, block as u64);
    let mut x: Vec<f64> = (0..n).map(|_| initial.quantile(rng.uniform_open())).collect();
    let steps = cfg.steps();
    let dt = (cfg.t1 - cfg.t0) / steps as f64;
    let domain = sys.domain();
    let (rho1, rho2) = (sys.rho1(), sys.rho2());
    let mut reflections = 0u64;
    for step in 0..steps {
        let t = cfg.t0 + step as f64 * dt;
        let t_next = t + dt;
        let s = t.powf(alpha);
        let c1 = t.powf(alpha - 1.0) * dt;
        let c2 = (2.0 * t.powf(2.0 * alpha - 1.0) * dt).sqrt();
        let (lo, hi) = domain.physical_bounds(alpha, t_next);
        for (i, xi) in x.iter_mut().enumerate() {
            let z = *xi / s;
            let shift = c1 * rho1.eval(z);
            let mut next = *xi + shift / (1.0 + shift.abs()) + c2 * rho2.eval(z).sqrt() * rng.normal();
            while next < lo || next > hi {
                next = if next < lo { 2.0 * lo - next } else { 2.0 * hi - next };
                reflections += 1;
                if !next.is_finite() {
                    break;
                }
            }
            if !next.is_finite() {
                return BlockResult {
                    samples: Vec::new(),
                    reflections,
                    failed_path: Some(first + i),
                };
            }
            *xi = next;
        }
    }
    BlockResult {
        samples: x,
        reflections,
        failed_path: None,
    }
}

/// Simulates `cfg.n_paths` paths from exact samples at `t0` to `t1` and
/// compares the terminal sample with the exact CDF.
pub fn simulate(sol: &SimilaritySolution, cfg: &McConfig) -> Result<McRun> {
    cfg.validate()?;
    sol.system().require_forward_diffusion()?;
    let initial = ExactCdf::new(sol, cfg.t0, INITIAL_TABLE)?;
    let blocks = cfg.n_paths.div_ceil(BLOCK_SIZE);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| FpeError::InvalidConfig(e.to_string()))?;
    let results: Vec<BlockResult> =
        pool.install(|| (0..blocks).into_par_iter().map(|b| simulate_block(sol, &initial, cfg, b)).collect());
    let mut samples = Vec::with_capacity(cfg.n_paths);
    let mut reflections = 0;
    for r in results {
        if let Some(path) = r.failed_path {
            return Err(FpeError::SimulationDiverged { path });
        }
        samples.extend(r.samples);
        reflections += r.reflections;
    }
    let exact = ExactCdf::new(sol, cfg.t1, 4 * INITIAL_TABLE)?;
    let ks = ks_distance(&samples, |x| exact.cdf(x));
    Ok(McRun {
        report: McReport {
            ks_distance: ks,
            n_effective: samples.len(),
            boundary_reflections: reflections,
        },
        samples,
    })
}

/// `sup |F_n − F|` over the sample, `F_n` the empirical CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], exact_cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        // Ties share one jump of the empirical CDF.
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let f = exact_cdf(sorted[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    d.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub order: i32,
    pub empirical: f64,
    pub exact: f64,
    pub z_score: f64,
}

/// Empirical moments of `samples` against quadrature moments of `W(·, t)`,
/// with z-scores from the empirical standard error.
pub fn moment_check(samples: &[f64], sol: &SimilaritySolution, t: f64, orders: &[i32]) -> Result<Vec<MomentCheck>> {
    let n = samples.len() as f64;
    orders
        .iter()
        .map(|&order| {
            let vals: Vec<f64> = samples.iter().map(|x| x.powi(order)).collect();
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            let exact = sol.moment_at(order, t)?;
            Ok(MomentCheck {
                order,
                empirical: mean,
                exact,
                z_score: (mean - exact) / (var / n).sqrt(),
            })
        })
        .collect()
}
