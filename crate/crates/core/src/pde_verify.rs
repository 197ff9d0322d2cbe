//! Grid solutions of the forward equation, compared against an exact
//! similarity solution.
//!
//! Both frames use a cell-centred conservative discretization of
//! `∂ₜW = −∂ₓJ`, `J = D¹W − ∂ₓ(D²W)`, with zero flux through the two end
//! faces and Crank–Nicolson stepping. Cell values are cell averages, so
//! the discrete mass `Σ W dx` is conserved to roundoff and the walls sit on
//! faces, never on a node where a coefficient may be singular.
//!
//! The similarity frame uses `τ = ln t`, `W = t^{−α} u(z, τ)`:
//! `∂_τ u = (ρ₂u)'' − ((ρ₁ − αz)u)'`. The exact `y(z)` is its zero-flux
//! equilibrium, and a moving wall `x_b = z_b t^α` becomes a fixed one.

use crate::error::{FpeError, Result};
use crate::similarity::{Domain, DomainKind, SimilaritySolution};

/// A uniform cell-centred grid with a time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, cells: usize, dt: f64, t0: f64, t1: f64) -> Result<Self> {
        if cells < 3 {
            return Err(FpeError::InvalidConfig("grid needs at least 3 cells".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FpeError::InvalidConfig(format!("bad grid window [{lo}, {hi}]")));
        }
        if !(dt > 0.0 && t1 > t0) {
            return Err(FpeError::InvalidConfig("need dt > 0 and t1 > t0".into()));
        }
        Ok(Grid1D {
            lo,
            hi,
            cells,
            dt,
            t0,
            t1,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    pub fn centres(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.cells).map(|i| self.lo + (i as f64 + 0.5) * dx).collect()
    }

    pub fn edges(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..=self.cells).map(|i| self.lo + i as f64 * dx).collect()
    }

    pub fn steps(&self) -> usize {
        ((self.t1 - self.t0) / self.dt).round().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdeReport {
    /// `Σ |W − W_exact| dx` at the final time.
    pub l1_error: f64,
    pub linf_error: f64,
    /// `|Σ W dx − 1|` at the final time.
    pub mass_drift: f64,
    /// Largest change of `Σ W dx` over a single step.
    pub max_step_mass_change: f64,
    /// Smallest `min W / max W` seen over all steps.
    pub min_ratio: f64,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct PdeRun {
    pub report: PdeReport,
    pub values: Vec<f64>,
    /// L1 distance to the exact profile after every step.
    pub l1_history: Vec<f64>,
}

/// Tridiagonal solve. Thomas elimination when the matrix is diagonally
/// dominant, otherwise Gaussian elimination with partial pivoting.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let dominant = (0..n).all(|i| {
        let off = if i > 0 { sub[i].abs() } else { 0.0 } + if i + 1 < n { sup[i].abs() } else { 0.0 };
        diag[i].abs() >= off
    });
    if dominant {
        thomas(sub, diag, sup, rhs)
    } else {
        pivoted(sub, diag, sup, rhs)
    }
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / m } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

fn pivoted(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // Row i holds (d, u, u2) on columns i, i+1, i+2 after elimination.
    let mut d = diag.to_vec();
    let mut u: Vec<f64> = (0..n).map(|i| if i + 1 < n { sup[i] } else { 0.0 }).collect();
    let mut u2 = vec![0.0; n];
    let mut l: Vec<f64> = (0..n).map(|i| if i > 0 { sub[i] } else { 0.0 }).collect();
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        let below = l[i + 1];
        if below.abs() > d[i].abs() {
            // Swap rows i and i+1.
            let (di, ui, u2i, bi) = (d[i], u[i], u2[i], b[i]);
            d[i] = below;
            u[i] = d[i + 1];
            u2[i] = u[i + 1];
            b[i] = b[i + 1];
            let m = di / d[i];
            d[i + 1] = ui - m * u[i];
            u[i + 1] = u2i - m * u2[i];
            b[i + 1] = bi - m * b[i];
        } else {
            let m = below / d[i];
            d[i + 1] -= m * u[i];
            u[i + 1] -= m * u2[i];
            b[i + 1] -= m * b[i];
        }
        l[i + 1] = 0.0;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= u[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    x
}

/// Flux-form operator `dW/dt = L W` on a cell grid, as three diagonals.
struct Operator {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl Operator {
    /// `drift_face[k]` at face `k+1/2` (between cells `k`, `k+1`),
    /// `diff_cell[i]` at cell centres.
    fn assemble(drift_face: &[f64], diff_cell: &[f64], dx: f64) -> Operator {
        let n = diff_cell.len();
        let (mut sub, mut diag, mut sup) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for k in 0..n - 1 {
            // J_k = a W_k + b W_{k+1}
            let a = 0.5 * drift_face[k] + diff_cell[k] / dx;
            let b = 0.5 * drift_face[k] - diff_cell[k + 1] / dx;
            // dW_k/dt −= J_k/dx ; dW_{k+1}/dt += J_k/dx
            diag[k] -= a / dx;
            sup[k] -= b / dx;
            sub[k + 1] += a / dx;
            diag[k + 1] += b / dx;
        }
        Operator { sub, diag, sup }
    }

    fn apply(&self, w: &[f64]) -> Vec<f64> {
        let n = w.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * w[i];
                if i > 0 {
                    v += self.sub[i] * w[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * w[i + 1];
                }
                v
            })
            .collect()
    }
}

fn cn_step(op: &Operator, w: &[f64], dt: f64) -> Vec<f64> {
    let h = 0.5 * dt;
    let lw = op.apply(w);
    let rhs: Vec<f64> = w.iter().zip(&lw).map(|(a, b)| a + h * b).collect();
    let sub: Vec<f64> = op.sub.iter().map(|v| -h * v).collect();
    let sup: Vec<f64> = op.sup.iter().map(|v| -h * v).collect();
    let diag: Vec<f64> = op.diag.iter().map(|v| 1.0 - h * v).collect();
    solve_tridiagonal(&sub, &diag, &sup, &rhs)
}

fn check_fixed_window(domain: &Domain, lo: f64, hi: f64) -> Result<()> {
    if domain.kind == DomainKind::ScaledInterval {
        return Err(FpeError::InvalidConfig(
            "moving walls are handled in the similarity frame".into(),
        ));
    }
    if lo < domain.z_lo || hi > domain.z_hi {
        return Err(FpeError::InvalidConfig(format!(
            "grid window [{lo}, {hi}] leaves the domain"
        )));
    }
    Ok(())
}

/// Cell averages of `W(·, t)`.
pub fn exact_cell_averages(sol: &SimilaritySolution, edges: &[f64], t: f64) -> Result<Vec<f64>> {
    let s = t.powf(sol.alpha());
    let z_edges: Vec<f64> = edges.iter().map(|x| x / s).collect();
    let masses = sol.cell_integrals(&z_edges)?;
    Ok(masses
        .iter()
        .zip(edges.windows(2))
        .map(|(m, w)| m / (w[1] - w[0]))
        .collect())
}

struct Tracker {
    min_ratio: f64,
    max_step_mass_change: f64,
    mass: f64,
}

impl Tracker {
    fn new(w: &[f64], dx: f64) -> Self {
        let mut t = Tracker {
            min_ratio: f64::INFINITY,
            max_step_mass_change: 0.0,
            mass: w.iter().sum::<f64>() * dx,
        };
        t.observe(w, dx);
        t.max_step_mass_change = 0.0;
        t
    }

    fn observe(&mut self, w: &[f64], dx: f64) {
        let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = w.iter().copied().fold(f64::INFINITY, f64::min);
        self.min_ratio = self.min_ratio.min(min / max);
        let mass = w.iter().sum::<f64>() * dx;
        self.max_step_mass_change = self.max_step_mass_change.max((mass - self.mass).abs());
        self.mass = mass;
    }
}

fn l1(a: &[f64], b: &[f64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * dx
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Crank–Nicolson in `(x, t)` from exact cell averages at `t0`, with
/// coefficients frozen at the half-step time.
pub fn evolve_physical(sol: &SimilaritySolution, grid: &Grid1D) -> Result<PdeRun> {
    let sys = sol.system();
    sys.require_forward_diffusion()?;
    check_fixed_window(&sys.domain(), grid.lo, grid.hi)?;
    let (edges, centres, dx) = (grid.edges(), grid.centres(), grid.dx());
    let faces = &edges[1..grid.cells];
    let mut w = exact_cell_averages(sol, &edges, grid.t0)?;
    let steps = grid.steps();
    let dt = (grid.t1 - grid.t0) / steps as f64;
    let mut tracker = Tracker::new(&w, dx);
    for step in 0..steps {
        let t_half = grid.t0 + (step as f64 + 0.5) * dt;
        let drift: Vec<f64> = faces.iter().map(|&x| sys.drift_at(x, t_half)).collect();
        let diff: Vec<f64> = centres.iter().map(|&x| sys.diffusion_at(x, t_half)).collect();
        w = cn_step(&Operator::assemble(&drift, &diff, dx), &w, dt);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(FpeError::SolverDiverged { step });
        }
        tracker.observe(&w, dx);
    }
    let exact = exact_cell_averages(sol, &edges, grid.t1)?;
    let err = l1(&w, &exact, dx);
    Ok(PdeRun {
        report: PdeReport {
            l1_error: err,
            linf_error: linf(&w, &exact),
            mass_drift: (tracker.mass - 1.0).abs(),
            max_step_mass_change: tracker.max_step_mass_change,
            min_ratio: tracker.min_ratio,
            steps,
        },
        values: w,
        l1_history: vec![err],
    })
}

/// Evolves `u(z, τ)` over `τ ∈ [grid.t0, grid.t1]` on a fixed `z`-grid.
/// `u0 = None` starts from the exact `y` cell averages. Errors are
/// distances to `y`.
pub fn evolve_similarity_frame(sol: &SimilaritySolution, grid: &Grid1D, u0: Option<&[f64]>) -> Result<PdeRun> {
    let sys = sol.system();
    sys.require_forward_diffusion()?;
    let d = sys.domain();
    if grid.lo < d.z_lo || grid.hi > d.z_hi {
        return Err(FpeError::InvalidConfig(format!(
            "grid window [{}, {}] leaves the domain",
            grid.lo, grid.hi
        )));
    }
    let (edges, centres, dz) = (grid.edges(), grid.centres(), grid.dx());
    let faces = &edges[1..grid.cells];
    let alpha = sys.alpha();
    let drift: Vec<f64> = faces.iter().map(|&z| sys.rho1().eval(z) - alpha * z).collect();
    let diff: Vec<f64> = centres.iter().map(|&z| sys.rho2().eval(z)).collect();
    let op = Operator::assemble(&drift, &diff, dz);
    let exact: Vec<f64> = sol
        .cell_integrals(&edges)?
        .into_iter()
        .map(|m| m / dz)
        .collect();
    let mut u = match u0 {
        Some(v) if v.len() == grid.cells => v.to_vec(),
        Some(_) => return Err(FpeError::InvalidConfig("initial data does not match the grid".into())),
        None => exact.clone(),
    };
    let steps = grid.steps();
    let dtau = (grid.t1 - grid.t0) / steps as f64;
    let mut tracker = Tracker::new(&u, dz);
    let mut history = Vec::with_capacity(steps);
    for step in 0..steps {
        u = cn_step(&op, &u, dtau);
        if u.iter().any(|v| !v.is_finite()) {
            return Err(FpeError::SolverDiverged { step });
        }
        tracker.observe(&u, dz);
        history.push(l1(&u, &exact, dz));
    }
    Ok(PdeRun {
        report: PdeReport {
            l1_error: l1(&u, &exact, dz),
            linf_error: linf(&u, &exact),
            mass_drift: (tracker.mass - 1.0).abs(),
            max_step_mass_change: tracker.max_step_mass_change,
            min_ratio: tracker.min_ratio,
            steps,
        },
        values: u,
        l1_history: history,
    })
}

/// A finite `x`-window holding the solution over `[t0, t1]`: finite walls
/// are kept, infinite sides are cut where `W < eps·max W`.
pub fn truncation_window(sol: &SimilaritySolution, t0: f64, t1: f64, eps: f64) -> Result<(f64, f64)> {
    let (zl, zh) = sol.effective_z_range(eps)?;
    let (s0, s1) = (t0.powf(sol.alpha()), t1.powf(sol.alpha()));
    let widest = |z: f64| if (z * s0).abs() > (z * s1).abs() { z * s0 } else { z * s1 };
    Ok((widest(zl), widest(zh)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    /// `(x_lo, x_hi, t0, t1)`.
    Physical { lo: f64, hi: f64, t0: f64, t1: f64 },
    /// `(z_lo, z_hi, τ1)`, starting at `τ = 0`.
    Similarity { lo: f64, hi: f64, tau1: f64 },
}

/// Fitted order `p` of `l1_error ~ C·dx^p` over `levels` halvings of `dx`
/// and `dt`, starting from `cells` cells and step `dt`.
pub fn convergence_order(sol: &SimilaritySolution, frame: Frame, cells: usize, dt: f64, levels: usize) -> Result<f64> {
    if levels < 3 {
        return Err(FpeError::InvalidConfig("need at least 3 refinement levels".into()));
    }
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for k in 0..levels {
        let n = cells << k;
        let dt = dt / (1 << k) as f64;
        let (grid, run) = match frame {
            Frame::Physical { lo, hi, t0, t1 } => {
                let grid = Grid1D::new(lo, hi, n, dt, t0, t1)?;
                (grid, evolve_physical(sol, &grid)?)
            }
            Frame::Similarity { lo, hi, tau1 } => {
                let grid = Grid1D::new(lo, hi, n, dt, 0.0, tau1)?;
                (grid, evolve_similarity_frame(sol, &grid, None)?)
            }
        };
        hs.push(grid.dx());
        errs.push(run.report.l1_error);
    }
    if errs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(FpeError::NotAsymptotic(errs));
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (
        xs.iter().sum::<f64>() / xs.len() as f64,
        ys.iter().sum::<f64>() / ys.len() as f64,
    );
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exceptional::{build_fpe, ExceptionalParams, Rho2Choice, Variant};
    use crate::families::{diffusion, gamma_deformed_exponential, linear_drift_family, GammaParams, LinearDriftParams};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn tridiagonal_solvers_agree() {
        let sub = [0.0, 1.0, 4.0, -2.0];
        let diag = [0.5, 3.0, 1.0, 2.0];
        let sup = [2.0, -1.0, 1.0, 0.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                diag[i] * x[i] + if i > 0 { sub[i] * x[i - 1] } else { 0.0 } + if i < 3 { sup[i] * x[i + 1] } else { 0.0 }
            })
            .collect();
        let got = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).abs() < 1e-13, "{got:?}");
        }
        let dom = thomas(&[0.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[1.0, 1.0, 0.0], &[5.0, 6.0, 5.0]);
        assert!(dom.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn diffusion_physical_frame() {
        let sol = diffusion();
        let grid = Grid1D::new(-12.0, 12.0, 1201, 5e-4, 1.0, 2.0).unwrap();
        let run = evolve_physical(&sol, &grid).unwrap();
        assert!(run.report.l1_error < 5e-4, "{:?}", run.report);
        assert!(run.report.max_step_mass_change < 1e-12);
        assert!(run.report.min_ratio > -1e-10);
    }

    #[test]
    fn exponential_and_gamma_physical_frame() {
        let sol = linear_drift_family(LinearDriftParams::new(1.0, 1.0, 1.0, 1.0)).unwrap();
        let grid = Grid1D::new(0.0, 30.0, 1500, 1e-3, 1.0, 2.0).unwrap();
        let run = evolve_physical(&sol, &grid).unwrap();
        assert!(run.report.l1_error < 1e-3, "{:?}", run.report);
        assert!(run.report.mass_drift < 1e-10, "{:?}", run.report);
        let gamma = gamma_deformed_exponential(GammaParams {
            nu: 2.0,
            mu: 1.0,
            sigma: 1.0,
            alpha: 1.0,
        })
        .unwrap();
        let run = evolve_physical(&gamma, &grid).unwrap();
        assert!(run.report.l1_error < 1e-3, "{:?}", run.report);
    }

    #[test]
    fn moving_walls_need_similarity_frame() {
        let p = ExceptionalParams::new(Variant::J1, 1, 2.0, 1.0).unwrap();
        let sol = build_fpe(&p, Rho2Choice::One, 0.5).unwrap();
        let grid = Grid1D::new(0.0, 1.0, 100, 1e-3, 1.0, 2.0).unwrap();
        assert!(matches!(evolve_physical(&sol, &grid), Err(FpeError::InvalidConfig(_))));
        let zgrid = Grid1D::new(0.0, FRAC_PI_2, 400, 1e-3, 0.0, 1.0).unwrap();
        let run = evolve_similarity_frame(&sol, &zgrid, None).unwrap();
        assert!(run.report.l1_error < 1e-4, "{:?}", run.report);
        assert!(run.report.max_step_mass_change < 1e-12);
    }

    #[test]
    fn perturbed_data_relaxes() {
        let sol = diffusion();
        let grid = Grid1D::new(-10.0, 10.0, 400, 1e-2, 0.0, 1.0).unwrap();
        let exact: Vec<f64> = sol.cell_integrals(&grid.edges()).unwrap().iter().map(|m| m / grid.dx()).collect();
        let mut u0: Vec<f64> = grid.centres().iter().zip(&exact).map(|(z, y)| y * (1.0 + 0.1 * z.sin())).collect();
        let mass: f64 = u0.iter().sum::<f64>() * grid.dx();
        u0.iter_mut().for_each(|v| *v /= mass);
        let run = evolve_similarity_frame(&sol, &grid, Some(&u0)).unwrap();
        assert!(run.l1_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(run.l1_history.last().unwrap() < &run.l1_history[0]);
    }

    #[test]
    fn frames_agree_for_diffusion() {
        let sol = diffusion();
        let (t0, t1): (f64, f64) = (1.0, 2.0);
        let s1 = t1.sqrt();
        let grid = Grid1D::new(-12.0, 12.0, 600, 1e-3, t0, t1).unwrap();
        let phys = evolve_physical(&sol, &grid).unwrap();
        // Same cells at t1: z-window and spacing scaled by t1^α.
        let zgrid = Grid1D::new(-12.0 / s1, 12.0 / s1, 600, 1e-3, 0.0, t1.ln()).unwrap();
        let z = evolve_similarity_frame(&sol, &zgrid, None).unwrap();
        let w_from_z: Vec<f64> = z.values.iter().map(|u| u / s1).collect();
        let gap = l1(&phys.values, &w_from_z, grid.dx());
        let scheme = phys.report.l1_error.max(z.report.l1_error);
        assert!(gap < 3.0 * scheme.max(1e-7), "{gap} vs {scheme}");
    }

    #[test]
    fn second_order_convergence() {
        let sol = diffusion();
        let p = convergence_order(&sol, Frame::Physical { lo: -12.0, hi: 12.0, t0: 1.0, t1: 2.0 }, 100, 1e-2, 3).unwrap();
        assert!((1.8..=2.2).contains(&p), "{p}");
    }

    #[test]
    fn truncation_window_covers_mass() {
        let sol = diffusion();
        let (lo, hi) = truncation_window(&sol, 1.0, 2.0, 1e-16).unwrap();
        assert!(lo < -10.0 && hi > 10.0);
        let exp = linear_drift_family(LinearDriftParams::new(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(truncation_window(&exp, 1.0, 2.0, 1e-16).unwrap().0, 0.0);
    }
}
