use std::sync::Arc;

use crate::error::{FpeError, Result};
use crate::numerics::{
    adaptive_quad_with, cumulative_integral, fd_derivatives, fd_first, Interval, MonotoneCubic,
    QuadOptions,
};

use super::{reduced_f, Domain, PhysicalPoint, Profile, RealFn, SimilaritySystem};

/// `ln y(z)` up to an additive constant.
#[derive(Clone)]
pub(crate) enum LogDensity {
    /// `∫_{z_ref}^z f`.
    Integrated { f: Profile, z_ref: f64 },
    /// `base + ln Q(z)`.
    Shifted {
        base: Arc<LogDensity>,
        log_q: RealFn,
        log_q_deriv: RealFn,
        singular: Vec<f64>,
    },
    /// `base(|z|)`, the even extension of a half-line density.
    Folded { base: Arc<LogDensity> },
}

impl LogDensity {
    fn eval(&self, z: f64) -> Result<f64> {
        match self {
            LogDensity::Integrated { f, z_ref } => {
                Ok(cumulative_integral(|s| f.eval(s), *z_ref, &[z])?[0])
            }
            LogDensity::Shifted { base, log_q, .. } => Ok(base.eval(z)? + log_q(z)),
            LogDensity::Folded { base } => base.eval(z.abs()),
        }
    }

    fn eval_sorted(&self, zs: &[f64]) -> Result<Vec<f64>> {
        match self {
            LogDensity::Integrated { f, z_ref } => cumulative_integral(|s| f.eval(s), *z_ref, zs),
            LogDensity::Shifted { base, log_q, .. } => {
                let mut v = base.eval_sorted(zs)?;
                for (out, &z) in v.iter_mut().zip(zs) {
                    *out += log_q(z);
                }
                Ok(v)
            }
            LogDensity::Folded { base } => {
                let mut order: Vec<usize> = (0..zs.len()).collect();
                order.sort_by(|&i, &j| zs[i].abs().total_cmp(&zs[j].abs()));
                let folded: Vec<f64> = order.iter().map(|&i| zs[i].abs()).collect();
                let vals = base.eval_sorted(&folded)?;
                let mut out = vec![0.0; zs.len()];
                for (k, &i) in order.iter().enumerate() {
                    out[i] = vals[k];
                }
                Ok(out)
            }
        }
    }

    /// `d/dz ln y`.
    fn derivative(&self, z: f64) -> f64 {
        match self {
            LogDensity::Integrated { f, .. } => f.eval(z),
            LogDensity::Shifted {
                base, log_q_deriv, ..
            } => base.derivative(z) + log_q_deriv(z),
            LogDensity::Folded { base } => z.signum() * base.derivative(z.abs()),
        }
    }

    /// Whether the analytic continuation satisfies `ln y(−z) = ln y(z)`
    /// (up to a constant) near `z`.
    pub(crate) fn is_even_at(&self, z: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
        match self {
            LogDensity::Integrated { f, .. } => close(f.eval(z), -f.eval(-z)),
            LogDensity::Shifted { base, log_q, .. } => base.is_even_at(z) && close(log_q(z), log_q(-z)),
            LogDensity::Folded { .. } => true,
        }
    }

    fn singular_points(&self) -> Vec<f64> {
        match self {
            LogDensity::Integrated { f, .. } => f.singular_points().to_vec(),
            LogDensity::Shifted { base, singular, .. } => {
                let mut v = base.singular_points();
                v.extend_from_slice(singular);
                v
            }
            LogDensity::Folded { base } => {
                let mut v = base.singular_points();
                let mirrored: Vec<f64> = v.iter().map(|s| -s).collect();
                v.extend(mirrored);
                v
            }
        }
    }
}

/// A normalized similarity solution `W(x,t) = t^{-α} A e^{ln y(z)}` with
/// zero probability current through impenetrable boundaries (`C = 0`).
///
/// The log-density is stored rather than `y` itself: densities like
/// `z^{2(g+ℓ)} e^{-z²}` underflow long before their logarithms do.
#[derive(Clone)]
pub struct SimilaritySolution {
    system: SimilaritySystem,
    z_ref: f64,
    log_density: Arc<LogDensity>,
    ln_norm: f64,
    singular: Vec<f64>,
}

impl std::fmt::Debug for SimilaritySolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimilaritySolution")
            .field("system", &self.system)
            .field("z_ref", &self.z_ref)
            .field("norm_a", &self.norm_a())
            .finish_non_exhaustive()
    }
}

/// Integrates the reduced equation with `C = 0` from `z_ref` and normalizes.
pub fn solve(system: &SimilaritySystem, z_ref: f64) -> Result<SimilaritySolution> {
    let domain = system.domain();
    if !domain.contains_interior(z_ref) {
        return Err(FpeError::InvalidParameters(format!(
            "z_ref = {z_ref} is not inside the domain"
        )));
    }
    let f = reduced_f(system);
    if let Some(&s) = f.singular_points().iter().find(|&&s| domain.contains_interior(s)) {
        return Err(FpeError::InteriorSingularity { at: s });
    }
    if !f.eval(z_ref).is_finite() {
        return Err(FpeError::InteriorSingularity { at: z_ref });
    }
    let log_density = Arc::new(LogDensity::Integrated { f, z_ref });
    SimilaritySolution::normalized(system.clone(), z_ref, log_density).map_err(|e| match e {
        FpeError::SingularIntegrand { at } => FpeError::InteriorSingularity { at },
        other => other,
    })
}

/// [`solve`] with the domain's default base point.
pub fn solve_default(system: &SimilaritySystem) -> Result<SimilaritySolution> {
    solve(system, system.domain().default_z_ref())
}

pub(crate) fn normalization_options() -> QuadOptions {
    QuadOptions::tight()
}

impl SimilaritySolution {
    pub(crate) fn normalized(
        system: SimilaritySystem,
        z_ref: f64,
        log_density: Arc<LogDensity>,
    ) -> Result<Self> {
        let singular = log_density.singular_points();
        let mut sol = SimilaritySolution {
            system,
            z_ref,
            log_density,
            ln_norm: 0.0,
            singular,
        };
        let domain = sol.support();
        let samples: Vec<f64> = domain
            .sample_interior(65)
            .into_iter()
            .filter(|z| !sol.singular.contains(z))
            .collect();
        let shift = sol
            .log_density
            .eval_sorted(&samples)?
            .into_iter()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(FpeError::NotNormalizable("log-density is nowhere finite".into()));
        }
        let integral = adaptive_quad_with(
            |z| match sol.log_unnormalized(z) {
                Ok(v) => (v - shift).exp(),
                Err(_) => f64::NAN,
            },
            domain.interval(),
            &normalization_options(),
        )
        .map_err(|e| match e {
            FpeError::QuadratureFailure { estimate, .. } => {
                FpeError::NotNormalizable(format!("quadrature of e^(ln y) did not converge (estimate {estimate})"))
            }
            FpeError::NonFiniteIntegrand { at } => {
                FpeError::NotNormalizable(format!("density not finite at z = {at}"))
            }
            other => other,
        })?;
        if !(integral.value > 0.0 && integral.value.is_finite()) {
            return Err(FpeError::NotNormalizable(format!(
                "integral of density is {}",
                integral.value
            )));
        }
        sol.ln_norm = -shift - integral.value.ln();
        Ok(sol)
    }

    pub(crate) fn log_density(&self) -> &Arc<LogDensity> {
        &self.log_density
    }

    pub(crate) fn ln_norm(&self) -> f64 {
        self.ln_norm
    }

    pub(crate) fn from_parts(
        system: SimilaritySystem,
        z_ref: f64,
        log_density: Arc<LogDensity>,
        ln_norm: f64,
    ) -> SimilaritySolution {
        let singular = log_density.singular_points();
        SimilaritySolution {
            system,
            z_ref,
            log_density,
            ln_norm,
            singular,
        }
    }

    pub fn system(&self) -> &SimilaritySystem {
        &self.system
    }

    pub fn alpha(&self) -> f64 {
        self.system.alpha()
    }

    pub fn z_ref(&self) -> f64 {
        self.z_ref
    }

    pub fn support(&self) -> Domain {
        self.system.domain()
    }

    /// Normalization constant `A`.
    pub fn norm_a(&self) -> f64 {
        self.ln_norm.exp()
    }

    /// A copy with the normalization multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> SimilaritySolution {
        SimilaritySolution {
            ln_norm: self.ln_norm + factor.ln(),
            ..self.clone()
        }
    }

    /// Limit of `ln y` at a boundary point where `f` is singular.
    fn boundary_limit(&self, z: f64) -> Option<f64> {
        let d = self.support();
        if !self.singular.contains(&z) || !(z == d.z_lo || z == d.z_hi) {
            return None;
        }
        let inward = if z == d.z_lo { 1.0 } else { -1.0 };
        let probe = z + inward * 1e-9 * z.abs().max(1.0);
        let toward_wall = -inward * self.log_density.derivative(probe);
        Some(if toward_wall >= 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        })
    }

    fn log_unnormalized(&self, z: f64) -> Result<f64> {
        if !self.support().contains(z) {
            return Ok(f64::NEG_INFINITY);
        }
        if let Some(v) = self.boundary_limit(z) {
            return Ok(v);
        }
        self.log_density.eval(z)
    }

    /// `ln y(z)` including the normalization.
    pub fn log_y(&self, z: f64) -> Result<f64> {
        Ok(self.ln_norm + self.log_unnormalized(z)?)
    }

    pub fn y(&self, z: f64) -> Result<f64> {
        Ok(self.log_y(z)?.exp())
    }

    /// `y` at ascending points in a single running-integral pass.
    pub fn y_sorted(&self, zs: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; zs.len()];
        let mut idx = Vec::with_capacity(zs.len());
        let mut inner = Vec::with_capacity(zs.len());
        for (i, &z) in zs.iter().enumerate() {
            if !self.support().contains(z) {
                continue;
            }
            match self.boundary_limit(z) {
                Some(v) => out[i] = (self.ln_norm + v).exp(),
                None => {
                    idx.push(i);
                    inner.push(z);
                }
            }
        }
        let vals = self.log_density.eval_sorted(&inner)?;
        for (k, &i) in idx.iter().enumerate() {
            out[i] = (self.ln_norm + vals[k]).exp();
        }
        Ok(out)
    }

    /// `d/dz ln y`.
    pub fn log_derivative(&self, z: f64) -> f64 {
        self.log_density.derivative(z)
    }

    pub fn physical_support(&self, t: f64) -> (f64, f64) {
        self.support().physical_bounds(self.alpha(), t)
    }

    /// `W(x, t)`; zero outside the (possibly moving) support.
    pub fn pdf(&self, p: &PhysicalPoint) -> Result<f64> {
        let s = p.t.powf(self.alpha());
        let z = p.x / s;
        if !self.support().contains(z) {
            return Ok(0.0);
        }
        Ok(self.y(z)? / s)
    }

    pub fn pdf_xt(&self, x: f64, t: f64) -> Result<f64> {
        self.pdf(&PhysicalPoint::new(x, t)?)
    }

    /// Probability current `J = D¹W − D²∂ₓW − (∂ₓD²)W`, each factor taken
    /// from the profiles and the log-density derivative.
    pub fn probability_current(&self, p: &PhysicalPoint) -> Result<f64> {
        let alpha = self.alpha();
        let s = p.t.powf(alpha);
        let z = p.x / s;
        if !self.support().contains(z) {
            return Ok(0.0);
        }
        let y = self.y(z)?;
        if y == 0.0 {
            return Ok(0.0);
        }
        let w = y / s;
        let dw_dx = y * self.log_derivative(z) / (s * s);
        let d1 = self.system.drift_at(p.x, p.t);
        let d2 = self.system.diffusion_at(p.x, p.t);
        let dd2_dx = p.t.powf(alpha - 1.0) * self.system.rho2().deriv(z);
        Ok(d1 * w - d2 * dw_dx - dd2_dx * w)
    }

    /// `|∂ₜW − [−∂ₓ(D¹W) + ∂ₓ²(D²W)]|` from five-point stencils.
    pub fn fpe_residual(&self, p: &PhysicalPoint, h_x: f64, h_t: f64) -> Result<f64> {
        Ok(self.signed_residual(p, h_x, h_t)?.abs())
    }

    /// [`fpe_residual`](Self::fpe_residual) with one Richardson step over
    /// `(h, h/2)`, removing the `O(h⁴)` stencil error. Sharp densities
    /// (narrow moving supports at small `t`) need this at `h = 10⁻²`.
    pub fn fpe_residual_extrapolated(&self, p: &PhysicalPoint, h_x: f64, h_t: f64) -> Result<f64> {
        let coarse = self.signed_residual(p, h_x, h_t)?;
        let fine = self.signed_residual(p, 0.5 * h_x, 0.5 * h_t)?;
        Ok(((16.0 * fine - coarse) / 15.0).abs())
    }

    fn signed_residual(&self, p: &PhysicalPoint, h_x: f64, h_t: f64) -> Result<f64> {
        let (t_lo, t_hi) = (p.t - 2.0 * h_t, p.t + 2.0 * h_t);
        if !(t_lo > 0.0) {
            return Err(FpeError::StencilOutOfDomain);
        }
        let (x_lo, x_hi) = (p.x - 2.0 * h_x, p.x + 2.0 * h_x);
        for t in [t_lo, p.t, t_hi] {
            let (a, b) = self.physical_support(t);
            if !(x_lo > a && x_hi < b) {
                return Err(FpeError::StencilOutOfDomain);
            }
        }
        let w = |x: f64, t: f64| self.pdf_xt(x, t).unwrap_or(f64::NAN);
        let dw_dt = fd_first(|t| w(p.x, t), p.t, h_t);
        let d_drift = fd_first(|x| self.system.drift_at(x, p.t) * w(x, p.t), p.x, h_x);
        let (_, d2_diff) = fd_derivatives(|x| self.system.diffusion_at(x, p.t) * w(x, p.t), p.x, h_x);
        let r = dw_dt + d_drift - d2_diff;
        if r.is_finite() {
            Ok(r)
        } else {
            Err(FpeError::StencilOutOfDomain)
        }
    }

    /// `ρ₂y' + (ρ₂' − ρ₁ + αz)y` with `y'` by finite differences; zero for
    /// the zero-current first integral.
    pub fn first_integral_residual(&self, z: f64, h: f64) -> Result<f64> {
        let (dy, _) = fd_derivatives(|s| self.y(s).unwrap_or(f64::NAN), z, h);
        let sys = &self.system;
        let y = self.y(z)?;
        Ok(sys.rho2().eval(z) * dy + (sys.rho2().deriv(z) - sys.rho1().eval(z) + self.alpha() * z) * y)
    }

    /// A finite `z`-window outside which `y < eps·max y`.
    pub fn effective_z_range(&self, eps: f64) -> Result<(f64, f64)> {
        let d = self.support();
        let samples: Vec<f64> = d
            .sample_interior(129)
            .into_iter()
            .filter(|z| !self.singular.contains(z))
            .collect();
        let vals = self.y_sorted(&samples)?;
        let (i_max, y_max) = vals
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let mode = samples[i_max];
        let threshold = eps * y_max;
        let walk = |dir: f64| -> Result<f64> {
            let mut step = 0.25;
            loop {
                let z = mode + dir * step;
                if self.y(z)? < threshold {
                    return Ok(z);
                }
                step *= 1.5;
                if step > 1e8 {
                    return Err(FpeError::NotNormalizable("density tail does not decay".into()));
                }
            }
        };
        let lo = if d.z_lo.is_finite() { d.z_lo } else { walk(-1.0)? };
        let hi = if d.z_hi.is_finite() { d.z_hi } else { walk(1.0)? };
        Ok((lo, hi))
    }

    /// CDF of `y` in `z` on `n` nodes spanning the effective window,
    /// integrated by five-point Gauss–Legendre on each cell.
    pub fn cdf_table_z(&self, n: usize) -> Result<MonotoneCubic> {
        let (lo, hi) = self.effective_z_range(1e-17)?;
        let h = (hi - lo) / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
        let cell_masses = self.cell_integrals(&nodes)?;
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        cdf.push(0.0);
        for m in &cell_masses {
            acc += m;
            cdf.push(acc);
        }
        let total = acc;
        let cdf: Vec<f64> = cdf.into_iter().map(|c| c / total).collect();
        MonotoneCubic::new(nodes, cdf)
    }

    /// `∫ y` over each cell `[edges[i], edges[i+1]]` in `z`.
    pub fn cell_integrals(&self, edges: &[f64]) -> Result<Vec<f64>> {
        let mut pts = Vec::with_capacity(5 * edges.len());
        for w in edges.windows(2) {
            let (c, r) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for x in GL5_X {
                pts.push(c + r * x);
            }
        }
        let ys = self.y_sorted(&pts)?;
        Ok(edges
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let r = 0.5 * (w[1] - w[0]);
                r * (0..5).map(|k| GL5_W[k] * ys[5 * i + k]).sum::<f64>()
            })
            .collect())
    }

    /// `∫ W(x, t) dx` over the physical support at time `t`.
    pub fn mass_at(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.physical_support(t);
        Ok(adaptive_quad_with(
            |x| self.pdf_xt(x, t).unwrap_or(f64::NAN),
            Interval { lo, hi },
            &QuadOptions::default(),
        )?
        .value)
    }

    /// `∫ x^k W(x, t) dx`.
    pub fn moment_at(&self, order: i32, t: f64) -> Result<f64> {
        let (lo, hi) = self.physical_support(t);
        Ok(adaptive_quad_with(
            |x| {
                let w = self.pdf_xt(x, t).unwrap_or(f64::NAN);
                if w == 0.0 {
                    0.0
                } else {
                    x.powi(order) * w
                }
            },
            Interval { lo, hi },
            &QuadOptions::default(),
        )?
        .value)
    }
}

// Five-point Gauss–Legendre rule on [-1, 1], nodes ascending.
const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];
