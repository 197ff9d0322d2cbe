//! Closed-form solution families and the two constructions that generate
//! new solvable systems from old ones: multiplying the density by a
//! positive `Q(z)`, and trading `ρ₂` for another diffusion profile while
//! keeping `f(z)`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{FpeError, Result};
use crate::numerics::{adaptive_quad_with, gamma, odd_double_factorial, factorial, Interval, QuadOptions};
use crate::similarity::{
    reduced_f, solve, Domain, DomainKind, LogDensity, Profile, RealFn, SimilaritySolution,
    SimilaritySystem,
};

/// `ρ₁(z) = λz − μ`, `ρ₂(z) = σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDriftParams {
    pub lambda: f64,
    pub mu: f64,
    pub sigma: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearDriftBranch {
    /// `λ = α`: exponential density on a half line.
    Exponential,
    /// `λ ≠ α`: Gaussian on the real line.
    Gaussian,
}

impl LinearDriftParams {
    pub fn new(lambda: f64, mu: f64, sigma: f64, alpha: f64) -> Self {
        LinearDriftParams {
            lambda,
            mu,
            sigma,
            alpha,
        }
    }

    pub fn branch(&self) -> Result<LinearDriftBranch> {
        let LinearDriftParams {
            lambda,
            mu,
            sigma,
            alpha,
        } = *self;
        if ![lambda, mu, sigma, alpha].iter().all(|v| v.is_finite()) {
            return Err(FpeError::NonNormalizableParameters("parameters must be finite".into()));
        }
        if sigma == 0.0 {
            return Err(FpeError::NonNormalizableParameters("sigma must be nonzero".into()));
        }
        if alpha == 0.0 {
            return Err(FpeError::NonNormalizableParameters("alpha must be nonzero".into()));
        }
        if lambda == alpha {
            if mu == 0.0 {
                return Err(FpeError::NonNormalizableParameters(
                    "lambda = alpha needs mu/sigma != 0".into(),
                ));
            }
            Ok(LinearDriftBranch::Exponential)
        } else if (sigma > 0.0 && lambda < alpha) || (sigma < 0.0 && lambda > alpha) {
            Ok(LinearDriftBranch::Gaussian)
        } else {
            Err(FpeError::NonNormalizableParameters(
                "lambda != alpha needs (sigma > 0, lambda < alpha) or (sigma < 0, lambda > alpha)".into(),
            ))
        }
    }

    pub fn domain(&self) -> Result<Domain> {
        Ok(match self.branch()? {
            LinearDriftBranch::Exponential if self.mu / self.sigma > 0.0 => Domain::half_line_pos(),
            LinearDriftBranch::Exponential => Domain::half_line_neg(),
            LinearDriftBranch::Gaussian => Domain::real_line(),
        })
    }

    pub fn system(&self) -> Result<SimilaritySystem> {
        let domain = self.domain()?;
        SimilaritySystem::new(
            self.alpha,
            Profile::linear(self.lambda, -self.mu),
            Profile::constant(self.sigma),
            domain,
        )
    }

    /// The hand-coded density, independent of the generic pipeline.
    pub fn closed_form(&self, x: f64, t: f64) -> Result<f64> {
        let LinearDriftParams {
            lambda,
            mu,
            sigma,
            alpha,
        } = *self;
        if !(t > 0.0) {
            return Err(FpeError::PreSingularityTime { t });
        }
        let s = t.powf(alpha);
        let domain = self.domain()?;
        if !domain.contains(x / s) {
            return Ok(0.0);
        }
        Ok(match self.branch()? {
            LinearDriftBranch::Exponential => {
                let r = mu / (sigma * s);
                r.abs() * (-r * x).exp()
            }
            LinearDriftBranch::Gaussian => {
                let k = alpha - lambda;
                let shifted = x / s + mu / k;
                (k / (2.0 * PI * sigma * s * s)).sqrt() * (-k / (2.0 * sigma) * shifted * shifted).exp()
            }
        })
    }
}

/// Solves the linear-drift system through the generic pipeline.
pub fn linear_drift_family(p: LinearDriftParams) -> Result<SimilaritySolution> {
    let sys = p.system()?;
    solve(&sys, sys.domain().default_z_ref())
}

/// The heat kernel `ρ₁ = 0`, `ρ₂ = 1`, `α = 1/2`.
pub fn diffusion() -> SimilaritySolution {
    linear_drift_family(LinearDriftParams::new(0.0, 0.0, 1.0, 0.5)).expect("heat kernel is valid")
}

/// `ρ₁ = 0`, `ρ₂ = 1`, `α = 1/2` restricted to `z ≥ 0` with a reflecting wall.
pub fn half_line_diffusion() -> SimilaritySolution {
    let sys = SimilaritySystem::new(0.5, Profile::constant(0.0), Profile::constant(1.0), Domain::half_line_pos())
        .expect("valid system");
    solve(&sys, 1.0).expect("normalizable")
}

/// A positive multiplier `Q(z)` for a similarity density, stored through
/// `ln Q` and `(ln Q)'`.
#[derive(Clone)]
pub struct DeformationQ {
    log_q: RealFn,
    log_q_deriv: Profile,
    singular_points: Vec<f64>,
}

impl std::fmt::Debug for DeformationQ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeformationQ")
            .field("singular_points", &self.singular_points)
            .finish_non_exhaustive()
    }
}

impl DeformationQ {
    pub fn new(q: Profile) -> Self {
        let value = q.value_fn();
        let singular_points = q.singular_points().to_vec();
        DeformationQ {
            log_q: Arc::new(move |z| value(z).ln()),
            log_q_deriv: q.log_derivative(),
            singular_points,
        }
    }

    /// From `ln Q` and its derivative directly.
    pub fn from_log<L>(log_q: L, log_q_deriv: Profile) -> Self
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let singular_points = log_q_deriv.singular_points().to_vec();
        DeformationQ {
            log_q: Arc::new(log_q),
            log_q_deriv,
            singular_points,
        }
    }

    pub fn identity() -> Self {
        DeformationQ::from_log(|_| 0.0, Profile::constant(0.0))
    }

    /// `Q(z) = z^p`. For negative `z` only integer powers are defined.
    pub fn power(p: f64) -> Self {
        if p == 0.0 {
            return DeformationQ::identity();
        }
        let deriv = Profile::new(move |z| p / z, move |z| -p / (z * z))
            .with_second(move |z| 2.0 * p / (z * z * z))
            .with_singular_points([0.0]);
        DeformationQ::from_log(move |z: f64| z.powf(p).ln(), deriv)
    }

    pub fn log_q(&self, z: f64) -> f64 {
        (self.log_q)(z)
    }

    pub fn q(&self, z: f64) -> f64 {
        self.log_q(z).exp()
    }

    pub fn log_q_deriv(&self) -> &Profile {
        &self.log_q_deriv
    }

    /// `Q₁·Q₂`.
    pub fn times(&self, other: &DeformationQ) -> DeformationQ {
        let (a, b) = (self.log_q.clone(), other.log_q.clone());
        let mut q = DeformationQ::from_log(move |z| a(z) + b(z), self.log_q_deriv.plus(&other.log_q_deriv));
        q.singular_points = self.singular_points.iter().chain(&other.singular_points).copied().collect();
        q
    }

    fn check_positive(&self, domain: &Domain) -> Result<()> {
        for z in domain.sample_interior(2000) {
            if self.singular_points.contains(&z) {
                continue;
            }
            if !self.log_q(z).is_finite() {
                return Err(FpeError::InvalidParameters(format!("Q is not positive at z = {z}")));
            }
        }
        Ok(())
    }
}

/// Deforms a solution by `Q`: `ρ̃₁ = ρ₁ + ρ₂(ln Q)'`, `ρ̃₂ = ρ₂` and the new
/// density is proportional to `Q·y`.
pub fn deform(sol: &SimilaritySolution, q: &DeformationQ) -> Result<SimilaritySolution> {
    let sys = sol.system();
    let domain = sys.domain();
    q.check_positive(&domain)?;
    let rho1 = sys.rho1().plus(&sys.rho2().times(&q.log_q_deriv));
    let new_sys = SimilaritySystem::new(sys.alpha(), rho1, sys.rho2().clone(), domain)?;
    let dlog = q.log_q_deriv.clone();
    let log_density = Arc::new(LogDensity::Shifted {
        base: sol.log_density().clone(),
        log_q: q.log_q.clone(),
        log_q_deriv: Arc::new(move |z| dlog.eval(z)),
        singular: q.singular_points.clone(),
    });
    SimilaritySolution::normalized(new_sys, sol.z_ref(), log_density).map_err(|e| match e {
        FpeError::NotNormalizable(msg) => FpeError::DeformationNotNormalizable(msg),
        other => other,
    })
}

/// Exponential family deformed by `Q = z^{ν−1}`: a gamma density in `z`
/// with shape `ν` and rate `μ/σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub nu: f64,
    pub mu: f64,
    pub sigma: f64,
    pub alpha: f64,
}

impl GammaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.mu / self.sigma > 0.0 && self.alpha != 0.0) {
            return Err(FpeError::NonNormalizableParameters(
                "gamma deformation needs nu > 0, mu/sigma > 0, alpha != 0".into(),
            ));
        }
        Ok(())
    }

    pub fn closed_form(&self, x: f64, t: f64) -> Result<f64> {
        self.validate()?;
        if !(t > 0.0) {
            return Err(FpeError::PreSingularityTime { t });
        }
        if x < 0.0 {
            return Ok(0.0);
        }
        let rate = self.mu / self.sigma;
        let s = t.powf(self.alpha);
        Ok(rate.powf(self.nu) / gamma(self.nu) * x.powf(self.nu - 1.0) / s.powf(self.nu) * (-rate * x / s).exp())
    }
}

pub fn gamma_deformed_exponential(p: GammaParams) -> Result<SimilaritySolution> {
    p.validate()?;
    let base = linear_drift_family(LinearDriftParams::new(p.alpha, p.mu, p.sigma, p.alpha))?;
    deform(&base, &DeformationQ::power(p.nu - 1.0))
}

/// `I_k = ∫₀^∞ z^k e^{−z²/4} dz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentIndex {
    pub k: u32,
    /// By quadrature.
    pub value: f64,
    /// `2^k Γ((k+1)/2)`.
    pub closed_form: f64,
    /// The tabulated formula `2^n (2n−1)!! √π` for `k = 2n` and
    /// `2^{n−1}(n−1)!` for `k = 2n − 1`. The odd entries are smaller than
    /// the integral by `2^n`.
    pub tabulated: f64,
}

pub fn moment_integral(k: u32) -> MomentIndex {
    let value = adaptive_quad_with(
        |z: f64| if z == 0.0 && k == 0 { 1.0 } else { z.powi(k as i32) * (-z * z / 4.0).exp() },
        Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        },
        &QuadOptions::tight(),
    )
    .map(|r| r.value)
    .unwrap_or(f64::NAN);
    let closed_form = 2f64.powi(k as i32) * gamma((k as f64 + 1.0) / 2.0);
    let tabulated = if k.is_multiple_of(2) {
        let n = k / 2;
        2f64.powi(n as i32) * odd_double_factorial(n) * PI.sqrt()
    } else {
        let n = k.div_ceil(2);
        2f64.powi(n as i32 - 1) * factorial(n - 1)
    };
    MomentIndex {
        k,
        value,
        closed_form,
        tabulated,
    }
}

/// Half-line diffusion deformed by `Q = z^k`, drift `D¹ = k/x`.
pub fn moment_deformed_diffusion(k: u32) -> Result<SimilaritySolution> {
    deform(&half_line_diffusion(), &DeformationQ::power(k as f64))
}

/// `(1/I_k) t^{−1/2} (x/√t)^k e^{−x²/4t}` on `x ≥ 0`.
pub fn moment_closed_form(k: u32, x: f64, t: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let z = x / t.sqrt();
    z.powi(k as i32) * (-z * z / 4.0).exp() / (moment_integral(k).closed_form * t.sqrt())
}

/// Extends an even density from `z ≥ 0` to the whole line, halving `A`.
///
/// The system must have even `ρ₂`, odd `ρ₁`, and a log-density whose
/// analytic continuation to `z < 0` is even.
pub fn even_extension(sol: &SimilaritySolution) -> Result<SimilaritySolution> {
    let sys = sol.system();
    if sys.domain().kind != DomainKind::HalfLinePos {
        return Err(FpeError::InvalidParameters("even extension needs a positive half-line solution".into()));
    }
    for z in sys.domain().sample_interior(200) {
        let tol = 1e-12;
        let (r1p, r1m) = (sys.rho1().eval(z), sys.rho1().eval(-z));
        let (r2p, r2m) = (sys.rho2().eval(z), sys.rho2().eval(-z));
        if (r1p + r1m).abs() > tol * (1.0 + r1p.abs()) || (r2p - r2m).abs() > tol * (1.0 + r2p.abs()) {
            return Err(FpeError::AsymmetricDensity { at: z });
        }
        if !sol.log_density().is_even_at(z) {
            return Err(FpeError::AsymmetricDensity { at: z });
        }
    }
    let whole = SimilaritySystem::new_unchecked(
        sys.alpha(),
        sys.rho1().clone(),
        sys.rho2().clone(),
        Domain::real_line(),
    )?;
    let log_density = Arc::new(LogDensity::Folded {
        base: sol.log_density().clone(),
    });
    Ok(SimilaritySolution::from_parts(
        whole,
        sol.z_ref(),
        log_density,
        sol.ln_norm() - 2f64.ln(),
    ))
}

/// A system with the same `f(z)` and the diffusion profile `new_rho2`:
/// `ρ̃₁ = ρ̃₂ f + ρ̃₂' + αz`.
pub fn equivalent_system(sys: &SimilaritySystem, new_rho2: Profile) -> Result<SimilaritySystem> {
    let f = reduced_f(sys);
    let alpha = sys.alpha();
    let rho1 = new_rho2
        .times(&f)
        .plus(&new_rho2.derivative())
        .plus(&Profile::linear(alpha, 0.0));
    SimilaritySystem::new(alpha, rho1, new_rho2, sys.domain())
}

/// `equivalent_system` applied to a solution; the density is solved afresh.
pub fn equivalent_solution(sol: &SimilaritySolution, new_rho2: Profile) -> Result<SimilaritySolution> {
    let sys = equivalent_system(sol.system(), new_rho2)?;
    solve(&sys, sol.z_ref())
}

/// The system whose density is `φ₀²`: `f = 2φ₀'/φ₀`, `ρ₁` from the chosen
/// `ρ₂`.
pub fn from_ground_state(phi0: &Profile, rho2: Profile, alpha: f64, domain: Domain) -> Result<SimilaritySystem> {
    // Zeros flanked by nonzero values, or sign changes, are nodes; zeros at
    // the far ends of the scan are tail underflow.
    let (mut sign, mut zero_at) = (0.0, None);
    for z in domain.sample_interior(2000) {
        let v = phi0.eval(z);
        if !v.is_finite() {
            return Err(FpeError::NodeInGroundState { at: z });
        }
        if v == 0.0 {
            zero_at = zero_at.or(Some(z));
            continue;
        }
        if sign != 0.0 && (v.signum() != sign || zero_at.is_some()) {
            return Err(FpeError::NodeInGroundState { at: zero_at.unwrap_or(z) });
        }
        sign = v.signum();
        zero_at = None;
    }
    ground_state_system(phi0.log_derivative().scaled(2.0), rho2, alpha, domain)
}

/// [`from_ground_state`] given `ln φ₀` instead, for ground states that
/// underflow in the tails.
pub fn from_log_ground_state(log_phi0: &Profile, rho2: Profile, alpha: f64, domain: Domain) -> Result<SimilaritySystem> {
    if let Some(at) = domain.sample_interior(2000).into_iter().find(|&z| log_phi0.eval(z).is_nan()) {
        return Err(FpeError::NodeInGroundState { at });
    }
    ground_state_system(log_phi0.derivative().scaled(2.0), rho2, alpha, domain)
}

fn ground_state_system(f: Profile, rho2: Profile, alpha: f64, domain: Domain) -> Result<SimilaritySystem> {
    let rho1 = rho2.times(&f).plus(&rho2.derivative()).plus(&Profile::linear(alpha, 0.0));
    SimilaritySystem::new(alpha, rho1, rho2, domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma;
    use crate::similarity::PhysicalPoint;

    #[test]
    fn exponential_closed_form() {
        let p = LinearDriftParams::new(1.0, 1.0, 1.0, 1.0);
        let sol = linear_drift_family(p).unwrap();
        for (x, t) in [(0.0f64, 1.0f64), (1.0, 1.0), (2.5, 3.0)] {
            let want = (-x / t).exp() / t;
            assert!((p.closed_form(x, t).unwrap() - want).abs() < 1e-15);
            assert!((sol.pdf_xt(x, t).unwrap() - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn negative_half_line_branch() {
        let p = LinearDriftParams::new(0.8, -1.5, 1.0, 0.8);
        let sol = linear_drift_family(p).unwrap();
        assert_eq!(sol.support().kind, DomainKind::HalfLineNeg);
        for (x, t) in [(-0.3, 1.0), (-2.0, 2.0)] {
            let want = p.closed_form(x, t).unwrap();
            assert!((sol.pdf_xt(x, t).unwrap() - want).abs() < 1e-12 * want);
        }
        assert_eq!(sol.pdf_xt(0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_branch_moments() {
        let p = LinearDriftParams::new(0.0, 1.0, 1.0, 0.5);
        let sol = linear_drift_family(p).unwrap();
        let mean = sol.moment_at(1, 1.0).unwrap();
        let second = sol.moment_at(2, 1.0).unwrap();
        assert!((mean + 2.0).abs() < 1e-9);
        assert!((second - mean * mean - 2.0).abs() < 1e-9);
        let x = 0.3;
        assert!((sol.pdf_xt(x, 2.0).unwrap() - p.closed_form(x, 2.0).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn invalid_linear_parameters() {
        for p in [
            LinearDriftParams::new(0.7, 1.0, 1.0, 0.5),
            LinearDriftParams::new(0.2, 1.0, -1.0, 0.5),
            LinearDriftParams::new(0.5, 1.0, 0.0, 0.5),
            LinearDriftParams::new(0.5, 0.0, 1.0, 0.5),
        ] {
            assert!(matches!(linear_drift_family(p), Err(FpeError::NonNormalizableParameters(_))), "{p:?}");
        }
    }

    #[test]
    fn identity_deformation() {
        let sol = diffusion();
        let d = deform(&sol, &DeformationQ::identity()).unwrap();
        assert!((d.norm_a() - sol.norm_a()).abs() < 1e-14);
        for z in [-1.0, 0.0, 2.0] {
            assert!((d.y(z).unwrap() - sol.y(z).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_deformation_matches_closed_form() {
        for nu in [1.0, 1.5, 2.0, 3.7] {
            let p = GammaParams {
                nu,
                mu: 1.3,
                sigma: 1.0,
                alpha: 0.7,
            };
            let sol = gamma_deformed_exponential(p).unwrap();
            for (x, t) in [(0.2, 0.5), (1.1, 1.0), (3.0, 4.0)] {
                let want = p.closed_form(x, t).unwrap();
                let got = sol.pdf_xt(x, t).unwrap();
                assert!((got - want).abs() < 1e-10 * want.max(1e-300), "nu {nu}: {got} vs {want}");
            }
            let mean = sol.moment_at(1, 2.0).unwrap();
            assert!((mean - nu * 2f64.powf(0.7) / 1.3).abs() < 1e-8);
        }
    }

    #[test]
    fn deformed_drift_is_k_over_x() {
        let sol = moment_deformed_diffusion(2).unwrap();
        for (x, t) in [(0.5, 1.0), (2.0, 3.0)] {
            let d1 = sol.system().drift_at(x, t);
            assert!((d1 - 2.0 / x).abs() < 1e-14);
        }
    }

    #[test]
    fn composed_deformations() {
        let base = half_line_diffusion();
        let (q1, q2) = (DeformationQ::power(1.0), DeformationQ::power(2.0));
        let two_step = deform(&deform(&base, &q1).unwrap(), &q2).unwrap();
        let one_step = deform(&base, &q1.times(&q2)).unwrap();
        for z in [0.1, 1.0, 3.0] {
            assert!((two_step.y(z).unwrap() - one_step.y(z).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn non_normalizable_deformation() {
        let base = linear_drift_family(LinearDriftParams::new(1.0, 1.0, 1.0, 1.0)).unwrap();
        let q = DeformationQ::from_log(|z| 2.0 * z, Profile::constant(2.0));
        assert!(matches!(deform(&base, &q), Err(FpeError::DeformationNotNormalizable(_))));
    }

    #[test]
    fn moment_integrals() {
        for k in 0..=8 {
            let m = moment_integral(k);
            assert!((m.value - m.closed_form).abs() < 1e-10 * m.closed_form, "{m:?}");
            if k % 2 == 0 {
                assert!((m.tabulated - m.closed_form).abs() < 1e-12 * m.closed_form);
            }
        }
        assert!((moment_integral(0).value - PI.sqrt()).abs() < 1e-12);
        assert!((moment_integral(1).value - 2.0).abs() < 1e-12);
        assert!((moment_integral(3).value - 8.0).abs() < 1e-11);
        assert_eq!(moment_integral(1).tabulated, 1.0);
        assert_eq!(moment_integral(3).tabulated, 2.0);
    }

    #[test]
    fn moment_deformation_closed_form() {
        for k in 1..=4 {
            let sol = moment_deformed_diffusion(k).unwrap();
            for (x, t) in [(0.4, 1.0), (2.0, 2.0)] {
                let want = moment_closed_form(k, x, t);
                assert!((sol.pdf_xt(x, t).unwrap() - want).abs() < 1e-10 * want);
            }
        }
    }

    #[test]
    fn even_extension_of_moments() {
        let ext = even_extension(&half_line_diffusion()).unwrap();
        let heat = diffusion();
        for x in [-2.0, 0.0, 1.0] {
            assert!((ext.pdf_xt(x, 1.5).unwrap() - heat.pdf_xt(x, 1.5).unwrap()).abs() < 1e-13);
        }
        for n in 1..=3 {
            let ext = even_extension(&moment_deformed_diffusion(2 * n).unwrap()).unwrap();
            assert!((ext.mass_at(1.0).unwrap() - 1.0).abs() < 1e-9);
            if n == 1 {
                let (x, t): (f64, f64) = (-1.3, 2.0);
                let want = x * x / t * (-x * x / (4.0 * t)).exp() / (4.0 * PI.sqrt() * t.sqrt());
                assert!((ext.pdf_xt(x, t).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn odd_densities_do_not_extend() {
        let odd = moment_deformed_diffusion(1).unwrap();
        assert!(matches!(even_extension(&odd), Err(FpeError::AsymmetricDensity { .. })));
        let exp = linear_drift_family(LinearDriftParams::new(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(matches!(even_extension(&exp), Err(FpeError::AsymmetricDensity { .. })));
    }

    #[test]
    fn equivalent_systems_share_f() {
        let sol = half_line_diffusion();
        let eq = equivalent_system(sol.system(), Profile::identity()).unwrap();
        for z in [0.3, 1.0, 4.0] {
            let want = -z * z / 2.0 + 1.0 + z / 2.0;
            assert!((eq.rho1().eval(z) - want).abs() < 1e-14);
            assert!((reduced_f(&eq).eval(z) + z / 2.0).abs() < 1e-14);
        }
        let same = equivalent_solution(&sol, Profile::identity()).unwrap();
        let p = PhysicalPoint::new(1.2, 1.7).unwrap();
        assert!((same.pdf(&p).unwrap() - sol.pdf(&p).unwrap()).abs() < 1e-12);
        let unit = equivalent_system(sol.system(), Profile::constant(1.0)).unwrap();
        assert!((unit.rho1().eval(2.0) - (-1.0 + 1.0)).abs() < 1e-15);
        let bad = equivalent_system(diffusion().system(), Profile::identity());
        assert!(matches!(bad, Err(FpeError::DegenerateDiffusion { .. })));
    }

    #[test]
    fn ground_state_recipes() {
        let gauss = Profile::new(|z: f64| (-z * z / 8.0).exp(), |z: f64| -z / 4.0 * (-z * z / 8.0).exp());
        let sys = from_ground_state(&gauss, Profile::constant(1.0), 0.5, Domain::real_line()).unwrap();
        assert!(sys.rho1().eval(1.7).abs() < 1e-14);
        let g = 1.7;
        let log_phi = Profile::new(move |z: f64| g * z.ln() - z * z / 2.0, move |z: f64| g / z - z)
            .with_second(move |z: f64| -g / (z * z) - 1.0)
            .with_singular_points([0.0]);
        let sys = from_log_ground_state(&log_phi, Profile::constant(1.0), 1.0, Domain::half_line_pos()).unwrap();
        let f = reduced_f(&sys);
        assert!((f.eval(0.8) - 2.0 * (-0.8 + g / 0.8)).abs() < 1e-12);
        let sol = solve(&sys, 1.0).unwrap();
        let n2 = 2.0 / gamma(g + 0.5);
        assert!((sol.y(0.9).unwrap() - n2 * 0.9f64.powf(2.0 * g) * (-0.81f64).exp()).abs() < 1e-11);
        let sine = Profile::sin();
        let err = from_ground_state(&sine, Profile::constant(1.0), 0.5, Domain::scaled_interval(0.0, 4.0).unwrap());
        assert!(matches!(err, Err(FpeError::NodeInGroundState { .. })), "{err:?}");
    }
}
