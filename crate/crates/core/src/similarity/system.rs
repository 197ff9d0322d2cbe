use crate::error::{FpeError, Result};

use super::{Domain, Profile};

/// Exponents of the scale transformation `x → ε^a x`, `t → ε^b t`.
///
/// With `c = -a`, `d = a - b`, `e = 2a - b` the equation keeps its form
/// (`b = a - d = 2a - e`); only `α = a/b` enters the similarity reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingLaw {
    pub a: f64,
    pub b: f64,
}

impl ScalingLaw {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || b == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(FpeError::InvalidParameters(format!(
                "scaling indices must be finite and nonzero, got a={a}, b={b}"
            )));
        }
        Ok(ScalingLaw { a, b })
    }

    pub fn from_alpha(alpha: f64) -> Result<Self> {
        ScalingLaw::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.a / self.b
    }

    /// Density index; normalization forces `c = -a`.
    pub fn c(&self) -> f64 {
        -self.a
    }

    /// Drift index.
    pub fn d(&self) -> f64 {
        self.a - self.b
    }

    /// Diffusion index.
    pub fn e(&self) -> f64 {
        2.0 * self.a - self.b
    }

    pub fn is_form_invariant(&self) -> bool {
        let tol = 1e-14 * (self.a.abs() + self.b.abs());
        (self.b - (self.a - self.d())).abs() <= tol && (self.b - (2.0 * self.a - self.e())).abs() <= tol
    }
}

/// A point `(x, t)` of the physical frame, `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalPoint {
    pub x: f64,
    pub t: f64,
}

impl PhysicalPoint {
    pub fn new(x: f64, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(FpeError::PreSingularityTime { t });
        }
        Ok(PhysicalPoint { x, t })
    }

    pub fn z(&self, alpha: f64) -> f64 {
        self.x / self.t.powf(alpha)
    }
}

/// An FPE whose coefficients scale as `D¹ = t^{α-1} ρ₁(z)` and
/// `D² = t^{2α-1} ρ₂(z)` with `z = x/t^α`.
#[derive(Debug, Clone)]
pub struct SimilaritySystem {
    scaling: ScalingLaw,
    rho1: Profile,
    rho2: Profile,
    domain: Domain,
}

const SCAN_POINTS: usize = 2000;

impl SimilaritySystem {
    /// Builds a system, scanning the interior for zeros or sign changes of `ρ₂`
    /// and for singular points of either profile.
    pub fn new(alpha: f64, rho1: Profile, rho2: Profile, domain: Domain) -> Result<Self> {
        let sys = SimilaritySystem::new_unchecked(alpha, rho1, rho2, domain)?;
        for &s in sys.rho1.singular_points().iter().chain(sys.rho2.singular_points()) {
            if domain.contains_interior(s) {
                return Err(FpeError::InteriorSingularity { at: s });
            }
        }
        sys.scan_rho2()?;
        Ok(sys)
    }

    /// Skips the interior-singularity check. Used for whole-line extensions
    /// whose density vanishes at an interior barrier.
    pub(crate) fn new_unchecked(alpha: f64, rho1: Profile, rho2: Profile, domain: Domain) -> Result<Self> {
        let scaling = ScalingLaw::from_alpha(alpha)?;
        Ok(SimilaritySystem {
            scaling,
            rho1,
            rho2,
            domain,
        })
    }

    fn scan_rho2(&self) -> Result<()> {
        let mut sign = 0.0;
        for z in self.domain.sample_interior(SCAN_POINTS) {
            if self.rho2.singular_points().contains(&z) {
                continue;
            }
            let v = self.rho2.eval(z);
            if !v.is_finite() || v == 0.0 {
                return Err(FpeError::DegenerateDiffusion { at: z });
            }
            if sign == 0.0 {
                sign = v.signum();
            } else if v.signum() != sign {
                return Err(FpeError::DegenerateDiffusion { at: z });
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.scaling.alpha()
    }

    pub fn scaling(&self) -> ScalingLaw {
        self.scaling
    }

    pub fn rho1(&self) -> &Profile {
        &self.rho1
    }

    pub fn rho2(&self) -> &Profile {
        &self.rho2
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// `D¹(x, t) = t^{α-1} ρ₁(x/t^α)`.
    pub fn drift_at(&self, x: f64, t: f64) -> f64 {
        let a = self.alpha();
        t.powf(a - 1.0) * self.rho1.eval(x / t.powf(a))
    }

    /// `D²(x, t) = t^{2α-1} ρ₂(x/t^α)`.
    pub fn diffusion_at(&self, x: f64, t: f64) -> f64 {
        let a = self.alpha();
        t.powf(2.0 * a - 1.0) * self.rho2.eval(x / t.powf(a))
    }

    /// Rejects systems whose diffusion is negative anywhere on the interior.
    /// The closed-form density only needs `ρ₂ != 0`, but the forward
    /// process and its numerical solvers need `ρ₂ > 0`.
    pub fn require_forward_diffusion(&self) -> Result<()> {
        match self.domain.sample_interior(SCAN_POINTS).into_iter().find(|&z| self.rho2.eval(z) <= 0.0) {
            Some(at) => Err(FpeError::NegativeDiffusion { at }),
            None => Ok(()),
        }
    }
}

/// Drift coefficient at a physical point.
pub fn drift(system: &SimilaritySystem, p: &PhysicalPoint) -> f64 {
    system.drift_at(p.x, p.t)
}

/// Diffusion coefficient at a physical point.
pub fn diffusion(system: &SimilaritySystem, p: &PhysicalPoint) -> f64 {
    system.diffusion_at(p.x, p.t)
}

/// The log-derivative of the similarity density,
/// `f(z) = (ρ₁(z) − ρ₂'(z) − αz)/ρ₂(z)`.
pub fn reduced_f(system: &SimilaritySystem) -> Profile {
    let alpha = system.alpha();
    let numerator = system
        .rho1
        .minus(&system.rho2.derivative())
        .minus(&Profile::linear(alpha, 0.0));
    numerator.divided_by(&system.rho2)
}

/// `f(z)` at a single point, reporting a vanishing `ρ₂`.
pub fn reduced_f_at(system: &SimilaritySystem, z: f64) -> Result<f64> {
    let r2 = system.rho2.eval(z);
    if r2 == 0.0 {
        return Err(FpeError::DegenerateDiffusion { at: z });
    }
    Ok((system.rho1.eval(z) - system.rho2.deriv(z) - system.alpha() * z) / r2)
}
