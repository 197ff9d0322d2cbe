//! Ground states of the deformed radial oscillator (Laguerre types L1, L2)
//! and the deformed Pöschl–Teller potential (Jacobi types J1, J2), and the
//! Fokker–Planck systems whose density is the squared ground state.
//!
//! With `η = z²` (L) or `η = cos 2z` (J), the ground state is
//! `φ_{ℓ,0} = N_{ℓ,0} φ_ℓ(z) ξ_ℓ(η; g+1)/ξ_ℓ(η; g)`, where `ξ_ℓ` is a degree-`ℓ`
//! deforming polynomial. J systems live on `z ∈ [0, π/2]`, so their right
//! wall moves as `x(t) = π t^α / 2`.

mod poly;

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

pub use poly::{jacobi, jacobi_deriv, jacobi_explicit, laguerre, laguerre_deriv};

use crate::error::{FpeError, Result};
use crate::numerics::ln_gamma;
use crate::similarity::{solve, Domain, Profile, SimilaritySolution, SimilaritySystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    L1,
    L2,
    J1,
    J2,
}

impl Variant {
    pub fn is_laguerre(self) -> bool {
        matches!(self, Variant::L1 | Variant::L2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::L1 => "L1",
            Variant::L2 => "L2",
            Variant::J1 => "J1",
            Variant::J2 => "J2",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = FpeError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L1" => Ok(Variant::L1),
            "L2" => Ok(Variant::L2),
            "J1" => Ok(Variant::J1),
            "J2" => Ok(Variant::J2),
            other => Err(FpeError::InvalidParameters(format!("unknown variant {other}"))),
        }
    }
}

/// Largest `ℓ` accepted; forward recurrences stay accurate well past it.
pub const MAX_ELL: u32 = 10;

const SCAN_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExceptionalParams {
    pub variant: Variant,
    pub ell: u32,
    pub g: f64,
    /// Unused for L variants.
    pub h: f64,
}

impl ExceptionalParams {
    /// Validates the parameter ranges and scans `ξ_ℓ(·; g)` and
    /// `ξ_ℓ(·; g+1)` for zeros on the image of the domain.
    pub fn new(variant: Variant, ell: u32, g: f64, h: f64) -> Result<Self> {
        let p = ExceptionalParams { variant, ell, g, h };
        p.validate()?;
        Ok(p)
    }

    pub fn laguerre(variant: Variant, ell: u32, g: f64) -> Result<Self> {
        ExceptionalParams::new(variant, ell, g, 0.0)
    }

    fn validate(&self) -> Result<()> {
        let ExceptionalParams { variant, ell, g, h } = *self;
        if ell > MAX_ELL {
            return Err(FpeError::InvalidParameters(format!("ell must be at most {MAX_ELL}")));
        }
        let ok = match variant {
            Variant::L1 | Variant::L2 => g > 0.0,
            Variant::J1 => g > h && h > 0.0,
            Variant::J2 => h > g && g > 0.0,
        };
        if !ok || !g.is_finite() || !h.is_finite() {
            let rule = match variant {
                Variant::L1 | Variant::L2 => "g>0",
                Variant::J1 => "g>h>0",
                Variant::J2 => "h>g>0",
            };
            return Err(FpeError::InvalidParameters(format!("{variant} needs {rule}")));
        }
        for p in [*self, self.shifted()] {
            p.scan_xi()?;
        }
        Ok(())
    }

    /// Parameters with `g → g+1`, `h → h+1`.
    pub fn shifted(&self) -> ExceptionalParams {
        ExceptionalParams {
            g: self.g + 1.0,
            h: self.h + 1.0,
            ..*self
        }
    }

    fn scan_xi(&self) -> Result<()> {
        let etas: Vec<f64> = if self.variant.is_laguerre() {
            std::iter::once(0.0)
                .chain((0..SCAN_POINTS).map(|i| {
                    let u = (i as f64 + 0.5) / SCAN_POINTS as f64;
                    u / (1.0 - u)
                }))
                .collect()
        } else {
            (0..=SCAN_POINTS).map(|i| -1.0 + 2.0 * i as f64 / SCAN_POINTS as f64).collect()
        };
        let mut sign = 0.0;
        for eta in etas {
            let v = xi(self, eta);
            if v == 0.0 || !v.is_finite() || (sign != 0.0 && v.signum() != sign) {
                return Err(FpeError::DeformingFunctionNode { eta });
            }
            sign = v.signum();
        }
        // Sign at η → ∞ is that of the leading coefficient (−1)^ℓ for L2 and
        // +1 for L1.
        if self.variant == Variant::L2 && self.ell % 2 == 1 && sign > 0.0 {
            return Err(FpeError::DeformingFunctionNode { eta: f64::INFINITY });
        }
        if self.variant == Variant::L2 && self.ell.is_multiple_of(2) && sign < 0.0 {
            return Err(FpeError::DeformingFunctionNode { eta: f64::INFINITY });
        }
        Ok(())
    }

    /// Polynomial indices `(a, b)` of `ξ_ℓ`; `b` is unused for L variants.
    fn indices(&self) -> (f64, f64) {
        let (l, g, h) = (self.ell as f64, self.g, self.h);
        match self.variant {
            Variant::L1 => (g + l - 1.5, 0.0),
            Variant::L2 => (-g - l - 0.5, 0.0),
            Variant::J1 => (g + l - 1.5, -h - l - 0.5),
            Variant::J2 => (-g - l - 0.5, h + l - 1.5),
        }
    }

    pub fn domain(&self) -> Domain {
        if self.variant.is_laguerre() {
            Domain::half_line_pos()
        } else {
            Domain::scaled_interval(0.0, FRAC_PI_2).expect("finite interval")
        }
    }
}

/// `η(z)` with `dη/dz` and `d²η/dz²`.
pub fn eta_of(variant: Variant, z: f64) -> (f64, f64, f64) {
    if variant.is_laguerre() {
        (z * z, 2.0 * z, 2.0)
    } else {
        let (s, c) = (2.0 * z).sin_cos();
        (c, -2.0 * s, -4.0 * c)
    }
}

/// `d^m ξ_ℓ / dη^m`.
fn xi_nth(p: &ExceptionalParams, m: u32, eta: f64) -> f64 {
    let (a, b) = p.indices();
    match p.variant {
        Variant::L1 => {
            let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * laguerre_deriv(m, p.ell, a, -eta)
        }
        Variant::L2 => laguerre_deriv(m, p.ell, a, eta),
        Variant::J1 | Variant::J2 => jacobi_deriv(m, p.ell, a, b, eta),
    }
}

/// The deforming function `ξ_ℓ(η; g[, h])`.
pub fn xi(p: &ExceptionalParams, eta: f64) -> f64 {
    xi_nth(p, 0, eta)
}

/// `dξ_ℓ/dη`.
pub fn xi_deriv(p: &ExceptionalParams, eta: f64) -> f64 {
    xi_nth(p, 1, eta)
}

/// `d²ξ_ℓ/dη²`.
pub fn xi_deriv2(p: &ExceptionalParams, eta: f64) -> f64 {
    xi_nth(p, 2, eta)
}

/// `ξ_ℓ(η(z))` as a profile in `z`, multiplied by `sign`.
pub fn xi_profile(p: &ExceptionalParams, sign: f64) -> Profile {
    let (p0, p1, p2) = (*p, *p, *p);
    let v = p.variant;
    Profile::new(move |z| sign * xi(&p0, eta_of(v, z).0), move |z| {
        let (eta, d1, _) = eta_of(v, z);
        sign * xi_deriv(&p1, eta) * d1
    })
    .with_second(move |z| {
        let (eta, d1, d2) = eta_of(v, z);
        sign * (xi_deriv2(&p2, eta) * d1 * d1 + xi_deriv(&p2, eta) * d2)
    })
}

/// `R(η) = ξ'(η;g+1)/ξ(η;g+1) − ξ'(η;g)/ξ(η;g)` and `dR/dη`.
fn ratio_terms(p: &ExceptionalParams, eta: f64) -> (f64, f64) {
    let q = p.shifted();
    let log_d = |p: &ExceptionalParams| {
        let (v, d1, d2) = (xi(p, eta), xi_deriv(p, eta), xi_deriv2(p, eta));
        let r = d1 / v;
        (r, d2 / v - r * r)
    };
    let (r1, dr1) = log_d(&q);
    let (r0, dr0) = log_d(p);
    (r1 - r0, dr1 - dr0)
}

/// `N_{ℓ,0}²`, in log form.
pub fn ln_norm_squared(p: &ExceptionalParams) -> f64 {
    let (l, g, h) = (p.ell as f64, p.g, p.h);
    let ln_n0_sq = |g: f64, h: f64| {
        (2.0 * (g + h)).ln() + ln_gamma(g + h) - ln_gamma(g + 0.5) - ln_gamma(h + 0.5)
    };
    match p.variant {
        Variant::L1 => (2.0 * (g + l - 0.5)).ln() - (g + 2.0 * l - 0.5).ln() - ln_gamma(g + l + 0.5),
        Variant::L2 => (2.0 * (g + 0.5)).ln() - (g + l + 0.5).ln() - ln_gamma(g + l + 0.5),
        Variant::J1 => {
            ln_n0_sq(g + l, h + l) + ((h + 0.5) * (g + l - 0.5) / ((h + l + 0.5) * (g + 2.0 * l - 0.5))).ln()
        }
        Variant::J2 => {
            ln_n0_sq(g + l, h + l) + ((g + 0.5) * (h + l - 0.5) / ((g + l + 0.5) * (h + 2.0 * l - 0.5))).ln()
        }
    }
}

/// `ln |φ_{ℓ,0}(z)|`; `−∞` at the walls.
pub fn ln_ground_state(p: &ExceptionalParams, z: f64) -> f64 {
    let (l, g, h) = (p.ell as f64, p.g, p.h);
    let (eta, _, _) = eta_of(p.variant, z);
    let base = if p.variant.is_laguerre() {
        if !(z > 0.0) {
            return f64::NEG_INFINITY;
        }
        -0.5 * z * z + (g + l) * z.ln()
    } else {
        if !(z > 0.0 && z < FRAC_PI_2) {
            return f64::NEG_INFINITY;
        }
        (g + l) * z.sin().ln() + (h + l) * z.cos().ln()
    };
    0.5 * ln_norm_squared(p) + base + xi(&p.shifted(), eta).abs().ln() - xi(p, eta).abs().ln()
}

/// `φ_{ℓ,0}(z)` of the deformed radial oscillator, `z > 0`.
pub fn ground_state_oscillator(p: &ExceptionalParams, z: f64) -> f64 {
    debug_assert!(p.variant.is_laguerre());
    ln_ground_state(p, z).exp()
}

/// `φ_{ℓ,0}(z)` of the deformed Pöschl–Teller potential, `0 < z < π/2`.
pub fn ground_state_pt(p: &ExceptionalParams, z: f64) -> f64 {
    debug_assert!(!p.variant.is_laguerre());
    ln_ground_state(p, z).exp()
}

/// `f = 2[−z + (g+ℓ)/z + 2z R(z²)]`.
pub fn f_oscillator(p: &ExceptionalParams, z: f64) -> f64 {
    let (r, _) = ratio_terms(p, z * z);
    2.0 * (-z + (p.g + p.ell as f64) / z + 2.0 * z * r)
}

fn f_oscillator_deriv(p: &ExceptionalParams, z: f64) -> f64 {
    let (r, dr) = ratio_terms(p, z * z);
    2.0 * (-1.0 - (p.g + p.ell as f64) / (z * z) + 2.0 * r + 4.0 * z * z * dr)
}

/// `f = 2[(g+ℓ) cot z − (h+ℓ) tan z − 2 sin 2z R(cos 2z)]`.
pub fn f_pt(p: &ExceptionalParams, z: f64) -> f64 {
    let l = p.ell as f64;
    let (r, _) = ratio_terms(p, (2.0 * z).cos());
    2.0 * ((p.g + l) / z.tan() - (p.h + l) * z.tan() - 2.0 * (2.0 * z).sin() * r)
}

fn f_pt_deriv(p: &ExceptionalParams, z: f64) -> f64 {
    let l = p.ell as f64;
    let (s2, c2) = (2.0 * z).sin_cos();
    let (r, dr) = ratio_terms(p, c2);
    let (s, c) = z.sin_cos();
    2.0 * (-(p.g + l) / (s * s) - (p.h + l) / (c * c) - 4.0 * c2 * r + 4.0 * s2 * s2 * dr)
}

/// `f(z)` for either family as a profile.
pub fn f_profile(p: &ExceptionalParams) -> Profile {
    let (p0, p1) = (*p, *p);
    if p.variant.is_laguerre() {
        Profile::new(move |z| f_oscillator(&p0, z), move |z| f_oscillator_deriv(&p1, z)).with_singular_points([0.0])
    } else {
        Profile::new(move |z| f_pt(&p0, z), move |z| f_pt_deriv(&p1, z)).with_singular_points([0.0, FRAC_PI_2])
    }
}

/// Diffusion profiles offered for the exceptional systems. The `ξ` choices
/// are multiplied by the sign of `ξ` so that the diffusion is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rho2Choice {
    One,
    Z,
    SinZ,
    CosZ,
    /// `±ξ_ℓ(η; g, h)`.
    XiBase,
    /// `±ξ_ℓ(η; g+1, h+1)`.
    XiShifted,
}

impl Rho2Choice {
    pub const ALL: [Rho2Choice; 6] = [
        Rho2Choice::One,
        Rho2Choice::Z,
        Rho2Choice::SinZ,
        Rho2Choice::CosZ,
        Rho2Choice::XiBase,
        Rho2Choice::XiShifted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rho2Choice::One => "1",
            Rho2Choice::Z => "z",
            Rho2Choice::SinZ => "sin",
            Rho2Choice::CosZ => "cos",
            Rho2Choice::XiBase => "xi",
            Rho2Choice::XiShifted => "xi1",
        }
    }

    pub fn profile(self, p: &ExceptionalParams) -> Profile {
        match self {
            Rho2Choice::One => Profile::constant(1.0),
            Rho2Choice::Z => Profile::identity(),
            Rho2Choice::SinZ => Profile::sin(),
            Rho2Choice::CosZ => Profile::cos(),
            Rho2Choice::XiBase => xi_profile(p, xi_sign(p)),
            Rho2Choice::XiShifted => {
                let q = p.shifted();
                xi_profile(&q, xi_sign(&q))
            }
        }
    }
}

impl FromStr for Rho2Choice {
    type Err = FpeError;
    fn from_str(s: &str) -> Result<Self> {
        Rho2Choice::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| FpeError::InvalidParameters(format!("unknown rho2 choice {s}")))
    }
}

fn xi_sign(p: &ExceptionalParams) -> f64 {
    let eta = if p.variant.is_laguerre() { 1.0 } else { 0.0 };
    xi(p, eta).signum()
}

/// The system with `ρ₁ = ρ₂ f + ρ₂' + αz` for the chosen `ρ₂`, and its
/// solution, whose density is `φ_{ℓ,0}²`.
pub fn build_fpe(p: &ExceptionalParams, rho2: Rho2Choice, alpha: f64) -> Result<SimilaritySolution> {
    let f = f_profile(p);
    let rho2 = rho2.profile(p);
    let rho1 = rho2.times(&f).plus(&rho2.derivative()).plus(&Profile::linear(alpha, 0.0));
    let sys = SimilaritySystem::new(alpha, rho1, rho2, p.domain())?;
    solve(&sys, 1.0)
}
