use crate::error::{FpeError, Result};
use crate::numerics::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    RealLine,
    HalfLinePos,
    HalfLineNeg,
    /// Finite `z`-interval; its physical edges move as `x_b(t) = z_b·t^α`.
    ScaledInterval,
}

/// The support of a similarity system in the `z` variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub kind: DomainKind,
    pub z_lo: f64,
    pub z_hi: f64,
}

impl Domain {
    pub fn real_line() -> Self {
        Domain {
            kind: DomainKind::RealLine,
            z_lo: f64::NEG_INFINITY,
            z_hi: f64::INFINITY,
        }
    }

    pub fn half_line_pos() -> Self {
        Domain {
            kind: DomainKind::HalfLinePos,
            z_lo: 0.0,
            z_hi: f64::INFINITY,
        }
    }

    pub fn half_line_neg() -> Self {
        Domain {
            kind: DomainKind::HalfLineNeg,
            z_lo: f64::NEG_INFINITY,
            z_hi: 0.0,
        }
    }

    pub fn scaled_interval(z_lo: f64, z_hi: f64) -> Result<Self> {
        if !(z_lo.is_finite() && z_hi.is_finite() && z_lo < z_hi) {
            return Err(FpeError::InvalidParameters(format!(
                "scaled interval needs finite z_lo < z_hi, got [{z_lo}, {z_hi}]"
            )));
        }
        Ok(Domain {
            kind: DomainKind::ScaledInterval,
            z_lo,
            z_hi,
        })
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.z_lo,
            hi: self.z_hi,
        }
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.z_lo && z <= self.z_hi
    }

    pub fn contains_interior(&self, z: f64) -> bool {
        z > self.z_lo && z < self.z_hi
    }

    pub fn is_moving(&self) -> bool {
        self.kind == DomainKind::ScaledInterval
    }

    /// Finite boundary points (the impenetrable walls).
    pub fn finite_boundaries(&self) -> Vec<f64> {
        [self.z_lo, self.z_hi].into_iter().filter(|z| z.is_finite()).collect()
    }

    /// Physical extent `[z_lo·t^α, z_hi·t^α]` at time `t`.
    pub fn physical_bounds(&self, alpha: f64, t: f64) -> (f64, f64) {
        let s = t.powf(alpha);
        let scale = |z: f64| if z.is_finite() { z * s } else { z };
        (scale(self.z_lo), scale(self.z_hi))
    }

    /// Default base point of the log-density integral.
    pub fn default_z_ref(&self) -> f64 {
        match self.kind {
            DomainKind::RealLine => 0.0,
            DomainKind::HalfLinePos => 1.0,
            DomainKind::HalfLineNeg => -1.0,
            DomainKind::ScaledInterval => {
                if self.contains_interior(1.0) {
                    1.0
                } else {
                    0.5 * (self.z_lo + self.z_hi)
                }
            }
        }
    }

    /// `n` ascending interior points, spread through the whole domain by
    /// the same maps the quadrature uses for infinite ends.
    pub fn sample_interior(&self, n: usize) -> Vec<f64> {
        let u = |i: usize| (i as f64 + 0.5) / n as f64;
        (0..n)
            .map(|i| {
                let u = u(i);
                match (self.z_lo.is_finite(), self.z_hi.is_finite()) {
                    (true, true) => self.z_lo + u * (self.z_hi - self.z_lo),
                    (true, false) => self.z_lo + u / (1.0 - u),
                    (false, true) => self.z_hi - (1.0 - u) / u,
                    (false, false) => {
                        let v = 2.0 * u - 1.0;
                        v / (1.0 - v.abs())
                    }
                }
            })
            .collect()
    }
}
