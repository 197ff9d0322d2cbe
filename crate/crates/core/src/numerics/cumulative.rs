//! Running integrals `F(z_i) = ∫_{z0}^{z_i} f` for many query points.
//!
//! Consecutive query points are joined by adaptive Simpson panels with
//! Richardson correction; the integrand value at each panel endpoint is
//! carried over to the next panel.

use crate::error::{FpeError, Result};

#[derive(Debug, Clone, Copy)]
pub struct CumulativeOptions {
    /// Absolute tolerance per unit length of the integration range.
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for CumulativeOptions {
    fn default() -> Self {
        CumulativeOptions {
            tol: 1e-14,
            max_depth: 60,
        }
    }
}

struct Simpson<'a, F> {
    f: &'a F,
    max_depth: u32,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    fn eval(&self, x: f64) -> Result<f64> {
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FpeError::SingularIntegrand { at: x })
        }
    }

    /// Integral over `[a, b]` given `f(a)` and `f(b)`.
    fn panel(&self, a: f64, b: f64, fa: f64, fb: f64, tol: f64) -> Result<f64> {
        let m = 0.5 * (a + b);
        let fm = self.eval(m)?;
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        self.refine(a, b, fa, fm, fb, whole, tol, self.max_depth)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        if lm <= a || rm >= b || lm >= m || rm <= m {
            return Ok(whole);
        }
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
        if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
            return Ok(left + right + delta / 15.0);
        }
        Ok(self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
}

/// Returns `F(z_i) = ∫_{z0}^{z_i} f` for ascending `zs`.
pub fn cumulative_integral<F: Fn(f64) -> f64>(f: F, z0: f64, zs: &[f64]) -> Result<Vec<f64>> {
    cumulative_integral_with(f, z0, zs, &CumulativeOptions::default())
}

pub fn cumulative_integral_with<F: Fn(f64) -> f64>(
    f: F,
    z0: f64,
    zs: &[f64],
    opts: &CumulativeOptions,
) -> Result<Vec<f64>> {
    if zs.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(FpeError::InvalidParameters(
            "cumulative_integral needs ascending query points".into(),
        ));
    }
    let s = Simpson {
        f: &f,
        max_depth: opts.max_depth,
    };
    let mut out = vec![0.0; zs.len()];
    let split = zs.partition_point(|&z| z < z0);
    let f0 = if zs.iter().any(|&z| z != z0) {
        s.eval(z0)?
    } else {
        0.0
    };

    // Upward from z0.
    let (mut a, mut fa, mut acc) = (z0, f0, 0.0);
    for i in split..zs.len() {
        let b = zs[i];
        if b > a {
            let fb = s.eval(b)?;
            acc += s.panel(a, b, fa, fb, opts.tol * (b - a))?;
            a = b;
            fa = fb;
        }
        out[i] = acc;
    }

    // Downward from z0.
    let (mut b, mut fb, mut acc) = (z0, f0, 0.0);
    for i in (0..split).rev() {
        let a = zs[i];
        if a < b {
            let fa = s.eval(a)?;
            acc -= s.panel(a, b, fa, fb, opts.tol * (b - a))?;
            b = a;
            fb = fa;
        }
        out[i] = acc;
    }
    Ok(out)
}

/// Single-point convenience: `∫_{z0}^{z} f`.
pub fn integrate_from<F: Fn(f64) -> f64>(f: F, z0: f64, z: f64) -> Result<f64> {
    Ok(cumulative_integral(f, z0, &[z])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_integrand() {
        let v = cumulative_integral(|z| -z / 2.0, 0.0, &[2.0]).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn logarithm() {
        let v = cumulative_integral(|z| 1.0 / z, 1.0, &[std::f64::consts::E]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oscillator_type_profile() {
        // antiderivative -z^2/2 + ln z
        let v = cumulative_integral(|z| -z + 1.0 / z, 1.0, &[2.0]).unwrap();
        assert!((v[0] - (2f64.ln() - 1.5)).abs() < 1e-12);
    }

    #[test]
    fn points_on_both_sides_of_origin() {
        let zs = [-3.0, -1.0, 0.5, 2.0, 2.0, 4.0];
        let v = cumulative_integral(|z| z * z, 0.5, &zs).unwrap();
        for (z, got) in zs.iter().zip(&v) {
            let want = (z.powi(3) - 0.125) / 3.0;
            assert!((got - want).abs() < 1e-12, "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn singular_integrand_reports_location() {
        let err = cumulative_integral(|z| 1.0 / z, 1.0, &[-1.0]).unwrap_err();
        assert!(matches!(err, FpeError::SingularIntegrand { .. }));
    }

    #[test]
    fn unsorted_points_rejected() {
        assert!(cumulative_integral(|z| z, 0.0, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn zero_integrand_gives_zeros() {
        let v = cumulative_integral(|_| 0.0, 0.3, &[-2.0, 0.0, 1.0, 5.0]).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    proptest! {
        #[test]
        fn constant_integrand_is_exact(c in -10.0f64..10.0, z0 in -5.0f64..5.0,
                                       mut zs in proptest::collection::vec(-10.0f64..10.0, 1..20)) {
            zs.sort_by(f64::total_cmp);
            let v = cumulative_integral(|_| c, z0, &zs).unwrap();
            for (z, got) in zs.iter().zip(&v) {
                let want = c * (z - z0);
                prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
            }
        }

        #[test]
        fn composition_property(z0 in -2.0f64..2.0, mut zs in proptest::collection::vec(-4.0f64..4.0, 2..10)) {
            zs.sort_by(f64::total_cmp);
            let f = |z: f64| (z).cos() * (-0.1 * z * z).exp();
            let v = cumulative_integral(f, z0, &zs).unwrap();
            for i in 0..zs.len() {
                for j in i..zs.len() {
                    let direct = integrate_from(f, zs[i], zs[j]).unwrap();
                    prop_assert!((v[j] - v[i] - direct).abs() < 1e-11);
                }
            }
        }
    }
}
