use std::fmt;
use std::sync::Arc;

use crate::numerics::fd_first;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scale-invariant real function of the similarity variable together with
/// its first two derivatives.
///
/// When no analytic second derivative is supplied it is taken from a
/// five-point difference of the first derivative.
#[derive(Clone)]
pub struct Profile {
    value: RealFn,
    first: RealFn,
    second: RealFn,
    singular_points: Vec<f64>,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile")
            .field("singular_points", &self.singular_points)
            .finish_non_exhaustive()
    }
}

fn fd_second_from(first: RealFn) -> RealFn {
    Arc::new(move |z: f64| {
        let h = 1e-4 * z.abs().max(1.0);
        fd_first(|s| first(s), z, h)
    })
}

impl Profile {
    pub fn new<V, D>(value: V, first: D) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let first: RealFn = Arc::new(first);
        Profile {
            value: Arc::new(value),
            second: fd_second_from(first.clone()),
            first,
            singular_points: Vec::new(),
        }
    }

    pub fn with_second<S>(mut self, second: S) -> Self
    where
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.second = Arc::new(second);
        self
    }

    pub fn with_singular_points(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        for p in points {
            if !self.singular_points.contains(&p) {
                self.singular_points.push(p);
            }
        }
        self.singular_points.sort_by(f64::total_cmp);
        self
    }

    pub fn constant(c: f64) -> Self {
        Profile::new(move |_| c, |_| 0.0).with_second(|_| 0.0)
    }

    /// `slope·z + intercept`.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Profile::new(move |z| slope * z + intercept, move |_| slope).with_second(|_| 0.0)
    }

    pub fn identity() -> Self {
        Profile::linear(1.0, 0.0)
    }

    /// `z^p`, intended for `z > 0`. For `p != 0` the origin is recorded as
    /// singular since `ln z^p` diverges there.
    pub fn power(p: f64) -> Self {
        let sing = if p != 0.0 { vec![0.0] } else { vec![] };
        Profile::new(move |z: f64| z.powf(p), move |z: f64| {
            if p == 0.0 {
                0.0
            } else {
                p * z.powf(p - 1.0)
            }
        })
        .with_second(move |z: f64| {
            if p == 0.0 || p == 1.0 {
                0.0
            } else {
                p * (p - 1.0) * z.powf(p - 2.0)
            }
        })
        .with_singular_points(sing)
    }

    pub fn sin() -> Self {
        Profile::new(f64::sin, f64::cos).with_second(|z: f64| -z.sin())
    }

    pub fn cos() -> Self {
        Profile::new(f64::cos, |z: f64| -z.sin()).with_second(|z: f64| -z.cos())
    }

    pub fn eval(&self, z: f64) -> f64 {
        (self.value)(z)
    }

    pub fn deriv(&self, z: f64) -> f64 {
        (self.first)(z)
    }

    pub fn deriv2(&self, z: f64) -> f64 {
        (self.second)(z)
    }

    pub fn singular_points(&self) -> &[f64] {
        &self.singular_points
    }

    pub fn value_fn(&self) -> RealFn {
        self.value.clone()
    }

    /// The derivative as a profile of its own.
    pub fn derivative(&self) -> Profile {
        let first = self.second.clone();
        Profile {
            value: self.first.clone(),
            second: fd_second_from(first.clone()),
            first,
            singular_points: self.singular_points.clone(),
        }
    }

    pub fn plus(&self, other: &Profile) -> Profile {
        let (a, b) = (self.clone(), other.clone());
        let (a1, b1) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        Profile::new(move |z| a.eval(z) + b.eval(z), move |z| a1.deriv(z) + b1.deriv(z))
            .with_second(move |z| a2.deriv2(z) + b2.deriv2(z))
            .with_singular_points(self.merged_singular(other))
    }

    pub fn minus(&self, other: &Profile) -> Profile {
        self.plus(&other.scaled(-1.0))
    }

    pub fn scaled(&self, c: f64) -> Profile {
        let (a, a1, a2) = (self.clone(), self.clone(), self.clone());
        Profile::new(move |z| c * a.eval(z), move |z| c * a1.deriv(z))
            .with_second(move |z| c * a2.deriv2(z))
            .with_singular_points(self.singular_points.clone())
    }

    pub fn times(&self, other: &Profile) -> Profile {
        let (a, b) = (self.clone(), other.clone());
        let (a1, b1) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        Profile::new(move |z| a.eval(z) * b.eval(z), move |z| {
            a1.deriv(z) * b1.eval(z) + a1.eval(z) * b1.deriv(z)
        })
        .with_second(move |z| {
            a2.deriv2(z) * b2.eval(z) + 2.0 * a2.deriv(z) * b2.deriv(z) + a2.eval(z) * b2.deriv2(z)
        })
        .with_singular_points(self.merged_singular(other))
    }

    /// `self / denom`, quotient rule for the derivatives.
    pub fn divided_by(&self, denom: &Profile) -> Profile {
        let (n, d) = (self.clone(), denom.clone());
        let (n1, d1) = (self.clone(), denom.clone());
        let (n2, d2) = (self.clone(), denom.clone());
        Profile::new(move |z| n.eval(z) / d.eval(z), move |z| {
            let dv = d1.eval(z);
            (n1.deriv(z) * dv - n1.eval(z) * d1.deriv(z)) / (dv * dv)
        })
        .with_second(move |z| {
            let (nv, n1v, n2v) = (n2.eval(z), n2.deriv(z), n2.deriv2(z));
            let (dv, d1v, d2v) = (d2.eval(z), d2.deriv(z), d2.deriv2(z));
            let q = nv / dv;
            let q1 = (n1v - q * d1v) / dv;
            (n2v - 2.0 * q1 * d1v - q * d2v) / dv
        })
        .with_singular_points(self.merged_singular(denom))
    }

    /// Logarithmic derivative `(ln self)' = self'/self`.
    pub fn log_derivative(&self) -> Profile {
        self.derivative().divided_by(self)
    }

    fn merged_singular(&self, other: &Profile) -> Vec<f64> {
        let mut v = self.singular_points.clone();
        v.extend_from_slice(&other.singular_points);
        v
    }
}
