//! Globally adaptive Gauss–Kronrod quadrature (7/15 pair) on finite,
//! semi-infinite and doubly infinite intervals.
//!
//! Infinite ranges are mapped onto a bounded parameter with
//! `x = lo + u/(1-u)` for `[lo, ∞)`, the mirrored map `x = hi - u/(1-u)`
//! for `(-∞, hi]`, and `x = u/(1-|u|)` on `u ∈ (-1, 1)` for the whole line.
//! The Kronrod nodes never touch the mapped endpoints, so integrands only
//! need to be finite on the open interval.

use std::collections::BinaryHeap;

use crate::error::{FpeError, Result};

/// An interval of the extended real line. Either endpoint may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(FpeError::InvalidParameters(format!(
                "interval requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(FpeError::InvalidParameters(format!(
                "interval endpoints point the wrong way: [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Subdivision budget; exceeding it reports a quadrature failure.
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadOptions {
    pub fn tight() -> Self {
        QuadOptions {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            max_subdivisions: 4000,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    if !fc.is_finite() {
        return Err(FpeError::NonFiniteIntegrand { at: center });
    }
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (g(x1), g(x2));
        if !f1.is_finite() {
            return Err(FpeError::NonFiniteIntegrand { at: x1 });
        }
        if !f2.is_finite() {
            return Err(FpeError::NonFiniteIntegrand { at: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

fn adaptive_core<F: Fn(f64) -> f64>(
    g: F,
    initial: &[(f64, f64)],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(FpeError::InvalidParameters(
            "quadrature tolerances must be positive".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for &(a, b) in initial {
        heap.push(gk15(&g, a, b)?);
        evaluations += 15;
    }
    let mut subdivisions = heap.len();
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        // Stop splitting once the segment is at floating-point resolution.
        if subdivisions >= opts.max_subdivisions || mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            let (value, error) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
            return Err(FpeError::QuadratureFailure {
                estimate: value,
                error_estimate: error,
            });
        }
        heap.push(gk15(&g, worst.a, mid)?);
        heap.push(gk15(&g, mid, worst.b)?);
        evaluations += 30;
        subdivisions += 1;
    }
}

/// Integrates `f` over `iv` to `max(abs_tol, rel_tol·|value|)`.
pub fn adaptive_quad<F: Fn(f64) -> f64>(
    f: F,
    iv: Interval,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    adaptive_quad_with(
        f,
        iv,
        &QuadOptions {
            rel_tol,
            abs_tol,
            ..QuadOptions::default()
        },
    )
}

pub fn adaptive_quad_with<F: Fn(f64) -> f64>(
    f: F,
    iv: Interval,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let (lo, hi) = (iv.lo, iv.hi);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => adaptive_core(f, &[(lo, hi)], opts),
        (true, false) => adaptive_core(
            |u: f64| {
                let s = 1.0 / (1.0 - u);
                f(lo + u * s) * s * s
            },
            &[(0.0, 1.0)],
            opts,
        ),
        (false, true) => adaptive_core(
            |u: f64| {
                let s = 1.0 / (1.0 - u);
                f(hi - u * s) * s * s
            },
            &[(0.0, 1.0)],
            opts,
        ),
        (false, false) => adaptive_core(
            |u: f64| {
                let s = 1.0 / (1.0 - u.abs());
                f(u * s) * s * s
            },
            &[(-1.0, 0.0), (0.0, 1.0)],
            opts,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quad(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> QuadResult {
        adaptive_quad(f, Interval::new(lo, hi).unwrap(), 1e-10, 1e-12).unwrap()
    }

    #[test]
    fn exponential_on_half_line() {
        let r = quad(|x| (-x).exp(), 0.0, f64::INFINITY);
        assert!((r.value - 1.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn gaussian_on_real_line() {
        let r = quad(|x| (-x * x / 4.0).exp(), f64::NEG_INFINITY, f64::INFINITY);
        assert!((r.value - 3.544_907_701_8).abs() < 1e-9, "{r:?}");
        assert!((r.value - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn cubic_moment_is_eight() {
        // 2^3 Γ(2) = 8
        let r = quad(|z| z.powi(3) * (-z * z / 4.0).exp(), 0.0, f64::INFINITY);
        assert!((r.value - 8.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn lower_infinite_mirror() {
        let r = quad(|x| x.exp(), f64::NEG_INFINITY, 0.0);
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn endpoint_algebraic_singularity() {
        let r = quad(|x| 1.0 / x.sqrt(), 0.0, 1.0);
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn subdivision_budget_reports_failure() {
        let opts = QuadOptions {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_subdivisions: 3,
        };
        let err = adaptive_quad_with(|x| (50.0 * x).sin().abs(), Interval::new(0.0, 10.0).unwrap(), &opts)
            .unwrap_err();
        match err {
            FpeError::QuadratureFailure { estimate, .. } => assert!(estimate.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nonfinite_integrand_is_reported() {
        let err = quad_err(|x| if x > 0.5 { f64::NAN } else { 1.0 });
        assert!(matches!(err, FpeError::NonFiniteIntegrand { .. }));
    }

    fn quad_err(f: impl Fn(f64) -> f64) -> FpeError {
        adaptive_quad(f, Interval::new(0.0, 1.0).unwrap(), 1e-10, 1e-12).unwrap_err()
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(f64::INFINITY, f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn additive_over_adjacent_intervals(
            c0 in -2.0f64..2.0, c1 in -2.0f64..2.0, w in 0.2f64..3.0,
            a in -3.0f64..0.0, db in 0.1f64..3.0, dc in 0.1f64..3.0,
        ) {
            let f = move |x: f64| c0 + c1 * (w * x).sin() + (-x * x).exp();
            let b = a + db;
            let c = b + dc;
            let ab = quad(f, a, b);
            let bc = quad(f, b, c);
            let ac = quad(f, a, c);
            let bound = 2.0 * (ab.abs_error_estimate + bc.abs_error_estimate + ac.abs_error_estimate)
                + 4.0 * f64::EPSILON * ac.value.abs().max(1.0);
            prop_assert!((ab.value + bc.value - ac.value).abs() <= bound);
        }
    }
}
