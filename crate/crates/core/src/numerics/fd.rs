//! Central five-point finite-difference stencils.

/// First and second derivatives of `f` at `x`, both `O(h^4)`.
pub fn fd_derivatives<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> (f64, f64) {
    let fm2 = f(x - 2.0 * h);
    let fm1 = f(x - h);
    let f0 = f(x);
    let fp1 = f(x + h);
    let fp2 = f(x + 2.0 * h);
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    (d1, d2)
}

pub fn fd_first<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_at_origin() {
        let (d1, d2) = fd_derivatives(f64::sin, 0.0, 1e-2);
        assert!((d1 - 1.0).abs() < 1e-8);
        assert!(d2.abs() < 1e-12);
    }

    #[test]
    fn quadratic_second_derivative_is_exact() {
        for x in [-3.0, 0.0, 0.7, 11.0] {
            let (_, d2) = fd_derivatives(|x| x * x, x, 1e-2);
            assert!((d2 - 2.0).abs() < 1e-8 * (1.0 + x * x), "{x}: {d2}");
        }
    }

    #[test]
    fn exponential() {
        let (d1, d2) = fd_derivatives(f64::exp, 1.0, 1e-2);
        let e = std::f64::consts::E;
        assert!((d1 - e).abs() < 1e-8);
        assert!((d2 - e).abs() < 1e-7);
    }

    #[test]
    fn observed_order_exceeds_three_and_a_half() {
        let hs = [1e-1, 5e-2, 2.5e-2];
        let cases: [(fn(f64) -> f64, fn(f64) -> f64, fn(f64) -> f64, f64); 2] = [
            (f64::sin, f64::cos, |x: f64| -x.sin(), 0.9),
            (|x: f64| (0.5 * x).exp(), |x: f64| 0.5 * (0.5 * x).exp(), |x: f64| 0.25 * (0.5 * x).exp(), 1.3),
        ];
        for (f, df, d2f, x) in cases {
            let e1: Vec<f64> = hs.iter().map(|&h| (fd_derivatives(f, x, h).0 - df(x)).abs()).collect();
            let e2: Vec<f64> = hs.iter().map(|&h| (fd_derivatives(f, x, h).1 - d2f(x)).abs()).collect();
            for e in [e1, e2] {
                let order = (e[0] / e[2]).ln() / (hs[0] / hs[2]).ln();
                assert!(order >= 3.5, "order {order} from {e:?}");
            }
        }
    }
}
