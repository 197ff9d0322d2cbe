//! Classical Laguerre and Jacobi polynomials by three-term recurrence.

/// `L_n^{(a)}(x)`.
pub fn laguerre(n: u32, a: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, 1.0 + a - x);
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `d^m/dx^m L_n^{(a)}(x) = (−1)^m L_{n−m}^{(a+m)}(x)`.
pub fn laguerre_deriv(m: u32, n: u32, a: f64, x: f64) -> f64 {
    if m > n {
        return 0.0;
    }
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * laguerre(n - m, a + m as f64, x)
}

/// `P_n^{(a,b)}(x)`. Falls back to the explicit hypergeometric sum when a
/// recurrence denominator vanishes, which happens for the negative
/// parameters used by deforming functions.
pub fn jacobi(n: u32, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    if n == 1 {
        return p1;
    }
    let ab = a + b;
    let (mut prev, mut cur) = (1.0, p1);
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let denom = 2.0 * k * (k + ab) * (c - 2.0);
        if denom.abs() < 1e-12 {
            return jacobi_explicit(n, a, b, x);
        }
        let next = ((c - 1.0) * (c * (c - 2.0) * x + a * a - b * b) * cur
            - 2.0 * (k + a - 1.0) * (k + b - 1.0) * c * prev)
            / denom;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Σ_k (−n)_k (n+a+b+1)_k (a+k+1)_{n−k} / (n! k!) ((1−x)/2)^k`.
pub fn jacobi_explicit(n: u32, a: f64, b: f64, x: f64) -> f64 {
    let nf = n as f64;
    let s = 0.5 * (1.0 - x);
    let n_fact: f64 = (1..=n).map(|i| i as f64).product();
    let mut total = 0.0;
    for k in 0..=n {
        let kf = k as f64;
        let mut term = 1.0;
        for j in 0..k {
            let j = j as f64;
            term *= (-nf + j) * (nf + a + b + 1.0 + j) / (j + 1.0);
        }
        for j in 0..(n - k) {
            term *= a + kf + 1.0 + j as f64;
        }
        total += term * s.powi(k as i32);
    }
    total / n_fact
}

/// `d^m/dx^m P_n^{(a,b)}(x) = Π_{j=1}^m (n+a+b+j) / 2^m · P_{n−m}^{(a+m,b+m)}(x)`.
pub fn jacobi_deriv(m: u32, n: u32, a: f64, b: f64, x: f64) -> f64 {
    if m > n {
        return 0.0;
    }
    let nf = n as f64;
    let factor: f64 = (1..=m).map(|j| 0.5 * (nf + a + b + j as f64)).product();
    let mf = m as f64;
    factor * jacobi(n - m, a + mf, b + mf, x)
}
