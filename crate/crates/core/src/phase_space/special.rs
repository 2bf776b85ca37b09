//! Laguerre polynomials and log-factorials.

/// Laguerre polynomial `L_n(t)` by the three-term recurrence.
pub fn laguerre(n: usize, t: f64) -> f64 {
    assoc_laguerre(n, 0.0, t)
}

/// Associated Laguerre polynomial `L_n^{(alpha)}(t)`.
pub fn assoc_laguerre(n: usize, alpha: f64, t: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - t;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - t) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_0^{(alpha)}(t), …, L_{len-1}^{(alpha)}(t)`.
pub fn assoc_laguerre_sequence(len: usize, alpha: f64, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(1.0);
    if len == 1 {
        return out;
    }
    out.push(1.0 + alpha - t);
    for k in 1..len - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - t) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `ln k!` for `k = 0..len`.
pub fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for k in 0..len {
        if k > 1 {
            acc += (k as f64).ln();
        }
        out.push(acc);
    }
    out
}

pub fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}
