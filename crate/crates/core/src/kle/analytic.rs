//! Closed-form KL eigenvalues of the 1D exponential kernel
//! `σ² exp(−|x − y| / d)` on `[−a/2, a/2]`.
//!
//! With `c = 1/d` and `L = a/2`, the frequencies `ω` solve
//! `c − ω tan(ωL) = 0` (even modes, `ωL ∈ (nπ, nπ + π/2)`) or
//! `ω + c tan(ωL) = 0` (odd modes, `ωL ∈ (nπ − π/2, nπ)`), and
//! `λ = 2dσ² / (1 + d²ω²)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::{Error, Result};

/// The `count` largest eigenvalues, in decreasing order.
pub fn analytic_eigenvalues_1d(sigma: f64, d: f64, a: f64, count: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && d > 0.0) {
        return Err(Error::Config(format!("need a > 0 and d > 0, got a = {a}, d = {d}")));
    }
    let c = 1.0 / d;
    let half = 0.5 * a;
    let even = |w: f64| c * (w * half).cos() - w * (w * half).sin();
    let odd = |w: f64| w * (w * half).cos() + c * (w * half).sin();

    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let n = (k / 2) as f64;
        let omega = if k % 2 == 0 {
            bisect(even, n * PI / half, (n * PI + FRAC_PI_2) / half)?
        } else {
            bisect(odd, ((n + 1.0) * PI - FRAC_PI_2) / half, (n + 1.0) * PI / half)?
        };
        out.push(2.0 * d * sigma * sigma / (1.0 + d * d * omega * omega));
    }
    Ok(out)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Solver(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * mid.max(1.0) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strictly_decreasing() {
        let l = analytic_eigenvalues_1d(1.0, 0.7, 2.0, 40).unwrap();
        assert!(l.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn partial_sums_approach_trace() {
        let (sigma, a) = (1.5, 1.0);
        let l = analytic_eigenvalues_1d(sigma, 0.4, a, 200).unwrap();
        let s: f64 = l.iter().sum();
        let trace = sigma * sigma * a;
        assert!(s < trace);
        assert!((trace - s) / trace < 0.01, "partial sum {s}, trace {trace}");
    }

    #[test]
    fn roots_satisfy_transcendental_equations() {
        // invert λ → ω and plug back in
        let (d, a) = (0.5, 1.0);
        let l = analytic_eigenvalues_1d(1.0, d, a, 6).unwrap();
        for (k, lam) in l.iter().enumerate() {
            let w = ((2.0 * d / lam - 1.0) / (d * d)).sqrt();
            let r = if k % 2 == 0 {
                1.0 / d - w * (w * a / 2.0).tan()
            } else {
                w + (w * a / 2.0).tan() / d
            };
            assert!(r.abs() < 1e-6 * (1.0 + w), "mode {k}: residual {r}");
        }
    }
}
