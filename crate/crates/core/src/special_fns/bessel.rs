//! Modified Bessel functions `I_ν` and `K_ν` of real order.

use super::gamma::rgamma;
use crate::error::{Error, Result};

/// `I_ν(x) = Σ_k (x/2)^{2k+ν} / (k! Γ(k+ν+1))` for `x ≥ 0`, `ν ≥ 0`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !(nu >= 0.0) {
        return Err(Error::Domain(format!("bessel_i({nu}, {x})")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = (nu * half.ln()).exp() * rgamma(nu + 1.0);
    let mut sum = term;
    for k in 0..10_000 {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + 1.0 + nu));
        sum += term;
        if term <= 1e-17 * sum && kf + 1.0 > half {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!("bessel_i({nu}, {x})")))
}

/// `K_ν(x) = ∫₀^∞ e^{-x cosh t} cosh(νt) dt` for `x > 0`, by the trapezoid
/// rule, which converges geometrically for this integrand.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k needs x > 0, got {x}")));
    }
    let nu = nu.abs();
    // work with e^{x} K_ν(x) to keep the sum O(1)
    let g = |t: f64| (-x * (t.cosh() - 1.0) + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
    // upper limit where the integrand is below 1e-20 of its peak
    let mut t_max: f64 = 1.0;
    let peak = if nu > x { (nu / x).asinh() } else { 0.0 };
    let g_peak = g(peak);
    while g(t_max.max(peak)) > 1e-20 * g_peak || t_max < peak {
        t_max *= 1.5;
        if t_max > 1e3 {
            return Err(Error::NonConvergence(format!("bessel_k({nu}, {x})")));
        }
    }
    let mut h = t_max / 16.0;
    let mut n = 16usize;
    let mut sum = h * (0.5 * g(0.0) + (1..=n).map(|k| g(k as f64 * h)).sum::<f64>());
    for _ in 0..14 {
        let h_new = h / 2.0;
        let odd: f64 = (0..n).map(|k| g((2 * k + 1) as f64 * h_new)).sum();
        let new_sum = 0.5 * sum + h_new * odd;
        let diff = (new_sum - sum).abs();
        sum = new_sum;
        h = h_new;
        n *= 2;
        if diff <= 2e-15 * sum {
            return Ok(sum * (-x).exp());
        }
    }
    Err(Error::NonConvergence(format!("bessel_k({nu}, {x})")))
}
