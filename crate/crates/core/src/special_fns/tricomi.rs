//! Tricomi's confluent hypergeometric function `U(α; β; z)`.
//!
//! Route selection, in order:
//!
//! 1. `α ∈ {0, -1, -2, ...}`: terminating polynomial.
//! 2. `z > 30`: asymptotic `₂F₀` expansion, accepted when its smallest term
//!    meets the error target.
//! 3. Integer `β`: logarithmic series. Non-integer `β`: the two-term Kummer
//!    combination `Γ(1-β)/Γ(α-β+1) M(α;β;z) + Γ(β-1)/Γ(α) z^{1-β} M(α-β+1;2-β;z)`.
//! 4. If the series route cancels by more than six digits, or its estimate
//!    misses [`SERIES_TARGET`], the Laplace integral
//!    `Γ(α)⁻¹ ∫₀^∞ e^{-zt} t^{α-1} (1+t)^{β-α-1} dt` is evaluated by
//!    double-exponential quadrature, after shifting `α` to a positive value
//!    with the contiguous recurrence when needed.

use std::f64::consts::FRAC_PI_2;

use super::gamma::{digamma, gamma, rgamma, EULER_GAMMA};
use super::kummer::kummer_m;
use super::{EvalResult, Method};
use crate::error::{Error, Result};

const ASYMPTOTIC_Z: f64 = 30.0;
const MAX_CANCELLATION: f64 = 1e6;
const SERIES_TARGET: f64 = 1e-12;
const ASYMPTOTIC_TARGET: f64 = 1e-13;
const EPS: f64 = f64::EPSILON;

/// Tricomi `U(α; β; z)` for real parameters and `z > 0`.
pub fn tricomi_u(alpha: f64, beta: f64, z: f64) -> Result<EvalResult> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("tricomi_u needs z > 0, got {z}")));
    }
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Parameter(
            "tricomi_u parameters must be finite".into(),
        ));
    }
    if alpha <= 0.0 && alpha == alpha.floor() {
        return Ok(polynomial(-alpha as u32, beta, z));
    }
    if z > ASYMPTOTIC_Z {
        if let Some(r) = asymptotic(alpha, beta, z) {
            if r.est_rel_error <= ASYMPTOTIC_TARGET {
                return Ok(r);
            }
        }
    }
    let series = if beta == beta.round() {
        log_case(alpha, beta, z)
    } else {
        two_term(alpha, beta, z)
    };
    match series {
        Ok((r, loss)) if loss <= MAX_CANCELLATION && r.est_rel_error <= SERIES_TARGET => Ok(r),
        _ => laplace_route(alpha, beta, z),
    }
}

/// `U(-m; β; z) = (-1)^m Σ_s C(m,s) (β+s)_{m-s} (-z)^s`.
fn polynomial(m: u32, beta: f64, z: f64) -> EvalResult {
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for s in 0..=m {
        let mut binom = 1.0;
        for k in 0..s {
            binom *= (m - k) as f64 / (k + 1) as f64;
        }
        let mut poch = 1.0;
        for k in 0..(m - s) {
            poch *= beta + s as f64 + k as f64;
        }
        let t = binom * poch * (-z).powi(s as i32);
        sum += t;
        abs_sum += t.abs();
    }
    if m % 2 == 1 {
        sum = -sum;
    }
    EvalResult::new(sum, EPS * (2 * m + 4) as f64 * abs_sum, Method::Series)
}

fn asymptotic(alpha: f64, beta: f64, z: f64) -> Option<EvalResult> {
    let c = alpha - beta + 1.0;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut abs_sum = 1.0_f64;
    let mut omitted = f64::INFINITY;
    for n in 0..400 {
        let nf = n as f64;
        let next = -term * (alpha + nf) * (c + nf) / ((nf + 1.0) * z);
        if next == 0.0 {
            omitted = 0.0;
            break;
        }
        if next.abs() >= term.abs() {
            omitted = term.abs();
            break;
        }
        term = next;
        sum += term;
        abs_sum += term.abs();
        if term.abs() < 0.25 * EPS * sum.abs() {
            omitted = term.abs();
            break;
        }
    }
    if !omitted.is_finite() {
        return None;
    }
    let scale = (-alpha * z.ln()).exp();
    let abs_err = (omitted + EPS * 8.0 * abs_sum) * scale;
    Some(EvalResult::new(sum * scale, abs_err, Method::Asymptotic))
}

/// Two-term Kummer combination for non-integer `β`. Returns the result and
/// the cancellation factor `(|t₁|+|t₂|)/|t₁+t₂|`.
fn two_term(alpha: f64, beta: f64, z: f64) -> Result<(EvalResult, f64)> {
    let c1 = gamma(1.0 - beta)? * rgamma(alpha - beta + 1.0);
    let c2 = gamma(beta - 1.0)? * rgamma(alpha);
    let m1 = kummer_m(alpha, beta, z)?;
    let m2 = kummer_m(alpha - beta + 1.0, 2.0 - beta, z)?;
    let t1 = c1 * m1.value;
    let t2 = c2 * (-(beta - 1.0) * z.ln()).exp() * m2.value;
    let value = t1 + t2;
    let mag = t1.abs() + t2.abs();
    let loss = if value != 0.0 {
        mag / value.abs()
    } else {
        f64::INFINITY
    };
    let abs_err = t1.abs() * (m1.est_rel_error + 24.0 * EPS)
        + t2.abs() * (m2.est_rel_error + 24.0 * EPS)
        + EPS * mag;
    Ok((EvalResult::new(value, abs_err, Method::Series), loss))
}

/// Logarithmic series for integer `β`:
///
/// ```text
/// U(α; n+1; z) = (-1)^{n+1}/(n! Γ(α-n)) Σ_k (α)_k z^k / ((n+1)_k k!)
///                    · [ln z + ψ(α+k) - ψ(1+k) - ψ(n+k+1)]
///              + Γ(α)⁻¹ Σ_{k=1}^{n} (k-1)! (1-α+k)_{n-k} / (n-k)! z^{-k}
/// ```
///
/// `β ≤ 0` is first mapped through `U(α;β;z) = z^{1-β} U(α-β+1; 2-β; z)`.
fn log_case(alpha: f64, beta: f64, z: f64) -> Result<(EvalResult, f64)> {
    if beta < 1.0 {
        let (r, loss) = log_case(alpha - beta + 1.0, 2.0 - beta, z)?;
        let scale = ((1.0 - beta) * z.ln()).exp();
        let value = r.value * scale;
        return Ok((
            EvalResult::new(
                value,
                r.abs_error() * scale + 4.0 * EPS * value.abs(),
                r.method,
            ),
            loss,
        ));
    }
    let n = (beta - 1.0).round() as usize;
    let nf = n as f64;
    let mut factorial_n = 1.0;
    for k in 1..=n {
        factorial_n *= k as f64;
    }
    let sign = if (n + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let pref = sign * rgamma(alpha - nf) / factorial_n;

    let mut total = 0.0;
    let mut abs_total = 0.0;
    let mut n_terms = 0usize;

    if pref != 0.0 {
        let ln_z = z.ln();
        let mut psi_a = digamma(alpha)?;
        // ψ(1+k) = -γ + H_k,  ψ(n+k+1) = -γ + H_{n+k}
        let mut h_k = 0.0;
        let mut h_nk: f64 = (1..=n).map(|j| 1.0 / j as f64).sum();
        let mut t = 1.0_f64;
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        let min_k = if alpha < 0.0 {
            (-alpha).ceil() as usize + 2
        } else {
            1
        };
        let mut k = 0usize;
        loop {
            let bracket = ln_z + psi_a + 2.0 * EULER_GAMMA - h_k - h_nk;
            let contrib = t * bracket;
            sum += contrib;
            abs_sum += t.abs() * (ln_z.abs() + psi_a.abs() + h_k + h_nk + 2.0 * EULER_GAMMA);
            let kf = k as f64;
            let ratio = (alpha + kf) * z / ((nf + 1.0 + kf) * (kf + 1.0));
            psi_a += 1.0 / (alpha + kf);
            h_k += 1.0 / (kf + 1.0);
            h_nk += 1.0 / (nf + kf + 1.0);
            t *= ratio;
            k += 1;
            if t == 0.0 {
                break;
            }
            if k >= min_k && ratio.abs() < 0.5 && (t * bracket).abs() <= 1e-17 * abs_sum {
                break;
            }
            if k > 5_000 || !sum.is_finite() {
                return Err(Error::NonConvergence(format!(
                    "log-case U({alpha}, {beta}, {z})"
                )));
            }
        }
        n_terms += k;
        total += pref * sum;
        abs_total += pref.abs() * abs_sum;
    }

    if n > 0 {
        let ra = rgamma(alpha);
        let mut fin = 0.0;
        let mut fin_abs = 0.0;
        let mut fact_km1 = 1.0; // (k-1)!
        for k in 1..=n {
            if k > 1 {
                fact_km1 *= (k - 1) as f64;
            }
            let mut poch = 1.0;
            for j in 0..(n - k) {
                poch *= 1.0 - alpha + k as f64 + j as f64;
            }
            let mut fact_nk = 1.0;
            for j in 1..=(n - k) {
                fact_nk *= j as f64;
            }
            let t = fact_km1 * poch / fact_nk * z.powi(-(k as i32));
            fin += t;
            fin_abs += t.abs();
        }
        total += ra * fin;
        abs_total += (ra * fin_abs).abs();
        n_terms += n;
    }

    let loss = if total != 0.0 {
        abs_total / total.abs()
    } else {
        f64::INFINITY
    };
    let abs_err = EPS * (4 * n_terms + 32) as f64 * abs_total;
    Ok((EvalResult::new(total, abs_err, Method::LogCase), loss))
}

/// Laplace-integral route; shifts `α` into `(0, ∞)` with
/// `U(a-1) = (2a - β + z) U(a) - a (a - β + 1) U(a+1)`.
fn laplace_route(alpha: f64, beta: f64, z: f64) -> Result<EvalResult> {
    if alpha > 0.0 {
        let (v, e) = laplace_integral(alpha, beta, z)?;
        return Ok(EvalResult::new(v, e, Method::LaplaceIntegral));
    }
    let shift = (-alpha).floor() as usize + 1;
    let top = alpha + shift as f64;
    let (mut u1, mut e1) = laplace_integral(top, beta, z)?; // U(top)
    let (mut u2, mut e2) = laplace_integral(top + 1.0, beta, z)?; // U(top+1)
    let mut a = top;
    for _ in 0..shift {
        let c1 = 2.0 * a - beta + z;
        let c2 = a * (a - beta + 1.0);
        let u0 = c1 * u1 - c2 * u2;
        let e0 = c1.abs() * e1 + c2.abs() * e2 + EPS * (c1 * u1).abs().max((c2 * u2).abs());
        u2 = u1;
        e2 = e1;
        u1 = u0;
        e1 = e0;
        a -= 1.0;
    }
    Ok(EvalResult::new(u1, e1, Method::LaplaceIntegral))
}

/// `U(α;β;z)` for `α > 0` via `t = exp(π/2 · sinh τ)` and the trapezoid rule
/// in `τ`, halving the step until successive sums agree.
fn laplace_integral(alpha: f64, beta: f64, z: f64) -> Result<(f64, f64)> {
    debug_assert!(alpha > 0.0);
    let c = beta - alpha - 1.0;
    let log_g = |tau: f64| -> f64 {
        let w = FRAC_PI_2 * tau.sinh();
        let t = w.exp();
        let ln1pt = if w > 0.0 {
            w + (-w).exp().ln_1p()
        } else {
            t.ln_1p()
        };
        -z * t + alpha * w + c * ln1pt + (FRAC_PI_2 * tau.cosh()).ln()
    };

    // locate the support at the coarse step
    const H0: f64 = 0.5;
    const TAU_MAX: f64 = 7.0;
    const DROP: f64 = 42.0;
    let mut max_log = log_g(0.0);
    let mut hi = 0.0;
    let mut prev = max_log;
    loop {
        let tau = hi + H0;
        if tau > TAU_MAX {
            break;
        }
        let v = log_g(tau);
        max_log = max_log.max(v);
        hi = tau;
        if v < max_log - DROP && v < prev {
            break;
        }
        prev = v;
    }
    let mut lo = 0.0;
    prev = log_g(0.0);
    loop {
        let tau = lo - H0;
        if tau < -TAU_MAX {
            break;
        }
        let v = log_g(tau);
        max_log = max_log.max(v);
        lo = tau;
        if v < max_log - DROP && v < prev {
            break;
        }
        prev = v;
    }
    // rescale by the peak so the sum stays in range
    let g = |tau: f64| (log_g(tau) - max_log).exp();

    let n0 = ((hi - lo) / H0).round() as usize;
    let mut h = H0;
    let mut sum: f64 = (0..=n0).map(|k| g(lo + k as f64 * H0)).sum::<f64>() * h;
    let mut diff = f64::INFINITY;
    let mut n = n0;
    for level in 1..=11 {
        let h_new = h / 2.0;
        let odd: f64 = (0..n).map(|k| g(lo + (2 * k + 1) as f64 * h_new)).sum();
        let new_sum = 0.5 * sum + h_new * odd;
        diff = (new_sum - sum).abs();
        sum = new_sum;
        h = h_new;
        n *= 2;
        if level >= 3 && diff <= 1e-15 * sum.abs() {
            break;
        }
    }
    if !(diff <= 1e-10 * sum.abs()) {
        return Err(Error::NonConvergence(format!(
            "Laplace integral for U({alpha}, {beta}, {z})"
        )));
    }
    let scale = max_log.exp() * rgamma(alpha);
    let value = sum * scale;
    let abs_err = (diff + 32.0 * EPS * sum.abs()) * scale.abs();
    Ok((value, abs_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(tricomi_u(0.0, 2.0, 3.0).unwrap().value, 1.0);
        let r = tricomi_u(1.0, 2.0, 4.0).unwrap();
        assert!(rel(r.value, 0.25) < 1e-14, "{r:?}");
        // U(α; α+1; z) = z^{-α}
        for &(a, z) in &[(0.3, 0.7), (0.75, 5.0), (1.4, 18.0), (0.5, 35.0)] {
            let r = tricomi_u(a, a + 1.0, z).unwrap();
            assert!(rel(r.value, z.powf(-a)) < 1e-11, "{a} {z}: {r:?}");
        }
    }

    #[test]
    fn polynomial_case() {
        // U(-1; β; z) = z - β
        let r = tricomi_u(-1.0, 1.5, 4.0).unwrap();
        assert!((r.value - 2.5).abs() < 1e-14);
    }

    #[test]
    fn routes_agree_where_they_overlap() {
        for &(a, b) in &[
            (0.6, 1.3),
            (-0.35, 1.3),
            (0.5, 1.0),
            (-0.5, 1.0),
            (1.2, 1.9),
        ] {
            for &z in &[0.3, 2.0, 6.0] {
                let series = if b == 1.0 {
                    log_case(a, b, z).unwrap().0
                } else {
                    two_term(a, b, z).unwrap().0
                };
                let integral = laplace_route(a, b, z).unwrap();
                let tol =
                    (series.abs_error() + integral.abs_error()).max(1e-13 * integral.value.abs());
                assert!((series.value - integral.value).abs() <= tol, "{a} {b} {z}");
                assert!(integral.est_rel_error < 1e-13);
            }
        }
    }

    #[test]
    fn asymptotic_matches_integral_for_large_z() {
        for &(a, b) in &[(0.6, 1.3), (-0.35, 1.3), (0.5, 1.0)] {
            let asym = asymptotic(a, b, 40.0).unwrap();
            let integral = laplace_route(a, b, 40.0).unwrap();
            assert!(rel(asym.value, integral.value) < 1e-13);
        }
    }

    #[test]
    fn recurrence_in_first_parameter() {
        // U(a-1) + (β-2a-z) U(a) + a(a-β+1) U(a+1) = 0 across routes
        for &(a, b, z) in &[(0.4, 1.6, 0.5), (0.25, 1.0, 3.0), (0.9, 1.45, 15.0)] {
            let u0 = tricomi_u(a - 1.0, b, z).unwrap().value;
            let u1 = tricomi_u(a, b, z).unwrap().value;
            let u2 = tricomi_u(a + 1.0, b, z).unwrap().value;
            let terms = [u0, (b - 2.0 * a - z) * u1, a * (a - b + 1.0) * u2];
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            let res: f64 = terms.iter().sum();
            assert!(res.abs() < 1e-11 * scale, "{a} {b} {z}: {res}");
        }
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(matches!(tricomi_u(0.5, 1.0, 0.0), Err(Error::Domain(_))));
    }
}
