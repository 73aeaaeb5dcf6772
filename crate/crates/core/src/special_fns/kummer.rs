use super::{EvalResult, Method};
use crate::error::{Error, Result};

const MAX_TERMS: usize = 5_000;

/// Kummer's confluent hypergeometric function `M(α; β; z) = ₁F₁(α; β; z)`
/// by direct summation of the defining series.
///
/// The error estimate combines a running rounding bound
/// (`ε · (2n + 4) · Σ|tₖ|`) with a geometric bound on the truncated tail.
pub fn kummer_m(alpha: f64, beta: f64, z: f64) -> Result<EvalResult> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("kummer_m needs z >= 0, got {z}")));
    }
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Parameter(
            "kummer_m parameters must be finite".into(),
        ));
    }
    if beta <= 0.0 && beta == beta.floor() {
        return Err(Error::Parameter(format!(
            "kummer_m second parameter {beta} is a nonpositive integer"
        )));
    }

    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut abs_sum = 1.0_f64;
    let mut tail = 0.0;
    let mut n = 0usize;
    // ratios may dip near zero while n < -alpha, so only stop past that point
    let min_n = if alpha < 0.0 {
        (-alpha).ceil() as usize + 2
    } else {
        1
    };
    loop {
        let nf = n as f64;
        let ratio = (alpha + nf) / (beta + nf) * z / (nf + 1.0);
        term *= ratio;
        sum += term;
        abs_sum += term.abs();
        n += 1;
        if term == 0.0 {
            break;
        }
        if n >= min_n && ratio.abs() < 0.5 && term.abs() <= 1e-17 * abs_sum {
            tail = term.abs() * ratio.abs() / (1.0 - ratio.abs());
            break;
        }
        if n >= MAX_TERMS || !sum.is_finite() {
            return Err(Error::NonConvergence(format!(
                "kummer_m({alpha}, {beta}, {z}) after {n} terms"
            )));
        }
    }
    let abs_err = f64::EPSILON * (2 * n + 4) as f64 * abs_sum + tail;
    Ok(EvalResult::new(sum, abs_err, Method::Series))
}
