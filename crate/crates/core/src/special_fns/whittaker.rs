use serde::{Deserialize, Serialize};

use super::bessel::{bessel_i, bessel_k};
use super::gamma::gamma;
use super::kummer::kummer_m;
use super::tricomi::tricomi_u;
use super::{EvalResult, Method};
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

/// Index pair `(a, b)` and argument `z` of a Whittaker function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhittakerParams {
    pub a: f64,
    pub b: f64,
    pub z: f64,
}

impl WhittakerParams {
    pub fn new(a: f64, b: f64, z: f64) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::Domain(format!(
                "Whittaker argument must be positive, got {z}"
            )));
        }
        if !(b >= 0.0) || !b.is_finite() || !a.is_finite() {
            return Err(Error::Domain(format!(
                "Whittaker indices must be finite with b >= 0, got a = {a}, b = {b}"
            )));
        }
        Ok(WhittakerParams { a, b, z })
    }
}

/// `e^{-z/2} z^{c}` evaluated in log space.
#[inline]
fn prefactor(c: f64, z: f64) -> f64 {
    (c * z.ln() - 0.5 * z).exp()
}

fn scaled(kernel: EvalResult, pref: f64) -> EvalResult {
    let value = kernel.value * pref;
    EvalResult::new(
        value,
        kernel.abs_error() * pref + 4.0 * EPS * value.abs(),
        kernel.method,
    )
}

/// Whittaker `M_{a,b}(z) = e^{-z/2} z^{b+1/2} M(b-a+1/2; 1+2b; z)`.
pub fn whittaker_m(p: WhittakerParams) -> Result<EvalResult> {
    let WhittakerParams { a, b, z } = WhittakerParams::new(p.a, p.b, p.z)?;
    let kernel = kummer_m(b - a + 0.5, 1.0 + 2.0 * b, z)?;
    Ok(scaled(kernel, prefactor(b + 0.5, z)))
}

/// Whittaker `W_{a,b}(z) = e^{-z/2} z^{b+1/2} U(b-a+1/2; 1+2b; z)`.
///
/// For non-integer `2b` this agrees with the connection formula
/// `W = Γ(-2b)/Γ(1/2-b-a) M_{a,b} + Γ(2b)/Γ(1/2+b-a) M_{a,-b}`; at `b = 0`
/// the logarithmic route of `U` applies.
pub fn whittaker_w(p: WhittakerParams) -> Result<EvalResult> {
    let WhittakerParams { a, b, z } = WhittakerParams::new(p.a, p.b, p.z)?;
    let kernel = tricomi_u(b - a + 0.5, 1.0 + 2.0 * b, z)?;
    Ok(scaled(kernel, prefactor(b + 0.5, z)))
}

/// `M_{a,-b}(z)`, the second solution appearing in the connection formula.
/// Requires `0 ≤ b < 1/2`.
pub fn whittaker_m_reflected(a: f64, b: f64, z: f64) -> Result<EvalResult> {
    if !(0.0..0.5).contains(&b) {
        return Err(Error::Domain(format!(
            "reflected index needs 0 <= b < 1/2, got {b}"
        )));
    }
    WhittakerParams::new(a, b, z)?;
    let kernel = kummer_m(0.5 - b - a, 1.0 - 2.0 * b, z)?;
    Ok(scaled(kernel, prefactor(0.5 - b, z)))
}

/// `M_{0,b}(z) = 4^b Γ(1+b) √z I_b(z/2)`.
pub fn whittaker_m_bessel(b: f64, z: f64) -> Result<EvalResult> {
    WhittakerParams::new(0.0, b, z)?;
    let value = 4f64.powf(b) * gamma(1.0 + b)? * z.sqrt() * bessel_i(b, 0.5 * z)?;
    Ok(EvalResult::new(
        value,
        64.0 * EPS * value.abs(),
        Method::BesselRoute,
    ))
}

/// `W_{0,b}(z) = √(z/π) K_b(z/2)`.
pub fn whittaker_w_bessel(b: f64, z: f64) -> Result<EvalResult> {
    WhittakerParams::new(0.0, b, z)?;
    let value = (z / std::f64::consts::PI).sqrt() * bessel_k(b, 0.5 * z)?;
    Ok(EvalResult::new(
        value,
        64.0 * EPS * value.abs(),
        Method::BesselRoute,
    ))
}

/// Value-only shorthand for [`whittaker_m`].
pub fn whittaker_m_value(a: f64, b: f64, z: f64) -> Result<f64> {
    whittaker_m(WhittakerParams { a, b, z }).map(|r| r.value)
}

/// Value-only shorthand for [`whittaker_w`].
pub fn whittaker_w_value(a: f64, b: f64, z: f64) -> Result<f64> {
    whittaker_w(WhittakerParams { a, b, z }).map(|r| r.value)
}
