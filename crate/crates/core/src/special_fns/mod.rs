//! Special functions needed by the closed-form distribution.
//!
//! Whittaker functions are reduced to the confluent hypergeometric kernels:
//!
//! ```text
//! M_{a,b}(z) = e^{-z/2} z^{b+1/2} M(b-a+1/2; 1+2b; z)
//! W_{a,b}(z) = e^{-z/2} z^{b+1/2} U(b-a+1/2; 1+2b; z)
//! ```
//!
//! Every evaluation returns an [`EvalResult`] carrying its own relative
//! error estimate and the route that produced it.

mod bessel;
mod gamma;
mod kummer;
mod tricomi;
mod whittaker;

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_i, bessel_k};
pub use gamma::{cos_pi, digamma, gamma, rgamma, sin_pi, EULER_GAMMA};
pub use kummer::kummer_m;
pub use tricomi::tricomi_u;
pub use whittaker::{
    whittaker_m, whittaker_m_bessel, whittaker_m_reflected, whittaker_m_value, whittaker_w,
    whittaker_w_bessel, whittaker_w_value, WhittakerParams,
};

/// How a value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Convergent power series (Kummer series, or the two-term Kummer
    /// combination for Tricomi `U`).
    Series,
    /// Large-argument asymptotic expansion of `U`.
    Asymptotic,
    /// Modified Bessel identities for `M_{0,b}` and `W_{0,b}`.
    BesselRoute,
    /// Logarithmic series for `U` with integer second parameter.
    LogCase,
    /// Laplace integral of `U` by double-exponential quadrature.
    LaplaceIntegral,
}

/// A function value with an estimated relative error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub est_rel_error: f64,
    pub method: Method,
}

impl EvalResult {
    pub(crate) fn new(value: f64, abs_error: f64, method: Method) -> Self {
        let est_rel_error = if value != 0.0 {
            (abs_error / value.abs()).min(f64::MAX)
        } else {
            f64::MAX
        };
        EvalResult {
            value,
            est_rel_error,
            method,
        }
    }

    /// Absolute error implied by the relative estimate.
    pub fn abs_error(&self) -> f64 {
        self.est_rel_error * self.value.abs()
    }
}
