//! Closed-form quasi-stationary distribution of the Shiryaev martingale
//! `dX_t = dt + X_t dB_t` killed on first reaching a lower level `A > 0`.
//!
//! The crate is layered bottom-up:
//!
//! - [`special_fns`]: Gamma, Kummer `M`, Tricomi `U`, Whittaker `M`/`W` and
//!   the modified Bessel routes, each reporting an error estimate.
//! - [`spectrum`]: the principal eigenvalue `λ_A`, the critical level `A*`
//!   and the `ξ ↔ λ` reparameterisation.
//! - [`qsd`]: density, distribution, quantiles, normaliser, eigenfunction
//!   and the continuum family of quasi-stationary densities.
//! - [`sim`]: Euler–Maruyama simulation of killed paths, KS distance and
//!   killing-rate estimation.
//! - [`oracle`]: independent verification (adaptive quadrature,
//!   double-double series, identity checks) and the validation report.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod oracle;
pub mod qsd;
pub mod roots;
pub mod sim;
pub mod special_fns;
pub mod spectrum;

pub use error::{Error, Result};
pub use qsd::{speed_measure, QsdModel};
pub use spectrum::{critical_threshold, principal_eigenvalue, Regime, SpectralPoint};

/// Library version string echoed into every CLI artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
