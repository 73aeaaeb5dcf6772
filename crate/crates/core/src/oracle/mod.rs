//! Independent verification of the analytic layers.
//!
//! [`quadrature`] and [`hp`] never call the fast kernels they are used to
//! certify; [`checks`] compares the two and collects the results into a
//! [`ValidationReport`].

pub mod checks;
pub mod hp;
pub mod quadrature;

pub use checks::{run_model_suite, run_suite, Check, SuiteOptions, ValidationReport};
pub use quadrature::{integrate_adaptive, Quadrature};

/// Tolerances used by the checks.
pub mod tol {
    /// `|q(A)|` relative to the peak density.
    pub const BOUNDARY: f64 = 1e-10;
    /// `|∫ q − 1|`.
    pub const NORMALIZATION: f64 = 1e-8;
    /// Survival probability beyond the quadrature cutoff.
    pub const TAIL: f64 = 1e-10;
    /// Closed-form distribution function against cumulative quadrature.
    pub const CDF_QUADRATURE: f64 = 1e-8;
    /// Relative mismatch of the differentiated distribution function.
    pub const CDF_DERIVATIVE: f64 = 1e-6;
    /// Forward-equation residual relative to the peak density.
    pub const MASTER_EQUATION: f64 = 1e-6;
    /// Reduced against general expressions.
    pub const THEOREM_VS_GENERAL: f64 = 1e-9;
    /// Simplified against unsimplified normalizer.
    pub const NORMALIZER: f64 = 1e-9;
    /// Connection and simplification identities.
    pub const IDENTITY: f64 = 1e-9;
    /// Integral identities.
    pub const GR_INTEGRAL: f64 = 1e-8;
    /// `|M_{1,ξ_A/2}(2/A)|`.
    pub const EIGEN_RESIDUAL: f64 = 1e-9;
    /// Absolute quadrature tolerance.
    pub const QUADRATURE: f64 = 1e-11;
    /// KS distance of simulated survivors.
    pub const KS: f64 = 0.02;
    /// Relative error of the simulated killing rate.
    pub const KILL_RATE_REL: f64 = 0.15;
}
