//! Principal eigenvalue of the killed generator and the critical level.
//!
//! With `ξ = √(1 − 8λ)` the Dirichlet condition at `A` reads
//! `M_{1,ξ/2}(2/A) = 0`. Below the critical level `A*` this has exactly one
//! root `ξ_A ∈ (0, 1)`; at and above `A*` the principal eigenvalue sits at
//! the spectrum cutoff `1/8`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{brent, brent_with_values};
use crate::special_fns::{kummer_m, whittaker_m_value};

/// Spectrum cutoff.
pub const LAMBDA_CUTOFF: f64 = 0.125;

/// Bracket searched for the critical level.
pub const CRITICAL_BRACKET: (f64, f64) = (1.0, 1.6);

const CRITICAL_XTOL: f64 = 1e-13;
const XI_TOL: f64 = 1e-14;
const XI_EPS: f64 = 1e-9;
const REGIME_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `A < A*`: `λ_A < 1/8`.
    Subcritical,
    /// `A ≥ A*`: `λ_A = 1/8`.
    CriticalOrSupercritical,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::CriticalOrSupercritical => "critical-or-supercritical",
        })
    }
}

/// A solved eigenvalue problem: boundary `A`, `λ_A` and `ξ_A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    #[serde(rename = "A")]
    pub boundary: f64,
    pub lambda: f64,
    pub xi: f64,
    pub regime: Regime,
}

/// `ξ = √(1 − 8λ)` for `λ ∈ (0, 1/8]`.
pub fn xi_of_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= LAMBDA_CUTOFF) {
        return Err(Error::Domain(format!(
            "lambda must lie in (0, 1/8], got {lambda}"
        )));
    }
    Ok((1.0 - 8.0 * lambda).max(0.0).sqrt())
}

/// `λ = (1 − ξ²)/8`, evaluated as `(1 − ξ)(1 + ξ)/8` to keep relative
/// accuracy when `ξ` is close to one.
pub fn lambda_of_xi(xi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::Domain(format!("xi must lie in [0, 1), got {xi}")));
    }
    Ok((1.0 - xi) * (1.0 + xi) / 8.0)
}

/// Left side of the eigenvalue equation, `M_{1,ξ/2}(2/A)`.
pub fn eigen_equation(a: f64, xi: f64) -> Result<f64> {
    check_boundary(a)?;
    whittaker_m_value(1.0, 0.5 * xi, 2.0 / a)
}

/// The Kummer kernel `M(ξ/2 − 1/2; 1 + ξ; 2/A)`, same zeros as
/// [`eigen_equation`] without the exponential prefactor.
fn kernel(a: f64, xi: f64) -> Result<f64> {
    kummer_m(0.5 * xi - 0.5, 1.0 + xi, 2.0 / a).map(|r| r.value)
}

fn check_boundary(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "boundary A must be positive and finite, got {a}"
        )));
    }
    Ok(())
}

fn solve_critical() -> Result<f64> {
    let (lo, hi) = CRITICAL_BRACKET;
    brent(|a| kernel(a, 0.0), lo, hi, CRITICAL_XTOL)
}

/// Critical level `A*`, the root of `M_{1,0}(2/A) = 0`. Computed once.
pub fn critical_threshold() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| {
        solve_critical().expect("critical level bracket must contain a sign change")
    })
}

/// Principal eigenvalue `λ_A` with its regime.
pub fn principal_eigenvalue(a: f64) -> Result<SpectralPoint> {
    check_boundary(a)?;
    let a_star = critical_threshold();
    if a >= a_star * (1.0 - REGIME_RTOL) {
        return Ok(SpectralPoint {
            boundary: a,
            lambda: LAMBDA_CUTOFF,
            xi: 0.0,
            regime: Regime::CriticalOrSupercritical,
        });
    }
    // f(1) = M(0; 2; z) = 1 > 0 and f(0) < 0 below A*
    let hi = 1.0;
    let f_hi = 1.0;
    let mut lo = XI_EPS;
    let mut f_lo = kernel(a, lo)?;
    if f_lo >= 0.0 {
        lo = 0.0;
        f_lo = kernel(a, 0.0)?;
        if f_lo >= 0.0 {
            // numerically at the critical level
            return Ok(SpectralPoint {
                boundary: a,
                lambda: LAMBDA_CUTOFF,
                xi: 0.0,
                regime: Regime::CriticalOrSupercritical,
            });
        }
    }
    let xi = brent_with_values(|x| kernel(a, x), lo, f_lo, hi, f_hi, XI_TOL)?;
    if !(xi < 1.0) {
        return Err(Error::Bracket(format!(
            "eigenvalue root for A = {a} collapsed onto xi = 1"
        )));
    }
    Ok(SpectralPoint {
        boundary: a,
        lambda: (1.0 - xi) * (1.0 + xi) / 8.0,
        xi,
        regime: Regime::Subcritical,
    })
}

/// [`principal_eigenvalue`] over a strictly ascending grid of boundaries.
pub fn eigenvalue_curve(a_grid: &[f64]) -> Result<Vec<SpectralPoint>> {
    if a_grid.is_empty() {
        return Err(Error::Domain("empty boundary grid".into()));
    }
    if a_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "boundary grid must be strictly ascending".into(),
        ));
    }
    a_grid.iter().map(|&a| principal_eigenvalue(a)).collect()
}

/// Number of sign changes of `M_{1,ξ/2}(2/A)` on an `n`-point scan of
/// `ξ ∈ (0, 1)`.
pub fn count_sign_changes(a: f64, n: usize) -> Result<usize> {
    let mut prev: Option<f64> = None;
    let mut changes = 0;
    for i in 0..n {
        let xi = (i as f64 + 0.5) / n as f64;
        let v = eigen_equation(a, xi)?;
        if let Some(p) = prev {
            if p.signum() != v.signum() {
                changes += 1;
            }
        }
        prev = Some(v);
    }
    Ok(changes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn xi_lambda_examples() {
        assert_eq!(xi_of_lambda(0.125).unwrap(), 0.0);
        assert_eq!(xi_of_lambda(0.09375).unwrap(), 0.5);
        assert_eq!(lambda_of_xi(0.0).unwrap(), 0.125);
        assert!(xi_of_lambda(0.0).is_err());
        assert!(xi_of_lambda(0.13).is_err());
        assert!(lambda_of_xi(1.0).is_err());
    }

    #[test]
    fn critical_level() {
        let a_star = critical_threshold();
        assert!((a_star - 1.265_857_361).abs() < 1e-8, "{a_star}");
        assert!(eigen_equation(a_star, 0.0).unwrap().abs() < 1e-12);
        let lo = eigen_equation(CRITICAL_BRACKET.0, 0.0).unwrap();
        let hi = eigen_equation(CRITICAL_BRACKET.1, 0.0).unwrap();
        assert!(lo * hi < 0.0);
    }

    #[test]
    fn supercritical_plateau() {
        for &a in &[critical_threshold(), 1.266, 2.0, 5.0, 10.0, 20.09] {
            let p = principal_eigenvalue(a).unwrap();
            assert_eq!(p.lambda, 0.125);
            assert_eq!(p.regime, Regime::CriticalOrSupercritical);
        }
    }

    #[test]
    fn subcritical_values() {
        let p = principal_eigenvalue(1.0).unwrap();
        assert_eq!(p.regime, Regime::Subcritical);
        assert!((p.xi - 0.165_547_882).abs() < 1e-8, "{p:?}");
        assert!(eigen_equation(1.0, p.xi).unwrap().abs() < 1e-12);
        let p = principal_eigenvalue(0.1).unwrap();
        assert!((p.lambda / 3.6835e-7 - 1.0).abs() < 1e-3, "{p:?}");
    }

    #[test]
    fn curve_is_increasing_and_rejects_bad_grids() {
        let c = eigenvalue_curve(&[0.2, 0.6, 1.0, 1.2]).unwrap();
        assert!(c.windows(2).all(|w| w[1].lambda > w[0].lambda));
        assert!(c.iter().all(|p| p.lambda > 0.0 && p.lambda <= 0.125));
        assert!(eigenvalue_curve(&[]).is_err());
        assert!(eigenvalue_curve(&[1.0, 1.0]).is_err());
        assert!(principal_eigenvalue(0.0).is_err());
        assert!(principal_eigenvalue(-1.0).is_err());
    }

    #[test]
    fn continuity_at_critical_level() {
        let p = principal_eigenvalue(critical_threshold() - 1e-6).unwrap();
        assert!(p.lambda >= 0.125 - 1e-4 && p.lambda < 0.125);
    }

    #[test]
    fn single_sign_change() {
        for &a in &[0.2, 0.5, 1.0, 1.2, 1.26] {
            assert_eq!(count_sign_changes(a, 200).unwrap(), 1, "A = {a}");
        }
        assert_eq!(count_sign_changes(2.0, 200).unwrap(), 0);
    }

    proptest! {
        #[test]
        fn lambda_round_trip(lambda in 1e-6f64..0.125) {
            let back = lambda_of_xi(xi_of_lambda(lambda).unwrap()).unwrap();
            prop_assert!((back - lambda).abs() <= 4.0 * f64::EPSILON * 0.125);
        }

        #[test]
        fn xi_round_trip(xi in 0.0f64..1.0) {
            // near ξ = 0 the f64 spacing of λ limits ξ to about √(8 ε/8)
            let back = xi_of_lambda(lambda_of_xi(xi).unwrap()).unwrap();
            let bound = 1e-15 + (4.0 * f64::EPSILON / xi.max(1e-300)).min(2.0 * f64::EPSILON.sqrt());
            prop_assert!((back - xi).abs() <= bound, "{} {}", xi, back);
        }

        #[test]
        fn monotone_in_boundary(a in 0.15f64..1.25, d in 0.001f64..0.2) {
            let p = principal_eigenvalue(a).unwrap();
            let q = principal_eigenvalue(a + d).unwrap();
            prop_assert!(q.lambda > p.lambda);
            prop_assert!(p.lambda > 0.0 && q.lambda <= 0.125);
        }
    }
}
