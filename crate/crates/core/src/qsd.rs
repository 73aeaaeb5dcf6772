//! Quasi-stationary density, distribution and eigenfunction.
//!
//! For a boundary `A` and a spectral parameter `λ ∈ (0, 1/8]` with
//! `ξ = √(1 − 8λ)`, `b = ξ/2`, the density on `[A, ∞)` is
//!
//! ```text
//! q(x) = (C/x) e^{-1/x} { W_{1,b}(2/A) M_{1,b}(2/x) − M_{1,b}(2/A) W_{1,b}(2/x) }
//! C    = √π (A/4) e^{1/A} (ξ + 1) / (2^ξ Γ(ξ/2 + 1))
//! ```
//!
//! and the survival function `1 − Q(x)` is
//! `C e^{-1/x} { W_{0,b}(2/x) M_{1,b}(2/A) + 2/(ξ+1) M_{0,b}(2/x) W_{1,b}(2/A) }`.
//!
//! The principal distribution uses `λ = λ_A`. Below the critical level
//! `M_{1,b}(2/A) = 0` and both formulas collapse to ratios of `M` functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::brent;
use crate::special_fns::{
    gamma, whittaker_m, whittaker_m_value, whittaker_w, whittaker_w_value, WhittakerParams,
};
use crate::spectrum::{self, Regime, SpectralPoint};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Negative densities smaller than this fraction of the term scale are
/// rounding noise and clamp to zero.
const NEGATIVE_CLAMP: f64 = 1e-13;
/// Eigen-equation residuals up to this size count as a root at working
/// precision; the reduced density is then allowed to dip that far below
/// zero next to the boundary.
const ROOT_RESIDUAL: f64 = 1e-9;
/// Tolerated excursion of the distribution function outside `[0, 1]`.
const CDF_SLACK: f64 = 1e-12;
/// Maximum number of bracket doublings in the quantile search.
const MAX_DOUBLINGS: usize = 200;

/// Speed measure `m(x) = (2/x²) e^{-2/x}`.
pub fn speed_measure(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("speed measure needs x > 0, got {x}")));
    }
    Ok(2.0 / (x * x) * (-2.0 / x).exp())
}

fn check_a_xi(a: f64, xi: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "boundary A must be positive, got {a}"
        )));
    }
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::Domain(format!("xi must lie in [0, 1), got {xi}")));
    }
    Ok(())
}

/// Normalizing constant in its simplified form.
pub fn normalizer(a: f64, xi: f64) -> Result<f64> {
    check_a_xi(a, xi)?;
    Ok(SQRT_PI * 0.25 * a * (1.0 / a).exp() * (xi + 1.0) / 2f64.powf(xi) / gamma(0.5 * xi + 1.0)?)
}

/// Normalizing constant as the reciprocal of the Whittaker bracket,
/// `e^{1/A} / { W_{0,b} M_{1,b} + 2/(ξ+1) M_{0,b} W_{1,b} }` at `2/A`.
pub fn normalizer_unsimplified(a: f64, xi: f64) -> Result<f64> {
    check_a_xi(a, xi)?;
    let (b, z) = (0.5 * xi, 2.0 / a);
    let bracket = whittaker_w_value(0.0, b, z)? * whittaker_m_value(1.0, b, z)?
        + 2.0 / (xi + 1.0) * whittaker_m_value(0.0, b, z)? * whittaker_w_value(1.0, b, z)?;
    Ok((1.0 / a).exp() / bracket)
}

/// Which of the algebraically equivalent expressions the density uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PdfForm {
    /// Ratio of `M` functions, valid when `M_{1,b}(2/A) = 0`.
    ReducedSubcritical,
    /// The general expression at `ξ = 0` with `C = √π (A/4) e^{1/A}`.
    ReducedCritical,
    /// The general two-branch expression.
    General,
}

/// Eigenfunction coefficients in
/// `φ(x) = x e^{1/x} { B₁ M_{1,b}(2/x) + B₂ W_{1,b}(2/x) }`,
/// scaled so that `q = m φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub lambda: f64,
    pub xi: f64,
    pub b1: f64,
    pub b2: f64,
}

impl Eigenfunction {
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("eigenfunction needs x > 0, got {x}")));
        }
        let (b, z) = (0.5 * self.xi, 2.0 / x);
        let mut s = self.b1 * whittaker_m_value(1.0, b, z)?;
        if self.b2 != 0.0 {
            s += self.b2 * whittaker_w_value(1.0, b, z)?;
        }
        Ok(x * (1.0 / x).exp() * s)
    }
}

/// A resolved quasi-stationary distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QsdModel {
    #[serde(rename = "A")]
    pub boundary: f64,
    pub lambda: f64,
    pub xi: f64,
    /// Normalizing constant `C`.
    pub normalizer: f64,
    /// True for members of the continuum family with `λ < λ_A`.
    pub family: bool,
    pub form: PdfForm,
    m1_a: f64,
    w1_a: f64,
    m0_a: f64,
}

impl QsdModel {
    /// The quasi-stationary distribution at `λ = λ_A`.
    pub fn principal(a: f64) -> Result<Self> {
        let sp = spectrum::principal_eigenvalue(a)?;
        let form = match sp.regime {
            Regime::Subcritical => PdfForm::ReducedSubcritical,
            Regime::CriticalOrSupercritical => PdfForm::ReducedCritical,
        };
        Self::build(a, sp.lambda, sp.xi, form, false)
    }

    /// A member of the continuum family, `0 < λ < λ_A`.
    pub fn family(a: f64, lambda: f64) -> Result<Self> {
        let sp = spectrum::principal_eigenvalue(a)?;
        if !(lambda > 0.0 && lambda < sp.lambda) {
            return Err(Error::Domain(format!(
                "family member needs 0 < lambda < lambda_A = {}, got {lambda}",
                sp.lambda
            )));
        }
        let xi = spectrum::xi_of_lambda(lambda)?;
        Self::build(a, lambda, xi, PdfForm::General, true)
    }

    /// A model with an arbitrary `λ` and expression, without checking
    /// that `λ` solves the eigenvalue equation. Used to inject faults.
    pub fn from_parts(a: f64, lambda: f64, form: PdfForm) -> Result<Self> {
        let xi = spectrum::xi_of_lambda(lambda)?;
        Self::build(a, lambda, xi, form, false)
    }

    fn build(a: f64, lambda: f64, xi: f64, form: PdfForm, family: bool) -> Result<Self> {
        check_a_xi(a, xi)?;
        let (b, z) = (0.5 * xi, 2.0 / a);
        Ok(QsdModel {
            boundary: a,
            lambda,
            xi,
            normalizer: normalizer(a, xi)?,
            family,
            form,
            m1_a: whittaker_m_value(1.0, b, z)?,
            w1_a: whittaker_w_value(1.0, b, z)?,
            m0_a: whittaker_m_value(0.0, b, z)?,
        })
    }

    pub fn spectral_point(&self) -> SpectralPoint {
        SpectralPoint {
            boundary: self.boundary,
            lambda: self.lambda,
            xi: self.xi,
            regime: if self.lambda == spectrum::LAMBDA_CUTOFF {
                Regime::CriticalOrSupercritical
            } else {
                Regime::Subcritical
            },
        }
    }

    fn b(&self) -> f64 {
        0.5 * self.xi
    }

    /// Density `q_A(x)`, zero below `A`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain("pdf at NaN".into()));
        }
        if x < self.boundary {
            return Ok(0.0);
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        let (value, scale) = match self.form {
            PdfForm::ReducedSubcritical => {
                let m1 = whittaker_m(WhittakerParams {
                    a: 1.0,
                    b: self.b(),
                    z: 2.0 / x,
                })?;
                let pref =
                    (self.xi + 1.0) / (2.0 * x) * (1.0 / self.boundary - 1.0 / x).exp() / self.m0_a;
                let root = if self.m1_a.abs() <= ROOT_RESIDUAL {
                    self.m1_a.abs()
                } else {
                    0.0
                };
                (
                    pref * m1.value,
                    pref.abs() * 8.0 * (m1.abs_error() + root) / NEGATIVE_CLAMP,
                )
            }
            PdfForm::ReducedCritical => {
                let c = SQRT_PI * (1.0 / self.boundary).exp() * self.boundary / 4.0;
                self.two_branch_pdf(x, c)?
            }
            PdfForm::General => self.two_branch_pdf(x, self.normalizer)?,
        };
        clamp_negative(value, scale, x)
    }

    fn two_branch_pdf(&self, x: f64, c: f64) -> Result<(f64, f64)> {
        let (b, z) = (self.b(), 2.0 / x);
        let m = whittaker_m(WhittakerParams { a: 1.0, b, z })?;
        let w = whittaker_w(WhittakerParams { a: 1.0, b, z })?;
        let (t1, t2) = (self.w1_a * m.value, self.m1_a * w.value);
        let pref = c / x * (-1.0 / x).exp();
        // near A both terms are close to M_{1,b}(2/A) = 0, so the rounding
        // scale comes from the evaluation error rather than the term sizes
        let err = self.w1_a.abs() * m.abs_error() + self.m1_a.abs() * w.abs_error();
        let scale = t1.abs() + t2.abs() + 8.0 * err / NEGATIVE_CLAMP;
        Ok((pref * (t1 - t2), pref.abs() * scale))
    }

    /// Density from the general two-branch expression with the
    /// simplified normalizer, whatever [`PdfForm`] the model uses.
    pub fn pdf_general(&self, x: f64) -> Result<f64> {
        if x < self.boundary {
            return Ok(0.0);
        }
        let (v, s) = self.two_branch_pdf(x, self.normalizer)?;
        clamp_negative(v, s, x)
    }

    /// Survival function `1 − Q_A(x)`, computed directly so that the far
    /// tail keeps full relative accuracy.
    pub fn sf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain("sf at NaN".into()));
        }
        if x <= self.boundary {
            return Ok(1.0);
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        let s = match self.form {
            PdfForm::ReducedSubcritical => {
                let m0 = whittaker_m_value(0.0, self.b(), 2.0 / x)?;
                (1.0 / self.boundary - 1.0 / x).exp() * m0 / self.m0_a
            }
            PdfForm::ReducedCritical => {
                let c = SQRT_PI * (1.0 / self.boundary).exp() * self.boundary / 4.0;
                self.two_branch_sf(x, c)?
            }
            PdfForm::General => self.two_branch_sf(x, self.normalizer)?,
        };
        check_unit(s, "survival function")
    }

    fn two_branch_sf(&self, x: f64, c: f64) -> Result<f64> {
        let (b, z) = (self.b(), 2.0 / x);
        let w0 = whittaker_w_value(0.0, b, z)?;
        let m0 = whittaker_m_value(0.0, b, z)?;
        Ok(c * (-1.0 / x).exp() * (w0 * self.m1_a + 2.0 / (self.xi + 1.0) * m0 * self.w1_a))
    }

    /// Survival function from the general expression.
    pub fn sf_general(&self, x: f64) -> Result<f64> {
        if x <= self.boundary {
            return Ok(1.0);
        }
        check_unit(self.two_branch_sf(x, self.normalizer)?, "survival function")
    }

    /// Distribution function `Q_A(x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.sf(x)?)
    }

    /// Distribution function from the general expression.
    pub fn cdf_general(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.sf_general(x)?)
    }

    /// Smallest `x` with `Q_A(x) = p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!(
                "quantile level must lie in (0, 1), got {p}"
            )));
        }
        let a = self.boundary;
        let mut hi = 2.0 * a;
        let mut n = 0;
        while self.cdf(hi)? < p {
            hi *= 2.0;
            n += 1;
            if n > MAX_DOUBLINGS || !hi.is_finite() {
                return Err(Error::Bracket(format!("quantile {p} beyond {hi}")));
            }
        }
        let lo = if n == 0 { a } else { 0.5 * hi };
        // solve in ln x so that wide brackets keep relative resolution
        let s = brent(|s| Ok(self.cdf(s.exp())? - p), lo.ln(), hi.ln(), 1e-14)?;
        Ok(s.exp())
    }

    /// Quantiles of an ascending list of levels, warm-starting each from the
    /// previous one with safeguarded Newton steps.
    pub fn quantiles_sorted(&self, ps: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(ps.len());
        let mut prev_p = f64::NEG_INFINITY;
        let mut x = self.boundary;
        for &p in ps {
            if !(p > 0.0 && p < 1.0) || p < prev_p {
                return Err(Error::Domain(
                    "levels must be ascending inside (0, 1)".into(),
                ));
            }
            prev_p = p;
            x = match self.newton_quantile(p, x)? {
                Some(v) => v,
                None => self.quantile(p)?,
            };
            out.push(x);
        }
        Ok(out)
    }

    fn newton_quantile(&self, p: f64, start: f64) -> Result<Option<f64>> {
        let mut x = start.max(self.boundary * (1.0 + 1e-12));
        for _ in 0..30 {
            let f = self.cdf(x)? - p;
            if f.abs() <= 1e-12 {
                return Ok(Some(x));
            }
            let d = self.pdf(x)?;
            if !(d > 0.0) {
                return Ok(None);
            }
            let step = f / d;
            let next = x - step;
            // stay inside the support and limit the growth per step
            if !(next > self.boundary) || next > 4.0 * x {
                return Ok(None);
            }
            if (next - x).abs() <= 1e-14 * x {
                return Ok(Some(next));
            }
            x = next;
        }
        Ok(None)
    }

    /// Eigenfunction coefficients matched to this density.
    pub fn eigenfunction(&self) -> Eigenfunction {
        let (b1, b2) = match self.form {
            PdfForm::ReducedSubcritical => (
                (self.xi + 1.0) / (4.0 * (-1.0 / self.boundary).exp() * self.m0_a),
                0.0,
            ),
            PdfForm::ReducedCritical => {
                let c = SQRT_PI * (1.0 / self.boundary).exp() * self.boundary / 4.0;
                (0.5 * c * self.w1_a, -0.5 * c * self.m1_a)
            }
            PdfForm::General => (
                0.5 * self.normalizer * self.w1_a,
                -0.5 * self.normalizer * self.m1_a,
            ),
        };
        Eigenfunction {
            lambda: self.lambda,
            xi: self.xi,
            b1,
            b2,
        }
    }

    /// Residual `(x² q)''/2 − q' + λ q` of the forward equation at each
    /// grid point, by 5-point central differences.
    pub fn master_equation_residual(&self, grid: &[f64]) -> Result<Vec<f64>> {
        for &x in grid {
            if x - 2.0 * stencil_step(x) <= self.boundary {
                return Err(Error::Domain(format!(
                    "grid point {x} too close to the boundary {}",
                    self.boundary
                )));
            }
        }
        master_residual(|x| self.pdf(x), self.lambda, grid)
    }

    /// See [`reciprocal_grid`].
    pub fn reciprocal_grid(&self, n: usize) -> Vec<f64> {
        reciprocal_grid(self.boundary, n)
    }
}

/// `n` points evenly spaced in `1/x` over `(0, 1/A]`, returned as `x`
/// values in ascending order starting at `A`.
pub fn reciprocal_grid(a: f64, n: usize) -> Vec<f64> {
    (1..=n).rev().map(|i| a * n as f64 / i as f64).collect()
}

fn stencil_step(x: f64) -> f64 {
    1e-4f64.max(1e-4 * x)
}

/// Forward-equation residual of an arbitrary density.
pub fn master_residual<F>(q: F, lambda: f64, grid: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    grid.iter()
        .map(|&x| {
            let h = stencil_step(x);
            let mut v = [0.0; 5];
            for (k, slot) in v.iter_mut().enumerate() {
                *slot = q(x + (k as f64 - 2.0) * h)?;
            }
            let g = |k: usize| {
                let y = x + (k as f64 - 2.0) * h;
                y * y * v[k]
            };
            let d2 = (-g(0) + 16.0 * g(1) - 30.0 * g(2) + 16.0 * g(3) - g(4)) / (12.0 * h * h);
            let d1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h);
            Ok(0.5 * d2 - d1 + lambda * v[2])
        })
        .collect()
}

fn clamp_negative(value: f64, scale: f64, x: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if -value <= NEGATIVE_CLAMP * scale {
        Ok(0.0)
    } else {
        Err(Error::Consistency(format!(
            "negative density {value:e} at x = {x}"
        )))
    }
}

fn check_unit(v: f64, what: &str) -> Result<f64> {
    if !(-CDF_SLACK..=1.0 + CDF_SLACK).contains(&v) {
        return Err(Error::Consistency(format!("{what} {v} outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}
