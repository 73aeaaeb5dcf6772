//! Identity and distribution checks assembled into a [`ValidationReport`].

use serde::{Deserialize, Serialize};

use super::hp;
use super::quadrature::{integrate_adaptive, integrate_endpoint_singular, Quadrature};
use super::tol;
use crate::error::{Error, Result};
use crate::qsd::{normalizer, normalizer_unsimplified, QsdModel};
use crate::sim::{self, SimConfig};
use crate::special_fns::{
    cos_pi, gamma, rgamma, sin_pi, whittaker_m_bessel, whittaker_m_reflected, whittaker_m_value,
    whittaker_w_bessel, whittaker_w_value,
};
use crate::spectrum::{self, Regime};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// One named residual against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            tol,
            pass: residual.is_finite() && residual <= tol,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// A check whose computation itself failed.
    pub fn errored(name: impl Into<String>, tol: f64, err: &Error) -> Self {
        Check {
            name: name.into(),
            residual: f64::INFINITY,
            tol,
            pass: false,
            note: Some(err.to_string()),
        }
    }

    fn from_result(name: &str, tol: f64, r: Result<f64>) -> Self {
        match r {
            Ok(v) => Check::new(name, v, tol),
            Err(e) => Check::errored(name, tol, &e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    #[serde(rename = "A")]
    pub boundary: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Check with the largest residual-to-tolerance ratio.
    pub worst_offender: Option<String>,
}

impl ValidationReport {
    pub fn from_checks(a: f64, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|x, y| x.name.cmp(&y.name));
        let pass = checks.iter().all(|c| c.pass);
        let worst_offender = checks
            .iter()
            .max_by(|x, y| {
                let rx = if x.residual.is_finite() {
                    x.residual / x.tol
                } else {
                    f64::INFINITY
                };
                let ry = if y.residual.is_finite() {
                    y.residual / y.tol
                } else {
                    f64::INFINITY
                };
                rx.total_cmp(&ry)
            })
            .map(|c| c.name.clone());
        ValidationReport {
            boundary: a,
            checks,
            pass,
            worst_offender,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

// ---------------------------------------------------------------------------
// special-function identities

/// Relative residual of the connection formula for `W_{a,b}(z)`, with the
/// right side summed in double-double. Requires `2b` non-integer.
pub fn connection_residual(a: f64, b: f64, z: f64) -> Result<f64> {
    let w = whittaker_w_value(a, b, z)?;
    let rhs = hp::whittaker_w_connection_dd(a, b, z)?.to_f64();
    Ok(((w - rhs) / w).abs())
}

/// Offset used for the `b → 0` limit of the connection formula. `W` is even
/// in `b`, so the limit error is `O(b²)`.
const CONNECTION_LIMIT_B: f64 = 1e-12;

/// Connection residual at `b = 0`, where `2b` is an integer and the formula
/// only holds as a limit. The logarithmic-route `W_{a,0}` is compared with
/// the double-double limit, and for `a = 0` both `M_{0,0}` and `W_{0,0}`
/// with their Bessel routes.
pub fn connection_residual_at_zero(a: f64, z: f64) -> Result<f64> {
    let w = whittaker_w_value(a, 0.0, z)?;
    let limit = hp::whittaker_w_connection_dd(a, CONNECTION_LIMIT_B, z)?.to_f64();
    let mut r = ((w - limit) / limit).abs();
    if a == 0.0 {
        let wb = whittaker_w_bessel(0.0, z)?.value;
        let m = whittaker_m_value(0.0, 0.0, z)?;
        let mb = whittaker_m_bessel(0.0, z)?.value;
        r = r.max(((w - wb) / wb).abs()).max(((m - mb) / mb).abs());
    }
    Ok(r)
}

/// Largest connection-formula residual over a grid, with its location
/// `(residual, a, b, z)`. Rows with `b = 0` use the limiting form.
pub fn check_connection_identity(b_grid: &[f64], z_grid: &[f64]) -> Result<(f64, f64, f64, f64)> {
    let mut worst = (0.0, 0.0, 0.0, 0.0);
    for &a in &[0.0, 1.0] {
        for &b in b_grid {
            for &z in z_grid {
                let r = if b == 0.0 {
                    connection_residual_at_zero(a, z)?
                } else {
                    connection_residual(a, b, z)?
                };
                if !(r <= worst.0) {
                    worst = (r, a, b, z);
                }
            }
        }
    }
    Ok(worst)
}

/// Right side `z 2^{2b} Γ(1+b) / (√π (b + 1/2))` of the simplification
/// identity.
pub fn simplification_rhs(b: f64, z: f64) -> Result<f64> {
    Ok(z * 4f64.powf(b) * gamma(1.0 + b)? / (SQRT_PI * (b + 0.5)))
}

/// Left side `W_{0,b} M_{1,b} + M_{0,b} W_{1,b}/(b + 1/2)` through the
/// Kummer and Tricomi kernels.
pub fn simplification_lhs(b: f64, z: f64) -> Result<f64> {
    Ok(
        whittaker_w_value(0.0, b, z)? * whittaker_m_value(1.0, b, z)?
            + whittaker_m_value(0.0, b, z)? * whittaker_w_value(1.0, b, z)? / (b + 0.5),
    )
}

/// Left side with the `a = 0` functions taken from the Bessel routes.
pub fn simplification_lhs_bessel(b: f64, z: f64) -> Result<f64> {
    Ok(
        whittaker_w_bessel(b, z)?.value * whittaker_m_value(1.0, b, z)?
            + whittaker_m_bessel(b, z)?.value * whittaker_w_value(1.0, b, z)? / (b + 0.5),
    )
}

/// Largest relative residual of the simplification identity over a grid.
/// At `b = 0` both kernel and Bessel routes are checked.
pub fn check_simplification_identity(b_grid: &[f64], z_grid: &[f64]) -> Result<(f64, f64, f64)> {
    let mut worst = (0.0, 0.0, 0.0);
    for &b in b_grid {
        for &z in z_grid {
            let rhs = simplification_rhs(b, z)?;
            let mut r = ((simplification_lhs(b, z)? - rhs) / rhs).abs();
            if b == 0.0 {
                r = r.max(((simplification_lhs_bessel(b, z)? - rhs) / rhs).abs());
            }
            if !(r <= worst.0) {
                worst = (r, b, z);
            }
        }
    }
    Ok(worst)
}

/// Per-cell relative deviation between the two normalizer expressions.
pub fn check_normalizer_equivalence(
    a_grid: &[f64],
    xi_grid: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::new();
    for &a in a_grid {
        for &xi in xi_grid {
            let c = normalizer(a, xi)?;
            let u = normalizer_unsimplified(a, xi)?;
            out.push((a, xi, ((u - c) / c).abs()));
        }
    }
    Ok(out)
}

/// Both sides of an integral identity together with `∫|integrand|`, which
/// sets the scale of the rounding in the left side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySides {
    pub lhs: f64,
    pub rhs: f64,
    pub magnitude: f64,
}

impl IdentitySides {
    /// `|lhs − rhs|` relative to the larger of `|rhs|` and `∫|integrand|`.
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(self.magnitude)
    }
}

/// Both sides of
/// `∫₀^t (t−x)^{c−1} x^{a−1} e^{−x/2} M_{a+c,b}(x) dx
///   = Γ(c)Γ(a+b+1/2)/Γ(a+b+c+1/2) t^{a+c−1} e^{−t/2} M_{a,b}(t)`.
pub fn gr_integral_m(a: f64, b: f64, c: f64, t: f64) -> Result<IdentitySides> {
    if !(a + b > -0.5 && c > 0.0 && t > 0.0) {
        return Err(Error::Domain(
            "integral needs a+b > -1/2, c > 0, t > 0".into(),
        ));
    }
    let f = |x: f64| -> Result<f64> {
        if x <= 0.0 || x >= t {
            return Ok(0.0);
        }
        Ok((t - x).powf(c - 1.0)
            * x.powf(a - 1.0)
            * (-0.5 * x).exp()
            * whittaker_m_value(a + c, b, x)?)
    };
    let (p_lo, p_hi) = (a + b - 0.5, (c - 1.0).min(0.0));
    let scale = t.powf(a + b + c - 0.5);
    let q = integrate_endpoint_singular(f, 0.0, t, p_lo, p_hi, tol::QUADRATURE * scale)?;
    let m = integrate_endpoint_singular(|x| Ok(f(x)?.abs()), 0.0, t, p_lo, p_hi, 1e-6 * scale)?;
    let rhs = gamma(c)? * gamma(a + b + 0.5)? / gamma(a + b + c + 0.5)?
        * t.powf(a + c - 1.0)
        * (-0.5 * t).exp()
        * whittaker_m_value(a, b, t)?;
    Ok(IdentitySides {
        lhs: q.value,
        rhs,
        magnitude: m.value,
    })
}

/// Both sides of
/// `∫₀¹ (1−x)^{c−1} x^{a−c−1} e^{−tx/2} W_{a,b}(tx) dx
///   = Γ(c) e^{−t/2} sec((a−c−b)π) { sin(cπ) Γ(a−c+b+1/2)/Γ(2b+1) M_{a−c,b}(t)
///                                   + cos((a−b)π) W_{a−c,b}(t) }`.
pub fn gr_integral_w(a: f64, b: f64, c: f64, t: f64) -> Result<IdentitySides> {
    if !(c > 0.0 && c < a - b.abs() + 0.5 && t > 0.0) {
        return Err(Error::Domain(
            "integral needs 0 < c < a - |b| + 1/2, t > 0".into(),
        ));
    }
    let p = a - c - 0.5 - b.abs();
    // Leading term c2 (tx)^{1/2-|b|} of W near the origin. When |b| nears
    // 1/2 - (a - c) the integrand approaches x^{-1}; subtracting this term
    // and integrating it in closed form keeps the quadrature regular.
    let bb = b.abs();
    let subtract = p < -0.5 && (2.0 * bb).fract() != 0.0;
    let (lead, lead_integral) = if subtract {
        let c2 = gamma(2.0 * bb)? * rgamma(bb - a + 0.5);
        (c2 * t.powf(0.5 - bb), c2 * t.powf(0.5 - bb) / (p + 1.0))
    } else {
        (0.0, 0.0)
    };
    let f = |x: f64| -> Result<f64> {
        if x <= 0.0 || x >= 1.0 {
            return Ok(0.0);
        }
        let full = (1.0 - x).powf(c - 1.0)
            * x.powf(a - c - 1.0)
            * (-0.5 * t * x).exp()
            * whittaker_w_value(a, b, t * x)?;
        Ok(full - lead * x.powf(p))
    };
    let p_lo = if subtract { p + (2.0 * bb).min(1.0) } else { p };
    let p_hi = (c - 1.0).min(0.0);
    let q = integrate_endpoint_singular(f, 0.0, 1.0, p_lo, p_hi, tol::QUADRATURE)?;
    let m = integrate_endpoint_singular(|x| Ok(f(x)?.abs()), 0.0, 1.0, p_lo, p_hi, 1e-6)?;
    let mut bracket = cos_pi(a - b) * whittaker_w_value(a - c, b, t)?;
    let s = sin_pi(c);
    if s != 0.0 {
        bracket +=
            s * gamma(a - c + b + 0.5)? * rgamma(2.0 * b + 1.0) * whittaker_m_value(a - c, b, t)?;
    }
    let rhs = gamma(c)? * (-0.5 * t).exp() / cos_pi(a - c - b) * bracket;
    Ok(IdentitySides {
        lhs: q.value + lead_integral,
        rhs,
        magnitude: m.value + lead_integral.abs(),
    })
}

/// Residuals of the two integral identities at the instantiation used for
/// the distribution function (`a = 0, c = 1` and `a = 1, c = 1`), at
/// `t = 2/A` and `t = 2/x`. Returns `[M-part, W-part]`.
pub fn check_gr_integrals(xi: f64, a: f64, x: f64) -> Result<[f64; 2]> {
    if !(x > a) {
        return Err(Error::Domain(format!("need x > A, got x = {x}, A = {a}")));
    }
    let b = 0.5 * xi;
    let mut out = [0.0f64; 2];
    for &t in &[2.0 / a, 2.0 / x] {
        out[0] = out[0].max(gr_integral_m(0.0, b, 1.0, t)?.residual());
        out[1] = out[1].max(gr_integral_w(1.0, b, 1.0, t)?.residual());
    }
    Ok(out)
}

/// Agreement of the eigenfunction built from `M_{1,b}, W_{1,b}` with the one
/// built from `M_{1,−b}, W_{1,−b} = W_{1,b}` after re-solving the
/// coefficients through the connection formula. Relative to the largest
/// `|φ|` on the grid. Needs `0 < ξ < 1`.
pub fn sign_symmetry_residual(model: &QsdModel, grid: &[f64]) -> Result<f64> {
    let b = 0.5 * model.xi;
    if !(b > 0.0) {
        return Err(Error::Domain("sign symmetry needs xi > 0".into()));
    }
    let phi = model.eigenfunction();
    let c1 = gamma(-2.0 * b)? * rgamma(-0.5 - b);
    let c2 = gamma(2.0 * b)? * rgamma(b - 0.5);
    let b1n = -phi.b1 * c2 / c1;
    let b2n = phi.b2 + phi.b1 / c1;
    let (mut worst, mut peak) = (0.0f64, 0.0f64);
    for &x in grid {
        let z = 2.0 / x;
        let plus = phi.eval(x)?;
        let minus = x
            * (1.0 / x).exp()
            * (b1n * whittaker_m_reflected(1.0, b, z)?.value + b2n * whittaker_w_value(1.0, b, z)?);
        worst = worst.max((plus - minus).abs());
        peak = peak.max(plus.abs());
    }
    Ok(worst / peak)
}

// ---------------------------------------------------------------------------
// distribution checks

/// `∫_lo^hi q` by quadrature in `s = ln x`.
pub fn integrate_pdf(model: &QsdModel, lo: f64, hi: f64, tol: f64) -> Result<Quadrature> {
    integrate_adaptive(
        |s: f64| {
            let x = s.exp();
            Ok(model.pdf(x)? * x)
        },
        lo.ln(),
        hi.ln(),
        tol,
    )
}

/// Smallest `A·10^k` whose survival probability is below `tail`.
pub fn tail_cutoff(model: &QsdModel, tail: f64) -> Result<f64> {
    let a = model.boundary;
    for k in 1..=300 {
        let x = a * 10f64.powi(k);
        if !x.is_finite() {
            break;
        }
        if model.sf(x)? < tail {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence(format!(
        "survival above {tail:e} beyond 1e300"
    )))
}

fn bulk_grid(model: &QsdModel) -> Vec<f64> {
    let a = model.boundary;
    let mut grid = model.reciprocal_grid(400);
    grid.extend((0..=80).map(|k| a * 10f64.powf(k as f64 / 10.0)));
    grid
}

/// Largest density on a grid covering the bulk of the distribution.
pub fn peak_density(model: &QsdModel) -> Result<f64> {
    bulk_grid(model)
        .into_iter()
        .try_fold(0.0f64, |peak, x| Ok(peak.max(model.pdf(x)?)))
}

/// `|m φ|` at `A` relative to its largest value on the bulk grid. Computed
/// from the eigenfunction so that a model with the wrong eigenvalue, whose
/// density turns negative, still yields a residual.
pub fn boundary_residual(model: &QsdModel) -> Result<f64> {
    let phi = model.eigenfunction();
    let density = |x: f64| -> Result<f64> { Ok(crate::qsd::speed_measure(x)? * phi.eval(x)?) };
    let peak = bulk_grid(model).into_iter().try_fold(0.0f64, |peak, x| {
        Ok::<f64, Error>(peak.max(density(x)?.abs()))
    })?;
    Ok(density(model.boundary)?.abs() / peak)
}

/// `|∫_A^X q − 1|` with `X` chosen so that the survival beyond it is below
/// `tail`.
pub fn normalization_residual(model: &QsdModel, tail: f64) -> Result<f64> {
    let x_max = tail_cutoff(model, tail)?;
    let q = integrate_pdf(model, model.boundary, x_max, tol::QUADRATURE)?;
    Ok((q.value - 1.0).abs())
}

/// Grid of `n` points used for the distribution-function comparison:
/// evenly spaced in `1/x` over `(0, 1/A)` excluding the boundary.
pub fn cdf_check_grid(model: &QsdModel, n: usize) -> Vec<f64> {
    let a = model.boundary;
    (1..=n)
        .rev()
        .map(|i| a * (n as f64 + 1.0) / i as f64)
        .collect()
}

/// Largest `|Q(x) − ∫_A^x q|` over the given ascending grid.
pub fn cdf_quadrature_residual(model: &QsdModel, grid: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    let mut prev = model.boundary;
    let mut worst: f64 = 0.0;
    for &x in grid {
        if x > prev {
            acc += integrate_pdf(model, prev, x, 0.1 * tol::QUADRATURE)?.value;
            prev = x;
        }
        worst = worst.max((model.cdf(x)? - acc).abs());
    }
    Ok(worst)
}

/// Largest relative mismatch between a central difference of `Q` and `q` at
/// the deciles of the distribution.
pub fn cdf_derivative_residual(model: &QsdModel) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 1..10 {
        let x = model.quantile(0.1 * i as f64)?;
        let h = 1e-4 * x;
        let d = (model.cdf(x - 2.0 * h)? - 8.0 * model.cdf(x - h)? + 8.0 * model.cdf(x + h)?
            - model.cdf(x + 2.0 * h)?)
            / (12.0 * h);
        let q = model.pdf(x)?;
        worst = worst.max(((d - q) / q).abs());
    }
    Ok(worst)
}

/// Interior grid for the forward-equation residual: 100 points on
/// `[1.1 A, 20 A]`.
pub fn master_grid(model: &QsdModel) -> Vec<f64> {
    let a = model.boundary;
    (0..100)
        .map(|i| a * (1.1 + 18.9 * i as f64 / 99.0))
        .collect()
}

/// Largest forward-equation residual relative to the largest density on
/// the grid.
pub fn master_equation_residual(model: &QsdModel) -> Result<f64> {
    let grid = master_grid(model);
    let r = model.master_equation_residual(&grid)?;
    let mut peak: f64 = 0.0;
    for &x in &grid {
        peak = peak.max(model.pdf(x)?);
    }
    Ok(r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / peak)
}

/// Largest difference between the reduced and general expressions for the
/// density (relative to the peak) and the distribution function.
pub fn theorem_vs_general_residual(model: &QsdModel) -> Result<f64> {
    let peak = peak_density(model)?;
    let mut worst: f64 = 0.0;
    let mut grid = model.reciprocal_grid(200);
    grid.extend((1..=40).map(|k| model.boundary * 10f64.powf(k as f64 / 4.0)));
    for x in grid {
        worst = worst.max((model.pdf(x)? - model.pdf_general(x)?).abs() / peak);
        worst = worst.max((model.cdf(x)? - model.cdf_general(x)?).abs());
    }
    Ok(worst)
}

/// `|M_{1,ξ_A/2}(2/A)|` at the solved eigenvalue.
pub fn eigen_equation_residual(a: f64) -> Result<f64> {
    let sp = spectrum::principal_eigenvalue(a)?;
    Ok(spectrum::eigen_equation(a, sp.xi)?.abs())
}

/// `∫_A^X m φ²` by quadrature in `ln x`.
pub fn truncated_norm_sq(model: &QsdModel, x_max: f64) -> Result<f64> {
    truncated_norm_between(model, model.boundary, x_max)
}

fn truncated_norm_between(model: &QsdModel, lo: f64, hi: f64) -> Result<f64> {
    let phi = model.eigenfunction();
    let f = |s: f64| -> Result<f64> {
        let x = s.exp();
        let p = phi.eval(x)?;
        Ok(crate::qsd::speed_measure(x)? * p * p * x)
    };
    // relative tolerance on the segment, from a coarse first pass
    let rough = integrate_adaptive(f, lo.ln(), hi.ln(), f64::INFINITY)?
        .value
        .abs();
    Ok(integrate_adaptive(f, lo.ln(), hi.ln(), 1e-10 * rough.max(1e-300))?.value)
}

/// Increments of the truncated norm over the decades `[A·10^k, A·10^{k+1}]`,
/// `k = 0..decades`.
pub fn norm_increments(model: &QsdModel, decades: usize) -> Result<Vec<f64>> {
    let a = model.boundary;
    (0..decades)
        .map(|k| {
            truncated_norm_between(
                model,
                a * 10f64.powi(k as i32),
                a * 10f64.powi(k as i32 + 1),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// suite

/// What `run_suite` covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    /// Run the analytic and identity checks.
    pub analytic: bool,
    /// Include the Monte-Carlo cross-check with this configuration.
    pub monte_carlo: Option<SimConfig>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            analytic: true,
            monte_carlo: None,
        }
    }
}

/// Full analytic suite for the principal distribution at `A`.
pub fn run_suite(a: f64, opts: &SuiteOptions) -> ValidationReport {
    match QsdModel::principal(a) {
        Ok(model) => run_model_suite(&model, opts),
        Err(e) => ValidationReport::from_checks(a, vec![Check::errored("model", 0.0, &e)]),
    }
}

/// Suite for an explicit model, which may deliberately be wrong.
pub fn run_model_suite(model: &QsdModel, opts: &SuiteOptions) -> ValidationReport {
    let mut checks = if opts.analytic {
        analytic_checks(model)
    } else {
        Vec::new()
    };
    if let Some(cfg) = &opts.monte_carlo {
        checks.extend(monte_carlo_checks(model, cfg));
    }
    ValidationReport::from_checks(model.boundary, checks)
}

fn analytic_checks(model: &QsdModel) -> Vec<Check> {
    let a = model.boundary;
    let xi = model.xi;
    let mut checks = vec![
        Check::from_result("boundary", tol::BOUNDARY, boundary_residual(model)),
        Check::from_result(
            "normalization",
            tol::NORMALIZATION,
            normalization_residual(model, tol::TAIL),
        ),
        Check::from_result(
            "cdf-quadrature",
            tol::CDF_QUADRATURE,
            cdf_quadrature_residual(model, &cdf_check_grid(model, 50)),
        ),
        Check::from_result(
            "cdf-derivative",
            tol::CDF_DERIVATIVE,
            cdf_derivative_residual(model),
        ),
        Check::from_result(
            "master-equation",
            tol::MASTER_EQUATION,
            master_equation_residual(model),
        ),
        Check::from_result(
            "theorem-vs-general",
            tol::THEOREM_VS_GENERAL,
            theorem_vs_general_residual(model),
        ),
    ];

    let xi_grid = [0.0, 0.3, 0.7, 0.99, xi];
    checks.push(match check_normalizer_equivalence(&[a], &xi_grid) {
        Ok(cells) => {
            let worst = cells
                .iter()
                .cloned()
                .fold((a, 0.0, 0.0), |w, c| if c.2 > w.2 { c } else { w });
            Check::new("normalizer-equivalence", worst.2, tol::NORMALIZER)
                .with_note(format!("worst cell A = {}, xi = {}", worst.0, worst.1))
        }
        Err(e) => Check::errored("normalizer-equivalence", tol::NORMALIZER, &e),
    });

    let b_grid = [0.0, 0.1, 0.25, 0.4, 0.49, 0.5 * xi];
    let z_grid = [0.1, 1.0, 2.0 / a, 20.0];
    checks.push(match check_simplification_identity(&b_grid, &z_grid) {
        Ok((r, b, z)) => Check::new("simplification-identity", r, tol::IDENTITY)
            .with_note(format!("worst at b = {b}, z = {z}")),
        Err(e) => Check::errored("simplification-identity", tol::IDENTITY, &e),
    });
    checks.push(
        match check_connection_identity(&[0.0, 0.06, 0.25, 0.45], &z_grid) {
            Ok((r, aa, b, z)) => Check::new("connection-identity", r, tol::IDENTITY)
                .with_note(format!("worst at a = {aa}, b = {b}, z = {z}")),
            Err(e) => Check::errored("connection-identity", tol::IDENTITY, &e),
        },
    );
    match check_gr_integrals(xi, a, 2.0 * a) {
        Ok([m, w]) => {
            checks.push(Check::new("integral-m", m, tol::GR_INTEGRAL));
            checks.push(Check::new("integral-w", w, tol::GR_INTEGRAL));
        }
        Err(e) => {
            checks.push(Check::errored("integral-m", tol::GR_INTEGRAL, &e));
            checks.push(Check::errored("integral-w", tol::GR_INTEGRAL, &e));
        }
    }
    if model.spectral_point().regime == Regime::Subcritical {
        checks.push(Check::from_result(
            "eigen-equation",
            tol::EIGEN_RESIDUAL,
            spectrum::eigen_equation(a, xi).map(f64::abs),
        ));
    }
    checks
}

fn monte_carlo_checks(model: &QsdModel, cfg: &SimConfig) -> Vec<Check> {
    let ens = match sim::simulate(cfg) {
        Ok(e) => e,
        Err(e) => {
            return vec![
                Check::errored("mc-ks", tol::KS, &e),
                Check::errored("mc-kill-rate", tol::KILL_RATE_REL, &e),
            ]
        }
    };
    let ks = Check::from_result("mc-ks", tol::KS, sim::ks_distance(&ens, model))
        .with_note(format!("{} survivors", ens.n_survivors()));
    let rate = Check::from_result(
        "mc-kill-rate",
        tol::KILL_RATE_REL,
        sim::estimate_kill_rate(&ens).map(|r| ((r - model.lambda) / model.lambda).abs()),
    );
    vec![ks, rate]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsd::PdfForm;

    #[test]
    fn simplification_example() {
        // b = 0, z = 2: z Γ(1)/(√π/2) = 4/√π
        let rhs = simplification_rhs(0.0, 2.0).unwrap();
        assert!((rhs - 4.0 / SQRT_PI).abs() < 1e-15);
        let lhs = simplification_lhs_bessel(0.0, 2.0).unwrap();
        assert!(((lhs - rhs) / rhs).abs() < 1e-12);
        let r = simplification_rhs(0.3, 1.7).unwrap();
        assert_eq!(simplification_rhs(0.3, 3.4).unwrap() / r, 2.0);
        let (worst, _, _) = check_simplification_identity(&[0.49], &[0.1]).unwrap();
        assert!(worst < 1e-9);
    }

    #[test]
    fn integral_identities_at_unit_boundary() {
        let xi = spectrum::principal_eigenvalue(1.0).unwrap().xi;
        let [m, w] = check_gr_integrals(xi, 1.0, 2.0).unwrap();
        assert!(m < 1e-8 && w < 1e-8, "{m} {w}");
        // t → 0+: both sides vanish
        let s = gr_integral_m(0.0, 0.2, 1.0, 1e-8).unwrap();
        assert!(s.lhs.abs() < 1e-3 && s.rhs.abs() < 1e-3 && s.residual() < 1e-8);
        let s = gr_integral_w(1.0, 0.2, 1.0, 1e-8).unwrap();
        assert!(s.residual() < 1e-8, "{s:?}");
    }

    #[test]
    fn general_integral_parameters() {
        // a non-instantiated parameter choice for each identity
        let s = gr_integral_m(0.7, 0.3, 1.5, 3.0).unwrap();
        assert!(s.residual() < 1e-9, "{s:?}");
        let s = gr_integral_w(1.3, 0.1, 0.6, 2.5).unwrap();
        assert!(s.residual() < 1e-9, "{s:?}");
        assert!(s.magnitude >= s.lhs.abs());
    }

    #[test]
    fn sign_symmetry() {
        for m in [
            QsdModel::principal(0.5).unwrap(),
            QsdModel::family(1.0, 0.1).unwrap(),
        ] {
            let grid: Vec<f64> = (1..30)
                .map(|i| m.boundary * (1.0 + 0.3 * i as f64))
                .collect();
            let r = sign_symmetry_residual(&m, &grid).unwrap();
            assert!(r < 1e-10, "{r}");
        }
    }

    #[test]
    fn report_contract() {
        let r = ValidationReport::from_checks(
            1.0,
            vec![Check::new("b", 2.0, 1.0), Check::new("a", 0.5, 1.0)],
        );
        assert!(!r.pass);
        assert_eq!(r.worst_offender.as_deref(), Some("b"));
        let json = serde_json::to_string(&r).unwrap();
        let back: ValidationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(!Check::new("nan", f64::NAN, 1.0).pass);
    }

    #[test]
    fn fault_injection_breaks_boundary() {
        let sp = spectrum::principal_eigenvalue(1.0).unwrap();
        let bad = QsdModel::from_parts(1.0, sp.lambda + 1e-3, PdfForm::ReducedSubcritical).unwrap();
        assert!(boundary_residual(&bad).unwrap() > tol::BOUNDARY);
        let good = QsdModel::principal(1.0).unwrap();
        assert!(boundary_residual(&good).unwrap() < tol::BOUNDARY);

        let report = run_model_suite(&bad, &SuiteOptions::default());
        assert!(!report.pass);
        assert!(!report.check("boundary").unwrap().pass);
    }

    #[test]
    fn suite_passes_at_unit_boundary() {
        let report = run_suite(1.0, &SuiteOptions::default());
        assert!(report.pass, "{report:?}");
        assert!(report.checks.len() >= 12);
        let none = run_suite(
            1.0,
            &SuiteOptions {
                analytic: false,
                monte_carlo: None,
            },
        );
        assert!(none.checks.is_empty() && none.pass);
        let invalid = run_suite(-1.0, &SuiteOptions::default());
        assert!(!invalid.pass);
    }
}
