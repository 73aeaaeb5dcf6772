//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default maximum number of subintervals.
pub const MAX_SUBDIVISIONS: usize = 4000;

/// Result of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx)?, f(c + dx)?);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let (value, abs_k, asc) = (kronrod * h, abs_k * h.abs(), asc * h.abs());
    let mut err = ((kronrod - gauss) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_k);
    }
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "non-finite integrand on [{lo}, {hi}]"
        )));
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error: err,
    })
}

/// `∫_lo^hi f` to absolute tolerance `tol` by bisecting the interval with
/// the largest error estimate.
pub fn integrate_adaptive<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_with_limit(&mut f, lo, hi, tol, MAX_SUBDIVISIONS)
}

pub fn integrate_with_limit<F>(
    f: &mut F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_intervals: usize,
) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("integration limits [{lo}, {hi}]")));
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(f, lo, hi)?;
    let (mut total, mut err) = (first.value, first.error);
    heap.push(first);
    while err > tol {
        if heap.len() >= max_intervals {
            return Err(Error::NonConvergence(format!(
                "quadrature on [{lo}, {hi}] reached {max_intervals} subintervals, error {err:e}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            return Err(Error::NonConvergence(format!(
                "quadrature interval [{}, {}] cannot be split further",
                worst.lo, worst.hi
            )));
        }
        let left = gk15(f, worst.lo, mid)?;
        let right = gk15(f, mid, worst.hi)?;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if err <= tol {
            // recompute from scratch to shed accumulated update rounding
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(Quadrature {
        value: total,
        abs_error: err,
        intervals: heap.len(),
    })
}

/// `∫_lo^∞ f` through `x = lo + t/(1 − t)`.
pub fn integrate_to_infinity<F>(mut f: F, lo: f64, tol: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut g = |t: f64| {
        let s = 1.0 - t;
        let x = lo + t / s;
        if !x.is_finite() {
            return Ok(0.0);
        }
        Ok(f(x)? / (s * s))
    };
    integrate_with_limit(&mut g, 0.0, 1.0, tol, MAX_SUBDIVISIONS)
}

/// `∫_lo^hi f` for integrands behaving like `(x − lo)^{p_lo}` and
/// `(hi − x)^{p_hi}` at the ends (`p > −1`), through a power map that
/// makes both endpoint behaviours bounded.
pub fn integrate_endpoint_singular<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    p_lo: f64,
    p_hi: f64,
    tol: f64,
) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(p_lo > -1.0 && p_hi > -1.0) {
        return Err(Error::Domain(format!(
            "endpoint exponents {p_lo}, {p_hi} not integrable"
        )));
    }
    let k_lo = (1.0 / (1.0 + p_lo)).max(1.0);
    let k_hi = (1.0 / (1.0 + p_hi)).max(1.0);
    let width = hi - lo;
    // split at the midpoint; on each half x − end = (width/2) v^k
    let half = 0.5 * width;
    let mut left = |v: f64| {
        if v <= 0.0 {
            return Ok(0.0);
        }
        let x = lo + half * v.powf(k_lo);
        Ok(f(x)? * half * k_lo * v.powf(k_lo - 1.0))
    };
    let a = integrate_with_limit(&mut left, 0.0, 1.0, 0.5 * tol, MAX_SUBDIVISIONS)?;
    let mut right = |v: f64| {
        if v <= 0.0 {
            return Ok(0.0);
        }
        let x = hi - half * v.powf(k_hi);
        Ok(f(x)? * half * k_hi * v.powf(k_hi - 1.0))
    };
    let b = integrate_with_limit(&mut right, 0.0, 1.0, 0.5 * tol, MAX_SUBDIVISIONS)?;
    Ok(Quadrature {
        value: a.value + b.value,
        abs_error: a.abs_error + b.abs_error,
        intervals: a.intervals + b.intervals,
    })
}
