//! Double-double arithmetic and extended-precision series.
//!
//! A [`Dd`] carries about 32 significant digits as an unevaluated sum of two
//! `f64` values. The series here are summed until the next term falls below
//! `1e-30` of the partial sum, independent of the fast kernels.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Stopping threshold for extended-precision series.
pub const SERIES_CUTOFF: f64 = 1e-30;
const MAX_TERMS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const LN2: Dd = Dd::new(std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);
pub const PI: Dd = Dd::new(std::f64::consts::PI, 1.224_646_799_147_353_2e-16);
const HALF_LN_2PI: Dd = Dd::new(0.918_938_533_204_672_8, -3.878_294_158_067_241_4e-17);

impl Dd {
    pub const ZERO: Dd = Dd::new(0.0, 0.0);
    pub const ONE: Dd = Dd::new(1.0, 0.0);

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn powi(self, n: u32) -> Self {
        let mut r = Dd::ONE;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                r = r * base;
            }
            base = base.sqr();
            k >>= 1;
        }
        r
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let r = (self.hi - p - e + self.lo) / (2.0 * s);
        let (h, l) = quick_two_sum(s, r);
        Dd::new(h, l)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        // x = k ln2 + r, then r / 2^5 into a Taylor series
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2 * k;
        let scale = 32.0;
        let r = r / scale;
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..40 {
            term = term * r / n as f64;
            sum = sum + term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        for _ in 0..5 {
            sum = sum.sqr();
        }
        sum * 2f64.powi(k as i32)
    }

    /// Natural logarithm by Newton steps on `exp`.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - 1.0;
        }
        y
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (h, l) = quick_two_sum(s, e + f);
        Dd::new(h, l)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        let (h, l) = quick_two_sum(s, e + self.lo);
        Dd::new(h, l)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, b: f64) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (h, l) = quick_two_sum(p, e);
        Dd::new(h, l)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (h, l) = quick_two_sum(p, e + self.lo * b);
        Dd::new(h, l)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd::new(h, l) + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }
}

// B_{2k} as exact rationals, k = 1..=15
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43_867.0, 798.0),
    (-174_611.0, 330.0),
    (854_513.0, 138.0),
    (-236_364_091.0, 2730.0),
    (8_553_103.0, 6.0),
    (-23_749_461_029.0, 870.0),
    (8_615_841_276_005.0, 14_322.0),
];

fn is_pole(x: Dd) -> bool {
    x.lo == 0.0 && x.hi <= 0.0 && x.hi == x.hi.floor()
}

/// `Γ(x)` in double-double: shift to `x ≥ 25`, then Stirling's series.
pub fn gamma_dd(x: Dd) -> Result<Dd> {
    if is_pole(x) {
        return Err(Error::Pole(x.hi));
    }
    let mut y = x;
    let mut denom = Dd::ONE;
    while y.hi < 25.0 {
        denom = denom * y;
        y = y + 1.0;
    }
    let inv = Dd::ONE / y;
    let inv2 = inv.sqr();
    let mut corr = Dd::ZERO;
    let mut pow = inv;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k + 1) as f64;
        corr = corr + pow * Dd::from_f64(num) / (Dd::from_f64(den) * (two_k * (two_k - 1.0)));
        pow = pow * inv2;
    }
    let ln_gamma = (y - 0.5) * y.ln() - y + HALF_LN_2PI + corr;
    Ok(ln_gamma.exp() / denom)
}

/// Kummer `M(α; β; z)` by the defining series in double-double.
pub fn kummer_m_dd(alpha: Dd, beta: Dd, z: Dd) -> Result<Dd> {
    if is_pole(beta) {
        return Err(Error::Parameter(format!(
            "kummer_m_dd second parameter {}",
            beta.hi
        )));
    }
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let min_n = if alpha.hi < 0.0 {
        (-alpha.hi).ceil() as usize + 2
    } else {
        1
    };
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term = term * (alpha + nf) * z / ((beta + nf) * (nf + 1.0));
        sum = sum + term;
        if term.hi == 0.0 {
            return Ok(sum);
        }
        if n + 1 >= min_n && (nf + 1.0) > z.hi && term.hi.abs() < SERIES_CUTOFF * sum.hi.abs() {
            return Ok(sum);
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence(format!(
        "kummer_m_dd({}, {}, {})",
        alpha.hi, beta.hi, z.hi
    )))
}

/// `M_{a,b}(z) = e^{-z/2} z^{b+1/2} M(b − a + 1/2; 1 + 2b; z)`, for either
/// sign of `b` provided `1 + 2b` is not a nonpositive integer.
pub fn whittaker_m_dd(a: f64, b: f64, z: f64) -> Result<Dd> {
    let (bd, zd) = (Dd::from_f64(b), Dd::from_f64(z));
    let alpha = bd - a + 0.5;
    let beta = bd * 2.0 + 1.0;
    let k = kummer_m_dd(alpha, beta, zd)?;
    let pref = ((bd + 0.5) * zd.ln() - zd * 0.5).exp();
    Ok(pref * k)
}

/// Right side of the connection formula,
/// `Γ(−2b)/Γ(1/2−b−a) M_{a,b}(z) + Γ(2b)/Γ(1/2+b−a) M_{a,−b}(z)`,
/// valid for `2b` not an integer.
pub fn whittaker_w_connection_dd(a: f64, b: f64, z: f64) -> Result<Dd> {
    let bd = Dd::from_f64(b);
    let c1 = gamma_or_inf_ratio(-(bd * 2.0), -bd - a + 0.5)?;
    let c2 = gamma_or_inf_ratio(bd * 2.0, bd - a + 0.5)?;
    let mut s = Dd::ZERO;
    if c1 != Dd::ZERO {
        s = s + c1 * whittaker_m_dd(a, b, z)?;
    }
    if c2 != Dd::ZERO {
        s = s + c2 * whittaker_m_dd(a, -b, z)?;
    }
    Ok(s)
}

/// `Γ(p)/Γ(q)`, zero when `q` is a pole.
fn gamma_or_inf_ratio(p: Dd, q: Dd) -> Result<Dd> {
    if is_pole(q) {
        return Ok(Dd::ZERO);
    }
    Ok(gamma_dd(p)? / gamma_dd(q)?)
}

/// `I_ν(x)` by its power series in double-double.
pub fn bessel_i_dd(nu: f64, x: f64) -> Result<Dd> {
    let half = Dd::from_f64(x) * 0.5;
    let q = half.sqr();
    let nud = Dd::from_f64(nu);
    let mut term = (nud * half.ln()).exp() / gamma_dd(nud + 1.0)?;
    let mut sum = term;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term = term * q / ((nud + (kf + 1.0)) * (kf + 1.0));
        sum = sum + term;
        if kf + 1.0 > half.hi && term.hi.abs() < SERIES_CUTOFF * sum.hi.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!("bessel_i_dd({nu}, {x})")))
}

/// Root `ξ ∈ (0, 1)` of `M(ξ/2 − 1/2; 1 + ξ; 2/A)` by plain bisection on the
/// double-double series.
pub fn eigen_xi_bisection(a: f64, steps: usize) -> Result<f64> {
    let z = Dd::from_f64(2.0 / a);
    let f = |xi: f64| -> Result<f64> {
        let x = Dd::from_f64(xi);
        Ok(kummer_m_dd(x * 0.5 - 0.5, x + 1.0, z)?.hi)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let flo = f(lo)?;
    if !(flo < 0.0) {
        return Err(Error::Bracket(format!("no subcritical root for A = {a}")));
    }
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
