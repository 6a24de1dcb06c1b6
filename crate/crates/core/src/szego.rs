//! Exponential partial sums `S_n(z)` and Szegő-type approximations of
//! `S_{n-1}(nz)/e^{nz}` and `S_n(nt)/e^{nt}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{ComplexReal, Real};

/// Below this `|t - 1|` the near-diagonal series replaces the direct form.
const NEAR_ONE: f64 = 1e-3;
/// Above this argument `erfc_int` switches to its asymptotic expansion.
const ERFC_ASYMPTOTIC_FROM: f64 = 30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SzegoError {
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("degenerate fit: error at n = {n} is 2^{error_log2:.1}, below working precision")]
    DegenerateFit { n: usize, error_log2: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Contour exponent `alpha` in `(1/3, 1/2)`; only labels expected orders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SzegoConfig {
    alpha: f64,
}

impl SzegoConfig {
    pub fn new(alpha: f64) -> Result<Self, SzegoError> {
        if alpha > 1.0 / 3.0 && alpha < 0.5 {
            Ok(SzegoConfig { alpha })
        } else {
            Err(SzegoError::InvalidInput(format!(
                "alpha = {alpha} is outside (1/3, 1/2)"
            )))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Exponent `1 - 3 alpha` of the expected `O(n^{1-3 alpha})` error.
    pub fn expected_order(&self) -> f64 {
        1.0 - 3.0 * self.alpha
    }
}

impl Default for SzegoConfig {
    fn default() -> Self {
        SzegoConfig { alpha: 0.4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Approximation {
    /// `|z| > 1`.
    Prop1,
    /// `Re z < 1`.
    Prop2,
    /// Uniform in real `t >= 0`, approximating `S_n(nt)/e^{nt}`.
    Prop3,
}

impl Approximation {
    pub fn name(self) -> &'static str {
        match self {
            Approximation::Prop1 => "prop1",
            Approximation::Prop2 => "prop2",
            Approximation::Prop3 => "prop3",
        }
    }
}

impl fmt::Display for Approximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Approximation {
    type Err = SzegoError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prop1" => Ok(Approximation::Prop1),
            "prop2" => Ok(Approximation::Prop2),
            "prop3" => Ok(Approximation::Prop3),
            other => Err(SzegoError::InvalidInput(format!(
                "unknown approximation {other:?}"
            ))),
        }
    }
}

fn ceil_log2(v: f64) -> u32 {
    if v <= 1.0 {
        0
    } else {
        v.log2().ceil() as u32
    }
}

/// `S_n(z)` by the forward term recurrence. Guard bits cover the rounding of
/// `n + 1` additions; if the terms cancel beyond that, the sum is redone with
/// enough extra bits to absorb the cancellation.
pub fn partial_sum<T: Real>(n: usize, z: &Complex<T>, p: u32) -> Complex<T> {
    let guard = ceil_log2(n as f64 + 1.0);
    let work = T::effective_precision(p + guard);
    let (sum, cancel) = partial_sum_at(n, z, work);
    if T::FIXED_PRECISION.is_none() && cancel > 1.0 && cancel.is_finite() {
        let redo = p + cancel.ceil() as u32 + 32 + guard;
        let (sum, _) = partial_sum_at(n, z, redo);
        return sum.with_precision(p);
    }
    sum.with_precision(T::effective_precision(p))
}

/// Sum at `work` bits plus the cancellation `log2(sum |t_j| / |S|)`.
fn partial_sum_at<T: Real>(n: usize, z: &Complex<T>, work: u32) -> (Complex<T>, f64) {
    let z = z.clone().with_precision(work);
    let mut term = Complex::<T>::from_f64s(1.0, 0.0, work);
    let mut sum = term.clone();
    let z_log2 = z.log2_abs();
    let mut term_log2 = 0.0f64;
    let mut total_log2 = 0.0f64;
    for j in 1..=n {
        term = term * z.clone();
        let jj = T::from_f64(j as f64, work);
        term.re /= &jj;
        term.im /= &jj;
        sum.re += &term.re;
        sum.im += &term.im;
        term_log2 += z_log2 - (j as f64).log2();
        total_log2 = log2_add(total_log2, term_log2);
    }
    let sum_log2 = sum.log2_abs();
    let cancel = if sum_log2 == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (total_log2 - sum_log2).max(0.0)
    };
    (sum, cancel)
}

fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// `S_{n-1}(nz) e^{-nz}` at `p` bits.
pub fn ratio_exact<T: Real>(n: usize, z: &Complex<T>, p: u32) -> Result<Complex<T>, SzegoError> {
    if n == 0 {
        return Err(SzegoError::DomainViolation(
            "ratio_exact needs n >= 1".into(),
        ));
    }
    let nz_abs = n as f64 * z.to_c64().norm();
    let work = T::effective_precision(p + 16 + ceil_log2(nz_abs + 1.0));
    let nz = z
        .clone()
        .with_precision(work)
        .scale_by(&T::from_f64(n as f64, work));
    let s = partial_sum(n - 1, &nz, work);
    let e = (-nz).cexp();
    Ok((s * e).with_precision(T::effective_precision(p)))
}

/// `S_n(nt) e^{-nt}` for real `t`, the quantity the uniform approximation targets.
pub fn ratio_exact_uniform<T: Real>(n: usize, t: &T, p: u32) -> Complex<T> {
    let work = T::effective_precision(p + 16 + ceil_log2(n as f64 * t.to_f64().abs() + 1.0));
    let mut nt = t.clone().with_precision(work);
    nt *= T::from_f64(n as f64, work);
    let z = Complex::new(nt, T::from_f64(0.0, work));
    let s = partial_sum(n, &z, work);
    let e = (-z).cexp();
    (s * e).with_precision(T::effective_precision(p))
}

/// `(z e^{1-z})^n / (sqrt(2 pi n) (1 - z))`, with the power taken as
/// `exp(n (Log z + 1 - z))`.
pub fn correction<T: Real>(n: usize, z: &Complex<T>) -> Complex<T> {
    let prec = z.precision();
    let work = T::effective_precision(prec + 8 + ceil_log2(n as f64));
    let z = z.clone().with_precision(work);
    let one = Complex::<T>::from_f64s(1.0, 0.0, work);
    let expo = (z.cln() + one.clone() - z.clone()).scale_by(&T::from_f64(n as f64, work));
    let num = expo.cexp();
    let mut root = T::pi(work);
    root *= T::from_f64(2.0 * n as f64, work);
    let root = root.sqrt();
    let den = (one - z).scale_by(&root);
    (num / den).with_precision(prec)
}

/// Approximation of `S_{n-1}(nz)/e^{nz}` outside the unit disc.
pub fn prop1_approx<T: Real>(n: usize, z: &Complex<T>) -> Result<Complex<T>, SzegoError> {
    let r = z.cabs();
    if r <= T::from_f64(1.0, r.precision()) {
        return Err(SzegoError::DomainViolation(format!(
            "prop1 needs |z| > 1, got |z| = {}",
            r.to_f64()
        )));
    }
    Ok(-correction(n, z))
}

/// Approximation of `S_{n-1}(nz)/e^{nz}` on the half plane `Re z < 1`.
pub fn prop2_approx<T: Real>(n: usize, z: &Complex<T>) -> Result<Complex<T>, SzegoError> {
    if z.re >= T::from_f64(1.0, z.re.precision()) {
        return Err(SzegoError::DomainViolation(format!(
            "prop2 needs Re z < 1, got {}",
            z.re.to_f64()
        )));
    }
    let prec = z.precision();
    if z.is_zero_c() {
        return Ok(Complex::from_f64s(1.0, 0.0, prec));
    }
    Ok(Complex::<T>::from_f64s(1.0, 0.0, prec) - correction(n, z))
}

/// `int_x^inf e^{-s^2} ds`, i.e. `sqrt(pi)/2 * erfc(x)`.
pub fn erfc_int<T: Real>(x: &T) -> T {
    let prec = x.precision();
    if x.to_f64() > ERFC_ASYMPTOTIC_FROM {
        return erfc_asymptotic(x);
    }
    let mut half_sqrt_pi = T::pi(prec).sqrt();
    half_sqrt_pi /= T::from_f64(2.0, prec);
    let mut v = x.erfc();
    v *= &half_sqrt_pi;
    v
}

/// `e^{-x^2}/(2x) * sum_k (-1)^k (2k-1)!!/(2x^2)^k`, summed while terms shrink.
fn erfc_asymptotic<T: Real>(x: &T) -> T {
    let prec = x.precision();
    let work = T::effective_precision(prec + 16);
    let x = x.clone().with_precision(work);
    let mut two_x2 = x.clone();
    two_x2 *= &x;
    two_x2 *= T::from_f64(2.0, work);
    let mut term = T::from_f64(1.0, work);
    let mut sum = term.clone();
    let limit = -(work as f64) - 8.0;
    let mut k = 1u64;
    loop {
        let mut next = term.clone();
        next *= T::from_f64((2 * k - 1) as f64, work);
        next /= &two_x2;
        next = -next;
        if next.abs() >= term.abs() || next.log2_abs() < limit {
            break;
        }
        sum += &next;
        term = next;
        k += 1;
    }
    let mut x2 = x.clone();
    x2 *= &x;
    let mut v = (-x2).exp();
    v /= T::from_f64(2.0, work);
    v /= &x;
    v *= &sum;
    v.with_precision(prec)
}

/// Uniform approximation of `S_n(nt)/e^{nt}` for real `t >= 0`:
/// `delta(t) + sqrt(2/pi) * xi(t) t/(t-1) * Erfc(sqrt(n) xi(t))` with
/// `xi(t) = |t - 1 - ln t|^{1/2}` and `delta` the indicator of `t < 1`.
pub fn prop3_approx<T: Real>(n: usize, t: &T) -> Result<T, SzegoError> {
    if n < 2 {
        return Err(SzegoError::DomainViolation(format!(
            "prop3 needs n >= 2, got {n}"
        )));
    }
    let prec = t.precision();
    if t.is_sign_negative() && !t.is_zero() {
        return Err(SzegoError::DomainViolation(format!(
            "prop3 needs t >= 0, got {}",
            t.to_f64()
        )));
    }
    if t.is_zero() {
        return Ok(T::from_f64(1.0, prec));
    }
    let work = T::effective_precision(prec + 32);
    let t = t.clone().with_precision(work);
    let one = T::from_f64(1.0, work);
    let u = t.clone() - one.clone();
    // xi and the signed ratio xi/(t-1).
    let (xi, ratio) = if u.abs().to_f64() < NEAR_ONE {
        let s = near_one_series(&u).sqrt();
        let ratio = if u.is_sign_negative() && !u.is_zero() {
            -s.clone()
        } else {
            s.clone()
        };
        (u.abs() * s, ratio)
    } else {
        let xi = (u.clone() - t.ln()).abs().sqrt();
        let mut ratio = xi.clone();
        ratio /= &u;
        (xi, ratio)
    };
    let mut arg = T::from_f64(n as f64, work).sqrt();
    arg *= &xi;
    let mut second = T::from_f64(2.0, work);
    second /= T::pi(work);
    let mut second = second.sqrt();
    second *= &ratio;
    second *= &t;
    second *= erfc_int(&arg);
    let delta = if u.is_sign_negative() && !u.is_zero() {
        one
    } else {
        T::from_f64(0.0, work)
    };
    Ok((delta + second).with_precision(prec))
}

/// `(u - ln(1+u))/u^2 = sum_k (-1)^k u^k/(k+2)`.
fn near_one_series<T: Real>(u: &T) -> T {
    let prec = u.precision();
    let limit = -(prec as f64) - 8.0;
    let mut sum = T::from_f64(0.0, prec);
    let mut power = T::from_f64(1.0, prec);
    for k in 0.. {
        let mut term = power.clone();
        term /= T::from_f64((k + 2) as f64, prec);
        if k > 0 && term.log2_abs() < limit {
            break;
        }
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        power *= u;
        if power.is_zero() {
            break;
        }
    }
    sum
}

/// One comparison of an approximation with its exact reference.
#[derive(Clone, Debug, PartialEq)]
pub struct SzegoRow<T: Real> {
    pub n: usize,
    pub which: Approximation,
    pub point: Complex<T>,
    pub exact: Complex<T>,
    pub approx: Complex<T>,
    pub abs_err: T,
    pub rel_err: T,
}

impl<T: Real> SzegoRow<T> {
    /// Error whose decay rate the approximation predicts: relative error
    /// for `prop1`, error relative to the deviation `1 - exact` for `prop2`
    /// (its asymptotic term multiplies that deviation), absolute error for
    /// `prop3`.
    pub fn fit_error(&self) -> T {
        match self.which {
            Approximation::Prop1 => self.rel_err.clone(),
            Approximation::Prop2 => {
                let prec = self.exact.precision();
                let dev = (Complex::<T>::from_f64s(1.0, 0.0, prec) - self.exact.clone()).cabs();
                let mut e = self.abs_err.clone();
                if !dev.is_zero() {
                    e /= &dev;
                }
                e
            }
            Approximation::Prop3 => self.abs_err.clone(),
        }
    }
}

/// Evaluates `which` at `point` against the exact ratio, at the point's precision.
pub fn compare<T: Real>(
    which: Approximation,
    point: &Complex<T>,
    n: usize,
) -> Result<SzegoRow<T>, SzegoError> {
    let prec = point.precision();
    let (exact, approx) = match which {
        Approximation::Prop1 => (ratio_exact(n, point, prec)?, prop1_approx(n, point)?),
        Approximation::Prop2 => (ratio_exact(n, point, prec)?, prop2_approx(n, point)?),
        Approximation::Prop3 => {
            if !point.im.is_zero() {
                return Err(SzegoError::DomainViolation("prop3 takes a real t".into()));
            }
            let t = &point.re;
            let approx = prop3_approx(n, t)?;
            (
                ratio_exact_uniform(n, t, prec),
                Complex::new(approx, T::from_f64(0.0, prec)),
            )
        }
    };
    let abs_err = (exact.clone() - approx.clone()).cabs();
    let mut rel_err = abs_err.clone();
    let scale = exact.cabs();
    if !scale.is_zero() {
        rel_err /= &scale;
    }
    Ok(SzegoRow {
        n,
        which,
        point: point.clone(),
        exact,
        approx,
        abs_err,
        rel_err,
    })
}

/// Least-squares slope of `ln(error)` against `ln(n)`, with the error from
/// [`SzegoRow::fit_error`].
pub fn error_slope<T: Real>(
    which: Approximation,
    point: &Complex<T>,
    n_list: &[usize],
) -> Result<f64, SzegoError> {
    if n_list.len() < 3 {
        return Err(SzegoError::InvalidInput(
            "error_slope needs at least 3 degrees".into(),
        ));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SzegoError::InvalidInput(
            "degrees must be strictly increasing".into(),
        ));
    }
    let prec = point.precision();
    let mut xs = Vec::with_capacity(n_list.len());
    let mut ys = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let error_log2 = compare(which, point, n)?.fit_error().log2_abs();
        if !error_log2.is_finite() || error_log2 < 8.0 - prec as f64 {
            return Err(SzegoError::DegenerateFit { n, error_log2 });
        }
        xs.push((n as f64).ln());
        ys.push(error_log2 * std::f64::consts::LN_2);
    }
    Ok(least_squares_slope(&xs, &ys))
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
