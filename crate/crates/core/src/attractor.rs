//! The limit set of the zeros: two conjugate arcs that are rotated images of
//! the Szegő curve `|z e^{1-z}| = 1, |z| <= 1` under `x = z/(pi i)`, joined
//! by the real interval `[-1/(pi e), 1/(pi e)]`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{ComplexReal, Real};

/// Minimum samples per arc accepted by [`sample_attractor`].
pub const MIN_SAMPLES: usize = 16;
/// Minimum samples per arc for [`distance_to_attractor`].
pub const MIN_DISTANCE_SAMPLES: usize = 64;
const GOLDEN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttractorError {
    #[error("domain violation: {0}")]
    DomainViolation(String),
}

/// Component of the attractor, or `Outlier` for points assigned to none.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Interval,
    LowerArc,
    UpperArc,
    Outlier,
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::Interval => "interval",
            Component::LowerArc => "lower_arc",
            Component::UpperArc => "upper_arc",
            Component::Outlier => "outlier",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = AttractorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interval" => Ok(Component::Interval),
            "lower_arc" => Ok(Component::LowerArc),
            "upper_arc" => Ok(Component::UpperArc),
            "outlier" => Ok(Component::Outlier),
            other => Err(AttractorError::DomainViolation(format!(
                "unknown component {other:?}"
            ))),
        }
    }
}

/// A point `r e^{i theta}` of the Szegő curve.
#[derive(Clone, Debug, PartialEq)]
pub struct SzegoCurvePoint<T: Real> {
    pub theta: T,
    pub r: T,
}

impl<T: Real> SzegoCurvePoint<T> {
    pub fn new(theta: T) -> Result<Self, AttractorError> {
        let r = szego_radius(&theta)?;
        Ok(SzegoCurvePoint { theta, r })
    }

    /// `ln r + 1 - r cos(theta)`.
    pub fn defect(&self) -> T {
        let mut rc = self.theta.cos();
        rc *= &self.r;
        let mut v = self.r.ln();
        v += T::from_f64(1.0, self.r.precision());
        v -= &rc;
        v
    }
}

/// Below this `s` the series form of `ln(1 - s) + s` is used.
const SERIES_SWITCH: f64 = 1e-2;

/// `ln(1 - s) + s`, by its series `-sum_{k>=2} s^k/k` for small `s`.
fn log1m_plus<T: Real>(s: &T) -> T {
    let prec = s.precision();
    if s.to_f64() >= SERIES_SWITCH {
        let mut v = (T::from_f64(1.0, prec) - s.clone()).ln();
        v += s;
        return v;
    }
    let limit = -(prec as f64) - 8.0;
    let mut power = s.clone();
    power *= s;
    let mut sum = T::from_f64(0.0, prec);
    for k in 2.. {
        let mut term = power.clone();
        term /= T::from_f64(k as f64, prec);
        sum -= &term;
        if term.is_zero() || term.log2_abs() < limit + sum.log2_abs() {
            break;
        }
        power *= s;
    }
    sum
}

/// `ln r + 1 - r cos(theta)` rewritten in `s = 1 - r` and
/// `q = 2 sin^2(theta/2)`: `ln(1 - s) + s + (1 - s) q`, decreasing in `s`.
fn corner_form<T: Real>(s: &T, q: &T) -> T {
    let mut v = T::from_f64(1.0, s.precision()) - s.clone();
    v *= q;
    v += log1m_plus(s);
    v
}

/// Unique `r` in `(0, 1]` with `ln r + 1 = r cos(theta)`, for `|theta| <= pi`.
pub fn szego_radius<T: Real>(theta: &T) -> Result<T, AttractorError> {
    let prec = theta.precision();
    let th = theta.to_f64();
    if !(th.abs() <= std::f64::consts::PI + 1e-15) {
        return Err(AttractorError::DomainViolation(format!(
            "szego_radius needs |theta| <= pi, got {th}"
        )));
    }
    let one = T::from_f64(1.0, prec);
    if theta.is_zero() {
        return Ok(one);
    }
    let mut half = theta.clone();
    half /= T::from_f64(2.0, prec);
    let sin_half = half.sin();
    let mut q = sin_half.clone();
    q *= &sin_half;
    q *= T::from_f64(2.0, prec);
    // Bisection in f64 on s in [0, 1 - 1e-3].
    let qf = q.to_f64();
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-3);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if corner_form(&mid, &qf) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton in T, derivative -s/(1 - s) - q.
    let mut s = T::from_f64(0.5 * (lo + hi), prec);
    let stop = -(prec as f64) + 2.0;
    for _ in 0..100 {
        let h = corner_form(&s, &q);
        let mut dh = s.clone();
        dh /= one.clone() - s.clone();
        dh += &q;
        dh = -dh;
        if dh.is_zero() {
            break;
        }
        let mut step = h;
        step /= &dh;
        s -= &step;
        if step.is_zero() || step.log2_abs() < stop + s.log2_abs() {
            break;
        }
    }
    Ok(one - s)
}

/// `x = -i r(theta) e^{i theta}/pi` on the lower arc, `|theta| <= pi/2`.
pub fn arc_point<T: Real>(theta: &T) -> Result<Complex<T>, AttractorError> {
    if !(theta.to_f64().abs() <= std::f64::consts::FRAC_PI_2 + 1e-15) {
        return Err(AttractorError::DomainViolation(format!(
            "arc_point needs |theta| <= pi/2, got {}",
            theta.to_f64()
        )));
    }
    let prec = theta.precision();
    let r = szego_radius(theta)?;
    let mut scale = r;
    scale /= T::pi(prec);
    let mut re = theta.sin();
    re *= &scale;
    let mut im = theta.cos();
    im *= &scale;
    Ok(Complex::new(re, -im))
}

fn arc_point_f64(theta: f64) -> Complex<f64> {
    let r = szego_radius(&theta).unwrap_or(1.0);
    let s = r / std::f64::consts::PI;
    Complex::new(s * theta.sin(), -s * theta.cos())
}

/// `z e^{1-z}`.
pub fn conformal_zeta<T: Real>(z: &Complex<T>) -> Complex<T> {
    let prec = z.precision();
    let e = (Complex::<T>::from_f64s(1.0, 0.0, prec) - z.clone()).cexp();
    z.clone() * e
}

/// `conformal_zeta(pi i x)`.
pub fn zeta_of_x<T: Real>(x: &Complex<T>) -> Complex<T> {
    let prec = x.precision();
    let z = Complex::new(-x.im.clone(), x.re.clone()).scale_by(&T::pi(prec));
    conformal_zeta(&z)
}

/// `arg zeta` for a point of the lower arc at `theta`: `theta - r sin(theta)`.
pub fn arc_zeta_argument<T: Real>(theta: &T) -> Result<T, AttractorError> {
    let r = szego_radius(theta)?;
    let mut rs = theta.sin();
    rs *= &r;
    Ok(theta.clone() - rs)
}

/// Named constants of the attractor.
pub fn key_constants<T: Real>(prec: u32) -> BTreeMap<&'static str, T> {
    let work = T::effective_precision(prec + 16);
    let pi = T::pi(work);
    let e = T::from_f64(1.0, work).exp();
    let one = T::from_f64(1.0, work);
    let mut pi_e = pi.clone();
    pi_e *= &e;
    let mut interval_half = one.clone();
    interval_half /= &pi_e;
    let mut outer_radius = one.clone();
    outer_radius /= &pi;
    let mut theta_pi = T::pi(work);
    theta_pi.set_precision(work);
    let neg_crossing = -szego_radius(&theta_pi).expect("pi is in range");
    let point_a = one.clone() - T::from_f64(3.0, work).ln();
    let mut quarter = T::from_f64(0.25, work);
    let mut half_interval = interval_half.clone();
    half_interval /= T::from_f64(2.0, work);
    quarter -= &half_interval;
    let mut interval_fraction = interval_half.clone();
    interval_fraction *= T::from_f64(2.0, work);
    let round = |v: T| v.with_precision(T::effective_precision(prec));
    let mut m = BTreeMap::new();
    m.insert("interval_half", round(interval_half));
    m.insert("outer_radius", round(outer_radius));
    m.insert("szego_neg_crossing", round(neg_crossing));
    m.insert("pointA_re", round(point_a));
    m.insert("quarter_arc_fraction", round(quarter));
    m.insert("interval_fraction", round(interval_fraction));
    m
}

/// Sampled attractor. `thetas[j]` generates `lower_arc[j]`; `upper_arc` is
/// the conjugate sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct AttractorModel<T: Real> {
    pub precision_bits: u32,
    pub interval: (T, T),
    pub thetas: Vec<T>,
    pub lower_arc: Vec<Complex<T>>,
    pub upper_arc: Vec<Complex<T>>,
    pub key_points: BTreeMap<&'static str, Complex<T>>,
    pub constants: BTreeMap<&'static str, T>,
}

impl<T: Real> AttractorModel<T> {
    pub fn samples_per_arc(&self) -> usize {
        self.lower_arc.len()
    }

    pub fn interval_half_f64(&self) -> f64 {
        self.interval.1.to_f64()
    }
}

/// Arcs sampled at Chebyshev–Lobatto angles
/// `theta_j = -(pi/2) cos(pi j/(m-1))`, plus endpoints and constants.
pub fn sample_attractor<T: Real>(m: usize, prec: u32) -> Result<AttractorModel<T>, AttractorError> {
    if m < MIN_SAMPLES {
        return Err(AttractorError::DomainViolation(format!(
            "need at least {MIN_SAMPLES} samples per arc, got {m}"
        )));
    }
    let prec = T::effective_precision(prec);
    let mut half_pi = T::pi(prec);
    half_pi /= T::from_f64(2.0, prec);
    let mut thetas = Vec::with_capacity(m);
    for j in 0..m {
        let theta = if j == 0 {
            -half_pi.clone()
        } else if j == m - 1 {
            half_pi.clone()
        } else if 2 * j == m - 1 {
            T::from_f64(0.0, prec)
        } else {
            let mut a = T::pi(prec);
            a *= T::from_f64(j as f64, prec);
            a /= T::from_f64((m - 1) as f64, prec);
            let mut v = a.cos();
            v *= &half_pi;
            -v
        };
        thetas.push(theta);
    }
    let mut lower_arc = Vec::with_capacity(m);
    for t in &thetas {
        lower_arc.push(arc_point(t)?);
    }
    let upper_arc = lower_arc.iter().map(|z| z.conj()).collect();
    let constants = key_constants::<T>(prec);
    let a = constants["interval_half"].clone();
    let zero = T::from_f64(0.0, prec);
    let mut inv_pi = T::from_f64(1.0, prec);
    inv_pi /= T::pi(prec);
    let mut key_points = BTreeMap::new();
    key_points.insert("bottom", Complex::new(zero.clone(), -inv_pi.clone()));
    key_points.insert("top", Complex::new(zero.clone(), inv_pi));
    key_points.insert("left_end", Complex::new(-a.clone(), zero.clone()));
    key_points.insert("right_end", Complex::new(a.clone(), zero));
    Ok(AttractorModel {
        precision_bits: prec,
        interval: (-a.clone(), a),
        thetas,
        lower_arc,
        upper_arc,
        key_points,
        constants,
    })
}

/// Distances from a point to each component of the attractor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentDistances {
    pub interval: f64,
    pub lower_arc: f64,
    pub upper_arc: f64,
}

impl ComponentDistances {
    /// Nearer arc and its distance; ties go to the lower arc.
    pub fn nearest_arc(&self) -> (Component, f64) {
        if self.upper_arc < self.lower_arc {
            (Component::UpperArc, self.upper_arc)
        } else {
            (Component::LowerArc, self.lower_arc)
        }
    }

    /// Nearest component; ties go to the interval.
    pub fn nearest(&self) -> (Component, f64) {
        let (comp, d_arc) = self.nearest_arc();
        if self.interval <= d_arc {
            (Component::Interval, self.interval)
        } else {
            (comp, d_arc)
        }
    }
}

/// Per-component distances. Arc distances come from the sampled polyline
/// refined by golden-section search in `theta`.
pub fn component_distances<T: Real>(
    x: &Complex<T>,
    model: &AttractorModel<T>,
) -> Result<ComponentDistances, AttractorError> {
    if model.samples_per_arc() < MIN_DISTANCE_SAMPLES {
        return Err(AttractorError::DomainViolation(format!(
            "distance needs at least {MIN_DISTANCE_SAMPLES} samples per arc, got {}",
            model.samples_per_arc()
        )));
    }
    let p = x.to_c64();
    let thetas: Vec<f64> = model.thetas.iter().map(|t| t.to_f64()).collect();
    let arc: Vec<Complex<f64>> = model.lower_arc.iter().map(|z| z.to_c64()).collect();
    Ok(ComponentDistances {
        interval: interval_distance(p, model.interval_half_f64()),
        lower_arc: arc_distance(p, &thetas, &arc),
        upper_arc: arc_distance(p.conj(), &thetas, &arc),
    })
}

/// Nearest component and distance to it; ties go to the interval.
pub fn distance_to_attractor<T: Real>(
    x: &Complex<T>,
    model: &AttractorModel<T>,
) -> Result<(Component, f64), AttractorError> {
    Ok(component_distances(x, model)?.nearest())
}

/// Distance from `p` to `[-a, a]`.
pub fn interval_distance(p: Complex<f64>, a: f64) -> f64 {
    let dx = (p.re.abs() - a).max(0.0);
    dx.hypot(p.im)
}

fn segment_distance(p: Complex<f64>, a: Complex<f64>, b: Complex<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance to the lower arc: polyline first, then golden-section on the
/// curve over the two segments adjacent to the nearest one.
fn arc_distance(p: Complex<f64>, thetas: &[f64], arc: &[Complex<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    let mut best_seg = 0;
    for j in 0..arc.len() - 1 {
        let d = segment_distance(p, arc[j], arc[j + 1]);
        if d < best {
            best = d;
            best_seg = j;
        }
    }
    let lo = thetas[best_seg.saturating_sub(1)];
    let hi = thetas[(best_seg + 2).min(thetas.len() - 1)];
    let f = |t: f64| (p - arc_point_f64(t)).norm();
    let refined = golden_section_min(f, lo, hi, GOLDEN_TOL);
    best.min(refined).min(f(lo)).min(f(hi))
}

fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}
