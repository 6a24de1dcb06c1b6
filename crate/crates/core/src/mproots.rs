//! All `n` zeros of `P_n(x) = E_n(nx)/n!` by Aberth–Ehrlich iteration on
//! the monic normalization, with a posteriori certification.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::eulerpoly::{default_precision, ScaledPolynomial};
use crate::scalar::{ComplexReal, Real, MIN_MP_PRECISION};

/// Sweep limit per precision level.
pub const MAX_SWEEPS: usize = 200;
/// Number of precision doublings attempted after the first level fails.
pub const MAX_ESCALATIONS: u32 = 3;

const INNER_RADIUS: f64 = 0.06;
const OUTER_RADIUS: f64 = 0.28;
/// Precision used to store residuals and radii.
const DIAGNOSTIC_BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    /// `max(256, 8n + 64)` bits.
    Auto,
    Bits(u32),
}

impl Precision {
    pub fn resolve(self, n: usize) -> u32 {
        match self {
            Precision::Auto => default_precision(n),
            Precision::Bits(b) => b,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("degree must be at least 1")]
    InvalidDegree,
    #[error("precision of {bits} bits is below the {min}-bit minimum")]
    PrecisionTooLow { bits: u32, min: u32 },
    #[error(
        "no convergence for n = {n} at {bits} bits after {sweeps} sweeps \
         (max step 2^{max_step_log2:.1}, max Newton radius 2^{max_radius_log2:.1})"
    )]
    NoConvergence {
        n: usize,
        bits: u32,
        sweeps: usize,
        max_step_log2: f64,
        max_radius_log2: f64,
    },
    #[error("root {index} has normalized residual 2^{residual_log2:.1} above 2^{limit_log2:.1}")]
    CertificationFailed {
        index: usize,
        residual_log2: f64,
        limit_log2: f64,
    },
}

/// Roots of `E_n(nx)` with per-root diagnostics.
///
/// `residuals[i]` is the normwise backward error
/// `|P(r_i)| / (max_k |a_k| * sum_k |r_i|^k)` for the monic `P`, and
/// `newton_radii[i]` is `|P(r_i)/P'(r_i)|`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet<T: Real> {
    pub n: usize,
    pub precision_bits: u32,
    pub seed: u64,
    pub roots: Vec<Complex<T>>,
    pub residuals: Vec<T>,
    pub newton_radii: Vec<T>,
    /// Indices whose Newton radius exceeds half the distance to the nearest
    /// other root.
    pub cluster_warnings: Vec<usize>,
}

impl<T: Real> RootSet<T> {
    pub fn max_radius_log2(&self) -> f64 {
        self.newton_radii
            .iter()
            .map(|r| r.log2_abs())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest Newton radius as `f64`; underflows to zero at high precision.
    pub fn max_newton_radius(&self) -> f64 {
        self.newton_radii
            .iter()
            .map(|r| r.to_f64())
            .fold(0.0, f64::max)
    }

    pub fn max_residual_log2(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.log2_abs())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn roots_c64(&self) -> Vec<Complex<f64>> {
        self.roots.iter().map(|r| r.to_c64()).collect()
    }

    /// Sum of the roots, to be compared with `-a_{n-1}`.
    pub fn root_sum(&self) -> Complex<T> {
        let prec = self.precision_bits;
        let mut acc = Complex::<T>::from_f64s(0.0, 0.0, prec);
        for r in &self.roots {
            acc.re += &r.re;
            acc.im += &r.im;
        }
        acc
    }
}

/// Starting points on two circles, about a quarter of them on the inner one,
/// each with a seeded angular jitter.
pub fn initial_guesses<T: Real>(n: usize, seed: u64, prec: u32) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = n / 4;
    let outer = n - inner;
    let mut out = Vec::with_capacity(n);
    for (count, radius, offset) in [(outer, OUTER_RADIUS, 0.5), (inner, INNER_RADIUS, 0.25)] {
        for k in 0..count {
            let jitter: f64 = rng.gen_range(-0.25..0.25);
            let theta = std::f64::consts::TAU * (k as f64 + offset + jitter) / count as f64;
            out.push(Complex::from_f64s(
                radius * theta.cos(),
                radius * theta.sin(),
                prec,
            ));
        }
    }
    out
}

/// Finds all roots of `E_n(nx)`. Precision is doubled up to
/// [`MAX_ESCALATIONS`] times, warm-started from the previous iterate.
pub fn find_roots<T: Real>(
    n: usize,
    precision: Precision,
    seed: u64,
) -> Result<RootSet<T>, RootError> {
    if n == 0 {
        return Err(RootError::InvalidDegree);
    }
    let requested = precision.resolve(n);
    if T::FIXED_PRECISION.is_none() && requested < MIN_MP_PRECISION {
        return Err(RootError::PrecisionTooLow {
            bits: requested,
            min: MIN_MP_PRECISION,
        });
    }
    let mut bits = T::effective_precision(requested);
    let mut roots = initial_guesses::<T>(n, seed, bits);

    let warmup = warmup_precision(n);
    if T::FIXED_PRECISION.is_none() && warmup < bits {
        let poly = ScaledPolynomial::<T>::monic(n, warmup);
        widen_all(&mut roots, warmup);
        let _ = aberth(&poly, &mut roots);
    }

    let mut last = None;
    for _ in 0..=MAX_ESCALATIONS {
        let poly = ScaledPolynomial::<T>::monic(n, bits);
        widen_all(&mut roots, bits);
        let outcome = aberth(&poly, &mut roots);
        let (residuals, radii) = diagnostics(&poly, &roots);
        let max_radius_log2 = radii
            .iter()
            .map(|r| r.log2_abs())
            .fold(f64::NEG_INFINITY, f64::max);
        match outcome {
            Ok(_) if max_radius_log2 <= -(bits as f64) / 4.0 => {
                let cluster_warnings = cluster_flags(&roots, &radii);
                return Ok(RootSet {
                    n,
                    precision_bits: bits,
                    seed,
                    roots,
                    residuals,
                    newton_radii: radii,
                    cluster_warnings,
                });
            }
            Ok(sweeps) => {
                last = Some((bits, sweeps, f64::NEG_INFINITY, max_radius_log2));
            }
            Err((sweeps, step)) => {
                last = Some((bits, sweeps, step, max_radius_log2));
            }
        }
        if T::FIXED_PRECISION.is_some() {
            break;
        }
        bits = bits.saturating_mul(2);
    }
    let (bits, sweeps, max_step_log2, max_radius_log2) = last.expect("at least one level runs");
    Err(RootError::NoConvergence {
        n,
        bits,
        sweeps,
        max_step_log2,
        max_radius_log2,
    })
}

/// Recomputes residuals and Newton radii at twice the working precision.
pub fn certify<T: Real>(rs: &RootSet<T>) -> Result<RootSet<T>, RootError> {
    let bits = T::effective_precision(rs.precision_bits.saturating_mul(2));
    let poly = ScaledPolynomial::<T>::monic(rs.n, bits);
    let raised: Vec<Complex<T>> = rs
        .roots
        .iter()
        .map(|r| r.clone().with_precision(bits))
        .collect();
    let (residuals, radii) = diagnostics(&poly, &raised);
    let limit_log2 = -(rs.precision_bits as f64) / 8.0;
    for (index, r) in residuals.iter().enumerate() {
        let residual_log2 = r.log2_abs();
        if residual_log2 > limit_log2 || !r.is_finite() {
            return Err(RootError::CertificationFailed {
                index,
                residual_log2,
                limit_log2,
            });
        }
    }
    let cluster_warnings = cluster_flags(&rs.roots, &radii);
    Ok(RootSet {
        n: rs.n,
        precision_bits: rs.precision_bits,
        seed: rs.seed,
        roots: rs.roots.clone(),
        residuals,
        newton_radii: radii,
        cluster_warnings,
    })
}

/// Cheaper level used to bring the iterates close before the final level.
fn warmup_precision(n: usize) -> u32 {
    (2 * n as u32 + 128).max(256)
}

fn widen_all<T: Real>(roots: &mut [Complex<T>], bits: u32) {
    for r in roots.iter_mut() {
        r.re.set_precision(bits);
        r.im.set_precision(bits);
    }
}

/// Gauss–Seidel Aberth sweeps. Returns the sweep count on convergence, or
/// the sweep count and the last max step (log2) on failure.
fn aberth<T: Real>(
    poly: &ScaledPolynomial<T>,
    roots: &mut [Complex<T>],
) -> Result<usize, (usize, f64)> {
    let n = roots.len();
    let bits = poly.precision_bits;
    let tol = -(bits as f64) / 2.0;
    let one = T::from_f64(1.0, bits);
    let mut done = vec![false; n];
    let mut a = T::from_f64(0.0, bits);
    let mut b = T::from_f64(0.0, bits);
    let mut den = T::from_f64(0.0, bits);
    let mut t = T::from_f64(0.0, bits);
    let mut max_step = f64::INFINITY;
    for sweep in 1..=MAX_SWEEPS {
        max_step = f64::NEG_INFINITY;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = poly.eval_with_derivative(&roots[i]);
            if p.is_zero_c() {
                done[i] = true;
                continue;
            }
            if dp.is_zero_c() {
                max_step = f64::INFINITY;
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex::<T>::from_f64s(0.0, 0.0, bits);
            for j in 0..n {
                if j == i {
                    continue;
                }
                a.clone_from(&roots[i].re);
                a -= &roots[j].re;
                b.clone_from(&roots[i].im);
                b -= &roots[j].im;
                den.clone_from(&a);
                den *= &a;
                t.clone_from(&b);
                t *= &b;
                den += &t;
                a /= &den;
                b /= &den;
                s.re += &a;
                s.im -= &b;
            }
            let denom = Complex::new(one.clone(), T::from_f64(0.0, bits)) - ratio.clone() * s;
            let w = ratio / denom;
            let step = w.log2_abs();
            roots[i].re -= &w.re;
            roots[i].im -= &w.im;
            if step < tol {
                done[i] = true;
            }
            if step.is_nan() {
                max_step = f64::INFINITY;
            } else {
                max_step = max_step.max(step);
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(sweep);
        }
    }
    Err((MAX_SWEEPS, max_step))
}

/// Normalized residuals and Newton radii, rounded to a short precision.
fn diagnostics<T: Real>(poly: &ScaledPolynomial<T>, roots: &[Complex<T>]) -> (Vec<T>, Vec<T>) {
    let coeff_max = poly
        .coeffs
        .iter()
        .map(|c| c.abs())
        .fold(T::from_f64(0.0, poly.precision_bits), T::max_of);
    let normwise_scale = |cmax: &T, x_abs: &T| {
        let mut acc = T::from_f64(0.0, poly.precision_bits);
        for _ in 0..=poly.n {
            acc *= x_abs;
            acc += T::from_f64(1.0, poly.precision_bits);
        }
        acc *= cmax;
        acc
    };
    roots
        .par_iter()
        .map(|r| {
            let (p, dp) = poly.eval_with_derivative(r);
            let scale = normwise_scale(&coeff_max, &r.cabs());
            let mut residual = p.cabs();
            if !scale.is_zero() {
                residual /= &scale;
            }
            let radius = if p.is_zero_c() {
                T::from_f64(0.0, poly.precision_bits)
            } else if dp.is_zero_c() {
                T::from_f64(f64::INFINITY, poly.precision_bits)
            } else {
                (p / dp).cabs()
            };
            (
                residual.with_precision(DIAGNOSTIC_BITS),
                radius.with_precision(DIAGNOSTIC_BITS),
            )
        })
        .unzip()
}

fn cluster_flags<T: Real>(roots: &[Complex<T>], radii: &[T]) -> Vec<usize> {
    let pts: Vec<Complex<f64>> = roots.iter().map(|r| r.to_c64()).collect();
    (0..pts.len())
        .filter(|&i| {
            let nearest = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| (pts[i] - q).norm())
                .fold(f64::INFINITY, f64::min);
            radii[i].to_f64() > 0.5 * nearest
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mpf;
    use num_traits::Zero;

    fn sorted_c64(rs: &RootSet<Mpf>) -> Vec<Complex<f64>> {
        let mut v = rs.roots_c64();
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn degree_zero_is_rejected() {
        assert_eq!(
            find_roots::<Mpf>(0, Precision::Auto, 0).unwrap_err(),
            RootError::InvalidDegree
        );
    }

    #[test]
    fn low_precision_is_rejected() {
        assert!(matches!(
            find_roots::<Mpf>(3, Precision::Bits(32), 0),
            Err(RootError::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn linear_case() {
        let rs = find_roots::<Mpf>(1, Precision::Auto, 0).unwrap();
        assert_eq!(rs.roots[0].to_c64(), Complex::new(0.5, 0.0));
        let c = certify(&rs).unwrap();
        assert!(c.residuals[0].is_zero());
        assert!(c.newton_radii[0].is_zero());
    }

    #[test]
    fn quadratic_case() {
        let rs = find_roots::<Mpf>(2, Precision::Auto, 0).unwrap();
        let v = sorted_c64(&rs);
        assert!(v[0].norm() < 1e-60);
        assert!((v[1] - Complex::new(0.5, 0.0)).norm() < 1e-60);
    }

    #[test]
    fn initial_guesses_are_seeded() {
        let a = initial_guesses::<f64>(40, 7, 53);
        let b = initial_guesses::<f64>(40, 7, 53);
        let c = initial_guesses::<f64>(40, 8, 53);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let inner = a
            .iter()
            .filter(|z| (z.norm() - INNER_RADIUS).abs() < 1e-12)
            .count();
        assert_eq!(inner, 10);
    }

    #[test]
    fn native_floats_work_for_small_degree() {
        let rs = find_roots::<f64>(5, Precision::Auto, 0).unwrap();
        assert_eq!(rs.precision_bits, 53);
        assert_eq!(rs.roots.len(), 5);
    }

    #[test]
    fn clusters_are_flagged() {
        let roots = vec![
            Complex::new(0.0, 0.0),
            Complex::new(1e-3, 0.0),
            Complex::new(1.0, 0.0),
        ];
        let radii = vec![1e-3, 1e-9, 1e-9];
        assert_eq!(cluster_flags(&roots, &radii), vec![0]);
    }
}
