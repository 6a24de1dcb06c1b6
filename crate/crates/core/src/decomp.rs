//! The split `E_n(nx)/n! = M_{n,mu}(x) + K_{n,mu}(x)`, the saddle-point
//! form of `M`, the function `g`, and the normalized `h_n`.
//!
//! `K` collects the poles of `1/(xi (e^xi + 1))` at `+-(2k+1) pi i`,
//! `k <= mu`; `M` is a contour integral against
//!
//! ```text
//! F_mu(xi) = 1/(xi (e^xi + 1)) + sum_{k<=mu} 2/(xi^2 + ((2k+1) pi)^2),
//! ```
//!
//! which is analytic on `0 < |xi| < (2 mu + 3) pi`.

use num_complex::Complex;
use thiserror::Error;

use crate::eulerpoly::{eval_scaled, EulerError};
use crate::scalar::{ComplexReal, Real};
use crate::szego::partial_sum;

/// Radius around a cancelled pole inside which `f_mu` switches to the local
/// expansion.
pub const REGULARIZATION_RADIUS: f64 = std::f64::consts::PI / 100.0;
/// Minimum order of the local expansion.
pub const MIN_TAYLOR_ORDER: usize = 8;
const GUARD_BITS: u32 = 16;
/// Validity margin for the saddle-point form.
const SADDLE_MARGIN: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompError {
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("quadrature with {nodes} nodes changed by 2^{change_log2:.1} on doubling")]
    QuadratureNotConverged { nodes: usize, change_log2: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Precision(#[from] EulerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecompConfig {
    pub mu: u32,
    pub quadrature_nodes: usize,
}

impl DecompConfig {
    /// `max(8n, 512)` nodes.
    pub fn for_degree(n: usize, mu: u32) -> Self {
        DecompConfig {
            mu,
            quadrature_nodes: min_nodes(n),
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), DecompError> {
        if self.quadrature_nodes < min_nodes(n) {
            return Err(DecompError::InvalidConfig(format!(
                "{} quadrature nodes is below max(8n, 512) = {} for n = {n}",
                self.quadrature_nodes,
                min_nodes(n)
            )));
        }
        Ok(())
    }
}

fn min_nodes(n: usize) -> usize {
    (8 * n).max(512)
}

fn odd_pi<T: Real>(k: u32, prec: u32) -> T {
    let mut v = T::pi(prec);
    v *= T::from_f64((2 * k + 1) as f64, prec);
    v
}

/// `F_mu(xi)`.
pub fn f_mu<T: Real>(mu: u32, xi: &Complex<T>) -> Result<Complex<T>, DecompError> {
    let prec = xi.precision();
    let work = T::effective_precision(prec + GUARD_BITS);
    let xi = xi.clone().with_precision(work);
    let r = xi.cabs();
    let outer = odd_pi::<T>(mu + 1, work);
    if r.is_zero() || r >= outer {
        return Err(DecompError::DomainViolation(format!(
            "f_mu needs 0 < |xi| < (2mu+3)pi, got |xi| = {}",
            r.to_f64()
        )));
    }
    // Nearest cancelled pole, if within the regularization radius.
    let mut near = None;
    for k in 0..=mu {
        for negate in [false, true] {
            let mut pole_im = odd_pi::<T>(k, work);
            if negate {
                pole_im = -pole_im;
            }
            let d = Complex::new(xi.re.clone(), xi.im.clone() - pole_im.clone()).cabs();
            if d.to_f64() < REGULARIZATION_RADIUS {
                near = Some((k, pole_im));
            }
        }
    }
    let out = match near {
        None => {
            let mut acc = singular_part(&xi);
            for k in 0..=mu {
                acc = acc + pair_term(&xi, k, work);
            }
            acc
        }
        Some((k0, pole_im)) => {
            let xi0 = Complex::new(T::from_f64(0.0, work), pole_im);
            let h = xi.clone() - xi0.clone();
            let mut acc = regular_part(&xi0, &h, work);
            // Partner pole of the same pair, then the remaining pairs.
            acc = acc + single_pole_term(&xi, &(-xi0.clone()));
            for k in 0..=mu {
                if k != k0 {
                    acc = acc + pair_term(&xi, k, work);
                }
            }
            acc
        }
    };
    Ok(out.with_precision(prec))
}

/// `1/(xi (e^xi + 1))`.
fn singular_part<T: Real>(xi: &Complex<T>) -> Complex<T> {
    let prec = xi.precision();
    let den = xi.clone() * (xi.cexp() + Complex::from_f64s(1.0, 0.0, prec));
    den.creciprocal()
}

/// `2/(xi^2 + ((2k+1) pi)^2)`, the two cancelling terms at `+-(2k+1) pi i`.
fn pair_term<T: Real>(xi: &Complex<T>, k: u32, prec: u32) -> Complex<T> {
    let a = odd_pi::<T>(k, prec);
    let mut a2 = a.clone();
    a2 *= &a;
    let mut den = xi.clone() * xi.clone();
    den.re += &a2;
    den.creciprocal().scale_by(&T::from_f64(2.0, prec))
}

/// `1/(c (xi - c))`.
fn single_pole_term<T: Real>(xi: &Complex<T>, c: &Complex<T>) -> Complex<T> {
    (c.clone() * (xi.clone() - c.clone())).creciprocal()
}

/// `1/(xi0 h) + 1/(xi (e^xi + 1))` at `xi = xi0 + h` with `e^{xi0} = -1`:
/// `(xi0 psi + phi) / (xi0 (xi0 + h) phi)` where `phi = (e^h - 1)/h` and
/// `psi = (phi - 1)/h`.
fn regular_part<T: Real>(xi0: &Complex<T>, h: &Complex<T>, prec: u32) -> Complex<T> {
    let (phi, psi) = phi_psi(h, prec);
    let num = xi0.clone() * psi + phi.clone();
    let den = xi0.clone() * (xi0.clone() + h.clone()) * phi;
    num / den
}

/// `phi(h) = sum h^j/(j+1)!` and `psi(h) = sum h^j/(j+2)!`, summed to at
/// least [`MIN_TAYLOR_ORDER`] terms and until terms fall below the precision.
fn phi_psi<T: Real>(h: &Complex<T>, prec: u32) -> (Complex<T>, Complex<T>) {
    let limit = -(prec as f64) - 4.0;
    let mut phi = Complex::<T>::from_f64s(0.0, 0.0, prec);
    let mut psi = Complex::<T>::from_f64s(0.0, 0.0, prec);
    // term = h^j/(j+1)!
    let mut term = Complex::<T>::from_f64s(1.0, 0.0, prec);
    let mut j = 0usize;
    loop {
        phi = phi + term.clone();
        let d = T::from_f64((j + 2) as f64, prec);
        let mut psi_term = term.clone();
        psi_term.re /= &d;
        psi_term.im /= &d;
        psi = psi + psi_term;
        term = term * h.clone();
        term.re /= &d;
        term.im /= &d;
        j += 1;
        if j >= MIN_TAYLOR_ORDER && (term.is_zero_c() || term.log2_abs() < limit) {
            break;
        }
    }
    (phi, psi)
}

/// `i^m` for `m mod 4`, as `(re, im)` signs.
fn i_power(m: u64) -> (f64, f64) {
    match m % 4 {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0),
        2 => (-1.0, 0.0),
        _ => (0.0, -1.0),
    }
}

/// `K_{n,mu}(x) = 2 sum_{k<=mu} [S_{n-1}(n x a)/a^{n+1} + S_{n-1}(-n x a)/(-a)^{n+1}]`
/// with `a = (2k+1) pi i`.
pub fn k_mu<T: Real>(n: usize, mu: u32, x: &Complex<T>, p: u32) -> Result<Complex<T>, DecompError> {
    if n == 0 {
        return Err(DecompError::DomainViolation("k_mu needs n >= 1".into()));
    }
    let work = T::effective_precision(p + GUARD_BITS);
    let x = x.clone().with_precision(work);
    let m = n as u64 + 1;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let (pr, pi_) = i_power((4 - m % 4) % 4);
    let inv_phase = Complex::<T>::from_f64s(pr, pi_, work);
    let mut acc = Complex::<T>::from_f64s(0.0, 0.0, work);
    for k in 0..=mu {
        let a = odd_pi::<T>(k, work);
        // n x a with a = (2k+1) pi i.
        let nx = x.scale_by(&T::from_f64(n as f64, work));
        let arg = Complex::new(-nx.im.clone(), nx.re.clone()).scale_by(&a);
        let plus = partial_sum(n - 1, &arg, work);
        let minus = partial_sum(n - 1, &(-arg), work);
        // (-a)^{n+1} = (-1)^{n+1} a^{n+1}
        let combined = plus + minus.scale_by(&T::from_f64(sign, work));
        let mag = a.powi(m as i64);
        let mut term = combined * inv_phase.clone();
        term.re /= &mag;
        term.im /= &mag;
        acc = acc + term;
    }
    Ok(acc
        .scale_by(&T::from_f64(2.0, work))
        .with_precision(T::effective_precision(p)))
}

/// `M_{n,mu}(x)` by the trapezoid rule on `|xi| = 1`:
/// `(2/N) sum_j e^{n x xi_j} xi_j^{1-n} F_mu(xi_j)`, checked against the same
/// rule with twice the nodes. Works at the precision of `x`.
pub fn m_contour<T: Real>(
    n: usize,
    x: &Complex<T>,
    cfg: &DecompConfig,
) -> Result<Complex<T>, DecompError> {
    if n == 0 {
        return Err(DecompError::DomainViolation(
            "m_contour needs n >= 1".into(),
        ));
    }
    cfg.validate(n)?;
    let prec = x.precision();
    let work = T::effective_precision(prec + GUARD_BITS);
    let x = x.clone().with_precision(work);
    let nodes = cfg.quadrature_nodes;
    let even = contour_sum(n, cfg.mu, &x, 2 * nodes, 0, 2, work)?;
    let odd = contour_sum(n, cfg.mu, &x, 2 * nodes, 1, 2, work)?;
    let mut w_coarse = T::from_f64(2.0, work);
    w_coarse /= T::from_f64(nodes as f64, work);
    let mut w_fine = T::from_f64(1.0, work);
    w_fine /= T::from_f64(nodes as f64, work);
    let m_coarse = even.scale_by(&w_coarse);
    let m_fine = (even + odd).scale_by(&w_fine);
    let change = (m_fine.clone() - m_coarse).cabs();
    let change_log2 = change.log2_abs();
    let scale_log2 = m_fine.log2_abs().max(0.0);
    if change_log2 > scale_log2 - prec as f64 / 4.0 {
        return Err(DecompError::QuadratureNotConverged { nodes, change_log2 });
    }
    Ok(m_fine.with_precision(prec))
}

/// `sum_{j = start, start+step, ...} e^{n x xi_j} xi_j^{1-n} F_mu(xi_j)` with
/// `xi_j = exp(2 pi i j / total)`.
fn contour_sum<T: Real>(
    n: usize,
    mu: u32,
    x: &Complex<T>,
    total: usize,
    start: usize,
    step: usize,
    prec: u32,
) -> Result<Complex<T>, DecompError> {
    let mut two_pi = T::pi(prec);
    two_pi *= T::from_f64(2.0, prec);
    let nn = T::from_f64(n as f64, prec);
    let mut acc = Complex::<T>::from_f64s(0.0, 0.0, prec);
    let mut j = start;
    while j < total {
        let mut theta = two_pi.clone();
        theta *= T::from_f64(j as f64, prec);
        theta /= T::from_f64(total as f64, prec);
        let xi = Complex::new(theta.cos(), theta.sin());
        // e^{n x xi} xi^{1-n} = exp(n x xi + i (1-n) theta)
        let mut expo = (x.clone() * xi.clone()).scale_by(&nn);
        let mut rot = theta.clone();
        rot *= T::from_f64(1.0 - n as f64, prec);
        expo.im += &rot;
        let w = expo.cexp();
        acc = acc + w * f_mu(mu, &xi)?;
        j += step;
    }
    Ok(acc)
}

/// `eval_scaled(n, x, p) - k_mu(n, mu, x, p)`.
pub fn m_exact<T: Real>(
    n: usize,
    mu: u32,
    x: &Complex<T>,
    p: u32,
) -> Result<Complex<T>, DecompError> {
    let e = eval_scaled(n, &x.clone().with_precision(p), p)?;
    let k = k_mu(n, mu, x, p)?;
    Ok(e - k)
}

/// Leading saddle-point term `sqrt(2/pi) (x e)^n F_mu(1/x) / (sqrt(n) x)`,
/// valid for `|x| >= 1/((2 mu + 1) pi + 10^-3)`.
pub fn m_saddle<T: Real>(n: usize, mu: u32, x: &Complex<T>) -> Result<Complex<T>, DecompError> {
    let prec = x.precision();
    let work = T::effective_precision(prec + GUARD_BITS + 16);
    let x = x.clone().with_precision(work);
    let r = x.cabs().to_f64();
    let lower = 1.0 / ((2 * mu + 1) as f64 * std::f64::consts::PI + SADDLE_MARGIN);
    if !(r >= lower) {
        return Err(DecompError::DomainViolation(format!(
            "m_saddle needs |x| >= {lower}, got {r}"
        )));
    }
    let one = Complex::<T>::from_f64s(1.0, 0.0, work);
    let power = (x.cln() + one)
        .scale_by(&T::from_f64(n as f64, work))
        .cexp();
    let f = f_mu(mu, &x.creciprocal())?;
    let mut c = T::from_f64(2.0, work);
    c /= T::pi(work);
    c /= T::from_f64(n as f64, work);
    let c = c.sqrt();
    Ok((power * f * x.creciprocal())
        .scale_by(&c)
        .with_precision(prec))
}

/// `g(x) = 1/(pi i x e^{1 - pi i x})`.
pub fn g_eval<T: Real>(x: &Complex<T>) -> Result<Complex<T>, DecompError> {
    if x.is_zero_c() {
        return Err(DecompError::DomainViolation(
            "g is undefined at x = 0".into(),
        ));
    }
    let prec = x.precision();
    let work = T::effective_precision(prec + GUARD_BITS);
    let x = x.clone().with_precision(work);
    let z = Complex::new(-x.im.clone(), x.re.clone()).scale_by(&T::pi(work));
    let e = (Complex::<T>::from_f64s(1.0, 0.0, work) - z.clone()).cexp();
    Ok((z * e).creciprocal().with_precision(prec))
}

/// `h_n(x) = E_n(nx) sqrt(n) / (n! (e x)^n)`, combined in logarithmic form.
pub fn normalized_h<T: Real>(n: usize, x: &Complex<T>, p: u32) -> Result<Complex<T>, DecompError> {
    if x.is_zero_c() {
        return Err(DecompError::DomainViolation(
            "h_n is undefined at x = 0".into(),
        ));
    }
    let v = eval_scaled(n, &x.clone().with_precision(p), p)?;
    if v.is_zero_c() {
        return Ok(v);
    }
    let work = T::effective_precision(p + GUARD_BITS + 16);
    let x = x.clone().with_precision(work);
    let one = Complex::<T>::from_f64s(1.0, 0.0, work);
    let mut log = v.with_precision(work).cln();
    let mut half_ln_n = T::from_f64(n as f64, work).ln();
    half_ln_n /= T::from_f64(2.0, work);
    log.re += &half_ln_n;
    let sub = (x.cln() + one).scale_by(&T::from_f64(n as f64, work));
    Ok((log - sub).cexp().with_precision(T::effective_precision(p)))
}

/// One line of the decomposition diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompRow<T: Real> {
    pub n: usize,
    pub mu: u32,
    pub x: Complex<T>,
    pub m_exact: Complex<T>,
    /// `None` outside the saddle-point validity region.
    pub m_saddle: Option<Complex<T>>,
    pub k: Complex<T>,
    pub e_over_nfact: Complex<T>,
    /// `|m_contour + k - E_n(nx)/n!|`.
    pub identity_residual: T,
}

pub fn diagnostic_row<T: Real>(
    n: usize,
    mu: u32,
    x: &Complex<T>,
    p: u32,
) -> Result<DecompRow<T>, DecompError> {
    let x = x.clone().with_precision(p);
    let e = eval_scaled(n, &x, p)?;
    let k = k_mu(n, mu, &x, p)?;
    let m_exact = e.clone() - k.clone();
    let m_saddle = m_saddle(n, mu, &x).ok();
    let m_quad = m_contour(n, &x, &DecompConfig::for_degree(n, mu))?;
    let identity_residual = (m_quad + k.clone() - e.clone()).cabs();
    Ok(DecompRow {
        n,
        mu,
        x,
        m_exact,
        m_saddle,
        k,
        e_over_nfact: e,
        identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mpf;
    use num_traits::Zero;

    fn c(re: f64, im: f64, prec: u32) -> Complex<Mpf> {
        Complex::from_f64s(re, im, prec)
    }

    #[test]
    fn f_mu_at_one() {
        let v = f_mu(0, &c(1.0, 0.0, 128)).unwrap();
        let e = std::f64::consts::E;
        let pi2 = std::f64::consts::PI.powi(2);
        let want = 1.0 / (e + 1.0) + 2.0 / (pi2 + 1.0);
        assert!((v.re.to_f64() - want).abs() < 1e-15);
        assert!(v.im.is_zero());
    }

    #[test]
    fn f_mu_domain() {
        assert!(f_mu(0, &c(0.0, 0.0, 128)).is_err());
        assert!(f_mu(0, &c(3.0 * std::f64::consts::PI + 1e-9, 0.0, 128)).is_err());
        assert!(f_mu(1, &c(3.0 * std::f64::consts::PI, 0.0, 128)).is_ok());
    }

    #[test]
    fn regularized_branch_is_continuous() {
        // Inside and just outside the switch radius around pi i.
        let pi = std::f64::consts::PI;
        for mu in [0u32, 1] {
            for (dr, di) in [(0.0314, 0.0), (0.0315, 0.0), (0.0, -0.02), (1e-12, 1e-12)] {
                let xi = c(dr, pi + di, 256);
                let v = f_mu(mu, &xi).unwrap();
                assert!(v.re.is_finite() && v.im.is_finite());
            }
            let a = f_mu(mu, &c(0.0313, pi, 256)).unwrap();
            let b = f_mu(mu, &c(0.0315, pi, 256)).unwrap();
            assert!((a - b).cabs().to_f64() < 1e-3);
        }
    }

    #[test]
    fn phi_psi_series() {
        let h = c(0.01, -0.02, 256);
        let (phi, psi) = phi_psi(&h, 256);
        let hc = h.to_c64();
        let want_phi = (hc.exp() - 1.0) / hc;
        let want_psi = (want_phi - 1.0) / hc;
        assert!((phi.to_c64() - want_phi).norm() < 1e-12);
        assert!((psi.to_c64() - want_psi).norm() < 1e-9);
    }

    #[test]
    fn k_mu_small_case() {
        let k = k_mu(1, 0, &c(0.0, 0.0, 128), 128).unwrap();
        let want = -4.0 / std::f64::consts::PI.powi(2);
        assert!((k.re.to_f64() - want).abs() < 1e-15);
        assert!(k.im.is_zero());
    }

    #[test]
    fn m_exact_small_case() {
        let m = m_exact(1, 0, &c(0.0, 0.0, 128), 128).unwrap();
        let want = -0.5 + 4.0 / std::f64::consts::PI.powi(2);
        assert!((m.re.to_f64() - want).abs() < 1e-15);
    }

    #[test]
    fn g_special_values() {
        let pi = std::f64::consts::PI;
        let e = std::f64::consts::E;
        let g = g_eval(&c(0.0, -1.0 / pi, 128)).unwrap().to_c64();
        assert!((g - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let g = g_eval(&c(1.0 / (pi * e), 0.0, 128)).unwrap();
        assert!((g.cabs().to_f64() - 1.0).abs() < 1e-15);
        let g = g_eval(&c(0.2, 0.0, 128)).unwrap();
        assert!((g.cabs().to_f64() - 1.0 / (0.2 * pi * e)).abs() < 1e-15);
        assert!(g_eval(&c(0.0, 0.0, 128)).is_err());
    }

    #[test]
    fn config_validation() {
        assert_eq!(DecompConfig::for_degree(10, 0).quadrature_nodes, 512);
        assert_eq!(DecompConfig::for_degree(100, 0).quadrature_nodes, 800);
        let bad = DecompConfig {
            mu: 0,
            quadrature_nodes: 100,
        };
        assert!(bad.validate(10).is_err());
    }

    #[test]
    fn saddle_domain() {
        assert!(m_saddle(10, 0, &c(-0.3, 0.0, 128)).is_err());
        assert!(m_saddle(10, 1, &c(0.05, 0.05, 128)).is_err());
        assert!(m_saddle(10, 0, &c(0.4, 0.0, 128)).unwrap().im.is_zero());
    }

    #[test]
    fn normalized_h_domain() {
        assert!(normalized_h(10, &c(0.0, 0.0, 128), 128).is_err());
    }
}
