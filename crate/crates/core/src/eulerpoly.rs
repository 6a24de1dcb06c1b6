//! Exact Euler polynomials and multiprecision evaluation of `E_n(nx)/n!`.
//!
//! Coefficients come from the recurrence obtained by multiplying the
//! generating function `2e^{tx}/(e^t+1)` through by `e^t + 1`:
//!
//! ```text
//! E_n(x) = x^n - 1/2 * sum_{k<n} C(n,k) E_k(x)
//! ```
//!
//! Evaluating that recurrence at `x = 0` yields the constants `e_k = E_k(0)`,
//! and since `E_n' = n E_{n-1}` the coefficient of `x^j` in `E_n` is
//! `C(n,j) e_{n-j}`. Only the constants are cached; each polynomial is then
//! assembled in `O(n)` rational operations and cached by degree.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{mul_add_in_place, mul_add_real_in_place, ComplexReal, Real, MIN_MP_PRECISION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EulerError {
    /// `2^n E_n(1/2)` did not reduce to an integer.
    #[error("euler number for n = {n} is not integral: {value}")]
    NotIntegral { n: usize, value: String },
    #[error("precision {bits} is below the minimum of {min} bits")]
    PrecisionTooLow { bits: u32, min: u32 },
    /// The a-priori Horner error bound exceeds the computed magnitude.
    #[error("evaluation at {bits} bits lost all significance (bound 2^{bound_log2:.1}, value 2^{value_log2:.1})")]
    PrecisionInsufficient {
        bits: u32,
        bound_log2: f64,
        value_log2: f64,
    },
    #[error("invalid coefficient document: {0}")]
    InvalidDocument(String),
}

/// `E_n` with exact rational coefficients, `coeffs[k]` multiplying `x^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPolynomial {
    pub n: usize,
    pub coeffs: Vec<BigRational>,
}

impl ExactPolynomial {
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn to_document(&self) -> CoeffDocument {
        CoeffDocument {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| [c.numer().to_string(), c.denom().to_string()])
                .collect(),
        }
    }

    pub fn from_document(doc: &CoeffDocument) -> Result<Self, EulerError> {
        if doc.coeffs.len() != doc.n + 1 {
            return Err(EulerError::InvalidDocument(format!(
                "expected {} coefficients, found {}",
                doc.n + 1,
                doc.coeffs.len()
            )));
        }
        let coeffs = doc
            .coeffs
            .iter()
            .map(|[num, den]| {
                let num: BigInt = num
                    .parse()
                    .map_err(|_| EulerError::InvalidDocument(format!("bad numerator {num:?}")))?;
                let den: BigInt = den
                    .parse()
                    .map_err(|_| EulerError::InvalidDocument(format!("bad denominator {den:?}")))?;
                if den.is_zero() {
                    return Err(EulerError::InvalidDocument("zero denominator".into()));
                }
                Ok(BigRational::new(num, den))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExactPolynomial { n: doc.n, coeffs })
    }
}

/// JSON form: `{"n": int, "coeffs": [["num","den"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffDocument {
    pub n: usize,
    pub coeffs: Vec<[String; 2]>,
}

struct Tables {
    /// `E_k(0)` for `k < constants.len()`.
    constants: RwLock<Vec<BigRational>>,
    polys: RwLock<HashMap<usize, Arc<ExactPolynomial>>>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| Tables {
        constants: RwLock::new(vec![BigRational::one()]),
        polys: RwLock::new(HashMap::new()),
    })
}

/// Binomial row `C(n, 0..=n)`.
pub(crate) fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// `E_0(0), ..., E_n(0)`.
fn euler_constants(n: usize) -> Vec<BigRational> {
    let t = tables();
    {
        let c = t.constants.read().expect("constant table poisoned");
        if c.len() > n {
            return c[..=n].to_vec();
        }
    }
    let mut c = t.constants.write().expect("constant table poisoned");
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    while c.len() <= n {
        let m = c.len();
        let row = binomial_row(m);
        let mut acc = BigRational::zero();
        for (k, e) in c.iter().enumerate() {
            if !e.is_zero() {
                acc += e * BigRational::from_integer(row[k].clone());
            }
        }
        c.push(-(acc * &half));
    }
    c[..=n].to_vec()
}

/// Exact `E_n`; repeated calls for the same `n` return the cached value.
pub fn euler_polynomial(n: usize) -> Arc<ExactPolynomial> {
    let t = tables();
    if let Some(p) = t.polys.read().expect("polynomial cache poisoned").get(&n) {
        return Arc::clone(p);
    }
    let constants = euler_constants(n);
    let row = binomial_row(n);
    let coeffs = (0..=n)
        .map(|j| &constants[n - j] * BigRational::from_integer(row[j].clone()))
        .collect();
    let poly = Arc::new(ExactPolynomial { n, coeffs });
    let mut polys = t.polys.write().expect("polynomial cache poisoned");
    Arc::clone(polys.entry(n).or_insert(poly))
}

/// Exact Horner evaluation.
pub fn eval_exact(p: &ExactPolynomial, q: &BigRational) -> BigRational {
    horner(&p.coeffs, q)
}

/// Horner's rule over any commutative ring with cheap clones.
pub fn horner<R>(coeffs: &[R], x: &R) -> R
where
    R: Clone + Zero + std::ops::Mul<Output = R> + std::ops::Add<Output = R>,
{
    coeffs
        .iter()
        .rev()
        .fold(R::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Euler number `2^n E_n(1/2)`.
pub fn euler_number(n: usize) -> Result<BigInt, EulerError> {
    let p = euler_polynomial(n);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let v = eval_exact(&p, &half) * BigRational::from_integer(BigInt::one() << n);
    if !v.denom().is_one() {
        return Err(EulerError::NotIntegral {
            n,
            value: v.to_string(),
        });
    }
    Ok(v.to_integer())
}

/// Exact coefficients of `P_n(x) = E_n(nx)/n!`: `d_k = c_k n^k / n!`.
pub fn scaled_coefficients(n: usize) -> Vec<BigRational> {
    let p = euler_polynomial(n);
    let fact: BigInt = (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
    let nn = BigInt::from(n);
    let mut pow = BigInt::one();
    let mut out = Vec::with_capacity(n + 1);
    for c in &p.coeffs {
        out.push(c * BigRational::new(pow.clone(), fact.clone()));
        pow *= &nn;
    }
    out
}

/// Exact coefficients of the monic normalization of `P_n`:
/// `a_k = c_k / n^{n-k}`, `a_n = 1`.
pub fn monic_scaled_coefficients(n: usize) -> Vec<BigRational> {
    let p = euler_polynomial(n);
    let nn = BigInt::from(n.max(1));
    let mut pow = BigInt::one();
    let mut out = vec![BigRational::zero(); n + 1];
    for k in (0..=n).rev() {
        out[k] = &p.coeffs[k] / BigRational::from_integer(pow.clone());
        pow *= &nn;
    }
    out
}

/// `d_k = c_k n^k/n!` rounded once to the working precision, plus the
/// magnitudes needed for a Horner error bound.
#[derive(Clone, Debug)]
pub struct ScaledPolynomial<T: Real> {
    pub n: usize,
    pub precision_bits: u32,
    pub coeffs: Vec<T>,
    abs_coeffs: Vec<T>,
}

/// A value together with a rigorous-in-spirit bound on its rounding error.
#[derive(Clone, Debug)]
pub struct BoundedValue<T: Real> {
    pub value: Complex<T>,
    pub error_bound: T,
}

impl<T: Real> ScaledPolynomial<T> {
    pub fn new(n: usize, prec: u32) -> Self {
        Self::from_exact(n, &scaled_coefficients(n), prec)
    }

    /// Monic normalization `a_k = d_k / d_n`.
    pub fn monic(n: usize, prec: u32) -> Self {
        Self::from_exact(n, &monic_scaled_coefficients(n), prec)
    }

    fn from_exact(n: usize, exact: &[BigRational], prec: u32) -> Self {
        let coeffs: Vec<T> = exact.iter().map(|q| T::from_ratio(q, prec)).collect();
        let abs_coeffs = coeffs.iter().map(|c| c.abs()).collect();
        ScaledPolynomial {
            n,
            precision_bits: T::effective_precision(prec),
            coeffs,
            abs_coeffs,
        }
    }

    pub fn eval(&self, x: &Complex<T>) -> Complex<T> {
        let prec = self.precision_bits;
        let x = x.clone().with_precision(prec);
        let mut acc = Complex::new(T::from_f64(0.0, prec), T::from_f64(0.0, prec));
        let mut t = T::from_f64(0.0, prec);
        for c in self.coeffs.iter().rev() {
            mul_add_real_in_place(&mut acc, &x, c, &mut t);
        }
        acc
    }

    /// Value and derivative by a simultaneous Horner pass.
    pub fn eval_with_derivative(&self, x: &Complex<T>) -> (Complex<T>, Complex<T>) {
        let prec = self.precision_bits;
        let zero = || Complex::new(T::from_f64(0.0, prec), T::from_f64(0.0, prec));
        let mut p = zero();
        let mut dp = zero();
        let mut t = T::from_f64(0.0, prec);
        for c in self.coeffs.iter().rev() {
            let pc = p.clone();
            mul_add_in_place(&mut dp, x, &pc, &mut t);
            mul_add_real_in_place(&mut p, x, c, &mut t);
        }
        (p, dp)
    }

    /// `sum |d_k| |x|^k`, the scale against which cancellation is measured.
    pub fn abs_scale(&self, x_abs: &T) -> T {
        let mut acc = T::from_f64(0.0, self.precision_bits);
        for c in self.abs_coeffs.iter().rev() {
            acc *= x_abs;
            acc += c;
        }
        acc
    }

    /// Horner evaluation with the standard a-priori bound
    /// `gamma_{2n+2} * sum |d_k||x|^k`, inflated for complex arithmetic.
    pub fn eval_bounded(&self, x: &Complex<T>) -> BoundedValue<T> {
        let value = self.eval(x);
        let x_abs = x.cabs();
        let scale = self.abs_scale(&x_abs);
        let mut bound = T::unit_roundoff(self.precision_bits);
        bound *= T::from_f64(4.0 * (2 * self.n + 2) as f64, self.precision_bits);
        bound *= &scale;
        BoundedValue {
            value,
            error_bound: bound,
        }
    }
}

/// `P_n(x) = E_n(nx)/n!` at `prec` bits.
///
/// Fails with [`EulerError::PrecisionInsufficient`] when the error bound
/// exceeds both the computed magnitude and `2^{-p/2}`; a result that is zero
/// to within `2^{-p/2}` is accepted as a numerical zero.
pub fn eval_scaled<T: Real>(n: usize, x: &Complex<T>, prec: u32) -> Result<Complex<T>, EulerError> {
    if T::FIXED_PRECISION.is_none() && prec < MIN_MP_PRECISION {
        return Err(EulerError::PrecisionTooLow {
            bits: prec,
            min: MIN_MP_PRECISION,
        });
    }
    let poly = ScaledPolynomial::<T>::new(n, prec);
    checked_eval(&poly, x)
}

pub(crate) fn checked_eval<T: Real>(
    poly: &ScaledPolynomial<T>,
    x: &Complex<T>,
) -> Result<Complex<T>, EulerError> {
    let BoundedValue { value, error_bound } = poly.eval_bounded(x);
    let bound_log2 = error_bound.log2_abs();
    let value_log2 = value.log2_abs();
    let half_prec = -(poly.precision_bits as f64) / 2.0;
    if bound_log2 > value_log2 && bound_log2 > half_prec {
        return Err(EulerError::PrecisionInsufficient {
            bits: poly.precision_bits,
            bound_log2,
            value_log2,
        });
    }
    Ok(value)
}

/// Default precision for degree `n`: `max(256, 8n + 64)` bits.
pub fn default_precision(n: usize) -> u32 {
    (8 * n as u64 + 64).clamp(256, u32::MAX as u64) as u32
}

/// Exact reflection check helper: `(-1)^n E_n(q)`.
pub fn reflected_value(p: &ExactPolynomial, q: &BigRational) -> BigRational {
    let v = eval_exact(p, q);
    if p.n.is_odd() {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mpf;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly_of(coeffs: &[(i64, i64)]) -> Vec<BigRational> {
        coeffs.iter().map(|&(n, d)| q(n, d)).collect()
    }

    #[test]
    fn low_degree_polynomials() {
        assert_eq!(euler_polynomial(0).coeffs, poly_of(&[(1, 1)]));
        assert_eq!(euler_polynomial(1).coeffs, poly_of(&[(-1, 2), (1, 1)]));
        assert_eq!(
            euler_polynomial(2).coeffs,
            poly_of(&[(0, 1), (-1, 1), (1, 1)])
        );
        assert_eq!(
            euler_polynomial(3).coeffs,
            poly_of(&[(1, 4), (0, 1), (-3, 2), (1, 1)])
        );
    }

    #[test]
    fn cache_returns_shared_value() {
        let a = euler_polynomial(17);
        let b = euler_polynomial(17);
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn polynomial_recurrence_residual_is_zero() {
        // E_n + 1/2 sum_{k<n} C(n,k) E_k - x^n == 0 coefficientwise.
        for n in 0..=30 {
            let row = binomial_row(n);
            let mut acc = euler_polynomial(n).coeffs.clone();
            for k in 0..n {
                let ek = euler_polynomial(k);
                let w = BigRational::from_integer(row[k].clone()) * q(1, 2);
                for (j, c) in ek.coeffs.iter().enumerate() {
                    acc[j] += c * &w;
                }
            }
            acc[n] -= BigRational::one();
            assert!(acc.iter().all(Zero::is_zero), "residual nonzero at n = {n}");
        }
    }

    #[test]
    fn euler_numbers_small() {
        let got: Vec<i64> = (0..=8)
            .map(|n| euler_number(n).unwrap().try_into().unwrap())
            .collect();
        assert_eq!(got, vec![1, 0, -1, 0, 5, 0, -61, 0, 1385]);
    }

    #[test]
    fn exact_evaluation_examples() {
        assert!(eval_exact(&euler_polynomial(1), &q(1, 2)).is_zero());
        assert!(eval_exact(&euler_polynomial(2), &q(1, 1)).is_zero());
        assert!(eval_exact(&euler_polynomial(3), &q(1, 2)).is_zero());
    }

    #[test]
    fn scaled_evaluation_at_roots_is_numerically_zero() {
        for (n, x) in [(1usize, 0.5f64), (2, 0.5)] {
            let z = Complex::<Mpf>::from_f64s(x, 0.0, 128);
            let v = eval_scaled(n, &z, 128).unwrap();
            assert!(v.is_zero_c());
        }
        let sixth = Mpf::from_ratio(&q(1, 6), 256);
        let z = Complex::new(sixth, Mpf::from_f64(0.0, 256));
        let v = eval_scaled(3, &z, 256).unwrap();
        assert!(v.log2_abs() < -250.0);
    }

    #[test]
    fn scaled_evaluation_matches_exact_rational() {
        // P_5(3/10) = E_5(3/2)/120
        let p5 = euler_polynomial(5);
        let exact = eval_exact(&p5, &q(3, 2)) / BigRational::from_integer(BigInt::from(120));
        let z =
            Complex::<Mpf>::from_reals(Mpf::from_ratio(&q(3, 10), 200), Mpf::from_f64(0.0, 200));
        let v = eval_scaled(5, &z, 200).unwrap();
        let diff = v.re - Mpf::from_ratio(&exact, 200);
        assert!(diff.log2_abs() < -190.0);
    }

    #[test]
    fn precision_floor_enforced() {
        let z = Complex::<Mpf>::from_f64s(0.1, 0.0, 64);
        assert!(matches!(
            eval_scaled(4, &z, 32),
            Err(EulerError::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn insufficient_precision_is_reported() {
        // 2^30 (x - 1) at x = 1 + 2^-52 leaves a single significant bit.
        let big = BigRational::from_integer(BigInt::one() << 30);
        let poly = ScaledPolynomial::<f64>::from_exact(1, &[-big.clone(), big], 53);
        let x = Complex::new(1.0 + f64::EPSILON, 0.0);
        assert!(matches!(
            checked_eval(&poly, &x),
            Err(EulerError::PrecisionInsufficient { .. })
        ));
        let z = Complex::<Mpf>::from_f64s(0.3, 0.0, 64);
        assert!(eval_scaled(80, &z, 64).is_ok());
    }

    #[test]
    fn monic_coefficients_are_normalized() {
        let a = monic_scaled_coefficients(7);
        assert!(a[7].is_one());
        let d = scaled_coefficients(7);
        for k in 0..=7 {
            assert_eq!(&a[k] * &d[7], d[k]);
        }
    }

    #[test]
    fn coefficient_document_round_trip() {
        let p = euler_polynomial(9);
        let doc = p.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        let back: CoeffDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(
            *ExactPolynomial::from_document(&back).unwrap().coeffs,
            p.coeffs
        );
    }

    #[test]
    fn default_precision_policy() {
        assert_eq!(default_precision(10), 256);
        assert_eq!(default_precision(400), 3264);
    }
}
