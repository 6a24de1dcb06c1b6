//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which is implemented for the
//! native `f32`/`f64` types and for [`Mpf`], an MPFR-backed arbitrary
//! precision float. Values of [`Mpf`] carry their own precision; binary
//! operations produce a result at the larger of the two operand precisions,
//! mirroring how MPFR callers normally pick a destination precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};
use rug::float::Round;
use rug::ops::Pow;

/// Precision used for `Mpf` values created without an explicit precision
/// (`zero()`, `one()`, parsing through `Num::from_str_radix`).
pub const MPF_DEFAULT_PREC: u32 = 64;

/// Smallest working precision accepted for multiprecision evaluation.
pub const MIN_MP_PRECISION: u32 = 64;

/// A real scalar usable by the generic numerics in this crate.
pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
    + 'static
{
    /// `Some(bits)` for native floats whose precision cannot change.
    const FIXED_PRECISION: Option<u32>;

    fn precision(&self) -> u32;

    /// Round (or extend) to `prec` bits. A no-op for native floats.
    fn set_precision(&mut self, prec: u32);

    fn from_f64(v: f64, prec: u32) -> Self;
    fn from_ratio(q: &BigRational, prec: u32) -> Self;
    fn from_bigint(v: &BigInt, prec: u32) -> Self;
    fn to_f64(&self) -> f64;

    fn pi(prec: u32) -> Self;
    /// `2^e` at the given precision.
    fn exp2i(e: i64, prec: u32) -> Self;

    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    /// Standard complementary error function `1 - erf(x)`.
    fn erfc(&self) -> Self;
    fn abs(&self) -> Self;
    fn powi(&self, k: i64) -> Self;

    /// `log2 |x|` without overflow; `-inf` for zero.
    fn log2_abs(&self) -> f64;
    fn is_finite(&self) -> bool;
    fn is_sign_negative(&self) -> bool;

    /// Scientific decimal notation with `digits` significant digits.
    fn to_decimal(&self, digits: usize) -> String;
    fn parse_decimal(s: &str, prec: u32) -> Option<Self>;

    fn with_precision(mut self, prec: u32) -> Self {
        self.set_precision(prec);
        self
    }

    /// The precision a computation requested at `prec` actually runs at.
    fn effective_precision(prec: u32) -> u32 {
        Self::FIXED_PRECISION.unwrap_or(prec)
    }

    fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(v), prec)
    }

    /// Unit roundoff `2^{-prec}` for the effective precision.
    fn unit_roundoff(prec: u32) -> Self {
        let p = Self::effective_precision(prec);
        Self::exp2i(-(p as i64), p.max(MIN_MP_PRECISION))
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn hypot(&self, other: &Self) -> Self {
        let mut a = self.clone();
        a *= self;
        let mut b = other.clone();
        b *= other;
        a += b;
        a.sqrt()
    }
}

macro_rules! native_real {
    ($t:ty, $bits:expr) => {
        impl Real for $t {
            const FIXED_PRECISION: Option<u32> = Some($bits);

            fn precision(&self) -> u32 {
                $bits
            }
            fn set_precision(&mut self, _prec: u32) {}
            fn from_f64(v: f64, _prec: u32) -> Self {
                v as $t
            }
            fn from_ratio(q: &BigRational, _prec: u32) -> Self {
                ratio_to_f64(q) as $t
            }
            fn from_bigint(v: &BigInt, _prec: u32) -> Self {
                v.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn pi(_prec: u32) -> Self {
                std::f64::consts::PI as $t
            }
            fn exp2i(e: i64, _prec: u32) -> Self {
                (2.0 as $t).powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn atan2(&self, x: &Self) -> Self {
                <$t>::atan2(*self, *x)
            }
            fn erfc(&self) -> Self {
                // MPFR at 64 bits rounds to the nearest native value.
                rug::Float::with_val(64, *self as f64).erfc().to_f64() as $t
            }
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
            fn powi(&self, k: i64) -> Self {
                <$t>::powf(*self, k as $t)
            }
            fn log2_abs(&self) -> f64 {
                (*self as f64).abs().log2()
            }
            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
            fn is_sign_negative(&self) -> bool {
                <$t>::is_sign_negative(*self)
            }
            fn to_decimal(&self, _digits: usize) -> String {
                // Shortest round-trip representation.
                format!("{:e}", self)
            }
            fn parse_decimal(s: &str, _prec: u32) -> Option<Self> {
                s.trim().parse::<$t>().ok()
            }
        }
    };
}

native_real!(f64, 53);
native_real!(f32, 24);

fn ratio_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        return v;
    }
    rug::Float::with_val(64, &rational_to_rug(q)).to_f64()
}

pub(crate) fn bigint_to_rug(v: &BigInt) -> rug::Integer {
    let (sign, digits) = v.to_u32_digits();
    let mut out = rug::Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == Sign::Minus {
        out = -out;
    }
    out
}

pub(crate) fn rational_to_rug(q: &BigRational) -> rug::Rational {
    rug::Rational::from((bigint_to_rug(q.numer()), bigint_to_rug(q.denom())))
}

/// Arbitrary precision binary float (MPFR), precision carried per value.
pub struct Mpf(pub rug::Float);

impl Clone for Mpf {
    fn clone(&self) -> Self {
        Mpf(self.0.clone())
    }
    fn clone_from(&mut self, source: &Self) {
        self.0.clone_from(&source.0);
    }
}

impl Mpf {
    pub fn new(prec: u32) -> Self {
        Mpf(rug::Float::new(prec.max(rug::float::prec_min())))
    }

    pub fn inner(&self) -> &rug::Float {
        &self.0
    }

    fn binop_prec(&self, other: &Self) -> u32 {
        self.0.prec().max(other.0.prec())
    }

    fn widen_to(&mut self, prec: u32) {
        if self.0.prec() < prec {
            self.0.set_prec(prec);
        }
    }
}

impl fmt::Debug for Mpf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(20)))
    }
}

impl fmt::Display for Mpf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl PartialEq for Mpf {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Mpf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! mpf_assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Mpf> for Mpf {
            fn $m(&mut self, rhs: &Mpf) {
                self.widen_to(rhs.0.prec());
                self.0 $op &rhs.0;
            }
        }
        impl $tr for Mpf {
            fn $m(&mut self, rhs: Mpf) {
                self.widen_to(rhs.0.prec());
                self.0 $op rhs.0;
            }
        }
    };
}

mpf_assign_op!(AddAssign, add_assign, +=);
mpf_assign_op!(SubAssign, sub_assign, -=);
mpf_assign_op!(MulAssign, mul_assign, *=);
mpf_assign_op!(DivAssign, div_assign, /=);
mpf_assign_op!(RemAssign, rem_assign, %=);

macro_rules! mpf_binary_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Mpf {
            type Output = Mpf;
            fn $m(self, rhs: Mpf) -> Mpf {
                let prec = self.binop_prec(&rhs);
                if self.0.prec() == prec {
                    Mpf(self.0 $op rhs.0)
                } else {
                    Mpf(rug::Float::with_val(prec, &self.0 $op &rhs.0))
                }
            }
        }
        impl<'a> $tr<&'a Mpf> for &'a Mpf {
            type Output = Mpf;
            fn $m(self, rhs: &'a Mpf) -> Mpf {
                Mpf(rug::Float::with_val(self.binop_prec(rhs), &self.0 $op &rhs.0))
            }
        }
    };
}

mpf_binary_op!(Add, add, +);
mpf_binary_op!(Sub, sub, -);
mpf_binary_op!(Mul, mul, *);
mpf_binary_op!(Div, div, /);
mpf_binary_op!(Rem, rem, %);

impl Neg for Mpf {
    type Output = Mpf;
    fn neg(self) -> Mpf {
        Mpf(-self.0)
    }
}

impl Zero for Mpf {
    fn zero() -> Self {
        Mpf(rug::Float::with_val(MPF_DEFAULT_PREC, 0))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Mpf {
    fn one() -> Self {
        Mpf(rug::Float::with_val(MPF_DEFAULT_PREC, 1))
    }
}

impl Num for Mpf {
    type FromStrRadixErr = rug::float::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let parsed = rug::Float::parse_radix(s, radix as i32)?;
        Ok(Mpf(rug::Float::with_val(MPF_DEFAULT_PREC, parsed)))
    }
}

impl Real for Mpf {
    const FIXED_PRECISION: Option<u32> = None;

    fn precision(&self) -> u32 {
        self.0.prec()
    }
    fn set_precision(&mut self, prec: u32) {
        self.0.set_prec_round(prec, Round::Nearest);
    }
    fn from_f64(v: f64, prec: u32) -> Self {
        Mpf(rug::Float::with_val(prec, v))
    }
    fn from_ratio(q: &BigRational, prec: u32) -> Self {
        Mpf(rug::Float::with_val(prec, &rational_to_rug(q)))
    }
    fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Mpf(rug::Float::with_val(prec, &bigint_to_rug(v)))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn pi(prec: u32) -> Self {
        Mpf(rug::Float::with_val(prec, rug::float::Constant::Pi))
    }
    fn exp2i(e: i64, prec: u32) -> Self {
        let mut one = rug::Float::with_val(prec, 1);
        one <<= e.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        Mpf(one)
    }
    fn exp(&self) -> Self {
        Mpf(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        Mpf(self.0.clone().ln())
    }
    fn sqrt(&self) -> Self {
        Mpf(self.0.clone().sqrt())
    }
    fn sin(&self) -> Self {
        Mpf(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        Mpf(self.0.clone().cos())
    }
    fn atan2(&self, x: &Self) -> Self {
        let prec = self.binop_prec(x);
        Mpf(rug::Float::with_val(prec, self.0.atan2_ref(&x.0)))
    }
    fn erfc(&self) -> Self {
        Mpf(self.0.clone().erfc())
    }
    fn abs(&self) -> Self {
        Mpf(self.0.clone().abs())
    }
    fn powi(&self, k: i64) -> Self {
        let prec = self.0.prec();
        Mpf(rug::Float::with_val(prec, (&self.0).pow(k)))
    }
    fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        if !self.0.is_finite() {
            return f64::INFINITY;
        }
        let (mant, exp) = self.0.to_f64_exp();
        mant.abs().log2() + exp as f64
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }
    fn to_decimal(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        self.0.to_string_radix(10, Some(digits.max(2)))
    }
    fn parse_decimal(s: &str, prec: u32) -> Option<Self> {
        let parsed = rug::Float::parse(s.trim()).ok()?;
        Some(Mpf(rug::Float::with_val(prec, parsed)))
    }
}

/// Complex helpers for `Complex<T: Real>`; `num_complex` only provides
/// transcendental functions for native floats.
pub trait ComplexReal<T: Real>: Sized {
    fn from_reals(re: T, im: T) -> Self;
    fn from_f64s(re: f64, im: f64, prec: u32) -> Self;
    fn precision(&self) -> u32;
    fn with_precision(self, prec: u32) -> Self;
    fn to_c64(&self) -> Complex<f64>;
    fn cabs(&self) -> T;
    fn carg(&self) -> T;
    fn cexp(&self) -> Self;
    /// Principal logarithm, argument in `(-pi, pi]`.
    fn cln(&self) -> Self;
    /// Principal square root.
    fn csqrt(&self) -> Self;
    fn cpowi(&self, k: u64) -> Self;
    fn creciprocal(&self) -> Self;
    fn scale_by(&self, s: &T) -> Self;
    fn is_zero_c(&self) -> bool;
    fn log2_abs(&self) -> f64;
}

impl<T: Real> ComplexReal<T> for Complex<T> {
    fn from_reals(re: T, im: T) -> Self {
        Complex::new(re, im)
    }
    fn from_f64s(re: f64, im: f64, prec: u32) -> Self {
        Complex::new(T::from_f64(re, prec), T::from_f64(im, prec))
    }
    fn precision(&self) -> u32 {
        self.re.precision().max(self.im.precision())
    }
    fn with_precision(self, prec: u32) -> Self {
        Complex::new(self.re.with_precision(prec), self.im.with_precision(prec))
    }
    fn to_c64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }
    fn cabs(&self) -> T {
        self.re.hypot(&self.im)
    }
    fn carg(&self) -> T {
        self.im.atan2(&self.re)
    }
    fn cexp(&self) -> Self {
        let m = self.re.exp();
        let mut c = self.im.cos();
        let mut s = self.im.sin();
        c *= &m;
        s *= &m;
        Complex::new(c, s)
    }
    fn cln(&self) -> Self {
        let mag = self.cabs();
        Complex::new(mag.ln(), self.carg())
    }
    fn csqrt(&self) -> Self {
        if self.is_zero_c() {
            return self.clone();
        }
        let r = self.cabs().sqrt();
        let mut half = self.carg();
        half /= T::from_f64(2.0, self.precision());
        let mut c = half.cos();
        let mut s = half.sin();
        c *= &r;
        s *= &r;
        Complex::new(c, s)
    }
    fn cpowi(&self, k: u64) -> Self {
        let prec = self.precision();
        let mut acc = Complex::new(T::from_f64(1.0, prec), T::from_f64(0.0, prec));
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
    fn creciprocal(&self) -> Self {
        let mut den = self.re.clone();
        den *= &self.re;
        let mut t = self.im.clone();
        t *= &self.im;
        den += t;
        let mut re = self.re.clone();
        re /= &den;
        let mut im = -self.im.clone();
        im /= &den;
        Complex::new(re, im)
    }
    fn scale_by(&self, s: &T) -> Self {
        let mut re = self.re.clone();
        re *= s;
        let mut im = self.im.clone();
        im *= s;
        Complex::new(re, im)
    }
    fn is_zero_c(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        let hi = a.max(b);
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        let lo = a.min(b);
        hi + 0.5 * (1.0 + (2.0f64).powf(2.0 * (lo - hi))).log2()
    }
}

/// `acc <- acc * z + c`, the Horner step, using `t` as scratch.
pub(crate) fn mul_add_in_place<T: Real>(
    acc: &mut Complex<T>,
    z: &Complex<T>,
    c: &Complex<T>,
    t: &mut T,
) {
    t.clone_from(&acc.re);
    acc.re *= &z.re;
    let mut u = acc.im.clone();
    u *= &z.im;
    acc.re -= &u;
    acc.re += &c.re;
    acc.im *= &z.re;
    *t *= &z.im;
    acc.im += &*t;
    acc.im += &c.im;
}

/// Same as [`mul_add_in_place`] with a real addend.
pub(crate) fn mul_add_real_in_place<T: Real>(
    acc: &mut Complex<T>,
    z: &Complex<T>,
    c: &T,
    t: &mut T,
) {
    t.clone_from(&acc.re);
    acc.re *= &z.re;
    let mut u = acc.im.clone();
    u *= &z.im;
    acc.re -= &u;
    acc.re += c;
    acc.im *= &z.re;
    *t *= &z.im;
    acc.im += &*t;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mpf_ops_take_max_precision() {
        let a = Mpf::from_f64(1.5, 100);
        let b = Mpf::from_f64(2.0, 300);
        assert_eq!((a.clone() + b.clone()).precision(), 300);
        assert_eq!((&a * &b).precision(), 300);
        let mut c = a;
        c += &b;
        assert_eq!(c.precision(), 300);
        assert_eq!(c.to_f64(), 3.5);
    }

    #[test]
    fn mpf_zero_and_one_are_neutral() {
        let x = Mpf::from_f64(0.1, 256);
        let y = Mpf::zero() + x.clone();
        assert_eq!(y, x);
        assert_eq!((Mpf::one() * x.clone()).precision(), 256);
    }

    #[test]
    fn ratio_conversion_rounds_once() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let v = Mpf::from_ratio(&q, 200);
        let three = Mpf::from_f64(3.0, 200);
        let err = (v * three - Mpf::one()).abs();
        assert!(err.log2_abs() < -198.0);
        assert!((f64::from_ratio(&q, 0) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn complex_log_is_principal() {
        let z = Complex::<Mpf>::from_f64s(-1.0, 0.0, 128);
        let l = z.cln();
        assert!((l.im.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let w = Complex::<f64>::from_f64s(-1.0, -1e-300, 53).cln();
        assert!(w.im < 0.0);
    }

    #[test]
    fn complex_sqrt_and_powers() {
        let z = Complex::<Mpf>::from_f64s(-4.0, 0.0, 128);
        let s = z.csqrt().to_c64();
        assert!((s.re).abs() < 1e-30 && (s.im - 2.0).abs() < 1e-30);
        let i = Complex::<f64>::new(0.0, 1.0);
        let i5 = i.cpowi(5);
        assert!((i5 - i).norm() < 1e-15);
    }

    #[test]
    fn log2_abs_handles_huge_exponents() {
        let big = Mpf::exp2i(5000, 128);
        assert_eq!(big.log2_abs(), 5000.0);
        let c = Complex::new(Mpf::exp2i(-4000, 128), Mpf::zero());
        assert_eq!(ComplexReal::log2_abs(&c), -4000.0);
    }

    #[test]
    fn decimal_round_trip() {
        let x = Mpf::pi(256);
        let s = x.to_decimal(78);
        let y = Mpf::parse_decimal(&s, 264).unwrap();
        assert_eq!(y.to_decimal(78), s);
    }
}
