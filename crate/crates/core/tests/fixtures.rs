//! Reference values computed independently with 40-digit mpmath and frozen here.

use euler_attractor::attractor::{key_constants, szego_radius};
use euler_attractor::decomp::f_mu;
use euler_attractor::eulerpoly::{euler_number, euler_polynomial, eval_exact};
use euler_attractor::mproots::{certify, find_roots, Precision};
use euler_attractor::szego::{erfc_int, ratio_exact};
use euler_attractor::{Complex, ComplexReal, MpComplex, Mpf, Real, C64};
use num_bigint::BigInt;
use num_rational::BigRational;

fn mp(v: &str, bits: u32) -> Mpf {
    Mpf::parse_decimal(v, bits).unwrap()
}

fn close(a: &Mpf, want: &str, tol_log2: f64) {
    let mut d = a.clone();
    d -= mp(want, a.precision());
    assert!(d.log2_abs() < tol_log2, "{} vs {want}", a.to_decimal(40));
}

#[test]
fn euler_numbers_match_series() {
    let want = [1i64, 0, -1, 0, 5, 0, -61, 0, 1385, 0, -50521, 0, 2702765];
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    for (n, &w) in want.iter().enumerate() {
        assert_eq!(euler_number(n).unwrap(), BigInt::from(w));
        let scaled = eval_exact(&euler_polynomial(n), &half)
            * BigRational::from_integer(BigInt::from(1u64 << n));
        assert_eq!(scaled, BigRational::from_integer(BigInt::from(w)));
    }
}

#[test]
fn erfc_integral_values() {
    close(
        &erfc_int(&mp("1", 160)),
        "0.1394027926403309882496163055387195860443",
        -125.0,
    );
    close(
        &erfc_int(&mp("0.5", 160)),
        "0.424945919039965564893380804930119488315",
        -125.0,
    );
}

#[test]
fn regularized_kernel_values() {
    let v = f_mu(0, &MpComplex::from_f64s(1.0, 0.0, 160)).unwrap();
    close(&v.re, "0.4529407580707455856604439811548049522091", -125.0);
    let v = f_mu(1, &MpComplex::from_f64s(0.5, 0.5, 160)).unwrap();
    close(&v.re, "0.4751582250517569164256828922597905556738", -125.0);
    close(&v.im, "-0.4999760561824847612218780013292229635449", -125.0);
}

#[test]
fn szego_radii() {
    let pi = Mpf::pi(160);
    close(
        &szego_radius(&pi).unwrap(),
        "0.2784645427610737951093587390229801554395",
        -125.0,
    );
    let mut third = Mpf::pi(160);
    third /= Mpf::from_f64(3.0, 160);
    close(
        &szego_radius(&third).unwrap(),
        "0.4639219059730688694886329478449040181863",
        -125.0,
    );
    close(
        &szego_radius(&mp("1", 160)).unwrap(),
        "0.4756933941333493553244786780678040523863",
        -125.0,
    );
    let c = key_constants::<Mpf>(160);
    close(
        &c["pointA_re"],
        "-0.09861228866810969139524523692252570464749",
        -125.0,
    );
}

#[test]
fn partial_sum_ratios() {
    let z = MpComplex::from_f64s(1.0, 0.0, 256);
    let r = ratio_exact(400, &z, 256).unwrap();
    close(&r.re, "0.493350870161094528596321911556781355152", -125.0);
    let z = MpComplex::from_f64s(1.5, 1.0, 256);
    let r = ratio_exact(100, &z, 256).unwrap();
    close(&r.re, "-32.10606025353363247046447219752840525131", -120.0);
    close(&r.im, "268.2996208399882092252262623579046403541", -120.0);
}

#[test]
fn cubic_roots_have_closed_forms() {
    let rs = certify(&find_roots::<Mpf>(3, Precision::Auto, 0).unwrap()).unwrap();
    let mut got: Vec<C64> = rs.roots_c64();
    got.sort_by(|a, b| a.re.total_cmp(&b.re));
    let want = [
        -0.1220084679281462155879,
        1.0 / 6.0,
        0.4553418012614795489212,
    ];
    for (g, w) in got.iter().zip(want) {
        assert!((*g - Complex::new(w, 0.0)).norm() < 1e-15);
    }
}
