//! Acceptance suite: one PASS/FAIL line per criterion. Set
//! `ACCEPTANCE_STRICT=1` to turn any FAIL into a non-zero exit status.

use std::f64::consts::{E, FRAC_PI_2, PI};
use std::time::Instant;

use euler_attractor::attractor::{
    arc_zeta_argument, key_constants, sample_attractor, szego_radius,
};
use euler_attractor::decomp::{diagnostic_row, m_exact, m_saddle};
use euler_attractor::density::{
    accumulation_gap, classify, density_report, sector_count, DensityConfig, DensityReport,
};
use euler_attractor::eulerpoly::{default_precision, euler_number, euler_polynomial, eval_exact};
use euler_attractor::szego::{compare, erfc_int, error_slope, ratio_exact, Approximation};
use euler_attractor::{Complex, ComplexReal, MpComplex, MpRootSet, Mpf, Real};
use euler_attractor_cli::commands::{cmd_density, cmd_roots};
use euler_attractor_cli::RunConfig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Line {
    id: u8,
    pass: bool,
    detail: String,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Euler numbers from `sum_j C(2k, 2j) E_{2j} = 0`, `E_0 = 1`.
fn euler_numbers_by_series(max: usize) -> Vec<BigInt> {
    let mut even: Vec<BigInt> = vec![BigInt::one()];
    let mut out = vec![BigInt::one()];
    for n in 1..=max {
        if n % 2 == 1 {
            out.push(BigInt::zero());
            continue;
        }
        let k = n / 2;
        let mut binom = BigInt::one();
        let mut acc = BigInt::zero();
        for j in 0..k {
            acc += &binom * &even[j];
            // C(2k, 2j) -> C(2k, 2j + 2)
            binom = binom * BigInt::from(2 * k - 2 * j) * BigInt::from(2 * k - 2 * j - 1)
                / (BigInt::from(2 * j + 1) * BigInt::from(2 * j + 2));
        }
        let e = -acc;
        even.push(e.clone());
        out.push(e);
    }
    out
}

fn criterion_1() -> Line {
    let hand: [Vec<BigRational>; 4] = [
        vec![q(1, 1)],
        vec![q(-1, 2), q(1, 1)],
        vec![q(0, 1), q(-1, 1), q(1, 1)],
        vec![q(1, 4), q(0, 1), q(-3, 2), q(1, 1)],
    ];
    let low = hand
        .iter()
        .enumerate()
        .all(|(n, c)| &euler_polynomial(n).coeffs == c);
    let oracle = euler_numbers_by_series(12);
    let half = q(1, 2);
    let numbers = (0..=12).all(|n| {
        let scaled =
            eval_exact(&euler_polynomial(n), &half) * BigRational::from_integer(BigInt::one() << n);
        scaled == BigRational::from_integer(oracle[n].clone())
            && euler_number(n).ok().as_ref() == Some(&oracle[n])
    });
    let zeros = (2..=40)
        .step_by(2)
        .all(|n| eval_exact(&euler_polynomial(n), &q(0, 1)).is_zero());
    Line {
        id: 1,
        pass: low && numbers && zeros,
        detail: format!(
            "E_0..E_3 {low}, 2^n E_n(1/2) n<=12 {numbers}, E_n(0)=0 even n<=40 {zeros}"
        ),
    }
}

fn criterion_2() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cases = Vec::new();
    for n in [6usize, 20, 50] {
        for mu in 0u32..=2 {
            for _ in 0..5 {
                let r: f64 = rng.gen_range(0.05..0.5);
                let t: f64 = rng.gen_range(-PI..PI);
                cases.push((n, mu, r * t.cos(), r * t.sin()));
            }
        }
    }
    let worst = cases
        .par_iter()
        .map(|&(n, mu, re, im)| {
            let x = MpComplex::from_f64s(re, im, 512);
            diagnostic_row(n, mu, &x, 512)
                .map(|row| row.identity_residual.log2_abs())
                .unwrap_or(f64::INFINITY)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let limit = -40.0 * 10f64.log2();
    Line {
        id: 2,
        pass: worst <= limit,
        detail: format!(
            "{} cases, max |M + K - E_n(nx)/n!| = 2^{worst:.1} (limit 1e-40 = 2^{limit:.1})",
            cases.len()
        ),
    }
}

fn criterion_3() -> Line {
    let ns = [100usize, 200, 400];
    let errs: Vec<f64> = ns
        .par_iter()
        .map(|&n| {
            let p = default_precision(n).max(512);
            let x = MpComplex::from_f64s(0.2 * (-PI / 4.0).cos(), 0.2 * (-PI / 4.0).sin(), p);
            let exact = m_exact(n, 1, &x, p).ok()?;
            let saddle = m_saddle(n, 1, &x).ok()?;
            let mut e = (saddle - exact.clone()).cabs();
            e /= &exact.cabs();
            Some(e.to_f64())
        })
        .map(|e| e.unwrap_or(f64::INFINITY))
        .collect();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    Line {
        id: 3,
        pass: decreasing && errs[2] <= 0.05,
        detail: format!(
            "|m_saddle/m_exact - 1| at n=100,200,400: {:.3e}, {:.3e}, {:.3e}",
            errs[0], errs[1], errs[2]
        ),
    }
}

fn criterion_4() -> Line {
    let ns = [100usize, 200, 400];
    let cases = [
        (Approximation::Prop1, 2.0, 0.0),
        (Approximation::Prop1, 1.5, 1.0),
        (Approximation::Prop2, 0.5, 0.0),
        (Approximation::Prop2, 0.3, -0.4),
    ];
    let slopes: Vec<f64> = cases
        .par_iter()
        .map(|&(w, re, im)| {
            error_slope(w, &MpComplex::from_f64s(re, im, 256), &ns).unwrap_or(f64::INFINITY)
        })
        .collect();
    let sup = |n: usize| {
        (0..=30)
            .map(|k| {
                let t = MpComplex::from_f64s(k as f64 / 10.0, 0.0, 256);
                compare(Approximation::Prop3, &t, n)
                    .map(|r| r.abs_err.to_f64())
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    };
    let ratio = sup(400) / sup(100);
    let half = ratio_exact(400, &MpComplex::from_f64s(1.0, 0.0, 256), 256)
        .map(|r| r.re.to_f64())
        .unwrap_or(f64::NAN);
    let pass = slopes.iter().all(|&s| s <= -0.5)
        && (ratio - 0.5).abs() <= 0.125
        && (half - 0.5).abs() <= 0.02;
    Line {
        id: 4,
        pass,
        detail: format!(
            "slopes prop1(2) {:.3}, prop1(1.5+i) {:.3}, prop2(0.5) {:.3}, prop2(0.3-0.4i) {:.3}; prop3 sup ratio {ratio:.4}; ratio_exact(400,1) {half:.4}",
            slopes[0], slopes[1], slopes[2], slopes[3]
        ),
    }
}

fn criterion_5() -> Line {
    let r_pi = szego_radius(&Mpf::pi(128))
        .map(|r| r.to_f64())
        .unwrap_or(f64::NAN);
    let a = key_constants::<Mpf>(128)["pointA_re"].to_f64();
    let mut half_pi = Mpf::pi(128);
    half_pi /= Mpf::from_f64(2.0, 128);
    let end = arc_zeta_argument(&half_pi)
        .map(|v| v.to_f64())
        .unwrap_or(f64::NAN);
    let end_err = (end - (FRAC_PI_2 - 1.0 / E)).abs();
    let pass = (r_pi - 0.278).abs() < 5e-4 && (a + 0.09861).abs() < 5e-6 && end_err <= 1e-10;
    Line {
        id: 5,
        pass,
        detail: format!(
            "szego_radius(pi) {r_pi:.6}, pointA_re {a:.6}, endpoint arg error {end_err:.1e}"
        ),
    }
}

struct Pipeline {
    reports: Vec<(usize, DensityReport)>,
    roots: Vec<(usize, MpRootSet)>,
}

impl Pipeline {
    fn report(&self, n: usize) -> &DensityReport {
        &self
            .reports
            .iter()
            .find(|(m, _)| *m == n)
            .expect("degree computed")
            .1
    }

    fn roots(&self, n: usize) -> &MpRootSet {
        &self
            .roots
            .iter()
            .find(|(m, _)| *m == n)
            .expect("degree computed")
            .1
    }
}

fn criterion_6(p: &Pipeline) -> Line {
    let r400 = p.report(400);
    let maxima: Vec<f64> = [100, 200, 400]
        .iter()
        .map(|&n| p.report(n).max_distance)
        .collect();
    let rises: Vec<(f64, f64)> = maxima
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect();
    let trend = rises.is_empty() || (rises.len() == 1 && rises[0].1 <= 1.1 * rises[0].0);
    let model = sample_attractor::<f64>(DensityConfig::default().samples, 53).expect("model");
    let sets: Vec<_> = p.roots.iter().map(|(_, rs)| rs.roots_c64()).collect();
    let gap = accumulation_gap(&model, &sets);
    let pass = r400.fractions.outlier <= 0.05 && r400.p95_distance <= 0.03 && trend && gap <= 0.05;
    Line {
        id: 6,
        pass,
        detail: format!(
            "n=400 outliers {:.3}, p95 distance {:.4}; max distance n=100,200,400: {:.4}, {:.4}, {:.4}; largest sample-to-root gap {gap:.4}",
            r400.fractions.outlier, r400.p95_distance, maxima[0], maxima[1], maxima[2]
        ),
    }
}

fn criterion_7(p: &Pipeline) -> Line {
    let (r100, r400) = (p.report(100), p.report(400));
    let frac_ok = r400.deviations.interval <= 0.05 && r400.deviations.quarter_arc <= 0.05;
    let interval_shrinks = r400.deviations.interval < r100.deviations.interval;
    let quarter_shrinks = r400.deviations.quarter_arc < r100.deviations.quarter_arc;
    Line {
        id: 7,
        pass: frac_ok && interval_shrinks && quarter_shrinks,
        detail: format!(
            "n=400 interval {}/400 = {:.4}, quarters {:?}; deviations n=100 ({:.5}, {:.5}) vs n=400 ({:.5}, {:.5})",
            r400.counts.interval,
            r400.fractions.interval,
            r400.quarter_counts.as_array(),
            r100.deviations.interval,
            r100.deviations.quarter_arc,
            r400.deviations.interval,
            r400.deviations.quarter_arc
        ),
    }
}

fn criterion_8(p: &Pipeline) -> Line {
    let r400 = p.report(400);
    let rs = p.roots(400);
    let model = sample_attractor::<f64>(DensityConfig::default().samples, 53).expect("model");
    let cls = classify(rs, &model, &DensityConfig::default().classify).expect("classification");
    let sector = sector_count(rs, &cls, 0.0, 0.6)
        .map(|c| c as f64 / 400.0)
        .unwrap_or(f64::NAN);
    let ks_arc = r400.ks_arc.unwrap_or(f64::INFINITY);
    let ks_int = r400.ks_interval.unwrap_or(f64::INFINITY);
    let pass = ks_arc <= 0.2 && ks_int <= 0.2 && (sector - 0.6 / (2.0 * PI)).abs() <= 0.05;
    Line {
        id: 8,
        pass,
        detail: format!(
            "KS arc {ks_arc:.4}, KS interval {ks_int:.4}, sector(0, 0.6)/400 {sector:.4} vs {:.4}",
            0.6 / (2.0 * PI)
        ),
    }
}

/// Largest `log2(distance to nearest image / (10 max(radius)))` over the roots.
fn symmetry_excess(rs: &MpRootSet, map: impl Fn(&MpComplex) -> MpComplex + Sync) -> f64 {
    let approx = rs.roots_c64();
    rs.roots
        .par_iter()
        .zip(&rs.newton_radii)
        .map(|(r, rad)| {
            let image = map(r);
            let ic = image.to_c64();
            let j = (0..approx.len())
                .min_by(|&a, &b| (approx[a] - ic).norm().total_cmp(&(approx[b] - ic).norm()))
                .expect("non-empty");
            let d = (rs.roots[j].clone() - image).cabs();
            let tol_log2 = rad.log2_abs().max(rs.newton_radii[j].log2_abs()) + 10f64.log2();
            d.log2_abs() - tol_log2
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

fn criterion_9(p: &Pipeline) -> Line {
    let mut parts = Vec::new();
    let mut pass = true;
    for n in [50usize, 200] {
        let rs = p.roots(n);
        let conj = symmetry_excess(rs, |z| z.conj());
        let prec = rs.precision_bits;
        let mut inv_n = Mpf::from_f64(1.0, prec);
        inv_n /= Mpf::from_f64(n as f64, prec);
        let refl = symmetry_excess(rs, |z| {
            Complex::new(inv_n.clone() - z.re.clone(), -z.im.clone())
        });
        pass &= conj <= 0.0 && refl <= 0.0;
        parts.push(format!(
            "n={n}: conjugation 2^{conj:.1}, reflection 2^{refl:.1} of 10x radius"
        ));
    }
    Line {
        id: 9,
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_10() -> Line {
    let base = RunConfig {
        seed: 7,
        ..RunConfig::default()
    };
    let a = cmd_roots(60, &base);
    let b = cmd_roots(60, &base);
    let reruns = matches!((&a, &b), (Ok(x), Ok(y)) if x == y);
    let da = cmd_density(&[40, 60], &base).map(|r| r.0);
    let db = cmd_density(&[40, 60], &base).map(|r| r.0);
    let density_reruns = matches!((&da, &db), (Ok(x), Ok(y)) if x == y);
    let dir = std::env::temp_dir().join(format!("euler-acceptance-cache-{}", std::process::id()));
    let cached = RunConfig {
        cache_dir: Some(dir.clone()),
        ..base.clone()
    };
    let c1 = cmd_roots(60, &cached);
    let c2 = cmd_roots(60, &cached);
    let cache = matches!((&a, &c1, &c2), (Ok(x), Ok(y), Ok(z)) if x == y && y == z);
    let _ = std::fs::remove_dir_all(&dir);
    // Frozen oracle values (40-digit mpmath).
    let close = |v: f64, w: f64| (v - w).abs() <= 1e-15 * w.abs().max(1.0);
    let fixtures = close(erfc_int(&1.0f64), 0.139_402_792_640_330_99)
        && close(
            euler_attractor::decomp::f_mu(0, &MpComplex::from_f64s(1.0, 0.0, 128))
                .map(|v| v.re.to_f64())
                .unwrap_or(0.0),
            0.452_940_758_070_745_6,
        )
        && close(
            ratio_exact(400, &MpComplex::from_f64s(1.0, 0.0, 256), 256)
                .map(|v| v.re.to_f64())
                .unwrap_or(0.0),
            0.493_350_870_161_094_5,
        );
    Line {
        id: 10,
        pass: reruns && density_reruns && cache && fixtures,
        detail: format!("roots reruns {reruns}, density reruns {density_reruns}, cache round-trip {cache}, fixtures {fixtures}"),
    }
}

fn main() {
    let start = Instant::now();
    let mut lines = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
    ];
    let runs =
        density_report(&[50, 100, 200, 400], &DensityConfig::default()).expect("valid degrees");
    let mut pipeline = Pipeline {
        reports: Vec::new(),
        roots: Vec::new(),
    };
    let mut failures = Vec::new();
    for run in runs {
        match (run.report, run.roots) {
            (Ok(rep), Some(rs)) => {
                pipeline.reports.push((run.n, rep));
                pipeline.roots.push((run.n, rs));
            }
            (Err(e), _) => failures.push(format!("n={}: {e}", run.n)),
            (Ok(_), None) => failures.push(format!("n={}: roots missing", run.n)),
        }
    }
    if failures.is_empty() {
        lines.extend([
            criterion_6(&pipeline),
            criterion_7(&pipeline),
            criterion_8(&pipeline),
            criterion_9(&pipeline),
        ]);
    } else {
        for id in 6..=9 {
            lines.push(Line {
                id,
                pass: false,
                detail: format!("root pipeline failed: {}", failures.join("; ")),
            });
        }
    }
    lines.push(criterion_10());
    lines.sort_by_key(|l| l.id);
    for l in &lines {
        println!(
            "{} criterion {:>2}: {}",
            if l.pass { "PASS" } else { "FAIL" },
            l.id,
            l.detail
        );
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!(
        "{passed}/{} criteria passed in {:.1?}",
        lines.len(),
        start.elapsed()
    );
    if passed < lines.len() && std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
}
