//! Empirical zero statistics: classification of computed roots against the
//! attractor, counting functions, and Kolmogorov–Smirnov uniformity.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attractor::{
    component_distances, sample_attractor, zeta_of_x, AttractorError, AttractorModel, Component,
};
use crate::mproots::{certify, find_roots, Precision, RootError, RootSet};
use crate::scalar::{ComplexReal, Mpf, Real};

/// Default attractor tolerance.
pub const DEFAULT_TOL_ATTR: f64 = 0.1;
/// Arc samples used by [`density_report`].
pub const DEFAULT_SAMPLES: usize = 256;
/// Smallest degree accepted by [`density_report`].
pub const MIN_REPORT_DEGREE: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("empty input")]
    EmptyInput,
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Attractor(#[from] AttractorError),
}

/// `pi/2 - 1/e`, the largest `arg zeta` on the lower arc.
pub fn arc_angle_limit() -> f64 {
    std::f64::consts::FRAC_PI_2 - (-1f64).exp()
}

/// `2/(pi e)`.
pub fn interval_fraction_target() -> f64 {
    2.0 / (std::f64::consts::PI * std::f64::consts::E)
}

/// `1/4 - 1/(2 pi e)`.
pub fn quarter_fraction_target() -> f64 {
    0.25 - 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E)
}

/// Classification tolerances. `tol_real = None` means ten times the largest
/// certified Newton radius of the root set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub tol_real: Option<f64>,
    pub tol_attr: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            tol_real: None,
            tol_attr: DEFAULT_TOL_ATTR,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<(), DensityError> {
        if !(self.tol_attr > 0.0) {
            return Err(DensityError::DomainViolation(format!(
                "tol_attr must be positive, got {}",
                self.tol_attr
            )));
        }
        if let Some(t) = self.tol_real {
            if !(t > 0.0) {
                return Err(DensityError::DomainViolation(format!(
                    "tol_real must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }

    /// `log2 tol_real` for a given root set.
    pub fn tol_real_log2<T: Real>(&self, rs: &RootSet<T>) -> f64 {
        match self.tol_real {
            Some(t) => t.log2(),
            None => rs.max_radius_log2() + 10f64.log2(),
        }
    }
}

/// Component label and distance to the attractor for every root.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub labels: Vec<Component>,
    /// Distance to the nearest component of the attractor.
    pub distances: Vec<f64>,
    pub tol_real_log2: f64,
    pub tol_attr: f64,
}

impl Classification {
    pub fn count(&self, c: Component) -> usize {
        self.labels.iter().filter(|&&l| l == c).count()
    }
}

/// Labels every root: `interval` when `|Im x| <= tol_real` and
/// `|Re x| <= 1/(pi e) + tol_attr`, else the nearer arc when within
/// `tol_attr`, else `outlier`.
pub fn classify<T: Real, M: Real>(
    rs: &RootSet<T>,
    model: &AttractorModel<M>,
    cfg: &ClassifyConfig,
) -> Result<Classification, DensityError> {
    cfg.validate()?;
    let tol_real_log2 = cfg.tol_real_log2(rs);
    let a = model.interval_half_f64();
    let labelled: Result<Vec<(Component, f64)>, AttractorError> = rs
        .roots
        .par_iter()
        .map(|x| {
            let p = x.to_c64();
            let d = component_distances(
                &Complex::<M>::from_f64s(p.re, p.im, model.precision_bits),
                model,
            )?;
            let nearest = d.nearest().1;
            let label = if x.im.log2_abs() <= tol_real_log2 && p.re.abs() <= a + cfg.tol_attr {
                Component::Interval
            } else {
                let (arc, d_arc) = d.nearest_arc();
                if d_arc <= cfg.tol_attr {
                    arc
                } else {
                    Component::Outlier
                }
            };
            Ok((label, nearest))
        })
        .collect();
    let (labels, distances) = labelled?.into_iter().unzip();
    Ok(Classification {
        labels,
        distances,
        tol_real_log2,
        tol_attr: cfg.tol_attr,
    })
}

/// `arg zeta(x)` in `(-pi, pi]`.
pub fn zeta_argument<T: Real>(x: &Complex<T>) -> f64 {
    let z = zeta_of_x(x);
    z.im.atan2(&z.re).to_f64()
}

/// Lower-arc roots with `arg zeta` in `[alpha, beta]`, for
/// `0 <= alpha <= beta <= pi/2 - 1/e`.
pub fn sector_count<T: Real>(
    rs: &RootSet<T>,
    cls: &Classification,
    alpha: f64,
    beta: f64,
) -> Result<usize, DensityError> {
    let limit = arc_angle_limit();
    if !(0.0 <= alpha && alpha <= beta && beta <= limit + 1e-15) {
        return Err(DensityError::DomainViolation(format!(
            "sector needs 0 <= alpha <= beta <= pi/2 - 1/e, got [{alpha}, {beta}]"
        )));
    }
    Ok(rs
        .roots
        .iter()
        .zip(&cls.labels)
        .filter(|(_, &l)| l == Component::LowerArc)
        .map(|(x, _)| zeta_argument(x))
        .filter(|&t| alpha <= t && t <= beta)
        .count())
}

/// Interval roots with `Re x` in `[a, b]`, for
/// `-1/(pi e) <= a <= b <= 1/(pi e)`.
pub fn interval_count<T: Real>(
    rs: &RootSet<T>,
    cls: &Classification,
    a: f64,
    b: f64,
) -> Result<usize, DensityError> {
    let half = interval_fraction_target() / 2.0;
    if !(-half - 1e-15 <= a && a <= b && b <= half + 1e-15) {
        return Err(DensityError::DomainViolation(format!(
            "interval bounds must satisfy -1/(pi e) <= a <= b <= 1/(pi e), got [{a}, {b}]"
        )));
    }
    Ok(rs
        .roots
        .iter()
        .zip(&cls.labels)
        .filter(|(_, &l)| l == Component::Interval)
        .map(|(x, _)| x.re.to_f64())
        .filter(|&r| a <= r && r <= b)
        .count())
}

/// Roots in the closed disc `|x - center| <= radius`.
pub fn disc_count<T: Real>(
    rs: &RootSet<T>,
    center: &Complex<T>,
    radius: f64,
) -> Result<usize, DensityError> {
    if !(radius > 0.0) {
        return Err(DensityError::DomainViolation(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if radius.is_infinite() {
        return Ok(rs.roots.len());
    }
    let r = T::from_f64(radius, rs.precision_bits);
    Ok(rs
        .roots
        .iter()
        .filter(|x| {
            let d = Complex::new(
                x.re.clone() - center.re.clone(),
                x.im.clone() - center.im.clone(),
            );
            d.cabs() <= r
        })
        .count())
}

/// Kolmogorov–Smirnov distance `sup_t |F_m(t) - t|` to the uniform law on
/// `[0, 1]`.
pub fn ks_uniform(values: &[f64]) -> Result<f64, DensityError> {
    if values.is_empty() {
        return Err(DensityError::EmptyInput);
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(DensityError::DomainViolation(format!(
            "value {v} outside [0, 1]"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    Ok(sorted.iter().enumerate().fold(0.0, |acc, (i, &v)| {
        let above = (i + 1) as f64 / m - v;
        let below = v - i as f64 / m;
        acc.max(above).max(below)
    }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCounts {
    pub interval: usize,
    pub lower_arc: usize,
    pub upper_arc: usize,
    pub outlier: usize,
}

impl ComponentCounts {
    pub fn total(&self) -> usize {
        self.interval + self.lower_arc + self.upper_arc + self.outlier
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComponentFractions {
    pub interval: f64,
    pub lower_arc: f64,
    pub upper_arc: f64,
    pub outlier: f64,
}

/// Arc roots split by the sign of `Re x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarterCounts {
    pub lower_left: usize,
    pub lower_right: usize,
    pub upper_left: usize,
    pub upper_right: usize,
}

impl QuarterCounts {
    pub fn as_array(&self) -> [usize; 4] {
        [
            self.lower_left,
            self.lower_right,
            self.upper_left,
            self.upper_right,
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorCount {
    pub alpha: f64,
    pub beta: f64,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub interval_fraction: f64,
    pub quarter_arc_fraction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviations {
    /// `|interval fraction - 2/(pi e)|`.
    pub interval: f64,
    /// Largest quarter-arc deviation from `1/4 - 1/(2 pi e)`.
    pub quarter_arc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_real_log2: f64,
    pub tol_attr: f64,
}

/// Per-degree summary of where the zeros sit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub n: usize,
    pub precision_bits: u32,
    pub seed: u64,
    pub counts: ComponentCounts,
    pub fractions: ComponentFractions,
    pub quarter_counts: QuarterCounts,
    pub sector_counts: Vec<SectorCount>,
    /// KS distance of `arg zeta/(pi/2 - 1/e)` over lower-right roots.
    pub ks_arc: Option<f64>,
    /// KS distance of `(Re x + a)/(2a)` over interval roots.
    pub ks_interval: Option<f64>,
    pub targets: Targets,
    pub deviations: Deviations,
    /// Largest distance to the attractor among non-outlier roots.
    pub max_distance: f64,
    pub p95_distance: f64,
    pub tolerances: Tolerances,
}

impl DensityReport {
    pub fn quarter_fractions(&self) -> [f64; 4] {
        self.quarter_counts
            .as_array()
            .map(|c| c as f64 / self.n as f64)
    }
}

/// Sectors `[0, beta]` recorded in every report.
pub fn default_sectors() -> Vec<(f64, f64)> {
    vec![(0.0, 0.3), (0.0, 0.6), (0.0, 0.9), (0.0, arc_angle_limit())]
}

/// Nearest-rank percentile of a non-empty sample, `q` in `[0, 1]`.
fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

/// Classifies `rs` and assembles the full report.
pub fn classify_roots<T: Real, M: Real>(
    rs: &RootSet<T>,
    model: &AttractorModel<M>,
    cfg: &ClassifyConfig,
) -> Result<DensityReport, DensityError> {
    let cls = classify(rs, model, cfg)?;
    let n = rs.roots.len();
    let nf = n.max(1) as f64;
    let counts = ComponentCounts {
        interval: cls.count(Component::Interval),
        lower_arc: cls.count(Component::LowerArc),
        upper_arc: cls.count(Component::UpperArc),
        outlier: cls.count(Component::Outlier),
    };
    let fractions = ComponentFractions {
        interval: counts.interval as f64 / nf,
        lower_arc: counts.lower_arc as f64 / nf,
        upper_arc: counts.upper_arc as f64 / nf,
        outlier: counts.outlier as f64 / nf,
    };
    let mut quarters = QuarterCounts::default();
    let mut arc_values = Vec::new();
    let mut interval_values = Vec::new();
    let a = model.interval_half_f64();
    let limit = arc_angle_limit();
    for (x, &label) in rs.roots.iter().zip(&cls.labels) {
        let right = !x.re.is_sign_negative();
        match (label, right) {
            (Component::LowerArc, false) => quarters.lower_left += 1,
            (Component::LowerArc, true) => {
                quarters.lower_right += 1;
                arc_values.push((zeta_argument(x) / limit).clamp(0.0, 1.0));
            }
            (Component::UpperArc, false) => quarters.upper_left += 1,
            (Component::UpperArc, true) => quarters.upper_right += 1,
            (Component::Interval, _) => {
                interval_values.push(((x.re.to_f64() + a) / (2.0 * a)).clamp(0.0, 1.0));
            }
            (Component::Outlier, _) => {}
        }
    }
    let sector_counts = default_sectors()
        .into_iter()
        .map(|(alpha, beta)| {
            Ok(SectorCount {
                alpha,
                beta,
                count: sector_count(rs, &cls, alpha, beta)?,
            })
        })
        .collect::<Result<Vec<_>, DensityError>>()?;
    let targets = Targets {
        interval_fraction: interval_fraction_target(),
        quarter_arc_fraction: quarter_fraction_target(),
    };
    let quarter_dev = quarters
        .as_array()
        .iter()
        .map(|&c| (c as f64 / nf - targets.quarter_arc_fraction).abs())
        .fold(0.0, f64::max);
    let kept: Vec<f64> = cls
        .labels
        .iter()
        .zip(&cls.distances)
        .filter(|(&l, _)| l != Component::Outlier)
        .map(|(_, &d)| d)
        .collect();
    Ok(DensityReport {
        n,
        precision_bits: rs.precision_bits,
        seed: rs.seed,
        counts,
        fractions,
        quarter_counts: quarters,
        sector_counts,
        ks_arc: ks_uniform(&arc_values).ok(),
        ks_interval: ks_uniform(&interval_values).ok(),
        targets,
        deviations: Deviations {
            interval: (fractions.interval - targets.interval_fraction).abs(),
            quarter_arc: quarter_dev,
        },
        max_distance: kept.iter().copied().fold(0.0, f64::max),
        p95_distance: percentile(&kept, 0.95),
        tolerances: Tolerances {
            tol_real_log2: cls.tol_real_log2,
            tol_attr: cls.tol_attr,
        },
    })
}

/// Pipeline settings for [`density_report`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityConfig {
    pub precision: Precision,
    pub seed: u64,
    pub samples: usize,
    pub classify: ClassifyConfig,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            precision: Precision::Auto,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            classify: ClassifyConfig::default(),
        }
    }
}

/// Outcome for one degree of a [`density_report`] run.
#[derive(Clone, Debug)]
pub struct DensityRun {
    pub n: usize,
    pub roots: Option<RootSet<Mpf>>,
    pub report: Result<DensityReport, DensityError>,
}

/// Roots, certification and classification for every `n`, in parallel.
/// Failures are recorded per degree.
pub fn density_report(
    n_list: &[usize],
    cfg: &DensityConfig,
) -> Result<Vec<DensityRun>, DensityError> {
    cfg.classify.validate()?;
    if let Some(&n) = n_list.iter().find(|&&n| n < MIN_REPORT_DEGREE) {
        return Err(DensityError::DomainViolation(format!(
            "degree {n} below {MIN_REPORT_DEGREE}"
        )));
    }
    let model = sample_attractor::<f64>(cfg.samples, 53)?;
    Ok(n_list
        .par_iter()
        .map(|&n| {
            let roots = find_roots::<Mpf>(n, cfg.precision, cfg.seed).and_then(|rs| certify(&rs));
            match roots {
                Ok(rs) => {
                    let report = classify_roots(&rs, &model, &cfg.classify);
                    DensityRun {
                        n,
                        roots: Some(rs),
                        report,
                    }
                }
                Err(e) => DensityRun {
                    n,
                    roots: None,
                    report: Err(e.into()),
                },
            }
        })
        .collect())
}

/// Largest distance from an attractor sample to the nearest root of any of
/// the given root sets.
pub fn accumulation_gap<M: Real>(
    model: &AttractorModel<M>,
    root_sets: &[Vec<Complex<f64>>],
) -> f64 {
    let mut samples: Vec<Complex<f64>> = model.lower_arc.iter().map(|z| z.to_c64()).collect();
    samples.extend(model.upper_arc.iter().map(|z| z.to_c64()));
    let a = model.interval_half_f64();
    let m = model.samples_per_arc();
    samples.extend((0..m).map(|j| Complex::new(-a + 2.0 * a * j as f64 / (m - 1) as f64, 0.0)));
    samples
        .par_iter()
        .map(|s| {
            root_sets
                .iter()
                .flatten()
                .map(|r| (r - s).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::sample_attractor;

    fn root_set(roots: &[(f64, f64)]) -> RootSet<f64> {
        RootSet {
            n: roots.len(),
            precision_bits: 53,
            seed: 0,
            roots: roots.iter().map(|&(a, b)| Complex::new(a, b)).collect(),
            residuals: vec![0.0; roots.len()],
            newton_radii: vec![1e-30; roots.len()],
            cluster_warnings: vec![],
        }
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_uniform(&[0.5]).unwrap(), 0.5);
        let m = 9;
        let grid: Vec<f64> = (1..=m).map(|k| k as f64 / (m + 1) as f64).collect();
        assert!((ks_uniform(&grid).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(ks_uniform(&[]), Err(DensityError::EmptyInput));
        assert!(ks_uniform(&[1.5]).is_err());
    }

    #[test]
    fn small_degree_classification() {
        let model = sample_attractor::<f64>(128, 53).unwrap();
        let cfg = ClassifyConfig::default();
        let one = classify(&root_set(&[(0.5, 0.0)]), &model, &cfg).unwrap();
        assert_eq!(one.labels, vec![Component::Outlier]);
        let three = classify(
            &root_set(&[(1.0 / 6.0, 0.0), (-0.122, 0.0), (0.4553, 0.0)]),
            &model,
            &cfg,
        )
        .unwrap();
        assert_eq!(
            three.labels,
            vec![Component::Interval, Component::Interval, Component::Outlier]
        );
    }

    #[test]
    fn counting_functions() {
        let model = sample_attractor::<f64>(128, 53).unwrap();
        let rs = root_set(&[(0.01, 0.0), (-0.02, 0.0), (0.03, -0.31), (0.05, 0.3)]);
        let cls = classify(&rs, &model, &ClassifyConfig::default()).unwrap();
        assert_eq!(sector_count(&rs, &cls, 0.0, 0.0).unwrap(), 0);
        assert!(sector_count(&rs, &cls, 0.0, 2.0).is_err());
        assert_eq!(interval_count(&rs, &cls, 0.0, 0.1).unwrap(), 1);
        assert_eq!(interval_count(&rs, &cls, 0.05, 0.05).unwrap(), 0);
        assert!(interval_count(&rs, &cls, -0.2, 0.0).is_err());
        let c = Complex::new(0.0, 0.0);
        assert_eq!(disc_count(&rs, &c, f64::INFINITY).unwrap(), 4);
        assert_eq!(disc_count(&rs, &c, 0.03).unwrap(), 2);
        assert!(disc_count(&rs, &c, 0.0).is_err());
    }

    #[test]
    fn report_partitions_roots() {
        let model = sample_attractor::<f64>(128, 53).unwrap();
        let rs = root_set(&[
            (0.01, 0.0),
            (0.9, 0.0),
            (0.0, -std::f64::consts::FRAC_1_PI),
            (0.0, std::f64::consts::FRAC_1_PI),
        ]);
        let rep = classify_roots(&rs, &model, &ClassifyConfig::default()).unwrap();
        assert_eq!(rep.counts.total(), 4);
        assert_eq!(rep.counts.outlier, 1);
        assert!((rep.fractions.interval - 0.25).abs() < 1e-15);
        assert!(rep.max_distance < 1e-3);
    }

    #[test]
    fn bad_tolerances_are_rejected() {
        let cfg = ClassifyConfig {
            tol_real: Some(-1.0),
            tol_attr: 0.1,
        };
        assert!(cfg.validate().is_err());
        let cfg = ClassifyConfig {
            tol_real: None,
            tol_attr: 0.0,
        };
        assert!(cfg.validate().is_err());
        assert!(density_report(&[5], &DensityConfig::default()).is_err());
    }
}
