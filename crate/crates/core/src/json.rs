//! JSON and CSV documents. Multiprecision values travel as decimal strings
//! with enough digits to reproduce the binary value exactly.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attractor::{key_constants, AttractorModel};
use crate::density::DensityReport;
use crate::mproots::RootSet;
use crate::scalar::Real;

pub const ROOTS_FORMAT: &str = "euler-roots/1";
pub const ATTRACTOR_FORMAT: &str = "euler-attractor/1";
pub const DENSITY_FORMAT: &str = "euler-density/1";

/// Precision of the stored residuals and Newton radii.
pub const DIAGNOSTIC_BITS: u32 = 64;

const KEY_POINTS: [&str; 4] = ["bottom", "left_end", "right_end", "top"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("invalid document: {0}")]
    Invalid(String),
}

impl From<serde_json::Error> for JsonError {
    fn from(e: serde_json::Error) -> Self {
        JsonError::Syntax(e.to_string())
    }
}

/// Significant decimal digits that round-trip a `bits`-bit binary float.
pub fn decimal_digits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

/// Decimal string that parses back to `v` at its own precision.
pub fn encode<T: Real>(v: &T) -> String {
    v.to_decimal(decimal_digits(v.precision()))
}

/// Complex value as a pair of decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalComplex {
    pub re: String,
    pub im: String,
}

pub fn encode_c<T: Real>(z: &Complex<T>) -> DecimalComplex {
    DecimalComplex {
        re: encode(&z.re),
        im: encode(&z.im),
    }
}

fn decode<T: Real>(s: &str, bits: u32, what: &str) -> Result<T, JsonError> {
    T::parse_decimal(s, bits)
        .ok_or_else(|| JsonError::Invalid(format!("{what}: cannot parse {s:?}")))
}

fn decode_c<T: Real>(z: &DecimalComplex, bits: u32, what: &str) -> Result<Complex<T>, JsonError> {
    Ok(Complex::new(
        decode(&z.re, bits, what)?,
        decode(&z.im, bits, what)?,
    ))
}

fn check_format(found: &str, expected: &str) -> Result<(), JsonError> {
    if found != expected {
        return Err(JsonError::Invalid(format!(
            "format {found:?}, expected {expected:?}"
        )));
    }
    Ok(())
}

/// Serialized [`RootSet`] plus the run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSetDocument {
    pub format: String,
    pub n: usize,
    pub precision_bits: u32,
    pub seed: u64,
    pub roots: Vec<DecimalComplex>,
    pub residuals: Vec<String>,
    pub newton_radii: Vec<String>,
    pub cluster_warnings: Vec<usize>,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
}

impl RootSetDocument {
    pub fn from_root_set<T: Real>(rs: &RootSet<T>, config: BTreeMap<String, String>) -> Self {
        RootSetDocument {
            format: ROOTS_FORMAT.to_string(),
            n: rs.n,
            precision_bits: rs.precision_bits,
            seed: rs.seed,
            roots: rs.roots.iter().map(encode_c).collect(),
            residuals: rs.residuals.iter().map(encode).collect(),
            newton_radii: rs.newton_radii.iter().map(encode).collect(),
            cluster_warnings: rs.cluster_warnings.clone(),
            config,
        }
    }

    pub fn to_root_set<T: Real>(&self) -> Result<RootSet<T>, JsonError> {
        check_format(&self.format, ROOTS_FORMAT)?;
        let n = self.n;
        if self.roots.len() != n || self.residuals.len() != n || self.newton_radii.len() != n {
            return Err(JsonError::Invalid(format!(
                "expected {n} roots, residuals and radii, got {}, {}, {}",
                self.roots.len(),
                self.residuals.len(),
                self.newton_radii.len()
            )));
        }
        if let Some(&i) = self.cluster_warnings.iter().find(|&&i| i >= n) {
            return Err(JsonError::Invalid(format!(
                "cluster warning index {i} out of range"
            )));
        }
        let bits = self.precision_bits;
        Ok(RootSet {
            n,
            precision_bits: bits,
            seed: self.seed,
            roots: self
                .roots
                .iter()
                .map(|z| decode_c(z, bits, "root"))
                .collect::<Result<_, _>>()?,
            residuals: self
                .residuals
                .iter()
                .map(|s| decode(s, DIAGNOSTIC_BITS, "residual"))
                .collect::<Result<_, _>>()?,
            newton_radii: self
                .newton_radii
                .iter()
                .map(|s| decode(s, DIAGNOSTIC_BITS, "newton radius"))
                .collect::<Result<_, _>>()?,
            cluster_warnings: self.cluster_warnings.clone(),
        })
    }
}

/// Serialized [`AttractorModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractorDocument {
    pub format: String,
    pub samples: usize,
    pub precision_bits: u32,
    pub interval: [String; 2],
    pub thetas: Vec<String>,
    pub lower_arc: Vec<DecimalComplex>,
    pub upper_arc: Vec<DecimalComplex>,
    pub key_points: BTreeMap<String, DecimalComplex>,
    pub constants: BTreeMap<String, String>,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
}

impl AttractorDocument {
    pub fn from_model<T: Real>(
        model: &AttractorModel<T>,
        config: BTreeMap<String, String>,
    ) -> Self {
        AttractorDocument {
            format: ATTRACTOR_FORMAT.to_string(),
            samples: model.samples_per_arc(),
            precision_bits: model.precision_bits,
            interval: [encode(&model.interval.0), encode(&model.interval.1)],
            thetas: model.thetas.iter().map(encode).collect(),
            lower_arc: model.lower_arc.iter().map(encode_c).collect(),
            upper_arc: model.upper_arc.iter().map(encode_c).collect(),
            key_points: model
                .key_points
                .iter()
                .map(|(k, v)| (k.to_string(), encode_c(v)))
                .collect(),
            constants: model
                .constants
                .iter()
                .map(|(k, v)| (k.to_string(), encode(v)))
                .collect(),
            config,
        }
    }

    pub fn to_model<T: Real>(&self) -> Result<AttractorModel<T>, JsonError> {
        check_format(&self.format, ATTRACTOR_FORMAT)?;
        let m = self.samples;
        if self.thetas.len() != m || self.lower_arc.len() != m || self.upper_arc.len() != m {
            return Err(JsonError::Invalid(format!("expected {m} samples per arc")));
        }
        let bits = self.precision_bits;
        let constant_names: Vec<&'static str> = key_constants::<f64>(53).into_keys().collect();
        let mut constants = BTreeMap::new();
        for (k, v) in &self.constants {
            let name = constant_names
                .iter()
                .find(|c| **c == k.as_str())
                .ok_or_else(|| JsonError::Invalid(format!("unknown constant {k:?}")))?;
            constants.insert(*name, decode(v, bits, k)?);
        }
        let mut key_points = BTreeMap::new();
        for (k, v) in &self.key_points {
            let name = KEY_POINTS
                .iter()
                .find(|c| **c == k.as_str())
                .ok_or_else(|| JsonError::Invalid(format!("unknown key point {k:?}")))?;
            key_points.insert(*name, decode_c(v, bits, k)?);
        }
        Ok(AttractorModel {
            precision_bits: bits,
            interval: (
                decode(&self.interval[0], bits, "interval")?,
                decode(&self.interval[1], bits, "interval")?,
            ),
            thetas: self
                .thetas
                .iter()
                .map(|s| decode(s, bits, "theta"))
                .collect::<Result<_, _>>()?,
            lower_arc: self
                .lower_arc
                .iter()
                .map(|z| decode_c(z, bits, "arc"))
                .collect::<Result<_, _>>()?,
            upper_arc: self
                .upper_arc
                .iter()
                .map(|z| decode_c(z, bits, "arc"))
                .collect::<Result<_, _>>()?,
            key_points,
            constants,
        })
    }
}

/// Failure recorded for one degree of a density run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeError {
    pub n: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityDocument {
    pub format: String,
    pub reports: Vec<DensityReport>,
    #[serde(default)]
    pub errors: Vec<DegreeError>,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
}

impl DensityDocument {
    pub fn new(
        reports: Vec<DensityReport>,
        errors: Vec<DegreeError>,
        config: BTreeMap<String, String>,
    ) -> Self {
        DensityDocument {
            format: DENSITY_FORMAT.to_string(),
            reports,
            errors,
            config,
        }
    }

    pub fn validate(&self) -> Result<(), JsonError> {
        check_format(&self.format, DENSITY_FORMAT)?;
        for r in &self.reports {
            if r.counts.total() != r.n {
                return Err(JsonError::Invalid(format!(
                    "counts for n = {} do not sum to n",
                    r.n
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct CsvRow {
    n: usize,
    interval: usize,
    lower_arc: usize,
    upper_arc: usize,
    outlier: usize,
    interval_fraction: f64,
    lower_left: usize,
    lower_right: usize,
    upper_left: usize,
    upper_right: usize,
    ks_arc: Option<f64>,
    ks_interval: Option<f64>,
    interval_deviation: f64,
    quarter_arc_deviation: f64,
    max_distance: f64,
    p95_distance: f64,
}

/// One CSV row per degree.
pub fn density_csv(reports: &[DensityReport]) -> Result<String, JsonError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(CsvRow {
            n: r.n,
            interval: r.counts.interval,
            lower_arc: r.counts.lower_arc,
            upper_arc: r.counts.upper_arc,
            outlier: r.counts.outlier,
            interval_fraction: r.fractions.interval,
            lower_left: r.quarter_counts.lower_left,
            lower_right: r.quarter_counts.lower_right,
            upper_left: r.quarter_counts.upper_left,
            upper_right: r.quarter_counts.upper_right,
            ks_arc: r.ks_arc,
            ks_interval: r.ks_interval,
            interval_deviation: r.deviations.interval,
            quarter_arc_deviation: r.deviations.quarter_arc,
            max_distance: r.max_distance,
            p95_distance: r.p95_distance,
        })
        .map_err(|e| JsonError::Invalid(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| JsonError::Invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| JsonError::Invalid(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<S: Serialize>(doc: &S) -> Result<String, JsonError> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::sample_attractor;
    use crate::mproots::{find_roots, Precision};
    use crate::scalar::Mpf;

    #[test]
    fn digits_cover_precision() {
        assert_eq!(decimal_digits(53), 17);
        assert_eq!(decimal_digits(256), 79);
    }

    #[test]
    fn roots_round_trip_exactly() {
        let rs = find_roots::<Mpf>(12, Precision::Bits(160), 3).unwrap();
        let doc = RootSetDocument::from_root_set(&rs, BTreeMap::new());
        let text = to_json_string(&doc).unwrap();
        let back: RootSetDocument = serde_json::from_str(&text).unwrap();
        let reloaded = back.to_root_set::<Mpf>().unwrap();
        assert_eq!(reloaded, rs);
        let again =
            to_json_string(&RootSetDocument::from_root_set(&reloaded, BTreeMap::new())).unwrap();
        assert_eq!(again, text);
    }

    #[test]
    fn attractor_round_trip_exactly() {
        let model = sample_attractor::<Mpf>(16, 96).unwrap();
        let doc = AttractorDocument::from_model(&model, BTreeMap::new());
        let back = doc.to_model::<Mpf>().unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let rs = find_roots::<f64>(5, Precision::Bits(53), 0).unwrap();
        let mut doc = RootSetDocument::from_root_set(&rs, BTreeMap::new());
        doc.roots.pop();
        assert!(doc.to_root_set::<f64>().is_err());
        let mut doc = RootSetDocument::from_root_set(&rs, BTreeMap::new());
        doc.roots[0].re = "abc".into();
        assert!(doc.to_root_set::<f64>().is_err());
        doc.format = "other".into();
        assert!(matches!(
            doc.to_root_set::<f64>(),
            Err(JsonError::Invalid(_))
        ));
    }
}
