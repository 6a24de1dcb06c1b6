//! One function per subcommand; each returns the text to emit.

use std::collections::BTreeMap;
use std::path::Path;

use euler_attractor::attractor::sample_attractor;
use euler_attractor::decomp::diagnostic_row;
use euler_attractor::density::classify_roots;
use euler_attractor::eulerpoly::{default_precision, euler_polynomial, CoeffDocument};
use euler_attractor::json::{
    density_csv, encode, encode_c, to_json_string, AttractorDocument, DecimalComplex, DegreeError,
    DensityDocument, RootSetDocument,
};
use euler_attractor::mproots::Precision;
use euler_attractor::szego::{compare, error_slope, Approximation, SzegoConfig};
use euler_attractor::{Attractor64, ComplexReal, MpComplex, MpRootSet, Mpf, Real};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{certified_roots, RootCache};
use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::svg;

pub const COEFFS_FORMAT: &str = "euler-coeffs/1";
pub const SZEGO_FORMAT: &str = "euler-szego/1";
pub const DECOMP_FORMAT: &str = "euler-decomp/1";

/// Default attractor precision when `precision_bits` is `auto`.
pub const ATTRACTOR_AUTO_BITS: u32 = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffsDocument {
    pub format: String,
    #[serde(flatten)]
    pub coeffs: CoeffDocument,
    pub config: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SzegoRowDocument {
    pub n: usize,
    pub exact: DecimalComplex,
    pub approx: DecimalComplex,
    pub abs_err: String,
    pub rel_err: String,
    pub fit_error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SzegoDocument {
    pub format: String,
    pub which: String,
    pub point: DecimalComplex,
    pub precision_bits: u32,
    pub alpha: f64,
    pub expected_order: f64,
    pub rows: Vec<SzegoRowDocument>,
    /// Log-log slope of the fit error; present for three or more degrees.
    pub slope: Option<f64>,
    pub config: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompDocument {
    pub format: String,
    pub n: usize,
    pub mu: u32,
    pub precision_bits: u32,
    pub x: DecimalComplex,
    pub e_over_nfact: DecimalComplex,
    pub k: DecimalComplex,
    pub m_exact: DecimalComplex,
    pub m_saddle: Option<DecimalComplex>,
    pub saddle_rel_err: Option<String>,
    pub identity_residual: String,
    pub config: BTreeMap<String, String>,
}

fn cache_for(cfg: &RunConfig) -> Result<Option<RootCache>, CliError> {
    cfg.cache_dir.as_deref().map(RootCache::new).transpose()
}

fn read_roots(path: &Path) -> Result<MpRootSet, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let doc: RootSetDocument = serde_json::from_str(&text)?;
    Ok(doc.to_root_set::<Mpf>()?)
}

fn model(cfg: &RunConfig) -> Result<Attractor64, CliError> {
    Ok(sample_attractor::<f64>(cfg.samples, 53)?)
}

pub fn cmd_coeffs(n: usize, cfg: &RunConfig) -> Result<String, CliError> {
    let doc = CoeffsDocument {
        format: COEFFS_FORMAT.into(),
        coeffs: euler_polynomial(n).to_document(),
        config: cfg.provenance(),
    };
    Ok(to_json_string(&doc)?)
}

pub fn cmd_roots(n: usize, cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let rs = certified_roots(n, cfg.precision, cfg.seed, cache_for(cfg)?.as_ref())?;
    Ok(to_json_string(&RootSetDocument::from_root_set(
        &rs,
        cfg.provenance(),
    ))?)
}

pub fn cmd_attractor(m: usize, cfg: &RunConfig) -> Result<String, CliError> {
    let bits = match cfg.precision {
        Precision::Auto => ATTRACTOR_AUTO_BITS,
        Precision::Bits(b) => b,
    };
    let model = sample_attractor::<Mpf>(m, bits)?;
    Ok(to_json_string(&AttractorDocument::from_model(
        &model,
        cfg.provenance(),
    ))?)
}

pub fn cmd_classify(roots_file: &Path, cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let rs = read_roots(roots_file)?;
    let report = classify_roots(&rs, &model(cfg)?, &cfg.classify())?;
    match cfg.format {
        OutputFormat::Json => Ok(to_json_string(&DensityDocument::new(
            vec![report],
            vec![],
            cfg.provenance(),
        ))?),
        OutputFormat::Csv => Ok(density_csv(&[report])?),
    }
}

/// The text plus the first per-degree failure, if any; successful degrees
/// are reported either way.
pub fn cmd_density(
    n_list: &[usize],
    cfg: &RunConfig,
) -> Result<(String, Option<CliError>), CliError> {
    cfg.validate()?;
    if n_list.is_empty() {
        return Err(CliError::Usage("--n-list is empty".into()));
    }
    let model = model(cfg)?;
    let cache = cache_for(cfg)?;
    let outcomes: Vec<(usize, Result<_, CliError>)> = n_list
        .par_iter()
        .map(|&n| {
            let report = certified_roots(n, cfg.precision, cfg.seed, cache.as_ref())
                .and_then(|rs| Ok(classify_roots(&rs, &model, &cfg.classify())?));
            (n, report)
        })
        .collect();
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    let mut first = None;
    for (n, r) in outcomes {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => {
                errors.push(DegreeError {
                    n,
                    error: e.to_string(),
                });
                first.get_or_insert(e);
            }
        }
    }
    let text = match cfg.format {
        OutputFormat::Json => {
            to_json_string(&DensityDocument::new(reports, errors, cfg.provenance()))?
        }
        OutputFormat::Csv => density_csv(&reports)?,
    };
    Ok((text, first))
}

pub fn cmd_szego(
    which: Approximation,
    point: (f64, f64),
    n_list: &[usize],
    cfg: &RunConfig,
) -> Result<String, CliError> {
    cfg.validate()?;
    let szego = SzegoConfig::new(cfg.alpha)?;
    let n_max = n_list
        .iter()
        .copied()
        .max()
        .ok_or_else(|| CliError::Usage("--n-list is empty".into()))?;
    let bits = cfg.precision.resolve(n_max);
    let z = MpComplex::from_f64s(point.0, point.1, bits);
    let rows = n_list
        .iter()
        .map(|&n| {
            let row = compare(which, &z, n)?;
            Ok(SzegoRowDocument {
                n,
                exact: encode_c(&row.exact),
                approx: encode_c(&row.approx),
                abs_err: encode(&row.abs_err),
                rel_err: encode(&row.rel_err),
                fit_error: encode(&row.fit_error()),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let slope = if n_list.len() >= 3 {
        Some(error_slope(which, &z, n_list)?)
    } else {
        None
    };
    let doc = SzegoDocument {
        format: SZEGO_FORMAT.into(),
        which: which.name().into(),
        point: encode_c(&z),
        precision_bits: bits,
        alpha: szego.alpha(),
        expected_order: szego.expected_order(),
        rows,
        slope,
        config: cfg.provenance(),
    };
    Ok(to_json_string(&doc)?)
}

pub fn cmd_decomp(n: usize, x: (f64, f64), cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let bits = match cfg.precision {
        Precision::Auto => default_precision(n).max(512),
        Precision::Bits(b) => b,
    };
    let x = MpComplex::from_f64s(x.0, x.1, bits);
    let row = diagnostic_row(n, cfg.mu, &x, bits)?;
    let saddle_rel_err = row.m_saddle.as_ref().map(|s| {
        let mut e = (s.clone() - row.m_exact.clone()).cabs();
        e /= &row.m_exact.cabs();
        encode(&e)
    });
    let doc = DecompDocument {
        format: DECOMP_FORMAT.into(),
        n,
        mu: cfg.mu,
        precision_bits: bits,
        x: encode_c(&row.x),
        e_over_nfact: encode_c(&row.e_over_nfact),
        k: encode_c(&row.k),
        m_exact: encode_c(&row.m_exact),
        m_saddle: row.m_saddle.as_ref().map(encode_c),
        saddle_rel_err,
        identity_residual: encode(&row.identity_residual),
        config: cfg.provenance(),
    };
    Ok(to_json_string(&doc)?)
}

pub fn cmd_plot(roots_file: &Path, attractor_file: &Path) -> Result<String, CliError> {
    let rs = read_roots(roots_file)?;
    let text = std::fs::read_to_string(attractor_file).map_err(|e| {
        CliError::Validation(format!("cannot read {}: {e}", attractor_file.display()))
    })?;
    let doc: AttractorDocument = serde_json::from_str(&text)?;
    let model = doc.to_model::<Mpf>()?;
    let c64 = |v: &[MpComplex]| v.iter().map(|z| z.to_c64()).collect::<Vec<_>>();
    Ok(svg::render(
        &rs.roots_c64(),
        &c64(&model.lower_arc),
        &c64(&model.upper_arc),
        model.interval.1.to_f64(),
    ))
}
