//! Content-addressed store of certified root sets.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use euler_attractor::json::{to_json_string, RootSetDocument, ROOTS_FORMAT};
use euler_attractor::mproots::{certify, find_roots, Precision};
use euler_attractor::{MpRootSet, Mpf};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub struct RootCache {
    dir: PathBuf,
}

/// Hex SHA-256 of everything that determines a root set.
pub fn cache_key(n: usize, bits: u32, seed: u64) -> String {
    let text = format!(
        "{ROOTS_FORMAT};n={n};bits={bits};seed={seed};version={}",
        env!("CARGO_PKG_VERSION")
    );
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RootCache {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(RootCache {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self, n: usize, bits: u32, seed: u64) -> PathBuf {
        self.dir
            .join(format!("roots-{}.json", cache_key(n, bits, seed)))
    }

    /// Unreadable or mismatching entries count as misses.
    pub fn load(&self, n: usize, bits: u32, seed: u64) -> Option<MpRootSet> {
        let text = fs::read_to_string(self.path(n, bits, seed)).ok()?;
        let doc: RootSetDocument = serde_json::from_str(&text).ok()?;
        let rs = doc.to_root_set::<Mpf>().ok()?;
        (rs.n == n && rs.precision_bits == bits && rs.seed == seed).then_some(rs)
    }

    pub fn store(&self, rs: &MpRootSet) -> Result<(), CliError> {
        let path = self.path(rs.n, rs.precision_bits, rs.seed);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(
            &tmp,
            to_json_string(&RootSetDocument::from_root_set(rs, BTreeMap::new()))?,
        )?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

/// Certified roots, from the cache when present.
pub fn certified_roots(
    n: usize,
    precision: Precision,
    seed: u64,
    cache: Option<&RootCache>,
) -> Result<MpRootSet, CliError> {
    let bits = precision.resolve(n);
    if let Some(hit) = cache.and_then(|c| c.load(n, bits, seed)) {
        return Ok(hit);
    }
    let rs = certify(&find_roots::<Mpf>(n, precision, seed)?)?;
    if let Some(c) = cache {
        c.store(&rs)?;
    }
    Ok(rs)
}
