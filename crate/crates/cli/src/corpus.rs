//! Locating and loading the shipped certificate corpus and its index.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::commands::CliError;

/// Overrides the corpus directory.
pub const CERT_DIR_ENV: &str = "BURNIAT_CERT_DIR";

pub fn default_cert_dir() -> PathBuf {
    match std::env::var_os(CERT_DIR_ENV) {
        Some(p) => PathBuf::from(p),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../certs"),
    }
}

#[derive(Clone, Debug)]
pub struct CertFile {
    pub path: PathBuf,
    pub text: String,
}

/// Every `*.cert` file of `dir`, sorted by file name.
pub fn load_corpus(dir: &Path) -> Result<Vec<CertFile>, CliError> {
    let rd = fs::read_dir(dir).map_err(|e| CliError::Io(dir.display().to_string(), e.to_string()))?;
    let mut paths: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cert"))
        .collect();
    paths.sort();
    paths.into_iter().map(|p| read_cert(&p)).collect()
}

pub fn read_cert(path: &Path) -> Result<CertFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
    Ok(CertFile { path: path.to_path_buf(), text })
}

/// One row of `index.toml`: which case a certificate formalizes and the
/// one-line contradiction it ends in.
#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
pub struct IndexEntry {
    pub id: String,
    pub case: String,
    pub contradiction: String,
}

#[derive(Deserialize)]
struct RawIndex {
    cert: Vec<IndexEntry>,
}

pub fn load_index(dir: &Path) -> Result<BTreeMap<String, IndexEntry>, CliError> {
    let path = dir.join("index.toml");
    let text = fs::read_to_string(&path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
    let raw: RawIndex = toml::from_str(&text).map_err(|e| CliError::Index(e.to_string()))?;
    let mut out = BTreeMap::new();
    for e in raw.cert {
        if out.insert(e.id.clone(), e.clone()).is_some() {
            return Err(CliError::Index(format!("duplicate id `{}`", e.id)));
        }
    }
    Ok(out)
}
