//! JSON potential files: `{"periods": [q1, ...], "values": [[re, im], ...]}`
//! with values in canonical cell order. Real entries may be bare numbers.

use std::fs;
use std::path::Path;

use bloch_core::{Complex64, LatticeConfig, Potential};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(&self) -> Complex64 {
        match *self {
            Entry::Pair([re, im]) => Complex64::new(re, im),
            Entry::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    pub periods: Vec<usize>,
    pub values: Vec<Entry>,
}

impl PotentialFile {
    pub fn from_potential(v: &Potential) -> Self {
        Self {
            periods: v.cfg().periods().to_vec(),
            values: v
                .values()
                .iter()
                .map(|z| Entry::Pair([z.re, z.im]))
                .collect(),
        }
    }

    pub fn to_potential(&self) -> Result<Potential, String> {
        let cfg = LatticeConfig::new(self.periods.clone()).map_err(|e| e.to_string())?;
        if self.values.len() != cfg.cell_size() {
            return Err(format!(
                "{} values for periods {:?} (expected {})",
                self.values.len(),
                self.periods,
                cfg.cell_size()
            ));
        }
        let values: Vec<Complex64> = self.values.iter().map(Entry::value).collect();
        if let Some(i) = values
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(format!("value {i} is not finite"));
        }
        Potential::new(cfg, values).map_err(|e| e.to_string())
    }
}

/// Parses a potential file held in memory; `path` is used for messages only.
pub fn parse_potential(text: &str, path: &Path) -> CliResult<Potential> {
    let malformed = |reason: String| CliError::Malformed {
        path: path.to_path_buf(),
        reason,
    };
    let file: PotentialFile = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    file.to_potential().map_err(malformed)
}

/// Reads a potential file, returning the raw bytes for digesting as well.
pub fn read_potential(path: &Path) -> CliResult<(Potential, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Malformed {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let v = parse_potential(text, path)?;
    Ok((v, bytes))
}

pub fn render_potential(v: &Potential) -> String {
    let mut s =
        serde_json::to_string(&PotentialFile::from_potential(v)).expect("finite values serialize");
    s.push('\n');
    s
}

pub fn write_potential(path: &Path, v: &Potential) -> CliResult<()> {
    fs::write(path, render_potential(v)).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
