use std::path::{Path, PathBuf};

use npannulus::geometry::{AnnulusGeometry, ConformalMap, MapFile};
use serde::Deserialize;

use crate::CliError;

/// Run settings. Loaded from `--config FILE` (JSON); command-line flags
/// override individual fields.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Map file; the built-in distorted example when absent.
    pub map: Option<PathBuf>,
    /// Overrides the map file's inner radius.
    pub ri: Option<f64>,
    /// Overrides the map file's outer radius.
    pub re: Option<f64>,
    pub order: usize,
    pub nq: usize,
    pub out: PathBuf,
    pub rho: Option<f64>,
    pub ratios: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            map: None,
            ri: None,
            re: None,
            order: 250,
            nq: 512,
            out: PathBuf::from("out"),
            rho: None,
            ratios: vec![0.5, 0.8, 0.95, 1.1 / 1.15],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    /// Checks every numeric field before any computation starts.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.order == 0 {
            return Err(CliError::Input("order must be at least 1".into()));
        }
        if self.nq < 16 || self.nq % 2 != 0 {
            return Err(CliError::Input(format!(
                "nq must be even and at least 16, got {}",
                self.nq
            )));
        }
        for (name, v) in [("ri", self.ri), ("re", self.re)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Input(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let Some(rho) = self.rho {
            if !(0.0..1.0).contains(&rho) {
                return Err(CliError::Input(format!(
                    "rho must lie in [0, 1), got {rho}"
                )));
            }
        }
        if let Some(&r) = self.ratios.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(CliError::Input(format!(
                "ratios must lie in (0, 1), got {r}"
            )));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<AnnulusGeometry, CliError> {
        let (map, ri, re) = match &self.map {
            Some(path) => {
                let file = MapFile::load(path)?;
                (file.conformal_map()?, file.ri, file.re)
            }
            None => (ConformalMap::paper_example(), 1.1, 1.15),
        };
        Ok(AnnulusGeometry::new(
            map,
            self.ri.unwrap_or(ri),
            self.re.unwrap_or(re),
        )?)
    }
}

pub fn parse_ratios(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| CliError::Input(format!("bad ratio {s:?}")))
        })
        .collect()
}
