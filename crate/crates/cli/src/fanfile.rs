//! The JSON fan description read by every command.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use toric_k::{corpus, Fan};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    #[serde(default)]
    pub name: Option<String>,
    pub lattice_rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanFile {
    pub fn parse(text: &str, origin: &str) -> Result<FanFile, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
    }

    pub fn to_fan(&self) -> Result<Fan, CliError> {
        let rays: Vec<Vec<BigInt>> = self
            .rays
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let fan = Fan::from_max_cones(self.lattice_rank, &rays, &self.max_cones)
            .map_err(|e| CliError::Input(format!("invalid fan: {e}")))?;
        Ok(match &self.name {
            Some(n) => fan.with_name(n.clone()),
            None => fan,
        })
    }
}

/// A fan together with the warnings raised while loading it.
pub struct LoadedFan {
    pub fan: Arc<Fan>,
    pub source: String,
    pub warnings: Vec<String>,
}

/// Reads a fan file, or a built-in fan given as `corpus:NAME`.
pub fn load(spec: &str) -> Result<LoadedFan, CliError> {
    if let Some(name) = spec.strip_prefix("corpus:") {
        let fan = corpus::fan_by_name(name).ok_or_else(|| CliError::Input(format!("unknown corpus fan {name}")))?;
        return Ok(LoadedFan {
            fan,
            source: spec.to_string(),
            warnings: Vec::new(),
        });
    }
    let text = std::fs::read_to_string(Path::new(spec)).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
    let file = FanFile::parse(&text, spec)?;
    let fan = file.to_fan()?;
    let warnings = fan
        .normalized_rays()
        .iter()
        .map(|i| format!("ray {i} was not primitive and has been normalized"))
        .collect();
    Ok(LoadedFan {
        fan: Arc::new(fan),
        source: spec.to_string(),
        warnings,
    })
}
