//! Run configuration shared by the CLI and the evaluation harness.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::floorplan::Context;
use crate::matching::{ContextWeights, MatchConfig};
use crate::pipeline::Method;
use crate::placement::PlacementConfig;
use crate::subspace::SubspaceConfig;

pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config `{path}`: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Every tunable of a run. Omitted keys take their defaults; unknown keys
/// are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub context: Option<Context>,
    pub method: Option<Method>,
    /// Replaces the method's preset weights when set.
    pub weights: Option<ContextWeights>,
    /// Host region to use as the interaction target instead of the
    /// automatically selected one.
    pub host_target: Option<String>,
    pub matching: MatchConfig,
    pub placement: PlacementConfig,
    pub subspace: SubspaceConfig,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            context: None,
            method: None,
            weights: None,
            host_target: None,
            matching: MatchConfig::default(),
            placement: PlacementConfig::default(),
            subspace: SubspaceConfig::default(),
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let inv = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        if let Some(w) = &self.weights {
            w.validate().map_err(|e| inv(&e))?;
        }
        self.matching.validate().map_err(|e| inv(&e))?;
        self.placement.validate().map_err(|e| inv(&e))?;
        self.subspace.validate().map_err(|e| inv(&e))?;
        if let (Some(c), Some(m)) = (self.context, self.method) {
            if m.uses_subspaces() && m != Method::SIsa && m.context() != c {
                return Err(ConfigError::Invalid(format!(
                    "method {m} does not run in the {c} context"
                )));
            }
        }
        Ok(())
    }

    /// Method implied by the method and context fields; SA-Floor when neither is set.
    pub fn resolved_method(&self) -> Method {
        self.method
            .unwrap_or_else(|| self.context.map(Method::for_context).unwrap_or(Method::SaFloor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_published_constants() {
        let c = RunConfig::default();
        assert_eq!(c.placement.personal_diameter, 0.6);
        assert_eq!(c.placement.surface_offset, 0.45);
        assert_eq!(c.placement.d_step, 0.2);
        assert_eq!(c.subspace.marker_step, 0.1);
        assert_eq!(c.subspace.marker_thickness, 0.1);
        assert_eq!(c.subspace.marker_start, 0.3);
        assert_eq!(Method::SaTable.weights().as_array(), [10.0, 10.0, 100.0, 0.0, 0.0]);
    }

    #[test]
    fn round_trips_and_rejects_unknown_keys() {
        let c = RunConfig::default();
        let back = RunConfig::from_json(&c.to_json(), Path::new("x.json")).unwrap();
        assert_eq!(back, c);
        let err = RunConfig::from_json(r#"{"placement": {"d_stp": 0.1}}"#, Path::new("x.json")).unwrap_err();
        assert!(err.to_string().contains("d_stp"), "{err}");
    }

    #[test]
    fn partial_file_keeps_other_defaults() {
        let c = RunConfig::from_json(r#"{"method": "S-TI", "matching": {"seed": 7}}"#, Path::new("x")).unwrap();
        assert_eq!(c.method, Some(Method::STi));
        assert_eq!(c.matching.seed, 7);
        assert_eq!(c.matching.population, MatchConfig::default().population);
    }

    #[test]
    fn rejects_out_of_range_values() {
        for bad in [
            r#"{"placement": {"d_step": 0}}"#,
            r#"{"subspace": {"marker_step": -0.1}}"#,
            r#"{"matching": {"population": 2}}"#,
            r#"{"weights": {"w1": -1, "w2": 0, "w3": 0, "w4": 0, "w5": 0}}"#,
            r#"{"context": "wall", "method": "SA-Table"}"#,
        ] {
            assert!(RunConfig::from_json(bad, Path::new("x")).is_err(), "{bad}");
        }
    }
}
