//! Optional JSON file of flag values. Keys are the long flag names without
//! the leading dashes; command-line flags win over file values.
//!
//! ```json
//! { "r0": 1, "x": 1.2, "y": 0.9, "window": "-10:10,-10:10", "tol": 1e-12 }
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    GaussSeidel,
    Jacobi,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    /// Replace the interior by the discrete harmonic extension of the boundary.
    Harmonic,
    /// Start from the interior values in the file.
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ColorArg {
    Uniform,
    LogRadius,
    D1u,
    Residual,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub r0: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub window: Option<String>,
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub mode: Option<ModeArg>,
    pub init: Option<InitArg>,
    pub order: Option<usize>,
    pub threads: Option<usize>,
    pub start: Option<String>,
    pub steps: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub weights: Option<PathBuf>,
    pub color: Option<ColorArg>,
    pub stroke_width: Option<f64>,
    pub padding: Option<f64>,
    pub layout: Option<PathBuf>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_known_keys() {
        let c = Config::parse(r#"{"r0": 2, "x": 1.5, "max-iter": 10, "mode": "newton", "in": "a.csv"}"#).unwrap();
        assert_eq!(c.r0, Some(2.0));
        assert_eq!(c.x, Some(1.5));
        assert_eq!(c.max_iter, Some(10));
        assert_eq!(c.mode, Some(ModeArg::Newton));
        assert_eq!(c.input, Some(PathBuf::from("a.csv")));
        assert_eq!(c.y, None);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = Config::parse(r#"{"x": 1, "bogus": 3}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
    }

    #[test]
    fn empty_object_is_default() {
        assert_eq!(Config::parse("{}").unwrap(), Config::default());
    }
}
