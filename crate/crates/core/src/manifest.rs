//! TOML experiment manifests: one command with its inputs and options.
//!
//! ```toml
//! command = "simulate"
//! model = "vdp.model"
//! protocol = "vdp_loop.protocol"
//! out = "vdp_sweep.csv"
//!
//! [options]
//! tol = 1e-11
//! orientation = "both"
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::protocol::TOL_RANGE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Derive,
    Curvature,
    Simulate,
    Validate,
}

impl Command {
    pub fn needs_protocol(self) -> bool {
        matches!(self, Command::Simulate | Command::Validate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationChoice {
    Ccw,
    Cw,
    Both,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub singular_only: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub golden: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<OrientationChoice>,
    /// Curvature point; the first two keys span the plane, in this order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub at: Vec<(String, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub command: Command,
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: ManifestOptions,
}

fn is_default(o: &ManifestOptions) -> bool {
    *o == ManifestOptions::default()
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

impl ExperimentManifest {
    pub fn new(command: Command, model: impl Into<String>) -> Self {
        Self { command, model: model.into(), protocol: None, out: None, options: ManifestOptions::default() }
    }

    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        parse_manifest(text)
    }

    pub fn check(&self) -> Result<(), String> {
        if self.model.is_empty() {
            return Err("`model` is empty".into());
        }
        if self.command.needs_protocol() && self.protocol.is_none() {
            return Err(format!("command `{:?}` needs `protocol`", self.command).to_lowercase());
        }
        let o = &self.options;
        if let Some(t) = o.tol {
            if !(TOL_RANGE.0..=TOL_RANGE.1).contains(&t) {
                return Err(format!("tol {t} outside [{:e}, {:e}]", TOL_RANGE.0, TOL_RANGE.1));
            }
        }
        if let Some(h) = o.h {
            if !(h.is_finite() && h > 0.0) {
                return Err("h must be positive".into());
            }
        }
        if let Some(a) = o.agreement {
            if !(a.is_finite() && a > 0.0) {
                return Err("agreement must be positive".into());
            }
        }
        if !o.at.iter().all(|(_, v)| v.is_finite()) {
            return Err("`at` values must be finite".into());
        }
        if self.command == Command::Curvature && o.at.len() < 2 {
            return Err("curvature needs at least two `at` entries".into());
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are always representable")
    }

    /// `at` as a lookup table.
    pub fn at_map(&self) -> BTreeMap<String, f64> {
        self.options.at.iter().cloned().collect()
    }
}

pub fn parse_manifest(text: &str) -> Result<ExperimentManifest, ManifestError> {
    let m: ExperimentManifest = toml::from_str(text)?;
    m.check().map_err(ManifestError::Invalid)?;
    Ok(m)
}
