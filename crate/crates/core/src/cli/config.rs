//! JSON config schemas, one per command.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normspace::{NormSpec, NormedSpace};
use crate::opnorm::OperatorSpec;
use crate::sip::SelectionSpec;

pub(crate) fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

/// Dimension precedence: explicit `dim`, then the spec, then the vector length.
pub(crate) fn build_space(spec: &NormSpec, dim: Option<usize>, fallback: usize) -> Result<NormedSpace> {
    let dim = dim.or(spec.implied_dim()).unwrap_or(fallback);
    NormedSpace::from_spec(spec.clone(), dim)
}

/// `norm` and `support`
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorConfig {
    pub space: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub x: Vec<f64>,
}

impl VectorConfig {
    pub fn space(&self) -> Result<NormedSpace> {
        build_space(&self.space, self.dim, self.x.len())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualConfig {
    pub space: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub functional: Vec<f64>,
}

impl DualConfig {
    pub fn space(&self) -> Result<NormedSpace> {
        build_space(&self.space, self.dim, self.functional.len())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SipConfig {
    pub space: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionSpec>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SipConfig {
    pub fn space(&self) -> Result<NormedSpace> {
        build_space(&self.space, self.dim, self.x.len())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub space: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ClassifyConfig {
    pub fn space(&self) -> Result<NormedSpace> {
        build_space(&self.space, self.dim, self.x.len())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpnormConfig {
    pub operator: OperatorSpec,
    /// multi-start count; 256 up to dimension 3, 1024 above
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "lowercase", deny_unknown_fields)]
pub enum VerifyConfig {
    T21 {
        space: NormSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        functional: Vec<f64>,
        z: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
    },
    T22 {
        operator: OperatorSpec,
        z: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
    },
    L22 {
        operator: OperatorSpec,
        z: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subspace: Option<Vec<f64>>,
    },
    T23 {
        operator: OperatorSpec,
        z: Vec<f64>,
        x: Vec<f64>,
    },
    T24 {
        operator: OperatorSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairs: Option<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereConfig {
    pub space: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub resolution: usize,
    /// adds `MT` rows for the attainment points of this operator
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
}

impl SphereConfig {
    pub fn space(&self) -> Result<NormedSpace> {
        build_space(&self.space, self.dim, 2)
    }
}
