//! Constructive checks of the norm-attainment characterizations.
//!
//! Each check returns a [`Certificate`]: a residual, the tolerance it was
//! judged against, the verdict, and a witness payload with whatever was
//! constructed along the way (selections, directions, decompositions).

mod functional;
mod general;
mod isometry;
mod smooth;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub use functional::{
    check_functional_identity_at_z, construct_functional_sip, verify_functional_characterization,
    T21_TOL,
};
pub use general::{
    construct_operator_sip_pair, construct_operator_sip_pair_with, find_preserved_orthogonal_direction,
    find_preserved_orthogonal_direction_with, find_zeroing_support_functional, LemmaOptions,
    OperatorSipPair, PlaneDecomposition, PreservedDirection, T23_TOL,
};
pub use isometry::{verify_isometry_characterization, ISOMETRY_DEVIATION_TOL, T24_TOL};
pub use smooth::{verify_smooth_characterization, verify_smooth_characterization_with, T22_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremTag {
    /// attainment set of a functional
    T21,
    /// smooth domain and codomain
    T22,
    /// orthogonality-preserving direction at a maximizer
    L22,
    /// arbitrary real normed spaces
    T23,
    /// isometries
    T24,
}

/// A named sub-check with its own residual and tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Check { name: name.to_string(), residual, tolerance, pass: residual <= tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub theorem: TheoremTag,
    pub inputs: Value,
    /// hex SHA-256 of the compact JSON form of `inputs`
    pub inputs_digest: String,
    pub residual: f64,
    pub tolerance: f64,
    /// `residual <= tolerance`
    pub pass: bool,
    pub checks: Vec<Check>,
    pub witness: Map<String, Value>,
}

impl Certificate {
    pub fn new(theorem: TheoremTag, inputs: Value, residual: f64, tolerance: f64) -> Self {
        let digest = Sha256::digest(inputs.to_string().as_bytes());
        Certificate {
            theorem,
            inputs_digest: hex::encode(digest),
            inputs,
            residual,
            tolerance,
            pass: residual <= tolerance,
            checks: Vec::new(),
            witness: Map::new(),
        }
    }

    pub fn with_check(mut self, check: Check) -> Self {
        self.checks.push(check);
        self
    }

    pub fn with_witness(mut self, key: &str, value: impl Serialize) -> Self {
        self.witness.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn witness_f64(&self, key: &str) -> Option<f64> {
        self.witness.get(key).and_then(Value::as_f64)
    }

    /// Certificate whose residual is the worst residual-to-tolerance ratio of
    /// `checks`, judged against 1.
    pub fn from_checks(theorem: TheoremTag, inputs: Value, checks: Vec<Check>) -> Self {
        let ratio = checks
            .iter()
            .map(|c| if c.residual.is_nan() { f64::INFINITY } else { c.residual / c.tolerance })
            .fold(0.0, f64::max);
        let mut cert = Certificate::new(theorem, inputs, ratio, 1.0);
        cert.checks = checks;
        cert
    }
}

pub(crate) fn vec_json(v: &[f64]) -> Value {
    json!(v)
}
