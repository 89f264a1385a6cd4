//! One-dimensional mixture proportion estimators over classifier scores.

pub mod patra_sen;
pub mod roc;

pub use patra_sen::{
    distance_at_gamma, distance_curve, elbow_select, threshold_select, DistanceCurve,
    DEFAULT_GRID_STEP,
};
pub use roc::{roc_points, roc_sup_estimate, storey_cutoff_estimate, storey_k, RocPoint};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Which estimator produced an [`AlphaEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PatraSenElbow,
    PatraSenCn,
    StoreyCutoff,
    RocSup,
    RocSplit,
    Spy,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::PatraSenElbow => "patra_sen_elbow",
            Method::PatraSenCn => "patra_sen_cn",
            Method::StoreyCutoff => "storey_cutoff",
            Method::RocSup => "roc_sup",
            Method::RocSplit => "roc_split",
            Method::Spy => "spy",
        }
    }
}

/// Estimator output: the estimate itself plus method-specific diagnostics
/// (cutoffs, thresholds, denominators, grid resolution).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub alpha0_hat: f64,
    pub method: Method,
    pub diagnostics: BTreeMap<String, f64>,
}

impl AlphaEstimate {
    pub fn new(alpha0_hat: f64, method: Method) -> Self {
        debug_assert!((0.0..=1.0).contains(&alpha0_hat));
        Self { alpha0_hat, method, diagnostics: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }
}
