//! JSON run configuration.
//!
//! ```json
//! {
//!   "device": { "g": 1.382e9, "delta_c": 1.382e10, "delta_ck": 1.382e10,
//!               "omega_resonant": 1.382e10, "gamma2_inv": 1e-6,
//!               "quality_q": 1e5, "nu_c": 3e9 },
//!   "cavity_dim": 2,
//!   "feasibility_threshold": 0.1,
//!   "squid": { ... },
//!   "levels": { "qubit_type": "squid", ... },
//!   "reference": [ { "quantity": "tau_cp3", "value": 6.8e-8, "rel_tol": 0.02 } ]
//! }
//! ```
//!
//! Only `device` is required. A `delta_mu` entry in `device` is accepted only
//! when it equals `delta_c`: the simulated frame has no second-order detuning.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::budget::{self, BudgetReport, LevelStructure, ReferenceValue, SquidParams, FEASIBILITY_THRESHOLD};
use crate::error::{Error, Result};
use crate::hamiltonians::DeviceParams;
use crate::sequencer::DEFAULT_CAVITY_DIM;

/// Relative mismatch tolerated between `delta_mu` and `delta_c`.
const DETUNING_MATCH: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub device: DeviceParams,
    #[serde(default = "default_cavity_dim")]
    pub cavity_dim: usize,
    #[serde(default = "default_threshold")]
    pub feasibility_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squid: Option<SquidParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<LevelStructure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference: Vec<ReferenceValue>,
}

fn default_cavity_dim() -> usize {
    DEFAULT_CAVITY_DIM
}

fn default_threshold() -> f64 {
    FEASIBILITY_THRESHOLD
}

impl Config {
    pub fn from_device(device: DeviceParams) -> Self {
        Self {
            device,
            cavity_dim: DEFAULT_CAVITY_DIM,
            feasibility_threshold: FEASIBILITY_THRESHOLD,
            squid: None,
            levels: None,
            reference: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Config("empty configuration".into()));
        }
        let mut root: Value = serde_json::from_str(text)?;
        let device = root
            .get_mut("device")
            .and_then(Value::as_object_mut)
            .ok_or_else(|| Error::Config("missing object `device`".into()))?;
        if let Some(mu) = device.remove("delta_mu") {
            let mu = mu
                .as_f64()
                .ok_or_else(|| Error::Config("`delta_mu` must be a number".into()))?;
            let dc = device
                .get("delta_c")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Config("`delta_c` must be a number".into()))?;
            if (mu - dc).abs() > DETUNING_MATCH * dc.abs() {
                return Err(Error::Config(format!(
                    "second-order detuning delta_c - delta_mu = {} is not supported; set delta_mu = delta_c or omit it",
                    dc - mu
                )));
            }
        }
        let cfg: Config = serde_json::from_value(root)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate(0)?;
        if self.cavity_dim < 2 {
            return Err(Error::Config(format!("cavity_dim must be at least 2, got {}", self.cavity_dim)));
        }
        if !(self.feasibility_threshold.is_finite() && self.feasibility_threshold > 0.0) {
            return Err(Error::Config("feasibility_threshold must be positive".into()));
        }
        if let Some(sq) = &self.squid {
            sq.validate()?;
        }
        for r in &self.reference {
            if !(r.value.is_finite() && r.value > 0.0 && r.rel_tol.is_finite() && r.rel_tol >= 0.0) {
                return Err(Error::Config(format!("reference {:?} needs a positive value and tolerance", r.quantity)));
            }
        }
        Ok(())
    }

    pub fn budget(&self) -> Result<BudgetReport> {
        budget::budget_report(
            &self.device,
            self.squid.as_ref(),
            self.levels.as_ref(),
            &self.reference,
            self.feasibility_threshold,
        )
    }
}
