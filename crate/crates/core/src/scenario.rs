//! Problem instances: exchangers, wiring, prices and horizon, loaded from a
//! JSON document with unit-suffixed field names.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HenError, ScenarioError};
use crate::fouling::FoulingParams;
use crate::hen::{ExchangerGeometry, NetworkTopology};
use crate::schedule::{CostCoefficients, PumpingModel};

/// Months in the default horizon.
pub const DEFAULT_HORIZON: usize = 44;

/// Shipped 11-exchanger default scenario.
pub const DEFAULT_SCENARIO_JSON: &str = include_str!("../scenarios/scenario_11he.json");

/// One exchanger of the network with everything needed to simulate and cost
/// it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangerSpec {
    pub id: String,
    pub geometry: ExchangerGeometry,
    pub fouling: FoulingParams,
    pub pumping: PumpingModel,
    /// Static shell-side fouling resistance, m²K/W.
    #[serde(
        rename = "shell_fouling_m2k_per_w",
        default,
        skip_serializing_if = "is_zero"
    )]
    pub shell_fouling: f64,
    /// Per-exchanger cleaning cost; falls back to the scenario-wide value.
    #[serde(
        rename = "cleaning_cost_per_action",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub cleaning_cost: Option<f64>,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(rename = "horizon_months", default = "default_horizon")]
    pub horizon: usize,
    pub costs: CostCoefficients,
    pub exchangers: Vec<ExchangerSpec>,
    pub topology: NetworkTopology,
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// The shipped 11-exchanger scenario.
    pub fn default_11he() -> Self {
        Self::from_json_str(DEFAULT_SCENARIO_JSON).expect("shipped scenario is valid")
    }

    pub fn exchanger_count(&self) -> usize {
        self.exchangers.len()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.exchangers.iter().map(|e| e.id.as_str()).collect()
    }

    /// Cleaning cost charged per action on exchanger `n`.
    pub fn cleaning_cost(&self, n: usize) -> f64 {
        self.exchangers[n]
            .cleaning_cost
            .unwrap_or(self.costs.cleaning_cost_per_action)
    }

    /// For each exchanger (declaration order) its position on the cold path.
    pub fn path_positions(&self) -> Vec<usize> {
        self.exchangers
            .iter()
            .map(|e| {
                self.topology
                    .cold_path
                    .iter()
                    .position(|id| *id == e.id)
                    .expect("validated scenario: every exchanger is on the cold path")
            })
            .collect()
    }

    /// Checks every invariant, naming the offending field on failure.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.horizon < 1 {
            return Err(ScenarioError::invalid("horizon_months", "must be at least 1"));
        }
        if self.exchangers.is_empty() {
            return Err(ScenarioError::invalid("exchangers", "at least one exchanger is required"));
        }
        if let Some(field) = self.costs.invalid_field() {
            return Err(ScenarioError::invalid(
                format!("costs.{field}"),
                "must be finite and non-negative",
            ));
        }

        let mut seen = BTreeSet::new();
        for (i, e) in self.exchangers.iter().enumerate() {
            if e.id.is_empty() {
                return Err(ScenarioError::invalid(format!("exchangers[{i}].id"), "must not be empty"));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(ScenarioError::invalid(
                    format!("exchangers[{i}].id"),
                    format!("duplicate exchanger id `{}`", e.id),
                ));
            }
            if let Some(field) = e.geometry.invalid_field() {
                let message = match field {
                    "inner_diameter_m" if e.geometry.d_inner >= e.geometry.d_outer => {
                        format!(
                            "inner diameter {} m must be smaller than outer diameter {} m",
                            e.geometry.d_inner, e.geometry.d_outer
                        )
                    }
                    "lmtd_correction" => "must lie in (0, 1]".to_string(),
                    _ => "must be finite and positive".to_string(),
                };
                return Err(ScenarioError::invalid(
                    format!("exchangers[{i}].geometry.{field}"),
                    message,
                ));
            }
            if let Some(field) = e.fouling.invalid_field() {
                return Err(ScenarioError::invalid(
                    format!("exchangers[{i}].fouling.{field}"),
                    "asymptote must be non-negative and rate positive",
                ));
            }
            if let Some(field) = e.pumping.invalid_field() {
                return Err(ScenarioError::invalid(
                    format!("exchangers[{i}].pumping.{field}"),
                    "must be finite and non-negative",
                ));
            }
            if !(e.shell_fouling >= 0.0 && e.shell_fouling.is_finite()) {
                return Err(ScenarioError::invalid(
                    format!("exchangers[{i}].shell_fouling_m2k_per_w"),
                    "must be finite and non-negative",
                ));
            }
            if let Some(c) = e.cleaning_cost {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(ScenarioError::invalid(
                        format!("exchangers[{i}].cleaning_cost_per_action"),
                        "must be finite and non-negative",
                    ));
                }
            }
        }

        let topo = &self.topology;
        if let Some(field) = topo.cold_inlet.invalid_field() {
            return Err(ScenarioError::invalid(
                format!("topology.cold_inlet.{field}"),
                "must be finite and positive",
            ));
        }
        for (i, h) in topo.hot_inlets.iter().enumerate() {
            if let Some(field) = h.state.invalid_field() {
                return Err(ScenarioError::invalid(
                    format!("topology.hot_inlets[{i}].{field}"),
                    "must be finite and positive",
                ));
            }
        }
        for (i, id) in topo.cold_path.iter().enumerate() {
            if !seen.contains(id.as_str()) {
                return Err(ScenarioError::invalid(
                    format!("topology.cold_path[{i}]"),
                    format!("references undeclared exchanger `{id}`"),
                ));
            }
        }
        if topo.cold_path.len() != self.exchangers.len() {
            return Err(ScenarioError::invalid(
                "topology.cold_path",
                format!(
                    "must visit all {} exchangers exactly once (has {} entries)",
                    self.exchangers.len(),
                    topo.cold_path.len()
                ),
            ));
        }
        for (i, a) in topo.hot_assignments.iter().enumerate() {
            if !seen.contains(a.exchanger.as_str()) {
                return Err(ScenarioError::invalid(
                    format!("topology.hot_assignments[{i}].exchanger"),
                    format!("references undeclared exchanger `{}`", a.exchanger),
                ));
            }
        }
        topo.validate().map_err(|e| match e {
            HenError::InvalidTopology(msg) => ScenarioError::invalid("topology", msg),
            other => ScenarioError::invalid("topology", other.to_string()),
        })
    }
}

/// Reads and validates a scenario document.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_json_str(&text)
}
