use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::plan::{Infeasibility, Objective, Policy, Recommendation};
use super::compare;

/// Text form of a [`Recommendation`], written as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationDoc {
    pub policy: Policy,
    pub objective: Objective,
    /// Deadline in hours or budget in currency, depending on `policy`.
    pub limit: f64,
    /// Environment name or `none-feasible`.
    pub chosen: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closest: Option<String>,
    /// `(best − local) / local` when defined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_to_local: Option<f64>,
    pub plans: Vec<PlanDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDoc {
    pub environment: String,
    pub proc_per_node: Vec<u32>,
    pub total_processors: u32,
    pub execution_time_hours: f64,
    pub turnaround_hours: f64,
    pub total_cost: f64,
    pub objective_value: f64,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<Infeasibility>,
    pub extrapolated: bool,
}

impl RecommendationDoc {
    pub fn from_recommendation(rec: &Recommendation<f64>) -> Self {
        let objective = rec.objective();
        RecommendationDoc {
            policy: rec.policy,
            objective,
            limit: rec.constraint.limit(),
            chosen: rec.chosen_name().to_string(),
            closest: rec.closest.map(|i| rec.plans[i].environment.clone()),
            relative_to_local: compare(rec).ok().map(|o| o.value),
            plans: rec
                .plans
                .iter()
                .map(|p| PlanDoc {
                    environment: p.environment.clone(),
                    proc_per_node: p.proc_per_node.clone(),
                    total_processors: p.total_processors,
                    execution_time_hours: p.execution_time_hours,
                    turnaround_hours: p.turnaround_hours,
                    total_cost: p.total_cost,
                    objective_value: p.objective_value(objective),
                    feasible: p.feasible,
                    infeasibility: p.infeasibility,
                    extrapolated: p.extrapolated,
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("recommendation documents always serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::parse("<recommendation>", e))
    }
}
