//! How decisions change when the profile mis-states the processor count.
//!
//! Each environment's planned processor count is scaled by `1 + e`, the job
//! is laid out again with the policy's rounding, and its time and cost are
//! recomputed from the accurate profile, i.e. what the mis-sized allocation
//! would actually deliver.

use rayon::prelude::*;

use crate::advisor::{Environment, Policy, Recommendation, Rounding};
use crate::error::{Error, Result};

use super::config::SweepConfig;
use super::run::{recommend, POLICIES};

pub const DEFAULT_ERRORS: [f64; 6] = [-0.9, -0.5, -0.1, 0.1, 0.5, 0.9];
pub const MIN_ERROR: f64 = -0.9;
pub const MAX_ERROR: f64 = 1.0;

pub fn check_error(error: f64) -> Result<()> {
    if !(MIN_ERROR..=MAX_ERROR).contains(&error) {
        return Err(Error::ErrorOutOfRange(error));
    }
    Ok(())
}

/// `round(count · (1 + error))`, at least 1.
pub fn inject_error(count: u32, error: f64) -> Result<u32> {
    check_error(error)?;
    let scaled = (f64::from(count) * (1.0 + error)).round();
    Ok(scaled.max(1.0) as u32)
}

fn rounding(policy: Policy) -> Rounding {
    match policy {
        Policy::DeadlineAware => Rounding::UpForDeadline,
        Policy::BudgetAware => Rounding::DownForBudget,
    }
}

/// The decision the advisor would reach if every plan's processor count
/// were off by `error`.
pub fn perturb(rec: &Recommendation<f64>, environments: &[Environment<f64>], error: f64) -> Result<Recommendation<f64>> {
    check_error(error)?;
    let plans = rec
        .plans
        .iter()
        .map(|plan| {
            let env = environments
                .iter()
                .find(|e| e.name() == plan.environment)
                .ok_or_else(|| Error::UnknownEnvironment(plan.environment.clone()))?;
            let count = inject_error(plan.total_processors, error)?;
            Ok(env.plan(f64::from(count), rounding(rec.policy), rec.constraint))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Recommendation::decide(rec.policy, rec.constraint, plans))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityRecord {
    pub index: usize,
    pub policy: Policy,
    pub error: f64,
    pub accurate: String,
    pub inaccurate: String,
    pub same_decision: bool,
    /// `(objective_inaccurate − objective_accurate) / objective_accurate`.
    pub relative_delta: f64,
}

fn relative_delta(accurate: &Recommendation<f64>, inaccurate: &Recommendation<f64>) -> f64 {
    let objective = accurate.objective();
    let a = accurate.reported_plan().objective_value(objective);
    let i = inaccurate.reported_plan().objective_value(objective);
    (i - a) / a
}

/// Records in grid order, then policy, then error.
pub fn run_sensitivity(config: &SweepConfig, errors: &[f64]) -> Result<Vec<SensitivityRecord>> {
    config.validate()?;
    if errors.is_empty() {
        return Err(Error::InvalidConfig("no error values given".into()));
    }
    for &e in errors {
        check_error(e)?;
    }
    let points = config.points();
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let per_point = points
        .into_par_iter()
        .enumerate()
        .map(|(index, point)| {
            let envs = config.environments(&point)?;
            let mut out = Vec::with_capacity(POLICIES.len() * errors.len());
            for policy in POLICIES {
                let accurate = recommend(config, &point, policy)?;
                for &error in errors {
                    let inaccurate = perturb(&accurate, &envs, error)?;
                    out.push(SensitivityRecord {
                        index,
                        policy,
                        error,
                        accurate: accurate.chosen_name().to_string(),
                        inaccurate: inaccurate.chosen_name().to_string(),
                        same_decision: accurate.chosen_name() == inaccurate.chosen_name(),
                        relative_delta: relative_delta(&accurate, &inaccurate),
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// Mean, sample standard deviation and share of one group of deltas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub avg: f64,
    pub std: f64,
    pub size: usize,
    /// `size` over all records of this policy and error.
    pub fraction: f64,
}

impl Cell {
    fn from(deltas: &[f64], total: usize) -> Self {
        let n = deltas.len();
        let avg = if n == 0 { 0.0 } else { deltas.iter().sum::<f64>() / n as f64 };
        let std = if n < 2 {
            0.0
        } else {
            (deltas.iter().map(|d| (d - avg).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        let fraction = if total == 0 { 0.0 } else { n as f64 / total as f64 };
        Cell { avg, std, size: n, fraction }
    }
}

/// One row of the summary table: an error value and same/different outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityRow {
    pub error: f64,
    pub same_decision: bool,
    pub deadline: Cell,
    pub budget: Cell,
}

impl SensitivityRow {
    pub fn cell(&self, policy: Policy) -> &Cell {
        match policy {
            Policy::DeadlineAware => &self.deadline,
            Policy::BudgetAware => &self.budget,
        }
    }
}

/// Rows ordered by error as first seen, "same" before "different".
pub fn sensitivity_table(records: &[SensitivityRecord]) -> Result<Vec<SensitivityRow>> {
    if records.is_empty() {
        return Err(Error::EmptyResults);
    }
    let mut errors: Vec<f64> = Vec::new();
    for r in records {
        if !errors.contains(&r.error) {
            errors.push(r.error);
        }
    }
    let mut rows = Vec::with_capacity(errors.len() * 2);
    for &error in &errors {
        for same in [true, false] {
            let cell = |policy: Policy| {
                let group: Vec<&SensitivityRecord> =
                    records.iter().filter(|r| r.error == error && r.policy == policy).collect();
                let deltas: Vec<f64> =
                    group.iter().filter(|r| r.same_decision == same).map(|r| r.relative_delta).collect();
                Cell::from(&deltas, group.len())
            };
            rows.push(SensitivityRow {
                error,
                same_decision: same,
                deadline: cell(Policy::DeadlineAware),
                budget: cell(Policy::BudgetAware),
            });
        }
    }
    Ok(rows)
}
