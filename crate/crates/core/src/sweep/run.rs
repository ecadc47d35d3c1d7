use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::advisor::{advise, compare, relative_to_local, AdviceRequest, Policy, Recommendation, NONE_FEASIBLE};
use crate::baselines::{BaselineKind, BaselinePolicy};
use crate::error::{Error, Result};

use super::config::{SweepConfig, SweepPoint};

pub const POLICIES: [Policy; 2] = [Policy::DeadlineAware, Policy::BudgetAware];

/// Who made a placement decision: the advisor or one of the baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decider {
    Advisor,
    Baseline(BaselineKind),
}

impl Decider {
    pub const ALL: [Decider; 5] = [
        Decider::Advisor,
        Decider::Baseline(BaselineKind::AlwaysLocal),
        Decider::Baseline(BaselineKind::AlwaysCloud),
        Decider::Baseline(BaselineKind::Random),
        Decider::Baseline(BaselineKind::WorstCase),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Decider::Advisor => "advisor",
            Decider::Baseline(kind) => kind.as_str(),
        }
    }
}

impl fmt::Display for Decider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Decider {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "advisor" {
            Ok(Decider::Advisor)
        } else {
            s.parse().map(Decider::Baseline)
        }
    }
}

/// One decider's outcome at one grid point under one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub decider: Decider,
    /// Environment name, or `none-feasible` when the advisor found nothing.
    pub chosen: String,
    pub feasible: bool,
    pub total_processors: u32,
    pub cost: f64,
    pub turnaround_hours: f64,
    /// `(objective − local) / local`; `None` when undefined (infeasible plan or local).
    pub relative_to_local: Option<f64>,
}

impl Decision {
    pub fn chose(&self, environment: &str) -> bool {
        self.feasible && self.chosen == environment
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRun {
    pub policy: Policy,
    /// In [`Decider::ALL`] order.
    pub decisions: Vec<Decision>,
}

impl PolicyRun {
    pub fn decision(&self, decider: Decider) -> Option<&Decision> {
        self.decisions.iter().find(|d| d.decider == decider)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub index: usize,
    pub point: SweepPoint,
    /// Deadline-aware run first, then budget-aware.
    pub runs: Vec<PolicyRun>,
}

impl SweepResult {
    pub fn run(&self, policy: Policy) -> Option<&PolicyRun> {
        self.runs.iter().find(|r| r.policy == policy)
    }
}

/// Request number the random baseline draws for: distinct per point and policy.
pub fn request_index(point_index: usize, policy: Policy) -> u64 {
    let offset = match policy {
        Policy::DeadlineAware => 0,
        Policy::BudgetAware => 1,
    };
    2 * point_index as u64 + offset
}

/// The advisor's recommendation at one point under one policy.
pub fn recommend(config: &SweepConfig, point: &SweepPoint, policy: Policy) -> Result<Recommendation<f64>> {
    let envs = config.environments(point)?;
    let request = match policy {
        Policy::DeadlineAware => AdviceRequest::deadline(point.deadline_hours),
        Policy::BudgetAware => AdviceRequest::budget(point.budget),
    };
    advise(&request, &envs)
}

fn decisions(rec: &Recommendation<f64>, seed: u64, request: u64) -> Result<Vec<Decision>> {
    let mut out = Vec::with_capacity(Decider::ALL.len());
    let reported = rec.reported_plan();
    out.push(Decision {
        decider: Decider::Advisor,
        chosen: rec.chosen_name().to_string(),
        feasible: rec.chosen.is_some(),
        total_processors: reported.total_processors,
        cost: reported.total_cost,
        turnaround_hours: reported.turnaround_hours,
        relative_to_local: if rec.chosen.is_some() { compare(rec).ok().map(|o| o.value) } else { None },
    });
    for kind in BaselineKind::ALL {
        let policy = BaselinePolicy::new(kind, Some(seed))?;
        let i = policy.decide(rec, request)?;
        let plan = &rec.plans[i];
        out.push(Decision {
            decider: Decider::Baseline(kind),
            chosen: plan.environment.clone(),
            feasible: plan.feasible,
            total_processors: plan.total_processors,
            cost: plan.total_cost,
            turnaround_hours: plan.turnaround_hours,
            relative_to_local: relative_to_local(rec, i).ok(),
        });
    }
    debug_assert!(out[0].feasible || out[0].chosen == NONE_FEASIBLE);
    Ok(out)
}

pub fn evaluate_point(config: &SweepConfig, index: usize, point: SweepPoint) -> Result<SweepResult> {
    let runs = POLICIES
        .iter()
        .map(|&policy| {
            let rec = recommend(config, &point, policy)?;
            Ok(PolicyRun { policy, decisions: decisions(&rec, config.seed, request_index(index, policy))? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { index, point, runs })
}

/// Evaluates every grid point under both policies. Points run in parallel;
/// the output is in grid order and independent of scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepResult>> {
    config.validate()?;
    let points = config.points();
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    points.into_par_iter().enumerate().map(|(i, p)| evaluate_point(config, i, p)).collect()
}
