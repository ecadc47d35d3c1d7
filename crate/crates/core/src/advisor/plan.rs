use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{approx_eq, Scalar};

use super::environment::LOCAL;

/// Relative slack on constraint checks, absorbing rounding in the inverse
/// profile and snapped processor counts.
pub(crate) const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Objective values closer than this (relative) are ties; ties go to `local`.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Cheapest placement that meets a deadline.
    DeadlineAware,
    /// Fastest placement that stays within a budget.
    BudgetAware,
}

impl Policy {
    pub fn objective(self) -> Objective {
        match self {
            Policy::DeadlineAware => Objective::Cost,
            Policy::BudgetAware => Objective::Turnaround,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::DeadlineAware => "deadline",
            Policy::BudgetAware => "budget",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deadline" | "deadline-aware" | "deadline_aware" => Ok(Policy::DeadlineAware),
            "budget" | "budget-aware" | "budget_aware" => Ok(Policy::BudgetAware),
            other => Err(format!("unknown policy `{other}` (expected deadline or budget)")),
        }
    }
}

/// Quantity the chosen plan minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    Cost,
    Turnaround,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint<T> {
    DeadlineHours(T),
    Budget(T),
}

impl<T: Scalar> Constraint<T> {
    pub fn limit(self) -> T {
        match self {
            Constraint::DeadlineHours(v) | Constraint::Budget(v) => v,
        }
    }

    pub(crate) fn violation(self, turnaround: T, cost: T) -> Option<Infeasibility> {
        let slack = T::one() + T::lit(FEASIBILITY_TOLERANCE);
        match self {
            Constraint::DeadlineHours(deadline) if turnaround > deadline * slack => {
                Some(Infeasibility::MissesDeadline)
            }
            Constraint::Budget(budget) if cost > budget * slack => Some(Infeasibility::ExceedsBudget),
            _ => None,
        }
    }

    /// How far a plan is from satisfying the constraint (≤ 1 means satisfied).
    fn pressure(self, plan: &PlacementPlan<T>) -> T {
        match self {
            Constraint::DeadlineHours(d) => plan.turnaround_hours / d,
            Constraint::Budget(b) => plan.total_cost / b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Infeasibility {
    /// Queue or setup time alone already reaches the deadline.
    OverheadExceedsDeadline,
    MissesDeadline,
    ExceedsBudget,
    /// The job would need more than [`super::PROCESSOR_LIMIT`] processors.
    ProcessorLimit,
}

/// One environment's sized allocation and its predicted time and cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementPlan<T> {
    pub environment: String,
    pub proc_per_node: Vec<u32>,
    pub total_processors: u32,
    pub execution_time_hours: T,
    pub turnaround_hours: T,
    pub total_cost: T,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<Infeasibility>,
    /// Processor count lies outside the range the profile was fitted on.
    pub extrapolated: bool,
}

impl<T: Scalar> PlacementPlan<T> {
    pub fn objective_value(&self, objective: Objective) -> T {
        match objective {
            Objective::Cost => self.total_cost,
            Objective::Turnaround => self.turnaround_hours,
        }
    }
}

/// What the user asks for: a policy and the matching limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdviceRequest<T> {
    pub policy: Policy,
    pub deadline_hours: Option<T>,
    pub budget: Option<T>,
}

impl<T: Scalar> AdviceRequest<T> {
    pub fn deadline(hours: T) -> Self {
        AdviceRequest { policy: Policy::DeadlineAware, deadline_hours: Some(hours), budget: None }
    }

    pub fn budget(amount: T) -> Self {
        AdviceRequest { policy: Policy::BudgetAware, deadline_hours: None, budget: Some(amount) }
    }

    pub fn constraint(&self) -> Result<Constraint<T>> {
        let (value, what) = match self.policy {
            Policy::DeadlineAware => (self.deadline_hours.ok_or(Error::MissingDeadline)?, "deadline"),
            Policy::BudgetAware => (self.budget.ok_or(Error::MissingBudget)?, "budget"),
        };
        if !(value.is_finite() && value > T::zero()) {
            return Err(Error::non_positive(what, value.as_f64()));
        }
        Ok(match self.policy {
            Policy::DeadlineAware => Constraint::DeadlineHours(value),
            Policy::BudgetAware => Constraint::Budget(value),
        })
    }
}

/// Plans for every environment and the one the advisor picks.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation<T> {
    pub policy: Policy,
    pub constraint: Constraint<T>,
    pub plans: Vec<PlacementPlan<T>>,
    /// Index into `plans`; `None` when no plan is feasible.
    pub chosen: Option<usize>,
    /// When nothing is feasible, the plan nearest to the constraint.
    pub closest: Option<usize>,
}

pub const NONE_FEASIBLE: &str = "none-feasible";

impl<T: Scalar> Recommendation<T> {
    /// Picks the feasible plan with the smallest objective. Ties within
    /// [`TIE_TOLERANCE`] go to `local`, then to the earlier plan.
    pub(crate) fn decide(policy: Policy, constraint: Constraint<T>, plans: Vec<PlacementPlan<T>>) -> Self {
        let objective = policy.objective();
        let mut chosen: Option<usize> = None;
        for (i, plan) in plans.iter().enumerate().filter(|(_, p)| p.feasible) {
            chosen = match chosen {
                None => Some(i),
                Some(best) => {
                    let (v, bv) = (plan.objective_value(objective), plans[best].objective_value(objective));
                    if approx_eq(v, bv, T::lit(TIE_TOLERANCE)) {
                        let takes_tie = plan.environment == LOCAL && plans[best].environment != LOCAL;
                        Some(if takes_tie { i } else { best })
                    } else if v < bv {
                        Some(i)
                    } else {
                        Some(best)
                    }
                }
            };
        }
        let closest = match chosen {
            Some(_) => None,
            None => (0..plans.len()).min_by(|&i, &j| {
                constraint
                    .pressure(&plans[i])
                    .partial_cmp(&constraint.pressure(&plans[j]))
                    .unwrap_or(std::cmp::Ordering::Equal)
            }),
        };
        Recommendation { policy, constraint, plans, chosen, closest }
    }

    pub fn objective(&self) -> Objective {
        self.policy.objective()
    }

    pub fn chosen_plan(&self) -> Option<&PlacementPlan<T>> {
        self.chosen.map(|i| &self.plans[i])
    }

    /// Name of the chosen environment, or `none-feasible`.
    pub fn chosen_name(&self) -> &str {
        self.chosen_plan().map_or(NONE_FEASIBLE, |p| p.environment.as_str())
    }

    pub fn plan_index(&self, environment: &str) -> Option<usize> {
        self.plans.iter().position(|p| p.environment == environment)
    }

    pub fn plan(&self, environment: &str) -> Option<&PlacementPlan<T>> {
        self.plan_index(environment).map(|i| &self.plans[i])
    }

    pub fn objective_value(&self, index: usize) -> T {
        self.plans[index].objective_value(self.objective())
    }

    /// Objective for ranking: infeasible plans count as infinitely bad.
    pub fn effective_objective(&self, index: usize) -> T {
        if self.plans[index].feasible {
            self.objective_value(index)
        } else {
            T::infinity()
        }
    }

    /// The chosen plan, or the closest one when nothing is feasible.
    pub fn reported_plan(&self) -> &PlacementPlan<T> {
        let i = self.chosen.or(self.closest).unwrap_or(0);
        &self.plans[i]
    }
}
