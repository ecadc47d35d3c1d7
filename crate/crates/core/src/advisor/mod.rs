//! Placement policies.
//!
//! Both policies size one plan per environment and then compare them:
//!
//! * deadline-aware: subtract the overhead from the deadline, invert the
//!   profile for the processor count, round the last node *up*, recompute,
//!   and choose the cheapest plan that still meets the deadline;
//! * budget-aware: invert the profile-cost model for the turnaround the
//!   budget buys, invert the profile, round the last node *down*, recompute,
//!   and choose the fastest plan that stays within budget.

mod distribute;
mod environment;
mod plan;
mod report;

pub use distribute::{distribute_processors, NodeSizes, Rounding};
pub use environment::{Environment, CLOUD, LOCAL, PROCESSOR_LIMIT};
pub use plan::{
    AdviceRequest, Constraint, Infeasibility, Objective, PlacementPlan, Policy, Recommendation,
    NONE_FEASIBLE, TIE_TOLERANCE,
};
pub use report::{PlanDoc, RecommendationDoc};

use crate::coupled::CoupledModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Runs whichever policy `request` names.
pub fn advise<T: Scalar>(request: &AdviceRequest<T>, environments: &[Environment<T>]) -> Result<Recommendation<T>> {
    match request.policy {
        Policy::DeadlineAware => advise_deadline(request, environments),
        Policy::BudgetAware => advise_budget(request, environments),
    }
}

pub fn advise_deadline<T: Scalar>(
    request: &AdviceRequest<T>,
    environments: &[Environment<T>],
) -> Result<Recommendation<T>> {
    let request = AdviceRequest { policy: Policy::DeadlineAware, ..*request };
    let constraint = request.constraint()?;
    if environments.is_empty() {
        return Err(Error::NoEnvironments);
    }
    let deadline = constraint.limit();
    let plans = environments
        .iter()
        .map(|env| {
            let available = deadline - env.overhead_hours();
            if available <= T::zero() {
                return Ok(env.hopeless_plan(constraint));
            }
            let processors = env.profile().required_processors(available)?;
            Ok(env.plan(processors, Rounding::UpForDeadline, constraint))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Recommendation::decide(Policy::DeadlineAware, constraint, plans))
}

pub fn advise_budget<T: Scalar>(
    request: &AdviceRequest<T>,
    environments: &[Environment<T>],
) -> Result<Recommendation<T>> {
    let request = AdviceRequest { policy: Policy::BudgetAware, ..*request };
    let constraint = request.constraint()?;
    if environments.is_empty() {
        return Err(Error::NoEnvironments);
    }
    let budget = constraint.limit();
    let plans = environments
        .iter()
        .map(|env| {
            // Each environment inverts its own coupled model, so the same
            // budget buys different times on different rates.
            let coupled = CoupledModel::new(*env.profile(), *env.cost())?;
            let hours = coupled.time_of_cost(budget)?;
            let processors = env.profile().required_processors(hours)?;
            Ok(env.plan(processors, Rounding::DownForBudget, constraint))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Recommendation::decide(Policy::BudgetAware, constraint, plans))
}

/// Relative objective of the advisor's decision against running locally:
/// `(min over feasible plans − local) / local`, never positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeOutcome<T> {
    pub objective: Objective,
    pub value: T,
}

pub fn compare<T: Scalar>(recommendation: &Recommendation<T>) -> Result<RelativeOutcome<T>> {
    let local = local_baseline(recommendation)?;
    let best = (0..recommendation.plans.len())
        .filter(|&i| recommendation.plans[i].feasible)
        .map(|i| recommendation.objective_value(i))
        .fold(local, T::min);
    Ok(RelativeOutcome { objective: recommendation.objective(), value: (best - local) / local })
}

/// `(objective(plan) − objective(local)) / objective(local)` for any feasible plan.
pub fn relative_to_local<T: Scalar>(recommendation: &Recommendation<T>, index: usize) -> Result<T> {
    let local = local_baseline(recommendation)?;
    let plan = &recommendation.plans[index];
    if !plan.feasible {
        return Err(Error::UndefinedRelativeMetric(format!("plan for `{}` is infeasible", plan.environment)));
    }
    Ok((recommendation.objective_value(index) - local) / local)
}

fn local_baseline<T: Scalar>(recommendation: &Recommendation<T>) -> Result<T> {
    let index = recommendation
        .plan_index(LOCAL)
        .ok_or_else(|| Error::UnknownEnvironment(LOCAL.into()))?;
    if !recommendation.plans[index].feasible {
        return Err(Error::UndefinedRelativeMetric("local plan is infeasible".into()));
    }
    let local = recommendation.objective_value(index);
    if !(local > T::zero()) {
        return Err(Error::UndefinedRelativeMetric("local objective is zero".into()));
    }
    Ok(local)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::cost::CostModel;
    use crate::profile::{ApplicationProfile, TimeUnit};

    const ALPHA: f64 = 0.067;

    fn cloud_sizes() -> NodeSizes {
        "1,2,4,8,12,16".parse().unwrap()
    }

    fn local_profile() -> ApplicationProfile<f64> {
        ApplicationProfile::new(1013.50, -1.58, TimeUnit::Hours).unwrap()
    }

    fn cloud_profile() -> ApplicationProfile<f64> {
        ApplicationProfile::new(7004.86, -2.06, TimeUnit::Hours).unwrap()
    }

    fn envs(k: f64, queue: f64, setup: f64) -> Vec<Environment<f64>> {
        vec![
            Environment::local(
                NodeSizes::contiguous(200).unwrap(),
                local_profile(),
                CostModel::with_ratio(ALPHA, k).unwrap(),
                queue,
            )
            .unwrap(),
            Environment::cloud(cloud_sizes(), cloud_profile(), CostModel::new(ALPHA).unwrap(), setup).unwrap(),
        ]
    }

    fn manual_plan(name: &str, cost: f64, turnaround: f64, feasible: bool) -> PlacementPlan<f64> {
        PlacementPlan {
            environment: name.into(),
            proc_per_node: vec![1],
            total_processors: 1,
            execution_time_hours: turnaround,
            turnaround_hours: turnaround,
            total_cost: cost,
            feasible,
            infeasibility: None,
            extrapolated: false,
        }
    }

    #[test]
    fn deadline_sizing_from_profile_inverse() {
        // t = 20 h on the cloud profile needs 17.18 processors -> [16, 2].
        let rec = advise_deadline(&AdviceRequest::deadline(21.0), &envs(1.0, 0.5, 1.0)).unwrap();
        let cloud = rec.plan(CLOUD).unwrap();
        assert_eq!(cloud.proc_per_node, vec![16, 2]);
        assert_eq!(cloud.total_processors, 18);
        assert!(cloud.feasible);
    }

    #[test]
    fn deadline_worked_example_layout() {
        let setup = 0.25;
        let t41 = cloud_profile().eval_time(41).unwrap();
        let rec = advise_deadline(&AdviceRequest::deadline(t41 + setup), &envs(1.0, 0.1, setup)).unwrap();
        let cloud = rec.plan(CLOUD).unwrap();
        assert_eq!(cloud.proc_per_node, vec![16, 16, 12]);
        assert_eq!(cloud.total_processors, 44);
        assert_eq!(cloud.execution_time_hours, cloud_profile().eval_time(44).unwrap());
    }

    #[test]
    fn deadline_overhead_beyond_deadline_is_infeasible() {
        let rec = advise_deadline(&AdviceRequest::deadline(10.0), &envs(1.0, 12.0, 1.0)).unwrap();
        let local = rec.plan(LOCAL).unwrap();
        assert!(!local.feasible);
        assert_eq!(local.infeasibility, Some(Infeasibility::OverheadExceedsDeadline));
        assert_eq!(rec.chosen_name(), CLOUD);
    }

    #[test]
    fn deadline_picks_cheaper_feasible_plan() {
        let rec = advise_deadline(&AdviceRequest::deadline(50.0), &envs(0.7, 5.0, 5.0)).unwrap();
        let (l, c) = (rec.plan(LOCAL).unwrap(), rec.plan(CLOUD).unwrap());
        assert!(l.feasible && c.feasible);
        assert!(l.total_cost < c.total_cost);
        assert_eq!(rec.chosen_name(), LOCAL);
    }

    #[test]
    fn deadline_everything_infeasible_reports_closest() {
        let rec = advise_deadline(&AdviceRequest::deadline(1.0), &envs(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(rec.chosen, None);
        assert_eq!(rec.chosen_name(), NONE_FEASIBLE);
        assert!(rec.closest.is_some());
        assert_eq!(rec.plans.len(), 2);
    }

    #[test]
    fn budget_policy_rounds_down_and_stays_within_budget() {
        let rec = advise_budget(&AdviceRequest::budget(100.0), &envs(1.0, 2.0, 0.5)).unwrap();
        for plan in &rec.plans {
            let sizes = if plan.environment == LOCAL { NodeSizes::contiguous(200).unwrap() } else { cloud_sizes() };
            assert!(plan.proc_per_node.iter().all(|&s| sizes.contains(s)));
            assert_eq!(plan.feasible, plan.total_cost <= 100.0 * (1.0 + 1e-9));
        }
        let chosen = rec.chosen_plan().unwrap();
        for plan in rec.plans.iter().filter(|p| p.feasible) {
            assert!(chosen.turnaround_hours <= plan.turnaround_hours);
        }
    }

    #[test]
    fn budget_sizing_follows_coupled_inverse() {
        let e = envs(1.0, 0.0, 0.0);
        let budget = 60.0;
        let rec = advise_budget(&AdviceRequest::budget(budget), &e).unwrap();
        let coupled = CoupledModel::new(*e[1].profile(), *e[1].cost()).unwrap();
        let n = e[1].profile().required_processors(coupled.time_of_cost(budget).unwrap()).unwrap();
        let expected = distribute_processors(n, &cloud_sizes(), Rounding::DownForBudget);
        assert_eq!(rec.plan(CLOUD).unwrap().proc_per_node, expected);
    }

    #[test]
    fn budget_too_small_is_none_feasible() {
        // With b < -1 cost falls as processors grow, so only the processor cap stops a tiny budget.
        let rec = advise_budget(&AdviceRequest::budget(1e-5), &envs(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(rec.chosen_name(), NONE_FEASIBLE);
        assert!(rec.closest.is_some());
        assert!(rec.plans.iter().all(|p| !p.feasible));
        assert!(rec.plans.iter().all(|p| p.infeasibility == Some(Infeasibility::ProcessorLimit)));
        assert!(rec.plans.iter().all(|p| p.total_processors == PROCESSOR_LIMIT));
    }

    #[test]
    fn billed_setup_can_break_the_budget() {
        let rec = advise_budget(&AdviceRequest::budget(60.0), &envs(1.0, 0.0, 40.0)).unwrap();
        assert_eq!(rec.plan(CLOUD).unwrap().infeasibility, Some(Infeasibility::ExceedsBudget));
        assert_eq!(rec.chosen_name(), LOCAL);
    }

    #[test]
    fn budget_policy_rejects_divergent_profile() {
        let mut e = envs(1.0, 0.0, 0.0);
        let flat = ApplicationProfile::new(10.0, -0.5, TimeUnit::Hours).unwrap();
        e[0] = Environment::local(NodeSizes::contiguous(8).unwrap(), flat, CostModel::new(ALPHA).unwrap(), 0.0)
            .unwrap();
        let err = advise_budget(&AdviceRequest::budget(10.0), &e).unwrap_err();
        assert!(err.is_model_domain());
    }

    #[test]
    fn ties_prefer_local() {
        let plans = vec![manual_plan(CLOUD, 5.0, 2.0, true), manual_plan(LOCAL, 5.0 * (1.0 + 1e-12), 2.0, true)];
        let rec = Recommendation::decide(Policy::BudgetAware, Constraint::Budget(10.0), plans.clone());
        assert_eq!(rec.chosen_name(), LOCAL);
        let rec = Recommendation::decide(Policy::DeadlineAware, Constraint::DeadlineHours(10.0), plans);
        assert_eq!(rec.chosen_name(), LOCAL);
    }

    #[test]
    fn symmetric_budget_inputs_tie_to_local() {
        // Identical profiles, prices and overheads: equal turnarounds.
        let profile = cloud_profile();
        let cost = CostModel::new(ALPHA).unwrap();
        let e = vec![
            Environment::new(CLOUD, cloud_sizes(), profile, cost).unwrap().with_overhead(1.0).unwrap(),
            Environment::new(LOCAL, cloud_sizes(), profile, cost).unwrap().with_overhead(1.0).unwrap(),
        ];
        let rec = advise_budget(&AdviceRequest::budget(80.0), &e).unwrap();
        assert_eq!(rec.plans[0].turnaround_hours, rec.plans[1].turnaround_hours);
        assert_eq!(rec.chosen_name(), LOCAL);
    }

    #[test]
    fn malformed_requests() {
        let missing = AdviceRequest::<f64> { policy: Policy::DeadlineAware, deadline_hours: None, budget: Some(3.0) };
        assert!(matches!(advise(&missing, &envs(1.0, 0.0, 0.0)), Err(Error::MissingDeadline)));
        let missing = AdviceRequest::<f64> { policy: Policy::BudgetAware, deadline_hours: Some(3.0), budget: None };
        assert!(matches!(advise(&missing, &envs(1.0, 0.0, 0.0)), Err(Error::MissingBudget)));
        assert!(matches!(advise(&AdviceRequest::deadline(5.0), &[]), Err(Error::NoEnvironments)));
        assert!(matches!(advise(&AdviceRequest::budget(5.0), &[]), Err(Error::NoEnvironments)));
        assert!(advise(&AdviceRequest::deadline(-5.0), &envs(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn plan_recomputation_is_consistent() {
        for rec in [
            advise(&AdviceRequest::deadline(30.0), &envs(1.4, 3.0, 2.0)).unwrap(),
            advise(&AdviceRequest::budget(40.0), &envs(1.4, 3.0, 2.0)).unwrap(),
        ] {
            for (plan, env) in rec.plans.iter().zip(envs(1.4, 3.0, 2.0)) {
                assert_eq!(plan.total_processors, plan.proc_per_node.iter().sum::<u32>());
                assert_eq!(plan.execution_time_hours, env.profile().eval_time(plan.total_processors).unwrap());
                assert_eq!(plan.turnaround_hours, env.overhead_hours() + plan.execution_time_hours);
                let billed = if env.overhead_billed() { plan.turnaround_hours } else { plan.execution_time_hours };
                assert_eq!(plan.total_cost, env.cost().total_cost(plan.total_processors, billed).unwrap());
            }
        }
    }

    fn two_plan_rec(policy: Policy, local: (f64, f64), cloud: (f64, f64)) -> Recommendation<f64> {
        let plans = vec![
            manual_plan(LOCAL, local.0, local.1, true),
            manual_plan(CLOUD, cloud.0, cloud.1, true),
        ];
        let constraint = match policy {
            Policy::DeadlineAware => Constraint::DeadlineHours(100.0),
            Policy::BudgetAware => Constraint::Budget(100.0),
        };
        Recommendation::decide(policy, constraint, plans)
    }

    #[test]
    fn relative_cost_examples() {
        let rec = two_plan_rec(Policy::DeadlineAware, (10.0, 1.0), (8.0, 1.0));
        assert_relative_eq!(compare(&rec).unwrap().value, -0.2, max_relative = 1e-14);
        let rec = two_plan_rec(Policy::DeadlineAware, (10.0, 1.0), (12.0, 1.0));
        assert_eq!(compare(&rec).unwrap().value, 0.0);
    }

    #[test]
    fn relative_turnaround_example() {
        let rec = two_plan_rec(Policy::BudgetAware, (1.0, 5.0), (1.0, 4.4));
        let outcome = compare(&rec).unwrap();
        assert_eq!(outcome.objective, Objective::Turnaround);
        assert_relative_eq!(outcome.value, -0.12, max_relative = 1e-12);
    }

    #[test]
    fn relative_metric_needs_positive_local() {
        let rec = two_plan_rec(Policy::DeadlineAware, (0.0, 1.0), (8.0, 1.0));
        assert!(matches!(compare(&rec), Err(Error::UndefinedRelativeMetric(_))));
    }

    #[test]
    fn generic_over_f32() {
        let e: Vec<Environment<f32>> = vec![
            Environment::local(
                NodeSizes::contiguous(200).unwrap(),
                ApplicationProfile::new(1013.5f32, -1.58, TimeUnit::Hours).unwrap(),
                CostModel::with_ratio(0.067f32, 1.0).unwrap(),
                1.0,
            )
            .unwrap(),
            Environment::cloud(
                cloud_sizes(),
                ApplicationProfile::new(7004.86f32, -2.06, TimeUnit::Hours).unwrap(),
                CostModel::new(0.067f32).unwrap(),
                1.0,
            )
            .unwrap(),
        ];
        let rec = advise(&AdviceRequest::deadline(21.0f32), &e).unwrap();
        assert_eq!(rec.plan(CLOUD).unwrap().proc_per_node, vec![16, 2]);
    }
}
