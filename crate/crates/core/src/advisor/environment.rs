use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::profile::{ApplicationProfile, TimeUnit};
use crate::scalar::Scalar;

use super::distribute::{distribute_processors, NodeSizes, Rounding};
use super::plan::{Constraint, Infeasibility, PlacementPlan};

/// Largest allocation the advisor will size. Requests beyond it are reported
/// as infeasible plans at this size.
pub const PROCESSOR_LIMIT: u32 = 1_000_000;

pub const LOCAL: &str = "local";
pub const CLOUD: &str = "cloud";

/// A named execution venue: what node sizes it offers, how the application
/// performs there, what it costs, and how long a job waits before starting.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment<T> {
    name: String,
    node_sizes: NodeSizes,
    profile: ApplicationProfile<T>,
    cost: CostModel<T>,
    overhead_hours: T,
    bill_overhead: bool,
}

impl<T: Scalar> Environment<T> {
    /// An environment with no overhead. The profile is converted to hours.
    pub fn new(
        name: impl Into<String>,
        node_sizes: NodeSizes,
        profile: ApplicationProfile<T>,
        cost: CostModel<T>,
    ) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::InvalidEnvironment { name, reason: "empty name".into() });
        }
        Ok(Environment {
            name,
            node_sizes,
            profile: profile.in_unit(TimeUnit::Hours),
            cost,
            overhead_hours: T::zero(),
            bill_overhead: false,
        })
    }

    /// On-premise cluster: queue time is not billed.
    pub fn local(
        node_sizes: NodeSizes,
        profile: ApplicationProfile<T>,
        cost: CostModel<T>,
        queue_hours: T,
    ) -> Result<Self> {
        Self::new(LOCAL, node_sizes, profile, cost)?.with_overhead(queue_hours)
    }

    /// Cloud provider: setup time is billed, as providers charge from provisioning.
    pub fn cloud(
        node_sizes: NodeSizes,
        profile: ApplicationProfile<T>,
        cost: CostModel<T>,
        setup_hours: T,
    ) -> Result<Self> {
        Ok(Self::new(CLOUD, node_sizes, profile, cost)?.with_overhead(setup_hours)?.bill_overhead(true))
    }

    pub fn with_overhead(mut self, hours: T) -> Result<Self> {
        if !(hours.is_finite() && hours >= T::zero()) {
            return Err(Error::InvalidEnvironment {
                name: self.name,
                reason: format!("overhead {hours} h must be non-negative"),
            });
        }
        self.overhead_hours = hours;
        Ok(self)
    }

    pub fn bill_overhead(mut self, billed: bool) -> Self {
        self.bill_overhead = billed;
        self
    }

    pub fn with_cost(mut self, cost: CostModel<T>) -> Self {
        self.cost = cost;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_sizes(&self) -> &NodeSizes {
        &self.node_sizes
    }

    pub fn profile(&self) -> &ApplicationProfile<T> {
        &self.profile
    }

    pub fn cost(&self) -> &CostModel<T> {
        &self.cost
    }

    pub fn overhead_hours(&self) -> T {
        self.overhead_hours
    }

    pub fn overhead_billed(&self) -> bool {
        self.bill_overhead
    }

    /// Sizes a plan from a fractional processor count.
    pub fn plan(&self, processors: T, rounding: Rounding, constraint: Constraint<T>) -> PlacementPlan<T> {
        if processors > T::from_count(PROCESSOR_LIMIT) {
            let nodes = distribute_processors(T::from_count(PROCESSOR_LIMIT), &self.node_sizes, rounding);
            return self.evaluate(nodes, constraint, Some(Infeasibility::ProcessorLimit));
        }
        let nodes = distribute_processors(processors, &self.node_sizes, rounding);
        self.evaluate(nodes, constraint, None)
    }

    /// Plan for a job that cannot start in time at all: the smallest node,
    /// marked infeasible.
    pub(crate) fn hopeless_plan(&self, constraint: Constraint<T>) -> PlacementPlan<T> {
        let nodes = vec![self.node_sizes.as_slice()[0]];
        self.evaluate(nodes, constraint, Some(Infeasibility::OverheadExceedsDeadline))
    }

    /// Recomputes time, turnaround and cost for a fixed node layout.
    pub fn evaluate(
        &self,
        proc_per_node: Vec<u32>,
        constraint: Constraint<T>,
        forced: Option<Infeasibility>,
    ) -> PlacementPlan<T> {
        let total_processors: u32 = proc_per_node.iter().sum();
        let execution_time_hours =
            self.profile.eval_time(total_processors).expect("node layouts are never empty");
        let turnaround_hours = self.overhead_hours + execution_time_hours;
        let billed = if self.bill_overhead { turnaround_hours } else { execution_time_hours };
        let total_cost = self
            .cost
            .total_cost(total_processors, billed)
            .expect("execution time of a positive profile is positive");

        let infeasibility = forced.or_else(|| constraint.violation(turnaround_hours, total_cost));
        PlacementPlan {
            environment: self.name.clone(),
            extrapolated: self.profile.is_extrapolated(total_processors),
            proc_per_node,
            total_processors,
            execution_time_hours,
            turnaround_hours,
            total_cost,
            feasible: infeasibility.is_none(),
            infeasibility,
        }
    }
}
