//! Profile-cost coupling: money spent as a function of turnaround time.
//!
//! Substituting the inverted profile `P(t) = (t/a)^(1/b)` into the rate
//! `dC/dt = k·α·P` and integrating from 0 to `T` gives
//!
//! ```text
//! C(T) = k·α·a · (T/a)^x / x,    x = 1 + 1/b
//! ```
//!
//! which is finite only when `x > 0`, i.e. `b < -1` for a decreasing profile.

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::profile::{ApplicationProfile, TimeUnit};
use crate::scalar::Scalar;

/// A profile and a cost model over the same environment, both in hours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledModel<T> {
    profile: ApplicationProfile<T>,
    cost: CostModel<T>,
    exponent: T,
}

impl<T: Scalar> CoupledModel<T> {
    /// Couples `profile` (converted to hours) with `cost`.
    ///
    /// Fails with [`Error::DivergentExponent`] when `b ∈ [-1, 0)`.
    pub fn new(profile: ApplicationProfile<T>, cost: CostModel<T>) -> Result<Self> {
        let profile = profile.in_unit(TimeUnit::Hours);
        let exponent = T::one() + profile.b().recip();
        if !(exponent > T::zero()) {
            return Err(Error::DivergentExponent { b: profile.b().as_f64() });
        }
        Ok(CoupledModel { profile, cost, exponent })
    }

    pub fn profile(&self) -> &ApplicationProfile<T> {
        &self.profile
    }

    pub fn cost(&self) -> &CostModel<T> {
        &self.cost
    }

    /// `1 + 1/b`.
    pub fn exponent(&self) -> T {
        self.exponent
    }

    fn scale(&self) -> T {
        self.cost.rate_per_processor() * self.profile.a()
    }

    /// Money spent over a turnaround of `hours`.
    pub fn cost_of_time(&self, hours: T) -> Result<T> {
        if !(hours.is_finite() && hours > T::zero()) {
            return Err(Error::non_positive("turnaround", hours.as_f64()));
        }
        let x = self.exponent;
        Ok(self.scale() * (hours / self.profile.a()).powf(x) / x)
    }

    /// Turnaround, in hours, that exactly spends `budget`.
    pub fn time_of_cost(&self, budget: T) -> Result<T> {
        if !(budget.is_finite() && budget > T::zero()) {
            return Err(Error::non_positive("budget", budget.as_f64()));
        }
        let x = self.exponent;
        Ok(self.profile.a() * (budget * x / self.scale()).powf(x.recip()))
    }
}
