//! Linear infrastructure cost models.
//!
//! The hourly rate for `P` processors is `k · α · P`: `α` is fitted from a
//! provider price table through the origin, and `k` scales the cloud rate to
//! an on-premise rate (`k = 1` for the cloud itself).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceRow<T> {
    pub cores: u32,
    pub hourly_cost: T,
}

/// Provider prices for one memory configuration, one row per node size.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable<T> {
    memory_per_core: String,
    currency: String,
    rows: Vec<PriceRow<T>>,
}

impl<T: Scalar> PriceTable<T> {
    pub fn new(memory_per_core: impl Into<String>, rows: Vec<PriceRow<T>>) -> Result<Self> {
        for row in &rows {
            if row.cores == 0 {
                return Err(Error::InvalidPriceTable("a row has 0 cores".into()));
            }
            if !(row.hourly_cost.is_finite() && row.hourly_cost > T::zero()) {
                return Err(Error::InvalidPriceTable(format!(
                    "cost {} for {} cores is not positive",
                    row.hourly_cost, row.cores
                )));
            }
        }
        for pair in rows.windows(2) {
            if pair[1].cores <= pair[0].cores {
                return Err(Error::InvalidPriceTable(format!(
                    "cores must strictly increase ({} then {})",
                    pair[0].cores, pair[1].cores
                )));
            }
            if pair[1].hourly_cost <= pair[0].hourly_cost {
                return Err(Error::InvalidPriceTable(format!(
                    "hourly cost must strictly increase ({} then {})",
                    pair[0].hourly_cost, pair[1].hourly_cost
                )));
            }
        }
        Ok(PriceTable { memory_per_core: memory_per_core.into(), currency: "USD".into(), rows })
    }

    pub fn with_currency(mut self, currency: impl Into<String>) -> Self {
        self.currency = currency.into();
        self
    }

    pub fn memory_per_core(&self) -> &str {
        &self.memory_per_core
    }

    pub fn currency(&self) -> &str {
        &self.currency
    }

    pub fn rows(&self) -> &[PriceRow<T>] {
        &self.rows
    }
}

/// Result of fitting the hourly-rate slope to a price table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaFit<T> {
    /// Least-squares slope through the origin, currency per processor-hour.
    pub alpha: T,
    /// Slope of an unconstrained line, kept for diagnostics only.
    pub free_slope: T,
    /// Intercept of that unconstrained line (the dropped offset).
    pub free_intercept: T,
    /// Largest `|α·P − C| / C` over the table rows.
    pub max_relative_residual: T,
}

/// Fits `C = α·P` to the table by least squares through the origin.
pub fn fit_alpha<T: Scalar>(table: &PriceTable<T>) -> Result<AlphaFit<T>> {
    let rows = table.rows();
    if rows.len() < 2 {
        return Err(Error::InvalidPriceTable(format!(
            "need at least 2 rows to fit a rate, got {}",
            rows.len()
        )));
    }
    let (mut spc, mut spp, mut sp, mut sc) = (T::zero(), T::zero(), T::zero(), T::zero());
    for row in rows {
        let p = T::from_count(row.cores);
        spc = spc + p * row.hourly_cost;
        spp = spp + p * p;
        sp = sp + p;
        sc = sc + row.hourly_cost;
    }
    let alpha = spc / spp;

    let n = T::from_usize(rows.len()).unwrap_or_else(T::one);
    let free_slope = (n * spc - sp * sc) / (n * spp - sp * sp);
    let free_intercept = (sc - free_slope * sp) / n;

    let max_relative_residual = rows.iter().fold(T::zero(), |worst, row| {
        let predicted = alpha * T::from_count(row.cores);
        worst.max((predicted - row.hourly_cost).abs() / row.hourly_cost)
    });
    Ok(AlphaFit { alpha, free_slope, free_intercept, max_relative_residual })
}

/// How elapsed time is turned into billed time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Billing {
    /// Integrate the rate over the exact elapsed time.
    #[default]
    Continuous,
    /// Round elapsed time up to whole hours, as providers renting VMs per hour do.
    HourCeiling,
}

impl Billing {
    pub fn billed_hours<T: Scalar>(self, hours: T) -> T {
        match self {
            Billing::Continuous => hours,
            Billing::HourCeiling => hours.ceil(),
        }
    }
}

/// Hourly-rate model `dC/dt = k · α · P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel<T> {
    alpha: T,
    k: T,
    billing: Billing,
}

impl<T: Scalar> CostModel<T> {
    /// Cloud reference model (`k = 1`).
    pub fn new(alpha: T) -> Result<Self> {
        Self::with_ratio(alpha, T::one())
    }

    pub fn with_ratio(alpha: T, k: T) -> Result<Self> {
        if !(alpha.is_finite() && alpha > T::zero()) {
            return Err(Error::InvalidCostModel(format!("alpha = {alpha} must be positive")));
        }
        if !(k.is_finite() && k > T::zero()) {
            return Err(Error::InvalidCostModel(format!("price ratio k = {k} must be positive")));
        }
        Ok(CostModel { alpha, k, billing: Billing::Continuous })
    }

    pub fn with_billing(mut self, billing: Billing) -> Self {
        self.billing = billing;
        self
    }

    /// This model rescaled to another price ratio, keeping `α` and billing.
    pub fn scaled(&self, k: T) -> Result<Self> {
        Ok(CostModel::with_ratio(self.alpha, k)?.with_billing(self.billing))
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn billing(&self) -> Billing {
        self.billing
    }

    /// Effective `k · α`, currency per processor-hour.
    pub fn rate_per_processor(&self) -> T {
        self.k * self.alpha
    }

    pub fn hourly_rate(&self, processors: u32) -> Result<T> {
        if processors == 0 {
            return Err(Error::ZeroProcessors);
        }
        Ok(self.rate_per_processor() * T::from_count(processors))
    }

    /// Cost of holding `processors` for `hours`: `T · k · α · P`.
    pub fn total_cost(&self, processors: u32, hours: T) -> Result<T> {
        if !(hours.is_finite() && hours > T::zero()) {
            return Err(Error::non_positive("turnaround", hours.as_f64()));
        }
        Ok(self.billing.billed_hours(hours) * self.hourly_rate(processors)?)
    }
}
