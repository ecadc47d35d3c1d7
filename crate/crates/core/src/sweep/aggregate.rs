use crate::advisor::{Policy, LOCAL};
use crate::error::{Error, Result};

use super::run::{Decider, SweepResult};

/// Five-number summary plus mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    Some(Summary {
        min: sorted[0],
        q1: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        mean,
        q3: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// Distribution of one decider's relative metric within one price-ratio bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub price_ratio: f64,
    pub decider: Decider,
    /// Grid points in the bucket.
    pub points: usize,
    /// Points where the relative metric is undefined and therefore left out.
    pub excluded: usize,
    pub summary: Option<Summary>,
    /// Points where the decider's pick was feasible.
    pub feasible: usize,
    /// Of those, how many placed the job locally.
    pub local_chosen: usize,
}

impl RatioRow {
    pub fn included(&self) -> usize {
        self.points - self.excluded
    }

    /// Share of feasible decisions that went local: "local is cheapest" for
    /// the advisor under the deadline policy, "local is faster" under budget.
    pub fn local_fraction(&self) -> Option<f64> {
        (self.feasible > 0).then(|| self.local_chosen as f64 / self.feasible as f64)
    }

    pub fn cloud_chosen(&self) -> usize {
        self.feasible - self.local_chosen
    }
}

/// Per price ratio (ascending) and decider, summaries of the relative metric.
pub fn aggregate_by_ratio(results: &[SweepResult], policy: Policy) -> Result<Vec<RatioRow>> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    let mut ratios: Vec<f64> = results.iter().map(|r| r.point.price_ratio).collect();
    ratios.sort_by(f64::total_cmp);
    ratios.dedup();

    let mut rows = Vec::with_capacity(ratios.len() * Decider::ALL.len());
    for &ratio in &ratios {
        let bucket: Vec<&SweepResult> = results.iter().filter(|r| r.point.price_ratio == ratio).collect();
        for decider in Decider::ALL {
            let decisions: Vec<_> = bucket
                .iter()
                .filter_map(|r| r.run(policy).and_then(|run| run.decision(decider)))
                .collect();
            let values: Vec<f64> = decisions.iter().filter_map(|d| d.relative_to_local).collect();
            rows.push(RatioRow {
                price_ratio: ratio,
                decider,
                points: decisions.len(),
                excluded: decisions.len() - values.len(),
                summary: summarize(&values),
                feasible: decisions.iter().filter(|d| d.feasible).count(),
                local_chosen: decisions.iter().filter(|d| d.chose(LOCAL)).count(),
            });
        }
    }
    Ok(rows)
}

/// Smallest price ratio at which the advisor places the majority of feasible
/// jobs in the cloud.
pub fn crossover_ratio(rows: &[RatioRow]) -> Option<f64> {
    rows.iter()
        .filter(|r| r.decider == Decider::Advisor && r.feasible > 0)
        .find(|r| 2 * r.cloud_chosen() > r.feasible)
        .map(|r| r.price_ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::config::{Grid, SweepConfig};
    use crate::sweep::run::run_sweep;

    #[test]
    fn quartiles_interpolate() {
        let s = summarize(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.mean, s.q3, s.max), (1.0, 1.75, 2.5, 2.5, 3.25, 4.0));
        let one = summarize(&[7.0]).unwrap();
        assert_eq!((one.min, one.median, one.max), (7.0, 7.0, 7.0));
        assert!(summarize(&[]).is_none());
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(aggregate_by_ratio(&[], Policy::DeadlineAware), Err(Error::EmptyResults)));
    }

    #[test]
    fn local_fraction_is_one_when_cloud_never_fits() {
        // Setup eats 90% of the deadline; the cloud cannot meet any of them.
        let c = SweepConfig {
            deadline_hours: Grid::values([5.0, 10.0]),
            budget: Grid::values([50.0]),
            queue_fraction: Grid::values([0.01]),
            setup_fraction: Grid::values([0.999]),
            price_ratio: Grid::values([1.0, 3.4]),
            allow_out_of_range: true,
            ..SweepConfig::default()
        };
        let results = run_sweep(&c).unwrap();
        let rows = aggregate_by_ratio(&results, Policy::DeadlineAware).unwrap();
        for row in rows.iter().filter(|r| r.decider == Decider::Advisor) {
            assert_eq!(row.local_fraction(), Some(1.0));
        }
        assert_eq!(crossover_ratio(&rows), None);
    }

    #[test]
    fn counts_add_up() {
        let c = SweepConfig {
            deadline_hours: Grid::linear(1.0, 100.0, 3),
            budget: Grid::linear(10.0, 100.0, 3),
            queue_fraction: Grid::values([0.2]),
            setup_fraction: Grid::values([0.2]),
            price_ratio: Grid::values([1.0, 3.0]),
            ..SweepConfig::default()
        };
        let results = run_sweep(&c).unwrap();
        for policy in [Policy::DeadlineAware, Policy::BudgetAware] {
            let rows = aggregate_by_ratio(&results, policy).unwrap();
            assert_eq!(rows.len(), 2 * Decider::ALL.len());
            for r in &rows {
                assert_eq!(r.points, 9);
                assert!(r.local_chosen <= r.feasible && r.feasible <= r.points);
                assert_eq!(r.included() + r.excluded, r.points);
            }
        }
    }
}
