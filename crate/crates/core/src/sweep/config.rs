use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::advisor::{Environment, NodeSizes};
use crate::assets;
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::formats::ProfileDoc;

/// One sweep dimension: evenly spaced points or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Linear { min: f64, max: f64, points: usize },
    Values { values: Vec<f64> },
}

impl Grid {
    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        Grid::Linear { min, max, points }
    }

    pub fn values(values: impl Into<Vec<f64>>) -> Self {
        Grid::Values { values: values.into() }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Linear { points, .. } => *points,
            Grid::Values { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<f64> {
        match self {
            Grid::Linear { min, max, points: 1 } => {
                let _ = max;
                vec![*min]
            }
            Grid::Linear { min, max, points } => {
                let steps = (*points - 1) as f64;
                (0..*points).map(|i| min + (max - min) * (i as f64) / steps).collect()
            }
            Grid::Values { values } => values.clone(),
        }
    }

    fn check(&self, name: &str, lo: f64, hi: f64, allow_out_of_range: bool) -> Result<()> {
        let points = self.points();
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for &v in &points {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!("{name}: value {v} is not a finite non-negative number")));
            }
            // 1e-12 slack so that linear spacing never trips the bounds.
            if !allow_out_of_range && (v < lo - 1e-12 || v > hi + 1e-12) {
                return Err(Error::InvalidConfig(format!(
                    "{name}: value {v} is outside the evaluated range [{lo}, {hi}]; set allow_out_of_range to override"
                )));
            }
        }
        Ok(())
    }
}

/// Profiles, prices and node sizes of the two environments being compared.
/// Fields left out of a TOML file take the bundled defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSetup {
    pub local_profile: ProfileDoc,
    pub cloud_profile: ProfileDoc,
    /// Cloud currency per processor-hour.
    pub alpha: f64,
    pub local_sizes: NodeSizes,
    pub cloud_sizes: NodeSizes,
    pub bill_queue: bool,
    pub bill_setup: bool,
}

impl Default for ModelSetup {
    fn default() -> Self {
        ModelSetup {
            local_profile: assets::local_profile_doc(),
            cloud_profile: assets::cloud_profile_doc(),
            alpha: assets::default_alpha(),
            local_sizes: assets::local_node_sizes(),
            cloud_sizes: assets::cloud_node_sizes(),
            bill_queue: false,
            bill_setup: true,
        }
    }
}

/// Parameter grid swept over both policies.
///
/// `price_ratio` is the on-premise multiplier `K`: local hourly price divided
/// by cloud hourly price. Queue and setup times are fractions of the deadline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub deadline_hours: Grid,
    pub budget: Grid,
    pub queue_fraction: Grid,
    pub setup_fraction: Grid,
    pub price_ratio: Grid,
    /// Seed of the random baseline.
    pub seed: u64,
    #[serde(default)]
    pub allow_out_of_range: bool,
    #[serde(default)]
    pub models: ModelSetup,
}

/// The price ratios the evaluation discusses, eight points over [0.7, 3.4].
pub const DEFAULT_PRICE_RATIOS: [f64; 8] = [0.7, 1.0, 1.4, 1.8, 2.2, 2.6, 3.0, 3.4];

impl Default for SweepConfig {
    /// 10 × 10 × 7 × 5 × 8 = 28,000 points.
    fn default() -> Self {
        SweepConfig {
            deadline_hours: Grid::linear(1.0, 100.0, 10),
            budget: Grid::linear(10.0, 100.0, 10),
            queue_fraction: Grid::linear(0.01, 0.50, 7),
            setup_fraction: Grid::linear(0.01, 0.50, 5),
            price_ratio: Grid::values(DEFAULT_PRICE_RATIOS),
            seed: 2015,
            allow_out_of_range: false,
            models: ModelSetup::default(),
        }
    }
}

/// One grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub deadline_hours: f64,
    pub budget: f64,
    pub queue_fraction: f64,
    pub setup_fraction: f64,
    pub price_ratio: f64,
}

impl SweepPoint {
    pub fn queue_hours(&self) -> f64 {
        self.queue_fraction * self.deadline_hours
    }

    pub fn setup_hours(&self) -> f64 {
        self.setup_fraction * self.deadline_hours
    }

    /// The one place the swept ratio becomes a cost-model multiplier: the
    /// local rate is `K` times the cloud rate, the cloud keeps `k = 1`.
    pub fn local_price_multiplier(&self) -> f64 {
        self.price_ratio
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: SweepConfig = toml::from_str(text).map_err(|e| Error::parse("<sweep config>", e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("sweep configs always serialize")
    }

    /// Hex SHA-256 of the canonical TOML form, stamped into every output file.
    pub fn fingerprint(&self) -> String {
        self.fingerprint_with("")
    }

    /// Fingerprint of the config plus extra run parameters appended as text.
    pub fn fingerprint_with(&self, extra: &str) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml().as_bytes());
        hasher.update(extra.as_bytes());
        hex::encode(hasher.finalize())
    }

    pub fn validate(&self) -> Result<()> {
        let allow = self.allow_out_of_range;
        self.deadline_hours.check("deadline_hours", 1.0, 100.0, allow)?;
        self.budget.check("budget", 10.0, 100.0, allow)?;
        self.queue_fraction.check("queue_fraction", 0.01, 0.50, allow)?;
        self.setup_fraction.check("setup_fraction", 0.01, 0.50, allow)?;
        self.price_ratio.check("price_ratio", 0.7, 3.4, allow)?;
        if self.deadline_hours.points().iter().any(|&d| d <= 0.0) {
            return Err(Error::InvalidConfig("deadlines must be positive".into()));
        }
        if self.budget.points().iter().any(|&b| b <= 0.0) {
            return Err(Error::InvalidConfig("budgets must be positive".into()));
        }
        if self.price_ratio.points().iter().any(|&k| k <= 0.0) {
            return Err(Error::InvalidConfig("price ratios must be positive".into()));
        }
        self.models.local_profile.to_profile()?;
        self.models.cloud_profile.to_profile()?;
        CostModel::new(self.models.alpha)?;
        Ok(())
    }

    pub fn total_points(&self) -> usize {
        [&self.deadline_hours, &self.budget, &self.queue_fraction, &self.setup_fraction, &self.price_ratio]
            .iter()
            .map(|g| g.len())
            .product()
    }

    /// All grid points, deadline outermost and price ratio innermost.
    pub fn points(&self) -> Vec<SweepPoint> {
        let (d, b, q, s, k) = (
            self.deadline_hours.points(),
            self.budget.points(),
            self.queue_fraction.points(),
            self.setup_fraction.points(),
            self.price_ratio.points(),
        );
        let mut out = Vec::with_capacity(self.total_points());
        for &deadline_hours in &d {
            for &budget in &b {
                for &queue_fraction in &q {
                    for &setup_fraction in &s {
                        for &price_ratio in &k {
                            out.push(SweepPoint { deadline_hours, budget, queue_fraction, setup_fraction, price_ratio });
                        }
                    }
                }
            }
        }
        out
    }

    /// Local and cloud environments at one grid point.
    pub fn environments(&self, point: &SweepPoint) -> Result<[Environment<f64>; 2]> {
        let m = &self.models;
        let cloud_cost = CostModel::new(m.alpha)?;
        let local = Environment::local(
            m.local_sizes.clone(),
            m.local_profile.to_profile()?,
            cloud_cost.scaled(point.local_price_multiplier())?,
            point.queue_hours(),
        )?
        .bill_overhead(m.bill_queue);
        let cloud = Environment::cloud(m.cloud_sizes.clone(), m.cloud_profile.to_profile()?, cloud_cost, point.setup_hours())?
            .bill_overhead(m.bill_setup);
        Ok([local, cloud])
    }
}
