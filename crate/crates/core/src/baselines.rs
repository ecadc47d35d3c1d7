//! Reference placement policies the advisor is measured against.
//!
//! Every baseline reuses the advisor's sizing for the environment it picks;
//! only the placement decision differs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::advisor::{Recommendation, CLOUD, LOCAL};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    AlwaysLocal,
    AlwaysCloud,
    Random,
    /// The opposite of whatever the advisor chose.
    WorstCase,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 4] =
        [BaselineKind::AlwaysLocal, BaselineKind::AlwaysCloud, BaselineKind::Random, BaselineKind::WorstCase];

    pub fn as_str(self) -> &'static str {
        match self {
            BaselineKind::AlwaysLocal => "always-local",
            BaselineKind::AlwaysCloud => "always-cloud",
            BaselineKind::Random => "random",
            BaselineKind::WorstCase => "worst-case",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s || k.as_str().replace('-', "_") == s)
            .ok_or_else(|| format!("unknown baseline `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselinePolicy {
    kind: BaselineKind,
    seed: Option<u64>,
}

impl BaselinePolicy {
    pub fn new(kind: BaselineKind, seed: Option<u64>) -> Result<Self> {
        if kind == BaselineKind::Random && seed.is_none() {
            return Err(Error::MissingSeed);
        }
        Ok(BaselinePolicy { kind, seed })
    }

    pub fn always_local() -> Self {
        BaselinePolicy { kind: BaselineKind::AlwaysLocal, seed: None }
    }

    pub fn always_cloud() -> Self {
        BaselinePolicy { kind: BaselineKind::AlwaysCloud, seed: None }
    }

    pub fn random(seed: u64) -> Self {
        BaselinePolicy { kind: BaselineKind::Random, seed: Some(seed) }
    }

    pub fn worst_case() -> Self {
        BaselinePolicy { kind: BaselineKind::WorstCase, seed: None }
    }

    pub fn kind(&self) -> BaselineKind {
        self.kind
    }

    /// Index of the plan this baseline picks for request number `index`.
    pub fn decide<T: Scalar>(&self, rec: &Recommendation<T>, index: u64) -> Result<usize> {
        let find = |name: &str| rec.plan_index(name).ok_or_else(|| Error::UnknownEnvironment(name.into()));
        match self.kind {
            BaselineKind::AlwaysLocal => find(LOCAL),
            BaselineKind::AlwaysCloud => find(CLOUD),
            BaselineKind::Random => {
                let (local, cloud) = (find(LOCAL)?, find(CLOUD)?);
                Ok(if coin(self.seed.ok_or(Error::MissingSeed)?, index) { local } else { cloud })
            }
            BaselineKind::WorstCase => worst_case(rec),
        }
    }
}

/// Fair coin that depends only on `(seed, index)`: one ChaCha stream per index.
pub fn coin(seed: u64, index: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.random_bool(0.5)
}

fn worst_case<T: Scalar>(rec: &Recommendation<T>) -> Result<usize> {
    if rec.plans.is_empty() {
        return Err(Error::NoEnvironments);
    }
    let candidates: Vec<usize> = match rec.chosen {
        Some(chosen) if rec.plans.len() > 1 => (0..rec.plans.len()).filter(|&i| i != chosen).collect(),
        _ => (0..rec.plans.len()).collect(),
    };
    // The advisor found nothing feasible: rank on the raw objective instead.
    let rank = |i: usize| if rec.chosen.is_some() { rec.effective_objective(i) } else { rec.objective_value(i) };
    let worst = candidates
        .into_iter()
        .reduce(|w, i| if rank(i) >= rank(w) { i } else { w })
        .expect("at least one candidate");
    Ok(worst)
}
