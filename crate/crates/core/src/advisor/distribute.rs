use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Processors-per-node values an environment offers, ascending, starting at 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSizes(Vec<u32>);

impl NodeSizes {
    pub fn new(mut sizes: Vec<u32>) -> Result<Self> {
        sizes.sort_unstable();
        sizes.dedup();
        match sizes.first() {
            None => Err(Error::InvalidNodeSizes("no node sizes given".into())),
            Some(&first) if first != 1 => Err(Error::InvalidNodeSizes(format!(
                "smallest node size must be 1, got {first}"
            ))),
            Some(_) => Ok(NodeSizes(sizes)),
        }
    }

    /// Every size from 1 to `max`, as an on-premise cluster offers.
    pub fn contiguous(max: u32) -> Result<Self> {
        Self::new((1..=max).collect())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn max(&self) -> u32 {
        *self.0.last().expect("node sizes are never empty")
    }

    pub fn contains(&self, size: u32) -> bool {
        self.0.binary_search(&size).is_ok()
    }

    fn smallest_at_least<T: Scalar>(&self, r: T) -> u32 {
        self.0
            .iter()
            .copied()
            .find(|&s| T::from_count(s) >= r)
            .unwrap_or_else(|| self.max())
    }

    fn largest_at_most<T: Scalar>(&self, r: T) -> Option<u32> {
        self.0.iter().rev().copied().find(|&s| T::from_count(s) <= r)
    }
}

impl FromStr for NodeSizes {
    type Err = Error;

    /// Parses `1,2,4,8,12,16` or ranges such as `1-200`, mixed freely.
    fn from_str(s: &str) -> Result<Self> {
        let mut sizes = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::InvalidNodeSizes(format!("cannot parse `{part}`"));
            match part.split_once('-') {
                Some((lo, hi)) => {
                    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
                    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
                    if lo > hi {
                        return Err(bad());
                    }
                    sizes.extend(lo..=hi);
                }
                None => sizes.push(part.parse().map_err(|_| bad())?),
            }
        }
        NodeSizes::new(sizes)
    }
}

impl fmt::Display for NodeSizes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let contiguous = self.0.iter().enumerate().all(|(i, &s)| s as usize == i + 1);
        if contiguous && self.0.len() > 2 {
            return write!(f, "1-{}", self.max());
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for NodeSizes {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeSizes {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Direction the last, partially filled node is adjusted in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    /// Largest offered size not above the remainder; used under a budget cap.
    DownForBudget,
    /// Smallest offered size not below the remainder; used under a deadline.
    UpForDeadline,
}

/// Counts within this relative distance of an integer are treated as that integer.
const SNAP_TOLERANCE: f64 = 1e-9;

/// Splits a fractional processor count into nodes.
///
/// Nodes are filled at the largest size; the remainder becomes one more node
/// sized by `rounding`. A remainder below every offered size is dropped in
/// down mode, but the result always has at least one node.
pub fn distribute_processors<T: Scalar>(n: T, sizes: &NodeSizes, rounding: Rounding) -> Vec<u32> {
    if !(n > T::zero()) || !n.is_finite() {
        return vec![sizes.as_slice()[0]];
    }
    let nearest = n.round();
    let n = if (n - nearest).abs() <= T::lit(SNAP_TOLERANCE) * n.max(T::one()) { nearest } else { n };

    let largest = sizes.max();
    let full = (n / T::from_count(largest)).floor();
    let remainder = n - full * T::from_count(largest);
    let full = full.to_usize().unwrap_or(0);

    let mut nodes = vec![largest; full];
    if remainder > T::zero() {
        match rounding {
            Rounding::UpForDeadline => nodes.push(sizes.smallest_at_least(remainder)),
            Rounding::DownForBudget => nodes.extend(sizes.largest_at_most(remainder)),
        }
    }
    if nodes.is_empty() {
        nodes.push(sizes.as_slice()[0]);
    }
    nodes
}
