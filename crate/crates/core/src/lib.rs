//! Decide whether an HPC job should run on the on-premise cluster or burst
//! to a cloud provider, given a deadline or a budget.
//!
//! The models are generic over the floating-point type; the aliases below
//! fix it to `f64`.

pub mod advisor;
pub mod assets;
pub mod baselines;
pub mod cost;
pub mod coupled;
pub mod error;
pub mod formats;
pub mod logstore;
pub mod profile;
pub mod scalar;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Profile = profile::ApplicationProfile<f64>;
pub type Cost = cost::CostModel<f64>;
pub type Coupled = coupled::CoupledModel<f64>;
pub type Env = advisor::Environment<f64>;
pub type Plan = advisor::PlacementPlan<f64>;
pub type Rec = advisor::Recommendation<f64>;
