//! Pareto Monte Carlo tree search for multi-objective informative planning.
//!
//! The crate bundles the pieces of an online sampling mission:
//! Pareto dominance utilities ([`pareto`]), a multi-objective bandit lab
//! ([`bandit`]), Gaussian-process regression ([`gp`]), Dubins motion
//! primitives ([`dubins`]), ground-truth fields ([`environment`]), the tree
//! search ([`planner`]) and the replanning loop ([`mission`]).

pub mod bandit;
pub mod dubins;
pub mod environment;
pub mod error;
pub mod gp;
pub mod mission;
pub mod pareto;
pub mod planner;

pub use dubins::{Pose, Primitive, PrimitiveParams};
pub use environment::{Extent, FieldGrid};
pub use error::{Error, Result};
pub use gp::{GaussianProcess, GpParams, Point};
pub use mission::{run_mission, MissionConfig, MissionLog, MissionOutcome};
pub use pareto::{dominates, pareto_front, RewardVector};
pub use planner::{search, Objective, Preference, RewardSpec, SearchConfig, SelectionRule};
