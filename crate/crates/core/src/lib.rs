//! Sparse plan-graph construction for motion planning.
//!
//! The sparse planner interleaves lazy collision checking against a hidden
//! obstacle map with incremental graph search, adding obstacle boundary nodes
//! only for obstacles that actually block a candidate solution. A lattice
//! planner serves as the baseline and a brute-force complete graph as the
//! ground truth for small scenarios.

pub mod error;
pub mod geometry;
pub mod graph;
pub mod grid;
pub mod harness;
pub mod oracle;
pub mod par;
pub mod scenario;
pub mod search;
pub mod sparse;
pub mod state;
pub mod steering;
pub mod trajectory;
pub mod world;

pub use error::{Error, Result};
pub use graph::{EdgeStatus, PlanGraph};
pub use harness::{PlannerConfig, RunMetrics, RunStatus, ScenarioParams, SweepConfig};
pub use scenario::{generate, Scenario, ScenarioSpec};
pub use state::State;
pub use steering::{SteeringSpec, System};
pub use trajectory::{Primitive, Trajectory, TrajectorySet};
pub use world::{Obstacle, World};
