//! Free-space steering: the locally minimal obstacle-free trajectories
//! between two states for each supported system.

pub mod dubins;

use serde::{Deserialize, Serialize};

use crate::state::{State, StateKind};
use crate::trajectory::{Trajectory, TrajectorySet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Holonomic2d,
    Holonomic3d,
    Dubins,
}

impl System {
    pub fn state_kind(self) -> StateKind {
        match self {
            System::Holonomic2d => StateKind::R2,
            System::Holonomic3d => StateKind::R3,
            System::Dubins => StateKind::Se2,
        }
    }

    /// Dimension of the position space.
    pub fn dim(self) -> usize {
        match self {
            System::Holonomic3d => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringSpec {
    pub system: System,
    /// Minimum turning radius, used only by [`System::Dubins`].
    #[serde(default = "default_radius")]
    pub turning_radius: f64,
}

fn default_radius() -> f64 {
    1.0
}

impl SteeringSpec {
    pub fn holonomic_2d() -> Self {
        SteeringSpec {
            system: System::Holonomic2d,
            turning_radius: 1.0,
        }
    }

    pub fn holonomic_3d() -> Self {
        SteeringSpec {
            system: System::Holonomic3d,
            turning_radius: 1.0,
        }
    }

    pub fn dubins(turning_radius: f64) -> Self {
        SteeringSpec {
            system: System::Dubins,
            turning_radius,
        }
    }

    fn check_kinds(&self, a: &State, b: &State) {
        let want = self.system.state_kind();
        assert!(
            a.kind() == want && b.kind() == want,
            "{:?} steering got {:?} -> {:?}",
            self.system,
            a.kind(),
            b.kind()
        );
    }

    /// Locally minimal free-space trajectories from `a` to `b`, cheapest first.
    ///
    /// Holonomic systems yield the single straight segment; Dubins yields every
    /// feasible word of the six-word family, degenerate pieces included.
    /// Identical states yield the zero-length trajectory.
    pub fn steer_free(&self, a: State, b: State) -> TrajectorySet {
        self.check_kinds(&a, &b);
        if a.same_as(&b) {
            return TrajectorySet::new(a, b, vec![Trajectory::zero(a)]);
        }
        let members = match self.system {
            System::Holonomic2d | System::Holonomic3d => vec![Trajectory::line(a, b)],
            System::Dubins => dubins::all_words(a, b, self.turning_radius)
                .into_iter()
                .map(|(_, t)| t)
                .collect(),
        };
        TrajectorySet::new(a, b, members)
    }

    /// Cost of the cheapest free-space trajectory; a lower bound on the cost
    /// of any obstacle-avoiding trajectory between the same states.
    pub fn free_heuristic(&self, a: State, g: State) -> f64 {
        self.check_kinds(&a, &g);
        if a.same_as(&g) {
            return 0.0;
        }
        match self.system {
            System::Holonomic2d | System::Holonomic3d => a.distance(&g),
            System::Dubins => dubins::min_cost(a, g, self.turning_radius),
        }
    }
}
