//! Seeded random obstacle fields with a start and goal.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::State;
use crate::steering::{SteeringSpec, System};
use crate::world::{clearance, Bounds, Obstacle, World, DEFAULT_VOXEL};

/// Distance from start to goal before rounding.
pub const GOAL_DISTANCE: f64 = 20.0;
/// Re-draws allowed per obstacle before generation gives up.
const MAX_REDRAWS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub system: SteeringSpec,
    pub obstacle_count: usize,
    /// Segment length or cube side.
    pub obstacle_size: f64,
    pub bounds: Bounds,
    pub seed: u64,
    /// Boundary discretization δ.
    pub boundary_delta: f64,
    /// Heading discretization Δθ (Dubins only).
    #[serde(default)]
    pub angular_delta: f64,
}

impl ScenarioSpec {
    /// The standard field: `[0, 30]^d`, δ = 0.25, Δθ = π/8.
    pub fn standard(system: SteeringSpec, obstacle_count: usize, obstacle_size: f64, seed: u64) -> Self {
        ScenarioSpec {
            system,
            obstacle_count,
            obstacle_size,
            bounds: Bounds::cube(system.system.dim(), 0.0, 30.0),
            seed,
            boundary_delta: 0.25,
            angular_delta: PI / 8.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.system.system.dim();
        if self.bounds.min.len() != dim || self.bounds.max.len() != dim {
            return Err(Error::invalid("bounds", format!("expected {dim} coordinates")));
        }
        if (0..dim).any(|i| !(self.bounds.max[i] > self.bounds.min[i])) {
            return Err(Error::invalid("bounds", "max must exceed min"));
        }
        if !(self.obstacle_size > 0.0) {
            return Err(Error::invalid("obstacle_size", "must be positive"));
        }
        if !(self.boundary_delta > 0.0) {
            return Err(Error::invalid("boundary_delta", "must be positive"));
        }
        if self.system.system == System::Dubins {
            if !(self.angular_delta > 0.0) {
                return Err(Error::invalid("angular_delta", "must be positive"));
            }
            if !(self.system.turning_radius > 0.0) {
                return Err(Error::invalid("turning_radius", "must be positive"));
            }
        }
        Ok(())
    }
}

/// A world with start and goal; the obstacle map is hidden behind [`World`].
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub spec: ScenarioSpec,
    pub start: State,
    pub goal: State,
    pub world: World,
}

/// On-disk form of a scenario. Field order is fixed so output is byte-stable.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct ScenarioFile {
    id: String,
    spec: ScenarioSpec,
    start: State,
    goal: State,
    obstacles: Vec<Obstacle>,
}

impl Scenario {
    pub fn new(id: impl Into<String>, spec: ScenarioSpec, start: State, goal: State, obstacles: Vec<Obstacle>) -> Self {
        let world = World::new(obstacles, spec.bounds.clone(), DEFAULT_VOXEL);
        Scenario {
            id: id.into(),
            spec,
            start,
            goal,
            world,
        }
    }

    pub fn id_for_seed(seed: u64) -> String {
        format!("seed-{seed:06}")
    }

    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            id: self.id.clone(),
            spec: self.spec.clone(),
            start: self.start,
            goal: self.goal,
            obstacles: self.world.obstacles().to_vec(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Ok(Scenario::new(file.id, file.spec, file.start, file.goal, file.obstacles))
    }
}

/// Draws a scenario deterministically from `spec.seed`.
///
/// Start is `(5, 5)` / `(5, 5, 5)`; the goal lies 20 units away along a random
/// direction with nonnegative components, rounded to integers. Dubins headings
/// are multiples of π/2. Obstacles touching the start or goal are re-drawn.
pub fn generate(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let system = spec.system.system;
    let eps = clearance(spec.boundary_delta);

    let (start, goal) = match system {
        System::Holonomic2d | System::Dubins => {
            let angle = rng.gen_range(0.0..=FRAC_PI_2);
            let gx = (5.0 + GOAL_DISTANCE * angle.cos()).round();
            let gy = (5.0 + GOAL_DISTANCE * angle.sin()).round();
            if system == System::Dubins {
                let hs = rng.gen_range(0..4) as f64 * FRAC_PI_2;
                let hg = rng.gen_range(0..4) as f64 * FRAC_PI_2;
                (State::se2(5.0, 5.0, hs), State::se2(gx, gy, hg))
            } else {
                (State::r2(5.0, 5.0), State::r2(gx, gy))
            }
        }
        System::Holonomic3d => {
            let dir = loop {
                let v: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n > 1e-6 && n <= 1.0 {
                    break [v[0] / n, v[1] / n, v[2] / n];
                }
            };
            let g = dir.map(|c| (5.0 + GOAL_DISTANCE * c).round());
            (State::r3(5.0, 5.0, 5.0), State::r3(g[0], g[1], g[2]))
        }
    };
    for (what, s) in [("start", start), ("goal", goal)] {
        if !spec.bounds.contains(s.position()) {
            return Err(Error::GenerationFailed(format!("{what} {s:?} lies outside the bounds")));
        }
    }

    let size = spec.obstacle_size;
    let lo = &spec.bounds.min;
    let hi = &spec.bounds.max;
    let mut obstacles = Vec::with_capacity(spec.obstacle_count);
    for id in 0..spec.obstacle_count {
        let mut placed = None;
        for _ in 0..MAX_REDRAWS {
            let candidate = match system {
                System::Holonomic2d | System::Dubins => {
                    let cx = rng.gen_range(lo[0]..=hi[0]);
                    let cy = rng.gen_range(lo[1]..=hi[1]);
                    let angle = rng.gen_range(0.0..PI);
                    let (dx, dy) = (0.5 * size * angle.cos(), 0.5 * size * angle.sin());
                    Obstacle::segment(id, [cx - dx, cy - dy], [cx + dx, cy + dy])
                }
                System::Holonomic3d => {
                    if (0..3).any(|i| hi[i] - lo[i] < size) {
                        return Err(Error::GenerationFailed("cube larger than the bounds".into()));
                    }
                    let min = [0, 1, 2].map(|i| rng.gen_range(lo[i]..=hi[i] - size));
                    Obstacle::cube(id, min, size)
                }
            };
            let b = candidate.aabb();
            let inside = spec.bounds.contains(b.min) && spec.bounds.contains(b.max);
            let clear = [start, goal]
                .iter()
                .all(|s| candidate.distance_to(s.position()) > eps);
            if inside && clear {
                placed = Some(candidate);
                break;
            }
        }
        match placed {
            Some(o) => obstacles.push(o),
            None => {
                return Err(Error::GenerationFailed(format!(
                    "obstacle {id} could not be placed after {MAX_REDRAWS} draws"
                )))
            }
        }
    }

    Ok(Scenario::new(
        Scenario::id_for_seed(spec.seed),
        spec.clone(),
        start,
        goal,
        obstacles,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let spec = ScenarioSpec::standard(SteeringSpec::holonomic_2d(), 100, 2.0, 7);
        let a = generate(&spec).unwrap().to_json();
        let b = generate(&spec).unwrap().to_json();
        assert_eq!(a, b);
        let other = ScenarioSpec { seed: 8, ..spec };
        assert_ne!(a, generate(&other).unwrap().to_json());
    }

    #[test]
    fn cube_field_matches_setup() {
        let spec = ScenarioSpec::standard(SteeringSpec::holonomic_3d(), 200, 2.0, 3);
        let sc = generate(&spec).unwrap();
        assert_eq!(sc.world.obstacles().len(), 200);
        assert_eq!(sc.start, State::r3(5.0, 5.0, 5.0));
        for o in sc.world.obstacles() {
            let b = o.aabb();
            assert!((b.max[0] - b.min[0] - 2.0).abs() < 1e-12);
            assert!(o.distance_to(sc.start.position()) > 0.0);
            assert!(o.distance_to(sc.goal.position()) > 0.0);
        }
    }

    #[test]
    fn goal_distance_within_rounding() {
        for seed in 0..200 {
            for system in [SteeringSpec::holonomic_2d(), SteeringSpec::holonomic_3d(), SteeringSpec::dubins(1.0)] {
                let sc = generate(&ScenarioSpec::standard(system, 5, 2.0, seed)).unwrap();
                let dim = system.system.dim() as f64;
                let slack = 0.5 * dim.sqrt();
                let d = sc.start.distance(&sc.goal);
                assert!((d - GOAL_DISTANCE).abs() <= slack, "seed {seed}: {d}");
                let g = &sc.goal.position()[..system.system.dim()];
                assert!(g.iter().all(|c| c.fract() == 0.0));
                assert!(g.iter().all(|&c| c >= 5.0));
            }
        }
    }

    #[test]
    fn dubins_headings_are_quarter_turns() {
        for seed in 0..50 {
            let sc = generate(&ScenarioSpec::standard(SteeringSpec::dubins(1.0), 10, 2.0, seed)).unwrap();
            for s in [sc.start, sc.goal] {
                let h = s.heading().unwrap() / FRAC_PI_2;
                assert!((h - h.round()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let sc = generate(&ScenarioSpec::standard(SteeringSpec::dubins(1.0), 10, 2.0, 11)).unwrap();
        let text = sc.to_json();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.world.obstacles(), sc.world.obstacles());
    }

    #[test]
    fn validation_names_the_field() {
        let mut spec = ScenarioSpec::standard(SteeringSpec::holonomic_2d(), 10, 2.0, 1);
        spec.obstacle_size = -1.0;
        match generate(&spec) {
            Err(Error::Invalid { field, .. }) => assert_eq!(field, "obstacle_size"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
