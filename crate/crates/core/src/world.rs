//! The hidden obstacle map, the simulated sensor that checks trajectories
//! against it, obstacle boundary sampling, and sensed-area bookkeeping.

use std::f64::consts::TAU;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::geometry::{self, Aabb};
use crate::state::State;
use crate::steering::{SteeringSpec, System};
use crate::trajectory::{Primitive, Trajectory};

pub type ObstacleId = usize;

/// Voxel edge length used for sensed-area accounting.
pub const DEFAULT_VOXEL: f64 = 0.2;

/// Outward clearance of boundary nodes for a boundary spacing `delta`.
pub fn clearance(delta: f64) -> f64 {
    1e-3 * delta
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Impassable planar wall.
    Segment2d { p: [f64; 2], q: [f64; 2] },
    /// Axis-aligned cube; its interior is blocked.
    Cube3d { min: [f64; 3], side: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub id: ObstacleId,
    #[serde(flatten)]
    pub shape: Shape,
}

impl Obstacle {
    pub fn segment(id: ObstacleId, p: [f64; 2], q: [f64; 2]) -> Self {
        Obstacle {
            id,
            shape: Shape::Segment2d { p, q },
        }
    }

    pub fn cube(id: ObstacleId, min: [f64; 3], side: f64) -> Self {
        Obstacle {
            id,
            shape: Shape::Cube3d { min, side },
        }
    }

    pub fn aabb(&self) -> Aabb {
        match self.shape {
            Shape::Segment2d { p, q } => Aabb::of_points([p[0], p[1], 0.0], [q[0], q[1], 0.0]),
            Shape::Cube3d { min, side } => Aabb {
                min,
                max: [min[0] + side, min[1] + side, min[2] + side],
            },
        }
    }

    /// Distance from a position to the obstacle set (zero inside a cube).
    pub fn distance_to(&self, pos: [f64; 3]) -> f64 {
        match self.shape {
            Shape::Segment2d { p, q } => geometry::point_segment_distance([pos[0], pos[1]], p, q),
            Shape::Cube3d { min, side } => {
                let mut sq = 0.0;
                for i in 0..3 {
                    let lo = min[i];
                    let hi = min[i] + side;
                    let d = if pos[i] < lo {
                        lo - pos[i]
                    } else if pos[i] > hi {
                        pos[i] - hi
                    } else {
                        0.0
                    };
                    sq += d * d;
                }
                sq.sqrt()
            }
        }
    }

    /// First contact of a primitive with this obstacle, as arc length along
    /// the primitive.
    fn first_contact(&self, prim: &Primitive) -> Option<f64> {
        match (self.shape, prim) {
            (Shape::Segment2d { p, q }, Primitive::Line { from, to }) => {
                geometry::segment_segment(from.xy(), to.xy(), p, q).map(|u| u * prim.length())
            }
            (
                Shape::Segment2d { p, q },
                &Primitive::Arc {
                    center,
                    radius,
                    start_angle,
                    sweep,
                },
            ) => geometry::arc_segment(center, radius, start_angle, sweep, p, q),
            (Shape::Cube3d { min, side }, Primitive::Line { from, to }) => {
                let max = [min[0] + side, min[1] + side, min[2] + side];
                geometry::segment_open_box(from.position(), to.position(), min, max)
                    .map(|u| u * prim.length())
            }
            (Shape::Cube3d { .. }, Primitive::Arc { .. }) => {
                panic!("arcs are planar and cannot be checked against cubes")
            }
        }
    }
}

fn primitive_aabb(prim: &Primitive) -> Aabb {
    match *prim {
        Primitive::Line { from, to } => Aabb::of_points(from.position(), to.position()),
        Primitive::Arc { center, radius, .. } => Aabb {
            min: [center[0] - radius, center[1] - radius, 0.0],
            max: [center[0] + radius, center[1] + radius, 0.0],
        },
    }
}

/// Axis-aligned workspace bounds (`min`/`max` have one entry per dimension).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Bounds {
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Bounds {
            min: vec![lo; dim],
            max: vec![hi; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, pos: [f64; 3]) -> bool {
        (0..self.dim()).all(|i| pos[i] >= self.min[i] && pos[i] <= self.max[i])
    }
}

/// Result of checking one trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Collision {
    Clear,
    /// The earliest obstacle along the trajectory and the arc length of contact.
    Hit { obstacle: ObstacleId, at: f64 },
}

impl Collision {
    pub fn obstacle(&self) -> Option<ObstacleId> {
        match self {
            Collision::Clear => None,
            Collision::Hit { obstacle, .. } => Some(*obstacle),
        }
    }
}

/// Set of position voxels the simulated sensor has moved through.
#[derive(Clone, Debug, Default)]
pub struct SensedGrid {
    voxel: f64,
    cells: FxHashSet<[i64; 3]>,
}

impl SensedGrid {
    pub fn new(voxel: f64) -> Self {
        assert!(voxel > 0.0, "voxel size must be positive");
        SensedGrid {
            voxel,
            cells: FxHashSet::default(),
        }
    }

    pub fn voxel(&self) -> f64 {
        self.voxel
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn clear(&mut self) {
        self.cells.clear();
    }

    /// Marks the voxels under a quarter-voxel sampling of `t` up to arc length `limit`.
    pub fn mark(&mut self, t: &Trajectory, limit: f64) {
        for s in t.sample_until(self.voxel / 4.0, limit) {
            let p = s.position();
            let v = self.voxel;
            self.cells.insert([
                (p[0] / v).floor() as i64,
                (p[1] / v).floor() as i64,
                (p[2] / v).floor() as i64,
            ]);
        }
    }
}

/// The full obstacle map. Planners only see it through
/// [`check_trajectory`](World::check_trajectory).
#[derive(Clone, Debug)]
pub struct World {
    obstacles: Vec<Obstacle>,
    boxes: Vec<Aabb>,
    bounds: Bounds,
    sensed: SensedGrid,
}

impl World {
    /// Obstacle ids must equal their positions in `obstacles`.
    pub fn new(obstacles: Vec<Obstacle>, bounds: Bounds, voxel: f64) -> Self {
        assert!(
            obstacles.iter().enumerate().all(|(i, o)| o.id == i),
            "obstacle ids must be their indices"
        );
        let boxes = obstacles.iter().map(Obstacle::aabb).collect();
        World {
            obstacles,
            boxes,
            bounds,
            sensed: SensedGrid::new(voxel),
        }
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    /// Obstacle ids are positions in the obstacle list.
    pub fn obstacle(&self, id: ObstacleId) -> &Obstacle {
        &self.obstacles[id]
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn sensed(&self) -> &SensedGrid {
        &self.sensed
    }

    /// Number of distinct voxels marked so far.
    pub fn sensed_area(&self) -> usize {
        self.sensed.len()
    }

    pub fn reset_sensed(&mut self) {
        self.sensed.clear();
    }

    /// Earliest obstacle along `t` without touching the sensed grid.
    pub fn first_hit(&self, t: &Trajectory) -> Collision {
        let mut travelled = 0.0;
        for prim in t.primitives() {
            let len = prim.length();
            if len <= 0.0 {
                continue;
            }
            let pbox = primitive_aabb(prim);
            let mut best: Option<(f64, ObstacleId)> = None;
            for (obs, obox) in self.obstacles.iter().zip(&self.boxes) {
                if !pbox.overlaps(obox) {
                    continue;
                }
                if let Some(s) = obs.first_contact(prim) {
                    if best.is_none_or(|(b, _)| s < b) {
                        best = Some((s, obs.id));
                    }
                }
            }
            if let Some((s, obstacle)) = best {
                return Collision::Hit {
                    obstacle,
                    at: travelled + s,
                };
            }
            travelled += len;
        }
        Collision::Clear
    }

    /// Simulated sensor: finds the earliest obstacle along `t` and marks the
    /// voxels traversed up to the contact point (the whole trajectory when clear).
    pub fn check_trajectory(&mut self, t: &Trajectory) -> Collision {
        let hit = self.first_hit(t);
        let limit = match hit {
            Collision::Clear => f64::INFINITY,
            Collision::Hit { at, .. } => at,
        };
        self.sensed.mark(t, limit);
        hit
    }
}

/// Boundary sample states of an obstacle, offset outward by the clearance
/// `1e-3 · delta` and deduplicated under the coordinate quantum.
///
/// Segments get stations at spacing at most `delta` on both sides plus the two
/// axially extended endpoints. Cubes get a surface lattice whose points are
/// pushed out along every face they lie on. Dubins nodes cross positions with
/// headings `0, Δθ, …`.
pub fn boundary_nodes(obstacle: &Obstacle, delta: f64, angular_delta: f64, spec: &SteeringSpec) -> Vec<State> {
    assert!(delta > 0.0, "boundary spacing must be positive");
    let eps = clearance(delta);
    let positions: Vec<[f64; 3]> = match obstacle.shape {
        Shape::Segment2d { p, q } => segment_stations(p, q, delta, eps),
        Shape::Cube3d { min, side } => cube_stations(min, side, delta, eps),
    };
    let mut seen = FxHashSet::default();
    let mut out = Vec::new();
    let mut push = |s: State| {
        if seen.insert(s.key()) {
            out.push(s);
        }
    };
    match spec.system {
        System::Holonomic2d => positions.iter().for_each(|p| push(State::r2(p[0], p[1]))),
        System::Holonomic3d => positions.iter().for_each(|p| push(State::r3(p[0], p[1], p[2]))),
        System::Dubins => {
            assert!(angular_delta > 0.0, "angular spacing must be positive");
            let headings = heading_count(angular_delta);
            for p in &positions {
                for k in 0..headings {
                    push(State::se2(p[0], p[1], k as f64 * angular_delta));
                }
            }
        }
    }
    out
}

/// Number of headings `0, Δθ, …` below a full turn.
pub fn heading_count(angular_delta: f64) -> usize {
    ((TAU / angular_delta) - 1e-9).ceil().max(1.0) as usize
}

fn stations(len: f64, delta: f64) -> usize {
    ((len / delta) - 1e-9).ceil().max(1.0) as usize + 1
}

fn segment_stations(p: [f64; 2], q: [f64; 2], delta: f64, eps: f64) -> Vec<[f64; 3]> {
    let d = [q[0] - p[0], q[1] - p[1]];
    let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let u = [d[0] / len, d[1] / len];
    let n = [-u[1], u[0]];
    let count = stations(len, delta);
    let mut out = Vec::with_capacity(2 * count + 2);
    for side in [1.0, -1.0] {
        for i in 0..count {
            let f = i as f64 / (count - 1) as f64;
            out.push([
                p[0] + f * d[0] + side * eps * n[0],
                p[1] + f * d[1] + side * eps * n[1],
                0.0,
            ]);
        }
    }
    out.push([p[0] - eps * u[0], p[1] - eps * u[1], 0.0]);
    out.push([q[0] + eps * u[0], q[1] + eps * u[1], 0.0]);
    out
}

fn cube_stations(min: [f64; 3], side: f64, delta: f64, eps: f64) -> Vec<[f64; 3]> {
    let count = stations(side, delta);
    let last = count - 1;
    let mut out = Vec::new();
    for i in 0..count {
        for j in 0..count {
            for k in 0..count {
                let idx = [i, j, k];
                if !idx.iter().any(|&c| c == 0 || c == last) {
                    continue;
                }
                let mut p = [0.0; 3];
                for a in 0..3 {
                    let base = min[a] + side * idx[a] as f64 / last as f64;
                    p[a] = if idx[a] == 0 {
                        base - eps
                    } else if idx[a] == last {
                        base + eps
                    } else {
                        base
                    };
                }
                out.push(p);
            }
        }
    }
    out
}
