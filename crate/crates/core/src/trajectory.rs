//! Analytic motion primitives, trajectories and their concatenation algebra.
//!
//! Trajectories are parameterized by arc length at unit speed, so a
//! trajectory's duration and its cost are both its length.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{State, QUANTUM};

/// A single analytic piece of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    /// Straight motion. For SE(2) both endpoints carry the travel heading.
    Line { from: State, to: State },
    /// Circular arc in the plane (SE(2) only). `start_angle` is the polar angle
    /// of the start point about `center`; positive `sweep` turns left.
    Arc {
        center: [f64; 2],
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl Primitive {
    pub fn line(from: State, to: State) -> Self {
        Primitive::Line { from, to }
    }

    pub fn arc(center: [f64; 2], radius: f64, start_angle: f64, sweep: f64) -> Self {
        debug_assert!(radius > 0.0);
        debug_assert!(sweep.abs() <= TAU + 1e-9);
        Primitive::Arc {
            center,
            radius,
            start_angle,
            sweep,
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Primitive::Line { from, to } => from.distance(to),
            Primitive::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// State at arc length `s` (clamped to the primitive).
    pub fn state_at(&self, s: f64) -> State {
        match *self {
            Primitive::Line { from, to } => {
                let len = from.distance(&to);
                if len <= 0.0 {
                    return from;
                }
                let u = (s / len).clamp(0.0, 1.0);
                let a = from.position();
                let b = to.position();
                let p = [
                    a[0] + u * (b[0] - a[0]),
                    a[1] + u * (b[1] - a[1]),
                    a[2] + u * (b[2] - a[2]),
                ];
                from.with_position(p, from.heading())
            }
            Primitive::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let turn = (s / radius).clamp(0.0, sweep.abs());
                let phi = start_angle + sweep.signum() * turn;
                arc_state(center, radius, phi, sweep)
            }
        }
    }

    pub fn start(&self) -> State {
        match *self {
            Primitive::Line { from, .. } => from,
            Primitive::Arc { .. } => self.state_at(0.0),
        }
    }

    pub fn end(&self) -> State {
        match *self {
            Primitive::Line { to, .. } => to,
            Primitive::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => arc_state(center, radius, start_angle + sweep, sweep),
        }
    }

    fn translated(&self, d: [f64; 3]) -> Primitive {
        match *self {
            Primitive::Line { from, to } => Primitive::Line {
                from: from.translated(d),
                to: to.translated(d),
            },
            Primitive::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Primitive::Arc {
                center: [center[0] + d[0], center[1] + d[1]],
                radius,
                start_angle,
                sweep,
            },
        }
    }
}

/// Pose on a circle at polar angle `phi`, heading tangent in the turn direction.
fn arc_state(center: [f64; 2], radius: f64, phi: f64, sweep: f64) -> State {
    let heading = if sweep >= 0.0 {
        phi + FRAC_PI_2
    } else {
        phi - FRAC_PI_2
    };
    State::se2(
        center[0] + radius * phi.cos(),
        center[1] + radius * phi.sin(),
        heading,
    )
}

/// A finite sequence of primitives with its length cost and endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    primitives: Vec<Primitive>,
    cost: f64,
    start: State,
    end: State,
}

impl Trajectory {
    /// Builds a trajectory, checking geometric continuity under the coordinate
    /// quantum. `start`/`end` are the nominal endpoints; primitive endpoints must
    /// agree with them to within the quantum.
    pub fn new(primitives: Vec<Primitive>, start: State, end: State) -> Result<Self> {
        let mut cursor = start;
        for p in &primitives {
            if !p.start().approx_eq(&cursor, QUANTUM) {
                return Err(Error::Discontinuous);
            }
            cursor = p.end();
        }
        if !cursor.approx_eq(&end, QUANTUM) {
            return Err(Error::Discontinuous);
        }
        let cost = primitives.iter().map(Primitive::length).sum();
        Ok(Trajectory {
            primitives,
            cost,
            start,
            end,
        })
    }

    /// Straight segment between two states of the same kind.
    pub fn line(from: State, to: State) -> Self {
        Trajectory {
            cost: from.distance(&to),
            primitives: vec![Primitive::line(from, to)],
            start: from,
            end: to,
        }
    }

    /// The empty trajectory that stays at `at`.
    pub fn zero(at: State) -> Self {
        Trajectory {
            primitives: Vec::new(),
            cost: 0.0,
            start: at,
            end: at,
        }
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    /// Arc length of the trajectory.
    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn start(&self) -> State {
        self.start
    }

    pub fn end(&self) -> State {
        self.end
    }

    /// `self` followed by `next`. Fails when `self` does not end where `next` starts.
    pub fn concatenate(&self, next: &Trajectory) -> Result<Trajectory> {
        if !self.end.approx_eq(&next.start, QUANTUM) {
            return Err(Error::EndpointMismatch {
                end: self.end,
                start: next.start,
            });
        }
        let mut primitives = Vec::with_capacity(self.primitives.len() + next.primitives.len());
        primitives.extend_from_slice(&self.primitives);
        primitives.extend_from_slice(&next.primitives);
        // summed in primitive order so that concatenation is associative
        let cost = primitives.iter().map(Primitive::length).sum();
        Ok(Trajectory {
            primitives,
            cost,
            start: self.start,
            end: next.end,
        })
    }

    /// The same trajectory shifted by `d` in position.
    pub fn translated(&self, d: [f64; 3]) -> Trajectory {
        Trajectory {
            primitives: self.primitives.iter().map(|p| p.translated(d)).collect(),
            cost: self.cost,
            start: self.start.translated(d),
            end: self.end.translated(d),
        }
    }

    /// State at arc length `s` from the start (clamped).
    pub fn state_at(&self, s: f64) -> State {
        let mut rest = s;
        for p in &self.primitives {
            let len = p.length();
            if rest <= len {
                return p.state_at(rest);
            }
            rest -= len;
        }
        self.end
    }

    /// States spaced at most `step` apart along the trajectory, including
    /// both endpoints.
    pub fn sample(&self, step: f64) -> Vec<State> {
        self.sample_until(step, f64::INFINITY)
    }

    /// Like [`sample`](Self::sample) but stops at arc length `limit`
    /// (the state at `limit` is included).
    pub fn sample_until(&self, step: f64, limit: f64) -> Vec<State> {
        assert!(step > 0.0, "sample step must be positive");
        let mut out = vec![self.start];
        let mut travelled = 0.0;
        for p in &self.primitives {
            let len = p.length();
            if len <= 0.0 {
                continue;
            }
            let span = len.min(limit - travelled);
            if span <= 0.0 {
                break;
            }
            let n = (span / step).ceil().max(1.0) as usize;
            for i in 1..=n {
                out.push(p.state_at(span * i as f64 / n as f64));
            }
            travelled += len;
            if travelled >= limit {
                break;
            }
        }
        out
    }
}

/// Trajectories sharing one origin and terminal, sorted by ascending cost.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySet {
    origin: State,
    terminal: State,
    members: Vec<Trajectory>,
}

impl TrajectorySet {
    pub fn new(origin: State, terminal: State, mut members: Vec<Trajectory>) -> Self {
        members.sort_by(|a, b| a.cost().total_cmp(&b.cost()));
        TrajectorySet {
            origin,
            terminal,
            members,
        }
    }

    pub fn origin(&self) -> State {
        self.origin
    }

    pub fn terminal(&self) -> State {
        self.terminal
    }

    pub fn members(&self) -> &[Trajectory] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Trajectory> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Cost of the cheapest member, `+∞` for an empty set.
    pub fn min_cost(&self) -> f64 {
        self.members.first().map_or(f64::INFINITY, Trajectory::cost)
    }
}
