//! Robot states and their canonical identity.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

/// Coordinate quantum used for state identity (meters / radians).
pub const QUANTUM: f64 = 1e-6;

/// A robot state in one of the supported state spaces.
///
/// Serialized untagged: `{"x":..,"y":..}`, `{"x":..,"y":..,"z":..}` or
/// `{"x":..,"y":..,"theta":..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum State {
    R3 { x: f64, y: f64, z: f64 },
    Se2 { x: f64, y: f64, theta: f64 },
    R2 { x: f64, y: f64 },
}

/// Which state space a [`State`] lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    R2,
    R3,
    Se2,
}

/// Hashable identity of a state after rounding to [`QUANTUM`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateKey {
    R2([i64; 2]),
    R3([i64; 3]),
    Se2([i64; 3]),
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Smallest absolute difference between two angles, in `[0, π]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

fn quantize(v: f64) -> i64 {
    (v / QUANTUM).round() as i64
}

impl State {
    pub fn r2(x: f64, y: f64) -> Self {
        State::R2 { x, y }
    }

    pub fn r3(x: f64, y: f64, z: f64) -> Self {
        State::R3 { x, y, z }
    }

    /// SE(2) pose; the heading is normalized into `[0, 2π)`.
    pub fn se2(x: f64, y: f64, theta: f64) -> Self {
        State::Se2 {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn kind(&self) -> StateKind {
        match self {
            State::R2 { .. } => StateKind::R2,
            State::R3 { .. } => StateKind::R3,
            State::Se2 { .. } => StateKind::Se2,
        }
    }

    /// Position components padded to three dimensions (`z = 0` in the plane).
    pub fn position(&self) -> [f64; 3] {
        match *self {
            State::R2 { x, y } | State::Se2 { x, y, .. } => [x, y, 0.0],
            State::R3 { x, y, z } => [x, y, z],
        }
    }

    pub fn xy(&self) -> [f64; 2] {
        let p = self.position();
        [p[0], p[1]]
    }

    pub fn heading(&self) -> Option<f64> {
        match *self {
            State::Se2 { theta, .. } => Some(theta),
            _ => None,
        }
    }

    /// Euclidean distance between the position components.
    pub fn distance(&self, other: &State) -> f64 {
        let a = self.position();
        let b = other.position();
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    /// Same state kind with the position shifted by `d`.
    pub fn translated(&self, d: [f64; 3]) -> State {
        match *self {
            State::R2 { x, y } => State::R2 {
                x: x + d[0],
                y: y + d[1],
            },
            State::R3 { x, y, z } => State::R3 {
                x: x + d[0],
                y: y + d[1],
                z: z + d[2],
            },
            State::Se2 { x, y, theta } => State::Se2 {
                x: x + d[0],
                y: y + d[1],
                theta,
            },
        }
    }

    /// Rebuilds a state of the same kind at `pos` (and `heading` for SE(2)).
    pub fn with_position(&self, pos: [f64; 3], heading: Option<f64>) -> State {
        match *self {
            State::R2 { .. } => State::r2(pos[0], pos[1]),
            State::R3 { .. } => State::r3(pos[0], pos[1], pos[2]),
            State::Se2 { theta, .. } => State::se2(pos[0], pos[1], heading.unwrap_or(theta)),
        }
    }

    /// Canonical key: coordinates rounded to [`QUANTUM`]; a heading that rounds
    /// to 2π folds onto 0.
    pub fn key(&self) -> StateKey {
        match *self {
            State::R2 { x, y } => StateKey::R2([quantize(x), quantize(y)]),
            State::R3 { x, y, z } => StateKey::R3([quantize(x), quantize(y), quantize(z)]),
            State::Se2 { x, y, theta } => {
                let full = quantize(TAU);
                let mut t = quantize(normalize_angle(theta));
                if t >= full {
                    t -= full;
                }
                StateKey::Se2([quantize(x), quantize(y), t])
            }
        }
    }

    /// Tolerant comparison: same kind, every coordinate within `tol`
    /// (headings compared on the circle).
    pub fn approx_eq(&self, other: &State, tol: f64) -> bool {
        match (*self, *other) {
            (State::R2 { x: ax, y: ay }, State::R2 { x: bx, y: by }) => {
                (ax - bx).abs() <= tol && (ay - by).abs() <= tol
            }
            (
                State::R3 {
                    x: ax,
                    y: ay,
                    z: az,
                },
                State::R3 {
                    x: bx,
                    y: by,
                    z: bz,
                },
            ) => (ax - bx).abs() <= tol && (ay - by).abs() <= tol && (az - bz).abs() <= tol,
            (
                State::Se2 {
                    x: ax,
                    y: ay,
                    theta: at,
                },
                State::Se2 {
                    x: bx,
                    y: by,
                    theta: bt,
                },
            ) => {
                (ax - bx).abs() <= tol
                    && (ay - by).abs() <= tol
                    && angle_distance(at, bt) <= tol
            }
            _ => false,
        }
    }

    /// Identity under the coordinate quantum: exact key match, or every
    /// coordinate within one quantum (covers values straddling a rounding edge).
    pub fn same_as(&self, other: &State) -> bool {
        self.key() == other.key() || self.approx_eq(other, QUANTUM)
    }
}
