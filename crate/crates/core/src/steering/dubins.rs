//! Closed-form Dubins words in normalized coordinates.
//!
//! Each word is parameterized by `(t, p, q)`: the first and last entries are
//! turn angles in radians and the middle entry is either a straight length in
//! units of the turning radius (CSC words) or a turn angle (CCC words).

use std::f64::consts::{PI, TAU};

use crate::state::State;
use crate::trajectory::{Primitive, Trajectory};

/// Slack tolerated on inverse-trig arguments before a word is declared infeasible.
const TRIG_SLACK: f64 = 1e-12;
/// Turn angles within this distance of a full turn are treated as no turn.
const FULL_TURN_SNAP: f64 = 1e-9;
/// Maximum position error of a constructed word's endpoint (relative to radius).
const END_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Segment {
    Left,
    Straight,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Word {
    Lsl,
    Rsr,
    Lsr,
    Rsl,
    Rlr,
    Lrl,
}

impl Word {
    pub const ALL: [Word; 6] = [Word::Lsl, Word::Rsr, Word::Lsr, Word::Rsl, Word::Rlr, Word::Lrl];

    pub fn segments(self) -> [Segment; 3] {
        use Segment::*;
        match self {
            Word::Lsl => [Left, Straight, Left],
            Word::Rsr => [Right, Straight, Right],
            Word::Lsr => [Left, Straight, Right],
            Word::Rsl => [Right, Straight, Left],
            Word::Rlr => [Right, Left, Right],
            Word::Lrl => [Left, Right, Left],
        }
    }
}

fn mod2pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU - FULL_TURN_SNAP {
        0.0
    } else {
        r
    }
}

fn clamped_acos(v: f64) -> Option<f64> {
    if v.abs() > 1.0 + TRIG_SLACK {
        None
    } else {
        Some(v.clamp(-1.0, 1.0).acos())
    }
}

/// Normalized problem: start at the origin facing `alpha`, goal at `(d, 0)`
/// facing `beta`, unit turning radius.
struct Normalized {
    alpha: f64,
    beta: f64,
    d: f64,
    sa: f64,
    sb: f64,
    ca: f64,
    cb: f64,
    c_ab: f64,
}

impl Normalized {
    fn new(a: [f64; 3], b: [f64; 3], rho: f64) -> Self {
        let dx = b[0] - a[0];
        let dy = b[1] - a[1];
        let d = (dx * dx + dy * dy).sqrt() / rho;
        let phi = if d > 0.0 { dy.atan2(dx) } else { 0.0 };
        let alpha = mod2pi(a[2] - phi);
        let beta = mod2pi(b[2] - phi);
        Normalized {
            alpha,
            beta,
            d,
            sa: alpha.sin(),
            sb: beta.sin(),
            ca: alpha.cos(),
            cb: beta.cos(),
            c_ab: (alpha - beta).cos(),
        }
    }

    fn params(&self, word: Word) -> Option<[f64; 3]> {
        let Normalized {
            alpha,
            beta,
            d,
            sa,
            sb,
            ca,
            cb,
            c_ab,
        } = *self;
        match word {
            Word::Lsl => {
                let tmp0 = d + sa - sb;
                let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
                if p_sq < -TRIG_SLACK {
                    return None;
                }
                let tmp1 = (cb - ca).atan2(tmp0);
                Some([mod2pi(tmp1 - alpha), p_sq.max(0.0).sqrt(), mod2pi(beta - tmp1)])
            }
            Word::Rsr => {
                let tmp0 = d - sa + sb;
                let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
                if p_sq < -TRIG_SLACK {
                    return None;
                }
                let tmp1 = (ca - cb).atan2(tmp0);
                Some([mod2pi(alpha - tmp1), p_sq.max(0.0).sqrt(), mod2pi(tmp1 - beta)])
            }
            Word::Lsr => {
                let p_sq = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
                if p_sq < -TRIG_SLACK {
                    return None;
                }
                let p = p_sq.max(0.0).sqrt();
                let tmp0 = (-ca - cb).atan2(d + sa + sb) - (-2.0f64).atan2(p);
                Some([mod2pi(tmp0 - alpha), p, mod2pi(tmp0 - beta)])
            }
            Word::Rsl => {
                let p_sq = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
                if p_sq < -TRIG_SLACK {
                    return None;
                }
                let p = p_sq.max(0.0).sqrt();
                let tmp0 = (ca + cb).atan2(d - sa - sb) - 2.0f64.atan2(p);
                Some([mod2pi(alpha - tmp0), p, mod2pi(beta - tmp0)])
            }
            // The acos argument is 1 - (center distance)^2 / 8, so it stays in
            // [-1, 1] exactly when the two outer circles are less than 4 radii apart.
            Word::Rlr => {
                let tmp0 = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
                let phi = (ca - cb).atan2(d - sa + sb);
                let p = mod2pi(TAU - clamped_acos(tmp0)?);
                let t = mod2pi(alpha - phi + mod2pi(p / 2.0));
                Some([t, p, mod2pi(alpha - beta - t + p)])
            }
            Word::Lrl => {
                let tmp0 = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
                let phi = (ca - cb).atan2(d + sa - sb);
                let p = mod2pi(TAU - clamped_acos(tmp0)?);
                let t = mod2pi(-alpha - phi + p / 2.0);
                Some([t, p, mod2pi(beta - alpha - t + p)])
            }
        }
    }
}

/// Walks a word from pose `a`, emitting one primitive per segment.
fn build(a: State, b: State, rho: f64, word: Word, params: [f64; 3]) -> Option<Trajectory> {
    let [mut x, mut y, _] = a.position();
    let mut theta = a.heading().expect("dubins states are SE(2)");
    let mut primitives = Vec::with_capacity(3);
    for (seg, &param) in word.segments().iter().zip(params.iter()) {
        match seg {
            Segment::Straight => {
                let len = param * rho;
                let from = State::se2(x, y, theta);
                x += len * theta.cos();
                y += len * theta.sin();
                primitives.push(Primitive::line(from, State::se2(x, y, theta)));
            }
            Segment::Left => {
                let center = [x - rho * theta.sin(), y + rho * theta.cos()];
                let start_angle = theta - PI / 2.0;
                primitives.push(Primitive::arc(center, rho, start_angle, param));
                theta += param;
                let phi = start_angle + param;
                x = center[0] + rho * phi.cos();
                y = center[1] + rho * phi.sin();
            }
            Segment::Right => {
                let center = [x + rho * theta.sin(), y - rho * theta.cos()];
                let start_angle = theta + PI / 2.0;
                primitives.push(Primitive::arc(center, rho, start_angle, -param));
                theta -= param;
                let phi = start_angle - param;
                x = center[0] + rho * phi.cos();
                y = center[1] + rho * phi.sin();
            }
        }
    }
    let reached = State::se2(x, y, theta);
    if !reached.approx_eq(&b, END_TOLERANCE * rho.max(1.0)) {
        return None;
    }
    // Snap the final piece onto the requested goal so endpoints agree exactly.
    if let Some(Primitive::Line { to, .. }) = primitives.last_mut() {
        *to = b;
    }
    let cost = params[0] * rho + params[2] * rho + params[1] * rho;
    debug_assert!((cost - primitives.iter().map(Primitive::length).sum::<f64>()).abs() < 1e-6);
    Trajectory::new(primitives, a, b).ok()
}

/// Cost and trajectory of one word, if it is feasible.
pub fn word_trajectory(a: State, b: State, rho: f64, word: Word) -> Option<Trajectory> {
    let pa = pose(a);
    let pb = pose(b);
    let params = Normalized::new(pa, pb, rho).params(word)?;
    build(a, b, rho, word, params)
}

/// Lengths of all feasible words without building trajectories.
pub fn word_costs(a: State, b: State, rho: f64) -> [Option<f64>; 6] {
    let n = Normalized::new(pose(a), pose(b), rho);
    Word::ALL.map(|w| n.params(w).map(|p| (p[0] + p[1] + p[2]) * rho))
}

/// All feasible words between two poses, unsorted.
pub fn all_words(a: State, b: State, rho: f64) -> Vec<(Word, Trajectory)> {
    let n = Normalized::new(pose(a), pose(b), rho);
    Word::ALL
        .iter()
        .filter_map(|&w| {
            let params = n.params(w)?;
            build(a, b, rho, w, params).map(|t| (w, t))
        })
        .collect()
}

/// Length of the shortest word.
pub fn min_cost(a: State, b: State, rho: f64) -> f64 {
    word_costs(a, b, rho)
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn pose(s: State) -> [f64; 3] {
    match s {
        State::Se2 { x, y, theta } => [x, y, theta],
        other => panic!("dubins steering needs SE(2) states, got {other:?}"),
    }
}
