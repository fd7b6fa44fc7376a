//! Exact intersection predicates used by the simulated sensor.
//!
//! Every function returns the earliest contact along the moving primitive:
//! a segment parameter in `[0, 1]` or an arc length along an arc.

use std::f64::consts::TAU;

use crate::state::normalize_angle;

pub type Vec2 = [f64; 2];
pub type Vec3 = [f64; 3];

/// Contact distance below which a touch counts, so that exact corner and
/// tangent contacts are not lost to rounding.
pub const CONTACT_TOL: f64 = 1e-9;

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// First parameter `u ∈ [0,1]` at which segment `p0→p1` touches the closed
/// segment `[a, b]`.
pub fn segment_segment(p0: Vec2, p1: Vec2, a: Vec2, b: Vec2) -> Option<f64> {
    let r = sub(p1, p0);
    let s = sub(b, a);
    let qp = sub(a, p0);
    let rr = dot(r, r);
    let ss = dot(s, s);
    if point_segment_distance(p0, a, b) <= CONTACT_TOL {
        return Some(0.0);
    }
    if rr == 0.0 {
        return None;
    }
    let denom = cross(r, s);
    if denom.abs() > 1e-12 * (rr * ss).sqrt() {
        let u = cross(qp, s) / denom;
        let v = cross(qp, r) / denom;
        let (tu, tv) = (CONTACT_TOL / rr.sqrt(), CONTACT_TOL / ss.sqrt());
        let inside = (-tu..=1.0 + tu).contains(&u) && (-tv..=1.0 + tv).contains(&v);
        return inside.then_some(u.clamp(0.0, 1.0));
    }
    // parallel: only collinear overlaps count
    if cross(qp, r).abs() > 1e-12 * rr.sqrt() * (dot(qp, qp).sqrt() + 1.0) {
        return None;
    }
    let ua = dot(qp, r) / rr;
    let ub = dot(sub(b, p0), r) / rr;
    let lo = ua.min(ub).max(0.0);
    let hi = ua.max(ub).min(1.0);
    (lo <= hi).then_some(lo)
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let s = sub(b, a);
    let ss = dot(s, s);
    let u = if ss == 0.0 {
        0.0
    } else {
        (dot(sub(p, a), s) / ss).clamp(0.0, 1.0)
    };
    let c = [a[0] + u * s[0], a[1] + u * s[1]];
    let d = sub(p, c);
    dot(d, d).sqrt()
}

/// First arc length along the arc at which it touches the closed segment `[a, b]`.
pub fn arc_segment(center: Vec2, radius: f64, start_angle: f64, sweep: f64, a: Vec2, b: Vec2) -> Option<f64> {
    if sweep == 0.0 {
        return None;
    }
    let at = |angle: f64| [center[0] + radius * angle.cos(), center[1] + radius * angle.sin()];
    if point_segment_distance(at(start_angle), a, b) <= CONTACT_TOL {
        return Some(0.0);
    }
    let s = sub(b, a);
    let f = sub(a, center);
    let qa = dot(s, s);
    if qa == 0.0 {
        return None;
    }
    let qb = 2.0 * dot(s, f);
    let qc = dot(f, f) - radius * radius;
    // disc / 4qa is r² minus the squared distance from the centre to the line
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < -8.0 * qa * radius * CONTACT_TOL {
        return None;
    }
    let root = disc.max(0.0).sqrt();
    let tv = CONTACT_TOL / qa.sqrt();
    let mut best: Option<f64> = None;
    for v in [(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)] {
        if !(-tv..=1.0 + tv).contains(&v) {
            continue;
        }
        let v = v.clamp(0.0, 1.0);
        let p = [a[0] + v * s[0], a[1] + v * s[1]];
        let phi = (p[1] - center[1]).atan2(p[0] - center[0]);
        let mut turned = if sweep > 0.0 {
            normalize_angle(phi - start_angle)
        } else {
            normalize_angle(start_angle - phi)
        };
        if turned > TAU - CONTACT_TOL / radius {
            turned = 0.0;
        }
        if turned <= sweep.abs() + CONTACT_TOL / radius {
            let len = turned * radius;
            best = Some(best.map_or(len, |b: f64| b.min(len)));
        }
    }
    if best.is_none() && point_segment_distance(at(start_angle + sweep), a, b) <= CONTACT_TOL {
        best = Some(sweep.abs() * radius);
    }
    best
}

/// First parameter `u ∈ [0,1]` at which segment `p0→p1` enters the open box
/// `(min, max)`. Grazing a face, edge or corner is not a hit.
pub fn segment_open_box(p0: Vec3, p1: Vec3, min: Vec3, max: Vec3) -> Option<f64> {
    let mut t_enter = 0.0f64;
    let mut t_exit = 1.0f64;
    for i in 0..3 {
        let d = p1[i] - p0[i];
        if d == 0.0 {
            if p0[i] <= min[i] || p0[i] >= max[i] {
                return None;
            }
            continue;
        }
        let t1 = (min[i] - p0[i]) / d;
        let t2 = (max[i] - p0[i]) / d;
        t_enter = t_enter.max(t1.min(t2));
        t_exit = t_exit.min(t1.max(t2));
        if t_enter >= t_exit {
            return None;
        }
    }
    (t_enter < t_exit).then_some(t_enter)
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn of_points(a: Vec3, b: Vec3) -> Self {
        Aabb {
            min: [a[0].min(b[0]), a[1].min(b[1]), a[2].min(b[2])],
            max: [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])],
        }
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }
}
