//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use rand::Rng;
use sparse_plan::search::AdjacencyGraph;
use sparse_plan::State;

const SWEEP_STEPS: usize = 4096;
const BISECTIONS: usize = 80;

fn wrap(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

fn dir(h: f64) -> [f64; 2] {
    [h.cos(), h.sin()]
}

fn center(p: [f64; 2], heading: f64, left: bool, rho: f64) -> [f64; 2] {
    let s = if left { 1.0 } else { -1.0 };
    [p[0] - s * rho * heading.sin(), p[1] + s * rho * heading.cos()]
}

/// Point on the circle around `c` where a vehicle turning in the given sense
/// has heading `h`.
fn on_circle(c: [f64; 2], h: f64, left: bool, rho: f64) -> [f64; 2] {
    let s = if left { 1.0 } else { -1.0 };
    [c[0] + s * rho * h.sin(), c[1] - s * rho * h.cos()]
}

/// Heading of a vehicle at point `q` on the circle around `c`.
fn heading_at(c: [f64; 2], q: [f64; 2], left: bool) -> f64 {
    let u = [q[0] - c[0], q[1] - c[1]];
    if left {
        u[0].atan2(-u[1])
    } else {
        (-u[0]).atan2(u[1])
    }
}

fn turn(from: f64, to: f64, left: bool) -> f64 {
    if left {
        wrap(to - from)
    } else {
        wrap(from - to)
    }
}

/// Roots of `f` on `[0, 2π)` located by a uniform sweep and refined by bisection.
fn roots(f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    let step = TAU / SWEEP_STEPS as f64;
    let mut prev = f(0.0);
    for i in 1..=SWEEP_STEPS {
        let (lo0, hi0) = ((i - 1) as f64 * step, i as f64 * step);
        let cur = f(hi0);
        if prev == 0.0 {
            out.push(lo0);
        } else if prev * cur < 0.0 {
            let (mut lo, mut hi, mut flo) = (lo0, hi0, prev);
            for _ in 0..BISECTIONS {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    out
}

/// Shortest Dubins length between two poses found by sweeping the first turn
/// angle of each word and solving the remaining geometry numerically. Uses no
/// closed-form word formulas.
pub fn dubins_sweep(a: State, b: State, rho: f64) -> f64 {
    let (p, th0) = (a.xy(), a.heading().unwrap());
    let (g, th1) = (b.xy(), b.heading().unwrap());
    let mut best = f64::INFINITY;
    for first_left in [true, false] {
        let c1 = center(p, th0, first_left, rho);
        let after = |alpha: f64| {
            let h = if first_left { th0 + alpha } else { th0 - alpha };
            (on_circle(c1, h, first_left, rho), h)
        };
        // turn, straight, turn
        for last_left in [true, false] {
            let c2 = center(g, th1, last_left, rho);
            let gap = |alpha: f64| {
                let (p1, h) = after(alpha);
                let q = on_circle(c2, h, last_left, rho);
                let d = dir(h);
                (d, [q[0] - p1[0], q[1] - p1[1]])
            };
            for alpha in roots(|al| {
                let (d, v) = gap(al);
                d[0] * v[1] - d[1] * v[0]
            }) {
                let (d, v) = gap(alpha);
                let straight = d[0] * v[0] + d[1] * v[1];
                if straight < -1e-9 {
                    continue;
                }
                let h = after(alpha).1;
                let total = rho * alpha + straight.max(0.0) + rho * turn(h, th1, last_left);
                best = best.min(total);
            }
        }
        // turn, opposite turn, turn
        let c2 = center(g, th1, first_left, rho);
        let middle = |alpha: f64| {
            let (p1, h) = after(alpha);
            center(p1, h, !first_left, rho)
        };
        for alpha in roots(|al| {
            let m = middle(al);
            (m[0] - c2[0]).hypot(m[1] - c2[1]) - 2.0 * rho
        }) {
            let h = after(alpha).1;
            let m = middle(alpha);
            let q = [0.5 * (m[0] + c2[0]), 0.5 * (m[1] + c2[1])];
            let psi = heading_at(m, q, !first_left);
            let total = rho * (alpha + turn(h, psi, !first_left) + turn(psi, th1, first_left));
            best = best.min(total);
        }
    }
    best
}

/// Random digraph with integer weights and a consistent start-side heuristic
/// (half the unblocked forward distance).
pub fn random_graph(rng: &mut impl Rng, nodes: usize, edges: usize) -> AdjacencyGraph {
    let mut list = Vec::with_capacity(edges);
    for _ in 0..edges {
        let a = rng.gen_range(0..nodes) as u32;
        let b = rng.gen_range(0..nodes) as u32;
        if a != b {
            list.push((a, b, rng.gen_range(1..=10) as f64));
        }
    }
    let mut g = AdjacencyGraph::new(nodes);
    for &(a, b, c) in &list {
        g.add_edge(a, b, c);
    }
    if rng.gen_bool(0.5) {
        let d = forward_distances(nodes, &list, 0);
        let cap = d.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max) * 0.5;
        g.set_heuristic(d.iter().map(|&x| if x.is_finite() { 0.5 * x } else { cap }).collect());
    }
    g
}

/// Bellman-Ford distances from `source`.
pub fn forward_distances(nodes: usize, edges: &[(u32, u32, f64)], source: usize) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; nodes];
    d[source] = 0.0;
    for _ in 0..nodes {
        let mut changed = false;
        for &(a, b, c) in edges {
            let nd = d[a as usize] + c;
            if nd < d[b as usize] {
                d[b as usize] = nd;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d
}

/// Bellman-Ford shortest cost over the currently unblocked edges.
pub fn bellman_ford(g: &AdjacencyGraph, nodes: usize, start: usize, goal: usize) -> f64 {
    let edges: Vec<(u32, u32, f64)> = (0..g.edge_count() as u32)
        .filter(|&e| g.cost(e).is_finite())
        .map(|e| {
            let (a, b) = g.endpoints(e);
            (a, b, g.cost(e))
        })
        .collect();
    forward_distances(nodes, &edges, start)[goal]
}

pub fn random_pose(rng: &mut impl Rng, extent: f64) -> State {
    State::se2(
        rng.gen_range(-extent..extent),
        rng.gen_range(-extent..extent),
        rng.gen_range(0.0..TAU),
    )
}
