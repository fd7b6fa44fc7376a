//! Lattice baseline planner.
//!
//! Nodes sit at regular spacing over the bounds (crossed with discrete
//! headings for Dubins). Every node shares one set of motion templates, so the
//! lattice is materialized lazily: a node or edge exists once the search has
//! looked at it. Node and edge counts report what was materialized.

use std::f64::consts::TAU;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeStatus, NodeId};
use crate::scenario::Scenario;
use crate::search::{select_edge_to_check, Link, Lpa, SearchGraph, Selection};
use crate::sparse::{assemble, IterationTrace, PlanOutcome, PlanReport, PlanStats};
use crate::state::State;
use crate::steering::{SteeringSpec, System};
use crate::trajectory::Trajectory;
use crate::world::{heading_count, Bounds, Collision, World};

/// Snapping tolerance, in lattice units.
const SNAP_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Lattice spacing g.
    pub spacing: f64,
    /// 0 = axis neighbors; n = every offset within Chebyshev distance n.
    pub connectivity: u32,
    /// Heading spacing Δθ (Dubins only).
    pub angular_delta: f64,
    /// Dubins primitives costing more than this multiple of their
    /// displacement are dropped.
    pub prune_factor: f64,
    pub bounds: Bounds,
}

impl GridSpec {
    pub const DEFAULT_PRUNE_FACTOR: f64 = 3.0;

    pub fn new(spacing: f64, connectivity: u32, angular_delta: f64, bounds: Bounds) -> Self {
        GridSpec {
            spacing,
            connectivity,
            angular_delta,
            prune_factor: Self::DEFAULT_PRUNE_FACTOR,
            bounds,
        }
    }

    pub fn validate(&self, steering: &SteeringSpec) -> Result<()> {
        if !(self.spacing > 0.0) {
            return Err(Error::invalid("spacing", "must be positive"));
        }
        if steering.system == System::Dubins {
            if !(self.angular_delta > 0.0) {
                return Err(Error::invalid("angular_delta", "must be positive"));
            }
            if !(self.prune_factor > 1.0) {
                return Err(Error::invalid("prune_factor", "must exceed 1"));
            }
        }
        if self.bounds.dim() != steering.system.dim() {
            return Err(Error::invalid("bounds", "dimension does not match the system"));
        }
        Ok(())
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Neighbor offsets in lattice units for a `dim`-dimensional lattice.
///
/// Connectivity 0 gives the `2·dim` axis steps. Connectivity `n ≥ 1` gives
/// every nonzero offset with Chebyshev norm at most `n`, minus those that are
/// an integer multiple of a shorter offset.
pub fn neighbor_offsets(dim: usize, connectivity: u32) -> Vec<[i64; 3]> {
    assert!(dim == 2 || dim == 3, "lattices are 2D or 3D");
    let mut out = Vec::new();
    if connectivity == 0 {
        for axis in 0..dim {
            for sign in [-1, 1] {
                let mut v = [0; 3];
                v[axis] = sign;
                out.push(v);
            }
        }
        return out;
    }
    let n = connectivity as i64;
    let zr = if dim == 3 { -n..=n } else { 0..=0 };
    for z in zr {
        for y in -n..=n {
            for x in -n..=n {
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                if gcd(gcd(x, y), z) == 1 {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
struct Template {
    offset: [i64; 3],
    from_heading: usize,
    to_heading: usize,
    cost: f64,
    /// Starts at the origin (with `from_heading` for Dubins).
    trajectory: Trajectory,
}

#[derive(Clone, Copy, Debug)]
struct LatticeEdge {
    from: NodeId,
    to: NodeId,
    template: u32,
    status: EdgeStatus,
}

impl LatticeEdge {
    fn cost(&self, templates: &[Template]) -> f64 {
        match self.status {
            EdgeStatus::Blocked => f64::INFINITY,
            EdgeStatus::Unknown | EdgeStatus::Valid => templates[self.template as usize].cost,
        }
    }
}

/// Lazily materialized lattice graph.
#[derive(Clone, Debug)]
pub struct LatticeGraph {
    steering: SteeringSpec,
    spacing: f64,
    angular_delta: f64,
    headings: usize,
    dim: usize,
    origin: [f64; 3],
    extent: [i64; 3],
    templates: Vec<Template>,
    by_from: Vec<Vec<u32>>,
    by_to: Vec<Vec<u32>>,
    nodes: Vec<[i64; 4]>,
    node_index: FxHashMap<[i64; 4], NodeId>,
    edges: Vec<LatticeEdge>,
    edge_index: FxHashMap<(NodeId, u32), EdgeId>,
    reference: State,
}

impl LatticeGraph {
    /// Builds the template set and an empty lattice. `reference` is the state
    /// the search heuristic measures from.
    pub fn new(spec: &GridSpec, steering: SteeringSpec, reference: State) -> Result<Self> {
        spec.validate(&steering)?;
        let dim = steering.system.dim();
        let g = spec.spacing;
        let dubins = steering.system == System::Dubins;
        let inflate = if dubins { 2.0 * steering.turning_radius } else { 0.0 };
        let mut origin = [0.0; 3];
        let mut extent = [0i64; 3];
        for i in 0..dim {
            origin[i] = spec.bounds.min[i] - inflate;
            let span = spec.bounds.max[i] + inflate - origin[i];
            extent[i] = (span / g + SNAP_TOLERANCE).floor() as i64;
        }
        let headings = if dubins { heading_count(spec.angular_delta) } else { 1 };
        let offsets = neighbor_offsets(dim, spec.connectivity);

        let mut templates = Vec::new();
        for &offset in &offsets {
            let d = [offset[0] as f64 * g, offset[1] as f64 * g, offset[2] as f64 * g];
            let length = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if !dubins {
                let from = if dim == 3 { State::r3(0.0, 0.0, 0.0) } else { State::r2(0.0, 0.0) };
                let trajectory = Trajectory::line(from, from.translated(d));
                templates.push(Template {
                    offset,
                    from_heading: 0,
                    to_heading: 0,
                    cost: trajectory.cost(),
                    trajectory,
                });
                continue;
            }
            for hf in 0..headings {
                for ht in 0..headings {
                    let a = State::se2(0.0, 0.0, hf as f64 * spec.angular_delta);
                    let b = State::se2(d[0], d[1], ht as f64 * spec.angular_delta);
                    let set = steering.steer_free(a, b);
                    let best = set.into_members().into_iter().next().expect("six-word family is never empty");
                    if best.cost() > spec.prune_factor * length {
                        continue;
                    }
                    templates.push(Template {
                        offset,
                        from_heading: hf,
                        to_heading: ht,
                        cost: best.cost(),
                        trajectory: best,
                    });
                }
            }
        }
        let mut by_from = vec![Vec::new(); headings];
        let mut by_to = vec![Vec::new(); headings];
        for (i, t) in templates.iter().enumerate() {
            by_from[t.from_heading].push(i as u32);
            by_to[t.to_heading].push(i as u32);
        }
        Ok(LatticeGraph {
            steering,
            spacing: g,
            angular_delta: spec.angular_delta,
            headings,
            dim,
            origin,
            extent,
            templates,
            by_from,
            by_to,
            nodes: Vec::new(),
            node_index: FxHashMap::default(),
            edges: Vec::new(),
            edge_index: FxHashMap::default(),
            reference,
        })
    }

    /// Distinct outgoing templates from a node with the given heading index.
    pub fn templates_from(&self, heading: usize) -> usize {
        self.by_from[heading].len()
    }

    /// Offsets (lattice units) available from a node with the given heading.
    pub fn offsets_from(&self, heading: usize) -> Vec<[i64; 3]> {
        self.by_from[heading]
            .iter()
            .map(|&t| self.templates[t as usize].offset)
            .collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn in_bounds(&self, k: &[i64; 4]) -> bool {
        (0..3).all(|i| k[i] >= 0 && k[i] <= self.extent[i])
    }

    /// Lattice coordinates of a state, or `None` when it is off the lattice.
    fn lattice_key(&self, s: &State) -> Option<[i64; 4]> {
        let p = s.position();
        let mut k = [0i64; 4];
        for i in 0..self.dim {
            let u = (p[i] - self.origin[i]) / self.spacing;
            let r = u.round();
            if (u - r).abs() > SNAP_TOLERANCE {
                return None;
            }
            k[i] = r as i64;
        }
        if let Some(h) = s.heading() {
            let u = h / self.angular_delta;
            let r = u.round();
            if (u - r).abs() > SNAP_TOLERANCE {
                return None;
            }
            k[3] = (r as i64).rem_euclid(self.headings as i64);
        }
        self.in_bounds(&k).then_some(k)
    }

    /// Node for a state on the lattice.
    pub fn snap(&mut self, s: &State, what: &'static str) -> Result<NodeId> {
        match self.lattice_key(s) {
            Some(k) => Ok(self.intern(k)),
            None => Err(Error::Snap { what, state: *s }),
        }
    }

    fn intern(&mut self, k: [i64; 4]) -> NodeId {
        if let Some(&id) = self.node_index.get(&k) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(k);
        self.node_index.insert(k, id);
        id
    }

    fn position(&self, k: &[i64; 4]) -> [f64; 3] {
        [
            self.origin[0] + k[0] as f64 * self.spacing,
            self.origin[1] + k[1] as f64 * self.spacing,
            self.origin[2] + k[2] as f64 * self.spacing,
        ]
    }

    pub fn state(&self, n: NodeId) -> State {
        let k = self.nodes[n as usize];
        let p = self.position(&k);
        match self.steering.system {
            System::Holonomic2d => State::r2(p[0], p[1]),
            System::Holonomic3d => State::r3(p[0], p[1], p[2]),
            System::Dubins => State::se2(p[0], p[1], (k[3] as f64 * self.angular_delta) % TAU),
        }
    }

    fn edge_for(&mut self, from: NodeId, to: NodeId, template: u32) -> EdgeId {
        if let Some(&e) = self.edge_index.get(&(from, template)) {
            return e;
        }
        let id = self.edges.len() as EdgeId;
        self.edges.push(LatticeEdge {
            from,
            to,
            template,
            status: EdgeStatus::Unknown,
        });
        self.edge_index.insert((from, template), id);
        id
    }

    pub fn edge_status(&self, e: EdgeId) -> EdgeStatus {
        self.edges[e as usize].status
    }

    pub fn edge_cost(&self, e: EdgeId) -> f64 {
        self.edges[e as usize].cost(&self.templates)
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        let edge = self.edges[e as usize];
        (edge.from, edge.to)
    }

    /// The edge's trajectory placed at its source node.
    pub fn edge_trajectory(&self, e: EdgeId) -> Trajectory {
        let edge = self.edges[e as usize];
        let t = &self.templates[edge.template as usize];
        t.trajectory.translated(self.position(&self.nodes[edge.from as usize]))
    }

    /// Sets an edge's status and returns its `(old, new)` effective cost.
    pub fn set_status(&mut self, e: EdgeId, status: EdgeStatus) -> (f64, f64) {
        let old = self.edge_cost(e);
        self.edges[e as usize].status = status;
        (old, self.edge_cost(e))
    }
}

impl SearchGraph for LatticeGraph {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn successors(&mut self, node: NodeId, out: &mut Vec<Link>) {
        let k = self.nodes[node as usize];
        for i in 0..self.by_from[k[3] as usize].len() {
            let ti = self.by_from[k[3] as usize][i];
            let t = &self.templates[ti as usize];
            let target = [
                k[0] + t.offset[0],
                k[1] + t.offset[1],
                k[2] + t.offset[2],
                t.to_heading as i64,
            ];
            if !self.in_bounds(&target) {
                continue;
            }
            let to = self.intern(target);
            let e = self.edge_for(node, to, ti);
            out.push(Link {
                edge: e,
                node: to,
                cost: self.edge_cost(e),
            });
        }
    }

    fn predecessors(&mut self, node: NodeId, out: &mut Vec<Link>) {
        let k = self.nodes[node as usize];
        for i in 0..self.by_to[k[3] as usize].len() {
            let ti = self.by_to[k[3] as usize][i];
            let t = &self.templates[ti as usize];
            let source = [
                k[0] - t.offset[0],
                k[1] - t.offset[1],
                k[2] - t.offset[2],
                t.from_heading as i64,
            ];
            if !self.in_bounds(&source) {
                continue;
            }
            let from = self.intern(source);
            let e = self.edge_for(from, node, ti);
            out.push(Link {
                edge: e,
                node: from,
                cost: self.edge_cost(e),
            });
        }
    }

    fn heuristic(&mut self, node: NodeId) -> f64 {
        self.steering.free_heuristic(self.reference, self.state(node))
    }
}

/// Plans on the lattice with the same lazy solve/check/block loop as the
/// sparse planner, against a private copy of the scenario's world.
pub fn plan_grid(scenario: &Scenario, spec: &GridSpec, max_iterations: usize) -> Result<PlanReport> {
    let mut world = scenario.world.clone();
    let mut run = GridRun::new(&mut world, scenario.start, scenario.goal, spec, scenario.spec.system, max_iterations)?;
    let outcome = run.run()?;
    Ok(PlanReport {
        outcome,
        stats: run.stats(),
        trace: run.trace,
    })
}

/// A single lattice planning run.
pub struct GridRun<'w> {
    world: &'w mut World,
    lattice: LatticeGraph,
    lpa: Lpa,
    start: State,
    max_iterations: usize,
    trace: Vec<IterationTrace>,
    edge_checks: usize,
    iterations: usize,
}

impl<'w> GridRun<'w> {
    pub fn new(
        world: &'w mut World,
        start: State,
        goal: State,
        spec: &GridSpec,
        steering: SteeringSpec,
        max_iterations: usize,
    ) -> Result<Self> {
        if max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        world.reset_sensed();
        let mut lattice = LatticeGraph::new(spec, steering, start)?;
        let s = lattice.snap(&start, "start")?;
        let g = lattice.snap(&goal, "goal")?;
        Ok(GridRun {
            world,
            lattice,
            lpa: Lpa::new(s, g),
            start,
            max_iterations,
            trace: Vec::new(),
            edge_checks: 0,
            iterations: 0,
        })
    }

    pub fn lattice(&self) -> &LatticeGraph {
        &self.lattice
    }

    pub fn trace(&self) -> &[IterationTrace] {
        &self.trace
    }

    pub fn stats(&self) -> PlanStats {
        PlanStats {
            nodes: self.lattice.node_count(),
            edges: self.lattice.edge_count(),
            edge_checks: self.edge_checks,
            iterations: self.iterations,
            area_sensed: self.world.sensed_area(),
        }
    }

    pub fn run(&mut self) -> Result<PlanOutcome> {
        if self.lpa.start() == self.lpa.goal() {
            self.iterations = 1;
            self.trace.push(IterationTrace {
                lower_bound: Some(0.0),
                edges_checked: 0,
            });
            return Ok(PlanOutcome::Solved {
                trajectory: Trajectory::zero(self.start),
                cost: 0.0,
            });
        }
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::IterationBudgetExceeded(self.max_iterations));
            }
            self.iterations += 1;
            let Some(path) = self.lpa.solve(&mut self.lattice) else {
                self.trace.push(IterationTrace {
                    lower_bound: None,
                    edges_checked: 0,
                });
                return Ok(PlanOutcome::Infeasible);
            };
            let mut checked = 0;
            let mut blocked = false;
            while let Selection::Check(e) = select_edge_to_check(&path, |e| self.lattice.edge_status(e)) {
                checked += 1;
                self.edge_checks += 1;
                let t = self.lattice.edge_trajectory(e);
                match self.world.check_trajectory(&t) {
                    Collision::Clear => {
                        self.lattice.set_status(e, EdgeStatus::Valid);
                    }
                    Collision::Hit { .. } => {
                        let (old, new) = self.lattice.set_status(e, EdgeStatus::Blocked);
                        let (from, to) = self.lattice.edge_endpoints(e);
                        self.lpa.edge_changed(&mut self.lattice, from, to, old, new);
                        blocked = true;
                        break;
                    }
                }
            }
            self.trace.push(IterationTrace {
                lower_bound: Some(path.cost),
                edges_checked: checked,
            });
            if !blocked {
                let trajectory = assemble(self.start, path.edges.iter().map(|&e| self.lattice.edge_trajectory(e)))?;
                return Ok(PlanOutcome::Solved {
                    cost: trajectory.cost(),
                    trajectory,
                });
            }
        }
    }
}
