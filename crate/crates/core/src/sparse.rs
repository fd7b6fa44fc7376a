//! Joint map and plan-graph construction.
//!
//! The planner starts from the single sub-problem `P(start, goal)`, solves the
//! current sparse graph, and checks the solution lazily from the start side.
//! A blocked edge discovers an obstacle: its boundary nodes join the graph and
//! the obstacle is pushed into the sub-problem that owned the edge, spawning
//! detour sub-problems through every boundary node.

use std::collections::{BTreeSet, VecDeque};

use rustc_hash::{FxHashMap, FxHashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeStatus, NodeId, PlanGraph};
use crate::scenario::{Scenario, ScenarioSpec};
use crate::search::{select_edge_to_check, update_edge, Lpa, PlanView, Selection};
use crate::state::State;
use crate::steering::{SteeringSpec, System};
use crate::trajectory::Trajectory;
use crate::world::{boundary_nodes, Collision, Obstacle, ObstacleId, World};

/// Sub-problems are keyed by their endpoint nodes.
pub type ProblemKey = (NodeId, NodeId);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    /// Boundary spacing δ.
    pub delta: f64,
    /// Heading spacing Δθ (Dubins only).
    pub angular_delta: f64,
    pub max_iterations: usize,
    /// Largest plan graph, in edges, before the run gives up.
    #[serde(default = "default_max_edges")]
    pub max_edges: usize,
    pub steering: SteeringSpec,
}

fn default_max_edges() -> usize {
    PlannerParams::DEFAULT_MAX_EDGES
}

/// Directed edge count of the complete graph over every boundary node the
/// scenario's obstacles can contribute, plus start and goal. The sparse loop
/// terminates within this many iterations.
pub fn size_bound(spec: &ScenarioSpec, delta: f64, angular_delta: f64) -> usize {
    let size = spec.obstacle_size;
    let probe = match spec.system.system.dim() {
        3 => Obstacle::cube(0, [0.0; 3], size),
        _ => Obstacle::segment(0, [0.0, 0.0], [size, 0.0]),
    };
    let per = boundary_nodes(&probe, delta, angular_delta, &spec.system).len();
    let n = per.saturating_mul(spec.obstacle_count).saturating_add(2);
    n.saturating_mul(n - 1)
}

impl PlannerParams {
    pub const DEFAULT_MAX_EDGES: usize = 4_000_000;

    /// Parameters taken from the scenario's own δ and Δθ. The iteration budget
    /// is the complete-graph size bound.
    pub fn for_scenario(spec: &ScenarioSpec) -> Self {
        PlannerParams {
            delta: spec.boundary_delta,
            angular_delta: spec.angular_delta,
            max_iterations: size_bound(spec, spec.boundary_delta, spec.angular_delta),
            max_edges: Self::DEFAULT_MAX_EDGES,
            steering: spec.system,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::invalid("delta", "must be positive"));
        }
        if self.steering.system == System::Dubins && !(self.angular_delta > 0.0) {
            return Err(Error::invalid("angular_delta", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        if self.max_edges == 0 {
            return Err(Error::invalid("max_edges", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubProblem {
    pub a: NodeId,
    pub b: NodeId,
    pub map: BTreeSet<ObstacleId>,
    pub parents: BTreeSet<ProblemKey>,
    pub children: BTreeSet<ProblemKey>,
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    problems: FxHashMap<ProblemKey, SubProblem>,
}

impl Registry {
    pub fn get(&self, key: ProblemKey) -> Option<&SubProblem> {
        self.problems.get(&key)
    }

    pub fn contains(&self, key: ProblemKey) -> bool {
        self.problems.contains_key(&key)
    }

    pub fn len(&self) -> usize {
        self.problems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SubProblem> {
        self.problems.values()
    }

    /// Checks link symmetry, the absence of self links, and that every child's
    /// map is a subset of its parent's map. Returns the first violation.
    pub fn audit(&self) -> std::result::Result<(), String> {
        for (&key, p) in &self.problems {
            if p.parents.contains(&key) || p.children.contains(&key) {
                return Err(format!("{key:?} links to itself"));
            }
            for c in &p.children {
                let Some(child) = self.problems.get(c) else {
                    return Err(format!("{key:?} has unknown child {c:?}"));
                };
                if !child.parents.contains(&key) {
                    return Err(format!("{c:?} does not list parent {key:?}"));
                }
                if let Some(o) = child.map.difference(&p.map).next() {
                    return Err(format!("obstacle {o} in child {c:?} but not in parent {key:?}"));
                }
            }
            for q in &p.parents {
                match self.problems.get(q) {
                    Some(parent) if parent.children.contains(&key) => {}
                    _ => return Err(format!("{q:?} does not list child {key:?}")),
                }
            }
        }
        Ok(())
    }
}

/// Counters shared by every planner run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStats {
    pub nodes: usize,
    pub edges: usize,
    pub edge_checks: usize,
    pub iterations: usize,
    pub area_sensed: usize,
}

/// One solve of the graph: its cost and how many edges were checked after it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    /// `None` when the graph had no finite path.
    pub lower_bound: Option<f64>,
    pub edges_checked: usize,
}

#[derive(Clone, Debug)]
pub enum PlanOutcome {
    Solved { trajectory: Trajectory, cost: f64 },
    Infeasible,
}

impl PlanOutcome {
    pub fn cost(&self) -> f64 {
        match self {
            PlanOutcome::Solved { cost, .. } => *cost,
            PlanOutcome::Infeasible => f64::INFINITY,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, PlanOutcome::Solved { .. })
    }
}

/// Concatenates the edge trajectories of a path.
pub(crate) fn assemble(start: State, trajectories: impl IntoIterator<Item = Trajectory>) -> Result<Trajectory> {
    let mut out: Option<Trajectory> = None;
    for t in trajectories {
        out = Some(match out {
            None => t,
            Some(acc) => acc.concatenate(&t)?,
        });
    }
    Ok(out.unwrap_or_else(|| Trajectory::zero(start)))
}

/// A single run of the sparse planner over one world.
pub struct SparsePlanner<'w> {
    params: PlannerParams,
    world: &'w mut World,
    graph: PlanGraph,
    registry: Registry,
    lpa: Lpa,
    origin: State,
    start: NodeId,
    goal: NodeId,
    boundary: FxHashMap<ObstacleId, Vec<NodeId>>,
    trace: Vec<IterationTrace>,
    edge_checks: usize,
    iterations: usize,
    audit: bool,
    audits: usize,
    audit_failures: Vec<String>,
}

impl<'w> SparsePlanner<'w> {
    /// Sets up the graph `{start, goal}` with the root sub-problem. The
    /// world's sensed grid is cleared so area accounting covers this run only.
    pub fn new(world: &'w mut World, start: State, goal: State, params: PlannerParams) -> Result<Self> {
        params.validate()?;
        world.reset_sensed();
        let mut graph = PlanGraph::new();
        let s = graph.add_node(start);
        let g = graph.add_node(goal);
        let mut planner = SparsePlanner {
            params,
            world,
            graph,
            registry: Registry::default(),
            lpa: Lpa::new(s, g),
            origin: start,
            start: s,
            goal: g,
            boundary: FxHashMap::default(),
            trace: Vec::new(),
            edge_checks: 0,
            iterations: 0,
            audit: false,
            audits: 0,
            audit_failures: Vec::new(),
        };
        if s != g {
            planner.add_problem(s, g);
        }
        Ok(planner)
    }

    /// Audits the registry after every top-level obstacle insertion.
    pub fn with_audit(mut self) -> Self {
        self.audit = true;
        self
    }

    pub fn graph(&self) -> &PlanGraph {
        &self.graph
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn start_node(&self) -> NodeId {
        self.start
    }

    pub fn goal_node(&self) -> NodeId {
        self.goal
    }

    pub fn trace(&self) -> &[IterationTrace] {
        &self.trace
    }

    /// Graph-solve cost at each iteration (`+∞` when no path existed).
    pub fn lower_bound_series(&self) -> Vec<f64> {
        self.trace
            .iter()
            .map(|t| t.lower_bound.unwrap_or(f64::INFINITY))
            .collect()
    }

    /// Number of registry audits run and the violations they found.
    pub fn audit_report(&self) -> (usize, &[String]) {
        (self.audits, &self.audit_failures)
    }

    /// Obstacles whose boundary nodes have been added to the graph.
    pub fn discovered(&self) -> BTreeSet<ObstacleId> {
        self.boundary.keys().copied().collect()
    }

    pub fn stats(&self) -> PlanStats {
        PlanStats {
            nodes: self.graph.node_count(),
            edges: self.graph.edge_count(),
            edge_checks: self.edge_checks,
            iterations: self.iterations,
            area_sensed: self.world.sensed_area(),
        }
    }

    /// Creates `P(a, b)` with an empty map and one edge per free-space
    /// trajectory. Returns `false` when the sub-problem already existed.
    pub fn add_problem(&mut self, a: NodeId, b: NodeId) -> bool {
        if self.registry.contains((a, b)) {
            return false;
        }
        self.registry.problems.insert(
            (a, b),
            SubProblem {
                a,
                b,
                ..SubProblem::default()
            },
        );
        let set = self
            .params
            .steering
            .steer_free(self.graph.node(a), self.graph.node(b));
        for t in set.into_members() {
            let cost = t.cost();
            self.graph.add_edge(a, b, t);
            let mut view = PlanView {
                graph: &self.graph,
                steering: self.params.steering,
                origin: self.origin,
            };
            self.lpa.edge_changed(&mut view, a, b, f64::INFINITY, cost);
        }
        true
    }

    /// Adds the boundary nodes of `o` to the graph once and returns them.
    pub fn ensure_boundary(&mut self, o: ObstacleId) -> Vec<NodeId> {
        if let Some(ids) = self.boundary.get(&o) {
            return ids.clone();
        }
        let states = boundary_nodes(
            self.world.obstacle(o),
            self.params.delta,
            self.params.angular_delta,
            &self.params.steering,
        );
        let mut ids: Vec<NodeId> = states.into_iter().map(|s| self.graph.add_node(s)).collect();
        let mut seen = FxHashSet::default();
        ids.retain(|id| seen.insert(*id));
        self.boundary.insert(o, ids.clone());
        ids
    }

    /// Inserts obstacle `o` into the map of `key` and restores the
    /// containment invariant: each new child's known obstacles and `o` itself
    /// flow up to every ancestor. Each `(problem, obstacle)` pair is processed
    /// at most once.
    pub fn add_obstacle(&mut self, key: ProblemKey, o: ObstacleId) {
        let mut work = VecDeque::from([(key, o)]);
        while let Some((k, o)) = work.pop_front() {
            let problem = self.registry.problems.get_mut(&k).expect("sub-problem exists");
            if !problem.map.insert(o) {
                continue;
            }
            let (a, b) = k;
            for x in self.ensure_boundary(o) {
                if x == a || x == b {
                    continue;
                }
                for child in [(a, x), (x, b)] {
                    self.add_problem(child.0, child.1);
                    let parent = self.registry.problems.get_mut(&k).expect("sub-problem exists");
                    if !parent.children.insert(child) {
                        continue;
                    }
                    let c = self.registry.problems.get_mut(&child).expect("child exists");
                    c.parents.insert(k);
                    work.extend(c.map.iter().map(|&l| (k, l)));
                }
            }
            let parents = &self.registry.problems[&k].parents;
            work.extend(parents.iter().map(|&p| (p, o)));
        }
        if self.audit {
            self.audits += 1;
            if let Err(e) = self.registry.audit() {
                self.audit_failures.push(e);
            }
        }
    }

    /// Runs the solve/check/grow loop to completion.
    pub fn run(&mut self) -> Result<PlanOutcome> {
        loop {
            if let Some(outcome) = self.step()? {
                return Ok(outcome);
            }
        }
    }

    /// One iteration: solve, then check the solution forward until an edge
    /// is blocked. Returns the outcome once the run is finished.
    pub fn step(&mut self) -> Result<Option<PlanOutcome>> {
        if self.start == self.goal {
            self.iterations = 1;
            self.trace.push(IterationTrace {
                lower_bound: Some(0.0),
                edges_checked: 0,
            });
            return Ok(Some(PlanOutcome::Solved {
                trajectory: Trajectory::zero(self.origin),
                cost: 0.0,
            }));
        }
        if self.iterations >= self.params.max_iterations {
            return Err(Error::IterationBudgetExceeded(self.params.max_iterations));
        }
        if self.graph.edge_count() > self.params.max_edges {
            return Err(Error::EdgeBudgetExceeded(self.params.max_edges));
        }
        self.iterations += 1;
        let mut view = PlanView {
            graph: &self.graph,
            steering: self.params.steering,
            origin: self.origin,
        };
        let Some(path) = self.lpa.solve(&mut view) else {
            self.trace.push(IterationTrace {
                lower_bound: None,
                edges_checked: 0,
            });
            return Ok(Some(PlanOutcome::Infeasible));
        };
        let mut checked = 0;
        let mut blocked = false;
        while let Selection::Check(e) = select_edge_to_check(&path, |e| self.graph.edge(e).status) {
            checked += 1;
            self.edge_checks += 1;
            match self.world.check_trajectory(&self.graph.edge(e).trajectory) {
                Collision::Clear => {
                    self.graph.set_status(e, EdgeStatus::Valid);
                }
                Collision::Hit { obstacle, .. } => {
                    update_edge(
                        &mut self.graph,
                        &mut self.lpa,
                        self.params.steering,
                        self.origin,
                        e,
                        EdgeStatus::Blocked,
                    );
                    self.ensure_boundary(obstacle);
                    let edge = self.graph.edge(e);
                    self.add_obstacle((edge.from, edge.to), obstacle);
                    blocked = true;
                    break;
                }
            }
        }
        self.trace.push(IterationTrace {
            lower_bound: Some(path.cost),
            edges_checked: checked,
        });
        if blocked {
            return Ok(None);
        }
        let trajectory = assemble(
            self.origin,
            path.edges.iter().map(|&e| self.graph.edge(e).trajectory.clone()),
        )?;
        Ok(Some(PlanOutcome::Solved {
            cost: trajectory.cost(),
            trajectory,
        }))
    }
}

/// Everything a finished run reports.
#[derive(Clone, Debug)]
pub struct PlanReport {
    pub outcome: PlanOutcome,
    pub stats: PlanStats,
    pub trace: Vec<IterationTrace>,
}

/// Plans on a private copy of the scenario's world.
pub fn plan(scenario: &Scenario, params: &PlannerParams) -> Result<PlanReport> {
    let mut world = scenario.world.clone();
    let mut planner = SparsePlanner::new(&mut world, scenario.start, scenario.goal, params.clone())?;
    let outcome = planner.run()?;
    Ok(PlanReport {
        outcome,
        stats: planner.stats(),
        trace: planner.trace().to_vec(),
    })
}
