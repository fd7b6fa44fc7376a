//! Brute-force ground truth for small scenarios: every boundary node of every
//! obstacle, every ordered node pair joined by every free-space trajectory,
//! each edge checked against the full map up front.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{EdgeStatus, NodeId, PlanGraph};
use crate::par;
use crate::scenario::Scenario;
use crate::steering::SteeringSpec;
use crate::world::{boundary_nodes, Collision};

/// Default node limit for [`build_complete_graph`].
pub const DEFAULT_NODE_LIMIT: usize = 2000;

/// One checked edge; trajectories are not retained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckedEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub cost: f64,
    pub status: EdgeStatus,
}

/// Fully checked complete graph. Node ids follow the order start, goal,
/// then boundary nodes obstacle by obstacle.
#[derive(Clone, Debug)]
pub struct CompleteGraph {
    pub nodes: PlanGraph,
    pub edges: Vec<CheckedEdge>,
    pub start: NodeId,
    pub goal: NodeId,
}

impl CompleteGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.node_count()
    }

    /// Number of ordered node pairs that received at least one edge.
    pub fn pair_count(&self) -> usize {
        let mut pairs: Vec<(NodeId, NodeId)> = self.edges.iter().map(|e| (e.from, e.to)).collect();
        pairs.dedup();
        pairs.len()
    }
}

/// Builds the complete graph over start, goal, and the boundary nodes of all
/// obstacles. `jobs > 1` checks edges on a thread pool when the `parallel`
/// feature is enabled; the result is identical either way.
pub fn build_complete_graph(
    scenario: &Scenario,
    delta: f64,
    angular_delta: f64,
    node_limit: usize,
    jobs: usize,
) -> Result<CompleteGraph> {
    let steering: SteeringSpec = scenario.spec.system;
    let mut nodes = PlanGraph::new();
    let start = nodes.add_node(scenario.start);
    let goal = nodes.add_node(scenario.goal);
    let mut guard = 2;
    for o in scenario.world.obstacles() {
        let b = boundary_nodes(o, delta, angular_delta, &steering);
        guard += b.len();
        if guard > node_limit {
            return Err(Error::SizeGuard {
                nodes: guard,
                limit: node_limit,
            });
        }
        for s in b {
            nodes.add_node(s);
        }
    }
    let n = nodes.node_count() as NodeId;
    let world = &scenario.world;
    let states = nodes.nodes();
    let per_source = par::map(jobs, (0..n).collect(), |a| {
        let mut out = Vec::new();
        for b in 0..n {
            if a == b {
                continue;
            }
            for t in steering.steer_free(states[a as usize], states[b as usize]).into_members() {
                let status = match world.first_hit(&t) {
                    Collision::Clear => EdgeStatus::Valid,
                    Collision::Hit { .. } => EdgeStatus::Blocked,
                };
                out.push(CheckedEdge {
                    from: a,
                    to: b,
                    cost: t.cost(),
                    status,
                });
            }
        }
        out
    });
    Ok(CompleteGraph {
        nodes,
        edges: per_source.into_iter().flatten().collect(),
        start,
        goal,
    })
}

/// Label-setting shortest path over the valid edges; `None` when the goal is
/// unreachable.
pub fn exact_solve(graph: &CompleteGraph) -> Option<f64> {
    let n = graph.node_count();
    let mut out: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); n];
    for e in &graph.edges {
        debug_assert_ne!(e.status, EdgeStatus::Unknown);
        if e.status == EdgeStatus::Valid {
            out[e.from as usize].push((e.to, e.cost));
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[graph.start as usize] = 0.0;
    heap.push(Reverse((Ordered(0.0), graph.start)));
    while let Some(Reverse((Ordered(d), u))) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        if u == graph.goal {
            return Some(d);
        }
        for &(v, c) in &out[u as usize] {
            let nd = d + c;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                heap.push(Reverse((Ordered(nd), v)));
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Ordered(f64);

impl Eq for Ordered {}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
