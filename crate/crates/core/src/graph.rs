//! Explicit plan graph: states as nodes, free-space trajectories as
//! (possibly parallel) edges with lazy validation status.

use rustc_hash::FxHashMap;

use serde::{Deserialize, Serialize};

use crate::state::{State, StateKey};
use crate::trajectory::Trajectory;

pub type NodeId = u32;
pub type EdgeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeStatus {
    Unknown,
    Valid,
    Blocked,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub trajectory: Trajectory,
    pub status: EdgeStatus,
}

impl Edge {
    /// Cost assumed before checking; the trajectory's length.
    pub fn optimistic_cost(&self) -> f64 {
        self.trajectory.cost()
    }

    /// `+∞` once blocked, otherwise the optimistic cost.
    pub fn effective_cost(&self) -> f64 {
        match self.status {
            EdgeStatus::Blocked => f64::INFINITY,
            EdgeStatus::Unknown | EdgeStatus::Valid => self.optimistic_cost(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct PlanGraph {
    nodes: Vec<State>,
    index: FxHashMap<StateKey, NodeId>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl PlanGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a node, returning the existing id when an identical state
    /// (under the coordinate quantum) is already present.
    pub fn add_node(&mut self, state: State) -> NodeId {
        let key = state.key();
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(state);
        self.index.insert(key, id);
        self.out_edges.push(Vec::new());
        self.in_edges.push(Vec::new());
        id
    }

    pub fn find(&self, state: &State) -> Option<NodeId> {
        self.index.get(&state.key()).copied()
    }

    pub fn add_edge(&mut self, from: NodeId, to: NodeId, trajectory: Trajectory) -> EdgeId {
        debug_assert!(trajectory.start().approx_eq(&self.nodes[from as usize], 1e-6));
        debug_assert!(trajectory.end().approx_eq(&self.nodes[to as usize], 1e-6));
        let id = self.edges.len() as EdgeId;
        self.edges.push(Edge {
            from,
            to,
            trajectory,
            status: EdgeStatus::Unknown,
        });
        self.out_edges[from as usize].push(id);
        self.in_edges[to as usize].push(id);
        id
    }

    pub fn node(&self, id: NodeId) -> State {
        self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[State] {
        &self.nodes
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.out_edges[node as usize]
    }

    pub fn in_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.in_edges[node as usize]
    }

    /// Parallel edges from `a` to `b`.
    pub fn edges_between(&self, a: NodeId, b: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        self.out_edges[a as usize]
            .iter()
            .copied()
            .filter(move |&e| self.edges[e as usize].to == b)
    }

    /// Sets an edge's status and returns its `(old, new)` effective cost.
    pub fn set_status(&mut self, edge: EdgeId, status: EdgeStatus) -> (f64, f64) {
        let e = &mut self.edges[edge as usize];
        let old = e.effective_cost();
        e.status = status;
        (old, e.effective_cost())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}
