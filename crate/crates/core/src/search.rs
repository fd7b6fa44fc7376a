//! Incremental shortest-path search (the lifelong-planning core of D* Lite)
//! plus the forward lazy edge selector.
//!
//! The search is rooted at the goal: `g`/`rhs` estimate cost-to-goal and the
//! heuristic estimates cost-from-start. Edge cost changes repair the search
//! state in place, so repeated solves after lazy collision checks only
//! re-expand what changed.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rustc_hash::FxHashSet;

use crate::graph::{EdgeId, EdgeStatus, NodeId, PlanGraph};
use crate::state::State;
use crate::steering::SteeringSpec;

/// One directed adjacency: the edge, the node at its far end, and its
/// current effective cost (`+∞` when blocked).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link {
    pub edge: EdgeId,
    pub node: NodeId,
    pub cost: f64,
}

/// Graph access needed by [`Lpa`]. Implementations may materialize nodes
/// lazily while enumerating neighbors; node ids must be dense.
pub trait SearchGraph {
    fn node_count(&self) -> usize;
    /// Outgoing links of `node` (towards the goal side).
    fn successors(&mut self, node: NodeId, out: &mut Vec<Link>);
    /// Incoming links of `node`; `Link::node` is the predecessor.
    fn predecessors(&mut self, node: NodeId, out: &mut Vec<Link>);
    /// Consistent lower bound on the cost from the search start to `node`.
    fn heuristic(&mut self, node: NodeId) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64, f64);

impl Key {
    fn cmp(&self, other: &Key) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.total_cmp(&other.1))
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    key: Key,
    node: NodeId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // ties on (k1, k2) fall back to node insertion order
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key).then(self.node.cmp(&other.node))
    }
}

/// An ordered list of edges from start to goal with its summed cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub edges: Vec<EdgeId>,
    pub cost: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    Check(EdgeId),
    AllValid,
}

/// Forward edge selector: the first still-unchecked edge from the start side.
pub fn select_edge_to_check(path: &Path, status: impl Fn(EdgeId) -> EdgeStatus) -> Selection {
    path.edges
        .iter()
        .copied()
        .find(|&e| status(e) == EdgeStatus::Unknown)
        .map_or(Selection::AllValid, Selection::Check)
}

/// Incremental search state.
#[derive(Clone, Debug)]
pub struct Lpa {
    start: NodeId,
    goal: NodeId,
    g: Vec<f64>,
    rhs: Vec<f64>,
    h: Vec<f64>,
    queued: Vec<Option<Key>>,
    open: BinaryHeap<Reverse<Entry>>,
    links: Vec<Link>,
    expansions: u64,
}

impl Lpa {
    pub fn new(start: NodeId, goal: NodeId) -> Self {
        let mut lpa = Lpa {
            start,
            goal,
            g: Vec::new(),
            rhs: Vec::new(),
            h: Vec::new(),
            queued: Vec::new(),
            open: BinaryHeap::new(),
            links: Vec::new(),
            expansions: 0,
        };
        lpa.ensure(start.max(goal) as usize + 1);
        lpa.rhs[goal as usize] = 0.0;
        // the goal's key only needs its heuristic, filled in on first compute
        lpa.queued[goal as usize] = None;
        lpa
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn goal(&self) -> NodeId {
        self.goal
    }

    /// Number of node expansions so far.
    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    pub fn g(&self, n: NodeId) -> f64 {
        self.g.get(n as usize).copied().unwrap_or(f64::INFINITY)
    }

    pub fn rhs(&self, n: NodeId) -> f64 {
        self.rhs.get(n as usize).copied().unwrap_or(f64::INFINITY)
    }

    /// Current best start-to-goal cost (valid after [`compute`](Self::compute)).
    pub fn cost(&self) -> f64 {
        self.rhs(self.start)
    }

    fn ensure(&mut self, n: usize) {
        if self.g.len() < n {
            self.g.resize(n, f64::INFINITY);
            self.rhs.resize(n, f64::INFINITY);
            self.h.resize(n, f64::NAN);
            self.queued.resize(n, None);
        }
    }

    fn heuristic(&mut self, graph: &mut impl SearchGraph, n: NodeId) -> f64 {
        let cached = self.h[n as usize];
        if !cached.is_nan() {
            return cached;
        }
        let h = graph.heuristic(n);
        self.h[n as usize] = h;
        h
    }

    fn key(&mut self, graph: &mut impl SearchGraph, n: NodeId) -> Key {
        let m = self.g[n as usize].min(self.rhs[n as usize]);
        Key(m + self.heuristic(graph, n), m)
    }

    fn update_vertex(&mut self, graph: &mut impl SearchGraph, n: NodeId) {
        let i = n as usize;
        if self.g[i] != self.rhs[i] {
            let key = self.key(graph, n);
            if self.queued[i] != Some(key) {
                self.queued[i] = Some(key);
                self.open.push(Reverse(Entry { key, node: n }));
            }
        } else {
            self.queued[i] = None;
        }
    }

    fn best_successor_cost(&mut self, graph: &mut impl SearchGraph, n: NodeId) -> f64 {
        if n == self.goal {
            return 0.0;
        }
        let mut links = std::mem::take(&mut self.links);
        links.clear();
        graph.successors(n, &mut links);
        self.ensure(graph.node_count());
        let best = links
            .iter()
            .map(|l| l.cost + self.g[l.node as usize])
            .fold(f64::INFINITY, f64::min);
        self.links = links;
        best
    }

    fn peek(&mut self) -> Option<Entry> {
        while let Some(Reverse(top)) = self.open.peek().copied() {
            if self.queued[top.node as usize] == Some(top.key) {
                return Some(top);
            }
            self.open.pop();
        }
        None
    }

    /// Repairs the search until the start is locally consistent and no queued
    /// node could improve it.
    pub fn compute(&mut self, graph: &mut impl SearchGraph) {
        self.run(graph, false);
    }

    /// Expands every inconsistent node; afterwards `g` is exact everywhere
    /// reachable.
    pub fn compute_exhaustive(&mut self, graph: &mut impl SearchGraph) {
        self.run(graph, true);
    }

    fn run(&mut self, graph: &mut impl SearchGraph, exhaustive: bool) {
        self.ensure(graph.node_count());
        let goal = self.goal;
        if self.g[goal as usize] != self.rhs[goal as usize] && self.queued[goal as usize].is_none() {
            self.update_vertex(graph, goal);
        }
        let mut links = Vec::new();
        loop {
            let Some(top) = self.peek() else { break };
            if !exhaustive {
                let start_key = self.key(graph, self.start);
                let s = self.start as usize;
                if top.key.cmp(&start_key) != Ordering::Less && self.rhs[s] == self.g[s] {
                    break;
                }
            }
            self.open.pop();
            let u = top.node;
            let ui = u as usize;
            self.queued[ui] = None;
            self.expansions += 1;

            links.clear();
            graph.predecessors(u, &mut links);
            self.ensure(graph.node_count());

            if self.g[ui] > self.rhs[ui] {
                self.g[ui] = self.rhs[ui];
                let gu = self.g[ui];
                for l in &links {
                    if l.node == goal {
                        continue;
                    }
                    let c = l.cost + gu;
                    if c < self.rhs[l.node as usize] {
                        self.rhs[l.node as usize] = c;
                        self.update_vertex(graph, l.node);
                    }
                }
            } else {
                let old = self.g[ui];
                self.g[ui] = f64::INFINITY;
                self.update_vertex(graph, u);
                for l in &links {
                    let p = l.node;
                    if p == goal {
                        continue;
                    }
                    if self.rhs[p as usize] == l.cost + old {
                        let best = self.best_successor_cost(graph, p);
                        self.rhs[p as usize] = best;
                        self.update_vertex(graph, p);
                    }
                }
            }
        }
    }

    /// Notifies the search that edge `from → to` changed effective cost
    /// (a newly inserted edge changes from `+∞`). Equal costs are a no-op.
    pub fn edge_changed(&mut self, graph: &mut impl SearchGraph, from: NodeId, to: NodeId, old: f64, new: f64) {
        if old == new {
            return;
        }
        self.ensure(graph.node_count());
        if from == self.goal {
            return;
        }
        let f = from as usize;
        let via = self.g[to as usize];
        if new < old {
            let c = new + via;
            if c < self.rhs[f] {
                self.rhs[f] = c;
                self.update_vertex(graph, from);
            }
        } else if self.rhs[f] == old + via {
            let best = self.best_successor_cost(graph, from);
            self.rhs[f] = best;
            self.update_vertex(graph, from);
        }
    }

    /// Computes and extracts the current shortest path, or `None` when the
    /// goal is unreachable under current edge costs.
    pub fn solve(&mut self, graph: &mut impl SearchGraph) -> Option<Path> {
        self.compute(graph);
        if !self.cost().is_finite() {
            return None;
        }
        if let Some(p) = self.extract(graph) {
            return Some(p);
        }
        self.compute_exhaustive(graph);
        self.extract(graph)
    }

    /// Follows the cheapest `cost + g` successor from the start; ties go to
    /// the first link enumerated.
    fn extract(&mut self, graph: &mut impl SearchGraph) -> Option<Path> {
        let mut visited = FxHashSet::default();
        let mut edges = Vec::new();
        let mut cost = 0.0;
        let mut cur = self.start;
        let mut links = Vec::new();
        while cur != self.goal {
            if !visited.insert(cur) {
                return None;
            }
            links.clear();
            graph.successors(cur, &mut links);
            self.ensure(graph.node_count());
            let mut best: Option<(f64, Link)> = None;
            for l in &links {
                let v = l.cost + self.g[l.node as usize];
                if v.is_finite() && best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, *l));
                }
            }
            let (_, link) = best?;
            edges.push(link.edge);
            cost += link.cost;
            cur = link.node;
        }
        Some(Path { edges, cost })
    }
}

/// Non-incremental reference: label-setting search from the goal over
/// predecessors. Returns the start-to-goal cost (`+∞` when unreachable).
pub fn reference_cost(graph: &mut impl SearchGraph, start: NodeId, goal: NodeId) -> f64 {
    let mut dist = vec![f64::INFINITY; graph.node_count().max(start.max(goal) as usize + 1)];
    let mut heap = BinaryHeap::new();
    dist[goal as usize] = 0.0;
    heap.push(Reverse(Entry {
        key: Key(0.0, 0.0),
        node: goal,
    }));
    let mut links = Vec::new();
    while let Some(Reverse(Entry { key, node })) = heap.pop() {
        if key.0 > dist[node as usize] {
            continue;
        }
        if node == start {
            break;
        }
        links.clear();
        graph.predecessors(node, &mut links);
        if dist.len() < graph.node_count() {
            dist.resize(graph.node_count(), f64::INFINITY);
        }
        for l in &links {
            let d = l.cost + key.0;
            if d < dist[l.node as usize] {
                dist[l.node as usize] = d;
                heap.push(Reverse(Entry {
                    key: Key(d, 0.0),
                    node: l.node,
                }));
            }
        }
    }
    dist[start as usize]
}

/// A plain weighted digraph with per-edge blocking, handy for tests and
/// benchmarks of the search engine.
#[derive(Clone, Debug, Default)]
pub struct AdjacencyGraph {
    nodes: usize,
    edges: Vec<(NodeId, NodeId, f64, bool)>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
    heuristic: Vec<f64>,
}

impl AdjacencyGraph {
    pub fn new(nodes: usize) -> Self {
        AdjacencyGraph {
            nodes,
            edges: Vec::new(),
            out: vec![Vec::new(); nodes],
            inc: vec![Vec::new(); nodes],
            heuristic: vec![0.0; nodes],
        }
    }

    pub fn add_edge(&mut self, from: NodeId, to: NodeId, cost: f64) -> EdgeId {
        let id = self.edges.len() as EdgeId;
        self.edges.push((from, to, cost, false));
        self.out[from as usize].push(id);
        self.inc[to as usize].push(id);
        id
    }

    pub fn set_heuristic(&mut self, h: Vec<f64>) {
        assert_eq!(h.len(), self.nodes);
        self.heuristic = h;
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        let (a, b, _, _) = self.edges[e as usize];
        (a, b)
    }

    pub fn cost(&self, e: EdgeId) -> f64 {
        let (_, _, c, blocked) = self.edges[e as usize];
        if blocked {
            f64::INFINITY
        } else {
            c
        }
    }

    /// Blocks or unblocks an edge, returning `(old, new)` effective cost.
    pub fn set_blocked(&mut self, e: EdgeId, blocked: bool) -> (f64, f64) {
        let old = self.cost(e);
        self.edges[e as usize].3 = blocked;
        (old, self.cost(e))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

impl SearchGraph for AdjacencyGraph {
    fn node_count(&self) -> usize {
        self.nodes
    }

    fn successors(&mut self, node: NodeId, out: &mut Vec<Link>) {
        out.extend(self.out[node as usize].iter().map(|&e| Link {
            edge: e,
            node: self.edges[e as usize].1,
            cost: self.cost(e),
        }));
    }

    fn predecessors(&mut self, node: NodeId, out: &mut Vec<Link>) {
        out.extend(self.inc[node as usize].iter().map(|&e| Link {
            edge: e,
            node: self.edges[e as usize].0,
            cost: self.cost(e),
        }));
    }

    fn heuristic(&mut self, node: NodeId) -> f64 {
        self.heuristic[node as usize]
    }
}

/// Search view of a [`PlanGraph`] with the free-space heuristic measured
/// from `origin`.
pub struct PlanView<'a> {
    pub graph: &'a PlanGraph,
    pub steering: SteeringSpec,
    pub origin: State,
}

impl SearchGraph for PlanView<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn successors(&mut self, node: NodeId, out: &mut Vec<Link>) {
        out.extend(self.graph.out_edges(node).iter().map(|&e| {
            let edge = self.graph.edge(e);
            Link {
                edge: e,
                node: edge.to,
                cost: edge.effective_cost(),
            }
        }));
    }

    fn predecessors(&mut self, node: NodeId, out: &mut Vec<Link>) {
        out.extend(self.graph.in_edges(node).iter().map(|&e| {
            let edge = self.graph.edge(e);
            Link {
                edge: e,
                node: edge.from,
                cost: edge.effective_cost(),
            }
        }));
    }

    fn heuristic(&mut self, node: NodeId) -> f64 {
        self.steering.free_heuristic(self.origin, self.graph.node(node))
    }
}

/// Changes an edge's status and repairs the search state accordingly.
pub fn update_edge(
    graph: &mut PlanGraph,
    lpa: &mut Lpa,
    steering: SteeringSpec,
    origin: State,
    edge: EdgeId,
    status: EdgeStatus,
) {
    let (old, new) = graph.set_status(edge, status);
    let (from, to) = {
        let e = graph.edge(edge);
        (e.from, e.to)
    };
    let mut view = PlanView {
        graph,
        steering,
        origin,
    };
    lpa.edge_changed(&mut view, from, to, old, new);
}
