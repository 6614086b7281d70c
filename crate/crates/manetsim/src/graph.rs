//! Points, distances, and unit-disk topology snapshots.
//!
//! A [`StaticGraph`] freezes the network at one instant: node `u` and
//! node `v` share an edge exactly when their Euclidean distance is less
//! than or equal to the shared transmission range. All edges have unit
//! weight.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Dense node identifier in `[0, node_count)`.
pub type NodeId = usize;

/// Normalized undirected edge: `(min endpoint, max endpoint)`.
pub type Edge = (NodeId, NodeId);

/// A position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance_squared(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_squared(other).sqrt()
    }
}

/// Normalize an undirected edge to `(min, max)` order.
pub fn edge(u: NodeId, v: NodeId) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Snapshot of the network topology at one instant.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct StaticGraph {
    time: f64,
    positions: Vec<Point>,
    range: f64,
    /// Per-node neighbor lists, sorted ascending by node id.
    neighbors: Vec<Vec<NodeId>>,
    /// Normalized edge set for O(log n) membership tests.
    edges: BTreeSet<Edge>,
}

impl StaticGraph {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, v: NodeId) -> Point {
        self.positions[v]
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains(&edge(u, v))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in ascending `(min, max)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }
}

/// Build the unit-disk snapshot for the given positions.
///
/// The comparison is `distance(u, v) <= range`, boundary inclusive, and
/// is evaluated on squared distances against `range * range` so the
/// boundary does not wobble with square-root rounding.
pub fn build_static_graph(time: f64, positions: &[Point], range: f64) -> Result<StaticGraph> {
    if !range.is_finite() || range <= 0.0 {
        return Err(Error::input(format!(
            "transmission range must be positive and finite, got {range}"
        )));
    }
    if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
        return Err(Error::input(format!("non-finite coordinates for node {i}")));
    }

    let n = positions.len();
    let range_sq = range * range;
    let mut neighbors = vec![Vec::new(); n];
    let mut edges = BTreeSet::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if positions[u].distance_squared(&positions[v]) <= range_sq {
                neighbors[u].push(v);
                neighbors[v].push(u);
                edges.insert((u, v));
            }
        }
    }
    // The double loop above pushes v ascending for u and u ascending for v,
    // so each list is already sorted.
    Ok(StaticGraph {
        time,
        positions: positions.to_vec(),
        range,
        neighbors,
        edges,
    })
}

/// True iff every edge of `tree_edges` is present in `graph`.
///
/// This is the structure-exists test of the least-overhead reuse policy:
/// a multicast tree stays in use exactly while all its edges are alive.
pub fn edges_alive<'a, I>(tree_edges: I, graph: &StaticGraph) -> bool
where
    I: IntoIterator<Item = &'a Edge>,
{
    tree_edges
        .into_iter()
        .all(|&(u, v)| graph.has_edge(u, v))
}
