//! Multicast tree construction.
//!
//! Two benchmark algorithms over a [`StaticGraph`]:
//!
//! * [`min_hop_tree`]: breadth-first search from the source plus a
//!   traceback from every receiver, yielding a tree in which each
//!   source-receiver path has the minimum possible hop count.
//! * [`kou_steiner_tree`]: the classical metric-closure Steiner
//!   heuristic, approximating the tree with the fewest edges spanning
//!   the multicast group.
//!
//! Disconnection is a normal outcome (`None`), not an error: snapshots
//! where the group cannot be spanned are exactly what the connectivity
//! metric counts.
//!
//! Everything here is deterministic. Wherever the underlying algorithm
//! permits an arbitrary choice (BFS visit order, equal-weight spanning
//! tree edges, equal-length shortest paths), the tie is broken by
//! ascending node id / `(min endpoint, max endpoint)` edge order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{edge, Edge, NodeId, StaticGraph};

/// One source plus a non-empty ordered set of receivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastGroup {
    source: NodeId,
    receivers: Vec<NodeId>,
}

impl MulticastGroup {
    /// Validates: receivers non-empty and distinct, source not among
    /// them, all ids below `node_count`.
    pub fn new(source: NodeId, mut receivers: Vec<NodeId>, node_count: usize) -> Result<Self> {
        if receivers.is_empty() {
            return Err(Error::input("multicast group needs at least one receiver"));
        }
        receivers.sort_unstable();
        receivers.dedup();
        if receivers.contains(&source) {
            return Err(Error::input(format!(
                "source {source} cannot also be a receiver"
            )));
        }
        if source >= node_count || receivers.iter().any(|&r| r >= node_count) {
            return Err(Error::input(format!(
                "group ids must be < node_count ({node_count})"
            )));
        }
        Ok(MulticastGroup { source, receivers })
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn receivers(&self) -> &[NodeId] {
        &self.receivers
    }

    /// Source and receivers together, ascending. This is the terminal
    /// set the Steiner heuristic spans.
    pub fn terminals(&self) -> Vec<NodeId> {
        let mut t = self.receivers.clone();
        t.push(self.source);
        t.sort_unstable();
        t
    }

    pub fn max_id(&self) -> NodeId {
        self.source.max(*self.receivers.last().expect("non-empty"))
    }
}

/// Which objective a tree was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeKind {
    MinHop,
    MinEdge,
}

/// A source-rooted multicast tree: edge set plus the predecessor of
/// every non-source tree node on its unique path toward the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastTree {
    source: NodeId,
    kind: TreeKind,
    edges: BTreeSet<Edge>,
    predecessor: BTreeMap<NodeId, NodeId>,
}

impl MulticastTree {
    /// Build from an edge set, deriving predecessors by walking the tree
    /// from the source. Panics if the edges do not form a single tree
    /// containing the source — producers in this module guarantee that.
    fn from_edges(source: NodeId, kind: TreeKind, edges: BTreeSet<Edge>) -> Self {
        let mut adjacency: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for &(u, v) in &edges {
            adjacency.entry(u).or_default().push(v);
            adjacency.entry(v).or_default().push(u);
        }
        let mut predecessor = BTreeMap::new();
        let mut queue = VecDeque::from([source]);
        let mut seen = BTreeSet::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in adjacency.get(&u).into_iter().flatten() {
                if seen.insert(v) {
                    predecessor.insert(v, u);
                    queue.push_back(v);
                }
            }
        }
        assert_eq!(
            seen.len(),
            adjacency.len().max(1),
            "edge set is not connected from the source"
        );
        assert_eq!(edges.len() + 1, seen.len(), "edge set contains a cycle");
        MulticastTree {
            source,
            kind,
            edges,
            predecessor,
        }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v == self.source || self.predecessor.contains_key(&v)
    }

    pub fn predecessor(&self, v: NodeId) -> Option<NodeId> {
        self.predecessor.get(&v).copied()
    }

    /// Nodes of the tree, ascending.
    pub fn nodes(&self) -> BTreeSet<NodeId> {
        let mut n: BTreeSet<NodeId> = self.predecessor.keys().copied().collect();
        n.insert(self.source);
        n
    }

    /// True iff the tree contains the group's source and every receiver.
    pub fn spans(&self, group: &MulticastGroup) -> bool {
        group.source() == self.source && group.receivers().iter().all(|&r| self.contains(r))
    }
}

/// Output of a breadth-first search from a source node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsResult {
    /// Nodes in the order they were explored.
    pub visited: Vec<NodeId>,
    /// Predecessor of each visited node; `None` for the source and for
    /// unreached nodes.
    pub predecessor: Vec<Option<NodeId>>,
    /// Minimum hop count from the source; `None` if unreachable.
    pub distance: Vec<Option<u32>>,
}

impl BfsResult {
    pub fn reached(&self, v: NodeId) -> bool {
        self.distance[v].is_some()
    }

    /// The concrete shortest path `source .. v` realized by this search,
    /// or `None` if `v` was not reached.
    pub fn path_to(&self, v: NodeId) -> Option<Vec<NodeId>> {
        self.distance[v]?;
        let mut path = vec![v];
        let mut cur = v;
        while let Some(prev) = self.predecessor[cur] {
            path.push(prev);
            cur = prev;
        }
        path.reverse();
        Some(path)
    }
}

/// Breadth-first search with FIFO exploration and ascending-id neighbor
/// order. Distances are exact minimum hop counts.
pub fn bfs(graph: &StaticGraph, source: NodeId) -> Result<BfsResult> {
    let n = graph.node_count();
    if source >= n {
        return Err(Error::input(format!(
            "bfs source {source} >= node count {n}"
        )));
    }
    let mut predecessor = vec![None; n];
    let mut distance = vec![None; n];
    let mut visited = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    distance[source] = Some(0);
    visited.push(source);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if distance[v].is_none() {
                distance[v] = Some(distance[u].unwrap() + 1);
                predecessor[v] = Some(u);
                visited.push(v);
                queue.push_back(v);
            }
        }
    }
    Ok(BfsResult {
        visited,
        predecessor,
        distance,
    })
}

fn check_group(graph: &StaticGraph, group: &MulticastGroup) -> Result<()> {
    if group.max_id() >= graph.node_count() {
        return Err(Error::input(format!(
            "group ids exceed graph node count {}",
            graph.node_count()
        )));
    }
    Ok(())
}

/// Minimum-hop multicast tree: BFS from the source, then a traceback
/// from every receiver; the tree is the union of those shortest paths.
/// `None` when some receiver is unreachable at this snapshot.
pub fn min_hop_tree(graph: &StaticGraph, group: &MulticastGroup) -> Result<Option<MulticastTree>> {
    check_group(graph, group)?;
    let search = bfs(graph, group.source())?;
    if !group.receivers().iter().all(|&r| search.reached(r)) {
        return Ok(None);
    }
    let mut edges = BTreeSet::new();
    for &r in group.receivers() {
        let mut cur = r;
        while let Some(prev) = search.predecessor[cur] {
            // Paths shared by several receivers merge here.
            if !edges.insert(edge(cur, prev)) {
                break;
            }
            cur = prev;
        }
    }
    Ok(Some(MulticastTree::from_edges(
        group.source(),
        TreeKind::MinHop,
        edges,
    )))
}

/// Whether the spanning-tree and pruning passes of the Steiner heuristic
/// actually changed anything. On unit-disk snapshots the path union of
/// step 3 is expected to already be the final tree; these flags test
/// that expectation instead of assuming it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SteinerAudit {
    /// Step 4 (unit-weight MST over the path union) removed a cycle.
    pub mst_changed: bool,
    /// Step 5 (iterative pruning of non-terminal leaves) removed edges.
    pub pruning_changed: bool,
}

/// Minimum-edge multicast tree via the metric-closure Steiner heuristic.
///
/// 1. Complete graph over the terminals, weighted by shortest-path hop
///    counts (per-terminal BFS).
/// 2. Minimum spanning tree of that closure (Kruskal, ties by ascending
///    `(weight, min endpoint, max endpoint)`).
/// 3. Replace each closure edge by the concrete shortest path recorded
///    by the BFS rooted at its smaller endpoint.
/// 4. Unit-weight MST over the resulting subgraph.
/// 5. Iteratively prune non-terminal leaves.
///
/// Returns the tree plus an audit of whether steps 4–5 had any effect.
/// `None` when the group does not lie in one component.
pub fn kou_steiner_tree(
    graph: &StaticGraph,
    group: &MulticastGroup,
) -> Result<Option<(MulticastTree, SteinerAudit)>> {
    check_group(graph, group)?;
    let terminals = group.terminals();

    // Step 1: metric closure over the terminals.
    let searches: BTreeMap<NodeId, BfsResult> = terminals
        .iter()
        .map(|&t| Ok((t, bfs(graph, t)?)))
        .collect::<Result<_>>()?;
    let root_search = &searches[&terminals[0]];
    if !terminals.iter().all(|&t| root_search.reached(t)) {
        return Ok(None);
    }
    let mut closure: Vec<(u32, NodeId, NodeId)> = Vec::new();
    for (i, &a) in terminals.iter().enumerate() {
        for &b in &terminals[i + 1..] {
            let w = searches[&a].distance[b].expect("terminals are mutually reachable");
            closure.push((w, a, b));
        }
    }

    // Step 2: MST of the closure.
    closure.sort_unstable();
    let closure_mst = kruskal(&terminals, &closure);

    // Step 3: expand each closure edge into its recorded shortest path.
    let mut subgraph: BTreeSet<Edge> = BTreeSet::new();
    for (a, b) in closure_mst {
        let path = searches[&a].path_to(b).expect("closure edge has a path");
        for pair in path.windows(2) {
            subgraph.insert(edge(pair[0], pair[1]));
        }
    }

    // Step 4: unit-weight MST over the expanded subgraph.
    let sub_nodes: Vec<NodeId> = {
        let mut s = BTreeSet::new();
        for &(u, v) in &subgraph {
            s.insert(u);
            s.insert(v);
        }
        s.into_iter().collect()
    };
    let unit_edges: Vec<(u32, NodeId, NodeId)> =
        subgraph.iter().map(|&(u, v)| (1, u, v)).collect();
    let mst: BTreeSet<Edge> = kruskal(&sub_nodes, &unit_edges).into_iter().collect();
    let mst_changed = mst.len() != subgraph.len();

    // Step 5: drop non-terminal leaves until none remain.
    let mst_edge_count = mst.len();
    let terminal_set: BTreeSet<NodeId> = terminals.iter().copied().collect();
    let pruned = prune_leaves(mst, &terminal_set);
    let pruning_changed = pruned.len() != mst_edge_count;

    let tree = MulticastTree::from_edges(group.source(), TreeKind::MinEdge, pruned);
    debug_assert!(tree.spans(group));
    Ok(Some((
        tree,
        SteinerAudit {
            mst_changed,
            pruning_changed,
        },
    )))
}

/// Kruskal over pre-sorted `(weight, u, v)` edges; vertex ids arbitrary.
fn kruskal(vertices: &[NodeId], sorted_edges: &[(u32, NodeId, NodeId)]) -> Vec<(NodeId, NodeId)> {
    let index: BTreeMap<NodeId, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut dsu = DisjointSets::new(vertices.len());
    let mut chosen = Vec::with_capacity(vertices.len().saturating_sub(1));
    for &(_, u, v) in sorted_edges {
        if dsu.union(index[&u], index[&v]) {
            chosen.push((u, v));
            if chosen.len() + 1 == vertices.len() {
                break;
            }
        }
    }
    chosen
}

/// Iteratively remove degree-1 nodes that are not terminals.
fn prune_leaves(mut edges: BTreeSet<Edge>, terminals: &BTreeSet<NodeId>) -> BTreeSet<Edge> {
    loop {
        let mut degree: BTreeMap<NodeId, usize> = BTreeMap::new();
        for &(u, v) in &edges {
            *degree.entry(u).or_default() += 1;
            *degree.entry(v).or_default() += 1;
        }
        let doomed: BTreeSet<NodeId> = degree
            .iter()
            .filter(|(v, &d)| d == 1 && !terminals.contains(*v))
            .map(|(&v, _)| v)
            .collect();
        if doomed.is_empty() {
            return edges;
        }
        edges.retain(|&(u, v)| !doomed.contains(&u) && !doomed.contains(&v));
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Exact minimum-edge Steiner cost by exhaustive enumeration, for
/// instances of at most 12 vertices.
///
/// Minimizes `|S| - 1` over all Steiner-vertex subsets `S ⊇ terminals`
/// whose induced subgraph is connected; a connected induced subgraph on
/// `k` vertices always admits a spanning tree of `k - 1` edges. Uses its
/// own stack-based traversal, independent of [`bfs`]. `None` when no
/// subset connects the group.
pub fn exact_steiner_oracle(graph: &StaticGraph, group: &MulticastGroup) -> Result<Option<usize>> {
    check_group(graph, group)?;
    let n = graph.node_count();
    if n > 12 {
        return Err(Error::input(format!(
            "exact oracle refuses instances with {n} > 12 vertices"
        )));
    }
    let terminals = group.terminals();
    let others: Vec<NodeId> = (0..n).filter(|v| !terminals.contains(v)).collect();
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << others.len()) {
        let mut vertex_set: Vec<NodeId> = terminals.clone();
        for (bit, &v) in others.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                vertex_set.push(v);
            }
        }
        let cost = vertex_set.len() - 1;
        if best.is_some_and(|b| cost >= b) {
            continue;
        }
        if induced_connected(graph, &vertex_set) {
            best = Some(cost);
        }
    }
    Ok(best)
}

/// Depth-first connectivity of the subgraph induced by `vertex_set`.
fn induced_connected(graph: &StaticGraph, vertex_set: &[NodeId]) -> bool {
    let members: BTreeSet<NodeId> = vertex_set.iter().copied().collect();
    let mut seen = BTreeSet::from([vertex_set[0]]);
    let mut stack = vec![vertex_set[0]];
    while let Some(u) = stack.pop() {
        for &v in graph.neighbors(u) {
            if members.contains(&v) && seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen.len() == members.len()
}

/// Hop count along the unique tree path from the source to each
/// receiver. Errors if the tree does not span the group.
pub fn tree_hop_counts(
    tree: &MulticastTree,
    group: &MulticastGroup,
) -> Result<BTreeMap<NodeId, u32>> {
    let mut hops = BTreeMap::new();
    for &r in group.receivers() {
        if !tree.contains(r) {
            return Err(Error::input(format!(
                "receiver {r} is not in the multicast tree"
            )));
        }
        let mut count = 0u32;
        let mut cur = r;
        while let Some(prev) = tree.predecessor(cur) {
            count += 1;
            cur = prev;
        }
        debug_assert_eq!(cur, tree.source());
        hops.insert(r, count);
    }
    Ok(hops)
}
