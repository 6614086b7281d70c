//! Multicast session simulation.
//!
//! A session walks snapshot instants `0, Δt, 2Δt, …` (the end time is
//! excluded) over a set of mobility traces. At each instant it rebuilds
//! the unit-disk snapshot and applies the least-overhead reuse policy:
//! the current tree stays in use while every one of its edges is alive;
//! the moment an edge dies the tree is discarded and a fresh one is
//! computed on the same snapshot. An instant is *connected* when a tree
//! spans the group there, and the metric accumulators only advance on
//! connected instants.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_static_graph, edges_alive, NodeId, Point, StaticGraph};
use crate::mobility::NodeTrace;
use crate::trees::{
    kou_steiner_tree, min_hop_tree, tree_hop_counts, MulticastGroup, MulticastTree, SteinerAudit,
};

/// Which tree construction a session runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    MinHop,
    MinEdge,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::MinHop, Algorithm::MinEdge];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::MinHop => "min_hop",
            Algorithm::MinEdge => "min_edge",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min_hop" | "min-hop" => Ok(Algorithm::MinHop),
            "min_edge" | "min-edge" => Ok(Algorithm::MinEdge),
            other => Err(Error::input(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of one multicast session.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    /// Snapshot interval Δt, seconds.
    pub snapshot_interval: f64,
    /// Session length; must be a whole number of intervals.
    pub duration: f64,
    pub algorithm: Algorithm,
    pub group: MulticastGroup,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.snapshot_interval.is_finite() || self.snapshot_interval <= 0.0 {
            return Err(Error::input("snapshot_interval must be > 0"));
        }
        if !self.duration.is_finite() || self.duration <= 0.0 {
            return Err(Error::input("duration must be > 0"));
        }
        let instants = self.duration / self.snapshot_interval;
        if (instants - instants.round()).abs() > 1e-6 || instants.round() < 1.0 {
            return Err(Error::input(format!(
                "duration {} is not a positive multiple of snapshot interval {}",
                self.duration, self.snapshot_interval
            )));
        }
        Ok(())
    }

    /// Number of snapshot instants: `t = 0` included, `t = duration`
    /// excluded.
    pub fn total_instants(&self) -> u64 {
        (self.duration / self.snapshot_interval).round() as u64
    }
}

/// Accumulated results of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionMetrics {
    pub connected_instants: u64,
    pub total_instants: u64,
    /// Seconds each discovered tree stayed in use, in discovery order.
    pub tree_lifetimes: Vec<f64>,
    /// Σ (edge count of the in-use tree × Δt) over connected instants.
    pub edge_time_product: f64,
    /// Per receiver: Σ (hop count in the in-use tree × Δt).
    pub hop_time_product: BTreeMap<NodeId, f64>,
    pub connected_time: f64,
    pub discovery_count: u64,
    /// Snapshots whose fresh Steiner computation saw step 4 change the
    /// path union (min-edge sessions only).
    pub steiner_mst_changes: u64,
    /// Same for the step-5 pruning pass.
    pub steiner_prune_changes: u64,
}

impl SessionMetrics {
    fn new(total_instants: u64, group: &MulticastGroup) -> Self {
        SessionMetrics {
            connected_instants: 0,
            total_instants,
            tree_lifetimes: Vec::new(),
            edge_time_product: 0.0,
            hop_time_product: group.receivers().iter().map(|&r| (r, 0.0)).collect(),
            connected_time: 0.0,
            discovery_count: 0,
            steiner_mst_changes: 0,
            steiner_prune_changes: 0,
        }
    }

    /// Percentage of instants at which a multicast tree existed.
    pub fn connectivity_percent(&self) -> f64 {
        assert!(self.total_instants > 0, "empty session");
        100.0 * self.connected_instants as f64 / self.total_instants as f64
    }

    /// Mean time between successive tree discoveries; `None` if the
    /// group was never connected.
    pub fn mean_tree_lifetime(&self) -> Option<f64> {
        if self.tree_lifetimes.is_empty() {
            return None;
        }
        Some(self.tree_lifetimes.iter().sum::<f64>() / self.tree_lifetimes.len() as f64)
    }

    /// Number of tree edges, time-averaged over connected operation.
    pub fn time_averaged_edges(&self) -> Option<f64> {
        if self.connected_time > 0.0 {
            Some(self.edge_time_product / self.connected_time)
        } else {
            None
        }
    }

    /// Hop count per source-receiver path, time-averaged over connected
    /// operation and then averaged over the receivers.
    pub fn time_averaged_hops(&self) -> Option<f64> {
        if self.connected_time <= 0.0 {
            return None;
        }
        let per_receiver: f64 = self
            .hop_time_product
            .values()
            .map(|p| p / self.connected_time)
            .sum();
        Some(per_receiver / self.hop_time_product.len() as f64)
    }
}

/// Build the unit-disk snapshot of the traced nodes at time `t`.
pub fn snapshot_graph(traces: &[NodeTrace], range: f64, t: f64) -> Result<StaticGraph> {
    let positions: Vec<Point> = traces
        .iter()
        .map(|trace| trace.position_at(t))
        .collect::<Result<_>>()?;
    build_static_graph(t, &positions, range)
}

fn check_traces(traces: &[NodeTrace], config_duration: f64, group: &MulticastGroup) -> Result<()> {
    if traces.is_empty() {
        return Err(Error::input("no traces supplied"));
    }
    for (i, trace) in traces.iter().enumerate() {
        if trace.node_id != i {
            return Err(Error::input(format!(
                "traces must be ordered by node id; slot {i} holds node {}",
                trace.node_id
            )));
        }
        if trace.duration + 1e-9 < config_duration {
            return Err(Error::input(format!(
                "trace of node {i} covers {} s < session duration {} s",
                trace.duration, config_duration
            )));
        }
    }
    if group.max_id() >= traces.len() {
        return Err(Error::input(format!(
            "group ids exceed trace count {}",
            traces.len()
        )));
    }
    Ok(())
}

struct ActiveTree {
    tree: MulticastTree,
    hops: BTreeMap<NodeId, u32>,
    installed_at: u64,
}

fn compute_tree(
    algorithm: Algorithm,
    graph: &StaticGraph,
    group: &MulticastGroup,
) -> Result<Option<(MulticastTree, SteinerAudit)>> {
    match algorithm {
        Algorithm::MinHop => {
            Ok(min_hop_tree(graph, group)?.map(|t| (t, SteinerAudit::default())))
        }
        Algorithm::MinEdge => kou_steiner_tree(graph, group),
    }
}

/// Run one multicast session over the traces and accumulate the four
/// session metrics. Deterministic in its inputs.
pub fn run_session(
    traces: &[NodeTrace],
    range: f64,
    config: &SessionConfig,
) -> Result<SessionMetrics> {
    config.validate()?;
    check_traces(traces, config.duration, &config.group)?;

    let dt = config.snapshot_interval;
    let total = config.total_instants();
    let mut metrics = SessionMetrics::new(total, &config.group);
    let mut active: Option<ActiveTree> = None;

    for instant in 0..total {
        let t = instant as f64 * dt;
        let graph = snapshot_graph(traces, range, t)?;

        // Reuse: the current tree survives iff all its edges are alive.
        if let Some(current) = &active {
            if !edges_alive(current.tree.edges(), &graph) {
                metrics
                    .tree_lifetimes
                    .push((instant - current.installed_at) as f64 * dt);
                active = None;
            }
        }

        // (Re)discover on the same snapshot if required.
        if active.is_none() {
            if let Some((tree, audit)) = compute_tree(config.algorithm, &graph, &config.group)? {
                metrics.discovery_count += 1;
                metrics.steiner_mst_changes += u64::from(audit.mst_changed);
                metrics.steiner_prune_changes += u64::from(audit.pruning_changed);
                let hops = tree_hop_counts(&tree, &config.group)?;
                active = Some(ActiveTree {
                    tree,
                    hops,
                    installed_at: instant,
                });
            }
        }

        if let Some(current) = &active {
            metrics.connected_instants += 1;
            metrics.edge_time_product += current.tree.edge_count() as f64 * dt;
            for (&r, &h) in &current.hops {
                *metrics.hop_time_product.get_mut(&r).expect("receiver slot") +=
                    f64::from(h) * dt;
            }
        }
    }

    if let Some(current) = active.take() {
        metrics
            .tree_lifetimes
            .push((total - current.installed_at) as f64 * dt);
    }
    metrics.connected_time = metrics.connected_instants as f64 * dt;
    debug_assert_eq!(metrics.discovery_count, metrics.tree_lifetimes.len() as u64);
    Ok(metrics)
}

/// Results of the per-snapshot diagnostic that recomputes both trees at
/// every instant (the optimum-per-instant regime, as opposed to the
/// reuse policy of [`run_session`]).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairedSnapshotStats {
    /// Snapshots where the group was connectable (both trees exist).
    pub snapshots_compared: u64,
    pub snapshots_total: u64,
    /// Instants where the min-edge tree had more edges than min-hop.
    pub edge_dominance_violations: u64,
    /// Instants where some receiver's min-hop path exceeded its
    /// min-edge path in hops.
    pub hop_dominance_violations: u64,
    pub steiner_mst_changes: u64,
    pub steiner_prune_changes: u64,
}

/// Recompute both trees on every snapshot and compare them.
pub fn paired_diagnostic(
    traces: &[NodeTrace],
    range: f64,
    group: &MulticastGroup,
    snapshot_interval: f64,
    duration: f64,
) -> Result<PairedSnapshotStats> {
    let probe = SessionConfig {
        snapshot_interval,
        duration,
        algorithm: Algorithm::MinHop,
        group: group.clone(),
    };
    probe.validate()?;
    check_traces(traces, duration, group)?;

    let mut stats = PairedSnapshotStats {
        snapshots_total: probe.total_instants(),
        ..Default::default()
    };
    for instant in 0..probe.total_instants() {
        let t = instant as f64 * snapshot_interval;
        let graph = snapshot_graph(traces, range, t)?;
        let min_hop = min_hop_tree(&graph, group)?;
        let min_edge = kou_steiner_tree(&graph, group)?;
        let (Some(mh), Some((me, audit))) = (min_hop, min_edge) else {
            continue;
        };
        stats.snapshots_compared += 1;
        stats.steiner_mst_changes += u64::from(audit.mst_changed);
        stats.steiner_prune_changes += u64::from(audit.pruning_changed);
        if me.edge_count() > mh.edge_count() {
            stats.edge_dominance_violations += 1;
        }
        let mh_hops = tree_hop_counts(&mh, group)?;
        let me_hops = tree_hop_counts(&me, group)?;
        if group.receivers().iter().any(|r| mh_hops[r] > me_hops[r]) {
            stats.hop_dominance_violations += 1;
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Point;
    use crate::mobility::Waypoint;

    /// A node that never moves.
    fn parked(node_id: NodeId, x: f64, y: f64, duration: f64) -> NodeTrace {
        NodeTrace {
            node_id,
            duration,
            waypoints: vec![Waypoint::new(0.0, Point::new(x, y), Point::new(x, y), 0.0)],
        }
    }

    fn static_session(algorithm: Algorithm) -> (Vec<NodeTrace>, SessionConfig) {
        let duration = 10.0;
        let traces = vec![
            parked(0, 0.0, 0.0, duration),
            parked(1, 200.0, 0.0, duration),
            parked(2, 400.0, 0.0, duration),
        ];
        let group = MulticastGroup::new(0, vec![2], 3).unwrap();
        let config = SessionConfig {
            snapshot_interval: 0.25,
            duration,
            algorithm,
            group,
        };
        (traces, config)
    }

    #[test]
    fn static_connectable_session_is_one_discovery() {
        for algorithm in Algorithm::ALL {
            let (traces, config) = static_session(algorithm);
            let m = run_session(&traces, 250.0, &config).unwrap();
            assert_eq!(m.discovery_count, 1);
            assert_eq!(m.tree_lifetimes, vec![10.0]);
            assert_eq!(m.connectivity_percent(), 100.0);
            assert_eq!(m.mean_tree_lifetime(), Some(10.0));
            assert_eq!(m.time_averaged_edges(), Some(2.0));
            assert_eq!(m.time_averaged_hops(), Some(2.0));
            assert_eq!(m.connected_time, 10.0);
        }
    }

    #[test]
    fn never_connectable_session_has_no_discoveries() {
        let duration = 10.0;
        let traces = vec![
            parked(0, 0.0, 0.0, duration),
            parked(1, 900.0, 900.0, duration), // isolated receiver
        ];
        let group = MulticastGroup::new(0, vec![1], 2).unwrap();
        let config = SessionConfig {
            snapshot_interval: 0.25,
            duration,
            algorithm: Algorithm::MinHop,
            group,
        };
        let m = run_session(&traces, 250.0, &config).unwrap();
        assert_eq!(m.discovery_count, 0);
        assert_eq!(m.connectivity_percent(), 0.0);
        assert!(m.tree_lifetimes.is_empty());
        assert_eq!(m.mean_tree_lifetime(), None);
        assert_eq!(m.time_averaged_edges(), None);
        assert_eq!(m.time_averaged_hops(), None);
    }

    #[test]
    fn metric_ratios_from_counts() {
        let group = MulticastGroup::new(0, vec![1], 2).unwrap();
        let mut m = SessionMetrics::new(4000, &group);
        assert_eq!(m.connectivity_percent(), 0.0);
        m.connected_instants = 4000;
        assert_eq!(m.connectivity_percent(), 100.0);
        m.connected_instants = 2500;
        assert_eq!(m.connectivity_percent(), 62.5);

        m.tree_lifetimes = vec![10.0];
        assert_eq!(m.mean_tree_lifetime(), Some(10.0));
        m.tree_lifetimes = vec![3.0, 6.0];
        assert_eq!(m.mean_tree_lifetime(), Some(4.5));
    }

    /// The worked two-tree example: a 10-edge tree in use for 3 s, then
    /// a 15-edge tree for 6 s, gives (10·3 + 15·6)/(3 + 6) = 13.3….
    #[test]
    fn two_tree_fixture_reproduces_worked_average() {
        let (traces, group) = two_tree_fixture();
        let config = SessionConfig {
            snapshot_interval: 0.25,
            duration: 9.0,
            algorithm: Algorithm::MinHop,
            group,
        };
        let m = run_session(&traces, 10.0, &config).unwrap();
        assert_eq!(m.tree_lifetimes, vec![3.0, 6.0], "break at t = 3 s");
        assert_eq!(m.mean_tree_lifetime(), Some(4.5));
        assert_eq!(m.time_averaged_edges(), Some((10.0 * 3.0 + 15.0 * 6.0) / 9.0));
        assert_eq!(m.connectivity_percent(), 100.0);
    }

    /// Two disjoint source→receiver chains: a 10-edge chain along y = 0
    /// whose middle node drifts out of range shortly before t = 3 s, and
    /// a static 15-edge detour. Transmission range 10 m.
    pub(crate) fn two_tree_fixture() -> (Vec<NodeTrace>, MulticastGroup) {
        let duration = 9.0;
        let mut traces = Vec::new();
        let mut id = 0;
        // Chain A: source 0 at (0,0), intermediates at 9 m spacing,
        // receiver at (90,0). Node a5 (id 5, at x=45) drifts east at
        // 0.35 m/s: its 9 m gap to a4 exceeds 10 m strictly after
        // t = 2.857 s, so the first broken snapshot is t = 3.0 s.
        for i in 0..=10 {
            let x = 9.0 * i as f64;
            if i == 5 {
                traces.push(NodeTrace {
                    node_id: id,
                    duration,
                    waypoints: vec![Waypoint::new(
                        0.0,
                        Point::new(x, 0.0),
                        Point::new(x + 0.35 * duration, 0.0),
                        0.35,
                    )],
                });
            } else {
                traces.push(parked(id, x, 0.0, duration));
            }
            id += 1;
        }
        // Chain B: 15 static edges from the source up, across y = 18,
        // and down to the receiver. Vertical risers at x = 0 (y = 6,
        // 12, 18 — part of the across row), across at 9 m spacing, then
        // down via (90, 9).
        for y in [6.0, 12.0] {
            traces.push(parked(id, 0.0, y, duration));
            id += 1;
        }
        for i in 0..=10 {
            traces.push(parked(id, 9.0 * i as f64, 18.0, duration));
            id += 1;
        }
        traces.push(parked(id, 90.0, 9.0, duration));

        let group = MulticastGroup::new(0, vec![10], traces.len()).unwrap();
        (traces, group)
    }

    #[test]
    fn two_tree_fixture_has_expected_chain_lengths() {
        let (traces, group) = two_tree_fixture();
        // At t = 0 both chains exist; min-hop pick is the 10-edge chain.
        let g0 = snapshot_graph(&traces, 10.0, 0.0).unwrap();
        let t0 = min_hop_tree(&g0, &group).unwrap().unwrap();
        assert_eq!(t0.edge_count(), 10);
        // At t = 3 chain A is broken and the only path has 15 edges.
        let g3 = snapshot_graph(&traces, 10.0, 3.0).unwrap();
        let t3 = min_hop_tree(&g3, &group).unwrap().unwrap();
        assert_eq!(t3.edge_count(), 15);
        // Just before the break the old chain is still alive.
        let g2 = snapshot_graph(&traces, 10.0, 2.75).unwrap();
        assert!(edges_alive(t0.edges(), &g2));
        assert!(!edges_alive(t0.edges(), &g3));
    }

    #[test]
    fn lifetimes_partition_connected_time() {
        let (traces, group) = two_tree_fixture();
        for algorithm in Algorithm::ALL {
            let config = SessionConfig {
                snapshot_interval: 0.25,
                duration: 9.0,
                algorithm,
                group: group.clone(),
            };
            let m = run_session(&traces, 10.0, &config).unwrap();
            let lifetime_sum: f64 = m.tree_lifetimes.iter().sum();
            assert!((lifetime_sum - m.connected_time).abs() < 1e-9);
            assert!(lifetime_sum <= config.duration + 1e-9);
            for l in &m.tree_lifetimes {
                let multiple = l / config.snapshot_interval;
                assert!((multiple - multiple.round()).abs() < 1e-9 && *l > 0.0);
            }
        }
    }

    #[test]
    fn config_validation() {
        let group = MulticastGroup::new(0, vec![1], 2).unwrap();
        let bad_interval = SessionConfig {
            snapshot_interval: 0.0,
            duration: 10.0,
            algorithm: Algorithm::MinHop,
            group: group.clone(),
        };
        assert!(bad_interval.validate().is_err());
        let bad_multiple = SessionConfig {
            snapshot_interval: 0.3,
            duration: 10.0,
            algorithm: Algorithm::MinHop,
            group: group.clone(),
        };
        assert!(bad_multiple.validate().is_err());
        let ok = SessionConfig {
            snapshot_interval: 0.25,
            duration: 10.0,
            algorithm: Algorithm::MinHop,
            group,
        };
        assert!(ok.validate().is_ok());
        assert_eq!(ok.total_instants(), 40);
    }

    #[test]
    fn run_session_rejects_mismatched_traces() {
        let group = MulticastGroup::new(0, vec![1], 2).unwrap();
        let config = SessionConfig {
            snapshot_interval: 0.25,
            duration: 10.0,
            algorithm: Algorithm::MinHop,
            group,
        };
        // Too-short trace.
        let short = vec![parked(0, 0.0, 0.0, 5.0), parked(1, 1.0, 0.0, 5.0)];
        assert!(run_session(&short, 250.0, &config).is_err());
        // Group id outside the trace set.
        let lone = vec![parked(0, 0.0, 0.0, 10.0)];
        assert!(run_session(&lone, 250.0, &config).is_err());
        // Wrong ordering.
        let swapped = vec![parked(1, 0.0, 0.0, 10.0), parked(0, 1.0, 0.0, 10.0)];
        assert!(run_session(&swapped, 250.0, &config).is_err());
    }

    #[test]
    fn paired_diagnostic_on_fixture_sees_no_violations() {
        let (traces, group) = two_tree_fixture();
        let stats = paired_diagnostic(&traces, 10.0, &group, 0.25, 9.0).unwrap();
        assert_eq!(stats.snapshots_total, 36);
        assert_eq!(stats.snapshots_compared, 36);
        assert_eq!(stats.edge_dominance_violations, 0);
        assert_eq!(stats.hop_dominance_violations, 0);
    }

    /// With few terminals the Steiner heuristic can settle on more
    /// edges than the min-hop tree on individual snapshots (it only
    /// guarantees its approximation bound). Hop dominance, by contrast,
    /// is a theorem and must never be violated. This pins a workload
    /// where the edge exception is known to occur so the distinction
    /// stays visible.
    #[test]
    fn edge_dominance_can_fail_for_small_groups_but_hops_never() {
        use crate::experiment::{derived_seed, select_group, SeedPurpose};
        use crate::mobility::{generate_traces, MobilityConfig, MobilityModel};
        use crate::rng::scenario_rng;

        let model = MobilityModel::RandomWaypoint;
        let trace_seed = derived_seed(SeedPurpose::Trace, 7, model, 50, 25.0, 3, 0);
        let group_seed = derived_seed(SeedPurpose::Group, 7, model, 50, 25.0, 3, 0);
        let mobility = MobilityConfig {
            seed: trace_seed,
            ..MobilityConfig::new(model, 50, 25.0, 100.0, 0)
        };
        let traces = generate_traces(&mobility).unwrap();
        let group = select_group(50, 3, &mut scenario_rng(group_seed)).unwrap();
        let stats = paired_diagnostic(&traces, 250.0, &group, 0.25, 100.0).unwrap();
        assert!(
            stats.edge_dominance_violations > 0,
            "expected the known edge-dominance exception on this workload"
        );
        assert_eq!(stats.hop_dominance_violations, 0);
    }
}
