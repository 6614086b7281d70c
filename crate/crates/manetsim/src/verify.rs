//! Independent oracles and property suites.
//!
//! Each suite generates seeded random instances, checks the production
//! code against an independently implemented oracle (Dijkstra for BFS
//! distances, exhaustive enumeration for Steiner costs, an instant-by-
//! instant replay for session accounting, Monte Carlo statistics for the
//! mobility models), and reports failures with enough payload to replay
//! them. The oracle implementations deliberately avoid the production
//! routines they check.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rand::Rng;

use crate::error::Result;
use crate::graph::{build_static_graph, NodeId, Point};
use crate::mobility::{
    self, generate_node_trace, generate_traces, MobilityConfig, MobilityModel, NodeTrace,
};
use crate::rng::{scenario_rng, SimRng};
use crate::session::{run_session, Algorithm, SessionConfig, SessionMetrics};
use crate::trees::{
    bfs, exact_steiner_oracle, kou_steiner_tree, min_hop_tree, tree_hop_counts, MulticastGroup,
};

/// One failed property instance, with the data needed to replay it.
#[derive(Debug, Clone)]
pub struct PropertyFailure {
    pub seed: u64,
    pub details: String,
}

/// Outcome of one property suite.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub property: String,
    pub instances: usize,
    pub failures: Vec<PropertyFailure>,
}

impl PropertyReport {
    fn new(property: &str) -> Self {
        PropertyReport {
            property: property.to_string(),
            instances: 0,
            failures: Vec::new(),
        }
    }

    fn fail(&mut self, seed: u64, details: String) {
        self.failures.push(PropertyFailure { seed, details });
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// `name: PASS (n instances)` or `name: FAIL (k/n)` plus the first
    /// counterexample.
    pub fn summary(&self) -> String {
        if self.passed() {
            format!("{}: PASS ({} instances)", self.property, self.instances)
        } else {
            let first = &self.failures[0];
            format!(
                "{}: FAIL ({}/{} instances; first: seed {} — {})",
                self.property,
                self.failures.len(),
                self.instances,
                first.seed,
                first.details
            )
        }
    }
}

fn random_positions(rng: &mut SimRng, n: usize, side: f64) -> Vec<Point> {
    (0..n)
        .map(|_| {
            Point::new(
                rng.random_range(0.0..=side),
                rng.random_range(0.0..=side),
            )
        })
        .collect()
}

/// Unit-weight Dijkstra over an adjacency list rebuilt directly from
/// pairwise distances — independent of both `StaticGraph` adjacency and
/// the BFS under test.
fn dijkstra_distances(positions: &[Point], range: f64, source: NodeId) -> Vec<Option<u32>> {
    let n = positions.len();
    let mut adjacency = vec![Vec::new(); n];
    for u in 0..n {
        for v in 0..n {
            if u != v && positions[u].distance(&positions[v]) <= range {
                adjacency[u].push(v);
            }
        }
    }
    let mut dist: Vec<Option<u32>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0u32, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u] != Some(d) {
            continue;
        }
        for &v in &adjacency[u] {
            let candidate = d + 1;
            if dist[v].is_none_or(|cur| candidate < cur) {
                dist[v] = Some(candidate);
                heap.push(Reverse((candidate, v)));
            }
        }
    }
    dist
}

/// BFS hop counts equal unit-weight Dijkstra distances on random
/// unit-disk graphs; unreachability must agree too. Zero tolerance.
pub fn check_bfs_vs_dijkstra(instance_count: usize, seed: u64) -> PropertyReport {
    let mut report = PropertyReport::new("bfs_vs_dijkstra");
    for i in 0..instance_count {
        let instance_seed = seed.wrapping_add(i as u64);
        let mut rng = scenario_rng(instance_seed);
        let n = rng.random_range(2..=60);
        let range = rng.random_range(150.0..=400.0);
        let positions = random_positions(&mut rng, n, 1000.0);
        let graph = build_static_graph(0.0, &positions, range).expect("valid instance");
        let source = rng.random_range(0..n);
        report.instances += 1;

        let search = match bfs(&graph, source) {
            Ok(s) => s,
            Err(e) => {
                report.fail(instance_seed, format!("bfs failed: {e}"));
                continue;
            }
        };
        let oracle = dijkstra_distances(&positions, range, source);
        for (v, expected) in oracle.iter().enumerate() {
            if search.distance[v] != *expected {
                report.fail(
                    instance_seed,
                    format!(
                        "node {v}: bfs {:?} != dijkstra {:?} (n={n}, range={range:.1}, source={source})",
                        search.distance[v], oracle[v]
                    ),
                );
                break;
            }
        }
    }
    report
}

fn random_group(rng: &mut SimRng, node_count: usize, receivers: usize) -> MulticastGroup {
    let mut ids: Vec<NodeId> = (0..node_count).collect();
    for i in 0..=receivers {
        let j = rng.random_range(i..node_count);
        ids.swap(i, j);
    }
    MulticastGroup::new(ids[0], ids[1..=receivers].to_vec(), node_count).expect("valid group")
}

/// On exhaustively solvable instances the heuristic cost lies in
/// `[OPT, 2·(1 − 1/|MG|)·OPT]`. Zero tolerance.
pub fn check_steiner_bound(instance_count: usize, seed: u64) -> PropertyReport {
    let mut report = PropertyReport::new("steiner_approximation_bound");
    let mut attempt = 0u64;
    while report.instances < instance_count {
        let instance_seed = seed.wrapping_add(attempt);
        attempt += 1;
        let mut rng = scenario_rng(instance_seed);
        let n = rng.random_range(4..=10);
        let side = rng.random_range(30.0..=70.0);
        let positions = random_positions(&mut rng, n, side);
        let graph = build_static_graph(0.0, &positions, 40.0).expect("valid instance");
        let receiver_count = rng.random_range(1..=4.min(n - 1));
        let group = random_group(&mut rng, n, receiver_count);

        let optimum = match exact_steiner_oracle(&graph, &group) {
            Ok(Some(opt)) => opt,
            Ok(None) => {
                // Disconnected: the heuristic must agree.
                if let Ok(Some(_)) = kou_steiner_tree(&graph, &group) {
                    report.instances += 1;
                    report.fail(instance_seed, "heuristic found a tree where none exists".into());
                }
                continue;
            }
            Err(e) => {
                report.instances += 1;
                report.fail(instance_seed, format!("oracle error: {e}"));
                continue;
            }
        };
        report.instances += 1;
        let Ok(Some((tree, _))) = kou_steiner_tree(&graph, &group) else {
            report.fail(instance_seed, "heuristic missed a connectable group".into());
            continue;
        };
        let heuristic = tree.edge_count();
        let mg = group.terminals().len() as f64;
        let bound = 2.0 * (1.0 - 1.0 / mg) * optimum as f64;
        if heuristic < optimum {
            report.fail(
                instance_seed,
                format!("heuristic {heuristic} below optimum {optimum}"),
            );
        } else if (heuristic as f64) > bound + 1e-9 {
            report.fail(
                instance_seed,
                format!("heuristic {heuristic} exceeds bound {bound:.3} (opt {optimum}, |MG| {mg})"),
            );
        }
    }
    report
}

/// Re-walk a finished session instant by instant and re-derive every
/// accumulator. Edge liveness is rechecked from raw positions, not the
/// snapshot adjacency. Zero tolerance; exact equality on accumulators.
pub fn replay_session(
    traces: &[NodeTrace],
    range: f64,
    config: &SessionConfig,
    metrics: &SessionMetrics,
) -> PropertyReport {
    let mut report = PropertyReport::new("session_replay");
    report.instances = 1;
    if let Err(e) = replay_session_inner(traces, range, config, metrics) {
        report.fail(0, e);
    }
    report
}

fn replay_session_inner(
    traces: &[NodeTrace],
    range: f64,
    config: &SessionConfig,
    metrics: &SessionMetrics,
) -> std::result::Result<(), String> {
    let dt = config.snapshot_interval;
    let total = config.total_instants();
    let group = &config.group;

    let mut connected_instants = 0u64;
    let mut discovery_count = 0u64;
    let mut lifetimes: Vec<f64> = Vec::new();
    let mut edge_time = 0.0f64;
    let mut hop_time: BTreeMap<NodeId, f64> =
        group.receivers().iter().map(|&r| (r, 0.0)).collect();
    let mut active: Option<(crate::trees::MulticastTree, BTreeMap<NodeId, u32>, u64)> = None;

    let err = |msg: String| -> std::result::Result<(), String> { Err(msg) };

    for instant in 0..total {
        let t = instant as f64 * dt;
        let positions: Vec<Point> = traces
            .iter()
            .map(|trace| trace.position_at(t))
            .collect::<Result<_>>()
            .map_err(|e| format!("position lookup failed at t={t}: {e}"))?;

        // Liveness of the installed tree from raw distances.
        let alive = active.as_ref().map(|(tree, _, _)| {
            tree.edges()
                .iter()
                .all(|&(u, v)| positions[u].distance(&positions[v]) <= range)
        });
        if alive == Some(false) {
            let (_, _, installed) = active.take().expect("liveness implies a tree");
            lifetimes.push((instant - installed) as f64 * dt);
        }

        if active.is_none() {
            let graph = build_static_graph(t, &positions, range)
                .map_err(|e| format!("snapshot failed at t={t}: {e}"))?;
            let fresh = match config.algorithm {
                Algorithm::MinHop => min_hop_tree(&graph, group)
                    .map_err(|e| e.to_string())?,
                Algorithm::MinEdge => kou_steiner_tree(&graph, group)
                    .map_err(|e| e.to_string())?
                    .map(|(tree, _)| tree),
            };
            if let Some(tree) = fresh {
                // Reuse minimality: a fresh discovery is only legitimate
                // when no previous tree was usable at this instant.
                if alive == Some(true) {
                    return err(format!("spurious recomputation at t={t}"));
                }
                if !tree.spans(group) {
                    return err(format!("tree does not span group at t={t}"));
                }
                for &(u, v) in tree.edges() {
                    if positions[u].distance(&positions[v]) > range {
                        return err(format!("installed tree has dead edge ({u},{v}) at t={t}"));
                    }
                }
                discovery_count += 1;
                let hops =
                    tree_hop_counts(&tree, group).map_err(|e| format!("hop counts: {e}"))?;
                active = Some((tree, hops, instant));
            }
        }

        if let Some((tree, hops, _)) = &active {
            // Validity at every connected instant, from raw distances.
            for &(u, v) in tree.edges() {
                if positions[u].distance(&positions[v]) > range {
                    return err(format!("in-use tree has dead edge ({u},{v}) at t={t}"));
                }
            }
            connected_instants += 1;
            edge_time += tree.edge_count() as f64 * dt;
            for (&r, &h) in hops {
                *hop_time.get_mut(&r).expect("receiver slot") += f64::from(h) * dt;
            }
        }
    }
    if let Some((_, _, installed)) = active.take() {
        lifetimes.push((total - installed) as f64 * dt);
    }
    let connected_time = connected_instants as f64 * dt;

    // Accumulator consistency: exact equality with the session's output.
    if metrics.total_instants != total {
        return err(format!(
            "total instants {} != replay {}",
            metrics.total_instants, total
        ));
    }
    if metrics.connected_instants != connected_instants {
        return err(format!(
            "connected instants {} != replay {}",
            metrics.connected_instants, connected_instants
        ));
    }
    if metrics.discovery_count != discovery_count {
        return err(format!(
            "discoveries {} != replay {}",
            metrics.discovery_count, discovery_count
        ));
    }
    if metrics.tree_lifetimes != lifetimes {
        return err(format!(
            "lifetimes {:?} != replay {:?}",
            metrics.tree_lifetimes, lifetimes
        ));
    }
    if metrics.edge_time_product != edge_time {
        return err(format!(
            "edge-time product {} != replay {edge_time}",
            metrics.edge_time_product
        ));
    }
    if metrics.hop_time_product != hop_time {
        return err(format!(
            "hop-time products {:?} != replay {:?}",
            metrics.hop_time_product, hop_time
        ));
    }
    if metrics.connected_time != connected_time {
        return err(format!(
            "connected time {} != replay {connected_time}",
            metrics.connected_time
        ));
    }

    // Lifetime partition.
    let lifetime_sum: f64 = lifetimes.iter().sum();
    if (lifetime_sum - connected_time).abs() > 1e-9 {
        return err(format!(
            "lifetime sum {lifetime_sum} != connected time {connected_time}"
        ));
    }
    if lifetime_sum > config.duration + 1e-9 {
        return err(format!("lifetime sum {lifetime_sum} exceeds duration"));
    }
    for l in &lifetimes {
        let multiple = l / dt;
        if *l <= 0.0 || (multiple - multiple.round()).abs() > 1e-9 {
            return err(format!("lifetime {l} is not a positive multiple of Δt"));
        }
    }
    Ok(())
}

/// Run whole random sessions end to end and replay each one.
pub fn check_random_sessions(session_count: usize, seed: u64) -> PropertyReport {
    let mut report = PropertyReport::new("random_session_replay");
    for i in 0..session_count {
        let instance_seed = seed.wrapping_add(0x9e37_79b9).wrapping_add(i as u64);
        let mut rng = scenario_rng(instance_seed);
        let model = MobilityModel::ALL[rng.random_range(0..3)];
        let node_count = rng.random_range(8..=20);
        let v_max = rng.random_range(5.0..=50.0);
        let mobility = MobilityConfig::new(model, node_count, v_max, 30.0, instance_seed);
        let algorithm = Algorithm::ALL[rng.random_range(0..2)];
        let receivers = rng.random_range(1..=4.min(node_count - 1));
        let group = random_group(&mut rng, node_count, receivers);
        let config = SessionConfig {
            snapshot_interval: 0.25,
            duration: 30.0,
            algorithm,
            group,
        };
        report.instances += 1;
        let traces = match generate_traces(&mobility) {
            Ok(t) => t,
            Err(e) => {
                report.fail(instance_seed, format!("trace generation failed: {e}"));
                continue;
            }
        };
        let metrics = match run_session(&traces, 250.0, &config) {
            Ok(m) => m,
            Err(e) => {
                report.fail(instance_seed, format!("session failed: {e}"));
                continue;
            }
        };
        if let Err(details) = replay_session_inner(&traces, 250.0, &config, &metrics) {
            report.fail(instance_seed, details);
        }
    }
    report
}

/// Monte Carlo and trace-level statistics for one mobility model:
/// decision frequencies (Manhattan), target uniformity (Random
/// Waypoint), shortest-trip distances (City Section), and containment
/// plus speed-bound checks for all of them.
pub fn check_mobility_statistics(model: MobilityModel, config: &MobilityConfig) -> PropertyReport {
    let mut report = PropertyReport::new(&format!("mobility_statistics_{model}"));
    let mut config = config.clone();
    config.model = model;
    if let Err(e) = config.validate() {
        report.instances += 1;
        report.fail(config.seed, format!("config invalid: {e}"));
        return report;
    }

    containment_and_speed_checks(&config, &mut report);
    match model {
        MobilityModel::RandomWaypoint => rwp_uniformity_check(&config, &mut report),
        MobilityModel::CitySection => city_trip_oracle_check(&config, &mut report),
        MobilityModel::Manhattan => manhattan_decision_checks(&config, &mut report),
    }
    report
}

/// 10 000 sampled instants stay inside the network (grid models: on a
/// street), and displacement over Δt never exceeds v_max·Δt.
fn containment_and_speed_checks(config: &MobilityConfig, report: &mut PropertyReport) {
    let samples = 10_000usize;
    let probe_dt = 0.25;
    // Quantization of waypoint fields can shift an interpolated position
    // by about half an ulp of the 6-decimal grid.
    let slack = 1e-3;
    let traces = match generate_traces(config) {
        Ok(t) => t,
        Err(e) => {
            report.instances += 1;
            report.fail(config.seed, format!("generation failed: {e}"));
            return;
        }
    };
    let step = (config.duration - probe_dt) / samples as f64;
    for i in 0..samples {
        let trace = &traces[i % traces.len()];
        let t = mobility::quantize(i as f64 * step);
        report.instances += 1;
        let p = match trace.position_at(t) {
            Ok(p) => p,
            Err(e) => {
                report.fail(config.seed, format!("position_at({t}) failed: {e}"));
                continue;
            }
        };
        if p.x < -1e-9
            || p.x > config.width + 1e-9
            || p.y < -1e-9
            || p.y > config.height + 1e-9
        {
            report.fail(
                config.seed,
                format!("node {} escaped at t={t}: ({}, {})", trace.node_id, p.x, p.y),
            );
            continue;
        }
        if config.model.is_grid() {
            let on_street = |v: f64| {
                let blocks = v / config.block_length;
                (blocks - blocks.round()).abs() < 1e-6
            };
            if !on_street(p.x) && !on_street(p.y) {
                report.fail(
                    config.seed,
                    format!("node {} off-street at t={t}: ({}, {})", trace.node_id, p.x, p.y),
                );
                continue;
            }
        }
        let q = match trace.position_at(t + probe_dt) {
            Ok(q) => q,
            Err(_) => continue,
        };
        if p.distance(&q) > config.v_max * probe_dt + slack {
            report.fail(
                config.seed,
                format!(
                    "node {} moved {} m in {probe_dt} s at t={t} (v_max {})",
                    trace.node_id,
                    p.distance(&q),
                    config.v_max
                ),
            );
        }
    }
}

/// Chi-square uniformity of 10 000 Random Waypoint targets over a 10×10
/// cell grid; critical value 148.230 (99 degrees of freedom, α=0.001).
fn rwp_uniformity_check(config: &MobilityConfig, report: &mut PropertyReport) {
    let wanted = 10_000usize;
    let mut counts = [[0u32; 10]; 10];
    let mut collected = 0usize;
    let mut node = 0usize;
    while collected < wanted {
        // Per-node substreams make extra node ids a clean source of
        // additional independent legs.
        let trace = generate_node_trace(config, node).expect("validated config");
        for w in trace.waypoints.iter().filter(|w| !w.is_pause()) {
            if collected == wanted {
                break;
            }
            let cx = ((w.to.x / config.width * 10.0) as usize).min(9);
            let cy = ((w.to.y / config.height * 10.0) as usize).min(9);
            counts[cx][cy] += 1;
            collected += 1;
        }
        node += 1;
    }
    report.instances += collected;
    let expected = wanted as f64 / 100.0;
    let chi2: f64 = counts
        .iter()
        .flatten()
        .map(|&c| {
            let d = f64::from(c) - expected;
            d * d / expected
        })
        .sum();
    if chi2 >= 148.230 {
        report.fail(
            config.seed,
            format!("target chi-square {chi2:.2} >= 148.230"),
        );
    }
}

/// Every City Section trip follows a shortest lattice path (independent
/// grid BFS oracle) at a single speed.
fn city_trip_oracle_check(config: &MobilityConfig, report: &mut PropertyReport) {
    use std::collections::VecDeque;
    let grid = mobility::StreetGrid::from_config(config);
    let lattice_distance = |from: (usize, usize), to: (usize, usize)| -> usize {
        let width = grid.cols + 1;
        let idx = |c: (usize, usize)| c.1 * width + c.0;
        let mut dist = vec![usize::MAX; width * (grid.rows + 1)];
        let mut queue = VecDeque::from([from]);
        dist[idx(from)] = 0;
        while let Some(cell) = queue.pop_front() {
            if cell == to {
                return dist[idx(cell)];
            }
            for d in mobility::Direction::ALL {
                if let Some(next) = grid.step(cell, d) {
                    if dist[idx(next)] == usize::MAX {
                        dist[idx(next)] = dist[idx(cell)] + 1;
                        queue.push_back(next);
                    }
                }
            }
        }
        usize::MAX
    };

    let mut rng = scenario_rng(config.seed ^ 0xc17f);
    for _ in 0..1000 {
        report.instances += 1;
        let from = grid.random_intersection(&mut rng);
        let (target, runs) = mobility::city_section_trip(&grid, from, &mut rng);
        let blocks: usize = runs
            .iter()
            .map(|&(a, b)| a.0.abs_diff(b.0) + a.1.abs_diff(b.1))
            .sum();
        let oracle = lattice_distance(from, target);
        if blocks != oracle {
            report.fail(
                config.seed,
                format!("trip {from:?}→{target:?} took {blocks} blocks, shortest is {oracle}"),
            );
        }
        if runs[0].0 != from || runs.last().unwrap().1 != target {
            report.fail(config.seed, format!("trip {from:?}→{target:?} mis-chained"));
        }
    }
}

/// Manhattan decision statistics: 0.50/0.25/0.25 mid-grid, 0.5 each
/// with two options, probability one at a corner, uniform over feasible
/// directions initially.
fn manhattan_decision_checks(config: &MobilityConfig, report: &mut PropertyReport) {
    let grid = mobility::StreetGrid::from_config(config);
    let mid = (grid.cols / 2, grid.rows / 2);
    let decisions = 100_000u32;
    let mut rng = scenario_rng(config.seed ^ 0x3a11);

    let (mut straight, mut left, mut right) = (0u32, 0u32, 0u32);
    for _ in 0..decisions {
        match mobility::manhattan_next_direction(&grid, mid, mobility::Direction::East, &mut rng) {
            mobility::Direction::East => straight += 1,
            mobility::Direction::North => left += 1,
            mobility::Direction::South => right += 1,
            mobility::Direction::West => {
                report.fail(config.seed, "reversal escaped the decision rule".into());
            }
        }
    }
    report.instances += decisions as usize;
    let freq = |c: u32| f64::from(c) / f64::from(decisions);
    for (label, observed, expected) in [
        ("straight", freq(straight), 0.50),
        ("left", freq(left), 0.25),
        ("right", freq(right), 0.25),
    ] {
        if (observed - expected).abs() >= 0.01 {
            report.fail(
                config.seed,
                format!("mid-grid {label} frequency {observed:.4} vs {expected}"),
            );
        }
    }

    // Two options on a boundary: even split.
    let mut onward = 0u32;
    for _ in 0..decisions {
        match mobility::manhattan_next_direction(
            &grid,
            (grid.cols, grid.rows / 2),
            mobility::Direction::East,
            &mut rng,
        ) {
            mobility::Direction::North => onward += 1,
            mobility::Direction::South => {}
            other => {
                report.fail(config.seed, format!("boundary allowed {other:?}"));
            }
        }
    }
    report.instances += decisions as usize;
    let observed = freq(onward);
    if (observed - 0.5).abs() >= 0.01 {
        report.fail(
            config.seed,
            format!("boundary split frequency {observed:.4} vs 0.5"),
        );
    }

    // Single option at a corner: probability one.
    for _ in 0..1000 {
        report.instances += 1;
        let d = mobility::manhattan_next_direction(
            &grid,
            (grid.cols, 0),
            mobility::Direction::East,
            &mut rng,
        );
        if d != mobility::Direction::North {
            report.fail(config.seed, format!("corner continuation was {d:?}"));
        }
    }

    // Initial draw on an edge: three feasible directions, uniform.
    let mut tallies: BTreeMap<&'static str, u32> = BTreeMap::new();
    for _ in 0..decisions {
        let d = mobility::manhattan_initial_direction(&grid, (grid.cols / 2, 0), &mut rng);
        let label = match d {
            mobility::Direction::East => "east",
            mobility::Direction::West => "west",
            mobility::Direction::North => "north",
            mobility::Direction::South => {
                report.fail(config.seed, "initial draw left the network".into());
                continue;
            }
        };
        *tallies.entry(label).or_default() += 1;
    }
    report.instances += decisions as usize;
    for (label, count) in tallies {
        let observed = freq(count);
        if (observed - 1.0 / 3.0).abs() >= 0.01 {
            report.fail(
                config.seed,
                format!("initial {label} frequency {observed:.4} vs 1/3"),
            );
        }
    }
}

/// Run every suite at benchmark scale; used by the `verify` CLI command.
pub fn run_all_suites(seed: u64) -> Vec<PropertyReport> {
    let mut reports = vec![
        check_bfs_vs_dijkstra(500, seed),
        check_steiner_bound(200, seed),
        check_random_sessions(50, seed),
    ];
    for model in MobilityModel::ALL {
        let config = MobilityConfig::new(model, 10, 25.0, 1000.0, seed);
        reports.push(check_mobility_statistics(model, &config));
    }
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edges_alive;
    use crate::mobility::Waypoint;

    #[test]
    fn bfs_oracle_suite_passes() {
        let report = check_bfs_vs_dijkstra(100, 42);
        assert!(report.passed(), "{}", report.summary());
        assert_eq!(report.instances, 100);
    }

    #[test]
    fn dijkstra_oracle_handles_trivial_cases() {
        // Single node.
        let lone = vec![Point::new(0.0, 0.0)];
        assert_eq!(dijkstra_distances(&lone, 100.0, 0), vec![Some(0)]);
        // Disconnected pair: both routines report unreachable.
        let pair = vec![Point::new(0.0, 0.0), Point::new(500.0, 0.0)];
        assert_eq!(dijkstra_distances(&pair, 100.0, 0), vec![Some(0), None]);
        let g = build_static_graph(0.0, &pair, 100.0).unwrap();
        let search = bfs(&g, 0).unwrap();
        assert_eq!(search.distance, vec![Some(0), None]);
    }

    #[test]
    fn steiner_bound_suite_passes() {
        let report = check_steiner_bound(60, 7);
        assert!(report.passed(), "{}", report.summary());
        assert_eq!(report.instances, 60);
    }

    #[test]
    fn random_session_replay_passes() {
        let report = check_random_sessions(10, 3);
        assert!(report.passed(), "{}", report.summary());
    }

    #[test]
    fn replay_detects_tampered_metrics() {
        let mut rng = scenario_rng(5);
        let config_m = MobilityConfig::new(MobilityModel::RandomWaypoint, 30, 25.0, 20.0, 5);
        let traces = generate_traces(&config_m).unwrap();
        let group = random_group(&mut rng, 30, 3);
        let config = SessionConfig {
            snapshot_interval: 0.25,
            duration: 20.0,
            algorithm: Algorithm::MinHop,
            group,
        };
        let good = run_session(&traces, 250.0, &config).unwrap();
        assert!(good.connected_instants > 0, "test premise: group connects");
        assert!(replay_session(&traces, 250.0, &config, &good).passed());

        let mut tampered = good.clone();
        tampered.edge_time_product += 0.25;
        assert!(!replay_session(&traces, 250.0, &config, &tampered).passed());

        let mut tampered = good.clone();
        tampered.connected_instants = tampered.connected_instants.saturating_sub(1);
        assert!(!replay_session(&traces, 250.0, &config, &tampered).passed());
    }

    #[test]
    fn replay_matches_scripted_break_schedule() {
        // Forced break: two nodes drift apart, re-linking never happens.
        let duration = 4.0;
        let still = NodeTrace {
            node_id: 0,
            duration,
            waypoints: vec![Waypoint::new(
                0.0,
                Point::new(0.0, 0.0),
                Point::new(0.0, 0.0),
                0.0,
            )],
        };
        // Starts 240 m away, crosses 250 m strictly between t = 0.75
        // and t = 1.0 (240 + 11t > 250 for t > 10/11 ≈ 0.909).
        let drifter = NodeTrace {
            node_id: 1,
            duration,
            waypoints: vec![Waypoint::new(
                0.0,
                Point::new(240.0, 0.0),
                Point::new(240.0 + 11.0 * duration, 0.0),
                11.0,
            )],
        };
        let traces = vec![still, drifter];
        let group = MulticastGroup::new(0, vec![1], 2).unwrap();
        let config = SessionConfig {
            snapshot_interval: 0.25,
            duration,
            algorithm: Algorithm::MinHop,
            group,
        };
        let metrics = run_session(&traces, 250.0, &config).unwrap();
        assert_eq!(metrics.tree_lifetimes, vec![1.0], "break at t = 1.0");
        assert_eq!(metrics.connected_instants, 4);
        assert!(replay_session(&traces, 250.0, &config, &metrics).passed());

        // The edge is genuinely dead from t = 1.0 on.
        let g = crate::session::snapshot_graph(&traces, 250.0, 1.0).unwrap();
        assert!(!edges_alive([(0, 1)].iter(), &g));
    }

    #[test]
    fn mobility_statistics_pass_for_all_models() {
        for model in MobilityModel::ALL {
            let config = MobilityConfig::new(model, 10, 25.0, 200.0, 99);
            let report = check_mobility_statistics(model, &config);
            assert!(report.passed(), "{}", report.summary());
        }
    }
}
