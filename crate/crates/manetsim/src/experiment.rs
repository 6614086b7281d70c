//! The experiment matrix: mobility model × node count × max speed ×
//! receiver count × algorithm × run index.
//!
//! Every (cell, run) task derives its trace and group seeds by hashing a
//! canonical key string, so results are reproducible from `base_seed`
//! alone and insensitive to execution order. Both algorithms of a cell
//! pair consume the *identical* trace and group, making the
//! min-hop/min-edge comparison paired; the trace checksum column in the
//! results file lets that pairing be audited after the fact.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::mobility::{
    generate_traces, quantize, write_trace_string, MobilityConfig, MobilityModel,
};
use crate::rng::{fnv1a64, scenario_rng, SimRng};
use crate::session::{run_session, Algorithm, SessionConfig, SessionMetrics};
use crate::trees::MulticastGroup;

/// Full experiment description. The defaults are the benchmark scenario:
/// 1000 m square, 250 m range, quarter-second snapshots, 1000 s
/// sessions, 50/100 nodes, 3/10/18 receivers, v_max 5/25/50 m/s, five
/// runs per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub models: Vec<MobilityModel>,
    pub node_counts: Vec<usize>,
    pub v_max_values: Vec<f64>,
    pub receiver_counts: Vec<usize>,
    pub runs_per_cell: usize,
    pub width: f64,
    pub height: f64,
    pub range: f64,
    pub snapshot_interval: f64,
    pub duration: f64,
    pub block_length: f64,
    pub base_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            models: MobilityModel::ALL.to_vec(),
            node_counts: vec![50, 100],
            v_max_values: vec![5.0, 25.0, 50.0],
            receiver_counts: vec![3, 10, 18],
            runs_per_cell: 5,
            width: 1000.0,
            height: 1000.0,
            range: 250.0,
            snapshot_interval: 0.25,
            duration: 1000.0,
            block_length: 100.0,
            base_seed: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty()
            || self.node_counts.is_empty()
            || self.v_max_values.is_empty()
            || self.receiver_counts.is_empty()
        {
            return Err(Error::input("experiment matrix has an empty dimension"));
        }
        if self.runs_per_cell == 0 {
            return Err(Error::input("runs_per_cell must be >= 1"));
        }
        for &nodes in &self.node_counts {
            for &receivers in &self.receiver_counts {
                if receivers >= nodes {
                    return Err(Error::input(format!(
                        "receiver count {receivers} must be < node count {nodes}"
                    )));
                }
            }
        }
        if !self.range.is_finite() || self.range <= 0.0 {
            return Err(Error::input("range must be > 0"));
        }
        // Remaining field combinations are validated by the per-run
        // mobility and session configs; probe one cell eagerly so a bad
        // config fails before any work is spawned.
        let probe = self.mobility_config(
            self.models[0],
            self.node_counts[0],
            self.v_max_values[0],
            0,
        );
        probe.validate()?;
        let session_probe = SessionConfig {
            snapshot_interval: self.snapshot_interval,
            duration: self.duration,
            algorithm: Algorithm::MinHop,
            group: MulticastGroup::new(0, vec![1], 2).expect("static probe group"),
        };
        session_probe.validate()
    }

    fn mobility_config(
        &self,
        model: MobilityModel,
        node_count: usize,
        v_max: f64,
        seed: u64,
    ) -> MobilityConfig {
        MobilityConfig {
            model,
            width: self.width,
            height: self.height,
            v_min: 0.0,
            v_max,
            pause_time: 0.0,
            block_length: self.block_length,
            duration: self.duration,
            node_count,
            seed,
        }
    }
}

/// Everything identifying one aggregated result row family.
#[derive(Debug, Clone, PartialEq)]
pub struct CellKey {
    pub model: MobilityModel,
    pub nodes: usize,
    pub v_max: f64,
    pub receivers: usize,
    pub algorithm: Algorithm,
}

impl CellKey {
    /// Canonical sort/deduplication key; also the hash preimage for
    /// seed derivation (without the algorithm component).
    fn ordinal(&self) -> (MobilityModel, usize, u64, usize, Algorithm) {
        (
            self.model,
            self.nodes,
            self.v_max.to_bits(),
            self.receivers,
            self.algorithm,
        )
    }
}

/// The four metrics of one session run. `None` marks a metric that is
/// undefined because the group was never connected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub connectivity_percent: f64,
    pub mean_lifetime: Option<f64>,
    pub avg_edges: Option<f64>,
    pub avg_hops: Option<f64>,
}

impl RunMetrics {
    /// Quantized to the 6-decimal precision of the results file, so
    /// aggregates recomputed from the file match the stored ones.
    fn from_session(m: &SessionMetrics) -> Self {
        RunMetrics {
            connectivity_percent: quantize(m.connectivity_percent()),
            mean_lifetime: m.mean_tree_lifetime().map(quantize),
            avg_edges: m.time_averaged_edges().map(quantize),
            avg_hops: m.time_averaged_hops().map(quantize),
        }
    }

    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::ConnectivityPercent => Some(self.connectivity_percent),
            Metric::MeanTreeLifetime => self.mean_lifetime,
            Metric::AvgEdges => self.avg_edges,
            Metric::AvgHops => self.avg_hops,
        }
    }
}

/// Metric identifiers, in results-file row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    ConnectivityPercent,
    MeanTreeLifetime,
    AvgEdges,
    AvgHops,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::ConnectivityPercent,
        Metric::MeanTreeLifetime,
        Metric::AvgEdges,
        Metric::AvgHops,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::ConnectivityPercent => "connectivity_percent",
            Metric::MeanTreeLifetime => "mean_tree_lifetime_s",
            Metric::AvgEdges => "avg_edges_per_tree",
            Metric::AvgHops => "avg_hops_per_receiver",
        }
    }

    /// Axis label for chart output.
    pub fn axis_label(&self) -> &'static str {
        match self {
            Metric::ConnectivityPercent => "tree connectivity (%)",
            Metric::MeanTreeLifetime => "lifetime per tree (s)",
            Metric::AvgEdges => "edges per tree",
            Metric::AvgHops => "hops per receiver",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::input(format!("unknown metric `{s}`")))
    }
}

/// Aggregated results of one cell: per-run metric values plus the trace
/// checksums proving which inputs the runs consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    pub runs: Vec<RunMetrics>,
    pub trace_checksums: Vec<u64>,
}

/// Mean and sample standard deviation over the present (non-absent)
/// values, plus the number of absent runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: Option<f64>,
    pub stddev: Option<f64>,
    pub absent: usize,
}

pub fn aggregate(values: &[Option<f64>]) -> Aggregate {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let absent = values.len() - present.len();
    if present.is_empty() {
        return Aggregate {
            mean: None,
            stddev: None,
            absent,
        };
    }
    let mean = present.iter().sum::<f64>() / present.len() as f64;
    let stddev = if present.len() >= 2 {
        let var = present.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (present.len() - 1) as f64;
        Some(var.sqrt())
    } else {
        None
    };
    Aggregate {
        mean: Some(mean),
        stddev,
        absent,
    }
}

impl CellResult {
    pub fn aggregate(&self, metric: Metric) -> Aggregate {
        let values: Vec<Option<f64>> = self.runs.iter().map(|r| r.get(metric)).collect();
        aggregate(&values)
    }
}

/// The matrix output: aggregated cells plus the Steiner step-4/5 audit
/// totals accumulated over every min-edge tree discovery.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOutcome {
    pub cells: Vec<CellResult>,
    pub steiner_mst_changes: u64,
    pub steiner_prune_changes: u64,
}

/// Derive the deterministic seed of one purpose within one (cell, run):
/// the FNV-1a hash of a canonical key string. Exposed so external
/// tooling can regenerate exactly the trace or group any run consumed.
pub fn derived_seed(
    purpose: SeedPurpose,
    base_seed: u64,
    model: MobilityModel,
    nodes: usize,
    v_max: f64,
    receivers: usize,
    run: usize,
) -> u64 {
    let purpose = match purpose {
        SeedPurpose::Trace => "trace",
        SeedPurpose::Group => "group",
    };
    let key = format!(
        "{purpose}|base={base_seed}|model={model}|nodes={nodes}|vmax={v_max:.6}|recv={receivers}|run={run}"
    );
    fnv1a64(key.as_bytes())
}

/// What a derived seed feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedPurpose {
    Trace,
    Group,
}

/// Draw a source and `receiver_count` receivers uniformly without
/// replacement.
pub fn select_group(
    node_count: usize,
    receiver_count: usize,
    rng: &mut SimRng,
) -> Result<MulticastGroup> {
    use rand::Rng;
    if receiver_count >= node_count {
        return Err(Error::input(format!(
            "cannot draw {receiver_count} receivers plus a source from {node_count} nodes"
        )));
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(receiver_count + 1);
    while chosen.len() < receiver_count + 1 {
        let id = rng.random_range(0..node_count);
        if !chosen.contains(&id) {
            chosen.push(id);
        }
    }
    MulticastGroup::new(chosen[0], chosen[1..].to_vec(), node_count)
}

struct RunOutput {
    model: MobilityModel,
    nodes: usize,
    v_max: f64,
    receivers: usize,
    run: usize,
    trace_checksum: u64,
    per_algorithm: Vec<(Algorithm, SessionMetrics)>,
}

/// Execute the whole matrix. Tasks run in parallel; output ordering is
/// canonical regardless of thread count.
pub fn run_matrix(config: &ExperimentConfig) -> Result<MatrixOutcome> {
    config.validate()?;

    struct Task {
        model: MobilityModel,
        nodes: usize,
        v_max: f64,
        receivers: usize,
        run: usize,
    }
    let mut tasks = Vec::new();
    for &model in &config.models {
        for &nodes in &config.node_counts {
            for &v_max in &config.v_max_values {
                for &receivers in &config.receiver_counts {
                    for run in 0..config.runs_per_cell {
                        tasks.push(Task {
                            model,
                            nodes,
                            v_max,
                            receivers,
                            run,
                        });
                    }
                }
            }
        }
    }

    let outputs: Vec<RunOutput> = tasks
        .par_iter()
        .map(|task| -> Result<RunOutput> {
            let trace_seed = derived_seed(
                SeedPurpose::Trace,
                config.base_seed,
                task.model,
                task.nodes,
                task.v_max,
                task.receivers,
                task.run,
            );
            let group_seed = derived_seed(
                SeedPurpose::Group,
                config.base_seed,
                task.model,
                task.nodes,
                task.v_max,
                task.receivers,
                task.run,
            );
            let mobility = config.mobility_config(task.model, task.nodes, task.v_max, trace_seed);
            let traces = generate_traces(&mobility)?;
            let trace_checksum = fnv1a64(write_trace_string(&mobility, &traces).as_bytes());
            let group = select_group(task.nodes, task.receivers, &mut scenario_rng(group_seed))?;

            let mut per_algorithm = Vec::with_capacity(2);
            for algorithm in Algorithm::ALL {
                let session = SessionConfig {
                    snapshot_interval: config.snapshot_interval,
                    duration: config.duration,
                    algorithm,
                    group: group.clone(),
                };
                per_algorithm.push((algorithm, run_session(&traces, config.range, &session)?));
            }
            Ok(RunOutput {
                model: task.model,
                nodes: task.nodes,
                v_max: task.v_max,
                receivers: task.receivers,
                run: task.run,
                trace_checksum,
                per_algorithm,
            })
        })
        .collect::<Result<_>>()?;

    // Fold run outputs into per-(cell, algorithm) rows, canonical order.
    let mut cells: BTreeMap<(MobilityModel, usize, u64, usize, Algorithm), CellResult> =
        BTreeMap::new();
    let mut steiner_mst_changes = 0;
    let mut steiner_prune_changes = 0;
    let mut sorted = outputs;
    sorted.sort_by_key(|o| {
        (
            o.model,
            o.nodes,
            o.v_max.to_bits(),
            o.receivers,
            o.run,
        )
    });
    for output in sorted {
        for (algorithm, metrics) in &output.per_algorithm {
            steiner_mst_changes += metrics.steiner_mst_changes;
            steiner_prune_changes += metrics.steiner_prune_changes;
            let key = CellKey {
                model: output.model,
                nodes: output.nodes,
                v_max: output.v_max,
                receivers: output.receivers,
                algorithm: *algorithm,
            };
            let entry = cells.entry(key.ordinal()).or_insert_with(|| CellResult {
                key,
                runs: Vec::new(),
                trace_checksums: Vec::new(),
            });
            entry.runs.push(RunMetrics::from_session(metrics));
            entry.trace_checksums.push(output.trace_checksum);
        }
    }
    Ok(MatrixOutcome {
        cells: cells.into_values().collect(),
        steiner_mst_changes,
        steiner_prune_changes,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Write results as CSV: one row per (cell, metric) with mean, sample
/// stddev, the per-run values, the absent-run count, and the per-run
/// trace checksums (hex, `;`-joined).
pub fn write_results(cells: &[CellResult], path: &Path) -> Result<()> {
    if cells.is_empty() {
        // Header-only file; column count defaults to zero runs.
        let mut writer = csv::Writer::from_writer(File::create(path)?);
        writer
            .write_record(header_record(0))
            .and_then(|()| writer.flush().map_err(Into::into))
            .map_err(io_error)?;
        return Ok(());
    }
    let runs = cells[0].runs.len();
    if cells.iter().any(|c| c.runs.len() != runs) {
        return Err(Error::input("cells disagree on runs per cell"));
    }
    let mut writer = csv::Writer::from_writer(File::create(path)?);
    writer.write_record(header_record(runs)).map_err(io_error)?;
    for cell in cells {
        for metric in Metric::ALL {
            let agg = cell.aggregate(metric);
            let mut record = vec![
                cell.key.model.to_string(),
                cell.key.nodes.to_string(),
                format!("{:.6}", cell.key.v_max),
                cell.key.receivers.to_string(),
                cell.key.algorithm.to_string(),
                metric.as_str().to_string(),
                fmt_opt(agg.mean),
                fmt_opt(agg.stddev),
            ];
            for run in &cell.runs {
                record.push(fmt_opt(run.get(metric)));
            }
            record.push(agg.absent.to_string());
            record.push(
                cell.trace_checksums
                    .iter()
                    .map(|c| format!("{c:016x}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            );
            writer.write_record(&record).map_err(io_error)?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn header_record(runs: usize) -> Vec<String> {
    let mut h = vec![
        "model".to_string(),
        "nodes".to_string(),
        "v_max".to_string(),
        "receivers".to_string(),
        "algorithm".to_string(),
        "metric".to_string(),
        "mean".to_string(),
        "stddev".to_string(),
    ];
    for i in 1..=runs {
        h.push(format!("run{i}"));
    }
    h.push("absent_runs".to_string());
    h.push("trace_checksums".to_string());
    h
}

fn io_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// One parsed CSV row before regrouping into cells.
struct ResultRow {
    key: CellKey,
    metric: Metric,
    runs: Vec<Option<f64>>,
    checksums: Vec<u64>,
}

/// Read a results CSV back into cells (inverse of [`write_results`]).
pub fn read_results(path: &Path) -> Result<Vec<CellResult>> {
    let mut reader = csv::Reader::from_reader(File::open(path)?);
    let headers = reader.headers().map_err(io_error)?.clone();
    let run_count = headers.iter().filter(|h| h.starts_with("run")).count();

    let bad = |line: usize, message: String| Error::FileFormat {
        path: path.display().to_string(),
        line,
        message,
    };

    let mut rows: Vec<ResultRow> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(io_error)?;
        let line = idx + 2;
        let field = |i: usize| -> &str { record.get(i).unwrap_or("") };
        let key = CellKey {
            model: field(0).parse()?,
            nodes: field(1)
                .parse()
                .map_err(|_| bad(line, format!("bad node count `{}`", field(1))))?,
            v_max: field(2)
                .parse()
                .map_err(|_| bad(line, format!("bad v_max `{}`", field(2))))?,
            receivers: field(3)
                .parse()
                .map_err(|_| bad(line, format!("bad receiver count `{}`", field(3))))?,
            algorithm: field(4).parse()?,
        };
        let metric: Metric = field(5).parse()?;
        let mut runs: Vec<Option<f64>> = Vec::with_capacity(run_count);
        for i in 0..run_count {
            let raw = field(8 + i);
            runs.push(if raw.is_empty() {
                None
            } else {
                Some(
                    raw.parse()
                        .map_err(|_| bad(line, format!("bad number `{raw}`")))?,
                )
            });
        }
        let raw_checksums = field(8 + run_count + 1);
        let checksums: Vec<u64> = if raw_checksums.is_empty() {
            Vec::new()
        } else {
            raw_checksums
                .split(';')
                .map(|c| {
                    u64::from_str_radix(c, 16)
                        .map_err(|_| bad(line, format!("bad checksum `{c}`")))
                })
                .collect::<Result<_>>()?
        };
        rows.push(ResultRow {
            key,
            metric,
            runs,
            checksums,
        });
    }

    // Adjacent rows with the same key belong to one cell.
    let mut cells: Vec<CellResult> = Vec::new();
    let mut iter = rows.into_iter().peekable();
    while let Some(first) = iter.next() {
        let mut by_metric: BTreeMap<&'static str, Vec<Option<f64>>> = BTreeMap::new();
        let count = first.runs.len();
        let key = first.key.clone();
        let checksums = first.checksums.clone();
        by_metric.insert(first.metric.as_str(), first.runs);
        while iter
            .peek()
            .is_some_and(|row| row.key.ordinal() == key.ordinal())
        {
            let row = iter.next().expect("peeked");
            by_metric.insert(row.metric.as_str(), row.runs);
        }
        let get = |m: Metric, i: usize| -> Option<f64> {
            by_metric
                .get(m.as_str())
                .and_then(|v| v.get(i).copied())
                .flatten()
        };
        let runs: Vec<RunMetrics> = (0..count)
            .map(|i| RunMetrics {
                connectivity_percent: get(Metric::ConnectivityPercent, i).unwrap_or_default(),
                mean_lifetime: get(Metric::MeanTreeLifetime, i),
                avg_edges: get(Metric::AvgEdges, i),
                avg_hops: get(Metric::AvgHops, i),
            })
            .collect();
        cells.push(CellResult {
            key,
            runs,
            trace_checksums: checksums,
        });
    }
    Ok(cells)
}
