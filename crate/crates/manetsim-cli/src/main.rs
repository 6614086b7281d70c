//! Command-line front end for the MANET multicast benchmarking
//! simulator: trace generation, the experiment matrix, report/chart
//! rendering, and the self-verification suites.

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use manetsim::charts::emit_charts;
use manetsim::experiment::{
    derived_seed, read_results, run_matrix, select_group, write_results, CellResult,
    ExperimentConfig, Metric, SeedPurpose,
};
use manetsim::mobility::{generate_traces, write_trace, MobilityConfig, MobilityModel};
use manetsim::rng::scenario_rng;
use manetsim::session::paired_diagnostic;
use manetsim::verify::run_all_suites;

#[derive(Parser)]
#[command(
    name = "manet-sim",
    about = "Deterministic MANET multicast benchmarking simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mobility trace file for one scenario.
    GenerateTraces(GenerateArgs),
    /// Execute the experiment matrix and write results.csv.
    Run(RunArgs),
    /// Summarize a results.csv and render its charts.
    Report(ReportArgs),
    /// Run the self-verification property suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Mobility model: random_waypoint, city_section, or manhattan.
    #[arg(long)]
    model: String,
    #[arg(long)]
    nodes: usize,
    #[arg(long, default_value_t = 1000.0)]
    width: f64,
    #[arg(long, default_value_t = 1000.0)]
    height: f64,
    #[arg(long, default_value_t = 0.0)]
    v_min: f64,
    #[arg(long)]
    v_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pause_time: f64,
    #[arg(long, default_value_t = 100.0)]
    block_length: f64,
    #[arg(long, default_value_t = 1000.0)]
    duration: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output trace file path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flat keys mirroring the experiment fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mobility models (repeatable or comma-separated).
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    node_counts: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    v_max_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    receiver_counts: Option<Vec<usize>>,
    #[arg(long)]
    runs_per_cell: Option<usize>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long)]
    range: Option<f64>,
    #[arg(long)]
    snapshot_interval: Option<f64>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    block_length: Option<f64>,
    #[arg(long)]
    base_seed: Option<u64>,
    /// Output directory for results.csv (and charts via `report`).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Additionally recompute both trees at every snapshot of every run
    /// and report the dominance comparison.
    #[arg(long)]
    paired_diagnostic: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Path to a results.csv produced by `run`.
    #[arg(long)]
    results: PathBuf,
    /// Directory for the rendered charts.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 20100425)]
    seed: u64,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::GenerateTraces(args) => generate(args),
        Command::Run(args) => run(args),
        Command::Report(args) => report(args),
        Command::Verify(args) => verify(args),
    }
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let config = MobilityConfig {
        model: MobilityModel::from_str(&args.model)?,
        width: args.width,
        height: args.height,
        v_min: args.v_min,
        v_max: args.v_max,
        pause_time: args.pause_time,
        block_length: args.block_length,
        duration: args.duration,
        node_count: args.nodes,
        seed: args.seed,
    };
    let traces = generate_traces(&config)?;
    write_trace(&config, &traces, &args.out)?;
    let waypoints: usize = traces.iter().map(|t| t.waypoints.len()).sum();
    println!(
        "wrote {} ({} nodes, {waypoints} waypoints, {} model)",
        args.out.display(),
        traces.len(),
        config.model
    );
    Ok(())
}

fn load_config(args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(models) = &args.models {
        config.models = models
            .iter()
            .map(|m| MobilityModel::from_str(m))
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = &args.node_counts {
        config.node_counts = v.clone();
    }
    if let Some(v) = &args.v_max_values {
        config.v_max_values = v.clone();
    }
    if let Some(v) = &args.receiver_counts {
        config.receiver_counts = v.clone();
    }
    if let Some(v) = args.runs_per_cell {
        config.runs_per_cell = v;
    }
    if let Some(v) = args.width {
        config.width = v;
    }
    if let Some(v) = args.height {
        config.height = v;
    }
    if let Some(v) = args.range {
        config.range = v;
    }
    if let Some(v) = args.snapshot_interval {
        config.snapshot_interval = v;
    }
    if let Some(v) = args.duration {
        config.duration = v;
    }
    if let Some(v) = args.block_length {
        config.block_length = v;
    }
    if let Some(v) = args.base_seed {
        config.base_seed = v;
    }
    Ok(config)
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("initializing worker pool")?;
    }
    let config = load_config(&args)?;
    fs::create_dir_all(&args.out)?;

    let outcome = run_matrix(&config)?;
    let csv_path = args.out.join("results.csv");
    write_results(&outcome.cells, &csv_path)?;
    println!("wrote {}", csv_path.display());
    println!(
        "steiner audit: step-4 MST changes {}, step-5 pruning changes {}",
        outcome.steiner_mst_changes, outcome.steiner_prune_changes
    );
    print_summary(&outcome.cells);

    if args.paired_diagnostic {
        run_paired_diagnostic(&config, &args.out)?;
    }
    Ok(())
}

/// Per-run paired recomputation of both trees on every snapshot; writes
/// a small text report.
///
/// Hop-dominance violations are fatal: a min-hop path can never exceed
/// the min-edge path to the same receiver, so any count above zero
/// means a broken tree. Edge-dominance exceptions are reported but not
/// fatal: with few terminals the Steiner heuristic occasionally settles
/// on more edges than the min-hop tree, within its approximation bound.
fn run_paired_diagnostic(config: &ExperimentConfig, out: &std::path::Path) -> anyhow::Result<()> {
    let mut lines = Vec::new();
    let mut edge_violations = 0u64;
    let mut hop_violations = 0u64;
    for &model in &config.models {
        for &nodes in &config.node_counts {
            for &v_max in &config.v_max_values {
                for &receivers in &config.receiver_counts {
                    for run in 0..config.runs_per_cell {
                        let trace_seed = derived_seed(
                            SeedPurpose::Trace,
                            config.base_seed,
                            model,
                            nodes,
                            v_max,
                            receivers,
                            run,
                        );
                        let group_seed = derived_seed(
                            SeedPurpose::Group,
                            config.base_seed,
                            model,
                            nodes,
                            v_max,
                            receivers,
                            run,
                        );
                        let mobility = MobilityConfig {
                            model,
                            width: config.width,
                            height: config.height,
                            v_min: 0.0,
                            v_max,
                            pause_time: 0.0,
                            block_length: config.block_length,
                            duration: config.duration,
                            node_count: nodes,
                            seed: trace_seed,
                        };
                        let traces = generate_traces(&mobility)?;
                        let group =
                            select_group(nodes, receivers, &mut scenario_rng(group_seed))?;
                        let stats = paired_diagnostic(
                            &traces,
                            config.range,
                            &group,
                            config.snapshot_interval,
                            config.duration,
                        )?;
                        edge_violations += stats.edge_dominance_violations;
                        hop_violations += stats.hop_dominance_violations;
                        lines.push(format!(
                            "{model} nodes={nodes} vmax={v_max} recv={receivers} run={run}: \
                             compared {}/{} snapshots, edge violations {}, hop violations {}, \
                             mst changes {}, prune changes {}",
                            stats.snapshots_compared,
                            stats.snapshots_total,
                            stats.edge_dominance_violations,
                            stats.hop_dominance_violations,
                            stats.steiner_mst_changes,
                            stats.steiner_prune_changes
                        ));
                    }
                }
            }
        }
    }
    let path = out.join("paired_diagnostic.txt");
    fs::write(&path, lines.join("\n") + "\n")?;
    println!("wrote {}", path.display());
    println!(
        "paired diagnostic: {edge_violations} edge-dominance exceptions, {hop_violations} hop-dominance violations"
    );
    if hop_violations > 0 {
        bail!("paired diagnostic found {hop_violations} hop-dominance violations");
    }
    Ok(())
}

fn print_summary(cells: &[CellResult]) {
    println!(
        "{:<16} {:>5} {:>6} {:>4} {:<9} {:>12} {:>12} {:>12} {:>12}",
        "model", "nodes", "v_max", "rcv", "algorithm", "conn %", "life (s)", "edges", "hops"
    );
    let fmt = |v: Option<f64>| match v {
        Some(x) => format!("{x:.2}"),
        None => "-".to_string(),
    };
    for cell in cells {
        println!(
            "{:<16} {:>5} {:>6.1} {:>4} {:<9} {:>12} {:>12} {:>12} {:>12}",
            cell.key.model.to_string(),
            cell.key.nodes,
            cell.key.v_max,
            cell.key.receivers,
            cell.key.algorithm.to_string(),
            fmt(cell.aggregate(Metric::ConnectivityPercent).mean),
            fmt(cell.aggregate(Metric::MeanTreeLifetime).mean),
            fmt(cell.aggregate(Metric::AvgEdges).mean),
            fmt(cell.aggregate(Metric::AvgHops).mean),
        );
    }
}

fn report(args: ReportArgs) -> anyhow::Result<()> {
    let cells = read_results(&args.results)?;
    if cells.is_empty() {
        bail!("{} holds no result rows", args.results.display());
    }
    print_summary(&cells);
    let written = emit_charts(&cells, &args.out)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> anyhow::Result<()> {
    let reports = run_all_suites(args.seed);
    let mut failed = false;
    for report in &reports {
        println!("{}", report.summary());
        failed |= !report.passed();
    }
    if failed {
        bail!("verification failed");
    }
    Ok(())
}
