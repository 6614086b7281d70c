//! Node mobility: trace generation and position lookup.
//!
//! Three models are supported. Random Waypoint moves anywhere in the
//! rectangle; City Section and Manhattan constrain motion to a street
//! grid of square blocks. A node's trace is a contiguous list of
//! [`Waypoint`]s covering the whole simulation interval, and
//! [`NodeTrace::position_at`] interpolates exactly along the active leg.
//!
//! Every numeric field of a waypoint is quantized to six decimal places
//! (the precision of the trace file format) at generation time, so a
//! trace written to disk and read back compares bit-for-bit equal.

mod grid;
mod random_waypoint;
mod trace_file;

pub use trace_file::{read_trace, write_trace, write_trace_string, TRACE_HEADER};

pub(crate) use grid::{
    city_section_trip, manhattan_initial_direction, manhattan_next_direction, Direction,
    StreetGrid,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Point};
use crate::rng::node_rng;

/// Which mobility model drives a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobilityModel {
    RandomWaypoint,
    CitySection,
    Manhattan,
}

impl MobilityModel {
    pub const ALL: [MobilityModel; 3] = [
        MobilityModel::RandomWaypoint,
        MobilityModel::CitySection,
        MobilityModel::Manhattan,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MobilityModel::RandomWaypoint => "random_waypoint",
            MobilityModel::CitySection => "city_section",
            MobilityModel::Manhattan => "manhattan",
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, MobilityModel::CitySection | MobilityModel::Manhattan)
    }
}

impl std::str::FromStr for MobilityModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random_waypoint" | "random-waypoint" => Ok(MobilityModel::RandomWaypoint),
            "city_section" | "city-section" => Ok(MobilityModel::CitySection),
            "manhattan" => Ok(MobilityModel::Manhattan),
            other => Err(Error::input(format!("unknown mobility model `{other}`"))),
        }
    }
}

impl std::fmt::Display for MobilityModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scenario parameters for trace generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityConfig {
    pub model: MobilityModel,
    /// Network width in meters.
    pub width: f64,
    /// Network height in meters.
    pub height: f64,
    /// Lower speed bound (Random Waypoint only; grid models draw from
    /// `(0, v_max]` regardless).
    pub v_min: f64,
    /// Maximum speed in m/s.
    pub v_max: f64,
    /// Constant pause at each waypoint arrival, seconds.
    pub pause_time: f64,
    /// Street block side for the grid models, meters.
    pub block_length: f64,
    /// Simulation length in seconds.
    pub duration: f64,
    pub node_count: usize,
    pub seed: u64,
}

impl MobilityConfig {
    /// Paper-style scenario: `v_min` and pause time zero, 1000 m square,
    /// 100 m blocks.
    pub fn new(model: MobilityModel, node_count: usize, v_max: f64, duration: f64, seed: u64) -> Self {
        MobilityConfig {
            model,
            width: 1000.0,
            height: 1000.0,
            v_min: 0.0,
            v_max,
            pause_time: 0.0,
            block_length: 100.0,
            duration,
            node_count,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0)
            || !self.width.is_finite()
            || !self.height.is_finite()
        {
            return Err(Error::input("network dimensions must be positive and finite"));
        }
        // The strict form would be v_min < v_max, but a pinned speed
        // (v_min == v_max) is allowed so fixtures can force deterministic
        // travel times.
        if !(self.v_min >= 0.0 && self.v_max >= self.v_min && self.v_max > 0.0) {
            return Err(Error::input(format!(
                "speed bounds must satisfy 0 <= v_min <= v_max and v_max > 0, got [{}, {}]",
                self.v_min, self.v_max
            )));
        }
        if !self.pause_time.is_finite() || self.pause_time < 0.0 {
            return Err(Error::input("pause_time must be >= 0"));
        }
        if !self.duration.is_finite() || self.duration <= 0.0 {
            return Err(Error::input("duration must be > 0"));
        }
        if self.node_count == 0 {
            return Err(Error::input("node_count must be >= 1"));
        }
        if self.model.is_grid() {
            if !self.block_length.is_finite() || self.block_length <= 0.0 {
                return Err(Error::input("block_length must be > 0 for grid models"));
            }
            for (name, extent) in [("width", self.width), ("height", self.height)] {
                let blocks = extent / self.block_length;
                if (blocks - blocks.round()).abs() > 1e-9 || blocks.round() < 1.0 {
                    return Err(Error::input(format!(
                        "{name} ({extent}) must be a whole number of {} m blocks",
                        self.block_length
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One leg of motion: depart `from` at `depart_time`, travel straight to
/// `to` at `speed`. A pause is a zero-length leg (`from == to`, speed 0)
/// whose extent is bounded by the next waypoint's departure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub depart_time: f64,
    pub from: Point,
    pub to: Point,
    pub speed: f64,
}

impl Waypoint {
    /// Construct with every field quantized to trace-file precision.
    pub fn new(depart_time: f64, from: Point, to: Point, speed: f64) -> Self {
        Waypoint {
            depart_time: quantize(depart_time),
            from: Point::new(quantize(from.x), quantize(from.y)),
            to: Point::new(quantize(to.x), quantize(to.y)),
            speed: quantize(speed),
        }
    }

    pub fn is_pause(&self) -> bool {
        self.from == self.to
    }

    /// Seconds spent in motion on this leg (zero for a pause).
    pub fn travel_time(&self) -> f64 {
        if self.is_pause() {
            0.0
        } else {
            self.from.distance(&self.to) / self.speed
        }
    }

    pub fn arrival_time(&self) -> f64 {
        self.depart_time + self.travel_time()
    }
}

/// A node's full motion history over `[0, duration]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTrace {
    pub node_id: NodeId,
    pub duration: f64,
    /// Waypoints ordered by departure time; the first departs at t = 0.
    pub waypoints: Vec<Waypoint>,
}

impl NodeTrace {
    /// Exact position at time `t`.
    ///
    /// Linear interpolation along the active leg; a node sits at the
    /// leg's endpoint between arrival and the next departure.
    pub fn position_at(&self, t: f64) -> Result<Point> {
        if !t.is_finite() || t < 0.0 || t > self.duration {
            return Err(Error::input(format!(
                "time {t} outside trace interval [0, {}]",
                self.duration
            )));
        }
        // Last waypoint departing at or before t.
        let idx = self.waypoints.partition_point(|w| w.depart_time <= t);
        if idx == 0 {
            // t precedes the first departure; only reachable through float
            // slop at t = 0 on a quantized depart time.
            return Ok(self.waypoints[0].from);
        }
        let w = &self.waypoints[idx - 1];
        if w.is_pause() {
            return Ok(w.from);
        }
        let elapsed = t - w.depart_time;
        let travel = w.travel_time();
        if elapsed >= travel {
            return Ok(w.to);
        }
        let frac = elapsed / travel;
        Ok(Point::new(
            w.from.x + (w.to.x - w.from.x) * frac,
            w.from.y + (w.to.y - w.from.y) * frac,
        ))
    }
}

/// Round to the 6-decimal precision of the trace file format, such that
/// formatting and reparsing the value is the identity.
pub(crate) fn quantize(v: f64) -> f64 {
    format!("{v:.6}").parse().expect("formatted float reparses")
}

/// Generate the trace of a single node. Deterministic in
/// `(config.seed, node_id)`; other nodes' ids never enter the stream.
pub fn generate_node_trace(config: &MobilityConfig, node_id: NodeId) -> Result<NodeTrace> {
    config.validate()?;
    let mut rng = node_rng(config.seed, node_id);
    let waypoints = match config.model {
        MobilityModel::RandomWaypoint => random_waypoint::generate(config, &mut rng),
        MobilityModel::CitySection => grid::generate_city_section(config, &mut rng),
        MobilityModel::Manhattan => grid::generate_manhattan(config, &mut rng),
    };
    Ok(NodeTrace {
        node_id,
        duration: config.duration,
        waypoints,
    })
}

/// Generate traces for every node in the scenario.
pub fn generate_traces(config: &MobilityConfig) -> Result<Vec<NodeTrace>> {
    config.validate()?;
    (0..config.node_count)
        .map(|id| generate_node_trace(config, id))
        .collect()
}

/// Uniform speed from `[v_min, v_max]`, rejecting draws that quantize to
/// zero so a leg always makes progress. Used by Random Waypoint.
pub(crate) fn sample_speed_interval(rng: &mut crate::rng::SimRng, v_min: f64, v_max: f64) -> f64 {
    use rand::Rng;
    if v_min == v_max {
        return quantize(v_max);
    }
    loop {
        let s = quantize(rng.random_range(v_min..=v_max));
        if s > 0.0 {
            return s;
        }
    }
}

/// Uniform speed from `(0, v_max]` for the grid models, again by
/// rejecting quantized zeros. A pinned `v_min == v_max` config forces a
/// constant speed here too.
pub(crate) fn sample_speed_grid(rng: &mut crate::rng::SimRng, config: &MobilityConfig) -> f64 {
    use rand::Rng;
    if config.v_min == config.v_max {
        return quantize(config.v_max);
    }
    loop {
        let s = quantize(rng.random_range(0.0..=config.v_max));
        if s > 0.0 {
            return s;
        }
    }
}
