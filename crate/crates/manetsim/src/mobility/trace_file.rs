//! Plain-text trace files.
//!
//! Layout: a header block echoing the generating configuration as
//! `#key=value` lines, then one line per waypoint:
//!
//! ```text
//! #manet-trace v1
//! #model=random_waypoint
//! #width=1000.000000
//! ...
//! node_id depart_time from_x from_y to_x to_y speed
//! ```
//!
//! All floats are written with six decimal places, which is also the
//! in-memory precision of generated waypoints, so write → read is the
//! identity.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{MobilityConfig, MobilityModel, NodeTrace, Waypoint};
use crate::error::{Error, Result};
use crate::graph::Point;

/// First line of every trace file.
pub const TRACE_HEADER: &str = "#manet-trace v1";

/// Serialize traces to a string in the trace file format.
pub fn write_trace_string(config: &MobilityConfig, traces: &[NodeTrace]) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    let _ = writeln!(out, "#model={}", config.model);
    let _ = writeln!(out, "#width={:.6}", config.width);
    let _ = writeln!(out, "#height={:.6}", config.height);
    let _ = writeln!(out, "#v_min={:.6}", config.v_min);
    let _ = writeln!(out, "#v_max={:.6}", config.v_max);
    let _ = writeln!(out, "#pause_time={:.6}", config.pause_time);
    let _ = writeln!(out, "#block_length={:.6}", config.block_length);
    let _ = writeln!(out, "#duration={:.6}", config.duration);
    let _ = writeln!(out, "#node_count={}", config.node_count);
    let _ = writeln!(out, "#seed={}", config.seed);
    for trace in traces {
        for w in &trace.waypoints {
            let _ = writeln!(
                out,
                "{} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6}",
                trace.node_id, w.depart_time, w.from.x, w.from.y, w.to.x, w.to.y, w.speed
            );
        }
    }
    out
}

/// Write traces (and the generating config) to `path`.
pub fn write_trace(config: &MobilityConfig, traces: &[NodeTrace], path: &Path) -> Result<()> {
    fs::write(path, write_trace_string(config, traces))?;
    Ok(())
}

/// Read a trace file back into its config and per-node traces.
///
/// Traces come back ordered by node id. Nodes without any waypoint line
/// are absent from the result.
pub fn read_trace(path: &Path) -> Result<(MobilityConfig, Vec<NodeTrace>)> {
    let text = fs::read_to_string(path)?;
    parse_trace(&text, &path.display().to_string())
}

/// Parse trace file contents.
pub(crate) fn parse_trace(text: &str, path: &str) -> Result<(MobilityConfig, Vec<NodeTrace>)> {
    let fail = |line: usize, message: String| Error::FileFormat {
        path: path.to_string(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == TRACE_HEADER => {}
        Some((_, first)) => {
            return Err(fail(1, format!("expected `{TRACE_HEADER}`, found `{first}`")))
        }
        None => return Err(fail(1, "empty file".to_string())),
    }

    let mut header: Vec<(String, String)> = Vec::new();
    let mut body_start = None;
    let mut rest = Vec::new();
    for (i, line) in lines {
        if let Some(kv) = line.strip_prefix('#') {
            if body_start.is_some() {
                return Err(fail(i + 1, "header line after data".to_string()));
            }
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| fail(i + 1, format!("malformed header line `{line}`")))?;
            header.push((k.to_string(), v.to_string()));
        } else if !line.trim().is_empty() {
            body_start.get_or_insert(i);
            rest.push((i, line));
        }
    }

    let lookup = |key: &str| -> Result<&str> {
        header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| fail(1, format!("missing header key `{key}`")))
    };
    fn parse_field<T: FromStr>(raw: &str, key: &str) -> Result<T> {
        raw.parse()
            .map_err(|_| Error::input(format!("bad value `{raw}` for header key `{key}`")))
    }

    let config = MobilityConfig {
        model: MobilityModel::from_str(lookup("model")?)?,
        width: parse_field(lookup("width")?, "width")?,
        height: parse_field(lookup("height")?, "height")?,
        v_min: parse_field(lookup("v_min")?, "v_min")?,
        v_max: parse_field(lookup("v_max")?, "v_max")?,
        pause_time: parse_field(lookup("pause_time")?, "pause_time")?,
        block_length: parse_field(lookup("block_length")?, "block_length")?,
        duration: parse_field(lookup("duration")?, "duration")?,
        node_count: parse_field(lookup("node_count")?, "node_count")?,
        seed: parse_field(lookup("seed")?, "seed")?,
    };
    config.validate()?;

    let mut per_node: Vec<Vec<Waypoint>> = vec![Vec::new(); config.node_count];
    for (i, line) in rest {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 7 {
            return Err(fail(
                i + 1,
                format!("expected 7 fields, found {}", fields.len()),
            ));
        }
        let node_id: usize = fields[0]
            .parse()
            .map_err(|_| fail(i + 1, format!("bad node id `{}`", fields[0])))?;
        if node_id >= config.node_count {
            return Err(fail(
                i + 1,
                format!("node id {node_id} >= node_count {}", config.node_count),
            ));
        }
        let mut nums = [0.0f64; 6];
        for (slot, raw) in nums.iter_mut().zip(&fields[1..]) {
            *slot = raw
                .parse()
                .map_err(|_| fail(i + 1, format!("bad number `{raw}`")))?;
        }
        let w = Waypoint {
            depart_time: nums[0],
            from: Point::new(nums[1], nums[2]),
            to: Point::new(nums[3], nums[4]),
            speed: nums[5],
        };
        if !w.depart_time.is_finite() || w.depart_time < 0.0 {
            return Err(fail(i + 1, format!("bad depart time {}", w.depart_time)));
        }
        if !w.from.is_finite() || !w.to.is_finite() || !w.speed.is_finite() || w.speed < 0.0 {
            return Err(fail(i + 1, "non-finite or negative waypoint field".to_string()));
        }
        if !w.is_pause() && w.speed == 0.0 {
            return Err(fail(i + 1, "zero speed on a moving leg".to_string()));
        }
        if let Some(prev) = per_node[node_id].last() {
            if w.depart_time < prev.depart_time {
                return Err(fail(
                    i + 1,
                    format!("departures out of order for node {node_id}"),
                ));
            }
        }
        per_node[node_id].push(w);
    }

    let traces = per_node
        .into_iter()
        .enumerate()
        .filter(|(_, wps)| !wps.is_empty())
        .map(|(node_id, waypoints)| NodeTrace {
            node_id,
            duration: config.duration,
            waypoints,
        })
        .collect();
    Ok((config, traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::generate_traces;

    fn tmpfile(name: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        (dir, path)
    }

    #[test]
    fn empty_node_set_round_trips() {
        let config = MobilityConfig::new(MobilityModel::RandomWaypoint, 3, 25.0, 10.0, 1);
        let (_dir, path) = tmpfile("empty.trace");
        write_trace(&config, &[], &path).unwrap();
        let (config_back, traces) = read_trace(&path).unwrap();
        assert_eq!(config_back, config);
        assert!(traces.is_empty());
    }

    #[test]
    fn single_waypoint_round_trips_exactly() {
        let config = MobilityConfig::new(MobilityModel::RandomWaypoint, 1, 25.0, 10.0, 1);
        let trace = NodeTrace {
            node_id: 0,
            duration: 10.0,
            waypoints: vec![Waypoint::new(
                0.0,
                Point::new(1.25, 2.5),
                Point::new(901.333333, 17.000001),
                12.345678,
            )],
        };
        let (_dir, path) = tmpfile("one.trace");
        write_trace(&config, std::slice::from_ref(&trace), &path).unwrap();
        let (_, traces) = read_trace(&path).unwrap();
        assert_eq!(traces, vec![trace]);
    }

    #[test]
    fn generated_traces_round_trip_bit_exactly() {
        for model in MobilityModel::ALL {
            let config = MobilityConfig::new(model, 100, 25.0, 50.0, 77);
            let traces = generate_traces(&config).unwrap();
            let (_dir, path) = tmpfile("rt.trace");
            write_trace(&config, &traces, &path).unwrap();
            let (config_back, traces_back) = read_trace(&path).unwrap();
            assert_eq!(config_back, config);
            assert_eq!(traces_back, traces, "{model}: round trip changed a field");
            // And the second serialization is byte-identical.
            let again = write_trace_string(&config_back, &traces_back);
            assert_eq!(again, write_trace_string(&config, &traces));
        }
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let config = MobilityConfig::new(MobilityModel::RandomWaypoint, 2, 25.0, 10.0, 1);
        let good = write_trace_string(&config, &[]);

        let with_bad_line = format!("{good}0 0.0 1.0 2.0 3.0\n");
        let err = parse_trace(&with_bad_line, "t").unwrap_err();
        assert!(matches!(err, Error::FileFormat { line: 12, .. }), "{err}");

        let with_bad_id = format!("{good}9 0.000000 0.0 0.0 1.0 1.0 2.0\n");
        assert!(parse_trace(&with_bad_id, "t").is_err());

        let wrong_magic = good.replace("v1", "v9");
        assert!(parse_trace(&wrong_magic, "t").is_err());
    }
}
