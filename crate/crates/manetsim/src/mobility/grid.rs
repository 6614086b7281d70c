//! Street-grid mobility: City Section and Manhattan.
//!
//! The network is a lattice of square blocks; nodes sit on street
//! intersections and move only along streets. City Section travels whole
//! trips between random intersections on a least-travel-time path;
//! Manhattan decides motion one block at a time with the
//! straight/turn probabilities below.

use rand::Rng;

use super::{quantize, sample_speed_grid, MobilityConfig, Waypoint};
use crate::graph::Point;
use crate::rng::SimRng;

/// Intersection coordinates in block units: `(ix, iy)` with
/// `0 <= ix <= cols` and `0 <= iy <= rows`.
pub(crate) type Intersection = (usize, usize);

/// Lattice geometry shared by both grid models.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StreetGrid {
    /// Number of blocks along x (so `cols + 1` intersections per row).
    pub cols: usize,
    /// Number of blocks along y.
    pub rows: usize,
    pub block: f64,
}

impl StreetGrid {
    pub fn from_config(config: &MobilityConfig) -> Self {
        StreetGrid {
            cols: (config.width / config.block_length).round() as usize,
            rows: (config.height / config.block_length).round() as usize,
            block: config.block_length,
        }
    }

    pub fn point(&self, cell: Intersection) -> Point {
        Point::new(
            quantize(cell.0 as f64 * self.block),
            quantize(cell.1 as f64 * self.block),
        )
    }

    pub fn random_intersection(&self, rng: &mut SimRng) -> Intersection {
        (
            rng.random_range(0..=self.cols),
            rng.random_range(0..=self.rows),
        )
    }

    pub fn step(&self, cell: Intersection, dir: Direction) -> Option<Intersection> {
        let (ix, iy) = cell;
        match dir {
            Direction::East if ix < self.cols => Some((ix + 1, iy)),
            Direction::West if ix > 0 => Some((ix - 1, iy)),
            Direction::North if iy < self.rows => Some((ix, iy + 1)),
            Direction::South if iy > 0 => Some((ix, iy - 1)),
            _ => None,
        }
    }
}

/// Compass direction of motion. +x is east, +y is north.
///
/// Turns are relative to the heading:
///
/// | heading | left  | right |
/// |---------|-------|-------|
/// | east    | north | south |
/// | north   | west  | east  |
/// | west    | south | north |
/// | south   | east  | west  |
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    East,
    West,
    North,
    South,
}

impl Direction {
    /// Fixed order used when drawing uniformly over feasible directions.
    pub const ALL: [Direction; 4] = [
        Direction::East,
        Direction::West,
        Direction::North,
        Direction::South,
    ];

    pub fn left(self) -> Direction {
        match self {
            Direction::East => Direction::North,
            Direction::North => Direction::West,
            Direction::West => Direction::South,
            Direction::South => Direction::East,
        }
    }

    pub fn right(self) -> Direction {
        match self {
            Direction::East => Direction::South,
            Direction::South => Direction::West,
            Direction::West => Direction::North,
            Direction::North => Direction::East,
        }
    }
}

/// First Manhattan move: uniform over the directions that stay in the
/// network (4 ways mid-grid, 3 on an edge, 2 in a corner).
pub(crate) fn manhattan_initial_direction(
    grid: &StreetGrid,
    cell: Intersection,
    rng: &mut SimRng,
) -> Direction {
    let feasible: Vec<Direction> = Direction::ALL
        .into_iter()
        .filter(|&d| grid.step(cell, d).is_some())
        .collect();
    feasible[rng.random_range(0..feasible.len())]
}

/// Subsequent Manhattan move, relative to the current heading.
///
/// Reversal is never an option. With straight and both turns feasible:
/// 50% straight, 25% per turn. With two feasible choices: 50% each.
/// With one: that one.
pub(crate) fn manhattan_next_direction(
    grid: &StreetGrid,
    cell: Intersection,
    heading: Direction,
    rng: &mut SimRng,
) -> Direction {
    let straight = grid.step(cell, heading).map(|_| heading);
    let left = grid.step(cell, heading.left()).map(|_| heading.left());
    let right = grid.step(cell, heading.right()).map(|_| heading.right());
    match (straight, left, right) {
        (Some(s), Some(l), Some(r)) => {
            let u: f64 = rng.random_range(0.0..1.0);
            if u < 0.50 {
                s
            } else if u < 0.75 {
                l
            } else {
                r
            }
        }
        (Some(a), Some(b), None) | (Some(a), None, Some(b)) | (None, Some(a), Some(b)) => {
            if rng.random_range(0.0..1.0) < 0.5 {
                a
            } else {
                b
            }
        }
        (Some(only), None, None) | (None, Some(only), None) | (None, None, Some(only)) => only,
        (None, None, None) => unreachable!("heading into a dead end is impossible on a lattice"),
    }
}

/// A City Section trip: a fresh target intersection and the
/// least-travel-time path to it as maximal straight runs.
///
/// All streets share the speed limit and the trip runs at a single
/// speed, so least time means fewest blocks; among the equal-time
/// shortest paths we step along the axis with the larger remaining
/// displacement first, ties going to the horizontal axis. A draw equal
/// to the current intersection is a zero-time trip and is immediately
/// redrawn.
pub(crate) fn city_section_trip(
    grid: &StreetGrid,
    from: Intersection,
    rng: &mut SimRng,
) -> (Intersection, Vec<(Intersection, Intersection)>) {
    let target = loop {
        let t = grid.random_intersection(rng);
        if t != from {
            break t;
        }
    };
    let runs = staircase_runs(from, target);
    (target, runs)
}

/// Greedy staircase between two intersections, merged into maximal
/// straight segments. The step rule is the documented tie-break: larger
/// remaining |displacement| first, horizontal on ties.
fn staircase_runs(
    from: Intersection,
    to: Intersection,
) -> Vec<(Intersection, Intersection)> {
    let mut runs = Vec::new();
    let mut cur = (from.0 as i64, from.1 as i64);
    let target = (to.0 as i64, to.1 as i64);
    let mut run_start = cur;
    let mut run_axis: Option<bool> = None; // true = x axis
    while cur != target {
        let rem_x = target.0 - cur.0;
        let rem_y = target.1 - cur.1;
        let step_x = rem_x.abs() >= rem_y.abs();
        if run_axis != Some(step_x) {
            if run_axis.is_some() {
                runs.push((
                    (run_start.0 as usize, run_start.1 as usize),
                    (cur.0 as usize, cur.1 as usize),
                ));
            }
            run_start = cur;
            run_axis = Some(step_x);
        }
        if step_x {
            cur.0 += rem_x.signum();
        } else {
            cur.1 += rem_y.signum();
        }
    }
    runs.push((
        (run_start.0 as usize, run_start.1 as usize),
        (cur.0 as usize, cur.1 as usize),
    ));
    runs
}

pub(super) fn generate_city_section(config: &MobilityConfig, rng: &mut SimRng) -> Vec<Waypoint> {
    let grid = StreetGrid::from_config(config);
    let mut waypoints = Vec::new();
    let mut cur = grid.random_intersection(rng);
    let mut t = 0.0f64;
    'outer: while t < config.duration {
        let (target, runs) = city_section_trip(&grid, cur, rng);
        let speed = sample_speed_grid(rng, config);
        for (a, b) in runs {
            let leg = Waypoint::new(t, grid.point(a), grid.point(b), speed);
            t = leg.arrival_time();
            waypoints.push(leg);
            if t >= config.duration {
                break 'outer;
            }
        }
        cur = target;
        if config.pause_time > 0.0 && t < config.duration {
            let pause = Waypoint::new(t, grid.point(cur), grid.point(cur), 0.0);
            waypoints.push(pause);
            t = pause.depart_time + config.pause_time;
        }
    }
    waypoints
}

pub(super) fn generate_manhattan(config: &MobilityConfig, rng: &mut SimRng) -> Vec<Waypoint> {
    let grid = StreetGrid::from_config(config);
    let mut waypoints = Vec::new();
    let mut cur = grid.random_intersection(rng);
    let mut heading = manhattan_initial_direction(&grid, cur, rng);
    let mut t = 0.0f64;
    while t < config.duration {
        let speed = sample_speed_grid(rng, config);
        let next = grid
            .step(cur, heading)
            .expect("chosen heading is always feasible");
        let leg = Waypoint::new(t, grid.point(cur), grid.point(next), speed);
        t = leg.arrival_time();
        waypoints.push(leg);
        cur = next;
        if t >= config.duration {
            break;
        }
        heading = manhattan_next_direction(&grid, cur, heading, rng);
    }
    waypoints
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{generate_node_trace, MobilityConfig, MobilityModel};
    use crate::rng::scenario_rng;

    fn grid_config(model: MobilityModel, seed: u64) -> MobilityConfig {
        MobilityConfig::new(model, 1, 25.0, 500.0, seed)
    }

    fn grid10() -> StreetGrid {
        StreetGrid {
            cols: 10,
            rows: 10,
            block: 100.0,
        }
    }

    #[test]
    fn staircase_is_a_shortest_grid_path() {
        let runs = staircase_runs((0, 0), (3, 4));
        let total: i64 = runs
            .iter()
            .map(|&(a, b)| {
                (a.0 as i64 - b.0 as i64).abs() + (a.1 as i64 - b.1 as i64).abs()
            })
            .sum();
        assert_eq!(total, 7, "path length equals Manhattan distance");
        // Runs chain together and alternate axes.
        for pair in runs.windows(2) {
            assert_eq!(pair[0].1, pair[1].0);
        }
    }

    #[test]
    fn city_trip_travel_time_is_manhattan_distance_over_speed() {
        // Source (0,0), target (300,400) on a 100 m grid: 700 m of streets.
        let runs = staircase_runs((0, 0), (3, 4));
        let grid = grid10();
        let length: f64 = runs
            .iter()
            .map(|&(a, b)| grid.point(a).distance(&grid.point(b)))
            .sum();
        assert_eq!(length, 700.0);
        let v = 17.5;
        assert!((length / v - 40.0).abs() < 1e-12);
    }

    #[test]
    fn city_trip_redraws_degenerate_target() {
        let grid = grid10();
        let mut rng = scenario_rng(3);
        for _ in 0..500 {
            let from = grid.random_intersection(&mut rng);
            let (target, runs) = city_section_trip(&grid, from, &mut rng);
            assert_ne!(target, from, "degenerate trips are redrawn");
            assert!(!runs.is_empty());
            assert_eq!(runs[0].0, from);
            assert_eq!(runs.last().unwrap().1, target);
        }
    }

    /// Independent lattice BFS used as the shortest-path oracle.
    fn lattice_bfs_distance(grid: &StreetGrid, from: Intersection, to: Intersection) -> usize {
        use std::collections::VecDeque;
        let width = grid.cols + 1;
        let idx = |c: Intersection| c.1 * width + c.0;
        let mut dist = vec![usize::MAX; width * (grid.rows + 1)];
        let mut queue = VecDeque::new();
        dist[idx(from)] = 0;
        queue.push_back(from);
        while let Some(cell) = queue.pop_front() {
            if cell == to {
                return dist[idx(cell)];
            }
            for d in Direction::ALL {
                if let Some(next) = grid.step(cell, d) {
                    if dist[idx(next)] == usize::MAX {
                        dist[idx(next)] = dist[idx(cell)] + 1;
                        queue.push_back(next);
                    }
                }
            }
        }
        unreachable!("lattice is connected")
    }

    #[test]
    fn city_trip_paths_match_grid_bfs_oracle() {
        let grid = grid10();
        let mut rng = scenario_rng(88);
        for _ in 0..1000 {
            let from = grid.random_intersection(&mut rng);
            let (target, runs) = city_section_trip(&grid, from, &mut rng);
            let blocks: i64 = runs
                .iter()
                .map(|&(a, b)| {
                    (a.0 as i64 - b.0 as i64).abs() + (a.1 as i64 - b.1 as i64).abs()
                })
                .sum();
            assert_eq!(blocks as usize, lattice_bfs_distance(&grid, from, target));
        }
    }

    #[test]
    fn corner_arrival_has_single_forced_continuation() {
        let grid = grid10();
        let mut rng = scenario_rng(1);
        // Heading east into the south-east corner: straight exits, right
        // exits, only the left turn (north) stays in the network.
        for _ in 0..1000 {
            let d = manhattan_next_direction(&grid, (10, 0), Direction::East, &mut rng);
            assert_eq!(d, Direction::North);
        }
    }

    #[test]
    fn boundary_two_option_split_is_even() {
        let grid = grid10();
        let mut rng = scenario_rng(2);
        // Heading east into the east boundary mid-height: only the two
        // turns remain.
        let mut north = 0u32;
        let n = 100_000;
        for _ in 0..n {
            match manhattan_next_direction(&grid, (10, 5), Direction::East, &mut rng) {
                Direction::North => north += 1,
                Direction::South => {}
                other => panic!("infeasible direction {other:?}"),
            }
        }
        let freq = f64::from(north) / f64::from(n);
        assert!((freq - 0.5).abs() < 0.01, "north frequency {freq}");
    }

    #[test]
    fn mid_grid_straight_turn_frequencies() {
        let grid = grid10();
        let mut rng = scenario_rng(4);
        let (mut straight, mut left, mut right) = (0u32, 0u32, 0u32);
        let n = 100_000;
        for _ in 0..n {
            match manhattan_next_direction(&grid, (5, 5), Direction::East, &mut rng) {
                Direction::East => straight += 1,
                Direction::North => left += 1,
                Direction::South => right += 1,
                Direction::West => panic!("reversal is never allowed"),
            }
        }
        let f = |c: u32| f64::from(c) / f64::from(n);
        assert!((f(straight) - 0.50).abs() < 0.01);
        assert!((f(left) - 0.25).abs() < 0.01);
        assert!((f(right) - 0.25).abs() < 0.01);
    }

    #[test]
    fn grid_traces_stay_on_streets_and_span_one_block_for_manhattan() {
        for model in [MobilityModel::CitySection, MobilityModel::Manhattan] {
            let config = grid_config(model, 31);
            let trace = generate_node_trace(&config, 0).unwrap();
            for w in &trace.waypoints {
                if w.is_pause() {
                    continue;
                }
                let axis_aligned = w.from.x == w.to.x || w.from.y == w.to.y;
                assert!(axis_aligned, "{model}: diagonal segment");
                let len = w.from.distance(&w.to);
                let blocks = len / config.block_length;
                assert!(
                    (blocks - blocks.round()).abs() < 1e-9 && blocks >= 1.0,
                    "{model}: segment of {len} m is not a whole street run"
                );
                if model == MobilityModel::Manhattan {
                    assert_eq!(blocks.round() as usize, 1, "manhattan moves one block");
                }
                for p in [w.from, w.to] {
                    let on_x = (p.x / config.block_length).fract().abs() < 1e-9;
                    let on_y = (p.y / config.block_length).fract().abs() < 1e-9;
                    assert!(on_x && on_y, "{model}: waypoint off-grid at ({}, {})", p.x, p.y);
                }
            }
        }
    }

    #[test]
    fn degenerate_speed_pins_block_travel_time() {
        let mut config = grid_config(MobilityModel::Manhattan, 5);
        config.v_min = 20.0;
        config.v_max = 20.0;
        let trace = generate_node_trace(&config, 0).unwrap();
        for w in trace.waypoints.iter().filter(|w| !w.is_pause()) {
            assert_eq!(w.speed, 20.0);
            assert!((w.travel_time() - config.block_length / 20.0).abs() < 1e-9);
        }
    }
}
