//! Random Waypoint generator.
//!
//! The node starts at a uniform random position, repeatedly picks a
//! uniform random target anywhere in the rectangle, travels to it on a
//! straight line at a speed drawn uniformly from `[v_min, v_max]`, and
//! pauses for the configured constant time before the next leg.

use rand::Rng;

use super::{quantize, sample_speed_interval, MobilityConfig, Waypoint};
use crate::graph::Point;
use crate::rng::SimRng;

pub(super) fn generate(config: &MobilityConfig, rng: &mut SimRng) -> Vec<Waypoint> {
    let mut waypoints = Vec::new();
    let mut pos = uniform_point(config, rng);
    let mut t = 0.0f64;
    while t < config.duration {
        let target = loop {
            let p = uniform_point(config, rng);
            // Identical target is a measure-zero draw after quantization;
            // skip it so every leg has positive length.
            if p != pos {
                break p;
            }
        };
        let speed = sample_speed_interval(rng, config.v_min, config.v_max);
        let leg = Waypoint::new(t, pos, target, speed);
        t = leg.arrival_time();
        pos = leg.to;
        waypoints.push(leg);
        if config.pause_time > 0.0 && t < config.duration {
            let pause = Waypoint::new(t, pos, pos, 0.0);
            waypoints.push(pause);
            t = pause.depart_time + config.pause_time;
        }
    }
    waypoints
}

fn uniform_point(config: &MobilityConfig, rng: &mut SimRng) -> Point {
    Point::new(
        quantize(rng.random_range(0.0..=config.width)),
        quantize(rng.random_range(0.0..=config.height)),
    )
}
