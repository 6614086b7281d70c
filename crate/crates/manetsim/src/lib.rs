//! Deterministic MANET multicast benchmarking simulator.
//!
//! The crate generates node mobility traces under three models (Random
//! Waypoint, City Section, Manhattan), snapshots unit-disk topologies at a
//! fixed interval, builds minimum-hop (BFS traceback) and minimum-edge
//! (Steiner heuristic) multicast trees under a least-overhead reuse
//! policy, and reports tree connectivity, lifetime, edge count, and hop
//! count metrics across an experiment matrix.
//!
//! Everything is reproducible: a scenario is a pure function of its
//! configuration and a 64-bit seed.

pub mod charts;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod mobility;
pub mod rng;
pub mod session;
pub mod trees;
pub mod verify;

pub use error::{Error, Result};
