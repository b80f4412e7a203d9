//! Narrow escape times through funnel-shaped bottlenecks.
//!
//! Closed-form predictions live in [`asymptotics`], their numerical
//! companions in [`boundary_layer`], independent Monte Carlo checks in
//! [`mc_engine`], compartment chains in [`coarse_markov`] and the batch
//! runner behind the `netkit` binary in [`harness`].

pub mod asymptotics;
pub mod boundary_layer;
pub mod coarse_markov;
pub mod error;
pub mod mc_engine;
pub mod geometry;
pub mod harness;
pub mod numerics;

pub use error::{NetError, Result};
