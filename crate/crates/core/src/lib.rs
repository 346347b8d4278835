//! Simulation and verification toolkit for the D- and T-partitions of
//! Brownian bridge, random-mapping walks, stable subordinators and the
//! associated point processes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bridge;
pub mod cli;
pub mod error;
pub mod io;
pub mod mappings;
pub mod numerics;
pub mod partitions;
pub mod pointproc;
pub mod randkit;
pub mod rng;
pub mod statlab;
pub mod suites;

pub use error::{Error, Result};
pub use rng::RngStream;
