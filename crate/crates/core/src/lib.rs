//! Symbolic online monitoring of stream specifications under uncertain readings.

pub mod harness;
pub mod interval;
pub mod monitor;
pub mod pruning;
pub mod rational;
pub mod solver;
pub mod spec;
pub mod symbolic;
