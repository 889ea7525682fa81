//! Analog vector-matrix multiplication on simulated RRAM crossbars.

pub mod crossbar;
pub mod device;
pub mod digest;
pub mod matrix;
pub mod stats;
pub mod rng;
pub mod workload;
