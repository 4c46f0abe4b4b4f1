pub mod classical;
pub mod config;
pub mod data;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod quantum;
pub mod runner;
pub mod train;
pub mod tensor;
