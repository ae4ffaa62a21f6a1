//! Std companion to `dcfci-core`: a shared CI-test cache, a rayon executor,
//! text formats for data, graphs and reports, SEM simulation and the
//! benchmark harness behind the `dcfci` binary.

pub mod bench;
pub mod cache;
pub mod cli;
pub mod io;
pub mod parallel;
pub mod sim;

pub use cache::CachedDataSource;
pub use parallel::RayonExecutor;
