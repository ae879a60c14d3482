//! Cover-time bounds for simple random walks on finite multigraphs.
//!
//! The crate computes the resistance-metric entropy upper bound on the cover
//! time, the matching packing and Matthews lower bounds, and checks them
//! against seeded Monte Carlo simulation and an exact dynamic-programming
//! oracle on small graphs. Samplers for the random-graph families where the
//! bound is sharp live in [`generators`]; [`experiments`] runs the scaling
//! and edge-addition studies behind the `covertime` binary.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod resistance;
pub mod walk;


pub use error::{Error, Result};
pub use graph::{ComponentView, MultiGraph};
pub use resistance::{HittingTimes, OracleConfig, ResistanceOracle};
pub use bounds::{analyze, analyze_with, greedy_packing, matthews_lower, psi_bound, BoundOptions, BoundReport, CoveringProfile};
pub use walk::{exact_cover_time, simulate, ExactCover, Quantity, SimConfig, StartPolicy, WalkEstimate};

