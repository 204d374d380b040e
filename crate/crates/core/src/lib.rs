//! Cooperative population search on NK and Ising fitness landscapes.
//!
//! The crate is organized bottom-up:
//!
//! - [`landscape`]: NK and Ising landscapes, exact optimization and
//!   enumeration statistics, and the binary landscape file format.
//! - [`search`]: imitative learning, asexual and sexual genetic algorithms,
//!   blind search, and the random adaptive walk.
//! - [`analytics`]: closed-form blind-search baselines and scaling fits.
//! - [`harness`]: ensembles, parameter grids, parallel execution and
//!   aggregation into cost and trace tables.

pub mod analytics;
pub mod error;
pub mod genotype;
pub mod harness;
pub mod landscape;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use genotype::Genotype;
pub use harness::{ConfigPoint, CostRow, CostTable, Ensemble, ExperimentPlan, TraceRow};
pub use landscape::{AnyLandscape, Family, IsingLandscape, IsingVariant, Landscape, LandscapeSpec, NkLandscape};
pub use search::{Algorithm, Outcome, RunResult, SearchConfig};
