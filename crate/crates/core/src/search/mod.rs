//! Parameter search and resampling.
//!
//! [`grid_search`] maximizes total return over an (epsilon, EV threshold)
//! grid; [`bootstrap`] repeats that search on resampled seasons. Interval
//! estimates over the bootstrap optima and the joint Bonferroni test live in
//! [`interval`] and [`bonferroni`]; [`synth`] generates markets with a known
//! planted edge for end-to-end checks.
//!
//! Quantiles are type 7 (linear interpolation between order statistics).

pub mod bonferroni;
pub mod bootstrap;
pub mod grid;
pub mod interval;
pub mod synth;

use thiserror::Error;

pub use bonferroni::{bonferroni_report, BonferroniReport};
pub use bootstrap::{bootstrap, bootstrap_priced, write_samples_csv, BootstrapConfig, BootstrapSample, Resampling};
pub use grid::{grid_search, grid_search_priced, Grid, GridResult, Optimum};
pub use interval::{hdi_interval, percentile_interval, Interval, IntervalMethod, IntervalReport, IntervalVariable, Sided};
pub use synth::{synth_market, SpreadLevel, SynthSpec};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dataset contains no games")]
    EmptyDataset,
    #[error("iterations must be >= 1")]
    NoIterations,
    #[error("no samples")]
    EmptySamples,
    #[error("level {0} outside (0, 1)")]
    InvalidLevel(f64),
    #[error("missing league: {0}")]
    MissingLeague(String),
    #[error("interval level {level} is below the Bonferroni-adjusted level {required}")]
    InsufficientLevel { level: f64, required: f64 },
    #[error("invalid synthetic market spec: {0}")]
    InvalidSpec(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
