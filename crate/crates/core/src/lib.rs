//! Leakage-free backtesting of moneyline betting strategies.
//!
//! Games are priced from the historical win rate of teams quoted at the same
//! point spread, using only games that started before the game being priced.
//! The crate covers dataset ingestion, the win-probability models, expected
//! value and the betting rule, chronological backtests, randomized baselines,
//! grid search with bootstrap resampling, interval estimation, and histogram
//! density grids for visualizing bootstrap output.

pub mod backtest;
pub mod baselines;
pub mod density;
pub mod ingest;
pub mod model;
pub mod rng;
pub mod search;
pub mod stats;
pub mod sum;
pub mod valuation;
pub mod winprob;

pub use model::{
    BetChoice, BetDecision, CasinoQuote, GameRecord, GameVictor, League, MoneylineOdds,
    ProbabilityModel, Side, StrategyParams,
};
