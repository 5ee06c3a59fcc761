//! Randomized control strategies.
//!
//! Two coin-flip bettors give the reference returns a real strategy has to
//! beat: one picks a side against the spread at the standard 100/110 price,
//! the other picks a moneyline side with a fixed probability of taking the
//! favorite. Each is replicated many times with independent seeds to form a
//! percentile interval of the ROI.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Dataset;
use crate::model::{GameRecord, GameVictor, Side};
use crate::rng::{stream_rng, StreamRng};
use crate::stats::{quantile_sorted, sorted_copy};
use crate::sum::{exact_sum, ExactSum};
use crate::valuation::{best_payout, ValuationError};

/// Profit per $1 on a winning spread bet at standard -110 pricing.
pub const SPREAD_PAYOUT: f64 = 100.0 / 110.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("dataset contains no games")]
    EmptyDataset,
    #[error("game {0} has no spread quote")]
    MissingSpread(String),
    #[error(transparent)]
    NoQuote(#[from] ValuationError),
    #[error("invalid baseline config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    SpreadEqual,
    MoneylineEqual,
    MoneylineTilted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    /// Probability of picking the favorite.
    pub theta: f64,
    pub replications: usize,
    pub rng_seed: u64,
}

impl BaselineConfig {
    pub fn new(kind: BaselineKind, theta: f64, replications: usize, rng_seed: u64) -> Result<Self, BaselineError> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(BaselineError::InvalidConfig(format!("theta {theta} outside [0, 1]")));
        }
        if replications == 0 {
            return Err(BaselineError::InvalidConfig("replications must be >= 1".into()));
        }
        if kind == BaselineKind::SpreadEqual && theta != 0.5 {
            return Err(BaselineError::InvalidConfig("spread baseline picks sides with probability 0.5".into()));
        }
        Ok(BaselineConfig {
            kind,
            theta,
            replications,
            rng_seed,
        })
    }

    /// Equal-odds spread picks.
    pub fn spread(replications: usize, rng_seed: u64) -> Self {
        BaselineConfig {
            kind: BaselineKind::SpreadEqual,
            theta: 0.5,
            replications,
            rng_seed,
        }
    }

    /// Moneyline picks; the kind follows from whether `theta` is 0.5.
    pub fn moneyline(theta: f64, replications: usize, rng_seed: u64) -> Result<Self, BaselineError> {
        let kind = if theta == 0.5 {
            BaselineKind::MoneylineEqual
        } else {
            BaselineKind::MoneylineTilted
        };
        BaselineConfig::new(kind, theta, replications, rng_seed)
    }
}

/// Result of a game against the spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cover {
    Favorite,
    Underdog,
    Push,
}

/// Cover outcome using the best line available to each side: the smallest
/// handicap for the favorite and the largest cushion for the underdog. The
/// favorite test runs first.
pub fn spread_cover(game: &GameRecord) -> Result<Cover, BaselineError> {
    let best_fav = game
        .quotes
        .iter()
        .map(|q| q.spread_for(Side::Favorite))
        .max_by(f64::total_cmp)
        .ok_or_else(|| BaselineError::MissingSpread(game.game_id.clone()))?;
    let best_dog = game
        .quotes
        .iter()
        .map(|q| q.spread_for(Side::Underdog))
        .max_by(f64::total_cmp)
        .expect("non-empty quotes");
    let pf = f64::from(game.favorite_points);
    let pu = f64::from(game.underdog_points);
    Ok(if pf + best_fav > pu {
        Cover::Favorite
    } else if pu + best_dog > pf {
        Cover::Underdog
    } else {
        Cover::Push
    })
}

/// Per-game inputs of the moneyline baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoneylineOutcome {
    pub victor: GameVictor,
    pub payout_favorite: f64,
    pub payout_underdog: f64,
}

pub fn spread_outcomes(dataset: &Dataset) -> Result<Vec<Cover>, BaselineError> {
    if dataset.games.is_empty() {
        return Err(BaselineError::EmptyDataset);
    }
    dataset.games.iter().map(spread_cover).collect()
}

pub fn moneyline_outcomes(dataset: &Dataset) -> Result<Vec<MoneylineOutcome>, BaselineError> {
    if dataset.games.is_empty() {
        return Err(BaselineError::EmptyDataset);
    }
    dataset
        .games
        .iter()
        .map(|g| {
            Ok(MoneylineOutcome {
                victor: g.victor(),
                payout_favorite: best_payout(g, Side::Favorite)?.per_dollar(),
                payout_underdog: best_payout(g, Side::Underdog)?.per_dollar(),
            })
        })
        .collect()
}

/// One replication of random spread picks over prepared outcomes.
pub fn spread_roi(outcomes: &[Cover], rng: &mut StreamRng) -> f64 {
    let mut total = ExactSum::new();
    for &c in outcomes {
        let pick_favorite = rng.gen::<f64>() < 0.5;
        let w = match c {
            Cover::Push => 0.0,
            Cover::Favorite if pick_favorite => SPREAD_PAYOUT,
            Cover::Underdog if !pick_favorite => SPREAD_PAYOUT,
            _ => -1.0,
        };
        total.add(w);
    }
    100.0 * total.value() / outcomes.len() as f64
}

/// One replication of random moneyline picks; the favorite is picked with
/// probability `theta`.
pub fn moneyline_roi(outcomes: &[MoneylineOutcome], theta: f64, rng: &mut StreamRng) -> f64 {
    let mut total = ExactSum::new();
    for o in outcomes {
        let pick_favorite = rng.gen::<f64>() < theta;
        let w = match (o.victor, pick_favorite) {
            (GameVictor::Tie, _) => 0.0,
            (GameVictor::Favorite, true) => o.payout_favorite,
            (GameVictor::Underdog, false) => o.payout_underdog,
            _ => -1.0,
        };
        total.add(w);
    }
    100.0 * total.value() / outcomes.len() as f64
}

/// ROI of one random spread-betting pass over the dataset.
pub fn spread_random_roi(dataset: &Dataset, seed: u64) -> Result<f64, BaselineError> {
    let outcomes = spread_outcomes(dataset)?;
    Ok(spread_roi(&outcomes, &mut stream_rng(seed, 0)))
}

/// ROI of one random moneyline-betting pass over the dataset.
pub fn moneyline_random_roi(dataset: &Dataset, config: &BaselineConfig, seed: u64) -> Result<f64, BaselineError> {
    let outcomes = moneyline_outcomes(dataset)?;
    Ok(moneyline_roi(&outcomes, config.theta, &mut stream_rng(seed, 0)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub mean_roi: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub rois: Vec<f64>,
}

/// Runs `op` once per replication with seed `seed ^ r` and summarizes the
/// ROI distribution: mean and 2.5th/97.5th percentiles.
///
/// Replications run on the current rayon pool; results are gathered in
/// replication order, so the summary is independent of scheduling.
pub fn replicate_ci<F>(op: F, replications: usize, seed: u64) -> Result<ReplicationSummary, BaselineError>
where
    F: Fn(u64) -> Result<f64, BaselineError> + Sync,
{
    if replications == 0 {
        return Err(BaselineError::InvalidConfig("replications must be >= 1".into()));
    }
    let rois: Vec<f64> = (0..replications as u64)
        .into_par_iter()
        .map(|r| op(seed ^ r))
        .collect::<Result<_, _>>()?;
    let sorted = sorted_copy(&rois);
    Ok(ReplicationSummary {
        mean_roi: exact_sum(rois.iter().copied()) / rois.len() as f64,
        ci_low: quantile_sorted(&sorted, 0.025),
        ci_high: quantile_sorted(&sorted, 0.975),
        rois,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineReport {
    pub league: String,
    pub kind: BaselineKind,
    pub theta: f64,
    pub replications: usize,
    pub seed: u64,
    /// Every game is bet once per replication.
    pub games: usize,
    pub mean_roi: f64,
    pub ci95: [f64; 2],
}

/// Replicates the configured baseline over a dataset.
pub fn run_baseline(dataset: &Dataset, config: &BaselineConfig) -> Result<BaselineReport, BaselineError> {
    let summary = match config.kind {
        BaselineKind::SpreadEqual => {
            let outcomes = spread_outcomes(dataset)?;
            replicate_ci(
                |s| Ok(spread_roi(&outcomes, &mut stream_rng(s, 0))),
                config.replications,
                config.rng_seed,
            )?
        }
        BaselineKind::MoneylineEqual | BaselineKind::MoneylineTilted => {
            let outcomes = moneyline_outcomes(dataset)?;
            replicate_ci(
                |s| Ok(moneyline_roi(&outcomes, config.theta, &mut stream_rng(s, 0))),
                config.replications,
                config.rng_seed,
            )?
        }
    };
    Ok(BaselineReport {
        league: dataset.league.to_string(),
        kind: config.kind,
        theta: config.theta,
        replications: config.replications,
        seed: config.rng_seed,
        games: dataset.games.len(),
        mean_roi: summary.mean_roi,
        ci95: [summary.ci_low, summary.ci_high],
    })
}
