//! Bootstrap distribution of the grid-search optimum.
//!
//! Games are priced once against the chronological index of the original
//! dataset; a resample reuses those prices, so a game drawn twice carries the
//! same probabilities both times. Iteration `k` draws from its own stream
//! (`seed ^ k`) and results are gathered by iteration index, which keeps the
//! output identical for any number of worker threads.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{compile_all, evaluate, Grid, Optimum};
use super::SearchError;
use crate::backtest::{price_games, PricedGame};
use crate::ingest::Dataset;
use crate::model::ProbabilityModel;
use crate::rng::stream_rng;
use crate::winprob::SpreadIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resampling {
    /// Uniform draws with replacement, as many as there are games.
    #[default]
    WithReplacement,
    /// Every game exactly once; the optimum equals a plain grid search.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub iterations: usize,
    pub seed: u64,
    pub resampling: Resampling,
}

impl BootstrapConfig {
    pub fn new(iterations: usize, seed: u64) -> Self {
        BootstrapConfig {
            iterations,
            seed,
            resampling: Resampling::WithReplacement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapSample {
    pub iteration: usize,
    pub optimum: Optimum,
}

/// Bootstrap over a dataset priced against `index`.
pub fn bootstrap(
    dataset: &Dataset,
    grid: &Grid,
    model: ProbabilityModel,
    index: &SpreadIndex,
    config: &BootstrapConfig,
) -> Result<Vec<BootstrapSample>, SearchError> {
    let priced = price_games(&dataset.games, index, model);
    bootstrap_priced(&priced, grid, config)
}

pub fn bootstrap_priced(
    priced: &[PricedGame],
    grid: &Grid,
    config: &BootstrapConfig,
) -> Result<Vec<BootstrapSample>, SearchError> {
    if config.iterations == 0 {
        return Err(SearchError::NoIterations);
    }
    if priced.is_empty() {
        return Err(SearchError::EmptyDataset);
    }
    let compiled = compile_all(priced, grid);
    let n = priced.len();
    let samples = (0..config.iterations)
        .into_par_iter()
        .map(|k| {
            let picks: Vec<usize> = match config.resampling {
                Resampling::WithReplacement => {
                    let mut rng = stream_rng(config.seed, k as u64);
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                }
                Resampling::Identity => (0..n).collect(),
            };
            let games = picks.iter().filter_map(|&i| compiled[i].as_ref());
            BootstrapSample {
                iteration: k,
                optimum: evaluate(games, n, grid).optimum,
            }
        })
        .collect();
    Ok(samples)
}

pub const SAMPLES_CSV_HEADER: [&str; 5] = ["iteration", "opt_roi", "opt_epsilon", "opt_ev_threshold", "frac_bet"];

pub fn write_samples_csv<W: Write>(samples: &[BootstrapSample], writer: W) -> Result<(), SearchError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SAMPLES_CSV_HEADER)?;
    for s in samples {
        w.write_record([
            s.iteration.to_string(),
            s.optimum.roi_pct.to_string(),
            s.optimum.epsilon.to_string(),
            s.optimum.ev_threshold.to_string(),
            s.optimum.frac_bet.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GameVictor;
    use crate::search::grid::grid_search_priced;
    use crate::valuation::Payout;
    use chrono::{TimeZone, Utc};

    fn priced(n: usize) -> Vec<PricedGame> {
        (0..n)
            .map(|i| {
                let pf = 0.35 + 0.03 * (i % 10) as f64;
                PricedGame {
                    game_id: format!("g{i}"),
                    start_time: Utc.with_ymd_and_hms(2016, 1, 1, 0, 0, 0).unwrap(),
                    year: 2016,
                    victor: if i % 3 == 0 { GameVictor::Underdog } else { GameVictor::Favorite },
                    p_favorite: Some(pf),
                    p_underdog: Some(1.0 - pf),
                    payout_favorite: Payout::new(0.6 + 0.1 * (i % 7) as f64),
                    payout_underdog: Payout::new(1.1 + 0.15 * (i % 5) as f64),
                }
            })
            .collect()
    }

    fn grid() -> Grid {
        Grid::stepped(0.5, 0.05, 0.5, 0.02).unwrap()
    }

    #[test]
    fn identity_resample_equals_grid_search() {
        let p = priced(40);
        let cfg = BootstrapConfig {
            iterations: 3,
            seed: 1,
            resampling: Resampling::Identity,
        };
        let s = bootstrap_priced(&p, &grid(), &cfg).unwrap();
        let direct = grid_search_priced(&p, &grid()).optimum;
        assert!(s.iter().all(|x| x.optimum == direct));
    }

    #[test]
    fn single_game() {
        let p = priced(1);
        let s = bootstrap_priced(&p, &grid(), &BootstrapConfig::new(1, 5)).unwrap();
        assert_eq!(s[0].optimum, grid_search_priced(&p, &grid()).optimum);
    }

    #[test]
    fn reproducible_across_workers() {
        let p = priced(60);
        let cfg = BootstrapConfig::new(30, 99);
        let a = bootstrap_priced(&p, &grid(), &cfg).unwrap();
        let b = crate::rng::with_workers(Some(1), || bootstrap_priced(&p, &grid(), &cfg).unwrap());
        let c = crate::rng::with_workers(Some(4), || bootstrap_priced(&p, &grid(), &cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert!(a.iter().enumerate().all(|(i, s)| s.iteration == i));
        assert!(a.iter().all(|s| (0.0..=1.0).contains(&s.optimum.frac_bet)));
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(matches!(
            bootstrap_priced(&priced(3), &grid(), &BootstrapConfig::new(0, 1)),
            Err(SearchError::NoIterations)
        ));
        assert!(matches!(
            bootstrap_priced(&[], &grid(), &BootstrapConfig::new(1, 1)),
            Err(SearchError::EmptyDataset)
        ));
    }

    #[test]
    fn csv_dump() {
        let s = bootstrap_priced(&priced(10), &grid(), &BootstrapConfig::new(4, 2)).unwrap();
        let mut out = Vec::new();
        write_samples_csv(&s, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().next().unwrap(), "iteration,opt_roi,opt_epsilon,opt_ev_threshold,frac_bet");
        assert_eq!(text.lines().count(), 5);
    }
}
