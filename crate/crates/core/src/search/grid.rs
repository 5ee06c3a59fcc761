//! Exhaustive (epsilon, EV threshold) search.
//!
//! Rather than replaying the rule once per cell, each game is reduced to the
//! grid region where it bets and what it pays there:
//!
//! * the probability branch fires for every epsilon below a cut-off, paying
//!   a fixed amount;
//! * otherwise the EV branch bets for every threshold below the game's best
//!   expected value, paying another fixed amount.
//!
//! Rows are then filled by moving games from the first set to the second as
//! epsilon grows and sweeping thresholds from the top down. All totals are
//! exact sums, so every cell equals the plain backtest at its parameters bit
//! for bit.

use std::io::Write;

use serde::Serialize;

use super::SearchError;
use crate::backtest::{price_games, PricedGame};
use crate::ingest::Dataset;
use crate::model::{BetChoice, ProbabilityModel, Side};
use crate::sum::ExactSum;
use crate::winprob::SpreadIndex;

pub const DEFAULT_EPSILON_MAX: f64 = 0.5;
pub const DEFAULT_EPSILON_STEP: f64 = 0.01;
pub const DEFAULT_EV_STEP: f64 = 0.001;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub epsilon_values: Vec<f64>,
    pub ev_values: Vec<f64>,
}

impl Grid {
    pub fn new(epsilon_values: Vec<f64>, ev_values: Vec<f64>) -> Result<Grid, SearchError> {
        check_axis("epsilon", &epsilon_values)?;
        check_axis("ev threshold", &ev_values)?;
        if let Some(&e) = epsilon_values.last() {
            if e > 0.5 {
                return Err(SearchError::InvalidGrid(format!("epsilon {e} exceeds 0.5")));
            }
        }
        Ok(Grid {
            epsilon_values,
            ev_values,
        })
    }

    /// `0, step, 2*step, ...` up to `max` on each axis.
    pub fn stepped(epsilon_max: f64, epsilon_step: f64, ev_max: f64, ev_step: f64) -> Result<Grid, SearchError> {
        Grid::new(stepped_axis(epsilon_max, epsilon_step)?, stepped_axis(ev_max, ev_step)?)
    }

    /// `n` evenly spaced values from 0 to `max` inclusive on each axis.
    pub fn by_counts(epsilon_max: f64, n_epsilon: usize, ev_max: f64, n_ev: usize) -> Result<Grid, SearchError> {
        Grid::new(counted_axis(epsilon_max, n_epsilon)?, counted_axis(ev_max, n_ev)?)
    }

    /// Epsilon in `[0, 0.5]` by 0.01 and thresholds in `[0, ev_max]` by
    /// 0.001, where `ev_max` is the largest priced expected value rounded up
    /// to the step.
    pub fn default_for(priced: &[PricedGame]) -> Grid {
        let ev_max = ev_ceiling(priced, DEFAULT_EV_STEP);
        Grid::stepped(DEFAULT_EPSILON_MAX, DEFAULT_EPSILON_STEP, ev_max, DEFAULT_EV_STEP).expect("default grid is valid")
    }

    /// `n` by `n` grid over the default ranges.
    pub fn reduced_for(priced: &[PricedGame], n: usize) -> Result<Grid, SearchError> {
        let ev_max = ev_ceiling(priced, DEFAULT_EV_STEP);
        let n_ev = if ev_max > 0.0 { n } else { 1 };
        Grid::by_counts(DEFAULT_EPSILON_MAX, n, ev_max, n_ev)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.epsilon_values.len(), self.ev_values.len())
    }
}

fn check_axis(name: &str, values: &[f64]) -> Result<(), SearchError> {
    if values.is_empty() {
        return Err(SearchError::InvalidGrid(format!("{name} axis is empty")));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(SearchError::InvalidGrid(format!("{name} values must be finite and >= 0")));
    }
    if values[0] != 0.0 {
        return Err(SearchError::InvalidGrid(format!("{name} axis must start at 0")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SearchError::InvalidGrid(format!("{name} values must be strictly ascending")));
    }
    Ok(())
}

fn stepped_axis(max: f64, step: f64) -> Result<Vec<f64>, SearchError> {
    if step.is_nan() || step <= 0.0 || !max.is_finite() || max < 0.0 {
        return Err(SearchError::InvalidGrid(format!("bad axis max {max} / step {step}")));
    }
    let n = (max / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

fn counted_axis(max: f64, n: usize) -> Result<Vec<f64>, SearchError> {
    if n == 0 || !max.is_finite() || max < 0.0 {
        return Err(SearchError::InvalidGrid(format!("bad axis max {max} / count {n}")));
    }
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let step = max / (n - 1) as f64;
    Ok((0..n).map(|i| i as f64 * step).collect())
}

/// Largest expected value of any priced side, if any side is priced.
pub fn max_expected_value(priced: &[PricedGame]) -> Option<f64> {
    priced
        .iter()
        .flat_map(|g| [g.expected_value(Side::Favorite), g.expected_value(Side::Underdog)])
        .flatten()
        .max_by(f64::total_cmp)
}

/// `max_expected_value` rounded up to a multiple of `step`; 0 when no
/// positive expected value exists.
pub fn ev_ceiling(priced: &[PricedGame], step: f64) -> f64 {
    match max_expected_value(priced) {
        Some(m) if m > 0.0 => (m / step - 1e-9).ceil().max(0.0) * step,
        _ => 0.0,
    }
}

/// Parameters and result at the best cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub roi_pct: f64,
    pub epsilon: f64,
    pub ev_threshold: f64,
    /// Fraction of analyzed games that were bet.
    pub frac_bet: f64,
    pub games_bet: usize,
    pub total_return: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResult {
    pub epsilon_values: Vec<f64>,
    pub ev_values: Vec<f64>,
    pub tr_matrix: Vec<Vec<f64>>,
    /// ROI in percent; 0 where no bet was placed.
    pub roi_matrix: Vec<Vec<f64>>,
    pub bets_matrix: Vec<Vec<usize>>,
    /// True for cells without any bet.
    pub empty_mask: Vec<Vec<bool>>,
    pub argmax: (usize, usize),
    pub optimum: Optimum,
    pub games_analyzed: usize,
}

/// A game's betting behavior over the whole grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CompiledGame {
    /// The probability branch fires for epsilon indices below this.
    prob_cut: usize,
    prob_winnings: f64,
    /// Otherwise the EV branch bets for threshold indices below this.
    ev_cut: usize,
    ev_winnings: f64,
}

/// Reduces a priced game to its grid footprint; `None` if it never bets.
pub(crate) fn compile(game: &PricedGame, grid: &Grid) -> Option<CompiledGame> {
    let r = game.rule_inputs()?;
    if r.ev_favorite < 0.0 && r.ev_underdog < 0.0 {
        return None;
    }
    let prob_cut = grid.epsilon_values.partition_point(|&e| r.p_favorite >= 0.5 + e);
    let prob_winnings = if prob_cut > 0 {
        let choice = if r.p_favorite >= r.p_underdog {
            BetChoice::Favorite
        } else {
            BetChoice::Underdog
        };
        game.winnings(choice).expect("bet placed")
    } else {
        0.0
    };
    let (side, mu) = if r.ev_favorite >= r.ev_underdog {
        (BetChoice::Favorite, r.ev_favorite)
    } else {
        (BetChoice::Underdog, r.ev_underdog)
    };
    let ev_cut = grid.ev_values.partition_point(|&t| t < mu);
    let ev_winnings = if ev_cut > 0 {
        game.winnings(side).expect("bet placed")
    } else {
        0.0
    };
    Some(CompiledGame {
        prob_cut,
        prob_winnings,
        ev_cut,
        ev_winnings,
    })
}

/// Fills the grid for a multiset of compiled games (repeats allowed).
pub(crate) fn evaluate<'a, I>(games: I, games_analyzed: usize, grid: &Grid) -> GridResult
where
    I: IntoIterator<Item = &'a CompiledGame>,
{
    let (n_eps, n_ev) = grid.shape();
    let mut prob_sum = ExactSum::new();
    let mut prob_count = 0usize;
    let mut leaving: Vec<Vec<&CompiledGame>> = vec![Vec::new(); n_eps];
    let mut buckets: Vec<(ExactSum, usize)> = vec![(ExactSum::new(), 0); n_ev + 1];
    for g in games {
        if g.prob_cut > 0 {
            prob_sum.add(g.prob_winnings);
            prob_count += 1;
            if g.prob_cut < n_eps {
                leaving[g.prob_cut].push(g);
            }
        } else {
            let b = &mut buckets[g.ev_cut];
            b.0.add(g.ev_winnings);
            b.1 += 1;
        }
    }

    let mut tr_matrix = vec![vec![0.0; n_ev]; n_eps];
    let mut bets_matrix = vec![vec![0usize; n_ev]; n_eps];
    for i in 0..n_eps {
        for g in &leaving[i] {
            prob_sum.add(-g.prob_winnings);
            prob_count -= 1;
            let b = &mut buckets[g.ev_cut];
            b.0.add(g.ev_winnings);
            b.1 += 1;
        }
        let mut acc = ExactSum::new();
        let mut count = 0usize;
        for j in (0..n_ev).rev() {
            let b = &buckets[j + 1];
            acc.merge(&b.0);
            count += b.1;
            let mut cell = acc.clone();
            cell.merge(&prob_sum);
            tr_matrix[i][j] = cell.value();
            bets_matrix[i][j] = count + prob_count;
        }
    }

    let mut argmax = (0, 0);
    for i in 0..n_eps {
        for j in 0..n_ev {
            if tr_matrix[i][j] > tr_matrix[argmax.0][argmax.1] {
                argmax = (i, j);
            }
        }
    }
    let roi_matrix: Vec<Vec<f64>> = tr_matrix
        .iter()
        .zip(&bets_matrix)
        .map(|(tr, n)| {
            tr.iter()
                .zip(n)
                .map(|(&t, &n)| if n > 0 { 100.0 * t / n as f64 } else { 0.0 })
                .collect()
        })
        .collect();
    let empty_mask = bets_matrix.iter().map(|r| r.iter().map(|&n| n == 0).collect()).collect();
    let (ai, aj) = argmax;
    let games_bet = bets_matrix[ai][aj];
    let optimum = Optimum {
        roi_pct: roi_matrix[ai][aj],
        epsilon: grid.epsilon_values[ai],
        ev_threshold: grid.ev_values[aj],
        frac_bet: if games_analyzed > 0 {
            games_bet as f64 / games_analyzed as f64
        } else {
            0.0
        },
        games_bet,
        total_return: tr_matrix[ai][aj],
    };
    GridResult {
        epsilon_values: grid.epsilon_values.clone(),
        ev_values: grid.ev_values.clone(),
        tr_matrix,
        roi_matrix,
        bets_matrix,
        empty_mask,
        argmax,
        optimum,
        games_analyzed,
    }
}

pub(crate) fn compile_all(priced: &[PricedGame], grid: &Grid) -> Vec<Option<CompiledGame>> {
    priced.iter().map(|g| compile(g, grid)).collect()
}

/// Total return over every grid cell for already-priced games; ties at the
/// maximum go to the smallest epsilon, then the smallest threshold.
pub fn grid_search_priced(priced: &[PricedGame], grid: &Grid) -> GridResult {
    let compiled = compile_all(priced, grid);
    evaluate(compiled.iter().flatten(), priced.len(), grid)
}

/// Prices the dataset against `index` and searches the grid.
pub fn grid_search(dataset: &Dataset, grid: &Grid, model: ProbabilityModel, index: &SpreadIndex) -> GridResult {
    let priced = price_games(&dataset.games, index, model);
    grid_search_priced(&priced, grid)
}

pub const GRID_CSV_HEADER: [&str; 6] = ["epsilon", "ev_threshold", "total_return", "roi_pct", "games_bet", "empty"];

/// One row per cell, epsilon-major.
pub fn write_grid_csv<W: Write>(result: &GridResult, writer: W) -> Result<(), SearchError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(GRID_CSV_HEADER)?;
    for (i, eps) in result.epsilon_values.iter().enumerate() {
        for (j, ev) in result.ev_values.iter().enumerate() {
            w.write_record([
                eps.to_string(),
                ev.to_string(),
                result.tr_matrix[i][j].to_string(),
                result.roi_matrix[i][j].to_string(),
                result.bets_matrix[i][j].to_string(),
                result.empty_mask[i][j].to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
