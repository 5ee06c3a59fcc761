//! Chronological backtests of the betting rule.
//!
//! Every game is priced against the spread index as of its own start time,
//! then the rule is applied and each $1 bet is settled against the final
//! score. Pricing is separated from settlement ([`PricedGame`]) so grid
//! search and the bootstrap can re-run the rule many times without touching
//! the index again.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::{DateTime, Datelike, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Dataset;
use crate::model::{BetChoice, BetDecision, GameRecord, GameVictor, League, ProbabilityModel, Side, StrategyParams};
use crate::sum::ExactSum;
use crate::valuation::{best_payout, decide, expected_value, DecisionEncoding, Payout};
use crate::winprob::{SpreadIndex, SpreadSnapshot};

#[derive(Debug, Error)]
pub enum BacktestError {
    #[error("dataset contains no games")]
    EmptyDataset,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A game with its model probabilities and best payouts, ready to be run
/// through the betting rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricedGame {
    pub game_id: String,
    pub start_time: DateTime<Utc>,
    pub year: i32,
    pub victor: GameVictor,
    pub p_favorite: Option<f64>,
    pub p_underdog: Option<f64>,
    pub payout_favorite: Option<Payout>,
    pub payout_underdog: Option<Payout>,
}

impl PricedGame {
    pub fn price(game: &GameRecord, index: &SpreadIndex, model: ProbabilityModel) -> PricedGame {
        let prob = |side| model.estimate(&SpreadSnapshot::for_side(index, game, side));
        PricedGame {
            game_id: game.game_id.clone(),
            start_time: game.start_time,
            year: game.start_time.year(),
            victor: game.victor(),
            p_favorite: prob(Side::Favorite),
            p_underdog: prob(Side::Underdog),
            payout_favorite: best_payout(game, Side::Favorite).ok(),
            payout_underdog: best_payout(game, Side::Underdog).ok(),
        }
    }

    pub fn probability(&self, side: Side) -> Option<f64> {
        match side {
            Side::Favorite => self.p_favorite,
            Side::Underdog => self.p_underdog,
        }
    }

    pub fn payout(&self, side: Side) -> Option<Payout> {
        match side {
            Side::Favorite => self.payout_favorite,
            Side::Underdog => self.payout_underdog,
        }
    }

    /// Expected value of a $1 bet on `side`; needs both a probability and a
    /// quoted payout.
    pub fn expected_value(&self, side: Side) -> Option<f64> {
        Some(expected_value(self.probability(side)?, self.payout(side)?))
    }

    /// True when at least one side can be bet.
    pub fn is_priced(&self) -> bool {
        self.expected_value(Side::Favorite).is_some() || self.expected_value(Side::Underdog).is_some()
    }

    /// Inputs handed to the betting rule. A side that cannot be priced
    /// enters with probability 0, whose expected value is a certain loss of
    /// the stake, so the rule never selects it.
    pub fn rule_inputs(&self) -> Option<RuleInputs> {
        if !self.is_priced() {
            return None;
        }
        let side = |s| match self.expected_value(s) {
            Some(ev) => (self.probability(s).unwrap_or(0.0), ev),
            None => (0.0, -1.0),
        };
        let (p_favorite, ev_favorite) = side(Side::Favorite);
        let (p_underdog, ev_underdog) = side(Side::Underdog);
        Some(RuleInputs {
            ev_favorite,
            ev_underdog,
            p_favorite,
            p_underdog,
        })
    }

    pub fn decide(&self, epsilon: f64, ev_threshold: f64) -> BetDecision {
        let choice = match self.rule_inputs() {
            Some(r) => decide(r.ev_favorite, r.ev_underdog, r.p_favorite, r.p_underdog, epsilon, ev_threshold),
            None => BetChoice::NoBet,
        };
        BetDecision {
            choice,
            ev_favorite: self.expected_value(Side::Favorite),
            ev_underdog: self.expected_value(Side::Underdog),
            p_favorite: self.p_favorite,
            p_underdog: self.p_underdog,
        }
    }

    /// Settles a $1 bet: the payout if the pick won, -1 if it lost, 0 when
    /// the game ended level. `None` for no bet.
    pub fn winnings(&self, choice: BetChoice) -> Option<f64> {
        let side = choice.side()?;
        Some(match self.victor.side() {
            None => 0.0,
            Some(winner) if winner == side => self
                .payout(side)
                .expect("bets are only placed on priced sides")
                .per_dollar(),
            Some(_) => -1.0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleInputs {
    pub ev_favorite: f64,
    pub ev_underdog: f64,
    pub p_favorite: f64,
    pub p_underdog: f64,
}

pub fn price_games(games: &[GameRecord], index: &SpreadIndex, model: ProbabilityModel) -> Vec<PricedGame> {
    games.iter().map(|g| PricedGame::price(g, index, model)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetLedgerEntry {
    pub game_id: String,
    pub year: i32,
    pub decision: BetDecision,
    pub winnings: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearSummary {
    pub year: i32,
    pub roi_pct: f64,
    pub games_bet: usize,
    pub total_return: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub league: String,
    pub games_analyzed: usize,
    pub games_priced: usize,
    pub games_bet: usize,
    pub total_return: f64,
    /// `None` when no bet was placed.
    pub roi_pct: Option<f64>,
    pub per_year: Vec<YearSummary>,
    pub params: StrategyParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestRun {
    pub report: BacktestReport,
    pub ledger: Vec<BetLedgerEntry>,
}

pub fn roi_pct(total_return: f64, games_bet: usize) -> Option<f64> {
    (games_bet > 0).then(|| 100.0 * total_return / games_bet as f64)
}

/// Runs the strategy over a dataset. `index` may be built from the dataset
/// itself or a superset; queries are always as of each game's start.
pub fn run_backtest(dataset: &Dataset, params: StrategyParams, index: &SpreadIndex) -> Result<BacktestRun, BacktestError> {
    if dataset.games.is_empty() {
        return Err(BacktestError::EmptyDataset);
    }
    let priced = price_games(&dataset.games, index, params.model);
    Ok(backtest_priced(&dataset.league, &priced, params))
}

/// Applies the rule to already-priced games in the given order.
pub fn backtest_priced(league: &League, priced: &[PricedGame], params: StrategyParams) -> BacktestRun {
    let mut ledger = Vec::new();
    let mut total = ExactSum::new();
    for g in priced {
        let decision = g.decide(params.epsilon, params.ev_threshold);
        if let Some(w) = g.winnings(decision.choice) {
            total.add(w);
            ledger.push(BetLedgerEntry {
                game_id: g.game_id.clone(),
                year: g.year,
                decision,
                winnings: w,
            });
        }
    }
    let total_return = total.value();
    let report = BacktestReport {
        league: league.to_string(),
        games_analyzed: priced.len(),
        games_priced: priced.iter().filter(|g| g.is_priced()).count(),
        games_bet: ledger.len(),
        total_return,
        roi_pct: roi_pct(total_return, ledger.len()),
        per_year: yearly_breakdown(&ledger),
        params,
    };
    BacktestRun { report, ledger }
}

/// ROI and bet count per calendar year, ascending.
pub fn yearly_breakdown(ledger: &[BetLedgerEntry]) -> Vec<YearSummary> {
    let mut years: BTreeMap<i32, (ExactSum, usize)> = BTreeMap::new();
    for e in ledger {
        let slot = years.entry(e.year).or_default();
        slot.0.add(e.winnings);
        slot.1 += 1;
    }
    years
        .into_iter()
        .map(|(year, (tr, n))| {
            let total_return = tr.value();
            YearSummary {
                year,
                roi_pct: 100.0 * total_return / n as f64,
                games_bet: n,
                total_return,
            }
        })
        .collect()
}

/// Pooled ROI over groups given as `(roi_pct, games_bet)`: total return
/// summed across groups divided by total bets.
pub fn combine_roi(groups: &[(f64, usize)]) -> Option<f64> {
    let n: usize = groups.iter().map(|g| g.1).sum();
    let tr: ExactSum = groups.iter().map(|&(roi, k)| roi * k as f64 / 100.0).collect();
    roi_pct(tr.value(), n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeagueYearCell {
    pub roi_pct: f64,
    pub games_bet: usize,
}

/// One year of the per-league breakdown with the pooled column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearlyRow {
    pub year: i32,
    /// `None` where the league had no bets that year.
    pub leagues: BTreeMap<String, Option<LeagueYearCell>>,
    pub all_leagues_roi_pct: f64,
    pub sample_size: usize,
    /// User-supplied benchmark return for the year, if any.
    pub benchmark_pct: Option<f64>,
}

pub fn yearly_table(per_league: &[(String, Vec<YearSummary>)], benchmark: &BTreeMap<i32, f64>) -> Vec<YearlyRow> {
    let mut years: BTreeMap<i32, YearlyRow> = BTreeMap::new();
    let mut totals: BTreeMap<i32, ExactSum> = BTreeMap::new();
    for (league, rows) in per_league {
        for r in rows {
            let row = years.entry(r.year).or_insert_with(|| YearlyRow {
                year: r.year,
                leagues: per_league.iter().map(|(l, _)| (l.clone(), None)).collect(),
                all_leagues_roi_pct: 0.0,
                sample_size: 0,
                benchmark_pct: benchmark.get(&r.year).copied(),
            });
            row.leagues.insert(
                league.clone(),
                Some(LeagueYearCell {
                    roi_pct: r.roi_pct,
                    games_bet: r.games_bet,
                }),
            );
            row.sample_size += r.games_bet;
            totals.entry(r.year).or_default().add(r.total_return);
        }
    }
    for (year, row) in years.iter_mut() {
        row.all_leagues_roi_pct = roi_pct(totals[year].value(), row.sample_size).unwrap_or(0.0);
    }
    years.into_values().collect()
}

pub const LEDGER_HEADER: [&str; 8] = ["game_id", "year", "choice", "p_fav", "p_und", "ev_fav", "ev_und", "winnings"];

pub fn write_ledger_csv<W: Write>(ledger: &[BetLedgerEntry], writer: W, encoding: DecisionEncoding) -> Result<(), BacktestError> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| BacktestError::Io(std::io::Error::other(e.to_string()));
    w.write_record(LEDGER_HEADER).map_err(io)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for e in ledger {
        w.write_record([
            e.game_id.clone(),
            e.year.to_string(),
            encoding.format(e.decision.choice),
            opt(e.decision.p_favorite),
            opt(e.decision.p_underdog),
            opt(e.decision.ev_favorite),
            opt(e.decision.ev_underdog),
            e.winnings.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
