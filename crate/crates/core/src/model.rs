//! Domain types shared across the engine.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("league tag must be non-empty")]
    EmptyLeague,
    #[error("invalid moneyline odds {0}: magnitude must be at least 100")]
    InvalidOdds(i32),
    #[error("epsilon {0} outside [0, 0.5]")]
    EpsilonOutOfRange(f64),
    #[error("ev threshold {0} must be a finite value >= 0")]
    ThresholdOutOfRange(f64),
    #[error("unknown probability model `{0}` (expected simple or weighted)")]
    UnknownModel(String),
    #[error("game {game_id}: {message}")]
    InvalidGame { game_id: String, message: String },
}

/// League identifier, trimmed and upper-cased on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct League(String);

impl League {
    pub const NFL: &'static str = "NFL";
    pub const NBA: &'static str = "NBA";
    pub const NCAAF: &'static str = "NCAAF";
    pub const NCAAB: &'static str = "NCAAB";
    pub const WNBA: &'static str = "WNBA";

    pub fn new(tag: &str) -> Result<Self, ModelError> {
        let tag = tag.trim();
        if tag.is_empty() {
            return Err(ModelError::EmptyLeague);
        }
        Ok(League(tag.to_uppercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True for the five markets with built-in tags.
    pub fn is_known(&self) -> bool {
        [Self::NFL, Self::NBA, Self::NCAAF, Self::NCAAB, Self::WNBA].contains(&self.0.as_str())
    }
}

impl TryFrom<String> for League {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        League::new(&value)
    }
}

impl From<League> for String {
    fn from(value: League) -> Self {
        value.0
    }
}

impl FromStr for League {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        League::new(s)
    }
}

impl fmt::Display for League {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// American odds: `-Y` stakes Y to win 100, `+X` stakes 100 to win X.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct MoneylineOdds(i32);

impl MoneylineOdds {
    pub fn new(american: i32) -> Result<Self, ModelError> {
        if american.unsigned_abs() < 100 {
            return Err(ModelError::InvalidOdds(american));
        }
        Ok(MoneylineOdds(american))
    }

    pub fn american(self) -> i32 {
        self.0
    }
}

impl TryFrom<i32> for MoneylineOdds {
    type Error = ModelError;
    fn try_from(value: i32) -> Result<Self, Self::Error> {
        MoneylineOdds::new(value)
    }
}

impl From<MoneylineOdds> for i32 {
    fn from(value: MoneylineOdds) -> Self {
        value.0
    }
}

impl fmt::Display for MoneylineOdds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 > 0 {
            write!(f, "+{}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// One casino's last line before tip-off.
///
/// `favorite_spread` is the favorite's handicap and is never positive; the
/// underdog's spread is its negation. Either moneyline may be missing when the
/// casino only posted a spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasinoQuote {
    pub casino_id: String,
    pub favorite_spread: f64,
    pub favorite_ml: Option<MoneylineOdds>,
    pub underdog_ml: Option<MoneylineOdds>,
    pub updated_at: DateTime<Utc>,
}

impl CasinoQuote {
    pub fn has_moneyline(&self) -> bool {
        self.favorite_ml.is_some() || self.underdog_ml.is_some()
    }

    pub fn spread_for(&self, side: Side) -> f64 {
        match side {
            Side::Favorite => self.favorite_spread,
            Side::Underdog => -self.favorite_spread,
        }
    }

    pub fn moneyline_for(&self, side: Side) -> Option<MoneylineOdds> {
        match side {
            Side::Favorite => self.favorite_ml,
            Side::Underdog => self.underdog_ml,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub game_id: String,
    pub league: League,
    pub start_time: DateTime<Utc>,
    pub favorite_name: String,
    pub underdog_name: String,
    pub favorite_points: u32,
    pub underdog_points: u32,
    pub quotes: Vec<CasinoQuote>,
}

/// Soft cap on quotes per game; more than this is reported, not rejected.
pub const MAX_EXPECTED_QUOTES: usize = 16;

impl GameRecord {
    /// Checks every hard invariant of a game record.
    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |message: String| ModelError::InvalidGame {
            game_id: self.game_id.clone(),
            message,
        };
        if self.game_id.trim().is_empty() {
            return Err(fail("game_id is empty".into()));
        }
        if self.quotes.is_empty() {
            return Err(fail("no casino quotes".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for q in &self.quotes {
            if !seen.insert(q.casino_id.as_str()) {
                return Err(fail(format!("duplicate quote for casino {}", q.casino_id)));
            }
            if !q.favorite_spread.is_finite() || q.favorite_spread > 0.0 {
                return Err(fail(format!(
                    "casino {}: favorite spread {} must be <= 0",
                    q.casino_id, q.favorite_spread
                )));
            }
            if q.updated_at >= self.start_time {
                return Err(fail(format!(
                    "casino {}: quote updated at {} does not precede start {}",
                    q.casino_id, q.updated_at, self.start_time
                )));
            }
        }
        if self.consensus_spread() > 0.0 {
            return Err(fail("favorite labeling contradicts the consensus spread".into()));
        }
        Ok(())
    }

    /// Median favorite spread across quotes.
    pub fn consensus_spread(&self) -> f64 {
        let mut spreads: Vec<f64> = self.quotes.iter().map(|q| q.favorite_spread).collect();
        if spreads.is_empty() {
            return 0.0;
        }
        spreads.sort_by(f64::total_cmp);
        let mid = spreads.len() / 2;
        if spreads.len() % 2 == 1 {
            spreads[mid]
        } else {
            0.5 * (spreads[mid - 1] + spreads[mid])
        }
    }

    pub fn victor(&self) -> GameVictor {
        victor_of(self)
    }

    pub fn has_moneyline(&self) -> bool {
        self.quotes.iter().any(CasinoQuote::has_moneyline)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Favorite,
    Underdog,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Favorite => Side::Underdog,
            Side::Underdog => Side::Favorite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameVictor {
    Favorite,
    Underdog,
    Tie,
}

impl GameVictor {
    pub fn side(self) -> Option<Side> {
        match self {
            GameVictor::Favorite => Some(Side::Favorite),
            GameVictor::Underdog => Some(Side::Underdog),
            GameVictor::Tie => None,
        }
    }
}

/// Outcome by strict comparison of the final scores.
pub fn victor_of(game: &GameRecord) -> GameVictor {
    use std::cmp::Ordering::*;
    match game.favorite_points.cmp(&game.underdog_points) {
        Greater => GameVictor::Favorite,
        Less => GameVictor::Underdog,
        Equal => GameVictor::Tie,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetChoice {
    Favorite,
    Underdog,
    NoBet,
}

impl BetChoice {
    pub fn side(self) -> Option<Side> {
        match self {
            BetChoice::Favorite => Some(Side::Favorite),
            BetChoice::Underdog => Some(Side::Underdog),
            BetChoice::NoBet => None,
        }
    }

    pub fn is_bet(self) -> bool {
        self != BetChoice::NoBet
    }
}

impl From<Side> for BetChoice {
    fn from(side: Side) -> Self {
        match side {
            Side::Favorite => BetChoice::Favorite,
            Side::Underdog => BetChoice::Underdog,
        }
    }
}

/// The betting rule's output together with the inputs that produced it.
///
/// Probabilities and expected values are `None` for a side that could not be
/// priced (no spread history, or no moneyline quoted for that side).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetDecision {
    pub choice: BetChoice,
    pub ev_favorite: Option<f64>,
    pub ev_underdog: Option<f64>,
    pub p_favorite: Option<f64>,
    pub p_underdog: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityModel {
    Simple,
    Weighted,
}

impl ProbabilityModel {
    pub fn name(self) -> &'static str {
        match self {
            ProbabilityModel::Simple => "simple",
            ProbabilityModel::Weighted => "weighted",
        }
    }
}

impl FromStr for ProbabilityModel {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "simple" => Ok(ProbabilityModel::Simple),
            "weighted" => Ok(ProbabilityModel::Weighted),
            other => Err(ModelError::UnknownModel(other.to_string())),
        }
    }
}

impl fmt::Display for ProbabilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Strategy hyper-parameters: the epsilon band and the EV threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    pub epsilon: f64,
    pub ev_threshold: f64,
    pub model: ProbabilityModel,
}

impl StrategyParams {
    pub fn new(epsilon: f64, ev_threshold: f64, model: ProbabilityModel) -> Result<Self, ModelError> {
        if !(0.0..=0.5).contains(&epsilon) {
            return Err(ModelError::EpsilonOutOfRange(epsilon));
        }
        if !ev_threshold.is_finite() || ev_threshold < 0.0 {
            return Err(ModelError::ThresholdOutOfRange(ev_threshold));
        }
        Ok(StrategyParams {
            epsilon,
            ev_threshold,
            model,
        })
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn victor_by_strict_comparison() {
        let q = vec![quote("a", -3.0, -150, 130, 0)];
        assert_eq!(victor_of(&game("g", 0, 24, 17, q.clone())), GameVictor::Favorite);
        assert_eq!(victor_of(&game("g", 0, 17, 24, q.clone())), GameVictor::Underdog);
        assert_eq!(victor_of(&game("g", 0, 20, 20, q)), GameVictor::Tie);
    }

    #[test]
    fn victor_antisymmetric_under_swap() {
        let q = vec![quote("a", -3.0, -150, 130, 0)];
        for pf in 0..15 {
            for pu in 0..15 {
                let a = victor_of(&game("g", 0, pf, pu, q.clone()));
                let b = victor_of(&game("g", 0, pu, pf, q.clone()));
                let mirrored = match a {
                    GameVictor::Favorite => GameVictor::Underdog,
                    GameVictor::Underdog => GameVictor::Favorite,
                    GameVictor::Tie => GameVictor::Tie,
                };
                assert_eq!(b, mirrored);
            }
        }
    }

    #[test]
    fn league_is_normalized() {
        assert_eq!(League::new(" nfl ").unwrap().as_str(), "NFL");
        assert!(League::new("  ").is_err());
        assert!(League::new("ncaab").unwrap().is_known());
        assert!(!League::new("mls").unwrap().is_known());
    }

    #[test]
    fn odds_reject_inner_band() {
        assert!(MoneylineOdds::new(0).is_err());
        assert!(MoneylineOdds::new(99).is_err());
        assert!(MoneylineOdds::new(-99).is_err());
        assert!(MoneylineOdds::new(100).is_ok());
        assert!(MoneylineOdds::new(-100).is_ok());
        assert_eq!(MoneylineOdds::new(300).unwrap().to_string(), "+300");
    }

    #[test]
    fn params_bounds() {
        assert!(StrategyParams::new(0.0, 0.0, ProbabilityModel::Simple).is_ok());
        assert!(StrategyParams::new(0.5, 1.0, ProbabilityModel::Weighted).is_ok());
        assert!(StrategyParams::new(0.9, 0.0, ProbabilityModel::Simple).is_err());
        assert!(StrategyParams::new(-0.1, 0.0, ProbabilityModel::Simple).is_err());
        assert!(StrategyParams::new(0.1, -0.01, ProbabilityModel::Simple).is_err());
    }

    #[test]
    fn validate_catches_invariants() {
        let ok = game("g", 1, 10, 7, vec![quote("a", -3.0, -150, 130, 1)]);
        assert!(ok.validate().is_ok());

        let mut positive = ok.clone();
        positive.quotes[0].favorite_spread = 3.0;
        assert!(positive.validate().is_err());

        let mut late = ok.clone();
        late.quotes[0].updated_at = late.start_time;
        assert!(late.validate().is_err());

        let mut dup = ok.clone();
        dup.quotes.push(dup.quotes[0].clone());
        assert!(dup.validate().is_err());

        let mut empty = ok;
        empty.quotes.clear();
        assert!(empty.validate().is_err());
    }
}
