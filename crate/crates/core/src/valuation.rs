//! Payouts, expected value and the betting rule.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BetChoice, GameRecord, MoneylineOdds, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValuationError {
    #[error("invalid moneyline odds {0}: magnitude must be at least 100")]
    InvalidOdds(i32),
    #[error("game {game_id}: no casino quoted a moneyline for the {side:?}")]
    NoQuote { game_id: String, side: Side },
    #[error("unknown decision encoding `{0}`")]
    UnknownEncoding(String),
    #[error("decision code {code} is not valid under the {encoding:?} encoding")]
    InvalidCode { code: i8, encoding: DecisionEncoding },
}

/// Profit per $1 staked on a winning bet.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Payout(f64);

impl Payout {
    /// A payout given directly as profit per dollar; must be finite and
    /// positive.
    pub fn new(per_dollar: f64) -> Option<Payout> {
        (per_dollar.is_finite() && per_dollar > 0.0).then_some(Payout(per_dollar))
    }

    pub fn per_dollar(self) -> f64 {
        self.0
    }

    pub fn from_american(american: i32) -> Result<Payout, ValuationError> {
        MoneylineOdds::new(american)
            .map(payout_from_odds)
            .map_err(|_| ValuationError::InvalidOdds(american))
    }

    /// Probability at which a bet at this payout has zero expected value.
    pub fn break_even(self) -> f64 {
        1.0 / (1.0 + self.0)
    }
}

/// `+X` pays `X/100` per dollar, `-Y` pays `100/Y`.
pub fn payout_from_odds(odds: MoneylineOdds) -> Payout {
    let a = odds.american();
    if a > 0 {
        Payout(f64::from(a) / 100.0)
    } else {
        Payout(100.0 / f64::from(-a))
    }
}

/// Best payout any casino offers on `side`.
pub fn best_payout(game: &GameRecord, side: Side) -> Result<Payout, ValuationError> {
    game.quotes
        .iter()
        .filter_map(|q| q.moneyline_for(side))
        .map(payout_from_odds)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| ValuationError::NoQuote {
            game_id: game.game_id.clone(),
            side,
        })
}

/// Expected profit of a $1 bet: `p * payout - (1 - p)`.
pub fn expected_value(p_win: f64, payout: Payout) -> f64 {
    p_win * payout.0 - (1.0 - p_win)
}

/// The betting rule.
///
/// Takes the expected value and win probability of each side plus the
/// epsilon band and EV threshold:
///
/// 1. if both expected values are negative, no bet;
/// 2. if the favorite's probability is at least `0.5 + epsilon`, back the
///    side with the higher probability (the favorite on ties);
/// 3. otherwise take the side with the higher expected value (the favorite
///    on ties), but only if that value strictly exceeds `ev_threshold`.
pub fn decide(
    ev_favorite: f64,
    ev_underdog: f64,
    p_favorite: f64,
    p_underdog: f64,
    epsilon: f64,
    ev_threshold: f64,
) -> BetChoice {
    if ev_favorite < 0.0 && ev_underdog < 0.0 {
        return BetChoice::NoBet;
    }
    if p_favorite >= 0.5 + epsilon {
        return if p_favorite >= p_underdog {
            BetChoice::Favorite
        } else {
            BetChoice::Underdog
        };
    }
    if ev_favorite >= ev_underdog {
        if ev_favorite > ev_threshold {
            BetChoice::Favorite
        } else {
            BetChoice::NoBet
        }
    } else if ev_underdog > ev_threshold {
        BetChoice::Underdog
    } else {
        BetChoice::NoBet
    }
}

/// Integer codes for decisions at serialization boundaries.
///
/// `Ternary` is `-1` no bet, `0` underdog, `+1` favorite. `Signed` is `0` no
/// bet, `-1` underdog, `+1` favorite. `Label` writes the enum name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionEncoding {
    #[default]
    Label,
    Ternary,
    Signed,
}

impl DecisionEncoding {
    pub fn code(self, choice: BetChoice) -> Option<i8> {
        match (self, choice) {
            (DecisionEncoding::Label, _) => None,
            (DecisionEncoding::Ternary, BetChoice::NoBet) => Some(-1),
            (DecisionEncoding::Ternary, BetChoice::Underdog) => Some(0),
            (DecisionEncoding::Ternary, BetChoice::Favorite) => Some(1),
            (DecisionEncoding::Signed, BetChoice::NoBet) => Some(0),
            (DecisionEncoding::Signed, BetChoice::Underdog) => Some(-1),
            (DecisionEncoding::Signed, BetChoice::Favorite) => Some(1),
        }
    }

    pub fn from_code(self, code: i8) -> Result<BetChoice, ValuationError> {
        let choice = match (self, code) {
            (DecisionEncoding::Ternary, -1) | (DecisionEncoding::Signed, 0) => BetChoice::NoBet,
            (DecisionEncoding::Ternary, 0) | (DecisionEncoding::Signed, -1) => BetChoice::Underdog,
            (DecisionEncoding::Ternary | DecisionEncoding::Signed, 1) => BetChoice::Favorite,
            _ => return Err(ValuationError::InvalidCode { code, encoding: self }),
        };
        Ok(choice)
    }

    pub fn format(self, choice: BetChoice) -> String {
        match self.code(choice) {
            Some(c) => c.to_string(),
            None => match choice {
                BetChoice::Favorite => "favorite".into(),
                BetChoice::Underdog => "underdog".into(),
                BetChoice::NoBet => "none".into(),
            },
        }
    }

    pub fn parse(self, s: &str) -> Result<BetChoice, ValuationError> {
        match self {
            DecisionEncoding::Label => match s {
                "favorite" => Ok(BetChoice::Favorite),
                "underdog" => Ok(BetChoice::Underdog),
                "none" => Ok(BetChoice::NoBet),
                other => Err(ValuationError::UnknownEncoding(other.to_string())),
            },
            _ => {
                let code: i8 = s
                    .parse()
                    .map_err(|_| ValuationError::UnknownEncoding(s.to_string()))?;
                self.from_code(code)
            }
        }
    }
}

impl FromStr for DecisionEncoding {
    type Err = ValuationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "label" => Ok(DecisionEncoding::Label),
            "ternary" => Ok(DecisionEncoding::Ternary),
            "signed" => Ok(DecisionEncoding::Signed),
            other => Err(ValuationError::UnknownEncoding(other.to_string())),
        }
    }
}
