//! Synthetic markets with a known, planted inefficiency.
//!
//! Every game draws a half-point spread from a table that also fixes the
//! favorite's true win probability, so the data has no pushes and the
//! generating distribution is known exactly. Sharp casinos price both sides
//! at fair odds less a vigorish; on a declared fraction of games a soft
//! casino offers one random side at odds whose true expected value is
//! `+margin` per dollar. American odds are rounded in the house's favor.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::ingest::Dataset;
use crate::model::{CasinoQuote, GameRecord, League, MoneylineOdds};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadLevel {
    /// Favorite's handicap; negative and on a half point.
    pub spread: f64,
    /// True probability that the favorite wins outright.
    pub p_favorite: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub league: String,
    pub games: usize,
    pub start: DateTime<Utc>,
    pub hours_between_games: i64,
    pub spreads: Vec<SpreadLevel>,
    pub sharp_casinos: usize,
    /// Fraction of the fair decimal price withheld by sharp casinos.
    pub vig: f64,
    /// Fraction of games on which the soft casino posts a mispriced line.
    pub soft_fraction: f64,
    /// True expected profit per $1 of the soft line.
    pub soft_margin: f64,
}

impl SynthSpec {
    /// A spread table shaped like a typical football market.
    pub fn default_spreads() -> Vec<SpreadLevel> {
        [(-0.5, 0.5), (-1.5, 0.53), (-2.5, 0.56), (-3.5, 0.6), (-6.5, 0.7), (-9.5, 0.8)]
            .into_iter()
            .map(|(spread, p_favorite)| SpreadLevel { spread, p_favorite })
            .collect()
    }

    pub fn new(games: usize) -> SynthSpec {
        SynthSpec {
            league: "NFL".into(),
            games,
            start: Utc.with_ymd_and_hms(2012, 9, 1, 0, 0, 0).unwrap(),
            hours_between_games: 6,
            spreads: SynthSpec::default_spreads(),
            sharp_casinos: 2,
            vig: 0.045,
            soft_fraction: 0.2,
            soft_margin: 0.1,
        }
    }

    /// Coin-flip games only, with the soft casino paying decimal 2.2 (true
    /// EV +0.1) on 20% of them.
    pub fn planted_edge(games: usize) -> SynthSpec {
        SynthSpec {
            spreads: [-0.5, -1.5, -2.5]
                .into_iter()
                .map(|spread| SpreadLevel { spread, p_favorite: 0.5 })
                .collect(),
            ..SynthSpec::new(games)
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidSpec(m));
        if League::new(&self.league).is_err() {
            return bad(format!("league `{}`", self.league));
        }
        if self.games == 0 {
            return bad("games must be >= 1".into());
        }
        if self.hours_between_games <= 0 {
            return bad("hours_between_games must be positive".into());
        }
        if self.sharp_casinos == 0 {
            return bad("at least one sharp casino is required".into());
        }
        if !(0.0..1.0).contains(&self.vig) {
            return bad(format!("vig {} outside [0, 1)", self.vig));
        }
        if !(0.0..=1.0).contains(&self.soft_fraction) {
            return bad(format!("soft_fraction {} outside [0, 1]", self.soft_fraction));
        }
        if !(self.soft_margin >= 0.0 && self.soft_margin.is_finite()) {
            return bad(format!("soft_margin {} must be >= 0", self.soft_margin));
        }
        if self.spreads.is_empty() {
            return bad("spread table is empty".into());
        }
        for s in &self.spreads {
            if !(s.spread < 0.0 && (s.spread * 2.0).rem_euclid(2.0) == 1.0) {
                return bad(format!("spread {} is not a negative half point", s.spread));
            }
            if !(s.p_favorite >= 0.5 && s.p_favorite < 1.0 - self.vig) {
                return bad(format!(
                    "favorite probability {} must be in [0.5, {})",
                    s.p_favorite,
                    1.0 - self.vig
                ));
            }
        }
        Ok(())
    }
}

/// American odds for a profit-per-dollar payout, rounded so the bettor is
/// never paid more than `profit`.
pub fn american_for_house(profit: f64) -> i32 {
    if profit >= 1.0 {
        (100.0 * profit + 1e-9).floor() as i32
    } else {
        -((100.0 / profit - 1e-9).ceil() as i32)
    }
}

fn odds(profit: f64) -> MoneylineOdds {
    MoneylineOdds::new(american_for_house(profit)).expect("house odds are at least 100 in magnitude")
}

/// Generates a dataset from `spec`; identical seeds give identical data.
pub fn synth_market(spec: &SynthSpec, seed: u64) -> Result<Dataset, SearchError> {
    spec.validate()?;
    let league = League::new(&spec.league).expect("validated");
    let mut rng = stream_rng(seed, 0);
    let mut games = Vec::with_capacity(spec.games);
    for i in 0..spec.games {
        let level = spec.spreads[rng.gen_range(0..spec.spreads.len())];
        let p_fav = level.p_favorite;
        let favorite_wins = rng.gen::<f64>() < p_fav;
        let loser = rng.gen_range(0..=35u32);
        let winner = loser + rng.gen_range(1..=24u32);
        let (favorite_points, underdog_points) = if favorite_wins { (winner, loser) } else { (loser, winner) };
        let home = rng.gen_range(0..32u32);
        let away = (home + rng.gen_range(1..32u32)) % 32;

        let start_time = spec.start + Duration::hours(spec.hours_between_games * i as i64);
        let updated_at = start_time - Duration::hours(1);
        let sharp = |p: f64| (1.0 - spec.vig) / p - 1.0;
        let mut quotes: Vec<CasinoQuote> = (0..spec.sharp_casinos)
            .map(|c| CasinoQuote {
                casino_id: format!("sharp{c}"),
                favorite_spread: level.spread,
                favorite_ml: Some(odds(sharp(p_fav))),
                underdog_ml: Some(odds(sharp(1.0 - p_fav))),
                updated_at,
            })
            .collect();
        if rng.gen::<f64>() < spec.soft_fraction {
            let soft = |p: f64| (1.0 + spec.soft_margin) / p - 1.0;
            let (favorite_ml, underdog_ml) = if rng.gen::<bool>() {
                (odds(soft(p_fav)), odds(sharp(1.0 - p_fav)))
            } else {
                (odds(sharp(p_fav)), odds(soft(1.0 - p_fav)))
            };
            quotes.push(CasinoQuote {
                casino_id: "soft".into(),
                favorite_spread: level.spread,
                favorite_ml: Some(favorite_ml),
                underdog_ml: Some(underdog_ml),
                updated_at,
            });
        }
        games.push(GameRecord {
            game_id: format!("{}-{:06}", league, i),
            league: league.clone(),
            start_time,
            favorite_name: format!("T{home:02}"),
            underdog_name: format!("T{away:02}"),
            favorite_points,
            underdog_points,
            quotes,
        });
    }
    Dataset::new(league, games).map_err(|e| SearchError::InvalidSpec(e.to_string()))
}
