//! Historical win rates keyed by point spread, and the probability models
//! built on them.
//!
//! A team quoted at spread `s` is assumed to win as often as past teams
//! quoted at `s` did. The index only ever answers "as of" a timestamp: a
//! query at time `t` sees games that started strictly before `t`, which keeps
//! backtests free of look-ahead.

use std::collections::{BTreeMap, HashMap};

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::ingest::format_time;
use crate::model::{GameRecord, GameVictor, ProbabilityModel, Side};

/// A spread quantized to half points (the key is twice the spread).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpreadKey(i32);

impl SpreadKey {
    pub fn from_spread(spread: f64) -> SpreadKey {
        SpreadKey((spread * 2.0).round() as i32)
    }

    pub fn spread(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn mirrored(self) -> SpreadKey {
        SpreadKey(-self.0)
    }
}

#[derive(Debug, Clone, Default)]
struct KeyHistory {
    times: Vec<DateTime<Utc>>,
    /// Wins among the first `i + 1` entries.
    cum_wins: Vec<u32>,
}

impl KeyHistory {
    fn counts_before(&self, as_of: DateTime<Utc>) -> (u32, u32) {
        let n = self.times.partition_point(|t| *t < as_of);
        if n == 0 {
            (0, 0)
        } else {
            (self.cum_wins[n - 1], n as u32)
        }
    }
}

/// Chronological win/loss records per spread key.
#[derive(Debug, Clone, Default)]
pub struct SpreadIndex {
    keys: HashMap<SpreadKey, KeyHistory>,
    entries: usize,
}

impl SpreadIndex {
    /// Builds the index from games of one league (or several, when pooling).
    ///
    /// Each game contributes one entry per distinct quoted spread and
    /// perspective: the favorite at `s` and the underdog at `-s`. Games that
    /// ended level contribute nothing.
    pub fn build<'a, I>(games: I) -> SpreadIndex
    where
        I: IntoIterator<Item = &'a GameRecord>,
    {
        let mut raw: HashMap<SpreadKey, Vec<(DateTime<Utc>, bool)>> = HashMap::new();
        let mut entries = 0;
        for game in games {
            let favorite_won = match game.victor() {
                GameVictor::Favorite => true,
                GameVictor::Underdog => false,
                GameVictor::Tie => continue,
            };
            let mut keys: Vec<SpreadKey> = game
                .quotes
                .iter()
                .map(|q| SpreadKey::from_spread(q.favorite_spread))
                .collect();
            keys.sort();
            keys.dedup();
            for key in keys {
                raw.entry(key).or_default().push((game.start_time, favorite_won));
                raw.entry(key.mirrored()).or_default().push((game.start_time, !favorite_won));
                entries += 2;
            }
        }
        let keys = raw
            .into_iter()
            .map(|(key, mut list)| {
                list.sort_by_key(|(t, _)| *t);
                let mut wins = 0u32;
                let mut hist = KeyHistory::default();
                for (t, won) in list {
                    wins += u32::from(won);
                    hist.times.push(t);
                    hist.cum_wins.push(wins);
                }
                (key, hist)
            })
            .collect();
        SpreadIndex { keys, entries }
    }

    pub fn len(&self) -> usize {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries == 0
    }

    /// `(wins, total)` at `spread` among games that started before `as_of`.
    pub fn counts(&self, spread: f64, as_of: DateTime<Utc>) -> (u32, u32) {
        self.counts_key(SpreadKey::from_spread(spread), as_of)
    }

    pub fn counts_key(&self, key: SpreadKey, as_of: DateTime<Utc>) -> (u32, u32) {
        self.keys
            .get(&key)
            .map(|h| h.counts_before(as_of))
            .unwrap_or((0, 0))
    }

    /// Historical win rate, or `None` without prior games at that spread.
    pub fn win_rate(&self, spread: f64, as_of: DateTime<Utc>) -> Option<f64> {
        self.win_rate_key(SpreadKey::from_spread(spread), as_of)
    }

    pub fn win_rate_key(&self, key: SpreadKey, as_of: DateTime<Utc>) -> Option<f64> {
        let (wins, total) = self.counts_key(key, as_of);
        (total > 0).then(|| f64::from(wins) / f64::from(total))
    }

    /// Audit dump: per spread, the cumulative `(wins, total)` after each
    /// recorded game time. Sorted by spread.
    pub fn dump(&self) -> IndexDump {
        let mut keys: Vec<&SpreadKey> = self.keys.keys().collect();
        keys.sort();
        IndexDump {
            spreads: keys
                .into_iter()
                .map(|k| {
                    let h = &self.keys[k];
                    SpreadHistoryDump {
                        spread: k.spread(),
                        history: h
                            .times
                            .iter()
                            .zip(&h.cum_wins)
                            .enumerate()
                            .map(|(i, (t, w))| HistoryPoint {
                                time: format_time(t),
                                wins: *w,
                                total: i as u32 + 1,
                            })
                            .collect(),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexDump {
    pub spreads: Vec<SpreadHistoryDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpreadHistoryDump {
    pub spread: f64,
    pub history: Vec<HistoryPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistoryPoint {
    pub time: String,
    pub wins: u32,
    pub total: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadStat {
    /// Historical win rate at this spread, if any history exists.
    pub prob: Option<f64>,
    /// Number of casinos quoting this spread for the game.
    pub freq: u32,
}

/// The spreads quoted for one side of one game, each with its historical win
/// rate and how many casinos quoted it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpreadSnapshot {
    pub spreads: BTreeMap<SpreadKey, SpreadStat>,
}

impl SpreadSnapshot {
    pub fn for_side(index: &SpreadIndex, game: &GameRecord, side: Side) -> SpreadSnapshot {
        let mut spreads: BTreeMap<SpreadKey, SpreadStat> = BTreeMap::new();
        for q in &game.quotes {
            let key = SpreadKey::from_spread(q.spread_for(side));
            spreads
                .entry(key)
                .or_insert_with(|| SpreadStat {
                    prob: index.win_rate_key(key, game.start_time),
                    freq: 0,
                })
                .freq += 1;
        }
        SpreadSnapshot { spreads }
    }

    /// Builds a snapshot from `(spread, win rate, frequency)` triples.
    pub fn from_parts(parts: &[(f64, Option<f64>, u32)]) -> SpreadSnapshot {
        SpreadSnapshot {
            spreads: parts
                .iter()
                .map(|&(s, prob, freq)| (SpreadKey::from_spread(s), SpreadStat { prob, freq }))
                .collect(),
        }
    }

    fn defined(&self) -> impl Iterator<Item = (f64, u32)> + '_ {
        self.spreads
            .values()
            .filter_map(|s| s.prob.map(|p| (p, s.freq)))
    }
}

/// Unweighted mean of the win rates of the distinct quoted spreads that have
/// history.
pub fn simple_probability(snapshot: &SpreadSnapshot) -> Option<f64> {
    let (sum, n) = snapshot
        .defined()
        .fold((0.0, 0u32), |(sum, n), (p, _)| (sum + p, n + 1));
    (n > 0).then(|| sum / f64::from(n))
}

/// Mean of the win rates weighted by how many casinos quoted each spread.
pub fn weighted_probability(snapshot: &SpreadSnapshot) -> Option<f64> {
    let (num, den) = snapshot
        .defined()
        .fold((0.0, 0u32), |(num, den), (p, f)| (num + p * f64::from(f), den + f));
    (den > 0).then(|| num / f64::from(den))
}

impl ProbabilityModel {
    pub fn estimate(self, snapshot: &SpreadSnapshot) -> Option<f64> {
        match self {
            ProbabilityModel::Simple => simple_probability(snapshot),
            ProbabilityModel::Weighted => weighted_probability(snapshot),
        }
    }
}
