//! Loading, validating and saving historical game datasets.
//!
//! The canonical CSV layout has one row per (game, casino) pair:
//!
//! ```text
//! game_id,league,start_time,favorite,underdog,fav_points,und_points,casino_id,fav_spread,fav_ml,und_ml,updated_at
//! ```
//!
//! Timestamps are ISO-8601 UTC, `fav_spread` is the favorite's (non-positive)
//! handicap and the moneylines are signed American odds; either moneyline may
//! be left empty. The JSON layout is an array of game objects with the same
//! field names and the per-casino fields nested under `quotes`.
//!
//! A casino may appear several times for a game; only its last update before
//! tip-off is kept.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::model::{CasinoQuote, GameRecord, League, MoneylineOdds, MAX_EXPECTED_QUOTES};

pub const CSV_HEADER: [&str; 12] = [
    "game_id",
    "league",
    "start_time",
    "favorite",
    "underdog",
    "fav_points",
    "und_points",
    "casino_id",
    "fav_spread",
    "fav_ml",
    "und_ml",
    "updated_at",
];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("validation error in game {game_id}: {message}")]
    Validation { game_id: String, message: String },
    #[error("dataset contains no games")]
    EmptyDataset,
    #[error("dataset mixes leagues ({0}); select one league")]
    MixedLeagues(String),
    #[error("unknown dataset format `{0}` (expected csv or json)")]
    UnknownFormat(String),
}

impl IngestError {
    /// Parse and validation failures are the caller's fault; I/O is not.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, IngestError::Io(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> DataFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

impl FromStr for DataFormat {
    type Err = IngestError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DataFormat::Csv),
            "json" => Ok(DataFormat::Json),
            other => Err(IngestError::UnknownFormat(other.to_string())),
        }
    }
}

/// Validated games of one league, sorted by `(start_time, game_id)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub league: League,
    pub games: Vec<GameRecord>,
    pub source_meta: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from already-validated games, sorting them.
    pub fn new(league: League, mut games: Vec<GameRecord>) -> Result<Self, IngestError> {
        let mut seen = HashSet::new();
        for g in &games {
            if g.league != league {
                return Err(IngestError::MixedLeagues(format!("{}, {}", league, g.league)));
            }
            if !seen.insert(g.game_id.clone()) {
                return Err(IngestError::Validation {
                    game_id: g.game_id.clone(),
                    message: "duplicate game_id".into(),
                });
            }
            g.validate().map_err(|e| IngestError::Validation {
                game_id: g.game_id.clone(),
                message: e.to_string(),
            })?;
        }
        sort_games(&mut games);
        Ok(Dataset {
            league,
            games,
            source_meta: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.games.len()
    }

    pub fn is_empty(&self) -> bool {
        self.games.is_empty()
    }
}

pub fn sort_games(games: &mut [GameRecord]) {
    games.sort_by(|a, b| {
        a.start_time
            .cmp(&b.start_time)
            .then_with(|| a.game_id.cmp(&b.game_id))
    });
}

/// Keeps one quote per casino: the one with the latest `updated_at`.
///
/// Output is ordered by casino id. If a casino posted two different lines at
/// the same instant the smaller one under a fixed total order wins, so the
/// result never depends on input order.
pub fn last_update_filter(raw_quotes: Vec<CasinoQuote>) -> Vec<CasinoQuote> {
    let mut latest: BTreeMap<String, CasinoQuote> = BTreeMap::new();
    for q in raw_quotes {
        match latest.get(&q.casino_id) {
            Some(cur) if !supersedes(&q, cur) => {}
            _ => {
                latest.insert(q.casino_id.clone(), q);
            }
        }
    }
    latest.into_values().collect()
}

fn supersedes(new: &CasinoQuote, cur: &CasinoQuote) -> bool {
    use std::cmp::Ordering;
    match new.updated_at.cmp(&cur.updated_at) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            let key = |q: &CasinoQuote| {
                (
                    q.favorite_ml.map(i32::from),
                    q.underdog_ml.map(i32::from),
                )
            };
            match new.favorite_spread.total_cmp(&cur.favorite_spread) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => key(new) < key(cur),
            }
        }
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    game_id: String,
    league: String,
    start_time: String,
    favorite: String,
    underdog: String,
    fav_points: u32,
    und_points: u32,
    casino_id: String,
    fav_spread: f64,
    fav_ml: Option<i32>,
    und_ml: Option<i32>,
    updated_at: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonQuote {
    casino_id: String,
    fav_spread: f64,
    #[serde(default)]
    fav_ml: Option<i32>,
    #[serde(default)]
    und_ml: Option<i32>,
    updated_at: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonGame {
    game_id: String,
    league: String,
    start_time: String,
    favorite: String,
    underdog: String,
    fav_points: u32,
    und_points: u32,
    quotes: Vec<JsonQuote>,
}

/// Game header plus raw (unfiltered) quotes, before validation.
struct RawGame {
    line: u64,
    game_id: String,
    league: String,
    start_time: String,
    favorite: String,
    underdog: String,
    fav_points: u32,
    und_points: u32,
    quotes: Vec<(u64, JsonQuote)>,
}

fn parse_time(s: &str, line: u64, field: &str) -> Result<DateTime<Utc>, IngestError> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| IngestError::Parse {
            line,
            message: format!("{field} `{s}` is not an ISO-8601 timestamp: {e}"),
        })
}

pub fn format_time(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

fn read_csv_raw<R: Read>(reader: R) -> Result<Vec<RawGame>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_err(&e))?.clone();
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != CSV_HEADER {
        return Err(IngestError::Parse {
            line: 1,
            message: format!("unexpected header `{}`", got.join(",")),
        });
    }

    let mut games: Vec<RawGame> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(csv_err(&e)),
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: CsvRow = record
            .deserialize(Some(&headers))
            .map_err(|e| IngestError::Parse {
                line,
                message: e.to_string(),
            })?;
        push_row(&mut games, &mut index, row, line)?;
    }
    Ok(games)
}

fn csv_err(e: &csv::Error) -> IngestError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    IngestError::Parse {
        line,
        message: e.to_string(),
    }
}

fn push_row(
    games: &mut Vec<RawGame>,
    index: &mut BTreeMap<String, usize>,
    row: CsvRow,
    line: u64,
) -> Result<(), IngestError> {
    let quote = JsonQuote {
        casino_id: row.casino_id,
        fav_spread: row.fav_spread,
        fav_ml: row.fav_ml,
        und_ml: row.und_ml,
        updated_at: row.updated_at,
    };
    match index.get(&row.game_id) {
        Some(&i) => {
            let g = &mut games[i];
            let same = g.league == row.league
                && g.start_time == row.start_time
                && g.favorite == row.favorite
                && g.underdog == row.underdog
                && g.fav_points == row.fav_points
                && g.und_points == row.und_points;
            if !same {
                return Err(IngestError::Validation {
                    game_id: row.game_id,
                    message: format!("line {line}: game fields disagree with line {}", g.line),
                });
            }
            g.quotes.push((line, quote));
        }
        None => {
            index.insert(row.game_id.clone(), games.len());
            games.push(RawGame {
                line,
                game_id: row.game_id,
                league: row.league,
                start_time: row.start_time,
                favorite: row.favorite,
                underdog: row.underdog,
                fav_points: row.fav_points,
                und_points: row.und_points,
                quotes: vec![(line, quote)],
            });
        }
    }
    Ok(())
}

fn read_json_raw<R: Read>(reader: R) -> Result<Vec<RawGame>, IngestError> {
    let games: Vec<JsonGame> = serde_json::from_reader(reader).map_err(|e| IngestError::Parse {
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    let mut seen = HashSet::new();
    games
        .into_iter()
        .map(|g| {
            if !seen.insert(g.game_id.clone()) {
                return Err(IngestError::Validation {
                    game_id: g.game_id,
                    message: "duplicate game_id".into(),
                });
            }
            Ok(RawGame {
                line: 0,
                game_id: g.game_id,
                league: g.league,
                start_time: g.start_time,
                favorite: g.favorite,
                underdog: g.underdog,
                fav_points: g.fav_points,
                und_points: g.und_points,
                quotes: g.quotes.into_iter().map(|q| (0, q)).collect(),
            })
        })
        .collect()
}

/// Turns a raw game into a validated record. `Ok(None)` means the game was
/// dropped because no casino posted a moneyline.
fn finish_game(raw: RawGame) -> Result<Option<GameRecord>, IngestError> {
    let invalid = |message: String| IngestError::Validation {
        game_id: raw.game_id.clone(),
        message,
    };
    let league = League::new(&raw.league).map_err(|e| invalid(e.to_string()))?;
    let start_time = parse_time(&raw.start_time, raw.line, "start_time")?;
    let mut quotes = Vec::with_capacity(raw.quotes.len());
    for (line, q) in &raw.quotes {
        let updated_at = parse_time(&q.updated_at, *line, "updated_at")?;
        let odds = |v: Option<i32>| -> Result<Option<MoneylineOdds>, IngestError> {
            v.map(MoneylineOdds::new)
                .transpose()
                .map_err(|e| invalid(format!("casino {}: {e}", q.casino_id)))
        };
        if q.casino_id.trim().is_empty() {
            return Err(invalid("empty casino_id".into()));
        }
        if !q.fav_spread.is_finite() || q.fav_spread > 0.0 {
            return Err(invalid(format!(
                "casino {}: fav_spread {} must be <= 0 (favorite's handicap)",
                q.casino_id, q.fav_spread
            )));
        }
        if updated_at >= start_time {
            return Err(invalid(format!(
                "casino {}: updated_at {} is not before start_time {}",
                q.casino_id, q.updated_at, raw.start_time
            )));
        }
        quotes.push(CasinoQuote {
            casino_id: q.casino_id.clone(),
            favorite_spread: q.fav_spread,
            favorite_ml: odds(q.fav_ml)?,
            underdog_ml: odds(q.und_ml)?,
            updated_at,
        });
    }
    let quotes = last_update_filter(quotes);
    let game = GameRecord {
        game_id: raw.game_id.clone(),
        league,
        start_time,
        favorite_name: raw.favorite,
        underdog_name: raw.underdog,
        favorite_points: raw.fav_points,
        underdog_points: raw.und_points,
        quotes,
    };
    game.validate().map_err(|e| invalid(e.to_string()))?;
    if !game.has_moneyline() {
        warn!(game_id = %game.game_id, "dropping game without any moneyline quote");
        return Ok(None);
    }
    if game.quotes.len() > MAX_EXPECTED_QUOTES {
        warn!(
            game_id = %game.game_id,
            quotes = game.quotes.len(),
            "more casino quotes than expected"
        );
    }
    Ok(Some(game))
}

/// Parses a dataset from a reader, returning one dataset per league in league
/// order.
pub fn read_datasets<R: Read>(reader: R, format: DataFormat) -> Result<Vec<Dataset>, IngestError> {
    let raw = match format {
        DataFormat::Csv => read_csv_raw(reader)?,
        DataFormat::Json => read_json_raw(reader)?,
    };
    if raw.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    let mut by_league: BTreeMap<League, Vec<GameRecord>> = BTreeMap::new();
    for r in raw {
        if let Some(game) = finish_game(r)? {
            by_league.entry(game.league.clone()).or_default().push(game);
        }
    }
    if by_league.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    by_league
        .into_iter()
        .map(|(league, games)| Dataset::new(league, games))
        .collect()
}

/// Loads every league in a file.
pub fn load_datasets(path: &Path, format: DataFormat) -> Result<Vec<Dataset>, IngestError> {
    let file = File::open(path)?;
    let mut sets = read_datasets(BufReader::new(file), format)?;
    for d in &mut sets {
        d.source_meta.push(format!("path={}", path.display()));
        d.source_meta.push(format!(
            "format={}",
            match format {
                DataFormat::Csv => "csv",
                DataFormat::Json => "json",
            }
        ));
    }
    Ok(sets)
}

/// Loads a single-league file.
pub fn load_dataset(path: &Path, format: DataFormat) -> Result<Dataset, IngestError> {
    let mut sets = load_datasets(path, format)?;
    if sets.len() > 1 {
        let tags: Vec<String> = sets.iter().map(|d| d.league.to_string()).collect();
        return Err(IngestError::MixedLeagues(tags.join(", ")));
    }
    Ok(sets.remove(0))
}

/// Merges datasets (possibly loaded concurrently) into one per league.
pub fn merge_datasets(sets: Vec<Dataset>) -> Result<Vec<Dataset>, IngestError> {
    let mut by_league: BTreeMap<League, (Vec<GameRecord>, Vec<String>)> = BTreeMap::new();
    for d in sets {
        let entry = by_league.entry(d.league).or_default();
        entry.0.extend(d.games);
        entry.1.extend(d.source_meta);
    }
    by_league
        .into_iter()
        .map(|(league, (games, meta))| {
            let mut d = Dataset::new(league, games)?;
            d.source_meta = meta;
            Ok(d)
        })
        .collect()
}

pub fn write_dataset<W: Write>(games: &[GameRecord], writer: W, format: DataFormat) -> Result<(), IngestError> {
    match format {
        DataFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(CSV_HEADER).map_err(csv_write_err)?;
            for g in games {
                for q in &g.quotes {
                    let opt = |o: Option<MoneylineOdds>| o.map(|v| v.american().to_string()).unwrap_or_default();
                    w.write_record([
                        g.game_id.clone(),
                        g.league.to_string(),
                        format_time(&g.start_time),
                        g.favorite_name.clone(),
                        g.underdog_name.clone(),
                        g.favorite_points.to_string(),
                        g.underdog_points.to_string(),
                        q.casino_id.clone(),
                        q.favorite_spread.to_string(),
                        opt(q.favorite_ml),
                        opt(q.underdog_ml),
                        format_time(&q.updated_at),
                    ])
                    .map_err(csv_write_err)?;
                }
            }
            w.flush()?;
        }
        DataFormat::Json => {
            let out: Vec<JsonGame> = games
                .iter()
                .map(|g| JsonGame {
                    game_id: g.game_id.clone(),
                    league: g.league.to_string(),
                    start_time: format_time(&g.start_time),
                    favorite: g.favorite_name.clone(),
                    underdog: g.underdog_name.clone(),
                    fav_points: g.favorite_points,
                    und_points: g.underdog_points,
                    quotes: g
                        .quotes
                        .iter()
                        .map(|q| JsonQuote {
                            casino_id: q.casino_id.clone(),
                            fav_spread: q.favorite_spread,
                            fav_ml: q.favorite_ml.map(i32::from),
                            und_ml: q.underdog_ml.map(i32::from),
                            updated_at: format_time(&q.updated_at),
                        })
                        .collect(),
                })
                .collect();
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, &out).map_err(|e| std::io::Error::other(e.to_string()))?;
            writer.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn csv_write_err(e: csv::Error) -> IngestError {
    IngestError::Io(std::io::Error::other(e.to_string()))
}

pub fn save_dataset(dataset: &Dataset, path: &Path, format: DataFormat) -> Result<(), IngestError> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_dataset(&dataset.games, &mut w, format)?;
    w.flush()?;
    Ok(())
}
