#![allow(dead_code)]

use chrono::{DateTime, Duration, TimeZone, Utc};
use edgeline::rng::StreamRng;
use edgeline::{CasinoQuote, GameRecord, League, MoneylineOdds};
use rand::Rng;

pub fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2014, 9, 1, 0, 0, 0).unwrap()
}

pub fn random_odds(rng: &mut StreamRng) -> MoneylineOdds {
    let mag = rng.gen_range(100..=600);
    MoneylineOdds::new(if rng.gen::<bool>() { mag } else { -mag }).unwrap()
}

/// Random games on a coarse clock so several share a start time. Spreads
/// come from a small set so the index has real history per spread.
pub fn random_games(rng: &mut StreamRng, n: usize, first_hour: i64) -> Vec<GameRecord> {
    let spreads = [0.0, -0.5, -1.0, -1.5, -3.0, -3.5, -7.0];
    (0..n)
        .map(|i| {
            let start = t0() + Duration::hours(first_hour + rng.gen_range(0..(n as i64 * 2).max(1)) / 2 * 2);
            let base = spreads[rng.gen_range(0..spreads.len())];
            let nq = rng.gen_range(1..=3);
            let quotes = (0..nq)
                .map(|c| CasinoQuote {
                    casino_id: format!("c{c}"),
                    favorite_spread: if rng.gen::<f64>() < 0.3 { (base - 0.5f64).min(0.0) } else { base },
                    favorite_ml: rng.gen::<f64>().lt(&0.95).then(|| random_odds(rng)),
                    underdog_ml: rng.gen::<f64>().lt(&0.95).then(|| random_odds(rng)),
                    updated_at: start - Duration::minutes(rng.gen_range(1..600)),
                })
                .collect();
            let fav = rng.gen_range(0..40u32);
            let dog = if rng.gen::<f64>() < 0.03 { fav } else { rng.gen_range(0..40u32) };
            GameRecord {
                game_id: format!("h{first_hour}-g{i:04}"),
                league: League::new("NBA").unwrap(),
                start_time: start,
                favorite_name: "A".into(),
                underdog_name: "B".into(),
                favorite_points: fav,
                underdog_points: dog,
                quotes,
            }
        })
        .collect()
}
