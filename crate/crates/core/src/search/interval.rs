//! Percentile and highest-density intervals over bootstrap samples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bootstrap::BootstrapSample;
use super::SearchError;
use crate::stats::{quantile_sorted, sorted_copy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntervalVariable {
    #[serde(rename = "ROI")]
    Roi,
    #[serde(rename = "EVThreshold")]
    EvThreshold,
    Epsilon,
    FracBet,
}

impl IntervalVariable {
    pub const ALL: [IntervalVariable; 4] = [
        IntervalVariable::Roi,
        IntervalVariable::EvThreshold,
        IntervalVariable::Epsilon,
        IntervalVariable::FracBet,
    ];

    pub fn extract(self, s: &BootstrapSample) -> f64 {
        match self {
            IntervalVariable::Roi => s.optimum.roi_pct,
            IntervalVariable::EvThreshold => s.optimum.ev_threshold,
            IntervalVariable::Epsilon => s.optimum.epsilon,
            IntervalVariable::FracBet => s.optimum.frac_bet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalMethod {
    Percentile,
    HighDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sided {
    Two,
    OneLower,
}

impl FromStr for Sided {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two" => Ok(Sided::Two),
            "one_lower" | "one-lower" => Ok(Sided::OneLower),
            other => Err(format!("unknown sidedness `{other}` (expected two or one_lower)")),
        }
    }
}

impl fmt::Display for Sided {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sided::Two => "two",
            Sided::OneLower => "one_lower",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn width(self) -> f64 {
        self.high - self.low
    }
}

fn check(samples: &[f64], level: f64) -> Result<(), SearchError> {
    if samples.is_empty() {
        return Err(SearchError::EmptySamples);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(SearchError::InvalidLevel(level));
    }
    Ok(())
}

/// Two-sided: the `(1-level)/2` and `1-(1-level)/2` quantiles. One-sided
/// lower: the `1-level` quantile and the sample maximum.
pub fn percentile_interval(samples: &[f64], level: f64, sided: Sided) -> Result<Interval, SearchError> {
    check(samples, level)?;
    let sorted = sorted_copy(samples);
    let tail = 1.0 - level;
    Ok(match sided {
        Sided::Two => Interval {
            low: quantile_sorted(&sorted, tail / 2.0),
            high: quantile_sorted(&sorted, 1.0 - tail / 2.0),
        },
        Sided::OneLower => Interval {
            low: quantile_sorted(&sorted, tail),
            high: sorted[sorted.len() - 1],
        },
    })
}

/// Shortest window of consecutive order statistics spanning `level` of the
/// sample.
///
/// The window holds `floor(level * (n - 1)) + 1` points, i.e. it spans the
/// same number of order-statistic gaps as the type-7 percentile interval
/// does, so it is never wider than that interval. Ties go to the lowest
/// window.
pub fn hdi_interval(samples: &[f64], level: f64) -> Result<Interval, SearchError> {
    check(samples, level)?;
    let sorted = sorted_copy(samples);
    let n = sorted.len();
    let span = ((level * (n - 1) as f64) + 1e-9).floor() as usize;
    let mut best = 0;
    for i in 1..n - span {
        if sorted[i + span] - sorted[i] < sorted[best + span] - sorted[best] {
            best = i;
        }
    }
    Ok(Interval {
        low: sorted[best],
        high: sorted[best + span],
    })
}

/// One row of an interval table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub league: String,
    pub model: String,
    pub method: IntervalMethod,
    pub level: f64,
    pub sided: Sided,
    pub variable: IntervalVariable,
    pub low: f64,
    pub high: f64,
}

/// Two-sided percentile and HDI rows at `two_sided_level` plus one-sided
/// lower percentile rows at `one_sided_level`, for every variable.
pub fn interval_rows(
    league: &str,
    model: &str,
    samples: &[BootstrapSample],
    two_sided_level: f64,
    one_sided_level: f64,
) -> Result<Vec<IntervalReport>, SearchError> {
    let mut rows = Vec::new();
    for variable in IntervalVariable::ALL {
        let values: Vec<f64> = samples.iter().map(|s| variable.extract(s)).collect();
        let row = |method, level, sided, iv: Interval| IntervalReport {
            league: league.to_string(),
            model: model.to_string(),
            method,
            level,
            sided,
            variable,
            low: iv.low,
            high: iv.high,
        };
        rows.push(row(
            IntervalMethod::Percentile,
            two_sided_level,
            Sided::Two,
            percentile_interval(&values, two_sided_level, Sided::Two)?,
        ));
        rows.push(row(
            IntervalMethod::HighDensity,
            two_sided_level,
            Sided::Two,
            hdi_interval(&values, two_sided_level)?,
        ));
        rows.push(row(
            IntervalMethod::Percentile,
            one_sided_level,
            Sided::OneLower,
            percentile_interval(&values, one_sided_level, Sided::OneLower)?,
        ));
    }
    Ok(rows)
}
