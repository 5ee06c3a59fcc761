//! Joint one-sided test across leagues.
//!
//! With `m` leagues tested at family-wise level `alpha`, each league's
//! one-sided interval must have level at least `1 - alpha / m`. The null of
//! a zero parameter is rejected jointly when every league's lower bound is
//! strictly positive.

use std::collections::BTreeMap;

use serde::Serialize;

use super::interval::{IntervalMethod, IntervalReport, IntervalVariable, Sided};
use super::SearchError;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeagueBound {
    pub league: String,
    pub low: f64,
    pub high: f64,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableVerdict {
    pub variable: IntervalVariable,
    pub reject_jointly: bool,
    pub leagues: Vec<LeagueBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BonferroniReport {
    pub model: String,
    pub alpha: f64,
    pub leagues_tested: usize,
    pub required_level: f64,
    pub level: f64,
    pub verdicts: Vec<VariableVerdict>,
}

/// Tests ROI and epsilon using one-sided lower percentile rows.
///
/// `expected` lists leagues that must be present; pass an empty slice to
/// accept whatever leagues appear in `intervals`.
pub fn bonferroni_report(
    intervals: &[IntervalReport],
    expected: &[String],
    alpha: f64,
) -> Result<BonferroniReport, SearchError> {
    let rows: Vec<&IntervalReport> = intervals
        .iter()
        .filter(|r| r.method == IntervalMethod::Percentile && r.sided == Sided::OneLower)
        .collect();
    if rows.is_empty() {
        return Err(SearchError::MissingLeague("no one-sided intervals supplied".into()));
    }
    let mut leagues: Vec<String> = rows.iter().map(|r| r.league.clone()).collect();
    leagues.extend(expected.iter().cloned());
    leagues.sort();
    leagues.dedup();

    let m = leagues.len();
    let required = 1.0 - alpha / m as f64;
    let level = rows.iter().map(|r| r.level).fold(f64::INFINITY, f64::min);
    if level + 1e-12 < required {
        return Err(SearchError::InsufficientLevel { level, required });
    }

    let mut verdicts = Vec::new();
    for variable in [IntervalVariable::Roi, IntervalVariable::Epsilon] {
        let by_league: BTreeMap<&str, &IntervalReport> = rows
            .iter()
            .filter(|r| r.variable == variable)
            .map(|r| (r.league.as_str(), *r))
            .collect();
        let mut bounds = Vec::with_capacity(m);
        for league in &leagues {
            let r = by_league
                .get(league.as_str())
                .ok_or_else(|| SearchError::MissingLeague(format!("{league} has no {variable:?} interval")))?;
            bounds.push(LeagueBound {
                league: league.clone(),
                low: r.low,
                high: r.high,
                positive: r.low > 0.0,
            });
        }
        verdicts.push(VariableVerdict {
            variable,
            reject_jointly: bounds.iter().all(|b| b.positive),
            leagues: bounds,
        });
    }
    Ok(BonferroniReport {
        model: rows[0].model.clone(),
        alpha,
        leagues_tested: m,
        required_level: required,
        level,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(league: &str, variable: IntervalVariable, low: f64) -> IntervalReport {
        IntervalReport {
            league: league.into(),
            model: "simple".into(),
            method: IntervalMethod::Percentile,
            level: 0.99,
            sided: Sided::OneLower,
            variable,
            low,
            high: low + 10.0,
        }
    }

    fn rows(roi_lows: &[f64]) -> Vec<IntervalReport> {
        let names = ["NFL", "NBA", "NCAAF", "NCAAB", "WNBA"];
        roi_lows
            .iter()
            .zip(names)
            .flat_map(|(&l, n)| [row(n, IntervalVariable::Roi, l), row(n, IntervalVariable::Epsilon, 0.1)])
            .collect()
    }

    #[test]
    fn all_positive_rejects() {
        let r = bonferroni_report(&rows(&[1.0, 2.0, 0.5, 3.0, 0.1]), &[], DEFAULT_ALPHA).unwrap();
        assert!(r.verdicts.iter().all(|v| v.reject_jointly));
        assert!((r.required_level - 0.99).abs() < 1e-12);
    }

    #[test]
    fn zero_bound_fails_jointly() {
        let r = bonferroni_report(&rows(&[1.0, 0.0, 0.5, 3.0, 0.1]), &[], DEFAULT_ALPHA).unwrap();
        assert!(!r.verdicts[0].reject_jointly);
        assert!(r.verdicts[1].reject_jointly);
    }

    #[test]
    fn missing_leagues() {
        assert!(matches!(bonferroni_report(&[], &[], DEFAULT_ALPHA), Err(SearchError::MissingLeague(_))));
        let err = bonferroni_report(&rows(&[1.0]), &["NBA".to_string()], DEFAULT_ALPHA);
        assert!(matches!(err, Err(SearchError::MissingLeague(_))));
    }

    #[test]
    fn level_too_low() {
        let mut r = rows(&[1.0, 1.0, 1.0, 1.0, 1.0]);
        for x in &mut r {
            x.level = 0.95;
        }
        assert!(matches!(
            bonferroni_report(&r, &[], DEFAULT_ALPHA),
            Err(SearchError::InsufficientLevel { .. })
        ));
    }
}
