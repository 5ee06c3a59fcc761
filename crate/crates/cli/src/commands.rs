use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use edgeline::backtest::{backtest_priced, price_games, run_backtest, write_ledger_csv, yearly_table, BacktestReport, PricedGame, YearlyRow};
use edgeline::baselines::{run_baseline, BaselineConfig, BaselineError, BaselineReport};
use edgeline::density::{ash2d, ash_svg, histogram, histogram_svg, scott_bins, write_ash_csv, write_histogram_csv};
use edgeline::ingest::{load_datasets, merge_datasets, write_dataset, DataFormat, Dataset, IngestError};
use edgeline::search::bonferroni::bonferroni_report;
use edgeline::search::bootstrap::write_samples_csv;
use edgeline::search::grid::{ev_ceiling, write_grid_csv, DEFAULT_EPSILON_MAX, DEFAULT_EPSILON_STEP, DEFAULT_EV_STEP};
use edgeline::search::interval::interval_rows;
use edgeline::search::{bootstrap_priced, grid_search_priced, synth_market, BootstrapConfig, Grid, SearchError, SynthSpec};
use edgeline::winprob::SpreadIndex;
use edgeline::{League, ProbabilityModel, StrategyParams};

use crate::cli::*;
use crate::input;
use crate::manifest::{slug, Outputs};
use crate::text::{num, opt_num, Table};

/// What a command prints on stdout.
pub struct Summary {
    pub json: Value,
    pub text: String,
}

pub struct Ctx<'a> {
    pub out: &'a mut Outputs,
    pub global: &'a GlobalArgs,
}

fn ingest_err(e: IngestError) -> anyhow::Error {
    if e.is_input_error() {
        input(e)
    } else {
        anyhow::Error::new(e)
    }
}

fn search_err(e: SearchError) -> anyhow::Error {
    match e {
        SearchError::Csv(_) => anyhow::Error::new(e),
        other => input(other),
    }
}

pub fn load(ctx: &mut Ctx, args: &DataArgs) -> Result<Vec<Dataset>> {
    let mut sets = Vec::new();
    for path in &args.data {
        let format = match &args.input_format {
            Some(f) => f.parse().map_err(ingest_err)?,
            None => DataFormat::from_path(path),
        };
        ctx.out.record_input(path)?;
        sets.extend(load_datasets(path, format).map_err(ingest_err)?);
    }
    let mut sets = merge_datasets(sets).map_err(ingest_err)?;
    if !args.leagues.is_empty() {
        let wanted: Vec<League> = args
            .leagues
            .iter()
            .map(|l| League::new(l).map_err(input))
            .collect::<Result<_>>()?;
        for w in &wanted {
            if !sets.iter().any(|d| &d.league == w) {
                bail!(input(format!("league {w} not found in the data")));
            }
        }
        sets.retain(|d| wanted.contains(&d.league));
    }
    for d in &sets {
        tracing::info!(league = %d.league, games = d.games.len(), "loaded");
    }
    Ok(sets)
}

/// Spread history for `d`: its own games, or every loaded game when pooled.
fn index_for(sets: &[Dataset], d: &Dataset, pooled: bool) -> SpreadIndex {
    if pooled {
        SpreadIndex::build(sets.iter().flat_map(|s| &s.games))
    } else {
        SpreadIndex::build(&d.games)
    }
}

fn load_benchmark(ctx: &mut Ctx, path: Option<&Path>) -> Result<BTreeMap<i32, f64>> {
    let Some(path) = path else {
        return Ok(BTreeMap::new());
    };
    ctx.out.record_input(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening benchmark {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, rec) in rdr.deserialize::<(i32, f64)>().enumerate() {
        let (year, ret) = rec.map_err(|e| input(format!("benchmark {} line {}: {e}", path.display(), i + 2)))?;
        map.insert(year, ret);
    }
    Ok(map)
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn yearly_text(rows: &[YearlyRow]) -> String {
    let leagues: Vec<String> = rows.first().map(|r| r.leagues.keys().cloned().collect()).unwrap_or_default();
    let mut header = vec!["Year".to_string()];
    header.extend(leagues.iter().cloned());
    header.extend(["All Leagues".to_string(), "Sample Size".to_string(), "Benchmark %".to_string()]);
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new("Yearly ROI % (games bet)", &h);
    for r in rows {
        let mut cells = vec![r.year.to_string()];
        for l in &leagues {
            cells.push(match r.leagues.get(l).and_then(|c| c.as_ref()) {
                Some(c) => format!("{} ({})", num(c.roi_pct, 2), c.games_bet),
                None => "-".into(),
            });
        }
        cells.push(num(r.all_leagues_roi_pct, 2));
        cells.push(r.sample_size.to_string());
        cells.push(opt_num(r.benchmark_pct, 2));
        t.row(cells);
    }
    t.render()
}

pub fn validate(ctx: &mut Ctx, args: &ValidateArgs) -> Result<Summary> {
    let sets = load(ctx, &args.data)?;
    let leagues: Vec<Value> = sets
        .iter()
        .map(|d| {
            json!({
                "league": d.league.as_str(),
                "games": d.games.len(),
                "quotes": d.games.iter().map(|g| g.quotes.len()).sum::<usize>(),
                "first_start": d.games.first().map(|g| edgeline::ingest::format_time(&g.start_time)),
                "last_start": d.games.last().map(|g| edgeline::ingest::format_time(&g.start_time)),
            })
        })
        .collect();
    let report = json!({ "valid": true, "leagues": leagues });
    ctx.out.write_json("validate_report.json", &report)?;
    let mut t = Table::new("Validated datasets", &["League", "Games", "Quotes"]);
    for l in &leagues {
        t.row(vec![
            l["league"].as_str().unwrap_or_default().to_string(),
            l["games"].to_string(),
            l["quotes"].to_string(),
        ]);
    }
    Ok(Summary {
        json: report,
        text: t.render(),
    })
}

#[derive(Serialize)]
struct BacktestOutput<'a> {
    model: ProbabilityModel,
    epsilon: f64,
    ev_threshold: f64,
    reports: &'a [BacktestReport],
    yearly: &'a [YearlyRow],
}

pub fn backtest(ctx: &mut Ctx, args: &BacktestArgs) -> Result<Summary> {
    let params = StrategyParams::new(args.epsilon, args.ev_threshold, args.model).map_err(input)?;
    let sets = load(ctx, &args.data)?;
    let benchmark = load_benchmark(ctx, args.benchmark.as_deref())?;
    let mut reports = Vec::new();
    for d in &sets {
        let index = index_for(&sets, d, args.data.pooled_index);
        if args.index_dump {
            ctx.out.write_json(&format!("index_{}.json", slug(d.league.as_str())), &index.dump())?;
        }
        let run = run_backtest(d, params, &index).map_err(input)?;
        let encoding = ctx.global.decision_encoding;
        let ledger = csv_bytes(|w| Ok(write_ledger_csv(&run.ledger, w, encoding)?))?;
        ctx.out.write(&format!("ledger_{}.csv", slug(d.league.as_str())), &ledger)?;
        reports.push(run.report);
    }
    let per_league: Vec<(String, _)> = reports.iter().map(|r| (r.league.clone(), r.per_year.clone())).collect();
    let yearly = yearly_table(&per_league, &benchmark);
    let output = BacktestOutput {
        model: args.model,
        epsilon: args.epsilon,
        ev_threshold: args.ev_threshold,
        reports: &reports,
        yearly: &yearly,
    };
    ctx.out.write_json("backtest_report.json", &output)?;

    let header: Vec<String> = std::iter::once(String::new()).chain(reports.iter().map(|r| r.league.clone())).collect();
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(
        format!("Backtest ({}, epsilon {}, EV threshold {})", args.model, args.epsilon, args.ev_threshold),
        &h,
    );
    let row = |label: &str, f: &dyn Fn(&BacktestReport) -> String| {
        std::iter::once(label.to_string()).chain(reports.iter().map(f)).collect::<Vec<_>>()
    };
    t.row(row("Total Games Analyzed", &|r| r.games_analyzed.to_string()));
    t.row(row("Games Bet", &|r| r.games_bet.to_string()));
    t.row(row("ROI %", &|r| opt_num(r.roi_pct, 2)));
    Ok(Summary {
        json: serde_json::to_value(&output)?,
        text: format!("{}\n{}", t.render(), yearly_text(&yearly)),
    })
}

fn build_grid(args: &GridArgs, priced: &[PricedGame]) -> Result<Grid> {
    let ev_max = match args.ev_max {
        Some(v) if v >= 0.0 && v.is_finite() => v,
        Some(v) => bail!(input(format!("--ev-max {v} must be >= 0"))),
        None => ev_ceiling(priced, DEFAULT_EV_STEP),
    };
    let grid = match args.grid {
        GridKind::Full => Grid::stepped(DEFAULT_EPSILON_MAX, DEFAULT_EPSILON_STEP, ev_max, DEFAULT_EV_STEP),
        GridKind::Reduced => {
            if args.grid_size < 2 {
                bail!(input("--grid-size must be >= 2"));
            }
            let n_ev = if ev_max > 0.0 { args.grid_size } else { 1 };
            Grid::by_counts(DEFAULT_EPSILON_MAX, args.grid_size, ev_max, n_ev)
        }
    };
    grid.map_err(search_err)
}

#[derive(Serialize)]
struct RowEvOnly {
    epsilon: f64,
    ev_threshold: f64,
    games_bet: usize,
    roi_pct: Option<f64>,
}

#[derive(Serialize)]
struct RowEpsilonOnly {
    epsilon: f64,
    ev_threshold: f64,
    games_bet: usize,
    roi_pct: Option<f64>,
    total_return: f64,
}

#[derive(Serialize)]
struct RowOptimal {
    epsilon: f64,
    ev_threshold: f64,
    games_bet: usize,
    roi_pct: Option<f64>,
    total_return: f64,
}

#[derive(Serialize)]
struct LeagueOptimum {
    league: String,
    games_analyzed: usize,
    grid_shape: [usize; 2],
    ev_only: RowEvOnly,
    epsilon_only: RowEpsilonOnly,
    optimal: RowOptimal,
}

pub fn optimize(ctx: &mut Ctx, args: &OptimizeArgs) -> Result<Summary> {
    let sets = load(ctx, &args.data)?;
    let benchmark = load_benchmark(ctx, args.benchmark.as_deref())?;
    let mut leagues = Vec::new();
    let mut per_year = Vec::new();
    for d in &sets {
        let index = index_for(&sets, d, args.data.pooled_index);
        let priced = price_games(&d.games, &index, args.model);
        let grid = build_grid(&args.grid, &priced)?;
        let result = grid_search_priced(&priced, &grid);
        let grid_csv = csv_bytes(|w| Ok(write_grid_csv(&result, w)?))?;
        ctx.out.write(&format!("grid_{}.csv", slug(d.league.as_str())), &grid_csv)?;

        // expected value alone: the probability branch can never fire at 0.5
        let ev_params = StrategyParams::new(0.5, 0.0, args.model).expect("valid");
        let ev_only = backtest_priced(&d.league, &priced, ev_params).report;
        let mut best_i = 0;
        for i in 1..grid.epsilon_values.len() {
            if result.tr_matrix[i][0] > result.tr_matrix[best_i][0] {
                best_i = i;
            }
        }
        let roi = |tr: f64, n: usize| (n > 0).then(|| 100.0 * tr / n as f64);
        let (ai, aj) = result.argmax;
        let optimal_params = StrategyParams::new(grid.epsilon_values[ai], grid.ev_values[aj], args.model).expect("grid values are valid");
        let optimal_run = backtest_priced(&d.league, &priced, optimal_params).report;
        per_year.push((d.league.to_string(), optimal_run.per_year.clone()));
        leagues.push(LeagueOptimum {
            league: d.league.to_string(),
            games_analyzed: d.games.len(),
            grid_shape: [grid.epsilon_values.len(), grid.ev_values.len()],
            ev_only: RowEvOnly {
                epsilon: 0.5,
                ev_threshold: 0.0,
                games_bet: ev_only.games_bet,
                roi_pct: ev_only.roi_pct,
            },
            epsilon_only: RowEpsilonOnly {
                epsilon: grid.epsilon_values[best_i],
                ev_threshold: 0.0,
                games_bet: result.bets_matrix[best_i][0],
                roi_pct: roi(result.tr_matrix[best_i][0], result.bets_matrix[best_i][0]),
                total_return: result.tr_matrix[best_i][0],
            },
            optimal: RowOptimal {
                epsilon: result.optimum.epsilon,
                ev_threshold: result.optimum.ev_threshold,
                games_bet: result.optimum.games_bet,
                roi_pct: roi(result.optimum.total_return, result.optimum.games_bet),
                total_return: result.optimum.total_return,
            },
        });
    }
    let yearly = yearly_table(&per_year, &benchmark);
    let output = json!({
        "model": args.model,
        "leagues": leagues,
        "yearly": yearly,
    });
    ctx.out.write_json("optimize_report.json", &output)?;

    let header: Vec<String> = std::iter::once(String::new()).chain(leagues.iter().map(|l| l.league.clone())).collect();
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(format!("Optimized returns ({})", args.model), &h);
    let mut row = |label: &str, f: &dyn Fn(&LeagueOptimum) -> String| {
        t.row(std::iter::once(label.to_string()).chain(leagues.iter().map(f)).collect());
    };
    row("Total Games Analyzed", &|l| l.games_analyzed.to_string());
    row("Games Bet (EV only)", &|l| l.ev_only.games_bet.to_string());
    row("ROI % (EV only)", &|l| opt_num(l.ev_only.roi_pct, 2));
    row("Epsilon Value", &|l| num(l.epsilon_only.epsilon, 2));
    row("Bet Games", &|l| l.epsilon_only.games_bet.to_string());
    row("ROI % (epsilon)", &|l| opt_num(l.epsilon_only.roi_pct, 2));
    row("Optimal Epsilon", &|l| num(l.optimal.epsilon, 2));
    row("EV Threshold", &|l| num(l.optimal.ev_threshold, 3));
    row("Games Bet", &|l| l.optimal.games_bet.to_string());
    row("ROI % (optimal)", &|l| opt_num(l.optimal.roi_pct, 2));
    Ok(Summary {
        json: output,
        text: format!("{}\n{}", t.render(), yearly_text(&yearly)),
    })
}

pub fn bootstrap(ctx: &mut Ctx, args: &BootstrapArgs) -> Result<Summary> {
    let seed = args.seed.expect("seed resolved before running");
    if args.iterations == 0 {
        bail!(input("--iterations must be >= 1"));
    }
    for (name, level) in [("--level", args.level), ("--one-sided-level", args.one_sided_level), ("--alpha", args.alpha)] {
        if !(level > 0.0 && level < 1.0) {
            bail!(input(format!("{name} {level} must be in (0, 1)")));
        }
    }
    let sets = load(ctx, &args.data)?;
    let required = 1.0 - args.alpha / sets.len() as f64;
    if args.one_sided_level + 1e-12 < required {
        bail!(input(format!(
            "--one-sided-level {} is below the Bonferroni level {required} for {} leagues",
            args.one_sided_level,
            sets.len()
        )));
    }
    let config = BootstrapConfig::new(args.iterations, seed);
    let mut rows = Vec::new();
    for d in &sets {
        let index = index_for(&sets, d, args.data.pooled_index);
        let priced = price_games(&d.games, &index, args.model);
        let grid = build_grid(&args.grid, &priced)?;
        tracing::info!(league = %d.league, iterations = args.iterations, cells = grid.epsilon_values.len() * grid.ev_values.len(), "bootstrapping");
        let samples = bootstrap_priced(&priced, &grid, &config).map_err(search_err)?;
        let bytes = csv_bytes(|w| Ok(write_samples_csv(&samples, w)?))?;
        ctx.out.write(&format!("bootstrap_samples_{}.csv", slug(d.league.as_str())), &bytes)?;
        rows.extend(
            interval_rows(d.league.as_str(), args.model.name(), &samples, args.level, args.one_sided_level)
                .map_err(search_err)?,
        );
    }
    let intervals = json!({
        "model": args.model,
        "iterations": args.iterations,
        "seed": seed,
        "rows": rows,
    });
    ctx.out.write_json("intervals.json", &intervals)?;
    let expected: Vec<String> = sets.iter().map(|d| d.league.to_string()).collect();
    let verdict = bonferroni_report(&rows, &expected, args.alpha).map_err(search_err)?;
    ctx.out.write_json("bonferroni.json", &verdict)?;

    let mut t = Table::new(
        format!("Bootstrap intervals ({}, {} iterations)", args.model, args.iterations),
        &["League", "Variable", "Method", "Level", "Sided", "Low", "High"],
    );
    for r in &rows {
        t.row(vec![
            r.league.clone(),
            format!("{:?}", r.variable),
            format!("{:?}", r.method),
            num(r.level, 2),
            r.sided.to_string(),
            num(r.low, 4),
            num(r.high, 4),
        ]);
    }
    let mut v = Table::new(
        format!("Joint test (alpha {}, per-league level {:.4})", verdict.alpha, verdict.required_level),
        &["Variable", "Reject H0 jointly"],
    );
    for x in &verdict.verdicts {
        v.row(vec![format!("{:?}", x.variable), x.reject_jointly.to_string()]);
    }
    Ok(Summary {
        json: json!({ "intervals": intervals, "bonferroni": verdict }),
        text: format!("{}\n{}", t.render(), v.render()),
    })
}

pub fn baseline(ctx: &mut Ctx, args: &BaselineArgs) -> Result<Summary> {
    let seed = args.seed.expect("seed resolved before running");
    let config = match args.kind {
        BaselineKindArg::Spread => {
            if args.theta != 0.5 {
                bail!(input("--theta applies to the moneyline baseline only"));
            }
            BaselineConfig::new(edgeline::baselines::BaselineKind::SpreadEqual, 0.5, args.replications, seed)
        }
        BaselineKindArg::Moneyline => BaselineConfig::moneyline(args.theta, args.replications, seed),
    }
    .map_err(input)?;
    let sets = load(ctx, &args.data)?;
    let mut reports: Vec<BaselineReport> = Vec::new();
    for d in &sets {
        let r = run_baseline(d, &config).map_err(|e| match e {
            BaselineError::EmptyDataset | BaselineError::MissingSpread(_) | BaselineError::NoQuote(_) | BaselineError::InvalidConfig(_) => {
                input(format!("{}: {e}", d.league))
            }
        })?;
        reports.push(r);
    }
    let output = json!({ "reports": reports });
    ctx.out.write_json("baseline_report.json", &output)?;
    let mut t = Table::new(
        format!("Random baseline ({:?}, theta {}, {} replications)", config.kind, config.theta, config.replications),
        &["League", "Games", "Mean ROI %", "CI low", "CI high"],
    );
    for r in &reports {
        t.row(vec![
            r.league.clone(),
            r.games.to_string(),
            num(r.mean_roi, 2),
            num(r.ci95[0], 2),
            num(r.ci95[1], 2),
        ]);
    }
    Ok(Summary {
        json: output,
        text: t.render(),
    })
}

fn parse_pair(s: &str, name: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let a: usize = a.parse().map_err(|_| input(format!("{name}: `{s}` is not N,N")))?;
            let b: usize = b.parse().map_err(|_| input(format!("{name}: `{s}` is not N,N")))?;
            if a == 0 || b == 0 {
                bail!(input(format!("{name}: values must be >= 1")));
            }
            Ok((a, b))
        }
        _ => bail!(input(format!("{name}: `{s}` is not N,N"))),
    }
}

fn read_column(path: &Path, name: &str) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = rdr.headers().map_err(|e| input(format!("{}: {e}", path.display())))?.clone();
    let col = headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| input(format!("{}: no column `{name}` (have {})", path.display(), headers.iter().collect::<Vec<_>>().join(", "))))?;
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| input(format!("{}: {e}", path.display())))?;
        let v: f64 = rec
            .get(col)
            .unwrap_or_default()
            .parse()
            .map_err(|_| input(format!("{} line {}: `{name}` is not a number", path.display(), i + 2)))?;
        values.push(v);
    }
    Ok(values)
}

pub fn density(ctx: &mut Ctx, args: &DensityArgs) -> Result<Summary> {
    ctx.out.record_input(&args.input)?;
    let mut columns = vec![args.x.clone()];
    columns.extend(args.y.clone());
    let mut summary = serde_json::Map::new();
    let mut text = String::new();
    let mut data = BTreeMap::new();
    for c in &columns {
        let values = read_column(&args.input, c)?;
        let hist = histogram(&values, args.width).map_err(input)?;
        let bytes = csv_bytes(|w| Ok(write_histogram_csv(&hist, w)?))?;
        ctx.out.write(&format!("hist_{}.csv", slug(c)), &bytes)?;
        if args.svg {
            ctx.out.write(&format!("hist_{}.svg", slug(c)), histogram_svg(&hist, c).as_bytes())?;
        }
        let mut t = Table::new(format!("Histogram of {c} (bin width {:.6})", hist.bin_width), &["bin_left", "bin_right", "count"]);
        for (i, n) in hist.counts.iter().enumerate() {
            t.row(vec![num(hist.bin_left(i), 6), num(hist.bin_left(i + 1), 6), n.to_string()]);
        }
        text.push_str(&t.render());
        summary.insert(
            format!("hist_{c}"),
            json!({ "origin": hist.origin, "bin_width": hist.bin_width, "bins": hist.counts.len(), "n": hist.n }),
        );
        data.insert(c.clone(), values);
    }
    if args.ash {
        let Some(y) = &args.y else {
            bail!(input("--ash needs --y"));
        };
        let (xs, ys) = (&data[&args.x], &data[y]);
        let bins = match &args.bins {
            Some(b) => parse_pair(b, "--bins")?,
            None => scott_bins(xs, ys).map_err(input)?,
        };
        let shifts = parse_pair(&args.shifts, "--shifts")?;
        let grid = ash2d(xs, ys, bins, shifts).map_err(input)?;
        let stem = format!("ash_{}_{}", slug(&args.x), slug(y));
        let bytes = csv_bytes(|w| Ok(write_ash_csv(&grid, w)?))?;
        ctx.out.write(&format!("{stem}.csv"), &bytes)?;
        if args.svg {
            ctx.out.write(&format!("{stem}.svg"), ash_svg(&grid, &stem).as_bytes())?;
        }
        let _ = std::fmt::Write::write_fmt(
            &mut text,
            format_args!(
                "ASH {} x {}: bins {:?}, shifts {:?}, {} x {} cells, max density {:.6}\n",
                args.x,
                y,
                bins,
                shifts,
                grid.nx,
                grid.ny,
                grid.max_density()
            ),
        );
        summary.insert(
            "ash".into(),
            json!({ "bins": [bins.0, bins.1], "shifts": [shifts.0, shifts.1], "h_x": grid.h_x, "h_y": grid.h_y, "cells": [grid.nx, grid.ny] }),
        );
    }
    Ok(Summary {
        json: Value::Object(summary),
        text,
    })
}

pub fn synth(ctx: &mut Ctx, args: &SynthArgs) -> Result<Summary> {
    let seed = args.seed.expect("seed resolved before running");
    let mut spec = match &args.spec {
        Some(path) => {
            ctx.out.record_input(path)?;
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<SynthSpec>(&text).map_err(|e| input(format!("{}: {e}", path.display())))?
        }
        None if args.planted => SynthSpec::planted_edge(args.games),
        None => SynthSpec::new(args.games),
    };
    if args.spec.is_none() {
        spec.league = League::new(&args.league).map_err(input)?.to_string();
    }
    if let Some(v) = args.soft_fraction {
        spec.soft_fraction = v;
    }
    if let Some(v) = args.margin {
        spec.soft_margin = v;
    }
    if let Some(v) = args.vig {
        spec.vig = v;
    }
    if let Some(v) = args.sharp_casinos {
        spec.sharp_casinos = v;
    }
    let dataset = synth_market(&spec, seed).map_err(search_err)?;
    let format: DataFormat = args.output_format.parse().map_err(ingest_err)?;
    let ext = match format {
        DataFormat::Csv => "csv",
        DataFormat::Json => "json",
    };
    let mut bytes = Vec::new();
    write_dataset(&dataset.games, &mut bytes, format).map_err(ingest_err)?;
    let name = format!("synth_{}.{ext}", slug(dataset.league.as_str()));
    ctx.out.write(&name, &bytes)?;
    ctx.out.write_json("synth_spec.json", &spec)?;
    let report = json!({ "dataset": name, "league": dataset.league.as_str(), "games": dataset.games.len(), "seed": seed, "spec": spec });
    let mut t = Table::new("Synthetic market", &["Field", "Value"]);
    t.row(vec!["Dataset".into(), name.clone()]);
    t.row(vec!["Games".into(), dataset.games.len().to_string()]);
    t.row(vec!["Seed".into(), seed.to_string()]);
    t.row(vec!["Soft fraction".into(), spec.soft_fraction.to_string()]);
    t.row(vec!["Soft margin".into(), spec.soft_margin.to_string()]);
    Ok(Summary {
        json: report,
        text: t.render(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("5, 7", "--bins").unwrap(), (5, 7));
        assert!(parse_pair("5", "--bins").is_err());
        assert!(parse_pair("0,1", "--bins").is_err());
    }
}
