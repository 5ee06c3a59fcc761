//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p edgeline-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration as Elapsed, Instant};

use chrono::{DateTime, Duration, TimeZone, Utc};
use edgeline::backtest::{backtest_priced, price_games, run_backtest, PricedGame};
use edgeline::baselines::{run_baseline, BaselineConfig};
use edgeline::density::ash2d;
use edgeline::ingest::Dataset;
use edgeline::rng::{stream_rng, with_workers, StreamRng};
use edgeline::search::interval::{hdi_interval, percentile_interval, Sided};
use edgeline::search::{bootstrap_priced, grid_search_priced, synth_market, BootstrapConfig, Grid, SynthSpec};
use edgeline::valuation::{decide, payout_from_odds, DecisionEncoding};
use edgeline::winprob::SpreadIndex;
use edgeline::{CasinoQuote, GameRecord, League, MoneylineOdds, ProbabilityModel, Side, StrategyParams};
use rand::Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn FnMut() -> Outcome>);

fn ensure(ok: bool, detail: impl Into<String>) -> Outcome {
    let detail = detail.into();
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- fixtures

fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2015, 1, 1, 0, 0, 0).unwrap()
}

fn random_odds(rng: &mut StreamRng) -> MoneylineOdds {
    let mag = rng.gen_range(100..=800);
    MoneylineOdds::new(if rng.gen::<bool>() { mag } else { -mag }).unwrap()
}

/// Games on a two-hour clock starting at `first_hour`, so start-time ties
/// occur; spreads from a small set so the index has history to find.
fn random_games(rng: &mut StreamRng, n: usize, first_hour: i64, tag: &str) -> Vec<GameRecord> {
    let spreads = [0.0, -1.0, -2.5, -3.0, -3.5, -6.5, -7.0];
    (0..n)
        .map(|i| {
            let start = t0() + Duration::hours(first_hour + 2 * rng.gen_range(0..n.max(1) as i64));
            let base = spreads[rng.gen_range(0..spreads.len())];
            let quotes = (0..rng.gen_range(1..=3))
                .map(|c| CasinoQuote {
                    casino_id: format!("book{c}"),
                    favorite_spread: if rng.gen::<f64>() < 0.25 { base - 0.5 } else { base },
                    favorite_ml: (rng.gen::<f64>() < 0.95).then(|| random_odds(rng)),
                    underdog_ml: (rng.gen::<f64>() < 0.95).then(|| random_odds(rng)),
                    updated_at: start - Duration::minutes(rng.gen_range(1..900)),
                })
                .collect();
            let fav = rng.gen_range(0..45u32);
            let dog = if rng.gen::<f64>() < 0.03 { fav } else { rng.gen_range(0..45u32) };
            GameRecord {
                game_id: format!("{tag}-{i:05}"),
                league: League::new("NCAAF").unwrap(),
                start_time: start,
                favorite_name: "Home".into(),
                underdog_name: "Away".into(),
                favorite_points: fav,
                underdog_points: dog,
                quotes,
            }
        })
        .collect()
}

// ---------------------------------------------------------------- criteria

fn spread_baseline_limit() -> Outcome {
    let data = synth_market(&SynthSpec::new(5000), 2024).map_err(|e| e.to_string())?;
    let pushes = data
        .games
        .iter()
        .filter(|g| {
            let q = &g.quotes[0];
            f64::from(g.favorite_points) + q.favorite_spread == f64::from(g.underdog_points)
        })
        .count();
    let config = BaselineConfig::spread(10_000, 99);
    let start = Instant::now();
    let report = with_workers(Some(1), || run_baseline(&data, &config)).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let limit = 100.0 * (0.5 * 100.0 / 110.0 - 0.5);
    ensure(
        pushes == 0 && (report.mean_roi - limit).abs() <= 0.5 && secs < 30.0,
        format!(
            "mean {:.4}% vs {limit:.4}% +- 0.5, {pushes} pushes, {secs:.2}s single-threaded",
            report.mean_roi
        ),
    )
}

fn odds_round_trip() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for a in (-10_000..=-100).chain(100..=10_000) {
        let odds = MoneylineOdds::new(a).map_err(|e| e.to_string())?;
        let got = payout_from_odds(odds).break_even();
        let want = if a < 0 {
            let y = f64::from(-a);
            y / (y + 100.0)
        } else {
            100.0 / (f64::from(a) + 100.0)
        };
        worst = worst.max((got - want).abs());
        checked += 1;
    }
    ensure(worst <= 1e-12, format!("{checked} odds, max error {worst:.2e}"))
}

fn leakage_suite() -> Outcome {
    let mut comparisons = 0usize;
    for case in 0..200u64 {
        let mut rng = stream_rng(0xacce97, case);
        let n_past = rng.gen_range(10..80);
        let past = random_games(&mut rng, n_past, 0, "past");
        let last = past.iter().map(|g| g.start_time).max().unwrap();
        let offset = (last - t0()).num_hours() + rng.gen_range(0..3);
        let n_future = rng.gen_range(1..60);
        let future = random_games(&mut rng, n_future, offset, "future");

        let league = League::new("NCAAF").unwrap();
        let base = Dataset::new(league.clone(), past.clone()).unwrap();
        let mut all = past;
        all.extend(future);
        let full = Dataset::new(league, all).unwrap();
        let idx_base = SpreadIndex::build(&base.games);
        let idx_full = SpreadIndex::build(&full.games);
        // future games start no earlier than the last past game
        for g in &base.games {
            for q in &g.quotes {
                for side in [Side::Favorite, Side::Underdog] {
                    let s = q.spread_for(side);
                    if idx_base.win_rate(s, g.start_time) != idx_full.win_rate(s, g.start_time) {
                        return Err(format!("case {case}: win_rate changed for {}", g.game_id));
                    }
                    comparisons += 1;
                }
            }
        }
        let eps = rng.gen_range(0..=50) as f64 / 100.0;
        let tau = rng.gen_range(0..=80) as f64 / 1000.0;
        for model in [ProbabilityModel::Simple, ProbabilityModel::Weighted] {
            let pb = price_games(&base.games, &idx_base, model);
            let pf = price_games(&base.games, &idx_full, model);
            for (a, b) in pb.iter().zip(&pf) {
                if a.decide(eps, tau) != b.decide(eps, tau) {
                    return Err(format!("case {case}: decision changed for {}", a.game_id));
                }
                comparisons += 1;
            }
            let params = StrategyParams::new(eps, tau, model).unwrap();
            let alone = run_backtest(&base, params, &idx_base).unwrap().ledger;
            let extended: Vec<_> = run_backtest(&full, params, &idx_full)
                .unwrap()
                .ledger
                .into_iter()
                .filter(|e| e.game_id.starts_with("past"))
                .collect();
            if alone != extended {
                return Err(format!("case {case}: ledger changed under {model:?}"));
            }
            comparisons += alone.len();
        }
    }
    Ok(format!("200 fixtures, {comparisons} exact comparisons"))
}

/// Independent line-by-line transcription of the betting rule, returning
/// -1 (no bet), 0 (underdog) or 1 (favorite).
fn transcribed_rule(mu_f: f64, mu_u: f64, pi_f: f64, pi_u: f64, eps: f64, tau: f64) -> i8 {
    let mut bet = -1;
    if mu_f < 0.0 && mu_u < 0.0 {
        bet = -1;
    } else if pi_f >= 0.50 + eps {
        if pi_f >= pi_u {
            bet = 1;
        } else {
            bet = 0;
        }
    } else if mu_f >= mu_u {
        if mu_f > tau {
            bet = 1;
        }
    } else if mu_u > tau {
        bet = 0;
    }
    bet
}

fn decision_truth_table() -> Outcome {
    let code = |c| DecisionEncoding::Ternary.code(c).unwrap();
    let traced = [
        ((-0.1, -0.2, 0.7, 0.3, 0.1, 0.0), -1),
        ((-0.5, 0.4, 0.90, 0.10, 0.30, 0.0), 1),
        ((0.02, 0.05, 0.55, 0.45, 0.10, 0.03), 0),
        ((0.05, 0.02, 0.55, 0.45, 0.10, 0.05), -1),
    ];
    for ((mf, mu, pf, pu, e, t), want) in traced {
        let got = code(decide(mf, mu, pf, pu, e, t));
        if got != want {
            return Err(format!("traced example ({mf}, {mu}, {pf}, {pu}, {e}, {t}) gave {got}, want {want}"));
        }
    }
    // coarse lattices make ties and boundary equalities common
    let mut rng = stream_rng(0xdec1de, 0);
    let mut disagreements = 0;
    for _ in 0..10_000 {
        let pf = rng.gen_range(0..=20) as f64 / 20.0;
        let pu = if rng.gen::<bool>() { 1.0 - pf } else { rng.gen_range(0..=20) as f64 / 20.0 };
        let mf = rng.gen_range(-20..=20) as f64 / 40.0;
        let mu = rng.gen_range(-20..=20) as f64 / 40.0;
        let e = rng.gen_range(0..=10) as f64 / 20.0;
        let t = rng.gen_range(0..=10) as f64 / 40.0;
        if code(decide(mf, mu, pf, pu, e, t)) != transcribed_rule(mf, mu, pf, pu, e, t) {
            disagreements += 1;
        }
    }
    ensure(
        disagreements == 0,
        format!("4 traced examples, 10000 randomized cases, {disagreements} disagreements"),
    )
}

fn grid_dominance() -> Outcome {
    let mut cells = 0usize;
    for case in 0..30u64 {
        let mut rng = stream_rng(0x971d, case);
        let n = rng.gen_range(30..250);
        let games = random_games(&mut rng, n, 0, "g");
        let data = Dataset::new(League::new("NCAAF").unwrap(), games).unwrap();
        let index = SpreadIndex::build(&data.games);
        let model = if case % 2 == 0 { ProbabilityModel::Simple } else { ProbabilityModel::Weighted };
        let priced = price_games(&data.games, &index, model);
        let grid = Grid::by_counts(0.5, 11, 0.4, 21).map_err(|e| e.to_string())?;
        let result = grid_search_priced(&priced, &grid);
        let league = data.league.clone();
        let mut best = f64::NEG_INFINITY;
        for &e in &grid.epsilon_values {
            for &t in &grid.ev_values {
                let p = StrategyParams::new(e, t, model).unwrap();
                best = best.max(backtest_priced(&league, &priced, p).report.total_return);
                cells += 1;
            }
        }
        let origin = backtest_priced(&league, &priced, StrategyParams::new(0.0, 0.0, model).unwrap())
            .report
            .total_return;
        let reported = result.optimum.total_return;
        if reported != best || reported < origin {
            return Err(format!("case {case}: optimum {reported}, exhaustive max {best}, origin {origin}"));
        }
    }
    Ok(format!("30 fixtures, {cells} cells re-run by brute force, optimum exact"))
}

fn reduced_grid(priced: &[PricedGame]) -> Grid {
    Grid::reduced_for(priced, 51).expect("reduced grid")
}

fn planted_edge_recovery() -> Outcome {
    let start = Instant::now();
    let mut rois = Vec::new();
    let mut lower_bounds = Vec::new();
    for seed in 0..20u64 {
        let data = synth_market(&SynthSpec::planted_edge(10_000), 500 + seed).map_err(|e| e.to_string())?;
        let index = SpreadIndex::build(&data.games);
        let priced = price_games(&data.games, &index, ProbabilityModel::Simple);
        let grid = reduced_grid(&priced);
        rois.push(grid_search_priced(&priced, &grid).optimum.roi_pct);
        let samples = bootstrap_priced(&priced, &grid, &BootstrapConfig::new(1000, seed)).map_err(|e| e.to_string())?;
        let roi: Vec<f64> = samples.iter().map(|s| s.optimum.roi_pct).collect();
        lower_bounds.push(percentile_interval(&roi, 0.99, Sided::OneLower).map_err(|e| e.to_string())?.low);
    }
    let secs = start.elapsed().as_secs_f64();
    let mean = rois.iter().sum::<f64>() / rois.len() as f64;
    let min_lower = lower_bounds.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(
        mean > 0.0 && min_lower > 0.0 && secs < 300.0,
        format!(
            "20 seeds x 10000 games, mean optimized ROI {mean:.2}%, smallest one-sided 99% lower bound {min_lower:.2}% (1000 iterations, 51x51 grid), {secs:.1}s"
        ),
    )
}

/// Type-7 quantile straight from the definition.
fn order_statistic_quantile(samples: &[f64], p: f64) -> f64 {
    let mut x = samples.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = p * (x.len() - 1) as f64;
    let j = pos as usize;
    if j + 1 >= x.len() {
        return x[x.len() - 1];
    }
    let g = pos - j as f64;
    (1.0 - g) * x[j] + g * x[j + 1]
}

fn interval_properties() -> Outcome {
    let mut worst: f64 = 0.0;
    for case in 0..50u64 {
        let mut rng = stream_rng(0x1e7e, case);
        let n = rng.gen_range(5..2000);
        let shape = case % 3;
        let xs: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                match shape {
                    0 => u * 10.0 - 5.0,
                    1 => -(1.0 - u).ln() * 3.0,
                    _ => (u - 0.5).powi(3) * 40.0 + if rng.gen::<f64>() < 0.2 { 6.0 } else { 0.0 },
                }
            })
            .collect();
        let p = percentile_interval(&xs, 0.95, Sided::Two).map_err(|e| e.to_string())?;
        let h = hdi_interval(&xs, 0.95).map_err(|e| e.to_string())?;
        let scale = p.width().abs().max(1.0);
        if h.width() > p.width() + 1e-12 * scale {
            return Err(format!("case {case}: hdi width {} > percentile width {}", h.width(), p.width()));
        }
        let lo = order_statistic_quantile(&xs, 0.025);
        let hi = order_statistic_quantile(&xs, 0.975);
        worst = worst.max((p.low - lo).abs()).max((p.high - hi).abs());
        let one = percentile_interval(&xs, 0.99, Sided::OneLower).map_err(|e| e.to_string())?;
        worst = worst.max((one.low - order_statistic_quantile(&xs, 0.01)).abs());
    }
    let constant = vec![3.25; 40];
    let zero = [
        percentile_interval(&constant, 0.95, Sided::Two).unwrap().width(),
        percentile_interval(&constant, 0.99, Sided::OneLower).unwrap().width(),
        hdi_interval(&constant, 0.95).unwrap().width(),
    ];
    ensure(
        worst <= 1e-12 && zero.iter().all(|w| *w == 0.0),
        format!("50 sets, hdi never wider, oracle max error {worst:.2e}, constant widths {zero:?}"),
    )
}

fn ash_normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for case in 0..30u64 {
        let mut rng = stream_rng(0xa54, case);
        let n = rng.gen_range(20..3000);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 7.0 - 2.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x + rng.gen::<f64>() * 3.0).collect();
        let bins = (rng.gen_range(1..20), rng.gen_range(1..20));
        let m = (rng.gen_range(1..9), rng.gen_range(1..9));
        let g = ash2d(&xs, &ys, bins, m).map_err(|e| e.to_string())?;
        let mass: f64 = g.density.iter().sum::<f64>() * g.delta_x() * g.delta_y();
        worst = worst.max((mass - 1.0).abs());

        // plain histogram on the same coarse bins
        let plain = ash2d(&xs, &ys, bins, (1, 1)).map_err(|e| e.to_string())?;
        let (x_lo, x_hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| (a.0.min(v), a.1.max(v)));
        let (y_lo, y_hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| (a.0.min(v), a.1.max(v)));
        let hx = (x_hi - x_lo) / bins.0 as f64;
        let hy = (y_hi - y_lo) / bins.1 as f64;
        let mut counts = vec![vec![0u64; bins.1]; bins.0];
        for (&x, &y) in xs.iter().zip(&ys) {
            let i = (((x - x_lo) / hx).floor() as usize).min(bins.0 - 1);
            let j = (((y - y_lo) / hy).floor() as usize).min(bins.1 - 1);
            counts[i][j] += 1;
        }
        if (plain.nx, plain.ny) != bins {
            return Err(format!("case {case}: m=(1,1) grid is {}x{}", plain.nx, plain.ny));
        }
        for (i, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                let want = c as f64 / (n as f64 * hx * hy);
                if plain.at(i, j) != want {
                    return Err(format!("case {case}: cell ({i},{j}) {} vs histogram {want}", plain.at(i, j)));
                }
            }
        }
    }
    ensure(
        worst <= 1e-9,
        format!("30 sets, max |mass - 1| {worst:.2e}, m=(1,1) equals the histogram in every cell"),
    )
}

// ---------------------------------------------------------------- CLI

struct Cli {
    bin: PathBuf,
    root: tempfile::TempDir,
}

impl Cli {
    fn new() -> Cli {
        Cli {
            bin: PathBuf::from(env!("CARGO_BIN_EXE_edgeline")),
            root: tempfile::tempdir().expect("tempdir"),
        }
    }

    fn dir(&self, name: &str) -> PathBuf {
        self.root.path().join(name)
    }

    fn run(&self, out: &str, workers: usize, args: &[&str]) -> Result<String, String> {
        let o = Command::new(&self.bin)
            .arg("--out")
            .arg(self.dir(out))
            .arg("--workers")
            .arg(workers.to_string())
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)));
        }
        Ok(String::from_utf8_lossy(&o.stdout).into_owned())
    }
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

/// Runs every command once and returns (output dir name, args).
fn cli_runs(cli: &Cli) -> Result<Vec<(&'static str, Vec<String>)>, String> {
    cli.run("synth", 1, &["synth", "--games", "1500", "--seed", "11", "--planted"])?;
    let data = cli.dir("synth").join("synth_NFL.csv");
    let data = data.to_string_lossy().into_owned();
    let bench = cli.dir("bench.csv");
    std::fs::write(&bench, "year,return_pct\n2012,13.4\n2013,29.6\n").map_err(|e| e.to_string())?;
    let bench = bench.to_string_lossy().into_owned();
    let runs: Vec<(&'static str, Vec<String>)> = vec![
        ("synth", vec!["synth", "--games", "1500", "--seed", "11", "--planted"]),
        ("validate", vec!["validate", "--data", &data]),
        (
            "backtest",
            vec!["backtest", "--data", &data, "--model", "weighted", "--epsilon", "0.2", "--ev-threshold", "0.01", "--benchmark", &bench, "--index-dump"],
        ),
        ("optimize", vec!["optimize", "--data", &data, "--model", "simple", "--grid", "reduced", "--grid-size", "21", "--benchmark", &bench]),
        (
            "bootstrap",
            vec!["bootstrap", "--data", &data, "--model", "simple", "--grid", "reduced", "--grid-size", "11", "--iterations", "60", "--seed", "5"],
        ),
        ("baseline", vec!["baseline", "--data", &data, "--kind", "moneyline", "--theta", "0.67", "--replications", "200", "--seed", "8"]),
        ("baseline_spread", vec!["baseline", "--data", &data, "--kind", "spread", "--replications", "200", "--seed", "9"]),
    ]
    .into_iter()
    .map(|(n, a)| (n, a.into_iter().map(String::from).collect()))
    .collect();
    for (name, args) in &runs[1..] {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        cli.run(name, 1, &a)?;
    }
    let samples = cli.dir("bootstrap").join("bootstrap_samples_NFL.csv");
    let density = vec![
        "density".to_string(),
        "--input".into(),
        samples.to_string_lossy().into_owned(),
        "--x".into(),
        "opt_roi".into(),
        "--y".into(),
        "opt_epsilon".into(),
        "--ash".into(),
        "--svg".into(),
    ];
    let a: Vec<&str> = density.iter().map(String::as_str).collect();
    cli.run("density", 1, &a)?;
    let mut runs = runs;
    runs.push(("density", density));
    Ok(runs)
}

fn determinism_and_replay(cli: &Cli, runs: &[(&'static str, Vec<String>)]) -> Outcome {
    let mut compared = 0;
    for (name, args) in runs {
        let first = read_dir_sorted(&cli.dir(name));
        // plain re-run at a different worker count
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let rerun = format!("{name}_w4");
        cli.run(&rerun, 4, &a)?;
        if read_dir_sorted(&cli.dir(&rerun)) != first {
            return Err(format!("{name}: outputs differ between --workers 1 and 4"));
        }
        for workers in [2, 3] {
            let out = format!("{name}_replay{workers}");
            let manifest = cli.dir(name).join("manifest.json");
            let stdout = cli.run(&out, workers, &["replay", "--manifest", &manifest.to_string_lossy()])?;
            let verdict: Value = serde_json::from_str(&stdout).map_err(|e| e.to_string())?;
            if verdict["identical"] != Value::Bool(true) {
                return Err(format!("{name}: replay at --workers {workers} reported {verdict}"));
            }
            if read_dir_sorted(&cli.dir(&out)) != first {
                return Err(format!("{name}: replayed files differ at --workers {workers}"));
            }
        }
        compared += first.len();
    }
    Ok(format!("{} commands, {compared} primary outputs byte-identical across re-runs and replays at --workers 1-4", runs.len()))
}

fn schema_conformance(cli: &Cli) -> Outcome {
    let schema_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas");
    let load = |p: &Path| -> Result<Value, String> {
        let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))
    };
    let checks = [
        ("backtest_report", "backtest/backtest_report.json"),
        ("optimize_report", "optimize/optimize_report.json"),
        ("intervals", "bootstrap/intervals.json"),
        ("bonferroni", "bootstrap/bonferroni.json"),
        ("baseline_report", "baseline/baseline_report.json"),
        ("baseline_report", "baseline_spread/baseline_report.json"),
        ("manifest", "backtest/manifest.json"),
        ("manifest", "optimize/manifest.json"),
        ("manifest", "bootstrap/manifest.json"),
        ("manifest", "baseline/manifest.json"),
        ("manifest", "density/manifest.json"),
        ("manifest", "synth/manifest.json"),
    ];
    for (schema, file) in checks {
        let schema_value = load(&schema_dir.join(format!("{schema}.schema.json")))?;
        let compiled = jsonschema::JSONSchema::compile(&schema_value).map_err(|e| format!("{schema}: {e}"))?;
        let instance = load(&cli.root.path().join(file))?;
        let msgs: Vec<String> = match compiled.validate(&instance) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
        };
        if !msgs.is_empty() {
            return Err(format!("{file} violates {schema}: {}", msgs.join("; ")));
        }
    }

    // every table row kind is present
    let intervals = load(&cli.root.path().join("bootstrap/intervals.json"))?;
    let rows = intervals["rows"].as_array().cloned().unwrap_or_default();
    for (method, sided, level) in [("Percentile", "two", 0.95), ("HighDensity", "two", 0.95), ("Percentile", "one_lower", 0.99)] {
        for variable in ["ROI", "EVThreshold", "Epsilon"] {
            let found = rows.iter().any(|r| {
                r["method"] == method && r["sided"] == sided && r["variable"] == variable && r["level"].as_f64() == Some(level)
            });
            if !found {
                return Err(format!("intervals.json lacks a {method} {sided} {level} row for {variable}"));
            }
        }
    }
    let backtest = load(&cli.root.path().join("backtest/backtest_report.json"))?;
    let has_benchmark = backtest["yearly"]
        .as_array()
        .map(|ys| ys.iter().any(|y| y["benchmark_pct"].is_number()))
        .unwrap_or(false);
    ensure(
        has_benchmark,
        format!("{} reports validated against schemas; all interval row kinds present", checks.len()),
    )
}

// ---------------------------------------------------------------- runner

fn main() {
    let cli = Cli::new();
    let mut criteria: Vec<Criterion> = vec![
        ("1 spread-baseline analytic limit", Box::new(spread_baseline_limit)),
        ("2 odds round-trip", Box::new(odds_round_trip)),
        ("3 leakage suite", Box::new(leakage_suite)),
        ("4 decision truth table", Box::new(decision_truth_table)),
        ("5 grid-search dominance", Box::new(grid_dominance)),
        ("6 planted-edge recovery", Box::new(planted_edge_recovery)),
        ("7 interval properties", Box::new(interval_properties)),
        ("8 ASH normalization", Box::new(ash_normalization)),
    ];
    let mut failed = 0;
    let mut report = |name: &str, outcome: Outcome, took: Elapsed| {
        match &outcome {
            Ok(detail) => println!("[PASS] {name}: {detail} ({:.1}s)", took.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail} ({:.1}s)", took.as_secs_f64())
            }
        }
    };
    let guarded = |f: &mut dyn FnMut() -> Outcome| -> Outcome {
        match catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => o,
            Err(p) => Err(format!(
                "panicked: {}",
                p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
            )),
        }
    };
    for (name, f) in criteria.iter_mut() {
        let start = Instant::now();
        let outcome = guarded(f.as_mut());
        report(name, outcome, start.elapsed());
    }

    let start = Instant::now();
    let runs = cli_runs(&cli);
    let outcome = match &runs {
        Ok(r) => guarded(&mut || determinism_and_replay(&cli, r)),
        Err(e) => Err(e.clone()),
    };
    report("9 determinism and replay", outcome, start.elapsed());
    let start = Instant::now();
    let outcome = match &runs {
        Ok(_) => guarded(&mut || schema_conformance(&cli)),
        Err(e) => Err(e.clone()),
    };
    report("10 report-shape conformance", outcome, start.elapsed());

    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
