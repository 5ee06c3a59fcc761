//! Command-line definitions and their canonical argument form.
//!
//! Every command can render its fully resolved arguments back to an argv
//! (`to_argv`). Manifests store that argv so a run can be replayed exactly;
//! the output directory and worker count are left out because they do not
//! change what gets written.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use edgeline::valuation::DecisionEncoding;
use edgeline::ProbabilityModel;

#[derive(Debug, Parser)]
#[command(name = "edgeline", version, about = "Leakage-free backtests of moneyline betting strategies")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Directory for reports, tables and the run manifest.
    #[arg(long, global = true, env = "EDGELINE_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for grid, bootstrap and baseline work (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Table emission on stdout: JSON, or aligned plain text (also saved as report.txt).
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// How bet decisions are written in ledgers: label, ternary or signed.
    #[arg(long, global = true, default_value = "label")]
    pub decision_encoding: DecisionEncoding,
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

impl OutputFormat {
    fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Text => "text",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate datasets; report per-league counts.
    Validate(ValidateArgs),
    /// Run the betting rule at fixed parameters.
    Backtest(BacktestArgs),
    /// Grid-search epsilon and the EV threshold for maximum total return.
    Optimize(OptimizeArgs),
    /// Bootstrap the optimum and report percentile, HDI and joint-test results.
    Bootstrap(BootstrapArgs),
    /// Random-betting baselines with percentile intervals.
    Baseline(BaselineArgs),
    /// Histogram and ASH density grids from a bootstrap sample file.
    Density(DensityArgs),
    /// Generate a synthetic market with a planted edge.
    Synth(SynthArgs),
    /// Re-run a command from its manifest and compare output digests.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Backtest(_) => "backtest",
            Command::Optimize(_) => "optimize",
            Command::Bootstrap(_) => "bootstrap",
            Command::Baseline(_) => "baseline",
            Command::Density(_) => "density",
            Command::Synth(_) => "synth",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset file (CSV or JSON); repeat to combine files.
    #[arg(long = "data", required = true)]
    pub data: Vec<PathBuf>,
    /// Force the input format instead of guessing from the extension.
    #[arg(long, value_parser = ["csv", "json"])]
    pub input_format: Option<String>,
    /// Restrict to these leagues; repeatable.
    #[arg(long = "league")]
    pub leagues: Vec<String>,
    /// Build one spread history from all loaded leagues instead of one per league.
    #[arg(long)]
    pub pooled_index: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub model: ProbabilityModel,
    /// Probability band half-width, in [0, 0.5].
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Minimum expected value a bet must exceed.
    #[arg(long, allow_negative_numbers = true)]
    pub ev_threshold: f64,
    /// Yearly benchmark returns, CSV with `year,return_pct`.
    #[arg(long)]
    pub benchmark: Option<PathBuf>,
    /// Also write the spread index as JSON.
    #[arg(long)]
    pub index_dump: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridKind {
    /// Epsilon by 0.01 and threshold by 0.001 up to the largest priced EV.
    Full,
    /// `--grid-size` points per axis over the same ranges.
    Reduced,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, value_enum, default_value_t = GridKind::Full)]
    pub grid: GridKind,
    #[arg(long, default_value_t = 51)]
    pub grid_size: usize,
    /// Upper end of the threshold axis instead of the data-driven one.
    #[arg(long)]
    pub ev_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub model: ProbabilityModel,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub benchmark: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub model: ProbabilityModel,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    /// Generated and recorded in the manifest when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Level of the two-sided intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Level of the one-sided lower intervals.
    #[arg(long, default_value_t = 0.99)]
    pub one_sided_level: f64,
    /// Family-wise error rate for the joint test.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineKindArg {
    Spread,
    Moneyline,
}

#[derive(Debug, Clone, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub kind: BaselineKindArg,
    /// Probability of picking the favorite (moneyline only).
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub replications: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    /// Bootstrap sample CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Column for the histogram and the ASH x axis.
    #[arg(long)]
    pub x: String,
    /// Second column: its histogram, and the ASH y axis.
    #[arg(long)]
    pub y: Option<String>,
    /// Bivariate averaged shifted histogram of x and y.
    #[arg(long)]
    pub ash: bool,
    /// ASH bins as `NX,NY` (default: per-axis Scott's rule).
    #[arg(long)]
    pub bins: Option<String>,
    /// ASH shifts as `MX,MY`.
    #[arg(long, default_value = "5,5")]
    pub shifts: String,
    /// Histogram bin width instead of Scott's rule.
    #[arg(long)]
    pub width: Option<f64>,
    /// Also emit SVG renderings.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 5000)]
    pub games: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "NFL")]
    pub league: String,
    /// Coin-flip games only (soft line pays decimal 2.2 at the default margin).
    #[arg(long)]
    pub planted: bool,
    /// JSON market spec; flags below override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub soft_fraction: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub vig: Option<f64>,
    #[arg(long)]
    pub sharp_casinos: Option<usize>,
    /// Format of the generated dataset.
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    pub output_format: String,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Absolute form of an input path, so a manifest replays from any cwd.
pub fn absolute(path: &Path) -> PathBuf {
    std::fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf())
}

struct Argv(Vec<String>);

impl Argv {
    fn flag(&mut self, name: &str, value: impl ToString) {
        self.0.push(format!("--{name}"));
        self.0.push(value.to_string());
    }

    fn opt(&mut self, name: &str, value: Option<impl ToString>) {
        if let Some(v) = value {
            self.flag(name, v);
        }
    }

    fn switch(&mut self, name: &str, on: bool) {
        if on {
            self.0.push(format!("--{name}"));
        }
    }

    fn path(&mut self, name: &str, p: &Path) {
        self.flag(name, absolute(p).display());
    }

    fn data(&mut self, d: &DataArgs) {
        for p in &d.data {
            self.path("data", p);
        }
        self.opt("input-format", d.input_format.as_ref());
        for l in &d.leagues {
            self.flag("league", l);
        }
        self.switch("pooled-index", d.pooled_index);
    }

    fn grid(&mut self, g: &GridArgs) {
        self.flag(
            "grid",
            match g.grid {
                GridKind::Full => "full",
                GridKind::Reduced => "reduced",
            },
        );
        self.flag("grid-size", g.grid_size);
        self.opt("ev-max", g.ev_max);
    }
}

impl Cli {
    /// Canonical argv with every default spelled out; seeds must already be
    /// resolved.
    pub fn to_argv(&self) -> Vec<String> {
        let mut a = Argv(vec!["edgeline".into()]);
        a.flag("format", self.global.format.as_str());
        a.flag("decision-encoding", encoding_name(self.global.decision_encoding));
        a.0.push(self.command.name().into());
        match &self.command {
            Command::Validate(c) => a.data(&c.data),
            Command::Backtest(c) => {
                a.data(&c.data);
                a.flag("model", c.model);
                a.flag("epsilon", c.epsilon);
                a.flag("ev-threshold", c.ev_threshold);
                if let Some(b) = &c.benchmark {
                    a.path("benchmark", b);
                }
                a.switch("index-dump", c.index_dump);
            }
            Command::Optimize(c) => {
                a.data(&c.data);
                a.flag("model", c.model);
                a.grid(&c.grid);
                if let Some(b) = &c.benchmark {
                    a.path("benchmark", b);
                }
            }
            Command::Bootstrap(c) => {
                a.data(&c.data);
                a.flag("model", c.model);
                a.grid(&c.grid);
                a.flag("iterations", c.iterations);
                a.opt("seed", c.seed);
                a.flag("level", c.level);
                a.flag("one-sided-level", c.one_sided_level);
                a.flag("alpha", c.alpha);
            }
            Command::Baseline(c) => {
                a.data(&c.data);
                a.flag(
                    "kind",
                    match c.kind {
                        BaselineKindArg::Spread => "spread",
                        BaselineKindArg::Moneyline => "moneyline",
                    },
                );
                a.flag("theta", c.theta);
                a.flag("replications", c.replications);
                a.opt("seed", c.seed);
            }
            Command::Density(c) => {
                a.path("input", &c.input);
                a.flag("x", &c.x);
                a.opt("y", c.y.as_ref());
                a.switch("ash", c.ash);
                a.opt("bins", c.bins.as_ref());
                a.flag("shifts", &c.shifts);
                a.opt("width", c.width);
                a.switch("svg", c.svg);
            }
            Command::Synth(c) => {
                a.flag("games", c.games);
                a.opt("seed", c.seed);
                a.flag("league", &c.league);
                a.switch("planted", c.planted);
                if let Some(s) = &c.spec {
                    a.path("spec", s);
                }
                a.opt("soft-fraction", c.soft_fraction);
                a.opt("margin", c.margin);
                a.opt("vig", c.vig);
                a.opt("sharp-casinos", c.sharp_casinos);
                a.flag("output-format", &c.output_format);
            }
            Command::Replay(c) => a.path("manifest", &c.manifest),
        }
        a.0
    }

    /// Seed slot of a randomized command.
    pub fn seed_mut(&mut self) -> Option<&mut Option<u64>> {
        match &mut self.command {
            Command::Bootstrap(c) => Some(&mut c.seed),
            Command::Baseline(c) => Some(&mut c.seed),
            Command::Synth(c) => Some(&mut c.seed),
            _ => None,
        }
    }
}

fn encoding_name(e: DecisionEncoding) -> &'static str {
    match e {
        DecisionEncoding::Label => "label",
        DecisionEncoding::Ternary => "ternary",
        DecisionEncoding::Signed => "signed",
    }
}
