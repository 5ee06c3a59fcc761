mod cli;
mod commands;
mod manifest;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{BuildHasher, Hasher};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Parser;
use serde_json::json;

use cli::{Cli, Command, OutputFormat};
use commands::{Ctx, Summary};
use manifest::{file_digest, Manifest, Outputs, MANIFEST_FILE};

/// Marks an error caused by bad input rather than a failure of the tool.
#[derive(Debug)]
struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input(e: impl fmt::Display) -> anyhow::Error {
    anyhow::Error::new(InputError(e.to_string()))
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.chain().any(|c| c.is::<InputError>()) {
        2
    } else {
        1
    }
}

fn init_logging(verbose: u8) {
    let default = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let filter = tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
}

fn fresh_seed() -> u64 {
    std::collections::hash_map::RandomState::new().build_hasher().finish()
}

fn dispatch(cli: &Cli, out: &mut Outputs) -> Result<Summary> {
    let mut ctx = Ctx { out, global: &cli.global };
    match &cli.command {
        Command::Validate(a) => commands::validate(&mut ctx, a),
        Command::Backtest(a) => commands::backtest(&mut ctx, a),
        Command::Optimize(a) => commands::optimize(&mut ctx, a),
        Command::Bootstrap(a) => commands::bootstrap(&mut ctx, a),
        Command::Baseline(a) => commands::baseline(&mut ctx, a),
        Command::Density(a) => commands::density(&mut ctx, a),
        Command::Synth(a) => commands::synth(&mut ctx, a),
        Command::Replay(_) => bail!(input("replay cannot be nested")),
    }
}

/// Runs a non-replay command and writes its manifest.
fn execute(cli: &Cli) -> Result<(Summary, Manifest)> {
    let mut out = Outputs::new(&cli.global.out)?;
    let summary = edgeline::rng::with_workers(cli.global.workers, || dispatch(cli, &mut out))?;
    if cli.global.format == OutputFormat::Text {
        out.write("report.txt", summary.text.as_bytes())?;
    }
    let manifest = out.finish(cli.command.name(), cli.to_argv())?;
    Ok((summary, manifest))
}

fn print(cli: &Cli, summary: &Summary) -> Result<()> {
    let body = match cli.global.format {
        OutputFormat::Json => serde_json::to_string_pretty(&summary.json)? + "\n",
        OutputFormat::Text => summary.text.clone(),
    };
    emit(&body)
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(body: &str) -> Result<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn replay(outer: &Cli, manifest_path: &std::path::Path) -> Result<()> {
    let recorded = Manifest::load(manifest_path)?;
    for inp in &recorded.inputs {
        let path = std::path::Path::new(&inp.path);
        let digest = file_digest(path).map_err(|e| input(format!("input {}: {e:#}", inp.path)))?;
        if digest != inp.sha256 {
            bail!(input(format!("input {} changed since the recorded run", inp.path)));
        }
    }
    let mut cli = Cli::try_parse_from(&recorded.argv).map_err(|e| input(format!("manifest argv: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!(input("manifest records a replay"));
    }
    cli.global.out = outer.global.out.clone();
    cli.global.workers = outer.global.workers;
    if crate::cli::absolute(&cli.global.out.join(MANIFEST_FILE)) == crate::cli::absolute(manifest_path) {
        bail!(input("replay needs a different --out than the recorded run"));
    }
    let (_, fresh) = execute(&cli)?;

    let before: BTreeMap<_, _> = recorded.outputs.iter().map(|d| (d.path.as_str(), d.sha256.as_str())).collect();
    let after: BTreeMap<_, _> = fresh.outputs.iter().map(|d| (d.path.as_str(), d.sha256.as_str())).collect();
    let mut mismatched: Vec<&str> = Vec::new();
    for name in before.keys().chain(after.keys()) {
        if before.get(name) != after.get(name) && !mismatched.contains(name) {
            mismatched.push(name);
        }
    }
    let result = json!({
        "subcommand": recorded.subcommand,
        "outputs_compared": before.len(),
        "identical": mismatched.is_empty(),
        "mismatched": mismatched,
    });
    emit(&(serde_json::to_string_pretty(&result)? + "\n"))?;
    if !mismatched.is_empty() {
        bail!("replay produced different outputs: {}", mismatched.join(", "));
    }
    Ok(())
}

fn run(mut cli: Cli) -> Result<()> {
    if let Command::Replay(r) = &cli.command {
        let path = r.manifest.clone();
        return replay(&cli, &path);
    }
    if let Some(seed) = cli.seed_mut() {
        if seed.is_none() {
            *seed = Some(fresh_seed());
        }
    }
    let (summary, _) = execute(&cli)?;
    print(&cli, &summary)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    init_logging(cli.global.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
