// SPDX-License-Identifier: Apache-2.0

//! `explorebias`: serve sessions over HTTP, replay logs, simulate sessions.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use explorebias_core::eval::{
    crime_like_dataset, generate_batch, replay_and_score, EvalReport, ReplayConfig, SyntheticStrategy,
};
use explorebias_core::{
    filter_hovers, load_dataset, read_log, DatasetBundle, HoverFilter, LoadError, PriorPolicy, ScoringRule,
    SessionConfig, SessionLog,
};
use explorebias_service::AppState;

/// sysexits.h
const EX_DATAERR: u8 = 65;
const EX_SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(name = "explorebias", version, about = "Infer exploration bias from interaction logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Persist datasets, sessions and events here; replayed on start.
        #[arg(long)]
        spool_dir: Option<PathBuf>,
    },
    /// Replay logged sessions and write an evaluation report.
    Replay(ReplayArgs),
    /// Generate synthetic sessions with a known strategy and score them.
    Simulate(SimulateArgs),
    /// Write a crime-like synthetic dataset (locations plus eight categories).
    MakeDataset {
        #[arg(long, default_value_t = 1951)]
        points: usize,
        #[arg(long, default_value_t = 1951)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value = "uniform")]
    prior: PriorPolicy,
    #[arg(long, default_value = "retrospective")]
    scoring: ScoringRule,
    /// Comma-separated k values for hit rates.
    #[arg(long, value_delimiter = ',', default_value = "1,5,10,20")]
    k_grid: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    warmup: usize,
    /// Skip the KS / chi-square baseline.
    #[arg(long)]
    no_baseline: bool,
}

impl ModelArgs {
    fn replay_config(&self, truth: Option<Vec<String>>) -> ReplayConfig {
        ReplayConfig {
            session: SessionConfig { prior: self.prior, scoring: self.scoring, ..SessionConfig::default() },
            k_grid: self.k_grid.clone(),
            warmup: self.warmup,
            truth,
            baseline: !self.no_baseline,
        }
    }
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// NDJSON log files; a directory means every `*.ndjson` inside it.
    #[arg(long = "log", required = true, num_args = 1..)]
    logs: Vec<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1000.0)]
    min_dwell_ms: f64,
    /// Sessions with fewer events after hover filtering are dropped.
    #[arg(long, default_value_t = 4)]
    min_events: usize,
    /// Report path; `.tsv` writes the long table, anything else JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// e.g. `groups=location;focus:location=random,r0.1`
    #[arg(long)]
    strategy: String,
    #[arg(long)]
    clicks: Option<usize>,
    #[arg(long, default_value_t = 100)]
    sessions: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 15)]
    map_by: usize,
    #[arg(long, default_value_t = 12)]
    bias_at: usize,
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
    /// Directory for the generated logs and `report.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failures are classed by exit code: bad input files vs everything else.
enum Failure {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Input(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve { port, host, spool_dir } => serve(&host, port, spool_dir),
        Command::Replay(args) => replay(&args),
        Command::Simulate(args) => simulate(&args),
        Command::MakeDataset { points, seed, out } => make_dataset(points, seed, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EX_DATAERR)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EX_SOFTWARE)
        }
    }
}

fn serve(host: &str, port: u16, spool_dir: Option<PathBuf>) -> Result<(), Failure> {
    let state = match spool_dir {
        Some(dir) => AppState::with_spool(&dir).map_err(|e| Failure::Input(anyhow::anyhow!("{e}")))?,
        None => AppState::new(),
    };
    let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
    rt.block_on(async {
        let listener =
            tokio::net::TcpListener::bind((host, port)).await.with_context(|| format!("binding {host}:{port}"))?;
        let addr = listener.local_addr().context("reading bound address")?;
        println!("listening on http://{addr}");
        explorebias_service::serve(listener, Arc::new(state)).await.context("serving")
    })?;
    Ok(())
}

fn expand_logs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|source| LoadError::Io { path: p.clone(), source })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "ndjson"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(Failure::Input(anyhow::anyhow!("no log files found")));
    }
    Ok(out)
}

fn write_report(report: &EvalReport, out: &Path) -> anyhow::Result<()> {
    let text = if out.extension().is_some_and(|x| x == "tsv") { report.to_tsv() } else { report.to_json() };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(out, text).with_context(|| format!("writing {}", out.display()))
}

fn replay(args: &ReplayArgs) -> Result<(), Failure> {
    let dataset = Arc::new(load_dataset(&args.dataset)?);
    let filter = HoverFilter { min_dwell_ms: args.min_dwell_ms, min_events: args.min_events };
    let mut kept: Vec<SessionLog> = Vec::new();
    let (mut read, mut dropped_sessions, mut dropped_events) = (0usize, 0usize, 0usize);
    for path in expand_logs(&args.logs)? {
        let log = read_log(&path)?;
        read += 1;
        match filter_hovers(&log, &filter) {
            Some(f) => {
                dropped_events += log.len() - f.len();
                kept.push(f);
            }
            None => {
                dropped_sessions += 1;
                dropped_events += log.len();
            }
        }
    }
    println!(
        "sessions read: {read}, kept: {}, dropped: {dropped_sessions}, events dropped: {dropped_events}",
        kept.len()
    );
    let report = replay_and_score(&dataset, &kept, &args.model.replay_config(None))
        .map_err(|e| Failure::Input(anyhow::anyhow!("{e}")))?;
    print_aggregate(&report);
    write_report(&report, &args.out)?;
    println!("report: {}", args.out.display());
    Ok(())
}

fn print_aggregate(report: &EvalReport) {
    let Some(last) = report.aggregate.bias.last() else { return };
    for (g, m) in report.groups.iter().zip(last) {
        println!("final bias {g}: {:.3} ± {:.3} (n={})", m.mean, m.std_err, m.n);
    }
    for (k, m) in report.k_grid.iter().zip(&report.aggregate.hit_rate_excluding_visited) {
        println!("hit rate @{k} (unvisited): {:.3} ± {:.3}", m.mean, m.std_err);
    }
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let dataset: Arc<DatasetBundle> = Arc::new(load_dataset(&args.dataset)?);
    let mut strategy: SyntheticStrategy =
        args.strategy.parse().map_err(|e| Failure::Input(anyhow::anyhow!("strategy: {e}")))?;
    if let Some(c) = args.clicks {
        strategy.click_count = c;
    }
    if let Some(s) = args.seed {
        strategy.seed = s;
    }
    if args.map_by == 0 || args.bias_at == 0 {
        return Err(Failure::Input(anyhow::anyhow!("--map-by and --bias-at are 1-based")));
    }
    let batch =
        generate_batch(&dataset, &strategy, args.sessions).map_err(|e| Failure::Input(anyhow::anyhow!("{e}")))?;
    let logs: Vec<SessionLog> = batch.iter().map(|s| s.log.clone()).collect();
    let truth = Some(strategy.biased_groups.clone());
    let report = replay_and_score(&dataset, &logs, &args.model.replay_config(truth)).context("scoring")?;
    println!("strategy: {strategy}");
    println!("sessions: {}, clicks each: {}", logs.len(), strategy.click_count);
    if let Some(r) = report.recovery(args.map_by, args.bias_at, args.threshold) {
        println!("MAP recovery by click {}: {:.2}", r.map_by, r.map_recovery_rate);
        println!("truth bias at click {}: {:.3} ± {:.3}", r.bias_at, r.mean_truth_bias.mean, r.mean_truth_bias.std_err);
        println!(
            "mean clicks to {}: {:.2} ± {:.2}",
            r.threshold, r.clicks_to_threshold.mean, r.clicks_to_threshold.std_err
        );
        if !args.model.no_baseline {
            println!(
                "baseline clicks to {}: {:.2} ± {:.2}",
                r.threshold, r.baseline_clicks_to_threshold.mean, r.baseline_clicks_to_threshold.std_err
            );
        }
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for s in &batch {
            let path = dir.join(format!("{}.ndjson", s.log.session_id));
            fs::write(&path, s.log.to_ndjson()).with_context(|| format!("writing {}", path.display()))?;
        }
        write_report(&report, &dir.join("report.json"))?;
        println!("wrote {} logs to {}", batch.len(), dir.display());
    }
    Ok(())
}

fn make_dataset(points: usize, seed: u64, out: &Path) -> Result<(), Failure> {
    if points < 2 {
        return Err(Failure::Input(anyhow::anyhow!("--points must be at least 2")));
    }
    let doc = crime_like_dataset(points, seed).to_document();
    let text = serde_json::to_string_pretty(&doc).context("serializing dataset")?;
    fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {points} points to {}", out.display());
    Ok(())
}
