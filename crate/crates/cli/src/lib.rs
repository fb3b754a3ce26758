//! The `hba` command: run experiments, replay match records, serve matches.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hba_core::behavior::{ForagingDistance, TypeSpec};
use hba_core::eval::{preset, EvalError, ExperimentConfig, ExperimentResult, PRESETS};
use hba_core::record::{MatchRecord, RecordError};
use hba_play::{AppState, ServiceConfig};

/// Exit status of a configuration problem.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status of a failure while running.
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "hba", version, about = "Type-based ad hoc coordination: experiments, replays and the match service")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a foraging experiment from a preset name or a config file.
    Eval(EvalArgs),
    /// Print a match record round by round and check it replays.
    Replay(ReplayArgs),
    /// Run the match service.
    Serve(ServeArgs),
    /// List the built-in behaviour types and presets.
    ListTypes,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Preset name or path to a config file.
    pub experiment: Option<String>,
    /// Config file (alternative to the positional argument).
    #[arg(long, conflicts_with = "experiment")]
    pub config: Option<PathBuf>,
    /// Root seed, replacing the config's.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, replacing the config's (default `results`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Number of episodes, replacing the config's.
    #[arg(long)]
    pub episodes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Match record JSON file.
    pub record: PathBuf,
    /// Skip re-running the agent.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Service config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Root seed, replacing the config's.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Session logs and match records, replacing the config's.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Built browser client, replacing the config's.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Config(_) | EvalError::Parse { .. } => CliError::Config(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval(a) => eval(a),
        Command::Replay(a) => {
            let text = replay(&a.record, !a.no_verify)?;
            print!("{text}");
            Ok(())
        }
        Command::Serve(a) => serve(a),
        Command::ListTypes => {
            print!("{}", list_types());
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

/// Loads a config by preset name or path and applies the overrides.
pub fn load_experiment(args: &EvalArgs) -> Result<ExperimentConfig, CliError> {
    let (source, text) = match (&args.config, &args.experiment) {
        (Some(p), _) => (p.display().to_string(), read(p)?),
        (None, Some(name)) if Path::new(name).is_file() => (name.clone(), read(Path::new(name))?),
        (None, Some(name)) => match preset(name) {
            Some(j) => (format!("preset {name}"), j.to_string()),
            None => {
                let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
                return Err(CliError::Config(format!(
                    "{name:?} is neither a file nor a preset ({})",
                    names.join(", ")
                )));
            }
        },
        (None, None) => return Err(CliError::Config("give a preset name or --config".into())),
    };
    let mut cfg = ExperimentConfig::from_json(&text).map_err(|e| CliError::Config(format!("{source}: {e}")))?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(k) = args.episodes {
        cfg.episodes = k;
    }
    cfg.validate().map_err(|e| CliError::Config(format!("{source}: {e}")))?;
    Ok(cfg)
}

fn eval(args: EvalArgs) -> Result<(), CliError> {
    let cfg = load_experiment(&args)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    log::info!("running {} with {} episodes, seed {}", cfg.name, cfg.episodes, cfg.seed);
    let result = cfg.run(args.workers)?;
    let (csv, json) = result.write(&out)?;
    print!("{}", render_result(&result));
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

/// Table of estimates and comparisons.
pub fn render_result(r: &ExperimentResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} (seed {}, {} episodes)", r.name, r.seed, r.episodes);
    let _ = writeln!(
        s,
        "{:<12} {:>10} {:>10} {:>22} {:>10}",
        "agent", "F_hat", "E_hat", "E 95% CI", "mean_len"
    );
    for m in &r.summaries {
        let [lo, hi] = m.efficiency.ci95;
        let _ = writeln!(
            s,
            "{:<12} {:>10.4} {:>10.4} {:>22} {:>10.1}",
            m.agent,
            m.f_hat(),
            m.e_hat(),
            format!("[{lo:.4}, {hi:.4}]"),
            m.mean_length
        );
    }
    for c in &r.comparisons {
        let e = &c.report.efficiency;
        let _ = writeln!(
            s,
            "{} vs {}: efficiency diff {:+.4}, t = {:.3}, p = {:.4}",
            c.a, c.b, e.mean_diff, e.t_stat, e.p_value
        );
    }
    s
}

/// Byte offset of a 1-based line and column in `text`.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column).min(text.len())
}

/// Parses a match record, naming the byte offset of any error.
pub fn parse_record(text: &str) -> Result<MatchRecord, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!(
            "corrupt match record at byte {} (line {}, column {}): {e}",
            byte_offset(text, e.line(), e.column()),
            e.line(),
            e.column()
        ))
    })
}

/// Renders a record as a per-round table with the human's type-switch
/// statistic, optionally checking that the agent reproduces every action.
pub fn replay(path: &Path, verify: bool) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let rec = parse_record(&text)?;
    rec.validate().map_err(|e| CliError::Config(format!("invalid match record: {e}")))?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:?} vs {} (seed {}, {}/{} rounds)",
        rec.game,
        rec.opponent.id(),
        rec.seed,
        rec.rounds.len(),
        rec.rounds_total
    );
    let _ = writeln!(
        s,
        "{:>5} {:>6} {:>6} {:>8} {:>8} {:>8} {:>8}  belief",
        "round", "human", "agent", "pay_h", "pay_a", "cum_h", "cum_a"
    );
    for r in &rec.rounds {
        let belief = r
            .posterior
            .iter()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, p)| format!("{k} ({p:.3})"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:>5} {:>6} {:>6} {:>8} {:>8} {:>8} {:>8}  {}",
            r.round + 1,
            r.human_action,
            r.agent_action,
            r.payoffs[0],
            r.payoffs[1],
            r.cumulative[0],
            r.cumulative[1],
            belief
        );
    }
    let t = rec.totals();
    let _ = writeln!(
        s,
        "totals: human {} agent {} welfare {} | human wins {} draws {} agent wins {}",
        t.human, t.agent, t.welfare, t.human_wins, t.draws, t.agent_wins
    );
    match rec.human_switch_stats() {
        Ok(st) => {
            let _ = writeln!(s, "human type switches: q = {}, mean duration = {:.2}", st.types, st.mean_duration);
        }
        Err(e) => {
            let _ = writeln!(s, "human type switches: unavailable ({e})");
        }
    }
    if verify {
        match rec.replay() {
            Ok(()) => {
                let _ = writeln!(s, "replay: every agent action and score reproduced");
            }
            Err(e @ RecordError::Divergence { .. }) => return Err(CliError::Runtime(format!("replay diverged: {e}"))),
            Err(e) => return Err(CliError::Runtime(format!("replay failed: {e}"))),
        }
    }
    Ok(s)
}

/// Every built-in type with its config JSON.
pub fn list_types() -> String {
    let mut groups: Vec<(&str, Vec<TypeSpec>)> = Vec::new();
    let mut foraging = TypeSpec::heuristics(None);
    foraging.extend(
        [
            ForagingDistance::D1,
            ForagingDistance::D2,
            ForagingDistance::D3,
            ForagingDistance::D4,
        ]
        .into_iter()
        .map(|distance| TypeSpec::Ctype {
            distance,
            radius: 1.0,
            weight: hba_core::posterior::TimeWeight::Window { length: 10 },
        }),
    );
    groups.push(("foraging", foraging));
    groups.push(("prisoner's dilemma", TypeSpec::pd_table()));
    groups.push(("rock-paper-scissors", TypeSpec::rps_table()));
    groups.push(("any game", vec![TypeSpec::Uniform]));
    groups.push(("learners (true types only)", vec![TypeSpec::Jal, TypeSpec::Cjal]));
    let mut s = String::new();
    for (title, specs) in groups {
        let _ = writeln!(s, "{title}:");
        for spec in specs {
            let json = serde_json::to_string(&spec).expect("specs serialise");
            let _ = writeln!(s, "  {:<22} {json}", spec.label());
        }
    }
    let _ = writeln!(s, "presets:");
    for (name, _) in PRESETS {
        let _ = writeln!(s, "  {name}");
    }
    s
}

fn serve(args: ServeArgs) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(p) => serde_json::from_str::<ServiceConfig>(&read(p)?).map_err(|e| {
            CliError::Config(format!("{}: line {}, column {}: {e}", p.display(), e.line(), e.column()))
        })?,
        None => ServiceConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.data_dir.is_some() {
        cfg.data_dir = args.data_dir.clone();
    }
    if args.static_dir.is_some() {
        cfg.static_dir = args.static_dir.clone();
    }
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    rt.block_on(async move {
        let state = AppState::new(cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| CliError::Runtime(format!("cannot bind {addr}: {e}")))?;
        let local = listener.local_addr().map_err(|e| CliError::Runtime(e.to_string()))?;
        println!("listening on http://{local}");
        let _ = std::io::stdout().flush();
        hba_play::serve(listener, state, shutdown_signal())
            .await
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        println!("stopped");
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    log::info!("shutting down");
}
