//! Monte-Carlo estimation of flexibility and efficiency, paired
//! significance tests and experiment orchestration.

mod experiment;
mod presets;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::rng::{self, derive_seed};
use crate::sbg::{run_episode, Controller, GameModel, SbgError, TypeSchedule};
use crate::scalar::Real;

pub use experiment::{
    AgentSpec, DistributionSet, ExperimentConfig, ExperimentResult, NamedComparison, NamedDistribution,
};
pub use presets::{preset, PRESETS};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("configuration parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("records are not paired: {0}")]
    Pairing(String),
    #[error("episode {episode} failed: {source}")]
    Episode {
        episode: usize,
        #[source]
        source: SbgError,
    },
    #[error("episode setup failed: {0}")]
    Setup(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl EvalError {
    pub fn from_json(e: serde_json::Error) -> Self {
        EvalError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Knobs of one estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSettings {
    /// `K`.
    pub episodes: usize,
    pub r1: f64,
    pub r2: f64,
    pub t_max: usize,
    pub seed: u64,
    /// The controlled player.
    pub player: usize,
    /// Size of the set of type distributions to draw from.
    pub distributions: usize,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl EstimateSettings {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.episodes == 0 {
            return Err(EvalError::Config("episodes must be at least 1".into()));
        }
        if !(self.r1 >= 1.0) || !(self.r2 >= 1.0) {
            return Err(EvalError::Config(format!(
                "r1 and r2 must be at least 1, got {} and {}",
                self.r1, self.r2
            )));
        }
        if self.t_max == 0 {
            return Err(EvalError::Config("t_max must be at least 1".into()));
        }
        if self.distributions == 0 {
            return Err(EvalError::Config("the set of type distributions is empty".into()));
        }
        Ok(())
    }

    /// Seed of episode `k`.
    pub fn episode_seed(&self, k: usize) -> u64 {
        derive_seed(self.seed, k as u64)
    }
}

/// Everything fixed before an episode starts.
pub struct EpisodeSetup<F: Real, G: GameModel<F>> {
    pub game: G,
    pub schedule: TypeSchedule<F>,
    pub controllers: Vec<Box<dyn Controller<F, G>>>,
    pub delta_id: String,
}

/// What the episode builder is told.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeContext {
    pub index: usize,
    pub seed: u64,
    /// Index of the drawn type distribution.
    pub delta: usize,
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub seed: u64,
    pub delta_id: String,
    pub terminated: bool,
    pub payoff_sum: f64,
    pub t_rho: usize,
    pub f_contrib: f64,
    pub e_contrib: f64,
}

/// Mean, standard error and 95% interval of a per-episode quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub ci95: [f64; 2],
}

impl MeanEstimate {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n.max(1) as f64;
        if n < 2 {
            return Self {
                mean,
                se: 0.0,
                ci95: [mean, mean],
            };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let q = t_quantile(0.975, (n - 1) as f64);
        Self {
            mean,
            se,
            ci95: [mean - q * se, mean + q * se],
        }
    }
}

fn t_quantile(p: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof)
        .map(|t| t.inverse_cdf(p))
        .unwrap_or(1.96)
}

/// Estimates of flexibility and efficiency for one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub agent: String,
    pub episodes: usize,
    pub terminated: usize,
    pub flexibility: MeanEstimate,
    pub efficiency: MeanEstimate,
    pub mean_length: f64,
}

impl Summary {
    pub fn from_records(agent: impl Into<String>, records: &[EpisodeRecord]) -> Self {
        let f: Vec<f64> = records.iter().map(|r| r.f_contrib).collect();
        let e: Vec<f64> = records.iter().map(|r| r.e_contrib).collect();
        Self {
            agent: agent.into(),
            episodes: records.len(),
            terminated: records.iter().filter(|r| r.terminated).count(),
            flexibility: MeanEstimate::of(&f),
            efficiency: MeanEstimate::of(&e),
            mean_length: records.iter().map(|r| r.t_rho as f64).sum::<f64>() / records.len().max(1) as f64,
        }
    }

    /// `F̂`.
    pub fn f_hat(&self) -> f64 {
        self.flexibility.mean
    }

    /// `Ê`.
    pub fn e_hat(&self) -> f64 {
        self.efficiency.mean
    }
}

/// `(sum u)^r1 * t^-r2`. Negative sums keep their sign under fractional
/// exponents.
pub fn efficiency_term(payoff_sum: f64, t: usize, r1: f64, r2: f64) -> f64 {
    let num = if r1.fract() == 0.0 && r1.abs() < i32::MAX as f64 {
        payoff_sum.powi(r1 as i32)
    } else {
        payoff_sum.signum() * payoff_sum.abs().powf(r1)
    };
    num * (t.max(1) as f64).powf(-r2)
}

/// Runs `K` episodes, each with a type distribution drawn uniformly from the
/// set, and scores the controlled player.
///
/// Episode `k` is fully determined by its derived seed, so results do not
/// depend on the number of workers.
pub fn estimate_with<F, G, B>(settings: &EstimateSettings, build: B) -> Result<Vec<EpisodeRecord>, EvalError>
where
    F: Real,
    G: GameModel<F>,
    B: Fn(EpisodeContext) -> Result<EpisodeSetup<F, G>, EvalError> + Sync,
{
    settings.validate()?;
    let run = |k: usize| -> Result<EpisodeRecord, EvalError> {
        let seed = settings.episode_seed(k);
        let delta = rng::stream(seed, rng::DRAW_STREAM).random_range(0..settings.distributions);
        let mut setup = build(EpisodeContext { index: k, seed, delta })?;
        let path = run_episode(
            &setup.game,
            &mut setup.schedule,
            &mut setup.controllers,
            settings.t_max,
            seed,
        )
        .map_err(|source| EvalError::Episode { episode: k, source })?;
        let payoff_sum = path.total_payoff(settings.player).as_f64();
        let t_rho = path.len();
        let (f, e) = if path.terminating {
            (1.0, efficiency_term(payoff_sum, t_rho, settings.r1, settings.r2))
        } else {
            (0.0, 0.0)
        };
        Ok(EpisodeRecord {
            episode: k,
            seed,
            delta_id: setup.delta_id,
            terminated: path.terminating,
            payoff_sum,
            t_rho,
            f_contrib: f,
            e_contrib: e,
        })
    };
    let all = || (0..settings.episodes).into_par_iter().map(run).collect();
    if settings.workers == 0 {
        all()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(settings.workers)
            .build()
            .map_err(|e| EvalError::Setup(e.to_string()))?
            .install(all)
    }
}

/// Paired t-test of one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedTest {
    pub n: usize,
    /// Mean of `a - b`.
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub t_stat: f64,
    /// Two-sided.
    pub p_value: f64,
    /// The differences have zero variance, so the t statistic is undefined;
    /// `p` is then 1 for a zero difference and 0 otherwise.
    pub degenerate: bool,
}

impl PairedTest {
    pub fn of(diffs: &[f64]) -> Self {
        let n = diffs.len();
        let mean = diffs.iter().sum::<f64>() / n.max(1) as f64;
        let var = if n > 1 {
            diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let sd = var.sqrt();
        let scale = diffs.iter().fold(1.0f64, |m, d| m.max(d.abs()));
        if n < 2 || sd <= 1e-12 * scale {
            let zero = mean.abs() <= 1e-12 * scale;
            return Self {
                n,
                mean_diff: mean,
                sd_diff: sd,
                t_stat: if zero { 0.0 } else { mean.signum() * f64::INFINITY },
                p_value: if zero { 1.0 } else { 0.0 },
                degenerate: true,
            };
        }
        let t = mean / (sd / (n as f64).sqrt());
        let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("positive degrees of freedom");
        let p = (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0);
        Self {
            n,
            mean_diff: mean,
            sd_diff: sd,
            t_stat: t,
            p_value: p,
            degenerate: false,
        }
    }

    /// `a` is significantly greater than `b` at level `alpha`.
    pub fn greater(&self, alpha: f64) -> bool {
        self.mean_diff > 0.0 && self.p_value < alpha
    }
}

/// Paired comparison of two agents on the same episodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedReport {
    pub flexibility: PairedTest,
    pub efficiency: PairedTest,
}

pub fn paired_compare(a: &[EpisodeRecord], b: &[EpisodeRecord]) -> Result<PairedReport, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::Pairing(format!("{} records against {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(EvalError::Pairing("no records".into()));
    }
    if let Some((x, y)) = a.iter().zip(b).find(|(x, y)| x.seed != y.seed || x.episode != y.episode) {
        return Err(EvalError::Pairing(format!(
            "episode {} has seed {} in one set and episode {} seed {} in the other",
            x.episode, x.seed, y.episode, y.seed
        )));
    }
    let diff = |f: fn(&EpisodeRecord) -> f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| f(x) - f(y)).collect() };
    Ok(PairedReport {
        flexibility: PairedTest::of(&diff(|r| r.f_contrib)),
        efficiency: PairedTest::of(&diff(|r| r.e_contrib)),
    })
}

/// One CSV row: the agent plus its episode record.
/// CSV column names, in order.
pub const CSV_HEADER: [&str; 9] = [
    "agent",
    "episode",
    "seed",
    "delta_id",
    "terminated",
    "payoff_sum",
    "t_rho",
    "f_contrib",
    "e_contrib",
];

/// Writes per-episode records of several agents as CSV (UTF-8, LF, `.`
/// decimal separator).
pub fn write_records_csv<W: std::io::Write>(out: W, runs: &[(String, Vec<EpisodeRecord>)]) -> Result<(), EvalError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for (agent, records) in runs {
        for r in records {
            w.serialize((
                agent, r.episode, r.seed, &r.delta_id, r.terminated, r.payoff_sum, r.t_rho, r.f_contrib, r.e_contrib,
            ))?;
        }
    }
    w.flush()?;
    Ok(())
}
