use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    estimate_with, paired_compare, write_records_csv, EpisodeContext, EpisodeRecord, EpisodeSetup, EstimateSettings,
    EvalError, PairedReport, Summary,
};
use crate::behavior::{build_foraging_space, BehaviorController, SharedType, TypeSpec};
use crate::foraging::{generate_initial_state, ForagingGame, ForagingSpec, ForagingState};
use crate::posterior::LikelihoodMode;
use crate::rl::{Belief, Learner, RlAgent, RlParams};
use crate::rng;
use crate::sbg::{Controller, PlayerTypeRule, TypeDistribution, TypedPlayer};

type Ctrl = Box<dyn Controller<f64, ForagingGame<f64>>>;

fn one() -> f64 {
    1.0
}

fn default_t_max() -> usize {
    1000
}

/// The agent controlling the evaluated player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AgentSpec {
    /// HBA over user-defined types with the given posterior.
    Hba {
        name: String,
        types: Vec<TypeSpec>,
        posterior: LikelihoodMode,
    },
    /// HBA told the true type of every other player at every step.
    Oracle { name: String },
    Jal { name: String },
    Cjal { name: String },
    Wolf { name: String },
}

impl AgentSpec {
    pub fn name(&self) -> &str {
        match self {
            AgentSpec::Hba { name, .. }
            | AgentSpec::Oracle { name }
            | AgentSpec::Jal { name }
            | AgentSpec::Cjal { name }
            | AgentSpec::Wolf { name } => name,
        }
    }
}

/// A labelled explicit type distribution over all players (the evaluated
/// player's rule is ignored).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedDistribution {
    pub id: String,
    pub distribution: TypeDistribution<f64>,
}

/// The set of type distributions episodes are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSet {
    /// One static pure distribution per assignment of true types to the
    /// other players.
    StaticPure,
    /// Every other player switches to a different random type after a
    /// random number of steps in the interval.
    Switching { min_interval: usize, max_interval: usize },
    /// One distribution per assignment of base types; each other player is
    /// independently defective with `probability` and then switches types
    /// like in `Switching`.
    Defective {
        probability: f64,
        min_interval: usize,
        max_interval: usize,
    },
    Explicit { distributions: Vec<NamedDistribution> },
}

/// Assignments of `types` type indices to `players` slots, in
/// lexicographic order.
fn assignments(players: usize, types: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..players {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..types).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

impl DistributionSet {
    /// Expands to labelled distributions over `players` players, where
    /// `me` is evaluated and the others draw from `types` true types.
    pub fn expand(&self, players: usize, me: usize, types: usize) -> Vec<NamedDistribution> {
        let others = players - 1;
        let all: Vec<usize> = (0..types).collect();
        let with_me = |rules: Vec<PlayerTypeRule<f64>>| {
            let mut rules = rules;
            rules.insert(me, PlayerTypeRule::Fixed { index: 0 });
            TypeDistribution::new(rules)
        };
        let label = |a: &[usize]| a.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        match self {
            DistributionSet::StaticPure => assignments(others, types)
                .into_iter()
                .map(|a| NamedDistribution {
                    id: format!("static[{}]", label(&a)),
                    distribution: with_me(a.iter().map(|&index| PlayerTypeRule::Fixed { index }).collect()),
                })
                .collect(),
            DistributionSet::Switching {
                min_interval,
                max_interval,
            } => vec![NamedDistribution {
                id: "switching".into(),
                distribution: with_me(
                    (0..others)
                        .map(|_| PlayerTypeRule::Switching {
                            candidates: all.clone(),
                            min_interval: *min_interval,
                            max_interval: *max_interval,
                        })
                        .collect(),
                ),
            }],
            DistributionSet::Defective {
                probability,
                min_interval,
                max_interval,
            } => assignments(others, types)
                .into_iter()
                .map(|a| NamedDistribution {
                    id: format!("defective[{}]", label(&a)),
                    distribution: with_me(
                        a.iter()
                            .map(|&base| PlayerTypeRule::Defective {
                                base,
                                probability: *probability,
                                candidates: all.clone(),
                                min_interval: *min_interval,
                                max_interval: *max_interval,
                            })
                            .collect(),
                    ),
                })
                .collect(),
            DistributionSet::Explicit { distributions } => distributions.clone(),
        }
    }
}

/// A foraging experiment: several agents evaluated on the same episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub domain: ForagingSpec,
    /// True type space of every other player.
    pub true_types: Vec<TypeSpec>,
    pub distributions: DistributionSet,
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub rl: RlParams,
    pub episodes: usize,
    #[serde(default = "one")]
    pub r1: f64,
    #[serde(default = "one")]
    pub r2: f64,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default)]
    pub seed: u64,
    /// The evaluated player.
    #[serde(default)]
    pub player: usize,
    /// Directory for results; the command line may override it.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A named pairwise comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedComparison {
    pub a: String,
    pub b: String,
    pub report: PairedReport,
}

/// Everything an experiment produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub seed: u64,
    pub episodes: usize,
    pub summaries: Vec<Summary>,
    pub comparisons: Vec<NamedComparison>,
    #[serde(skip)]
    pub records: Vec<(String, Vec<EpisodeRecord>)>,
}

impl ExperimentResult {
    pub fn summary(&self, agent: &str) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.agent == agent)
    }

    pub fn records(&self, agent: &str) -> Option<&[EpisodeRecord]> {
        self.records.iter().find(|(a, _)| a == agent).map(|(_, r)| r.as_slice())
    }

    pub fn comparison(&self, a: &str, b: &str) -> Option<&PairedReport> {
        self.comparisons.iter().find(|c| c.a == a && c.b == b).map(|c| &c.report)
    }

    /// Writes `<name>.csv` and `<name>.summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf), EvalError> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.name));
        let json_path = dir.join(format!("{}.summary.json", self.name));
        write_records_csv(std::fs::File::create(&csv_path)?, &self.records)?;
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        std::fs::write(&json_path, json)?;
        Ok((csv_path, json_path))
    }
}

/// Prepared state shared by every episode of an experiment.
struct Prepared {
    distributions: Vec<NamedDistribution>,
    true_types: Vec<Option<SharedType<ForagingState, f64>>>,
    hypotheses: Vec<Option<Vec<SharedType<ForagingState, f64>>>>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let cfg: Self = serde_json::from_str(text).map_err(EvalError::from_json)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn settings(&self, workers: usize) -> EstimateSettings {
        EstimateSettings {
            episodes: self.episodes,
            r1: self.r1,
            r2: self.r2,
            t_max: self.t_max,
            seed: self.seed,
            player: self.player,
            distributions: self
                .distributions
                .expand(self.domain.players, self.player, self.true_types.len())
                .len(),
            workers,
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        self.prepare().map(|_| ())
    }

    fn prepare(&self) -> Result<Prepared, EvalError> {
        let bad = |m: String| Err(EvalError::Config(m));
        let d = &self.domain;
        if d.players < 2 {
            return bad("foraging experiments need at least 2 players".into());
        }
        if self.player >= d.players {
            return bad(format!("player {} does not exist in a {}-player game", self.player, d.players));
        }
        if d.foods == 0 {
            return bad("at least one food is required".into());
        }
        if self.true_types.is_empty() {
            return bad("true_types is empty".into());
        }
        if self.agents.is_empty() {
            return bad("no agents to evaluate".into());
        }
        let mut names = BTreeSet::new();
        for a in &self.agents {
            if !names.insert(a.name()) {
                return bad(format!("duplicate agent name {:?}", a.name()));
            }
            if a.name().is_empty() || a.name().contains([',', '"', '\n']) {
                return bad(format!("agent name {:?} must be non-empty without commas or quotes", a.name()));
            }
        }
        self.rl.validate().map_err(EvalError::Config)?;
        self.settings(1).validate()?;

        let true_types = self
            .true_types
            .iter()
            .map(|t| if t.is_learner() { Ok(None) } else { t.build_foraging().map(Some) })
            .collect::<Result<Vec<_>, _>>()
            .map_err(EvalError::Config)?;
        let any_learner = true_types.iter().any(|t| t.is_none());
        let mut hypotheses = Vec::new();
        for a in &self.agents {
            match a {
                AgentSpec::Hba { types, posterior, .. } => {
                    if types.is_empty() {
                        return bad(format!("agent {} has an empty type space", a.name()));
                    }
                    if let LikelihoodMode::Reweighted { weight } = posterior {
                        weight.validate().map_err(EvalError::Config)?;
                    }
                    if let LikelihoodMode::Windowed { window: 0 } = posterior {
                        return bad("posterior window must be positive".into());
                    }
                    hypotheses.push(Some(build_foraging_space(types).map_err(EvalError::Config)?));
                }
                AgentSpec::Oracle { .. } if any_learner => {
                    return bad(format!(
                        "agent {} needs stateless true types; learning types cannot be told as correct types",
                        a.name()
                    ));
                }
                _ => hypotheses.push(None),
            }
        }

        let distributions = self.distributions.expand(d.players, self.player, self.true_types.len());
        let mut ids = BTreeSet::new();
        for nd in &distributions {
            if !ids.insert(nd.id.as_str()) {
                return bad(format!("duplicate distribution id {:?}", nd.id));
            }
            let mut sizes = vec![self.true_types.len(); d.players];
            sizes[self.player] = 1;
            let mut dist = nd.distribution.clone();
            if let Some(rule) = dist.players.get_mut(self.player) {
                *rule = PlayerTypeRule::Fixed { index: 0 };
            }
            dist.validate(&sizes)
                .map_err(|m| EvalError::Config(format!("distribution {}: {m}", nd.id)))?;
        }
        if let DistributionSet::Defective { probability, .. } = self.distributions {
            if !(0.0..=1.0).contains(&probability) {
                return bad(format!("defective probability must lie in [0, 1], got {probability}"));
            }
        }
        Ok(Prepared {
            distributions,
            true_types,
            hypotheses,
        })
    }

    fn controllers(&self, prep: &Prepared, agent: usize) -> Vec<Ctrl> {
        let n = self.domain.players;
        let me = self.player;
        let spec = &self.agents[agent];
        let true_space = || -> Vec<SharedType<ForagingState, f64>> {
            prep.true_types.iter().map(|t| t.clone().expect("checked stateless")).collect()
        };
        let learner = match spec {
            AgentSpec::Hba { posterior, .. } => {
                let types = prep.hypotheses[agent].clone().expect("built in prepare");
                Learner::Hba {
                    beliefs: (0..n)
                        .map(|j| (j != me).then(|| Belief::posterior(types.clone(), *posterior)))
                        .collect(),
                }
            }
            AgentSpec::Oracle { .. } => Learner::Hba {
                beliefs: (0..n).map(|j| (j != me).then(|| Belief::oracle(true_space()))).collect(),
            },
            AgentSpec::Jal { .. } => Learner::Jal,
            AgentSpec::Cjal { .. } => Learner::Cjal,
            AgentSpec::Wolf { .. } => Learner::Wolf,
        };
        (0..n)
            .map(|j| -> Ctrl {
                if j == me {
                    return Box::new(RlAgent::new(spec.name(), learner_take(&learner), self.rl));
                }
                let per_type: Vec<Ctrl> = self
                    .true_types
                    .iter()
                    .zip(&prep.true_types)
                    .map(|(ts, built)| -> Ctrl {
                        match (ts, built) {
                            (_, Some(t)) => Box::new(BehaviorController::new(t.clone())),
                            (TypeSpec::Cjal, None) => Box::new(RlAgent::new("CJAL", Learner::Cjal, self.rl)),
                            (_, None) => Box::new(RlAgent::new("JAL", Learner::Jal, self.rl)),
                        }
                    })
                    .collect();
                Box::new(TypedPlayer::new(per_type))
            })
            .collect()
    }

    /// Runs every agent on the same `K` episodes.
    pub fn run(&self, workers: usize) -> Result<ExperimentResult, EvalError> {
        let prep = self.prepare()?;
        let settings = self.settings(workers);
        let mut records = Vec::new();
        for (k, agent) in self.agents.iter().enumerate() {
            log::info!("{}: evaluating {} over {} episodes", self.name, agent.name(), self.episodes);
            let recs = estimate_with(&settings, |ctx: EpisodeContext| {
                let mut init_rng = rng::stream(ctx.seed, rng::INIT_STREAM);
                let s0 = generate_initial_state(&mut init_rng, &self.domain)
                    .map_err(|e| EvalError::Setup(e.to_string()))?;
                let nd = &prep.distributions[ctx.delta];
                let mut dist = nd.distribution.clone();
                dist.players[self.player] = PlayerTypeRule::Fixed { index: 0 };
                Ok(EpisodeSetup {
                    game: ForagingGame::new(s0),
                    schedule: dist.instantiate(rng::stream(ctx.seed, rng::SCHEDULE_STREAM)),
                    controllers: self.controllers(&prep, k),
                    delta_id: nd.id.clone(),
                })
            })?;
            records.push((agent.name().to_string(), recs));
        }
        let summaries = records.iter().map(|(a, r)| Summary::from_records(a.clone(), r)).collect();
        let mut comparisons = Vec::new();
        for i in 0..records.len() {
            for j in i + 1..records.len() {
                comparisons.push(NamedComparison {
                    a: records[i].0.clone(),
                    b: records[j].0.clone(),
                    report: paired_compare(&records[i].1, &records[j].1)?,
                });
            }
        }
        Ok(ExperimentResult {
            name: self.name.clone(),
            seed: self.seed,
            episodes: self.episodes,
            summaries,
            comparisons,
            records,
        })
    }
}

/// Learners own their beliefs, so each controller needs a fresh copy.
fn learner_take(l: &Learner<ForagingState, f64>) -> Learner<ForagingState, f64> {
    match l {
        Learner::Hba { beliefs } => Learner::Hba {
            beliefs: beliefs
                .iter()
                .map(|b| {
                    b.as_ref().map(|b| match b {
                        Belief::Posterior { types, posterior } => Belief::posterior(types.clone(), posterior.mode()),
                        Belief::Oracle { types, .. } => Belief::oracle(types.clone()),
                    })
                })
                .collect(),
        },
        Learner::Jal => Learner::Jal,
        Learner::Cjal => Learner::Cjal,
        Learner::Wolf => Learner::Wolf,
    }
}
