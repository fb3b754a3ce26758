use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::rps::RpsBehavior;
use super::{
    ConceptualType, ForagingDistance, Heuristic, HeuristicType, PdType, RpsType, SharedType,
    UniformType,
};
use crate::foraging::{ForagingState, NUM_ACTIONS};
use crate::matrix::{MatrixGame, MatrixKind};
use crate::posterior::TimeWeight;
use crate::scalar::Real;

fn default_radius() -> f64 {
    1.0
}

fn default_ctype_weight() -> TimeWeight {
    TimeWeight::Window { length: 10 }
}

/// One entry of a type-space manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TypeSpec {
    H1 {
        #[serde(default)]
        sigma: Option<f64>,
    },
    H2 {
        #[serde(default)]
        sigma: Option<f64>,
    },
    H3 {
        #[serde(default)]
        sigma: Option<f64>,
    },
    H4 {
        #[serde(default)]
        sigma: Option<f64>,
    },
    Ctype {
        distance: ForagingDistance,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_ctype_weight")]
        weight: TimeWeight,
    },
    AlwaysC,
    TitForTat,
    #[serde(rename = "tit_for_two_tats")]
    TitFor2Tats,
    Optimistic,
    Pessimistic,
    Copycat,
    RetryIfWon,
    IFocused {
        h: usize,
    },
    JFocused {
        h: usize,
    },
    Uniform,
    /// Joint-action learner. Learning types keep per-episode state, so they
    /// can only be true types, never hypotheses.
    Jal,
    /// Conditional joint-action learner.
    Cjal,
}

/// A list of type specs, the JSON form of a type space.
pub type TypeSpace = Vec<TypeSpec>;

impl TypeSpec {
    pub fn heuristic(variant: Heuristic, sigma: Option<f64>) -> Self {
        match variant {
            Heuristic::H1 => TypeSpec::H1 { sigma },
            Heuristic::H2 => TypeSpec::H2 { sigma },
            Heuristic::H3 => TypeSpec::H3 { sigma },
            Heuristic::H4 => TypeSpec::H4 { sigma },
        }
    }

    /// H1 to H4 with one sight radius.
    pub fn heuristics(sigma: Option<f64>) -> TypeSpace {
        [Heuristic::H1, Heuristic::H2, Heuristic::H3, Heuristic::H4]
            .into_iter()
            .map(|h| Self::heuristic(h, sigma))
            .collect()
    }

    pub fn pd_table() -> TypeSpace {
        PdType::ALL.iter().map(|&t| Self::from_pd(t)).collect()
    }

    pub fn rps_table() -> TypeSpace {
        RpsType::TABLE.iter().map(|&t| Self::from_rps(t)).collect()
    }

    pub fn from_pd(t: PdType) -> Self {
        match t {
            PdType::AlwaysC => TypeSpec::AlwaysC,
            PdType::TitForTat => TypeSpec::TitForTat,
            PdType::TitFor2Tats => TypeSpec::TitFor2Tats,
            PdType::Optimistic => TypeSpec::Optimistic,
            PdType::Pessimistic => TypeSpec::Pessimistic,
        }
    }

    pub fn from_rps(t: RpsType) -> Self {
        match t {
            RpsType::Copycat => TypeSpec::Copycat,
            RpsType::RetryIfWon => TypeSpec::RetryIfWon,
            RpsType::IFocused(h) => TypeSpec::IFocused { h },
            RpsType::JFocused(h) => TypeSpec::JFocused { h },
        }
    }

    fn as_pd(&self) -> Option<PdType> {
        Some(match self {
            TypeSpec::AlwaysC => PdType::AlwaysC,
            TypeSpec::TitForTat => PdType::TitForTat,
            TypeSpec::TitFor2Tats => PdType::TitFor2Tats,
            TypeSpec::Optimistic => PdType::Optimistic,
            TypeSpec::Pessimistic => PdType::Pessimistic,
            _ => return None,
        })
    }

    fn as_rps(&self) -> Option<RpsType> {
        Some(match self {
            TypeSpec::Copycat => RpsType::Copycat,
            TypeSpec::RetryIfWon => RpsType::RetryIfWon,
            TypeSpec::IFocused { h } => RpsType::IFocused(*h),
            TypeSpec::JFocused { h } => RpsType::JFocused(*h),
            _ => return None,
        })
    }

    pub fn is_learner(&self) -> bool {
        matches!(self, TypeSpec::Jal | TypeSpec::Cjal)
    }

    fn check_sigma(sigma: Option<f64>) -> Result<(), String> {
        match sigma {
            Some(r) if !(r > 0.0) => Err(format!("sight radius must be positive, got {r}")),
            _ => Ok(()),
        }
    }

    /// Builds a foraging type.
    pub fn build_foraging<F: Real>(&self) -> Result<SharedType<ForagingState, F>, String> {
        let heuristic = |v, sigma| -> Result<SharedType<ForagingState, F>, String> {
            Self::check_sigma(sigma)?;
            Ok(Arc::new(HeuristicType::new(v, sigma)))
        };
        match *self {
            TypeSpec::H1 { sigma } => heuristic(Heuristic::H1, sigma),
            TypeSpec::H2 { sigma } => heuristic(Heuristic::H2, sigma),
            TypeSpec::H3 { sigma } => heuristic(Heuristic::H3, sigma),
            TypeSpec::H4 { sigma } => heuristic(Heuristic::H4, sigma),
            TypeSpec::Ctype {
                distance,
                radius,
                weight,
            } => {
                if !(radius > 0.0) {
                    return Err(format!("c-type radius must be positive, got {radius}"));
                }
                weight.validate()?;
                Ok(Arc::new(ConceptualType::new(Box::new(distance), radius, weight, NUM_ACTIONS)))
            }
            TypeSpec::Uniform => Ok(Arc::new(UniformType { actions: NUM_ACTIONS })),
            TypeSpec::Jal | TypeSpec::Cjal => Err(format!(
                "{} is a learning type and cannot be used as a hypothesis",
                self.label()
            )),
            ref other => Err(format!("type {} is not a foraging type", other.label())),
        }
    }

    /// Builds a type for a repeated matrix game.
    pub fn build_matrix<F: Real>(&self, stage: &MatrixGame<F>) -> Result<SharedType<usize, F>, String> {
        if let TypeSpec::Uniform = self {
            return Ok(Arc::new(UniformType {
                actions: stage.num_actions(0),
            }));
        }
        if let Some(t) = self.as_pd() {
            return match stage.kind {
                MatrixKind::PrisonersDilemma => Ok(Arc::new(t)),
                _ => Err(format!("{} is a Prisoner's Dilemma type", self.label())),
            };
        }
        if let Some(t) = self.as_rps() {
            if let RpsType::IFocused(h) | RpsType::JFocused(h) = t {
                if h == 0 {
                    return Err("focused types need h >= 1".into());
                }
            }
            return match stage.kind {
                MatrixKind::RockPaperScissors => Ok(Arc::new(RpsBehavior {
                    kind: t,
                    stage: stage.clone(),
                })),
                _ => Err(format!("{} is a Rock-Paper-Scissors type", self.label())),
            };
        }
        Err(format!("type {} is not a matrix-game type", self.label()))
    }

    /// Human-readable name matching the built type's `name()`.
    pub fn label(&self) -> String {
        let heuristic = |v: &str, sigma: &Option<f64>| match sigma {
            None => v.to_string(),
            Some(r) => format!("{v}[sigma={r}]"),
        };
        match self {
            TypeSpec::H1 { sigma } => heuristic("H1", sigma),
            TypeSpec::H2 { sigma } => heuristic("H2", sigma),
            TypeSpec::H3 { sigma } => heuristic("H3", sigma),
            TypeSpec::H4 { sigma } => heuristic("H4", sigma),
            TypeSpec::Ctype { distance, .. } => format!("ctype[{}]", format!("{distance:?}").to_lowercase()),
            TypeSpec::IFocused { h } => format!("i-focused({h})"),
            TypeSpec::JFocused { h } => format!("j-focused({h})"),
            TypeSpec::Uniform => "Uniform".into(),
            TypeSpec::Jal => "JAL".into(),
            TypeSpec::Cjal => "CJAL".into(),
            other => match (other.as_pd(), other.as_rps()) {
                (Some(t), _) => format!("{t:?}"),
                (_, Some(t)) => format!("{t:?}"),
                _ => unreachable!("every spec is labelled above"),
            },
        }
    }
}

pub fn build_foraging_space<F: Real>(space: &[TypeSpec]) -> Result<Vec<SharedType<ForagingState, F>>, String> {
    space.iter().map(|s| s.build_foraging()).collect()
}

pub fn build_matrix_space<F: Real>(space: &[TypeSpec], stage: &MatrixGame<F>) -> Result<Vec<SharedType<usize, F>>, String> {
    space.iter().map(|s| s.build_matrix(stage)).collect()
}
