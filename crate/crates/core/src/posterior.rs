//! Beliefs over a user-defined type space: product, windowed-product and
//! temporally reweighted likelihoods, plus the type-switch statistic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dist;
use crate::scalar::Real;

/// Nonincreasing, nonnegative weight over lags `xi >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeWeight {
    /// `max(0, a - b (xi - 1)^c)`.
    General { a: f64, b: f64, c: f64 },
    /// `1` for `xi < length`, else `0`.
    Window { length: usize },
    /// `1` for every lag.
    Constant,
}

impl TimeWeight {
    pub const fn general(a: f64, b: f64, c: f64) -> Self {
        TimeWeight::General { a, b, c }
    }

    pub fn eval<F: Real>(&self, xi: usize) -> F {
        match *self {
            TimeWeight::General { a, b, c } => {
                let lag = xi.saturating_sub(1) as f64;
                F::lit((a - b * lag.powf(c)).max(0.0))
            }
            TimeWeight::Window { length } => {
                if xi < length {
                    F::one()
                } else {
                    F::zero()
                }
            }
            TimeWeight::Constant => F::one(),
        }
    }

    /// Largest lag with positive weight, or `None` if the support is unbounded.
    pub fn support(&self) -> Option<usize> {
        match *self {
            TimeWeight::Window { length } => Some(length.saturating_sub(1)),
            TimeWeight::Constant => None,
            TimeWeight::General { a, b, c } => {
                if self.eval::<f64>(1) <= 0.0 {
                    return Some(0);
                }
                if b == 0.0 || c == 0.0 {
                    return None;
                }
                let mut xi = ((a / b).powf(1.0 / c).floor() as usize).max(1);
                while self.eval::<f64>(xi + 1) > 0.0 {
                    xi += 1;
                }
                while xi > 1 && self.eval::<f64>(xi) <= 0.0 {
                    xi -= 1;
                }
                Some(xi)
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            TimeWeight::General { a, b, c } => {
                if [a, b, c].iter().all(|v| v.is_finite() && *v >= 0.0) {
                    Ok(())
                } else {
                    Err(format!("time weight parameters must be finite and >= 0, got a={a} b={b} c={c}"))
                }
            }
            TimeWeight::Window { length: 0 } => Err("window length must be positive".into()),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LikelihoodMode {
    /// Product over the whole history.
    Product,
    /// Product over the `window` most recent steps.
    Windowed { window: usize },
    /// Weighted sum `sum_tau f(t - tau) pi(H^tau, a^tau)`.
    Reweighted { weight: TimeWeight },
}

impl LikelihoodMode {
    pub const fn reweighted(a: f64, b: f64, c: f64) -> Self {
        LikelihoodMode::Reweighted {
            weight: TimeWeight::general(a, b, c),
        }
    }
}

/// Belief over one opponent's type space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posterior<F> {
    labels: Vec<String>,
    prior: Vec<F>,
    mode: LikelihoodMode,
    /// `steps[tau][k]`: probability type `k` gave the action observed at `tau`.
    steps: Vec<Vec<F>>,
    /// Product mode: running product, rescaled so its maximum is 1.
    running: Vec<F>,
    current: Vec<F>,
    degenerate: bool,
    fallbacks: usize,
}

impl<F: Real> Posterior<F> {
    pub fn new(labels: Vec<String>, prior: Vec<F>, mode: LikelihoodMode) -> Self {
        assert_eq!(labels.len(), prior.len());
        assert!(dist::is_distribution(&prior), "prior must be a distribution");
        let n = prior.len();
        Self {
            labels,
            current: prior.clone(),
            prior,
            mode,
            steps: Vec::new(),
            running: vec![F::one(); n],
            degenerate: false,
            fallbacks: 0,
        }
    }

    pub fn uniform(labels: Vec<String>, mode: LikelihoodMode) -> Self {
        let n = labels.len();
        Self::new(labels, dist::uniform(n), mode)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mode(&self) -> LikelihoodMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.prior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prior.is_empty()
    }

    /// Number of observed steps.
    pub fn t(&self) -> usize {
        self.steps.len()
    }

    pub fn probabilities(&self) -> &[F] {
        &self.current
    }

    /// True if the last update found every likelihood zero and fell back to
    /// the prior.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Number of updates that fell back to the prior.
    pub fn fallback_count(&self) -> usize {
        self.fallbacks
    }

    pub fn reset(&mut self) {
        self.steps.clear();
        self.running.iter_mut().for_each(|v| *v = F::one());
        self.current = self.prior.clone();
        self.degenerate = false;
        self.fallbacks = 0;
    }

    /// Adds one step: `probs[k]` is the probability that type `k` assigned
    /// to the action the opponent actually took.
    pub fn observe(&mut self, probs: &[F]) {
        assert_eq!(probs.len(), self.prior.len());
        if let LikelihoodMode::Product = self.mode {
            for (r, p) in self.running.iter_mut().zip(probs) {
                *r = *r * *p;
            }
            let max = self.running.iter().copied().fold(F::zero(), F::max);
            if max > F::zero() {
                self.running.iter_mut().for_each(|r| *r = *r / max);
            }
        }
        self.steps.push(probs.to_vec());
        self.recompute();
    }

    /// Unnormalised likelihood of type `k` under the configured mode.
    pub fn likelihood(&self, k: usize) -> F {
        let t = self.steps.len();
        match self.mode {
            LikelihoodMode::Product => self.steps.iter().map(|s| s[k]).fold(F::one(), |a, b| a * b),
            LikelihoodMode::Windowed { window } => self.steps[t.saturating_sub(window)..]
                .iter()
                .map(|s| s[k])
                .fold(F::one(), |a, b| a * b),
            LikelihoodMode::Reweighted { weight } => {
                let from = weight.support().map_or(0, |m| t.saturating_sub(m));
                (from..t)
                    .map(|tau| weight.eval::<F>(t - tau) * self.steps[tau][k])
                    .sum()
            }
        }
    }

    fn recompute(&mut self) {
        let lik: Vec<F> = match self.mode {
            LikelihoodMode::Product => self.running.clone(),
            _ => (0..self.prior.len()).map(|k| self.likelihood(k)).collect(),
        };
        let mut post: Vec<F> = lik.iter().zip(&self.prior).map(|(l, p)| *l * *p).collect();
        if dist::normalize(&mut post) {
            self.current = post;
            self.degenerate = false;
        } else {
            log::debug!("all type likelihoods are zero at t={}; using the prior", self.steps.len());
            self.current = self.prior.clone();
            self.degenerate = true;
            self.fallbacks += 1;
        }
    }

    /// Indices of the most probable types.
    pub fn argmax(&self) -> Vec<usize> {
        dist::argmax_set(&self.current, F::norm_tolerance())
    }

    /// Label to probability map, for logs and match records.
    pub fn snapshot(&self) -> BTreeMap<String, f64> {
        self.labels
            .iter()
            .cloned()
            .zip(self.current.iter().map(|p| p.as_f64()))
            .collect()
    }
}

/// Result of the type-switch statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchStats {
    /// Number of segments with a persisting most-probable type.
    pub types: usize,
    /// Mean segment length in rounds.
    pub mean_duration: f64,
}

/// Splits a posterior trace into maximal segments within which every argmax
/// set is contained in the next one.
pub fn type_switch_stats<F: Real>(trace: &[Vec<F>]) -> SwitchStats {
    if trace.len() < 2 {
        return SwitchStats {
            types: 1,
            mean_duration: trace.len() as f64,
        };
    }
    let sets: Vec<Vec<usize>> = trace
        .iter()
        .map(|p| dist::argmax_set(p, F::norm_tolerance()))
        .collect();
    let breaks = sets
        .windows(2)
        .filter(|w| !w[0].iter().all(|a| w[1].contains(a)))
        .count();
    let types = breaks + 1;
    SwitchStats {
        types,
        mean_duration: trace.len() as f64 / types as f64,
    }
}
