use crate::scalar::Real;

use super::{EpisodePath, GameModel, History, SbgError, TypeSchedule};

/// The strategies `pi_k(H, a_k, theta_k)` of all players.
pub trait StrategyProfile<F: Real, S> {
    fn policy(&self, player: usize, player_type: usize, history: &History<S>) -> Vec<F>;
}

impl<F: Real, S, T> StrategyProfile<F, S> for T
where
    T: Fn(usize, usize, &History<S>) -> Vec<F>,
{
    fn policy(&self, player: usize, player_type: usize, history: &History<S>) -> Vec<F> {
        self(player, player_type, history)
    }
}

/// Probability of a path:
/// `prod_tau Δ(tau, θ^tau) · T(s^tau, a^tau, s^tau+1) · prod_k pi_k(H^tau, a_k^tau, θ_k^tau)`
/// for `tau < t_rho`. The final state's type draw is not weighted.
pub fn path_probability<F, G, P>(
    game: &G,
    schedule: &mut TypeSchedule<F>,
    strategies: &P,
    path: &EpisodePath<G::State, F>,
) -> Result<F, SbgError>
where
    F: Real,
    G: GameModel<F>,
    P: StrategyProfile<F, G::State> + ?Sized,
{
    let h = &path.history;
    let t_rho = h.t();
    if path.types.len() != t_rho {
        return Err(SbgError::MalformedPath(format!(
            "{} type draws for {} steps",
            path.types.len(),
            t_rho
        )));
    }
    if let Some(index) = (0..t_rho).find(|&tau| game.is_terminal(h.state(tau))) {
        return Err(SbgError::TerminalPrefix { index });
    }
    let mut prob = F::one();
    let mut prefix = History::new(h.state(0).clone());
    for tau in 0..t_rho {
        let theta = &path.types[tau];
        let joint = h.action(tau);
        let s = h.state(tau);
        let next = h.state(tau + 1);
        let delta = schedule.probability(tau, theta);
        let trans = game
            .transitions(s, joint)
            .into_iter()
            .filter(|(succ, _)| succ == next)
            .map(|(_, p)| p)
            .sum::<F>();
        let mut pi = F::one();
        for (k, &a) in joint.iter().enumerate() {
            let probs = strategies.policy(k, theta[k], &prefix);
            pi = pi * probs.get(a).copied().unwrap_or(F::zero());
        }
        prob = prob * delta * trans * pi;
        prefix.push(joint.clone(), next.clone());
    }
    Ok(prob)
}
