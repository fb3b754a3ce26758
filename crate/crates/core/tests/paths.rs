//! Path probabilities on a small hand-built game: exhaustive enumeration
//! must sum to one and match sampled path frequencies.

mod support;

use std::collections::HashMap;

use hba_core::behavior::BehaviorController;
use hba_core::rng::stream;
use hba_core::sbg::{path_probability, run_episode, Controller, SbgError, TypedPlayer};
use support::two_state::{all_paths, delta, probability, strategy, types, TwoState};

#[test]
fn path_probabilities_sum_to_one() {
    for horizon in 1..=3 {
        let paths = all_paths(horizon);
        let total: f64 = paths.iter().map(probability).sum();
        assert!((total - 1.0).abs() < 1e-9, "horizon {horizon}: total {total}");
    }
}

/// States, joint actions and joint types of a path.
type PathKey = (Vec<u8>, Vec<Vec<usize>>, Vec<Vec<usize>>);

#[test]
fn sampled_paths_follow_their_probabilities() {
    let game = TwoState;
    let n = 40_000;
    let mut seen: HashMap<PathKey, usize> = HashMap::new();
    for k in 0..n {
        let (zero, one) = types();
        let mut ctrls: Vec<Box<dyn Controller<f64, TwoState>>> = vec![
            Box::new(BehaviorController::new(zero)),
            Box::new(TypedPlayer::new(
                one.into_iter()
                    .map(|t| Box::new(BehaviorController::new(t)) as Box<dyn Controller<f64, TwoState>>)
                    .collect(),
            )),
        ];
        let mut sched = delta().instantiate(stream(k, 9));
        let p = run_episode(&game, &mut sched, &mut ctrls, 2, k).unwrap();
        *seen
            .entry((p.history.states().to_vec(), p.history.actions().to_vec(), p.types.clone()))
            .or_default() += 1;
    }
    let mut worst: f64 = 0.0;
    for path in all_paths(2) {
        let p = probability(&path);
        let key = (path.history.states().to_vec(), path.history.actions().to_vec(), path.types.clone());
        let observed = seen.get(&key).copied().unwrap_or(0) as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-4);
        worst = worst.max((observed - p).abs() / se);
    }
    assert!(worst < 5.0, "largest deviation {worst:.2} standard errors");
}

#[test]
fn paths_through_terminal_states_are_rejected() {
    let mut path = all_paths(1)
        .into_iter()
        .find(|p| p.terminating)
        .unwrap_or_else(|| {
            all_paths(2).into_iter().find(|p| p.terminating).unwrap()
        });
    let last = *path.history.current();
    path.history.push(vec![0, 0], last);
    path.types.push(vec![0, 0]);
    let mut sched = delta().instantiate(stream(0, 0));
    let err = path_probability(&TwoState, &mut sched, &strategy, &path).unwrap_err();
    assert!(matches!(err, SbgError::TerminalPrefix { .. }), "{err:?}");

    let mut short = all_paths(2).pop().unwrap();
    short.types.pop();
    let err = path_probability(&TwoState, &mut sched, &strategy, &short).unwrap_err();
    assert!(matches!(err, SbgError::MalformedPath(_)), "{err:?}");
}
