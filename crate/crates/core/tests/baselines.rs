//! Frequency models of the learning baselines against counts recomputed
//! from the logged episode, and the WoLF-PHC policy invariants.

mod support;

use hba_core::rl::{Learner, WolfPolicy};
use support::scenarios::{foraging_count_parity, matrix_count_parity, on_simplex, wolf_random_updates};

#[test]
fn jal_counts_match_the_log() {
    foraging_count_parity(|| Learner::Jal, false, 31).unwrap();
}

#[test]
fn cjal_counts_match_the_log() {
    foraging_count_parity(|| Learner::Cjal, true, 32).unwrap();
}

#[test]
fn wolf_counts_and_policies_stay_valid() {
    foraging_count_parity(|| Learner::Wolf, false, 33).unwrap();
}

#[test]
fn matrix_learner_counts_follow_the_artificial_state() {
    matrix_count_parity(3).unwrap();
}

#[test]
fn wolf_policy_stays_on_the_simplex() {
    wolf_random_updates(10_000, 17).unwrap();
}

#[test]
fn wolf_policy_climbs_toward_a_fixed_best_action() {
    let mut wolf = WolfPolicy::<f64>::new(3);
    let q = [0.0, 2.0, 1.0];
    let mut last = wolf.policy(0)[1];
    for t in 0..2_000 {
        wolf.step(0, &q, t);
        let now = wolf.policy(0)[1];
        assert!(now >= last);
        on_simplex(&wolf.policy(0)).unwrap();
        last = now;
    }
    assert!((last - 1.0).abs() < 1e-9, "{last}");
}
