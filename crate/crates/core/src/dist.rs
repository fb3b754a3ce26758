//! Small helpers for finite probability distributions stored as slices.

use rand::Rng;

use crate::scalar::Real;

/// Uniform distribution over `n` outcomes.
pub fn uniform<F: Real>(n: usize) -> Vec<F> {
    assert!(n > 0, "uniform distribution over an empty set");
    vec![F::one() / F::from_usize_lossy(n); n]
}

pub fn point_mass<F: Real>(n: usize, at: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[at] = F::one();
    v
}

/// Uniform mass over the listed outcomes.
pub fn uniform_over<F: Real>(n: usize, support: &[usize]) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    let w = F::one() / F::from_usize_lossy(support.len());
    for &i in support {
        v[i] = v[i] + w;
    }
    v
}

/// True when every entry is finite and nonnegative and the total is 1 within
/// the scalar's tolerance.
pub fn is_distribution<F: Real>(p: &[F]) -> bool {
    if p.is_empty() {
        return false;
    }
    let mut total = F::zero();
    for &x in p {
        if !x.is_finite() || x < F::zero() {
            return false;
        }
        total = total + x;
    }
    (total - F::one()).abs() <= F::norm_tolerance()
}

/// Scales `p` to sum to one. Returns `false` (leaving `p` untouched) when the
/// total mass is zero or not finite.
pub fn normalize<F: Real>(p: &mut [F]) -> bool {
    let total: F = p.iter().copied().sum();
    if !(total > F::zero()) || !total.is_finite() {
        return false;
    }
    for x in p.iter_mut() {
        *x = *x / total;
    }
    true
}

/// Indices whose value is within `tol` of the maximum.
pub fn argmax_set<F: Real>(values: &[F], tol: F) -> Vec<usize> {
    let best = values
        .iter()
        .copied()
        .fold(F::neg_infinity(), |a, b| if b > a { b } else { a });
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| best - v <= tol)
        .map(|(i, _)| i)
        .collect()
}

/// Draws an index from `p`. The slice must be a distribution; trailing
/// rounding slack is assigned to the last outcome with positive mass.
pub fn sample_index<F: Real, R: Rng + ?Sized>(p: &[F], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &x) in p.iter().enumerate() {
        let x = x.as_f64();
        if x <= 0.0 {
            continue;
        }
        last = i;
        acc += x;
        if u < acc {
            return i;
        }
    }
    last
}

/// Uniform pick among `choices`.
pub fn pick<R: Rng + ?Sized>(choices: &[usize], rng: &mut R) -> usize {
    choices[rng.random_range(0..choices.len())]
}
