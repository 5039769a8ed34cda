//! Seeded random corpora of step functions and weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::funcs::{RearrangedFunction, StepFunction};
use crate::lorentz::{PowerPiece, Weight};

pub const DEFAULT_SEED: u64 = 0;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// 1 to 8 pieces, values and lengths log-uniform in `[1e-3, 1e3]`.
pub fn random_step(rng: &mut ChaCha8Rng) -> StepFunction {
    let n = rng.gen_range(1..=8);
    let pieces = (0..n)
        .map(|_| (log_uniform(rng, 1e-3, 1e3), log_uniform(rng, 1e-3, 1e3)))
        .collect();
    StepFunction::new(pieces).expect("generated pieces are valid")
}

pub fn step_corpus(seed: u64, n: usize) -> Vec<StepFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_step(&mut rng)).collect()
}

pub fn rearranged_corpus(seed: u64, n: usize) -> Vec<RearrangedFunction> {
    step_corpus(seed, n)
        .iter()
        .map(RearrangedFunction::from)
        .collect()
}

/// Independent pairs, for two-function axioms.
pub fn step_pairs(seed: u64, n: usize) -> Vec<(StepFunction, StepFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (random_step(&mut rng), random_step(&mut rng)))
        .collect()
}

/// The same pieces in a shuffled layout: equimeasurable with `f`.
pub fn shuffled(f: &StepFunction, seed: u64) -> StepFunction {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pieces = f.pieces().to_vec();
    pieces.shuffle(&mut rng);
    StepFunction::new(pieces).expect("permutation of valid pieces")
}

/// Piecewise power weights with 1 to 4 pieces. Exponents lie in
/// `(-0.9, 2)` on bounded pieces and `(-2, -0.1)` on the unbounded last
/// piece (`(-0.9, -0.1)` if it is also the first), so `W` is finite and `∫^∞ w(s)/s ds` converges.
pub fn random_weight(rng: &mut ChaCha8Rng) -> Weight {
    let n = rng.gen_range(1..=4);
    let mut end = 0.0;
    let pieces = (0..n)
        .map(|i| {
            let last = i + 1 == n;
            end += log_uniform(rng, 1e-2, 1e2);
            PowerPiece {
                end: if last { f64::INFINITY } else { end },
                coef: log_uniform(rng, 1e-2, 1e2),
                exponent: match (i == 0, last) {
                    (true, true) => rng.gen_range(-0.9..-0.1),
                    (false, true) => rng.gen_range(-2.0..-0.1),
                    _ => rng.gen_range(-0.9..2.0),
                },
            }
        })
        .collect();
    Weight::piecewise(pieces).expect("generated weight is valid")
}

pub fn weight_corpus(seed: u64, n: usize) -> Vec<Weight> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_weight(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_corpora_repeat() {
        assert_eq!(step_corpus(7, 20), step_corpus(7, 20));
        assert_ne!(step_corpus(7, 20), step_corpus(8, 20));
        for f in step_corpus(DEFAULT_SEED, 200) {
            assert!((1..=8).contains(&f.pieces().len()));
            for (v, l) in f.pieces() {
                assert!((1e-3..=1e3).contains(v) && (1e-3..=1e3).contains(l));
            }
        }
    }

    #[test]
    fn shuffle_preserves_distribution() {
        let f = &step_corpus(3, 1)[0];
        let g = shuffled(f, 11);
        for s in [0.0, 0.01, 1.0, 100.0] {
            assert!((f.distribution(s) - g.distribution(s)).abs() <= 1e-12 * f.distribution(0.0));
        }
    }

    #[test]
    fn weights_have_convergent_transform() {
        for w in weight_corpus(DEFAULT_SEED, 50) {
            assert!(w.log_tail(0.0, 1.0).is_ok());
            assert!(w.log_primitive(0.0).is_finite());
        }
    }
}
