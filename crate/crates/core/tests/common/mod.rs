#![allow(dead_code)]

use monfg::{MixedStrategy, Monfg, StrategyProfile, UtilitySpec};
use proptest::prelude::*;
use rand::Rng;

pub fn labels(counts: &[usize]) -> Vec<Vec<String>> {
    counts
        .iter()
        .map(|&k| (0..k).map(|a| format!("a{a}")).collect())
        .collect()
}

/// Game with the given action counts, `d` objectives and payoffs in `[lo, hi)`.
pub fn random_game<R: Rng>(rng: &mut R, counts: &[usize], d: usize, lo: f64, hi: f64) -> Monfg {
    let n = counts.len();
    let size: usize = counts.iter().product::<usize>() * n * d;
    let payoffs = (0..size).map(|_| rng.gen_range(lo..hi)).collect();
    Monfg::new(labels(counts), d, payoffs).unwrap()
}

pub fn random_simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

pub fn random_linear<R: Rng>(rng: &mut R, d: usize) -> UtilitySpec {
    UtilitySpec::linear(random_simplex(rng, d)).unwrap()
}

/// A random mixed profile; with probability 1/3 each strategy is pure.
pub fn random_profile<R: Rng>(rng: &mut R, game: &Monfg) -> StrategyProfile {
    StrategyProfile::new(
        game.action_counts()
            .into_iter()
            .map(|k| {
                if rng.gen_bool(1.0 / 3.0) {
                    MixedStrategy::pure(k, rng.gen_range(0..k))
                } else {
                    MixedStrategy::new(random_simplex(rng, k)).unwrap()
                }
            })
            .collect(),
    )
}

/// Strategy for two-player games with 2..=3 actions each and `d` objectives.
pub fn small_game(d: usize, lo: f64, hi: f64) -> impl Strategy<Value = Monfg> {
    (2usize..=3, 2usize..=3).prop_flat_map(move |(a, b)| {
        proptest::collection::vec(lo..hi, a * b * 2 * d)
            .prop_map(move |payoffs| Monfg::new(labels(&[a, b]), d, payoffs).unwrap())
    })
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
