//! Deterministic instance generators shared by the benchmarks.

use cohdist_core::{DensityMatrix, Permutation, ProbVector, PureState};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_prob_vector(rng: &mut ChaCha8Rng, dim: usize) -> ProbVector {
    let raw: Vec<f64> = (0..dim).map(|_| rng.random_range(0.01..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    ProbVector::new(raw.into_iter().map(|x| x / sum).collect(), 1e-9).unwrap()
}

pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(0.05..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    PureState::new(amps.into_iter().map(|c| c / norm).collect(), 1e-9).unwrap()
}

/// Block-diagonal state of pure fragments on consecutive ranges, scrambled by
/// a random relabeling.
pub fn scrambled_block_state(rng: &mut ChaCha8Rng, block_dims: &[usize]) -> DensityMatrix {
    let total: usize = block_dims.iter().sum();
    let mut weights: Vec<f64> = block_dims
        .iter()
        .map(|_| rng.random_range(0.1..1.0))
        .collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    let mut parts = Vec::new();
    let mut offset = 0;
    for (&bd, &w) in block_dims.iter().zip(&weights) {
        let local = random_pure(rng, bd);
        let mut amps = vec![Complex64::ZERO; total];
        for (k, &a) in local.amplitudes().iter().enumerate() {
            amps[offset + k] = a;
        }
        parts.push((
            w,
            DensityMatrix::from_pure(&PureState::new(amps, 1e-9).unwrap()),
        ));
        offset += bd;
    }
    let mut image: Vec<usize> = (0..total).collect();
    for i in (1..total).rev() {
        let j = rng.random_range(0..=i);
        image.swap(i, j);
    }
    DensityMatrix::mixture(&parts).permute(&Permutation::new(image).unwrap())
}

/// A pure target majorizing `base`: mixes in a point mass.
pub fn concentrated_target(base: &ProbVector, concentration: f64) -> PureState {
    let sorted = cohdist_core::sort_desc(base);
    let mut probs: Vec<f64> = sorted
        .entries()
        .iter()
        .map(|&p| (1.0 - concentration) * p)
        .collect();
    probs[0] += concentration;
    PureState::from_probs(&probs)
}
