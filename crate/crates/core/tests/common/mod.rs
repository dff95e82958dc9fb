//! Shared generators and independent oracles for the integration suites.

#![allow(dead_code)]

use cohdist_core::{support_graph, DensityMatrix, Permutation, ProbVector, PureState, DEFAULT_TOL};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-2 {
            continue;
        }
        let amps = amps.into_iter().map(|c| c / norm).collect();
        return PureState::new(amps, 1e-9).expect("normalized amplitudes");
    }
}

/// A pure state whose every level carries at least `min_weight` probability.
pub fn random_pure_min_weight(rng: &mut ChaCha8Rng, dim: usize, min_weight: f64) -> PureState {
    assert!(
        min_weight * (dim as f64) < 1.0,
        "min weight must be feasible"
    );
    loop {
        let state = random_pure(rng, dim);
        if state.dephase().entries().iter().all(|&p| p >= min_weight) {
            return state;
        }
    }
}

pub fn random_prob_vector(rng: &mut ChaCha8Rng, dim: usize) -> ProbVector {
    let raw: Vec<f64> = (0..dim).map(|_| rng.random_range(0.01..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    ProbVector::new(raw.into_iter().map(|x| x / sum).collect(), 1e-9).expect("normalized entries")
}

pub fn random_permutation(rng: &mut ChaCha8Rng, dim: usize) -> Permutation {
    let mut image: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        let j = rng.random_range(0..=i);
        image.swap(i, j);
    }
    Permutation::new(image).expect("shuffled bijection")
}

/// A mixture of `rank` full-support pure states with an irreducible support
/// graph (resampled until connectivity holds).
pub fn random_irreducible_mixture(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> DensityMatrix {
    loop {
        let mut parts = Vec::with_capacity(rank);
        for _ in 0..rank {
            let w = rng.random_range(0.2..1.0);
            parts.push((
                w,
                DensityMatrix::from_pure(&random_pure_min_weight(rng, dim, 0.02 / dim as f64)),
            ));
        }
        let rho = DensityMatrix::mixture(&parts);
        let graph = support_graph(&rho, DEFAULT_TOL);
        if graph.components().len() == 1 && graph.support_indices().len() == dim {
            return rho;
        }
    }
}

/// A block-diagonal state with the given pure blocks placed on consecutive
/// index ranges, then scrambled by a random permutation. Returns the
/// scrambled state, the permutation, and the block states with weights.
pub fn random_scrambled_pure_blocks(
    rng: &mut ChaCha8Rng,
    block_dims: &[usize],
    null_dims: usize,
) -> (DensityMatrix, Permutation, Vec<(f64, PureState)>) {
    let total: usize = block_dims.iter().sum::<usize>() + null_dims;
    let mut weights: Vec<f64> = block_dims
        .iter()
        .map(|_| rng.random_range(0.1..1.0))
        .collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }

    let mut parts = Vec::new();
    let mut blocks = Vec::new();
    let mut offset = 0;
    for (&bd, &w) in block_dims.iter().zip(&weights) {
        let local = random_pure_min_weight(rng, bd, 0.05 / bd as f64);
        let mut amps = vec![Complex64::ZERO; total];
        for (k, &a) in local.amplitudes().iter().enumerate() {
            amps[offset + k] = a;
        }
        let embedded = PureState::new(amps, 1e-9).expect("embedded pure state");
        parts.push((w, DensityMatrix::from_pure(&embedded)));
        blocks.push((w, local));
        offset += bd;
    }
    let block_diagonal = DensityMatrix::mixture(&parts);
    let perm = random_permutation(rng, total);
    (block_diagonal.permute(&perm), perm, blocks)
}

/// A pure target whose dephasing majorizes `base`: mixes a point mass into
/// the distribution, then hides the result behind random phases and a random
/// level relabeling.
pub fn random_feasible_target(
    rng: &mut ChaCha8Rng,
    base: &ProbVector,
    concentration: f64,
) -> PureState {
    let dim = base.dim();
    let sorted = cohdist_core::sort_desc(base);
    let mut probs: Vec<f64> = sorted
        .entries()
        .iter()
        .map(|&p| (1.0 - concentration) * p)
        .collect();
    probs[0] += concentration;
    let perm = random_permutation(rng, dim);
    let mut amps = vec![Complex64::ZERO; dim];
    for (k, &p) in probs.iter().enumerate() {
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        amps[perm.apply(k)] = Complex64::from_polar(p.sqrt(), phase);
    }
    PureState::new(amps, 1e-9).expect("normalized target")
}

/// Least concave majorant of the piecewise-linear curve through
/// `(0, 0), (1, c_1), ..., (d, c_d)`, evaluated at the integer abscissae
/// `1..=d`. Upper convex hull by monotone chain; independent of the lattice
/// implementation.
pub fn least_concave_majorant(partial_sums: &[f64]) -> Vec<f64> {
    let d = partial_sums.len();
    let mut ys = Vec::with_capacity(d + 1);
    ys.push(0.0);
    ys.extend_from_slice(partial_sums);

    let mut hull: Vec<usize> = Vec::new();
    for i in 0..=d {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Pop b when it lies on or below the chord a -> i.
            let cross = (b - a) as f64 * (ys[i] - ys[a]) - (i - a) as f64 * (ys[b] - ys[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }

    let mut values = Vec::with_capacity(d);
    let mut segment = 0;
    for k in 1..=d {
        while hull[segment + 1] < k {
            segment += 1;
        }
        let (x0, x1) = (hull[segment], hull[segment + 1]);
        let t = (k - x0) as f64 / (x1 - x0) as f64;
        values.push(ys[x0] + t * (ys[x1] - ys[x0]));
    }
    values
}

/// Pointwise maximum of the members' cumulative curves after zero-padding to
/// the common dimension.
pub fn pointwise_max_curve(set: &[ProbVector]) -> Vec<f64> {
    let dim = set.iter().map(ProbVector::dim).max().unwrap();
    let mut max_curve = vec![f64::NEG_INFINITY; dim];
    for p in set {
        let sorted = cohdist_core::sort_desc(&p.padded(dim));
        let mut acc = 0.0;
        for (k, &x) in sorted.entries().iter().enumerate() {
            acc += x;
            max_curve[k] = max_curve[k].max(acc);
        }
    }
    max_curve
}
