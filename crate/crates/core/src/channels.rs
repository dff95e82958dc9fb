//! Strictly incoherent channels: validation, application, synthesis.
//!
//! A Kraus operator is strictly incoherent when every row and every column
//! holds at most one nonzero entry; both the operator and its adjoint then
//! map diagonal states to diagonal states. Such an operator factors into a
//! permutation, a diagonal, and a projector, and products of strictly
//! incoherent operators stay strictly incoherent.
//!
//! Synthesis of a deterministic pure-to-pure conversion works in the sorted
//! frame of both states. A staircase of two-level mass transfers carries the
//! target distribution onto the source distribution and accumulates a doubly
//! stochastic matrix; decomposing that matrix into permutations yields one
//! branch per permutation, each a permutation-times-diagonal Kraus operator
//! sending the source state exactly onto the target. Sorting permutations
//! and phase diagonals are folded into each branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distillation::{can_transform_to, candidates};
use crate::error::{Error, Result};
use crate::majorization::{join, majorizes, ProbVector};
use crate::matrix::{ComplexMatrix, DensityMatrix, PureState};

/// Completeness gate for channels: `sum K^dag K = I` must hold within this.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Entries below this count as exact zeros inside the synthesis staircase.
const DECOMPOSITION_EPS: f64 = 1e-13;

/// True iff every row and every column of `m` has at most one entry with
/// modulus above `tol`.
pub fn is_strictly_incoherent(m: &ComplexMatrix, tol: f64) -> bool {
    for i in 0..m.rows() {
        let mut seen = false;
        for j in 0..m.cols() {
            if m[(i, j)].norm() > tol {
                if seen {
                    return false;
                }
                seen = true;
            }
        }
    }
    for j in 0..m.cols() {
        let mut seen = false;
        for i in 0..m.rows() {
            if m[(i, j)].norm() > tol {
                if seen {
                    return false;
                }
                seen = true;
            }
        }
    }
    true
}

/// One branch of a strictly incoherent channel.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator {
    matrix: ComplexMatrix,
}

impl KrausOperator {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !is_strictly_incoherent(&matrix, tol) {
            return Err(Error::NotStrictlyIncoherent {
                detail: "a row or column carries more than one nonzero entry".into(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// A strictly incoherent channel: a nonempty Kraus list with common
/// dimensions satisfying the completeness relation within
/// [`COMPLETENESS_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct SIOChannel {
    kraus: Vec<KrausOperator>,
}

impl SIOChannel {
    pub fn new(kraus: Vec<KrausOperator>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::EmptyChannel);
        };
        let (din, dout) = (first.input_dim(), first.output_dim());
        for k in &kraus {
            if k.input_dim() != din || k.output_dim() != dout {
                return Err(Error::DimensionMismatch {
                    expected: din,
                    got: k.input_dim(),
                });
            }
        }
        let channel = Self { kraus };
        let deviation = channel.completeness_deviation();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteChannel { deviation });
        }
        Ok(channel)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![KrausOperator {
                matrix: ComplexMatrix::identity(dim),
            }],
        }
    }

    /// The channel that zeroes all off-diagonal entries: branches `|i><i|`.
    pub fn dephasing(dim: usize) -> Self {
        let kraus = (0..dim)
            .map(|i| {
                let mut m = ComplexMatrix::zeros(dim, dim);
                m[(i, i)] = Complex64::ONE;
                KrausOperator { matrix: m }
            })
            .collect();
        Self { kraus }
    }

    pub fn kraus(&self) -> &[KrausOperator] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].output_dim()
    }

    /// Largest deviation of `sum K^dag K` from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        let din = self.input_dim();
        let mut acc = ComplexMatrix::zeros(din, din);
        for k in &self.kraus {
            acc.add_assign(&k.matrix.adjoint().mul(&k.matrix));
        }
        let mut deviation = 0.0f64;
        for i in 0..din {
            for j in 0..din {
                let expected = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                deviation = deviation.max((acc[(i, j)] - expected).norm());
            }
        }
        deviation
    }

    /// Applies the channel: `sum K rho K^dag`, validated as a density matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: rho.dim(),
            });
        }
        let dout = self.output_dim();
        let mut acc = ComplexMatrix::zeros(dout, dout);
        for k in &self.kraus {
            let stage = k.matrix.mul(rho.matrix()).mul(&k.matrix.adjoint());
            acc.add_assign(&stage);
        }
        DensityMatrix::validate(acc, crate::majorization::DEFAULT_TOL)
    }

    /// Branch-by-branch composition `outer ∘ inner`; all-zero products are
    /// dropped and completeness re-verified.
    pub fn compose(outer: &SIOChannel, inner: &SIOChannel, tol: f64) -> Result<SIOChannel> {
        if inner.output_dim() != outer.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: outer.input_dim(),
                got: inner.output_dim(),
            });
        }
        let mut kraus = Vec::with_capacity(outer.kraus.len() * inner.kraus.len());
        for ko in &outer.kraus {
            for ki in &inner.kraus {
                let product = ko.matrix.mul(&ki.matrix);
                if product.max_abs() > tol {
                    kraus.push(KrausOperator::new(product, tol)?);
                }
            }
        }
        SIOChannel::new(kraus)
    }

    pub fn to_json(&self) -> String {
        let files: Vec<KrausFile> = self
            .kraus
            .iter()
            .map(|k| {
                assert!(
                    k.matrix.is_square(),
                    "channel export expects square Kraus operators"
                );
                KrausFile {
                    dim: k.matrix.rows(),
                    matrix: (0..k.matrix.rows())
                        .map(|i| {
                            (0..k.matrix.cols())
                                .map(|j| [k.matrix[(i, j)].re, k.matrix[(i, j)].im])
                                .collect()
                        })
                        .collect(),
                }
            })
            .collect();
        serde_json::to_string(&files).expect("channel serialization cannot fail")
    }

    pub fn parse_json(text: &str, tol: f64) -> Result<Self> {
        let files: Vec<KrausFile> = serde_json::from_str(text)?;
        let mut kraus = Vec::with_capacity(files.len());
        for file in files {
            if file.matrix.len() != file.dim || file.matrix.iter().any(|r| r.len() != file.dim) {
                return Err(Error::Parse {
                    detail: format!(
                        "Kraus matrix shape does not match declared dim = {}",
                        file.dim
                    ),
                });
            }
            let mut m = ComplexMatrix::zeros(file.dim, file.dim);
            for (i, row) in file.matrix.iter().enumerate() {
                for (j, &[re, im]) in row.iter().enumerate() {
                    m[(i, j)] = Complex64::new(re, im);
                }
            }
            kraus.push(KrausOperator::new(m, tol)?);
        }
        SIOChannel::new(kraus)
    }
}

#[derive(Serialize, Deserialize)]
struct KrausFile {
    dim: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Descending rearrangement of a weight vector with both direction maps.
struct SortedFrame {
    /// `order[s]` is the original level sitting at sorted position `s`.
    order: Vec<usize>,
    /// `position[level]` is the sorted position of an original level.
    position: Vec<usize>,
    /// Weights in nonincreasing order.
    probs: Vec<f64>,
}

fn sorted_frame(weights: &[f64]) -> SortedFrame {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&x, &y| weights[y].total_cmp(&weights[x]).then(x.cmp(&y)));
    let mut position = vec![0; weights.len()];
    for (s, &level) in order.iter().enumerate() {
        position[level] = s;
    }
    let probs = order.iter().map(|&level| weights[level]).collect();
    SortedFrame {
        order,
        position,
        probs,
    }
}

/// Two-level transfer staircase: carries the sorted target distribution `q`
/// onto the sorted source distribution `a` (with `a ≺ q`) and accumulates
/// the product of the two-level mixing steps, a doubly stochastic matrix `D`
/// with `D q = a`.
///
/// Each step picks the largest index still holding surplus and the first
/// deficit behind it, moves the smaller imbalance, and pins one coordinate
/// exactly; at most one step per coordinate is needed.
fn transfer_staircase(q: &[f64], a: &[f64]) -> Vec<f64> {
    let d = q.len();
    let mut dmat = vec![0.0f64; d * d];
    for i in 0..d {
        dmat[i * d + i] = 1.0;
    }
    let mut cur = q.to_vec();
    let mut steps = 0;
    while let Some((j, k)) = find_transfer_pair(&cur, a) {
        let surplus = cur[j] - a[j];
        let deficit = a[k] - cur[k];
        let delta = surplus.min(deficit);
        let gap = cur[j] - cur[k];
        debug_assert!(gap > 0.0);
        let t = 1.0 - delta / gap;
        for col in 0..d {
            let row_j = dmat[j * d + col];
            let row_k = dmat[k * d + col];
            dmat[j * d + col] = t * row_j + (1.0 - t) * row_k;
            dmat[k * d + col] = (1.0 - t) * row_j + t * row_k;
        }
        // Pin the exhausted side exactly so it can never be selected again.
        if surplus <= deficit {
            cur[j] = a[j];
            cur[k] += delta;
        } else {
            cur[k] = a[k];
            cur[j] -= delta;
        }
        steps += 1;
        assert!(
            steps <= d * d,
            "transfer staircase exceeded {} steps",
            d * d
        );
    }
    let residual: f64 = cur.iter().zip(a).map(|(c, t)| (c - t).abs()).sum();
    assert!(
        residual <= 1e-9,
        "transfer staircase left residual {residual:.3e}"
    );
    dmat
}

/// Largest surplus index with a deficit somewhere behind it, if any pair with
/// float-visible imbalance remains.
fn find_transfer_pair(cur: &[f64], a: &[f64]) -> Option<(usize, usize)> {
    let d = cur.len();
    for j in (0..d).rev() {
        if cur[j] > a[j] {
            if let Some(k) = ((j + 1)..d).find(|&i| cur[i] < a[i]) {
                return Some((j, k));
            }
        }
    }
    None
}

/// Decomposes a doubly stochastic matrix into a convex combination of
/// permutations; `perm[i]` is the column matched to row `i`. Weights are
/// renormalized to sum to one.
fn permutation_decomposition(mut dmat: Vec<f64>, d: usize) -> Vec<(f64, Vec<usize>)> {
    let mut terms: Vec<(f64, Vec<usize>)> = Vec::new();
    let cap = d * d + d;
    for _ in 0..cap {
        let adjacency: Vec<Vec<usize>> = (0..d)
            .map(|i| {
                (0..d)
                    .filter(|&j| dmat[i * d + j] > DECOMPOSITION_EPS)
                    .collect()
            })
            .collect();
        let Some(matching) = perfect_matching(&adjacency, d) else {
            break;
        };
        let weight = matching
            .iter()
            .enumerate()
            .map(|(i, &j)| dmat[i * d + j])
            .fold(f64::INFINITY, f64::min);
        for (i, &j) in matching.iter().enumerate() {
            dmat[i * d + j] = (dmat[i * d + j] - weight).max(0.0);
        }
        terms.push((weight, matching));
        let remaining: f64 = dmat.iter().sum();
        if remaining <= DECOMPOSITION_EPS * d as f64 {
            break;
        }
    }
    let total: f64 = terms.iter().map(|(w, _)| w).sum();
    assert!(total > 0.5, "degenerate permutation decomposition");
    for (w, _) in &mut terms {
        *w /= total;
    }
    terms
}

/// Kuhn's augmenting-path bipartite matching over the support pattern.
fn perfect_matching(adjacency: &[Vec<usize>], d: usize) -> Option<Vec<usize>> {
    fn augment(
        row: usize,
        adjacency: &[Vec<usize>],
        visited: &mut [bool],
        col_owner: &mut [Option<usize>],
    ) -> bool {
        for &col in &adjacency[row] {
            if visited[col] {
                continue;
            }
            visited[col] = true;
            let free = match col_owner[col] {
                None => true,
                Some(owner) => augment(owner, adjacency, visited, col_owner),
            };
            if free {
                col_owner[col] = Some(row);
                return true;
            }
        }
        false
    }

    let mut col_owner: Vec<Option<usize>> = vec![None; d];
    for row in 0..d {
        let mut visited = vec![false; d];
        if !augment(row, adjacency, &mut visited, &mut col_owner) {
            return None;
        }
    }
    let mut matching = vec![0; d];
    for (col, owner) in col_owner.iter().enumerate() {
        matching[owner.expect("complete matching")] = col;
    }
    Some(matching)
}

fn unit_phase(z: Complex64) -> Complex64 {
    let n = z.norm();
    if n > 0.0 {
        z / n
    } else {
        Complex64::ONE
    }
}

/// Clamps negative dust and rescales so the entries sum to one.
fn exact_distribution(entries: &[f64]) -> Vec<f64> {
    let clamped: Vec<f64> = entries.iter().map(|&x| x.max(0.0)).collect();
    let sum: f64 = clamped.iter().sum();
    clamped.into_iter().map(|x| x / sum).collect()
}

/// Synthesizes a strictly incoherent channel sending the pure state `psi`
/// exactly onto the pure state `phi`, feasible precisely when
/// `dephase(psi) ≺ dephase(phi)`.
///
/// Every branch is a permutation-times-diagonal operator with
/// `K psi = sqrt(w) e^{i theta} phi`; branch phases are normalized so the
/// first occupied amplitude of each branch output is real positive. Branches
/// with all entries below `tol` are dropped and completeness is re-verified.
pub fn synthesize_pure_to_pure(psi: &PureState, phi: &PureState, tol: f64) -> Result<SIOChannel> {
    let d = psi.dim().max(phi.dim());
    let psi = psi.padded(d);
    let phi = phi.padded(d);
    let source = psi.dephase();
    let target = phi.dephase();
    if !majorizes(&target, &source, tol) {
        return Err(Error::NotMajorized);
    }

    // Normalize away sum drift (fragment states are only pure to within
    // their purity tolerance), then run the staircase against the join of
    // source and target. The join equals the target bitwise whenever the
    // majorization holds exactly, and otherwise is the nearest dominating
    // distribution, so the staircase always converges.
    let a_probs = exact_distribution(source.entries());
    let frame_a = sorted_frame(&a_probs);
    let frame_q = sorted_frame(&exact_distribution(target.entries()));
    let effective = join(&[
        ProbVector::from_raw(a_probs),
        ProbVector::from_raw(frame_q.probs.clone()),
    ]);
    let q_probs = effective.entries();
    let dmat = transfer_staircase(q_probs, &frame_a.probs);
    let terms = permutation_decomposition(dmat, d);

    // Re-derive the source distribution actually represented by the
    // decomposition; normalizing columns against it keeps the completeness
    // relation exact even when the staircase leaves float residue.
    let mut represented = vec![0.0f64; d];
    for (w, perm) in &terms {
        for s in 0..d {
            represented[s] += w * q_probs[perm[s]];
        }
    }

    let anchor = phi
        .amplitudes()
        .iter()
        .position(|c| c.norm() > tol)
        .unwrap_or(0);
    let anchor_phase = unit_phase(phi.amplitude(anchor)).conj();

    let mut kraus = Vec::with_capacity(terms.len());
    for (w, perm) in &terms {
        let mut m = ComplexMatrix::zeros(d, d);
        for level in 0..d {
            let s = frame_a.position[level];
            let t = perm[s];
            let out_level = frame_q.order[t];
            let magnitude = if represented[s] > 0.0 {
                (w * q_probs[t] / represented[s]).sqrt()
            } else {
                w.sqrt()
            };
            if magnitude == 0.0 {
                continue;
            }
            let phase = unit_phase(phi.amplitude(out_level))
                * anchor_phase
                * unit_phase(psi.amplitude(level)).conj();
            m[(out_level, level)] = phase * magnitude;
        }
        if m.max_abs() > tol {
            kraus.push(KrausOperator::new(m, tol)?);
        }
    }
    SIOChannel::new(kraus)
}

/// Assembles the end-to-end channel converting `rho` into the pure state
/// `phi`: a direct sum over the canonical projector partition of per-fragment
/// channels routed to the target, each branch zeroed outside its fragment's
/// support, plus collapse branches carrying the unsupported levels onto the
/// target's first occupied level.
pub fn assemble_distillation_channel(
    rho: &DensityMatrix,
    phi: &PureState,
    tol: f64,
) -> Result<SIOChannel> {
    let verdict = can_transform_to(rho, phi, tol)?;
    if !verdict.feasible {
        return Err(Error::NotTransformable);
    }
    let d = rho.dim().max(phi.dim());
    let rho = rho.embedded(d);
    let phi = phi.padded(d);
    let anchor = phi
        .amplitudes()
        .iter()
        .position(|c| c.norm() > tol)
        .unwrap_or(0);

    let collapse = |level: usize| {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(anchor, level)] = Complex64::ONE;
        KrausOperator { matrix: m }
    };

    if phi.support_size(tol) <= 1 {
        return SIOChannel::new((0..d).map(collapse).collect());
    }

    let set = candidates(&rho, tol)?;
    let mut kraus = Vec::new();
    let mut covered = vec![false; d];
    for candidate in &set.entries {
        let fragment = synthesize_pure_to_pure(&candidate.state, &phi, tol)?;
        for branch in fragment.kraus() {
            // K (+) 0: keep only the columns inside this fragment's support.
            let mut restricted = ComplexMatrix::zeros(d, d);
            for &col in candidate.projector.indices() {
                for row in 0..d {
                    restricted[(row, col)] = branch.matrix()[(row, col)];
                }
            }
            if restricted.max_abs() > tol {
                kraus.push(KrausOperator::new(restricted, tol)?);
            }
        }
        for &i in candidate.projector.indices() {
            covered[i] = true;
        }
    }
    for (level, &is_covered) in covered.iter().enumerate() {
        if !is_covered {
            kraus.push(collapse(level));
        }
    }
    SIOChannel::new(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::DEFAULT_TOL;
    use crate::matrix::Permutation;

    fn assert_state_close(a: &DensityMatrix, b: &DensityMatrix, tol: f64) {
        assert!(
            a.matrix().frobenius_distance(b.matrix()) <= tol,
            "states differ by {}",
            a.matrix().frobenius_distance(b.matrix())
        );
    }

    #[test]
    fn strict_incoherence_examples() {
        let diag = ComplexMatrix::from_real_rows(&[&[0.3, 0.0], &[0.0, 0.7]]);
        assert!(is_strictly_incoherent(&diag, DEFAULT_TOL));

        let bad = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!(!is_strictly_incoherent(&bad, DEFAULT_TOL));

        let perm = Permutation::new(vec![2, 0, 1]).unwrap().to_matrix();
        assert!(is_strictly_incoherent(&perm, DEFAULT_TOL));
    }

    #[test]
    fn identity_channel_is_a_no_op() {
        let rho = DensityMatrix::from_pure(&PureState::from_probs(&[0.6, 0.4]));
        let out = SIOChannel::identity(2).apply(&rho).unwrap();
        assert_state_close(&out, &rho, 1e-12);
    }

    #[test]
    fn dephasing_channel_diagonalizes() {
        let rho = DensityMatrix::from_pure(&PureState::from_probs(&[0.6, 0.4]));
        let out = SIOChannel::dephasing(2).apply(&rho).unwrap();
        assert!((out.entry(0, 0).re - 0.6).abs() < 1e-12);
        assert!(out.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn two_branch_collapse_of_plus_state() {
        let k1 = KrausOperator::new(
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]),
            DEFAULT_TOL,
        )
        .unwrap();
        let k2 = KrausOperator::new(
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
            DEFAULT_TOL,
        )
        .unwrap();
        let channel = SIOChannel::new(vec![k1, k2]).unwrap();
        let plus = DensityMatrix::from_pure(&PureState::maximally_coherent(2));
        let out = channel.apply(&plus).unwrap();
        assert!((out.entry(0, 0).re - 1.0).abs() < 1e-12);
        assert!(out.entry(1, 1).norm() < 1e-12);
    }

    #[test]
    fn channel_construction_rejects_incomplete_sets() {
        let half = KrausOperator::new(
            ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.5]]),
            DEFAULT_TOL,
        )
        .unwrap();
        match SIOChannel::new(vec![half]) {
            Err(Error::IncompleteChannel { .. }) => {}
            other => panic!("expected IncompleteChannel, got {other:?}"),
        }
    }

    #[test]
    fn synthesize_identity_conversion() {
        let psi = PureState::from_probs(&[0.6, 0.4]);
        let channel = synthesize_pure_to_pure(&psi, &psi, DEFAULT_TOL).unwrap();
        assert_eq!(channel.kraus().len(), 1);
        let out = channel.apply(&DensityMatrix::from_pure(&psi)).unwrap();
        assert_state_close(&out, &DensityMatrix::from_pure(&psi), 1e-12);
    }

    #[test]
    fn synthesize_plus_to_basis_state() {
        let plus = PureState::maximally_coherent(2);
        let zero = PureState::basis_state(2, 0);
        let channel = synthesize_pure_to_pure(&plus, &zero, DEFAULT_TOL).unwrap();
        assert_eq!(channel.kraus().len(), 2);
        // The two branches are diag(1,0) and the swap-collapse [[0,1],[0,0]].
        let mut diag_seen = false;
        let mut swap_seen = false;
        for k in channel.kraus() {
            let m = k.matrix();
            if (m[(0, 0)].norm() - 1.0).abs() < 1e-12 && m[(0, 1)].norm() < 1e-12 {
                diag_seen = true;
            }
            if (m[(0, 1)].norm() - 1.0).abs() < 1e-12 && m[(0, 0)].norm() < 1e-12 {
                swap_seen = true;
            }
        }
        assert!(diag_seen && swap_seen);
        let out = channel.apply(&DensityMatrix::from_pure(&plus)).unwrap();
        assert_state_close(&out, &DensityMatrix::from_pure(&zero), 1e-12);
    }

    #[test]
    fn synthesize_three_level_conversion() {
        let psi = PureState::from_probs(&[0.5, 0.3, 0.2]);
        let phi = PureState::from_probs(&[0.6, 0.4, 0.0]);
        let channel = synthesize_pure_to_pure(&psi, &phi, DEFAULT_TOL).unwrap();
        let out = channel.apply(&DensityMatrix::from_pure(&psi)).unwrap();
        assert_state_close(&out, &DensityMatrix::from_pure(&phi), 1e-9);
    }

    #[test]
    fn synthesize_accepts_tolerance_edge_pairs() {
        // Feasible only through the tolerance tie: the source's top weight
        // exceeds the target's by half a tolerance.
        let drift: f64 = 5e-10;
        let psi = PureState::new(
            vec![
                Complex64::new((0.5 + drift).sqrt(), 0.0),
                Complex64::new((0.5 - drift).sqrt(), 0.0),
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let phi = PureState::maximally_coherent(2);
        let channel = synthesize_pure_to_pure(&psi, &phi, DEFAULT_TOL).unwrap();
        assert!(channel.completeness_deviation() <= 1e-9);
        let out = channel.apply(&DensityMatrix::from_pure(&psi)).unwrap();
        assert_state_close(&out, &DensityMatrix::from_pure(&phi), 1e-8);
    }

    #[test]
    fn synthesize_rejects_infeasible_pairs() {
        let psi = PureState::from_probs(&[0.6, 0.4]);
        let phi = PureState::from_probs(&[0.5, 0.5]);
        match synthesize_pure_to_pure(&psi, &phi, DEFAULT_TOL) {
            Err(Error::NotMajorized) => {}
            other => panic!("expected NotMajorized, got {other:?}"),
        }
    }

    #[test]
    fn synthesize_handles_phases_and_unsorted_amplitudes() {
        let psi = PureState::new(
            vec![
                Complex64::new(0.0, 0.3f64.sqrt()),
                Complex64::new(-(0.5f64.sqrt()), 0.0),
                Complex64::new(0.2f64.sqrt(), 0.0),
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let phi = PureState::new(
            vec![
                Complex64::new(0.0, -(0.4f64.sqrt())),
                Complex64::new(0.6f64.sqrt(), 0.0),
                Complex64::ZERO,
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let channel = synthesize_pure_to_pure(&psi, &phi, DEFAULT_TOL).unwrap();
        let out = channel.apply(&DensityMatrix::from_pure(&psi)).unwrap();
        assert_state_close(&out, &DensityMatrix::from_pure(&phi), 1e-9);
    }

    #[test]
    fn synthesized_branches_are_proportional_to_target() {
        let psi = PureState::new(
            vec![
                Complex64::from_polar(0.4f64.sqrt(), 0.3),
                Complex64::from_polar(0.3f64.sqrt(), -1.1),
                Complex64::new(0.2f64.sqrt(), 0.0),
                Complex64::new(0.1f64.sqrt(), 0.0),
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let phi = PureState::new(
            vec![
                Complex64::from_polar(0.55f64.sqrt(), 2.0),
                Complex64::from_polar(0.25f64.sqrt(), 0.7),
                Complex64::new(0.2f64.sqrt(), 0.0),
                Complex64::ZERO,
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let channel = synthesize_pure_to_pure(&psi, &phi, DEFAULT_TOL).unwrap();
        for k in channel.kraus() {
            let mut out = vec![Complex64::ZERO; 4];
            for (i, slot) in out.iter_mut().enumerate() {
                for j in 0..4 {
                    *slot += k.matrix()[(i, j)] * psi.amplitude(j);
                }
            }
            // Best branch factor sqrt(w) e^{i theta} is <phi|out> since phi
            // is normalized.
            let factor: Complex64 = phi
                .amplitudes()
                .iter()
                .zip(&out)
                .map(|(f, o)| f.conj() * o)
                .sum();
            let distance: f64 = out
                .iter()
                .zip(phi.amplitudes())
                .map(|(o, f)| (o - f * factor).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(distance <= 1e-8, "branch strays {distance}");
        }
    }

    #[test]
    fn assemble_identity_case() {
        let psi = PureState::from_probs(&[0.7, 0.3]);
        let rho = DensityMatrix::from_pure(&psi);
        let channel = assemble_distillation_channel(&rho, &psi, DEFAULT_TOL).unwrap();
        let out = channel.apply(&rho).unwrap();
        assert_state_close(&out, &rho, 1e-9);
    }

    #[test]
    fn assemble_block_pair_conversion() {
        let phi1 = PureState::from_probs(&[0.8, 0.2, 0.0, 0.0]);
        let phi2 = PureState::from_probs(&[0.0, 0.0, 0.7, 0.3]);
        let rho = DensityMatrix::mixture(&[
            (0.5, DensityMatrix::from_pure(&phi1)),
            (0.5, DensityMatrix::from_pure(&phi2)),
        ]);
        let target = PureState::from_probs(&[0.85, 0.15, 0.0, 0.0]);
        let channel = assemble_distillation_channel(&rho, &target, DEFAULT_TOL).unwrap();
        let out = channel.apply(&rho).unwrap();
        assert_state_close(&out, &DensityMatrix::from_pure(&target), 1e-9);
    }

    #[test]
    fn assemble_two_copies_to_one_pair() {
        let plus = DensityMatrix::from_pure(&PureState::maximally_coherent(2));
        let rho = plus.tensor(&plus);
        let target = PureState::from_probs(&[0.5, 0.5, 0.0, 0.0]);
        let channel = assemble_distillation_channel(&rho, &target, DEFAULT_TOL).unwrap();
        let out = channel.apply(&rho).unwrap();
        assert_state_close(&out, &DensityMatrix::from_pure(&target), 1e-9);
    }

    #[test]
    fn assemble_collapse_to_incoherent_target() {
        let rho = DensityMatrix::mixture(&[
            (
                0.5,
                DensityMatrix::from_pure(&PureState::from_probs(&[0.5, 0.5, 0.0])),
            ),
            (0.5, DensityMatrix::from_pure(&PureState::basis_state(3, 2))),
        ]);
        let channel =
            assemble_distillation_channel(&rho, &PureState::basis_state(3, 0), DEFAULT_TOL)
                .unwrap();
        let out = channel.apply(&rho).unwrap();
        assert_state_close(
            &out,
            &DensityMatrix::from_pure(&PureState::basis_state(3, 0)),
            1e-12,
        );
    }

    #[test]
    fn assemble_rejects_infeasible_target() {
        let phi1 = PureState::from_probs(&[0.8, 0.2, 0.0, 0.0]);
        let phi2 = PureState::from_probs(&[0.0, 0.0, 0.7, 0.3]);
        let rho = DensityMatrix::mixture(&[
            (0.5, DensityMatrix::from_pure(&phi1)),
            (0.5, DensityMatrix::from_pure(&phi2)),
        ]);
        let target = PureState::from_probs(&[0.75, 0.25, 0.0, 0.0]);
        match assemble_distillation_channel(&rho, &target, DEFAULT_TOL) {
            Err(Error::NotTransformable) => {}
            other => panic!("expected NotTransformable, got {other:?}"),
        }
    }

    #[test]
    fn composition_stays_strictly_incoherent_and_complete() {
        let a = synthesize_pure_to_pure(
            &PureState::from_probs(&[0.5, 0.3, 0.2]),
            &PureState::from_probs(&[0.6, 0.4, 0.0]),
            DEFAULT_TOL,
        )
        .unwrap();
        let b = synthesize_pure_to_pure(
            &PureState::from_probs(&[0.6, 0.4, 0.0]),
            &PureState::from_probs(&[0.9, 0.1, 0.0]),
            DEFAULT_TOL,
        )
        .unwrap();
        let composed = SIOChannel::compose(&b, &a, DEFAULT_TOL).unwrap();
        assert!(composed.completeness_deviation() < 1e-9);
        for k in composed.kraus() {
            assert!(is_strictly_incoherent(k.matrix(), DEFAULT_TOL));
        }
        let rho = DensityMatrix::from_pure(&PureState::from_probs(&[0.5, 0.3, 0.2]));
        let out = composed.apply(&rho).unwrap();
        let want = DensityMatrix::from_pure(&PureState::from_probs(&[0.9, 0.1, 0.0]));
        assert_state_close(&out, &want, 1e-9);
    }

    #[test]
    fn apply_preserves_trace_and_incoherence() {
        let channel = synthesize_pure_to_pure(
            &PureState::from_probs(&[0.4, 0.3, 0.3]),
            &PureState::from_probs(&[0.5, 0.5, 0.0]),
            DEFAULT_TOL,
        )
        .unwrap();
        let diag = DensityMatrix::mixture(&[
            (0.2, DensityMatrix::from_pure(&PureState::basis_state(3, 0))),
            (0.5, DensityMatrix::from_pure(&PureState::basis_state(3, 1))),
            (0.3, DensityMatrix::from_pure(&PureState::basis_state(3, 2))),
        ]);
        let out = channel.apply(&diag).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(out.entry(i, j).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn channel_json_round_trip() {
        let channel = synthesize_pure_to_pure(
            &PureState::from_probs(&[0.5, 0.3, 0.2]),
            &PureState::from_probs(&[0.6, 0.4, 0.0]),
            DEFAULT_TOL,
        )
        .unwrap();
        let text = channel.to_json();
        let back = SIOChannel::parse_json(&text, DEFAULT_TOL).unwrap();
        assert_eq!(back, channel);
        assert_eq!(back.to_json(), text);
    }
}
