//! Purity witnesses: the comparison matrix, its saturated classes, and pure
//! fragment extraction.
//!
//! The comparison matrix rescales moduli by the diagonal,
//! `A[i][j] = |rho[i][j]| / sqrt(rho[i][i] rho[j][j])`. Every entry of `A`
//! equals one exactly when the state is a pure coherent state; an entry of
//! one at `(i, j)` means the 2x2 principal submatrix on `{i, j}` has rank
//! one. For a positive semidefinite state, saturation is pairwise
//! Cauchy-Schwarz equality of Gram vectors and therefore transitive, so the
//! maximal all-ones principal submatrices are the connected components of the
//! saturation graph. The components are still re-verified as cliques to guard
//! against tolerance edge cases.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{DensityMatrix, PureState};

/// The diagonally rescaled modulus matrix of a state. Rows and columns off
/// the support are zero; diagonal entries are one on the support.
#[derive(Debug, Clone)]
pub struct ComparisonMatrix {
    dim: usize,
    entries: Vec<f64>,
    support: Vec<bool>,
}

impl ComparisonMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn on_support(&self, i: usize) -> bool {
        self.support[i]
    }

    pub fn support_indices(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.support[i]).collect()
    }

    /// Smallest off-diagonal entry over support pairs, if any exist.
    pub fn min_off_diagonal(&self) -> Option<f64> {
        let mut min = None;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if self.support[i] && self.support[j] {
                    let v = self.get(i, j);
                    min = Some(min.map_or(v, |m: f64| m.min(v)));
                }
            }
        }
        min
    }

    /// Support pairs with `A[i][j] >= 1 - tol`, ascending.
    pub fn saturated_pairs(&self, tol: f64) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if self.support[i] && self.support[j] && self.get(i, j) >= 1.0 - tol {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }
}

#[cfg(test)]
impl ComparisonMatrix {
    /// Test-only constructor for exercising tolerance edge cases that a
    /// positive semidefinite state cannot produce.
    pub(crate) fn synthetic(dim: usize, entries: Vec<f64>, support: Vec<bool>) -> Self {
        Self {
            dim,
            entries,
            support,
        }
    }
}

/// Builds the comparison matrix of `rho`. Indices with diagonal weight at or
/// below `tol` count as off-support.
pub fn comparison_matrix(rho: &DensityMatrix, tol: f64) -> ComparisonMatrix {
    let d = rho.dim();
    let support: Vec<bool> = (0..d).map(|i| rho.entry(i, i).re > tol).collect();
    let inv_sqrt: Vec<f64> = (0..d)
        .map(|i| {
            if support[i] {
                1.0 / rho.entry(i, i).re.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut entries = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            entries[i * d + j] = if i == j && support[i] {
                1.0
            } else {
                rho.entry(i, j).norm() * inv_sqrt[i] * inv_sqrt[j]
            };
        }
    }
    ComparisonMatrix {
        dim: d,
        entries,
        support,
    }
}

/// A nonempty set of basis indices, the support of an incoherent projector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct IncoherentProjector {
    indices: Vec<usize>,
}

impl IncoherentProjector {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidProjector {
                detail: "projector needs at least one index".into(),
            });
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidProjector {
                detail: "projector indices must be distinct".into(),
            });
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

/// Maximal index sets on which every comparison entry saturates `1 - tol`:
/// connected components of the saturation graph, re-verified as cliques.
/// Support indices outside every nontrivial class come back as singletons;
/// the classes partition the support.
#[allow(clippy::needless_range_loop)] // the scan reads and writes `seen`
pub fn ones_classes(a: &ComparisonMatrix, tol: f64) -> Result<Vec<IncoherentProjector>> {
    let d = a.dim();
    let saturated = |i: usize, j: usize| a.get(i, j) >= 1.0 - tol;

    let mut seen = vec![false; d];
    let mut classes = Vec::new();
    for start in 0..d {
        if !a.on_support(start) || seen[start] {
            continue;
        }
        let mut queue = vec![start];
        let mut class = Vec::new();
        seen[start] = true;
        while let Some(v) = queue.pop() {
            class.push(v);
            for w in 0..d {
                if a.on_support(w) && !seen[w] && saturated(v, w) {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        class.sort_unstable();
        for (pos, &i) in class.iter().enumerate() {
            for &j in &class[pos + 1..] {
                if !saturated(i, j) {
                    return Err(Error::CliqueVerificationFailed {
                        i,
                        j,
                        value: a.get(i, j),
                    });
                }
            }
        }
        classes.push(IncoherentProjector { indices: class });
    }
    Ok(classes)
}

/// Projects `rho` onto the subspace of `proj` and renormalizes, returning the
/// resulting pure state (full dimension, supported on the projector) and the
/// projection weight `Tr(P rho P)`.
///
/// The reference index fixing the global phase is the smallest index in the
/// projector with maximal diagonal weight, so the output is deterministic and
/// its reference amplitude is real positive. Purity of the projected state is
/// enforced to within 1e-9.
pub fn extract_pure(
    rho: &DensityMatrix,
    proj: &IncoherentProjector,
    tol: f64,
) -> Result<(PureState, f64)> {
    let d = rho.dim();
    if let Some(&out_of_range) = proj.indices().iter().find(|&&i| i >= d) {
        return Err(Error::InvalidProjector {
            detail: format!("index {out_of_range} exceeds state dimension {d}"),
        });
    }
    let weight: f64 = proj.indices().iter().map(|&i| rho.entry(i, i).re).sum();
    if weight <= tol {
        return Err(Error::ZeroWeight { weight });
    }

    // Purity of P rho P / w: for a Hermitian block, Tr(M^2) is the squared
    // Frobenius norm.
    let mut frob_sqr = 0.0;
    for &i in proj.indices() {
        for &j in proj.indices() {
            frob_sqr += rho.entry(i, j).norm_sqr();
        }
    }
    let purity = frob_sqr / (weight * weight);
    if (purity - 1.0).abs() > 1e-9 {
        return Err(Error::NotPure {
            purity,
            deviation: (purity - 1.0).abs(),
        });
    }

    let mut reference = proj.indices()[0];
    for &i in proj.indices() {
        if rho.entry(i, i).re > rho.entry(reference, reference).re {
            reference = i;
        }
    }
    let scale = 1.0 / (rho.entry(reference, reference).re * weight).sqrt();
    let mut amplitudes = vec![num_complex::Complex64::ZERO; d];
    for &i in proj.indices() {
        amplitudes[i] = rho.entry(i, reference) * scale;
    }
    let psi = PureState::new(amplitudes, 1e-7).map_err(|_| Error::NotPure {
        purity,
        deviation: (purity - 1.0).abs(),
    })?;
    Ok((psi, weight))
}

/// True when some 2x2 principal submatrix has rank one, witnessed by a
/// saturated off-diagonal comparison entry. A state without any such
/// submatrix is bound: no coherence is distillable from it even
/// asymptotically.
pub fn has_rank_one_submatrix(rho: &DensityMatrix, tol: f64) -> bool {
    let a = comparison_matrix(rho, tol);
    for i in 0..a.dim() {
        for j in (i + 1)..a.dim() {
            if a.on_support(i) && a.on_support(j) && a.get(i, j) >= 1.0 - tol {
                return true;
            }
        }
    }
    false
}
