//! Dense complex matrices, density operators, pure states, and basis
//! permutations in the fixed incoherent reference basis.
//!
//! Storage is dense row-major throughout; the dimensions in play are desk
//! scale and block structure is exploited downstream, not here.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorization::ProbVector;

/// Floor for the positive-semidefiniteness certificate: validation tolerates
/// float input down to this eigenvalue deficit.
pub const PSD_EIGENVALUE_TOL: f64 = 1e-7;

/// Trace deviations up to this bound are renormalized away during validation.
pub const TRACE_NORMALIZATION_TOL: f64 = 1e-6;

/// A dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::Parse {
                detail: "matrix must be nonempty".into(),
            });
        }
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::Parse {
                    detail: format!(
                        "ragged matrix: row of length {} in a {ncols}-column matrix",
                        row.len()
                    ),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    /// Convenience constructor for real-valued test fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let converted = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(converted).expect("real fixture rows must be rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
    }

    /// Kronecker product; basis index `(i1, i2)` maps to `i1 * d2 + i2`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self[(i1, j1)];
                if a == Complex64::ZERO {
                    continue;
                }
                for i2 in 0..rhs.rows {
                    for j2 in 0..rhs.cols {
                        out[(i1 * rhs.rows + i2, j1 * rhs.cols + j2)] = a * rhs[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation from the conjugate transpose, with its position.
    pub fn hermiticity_deviation(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.rows {
            for j in i..self.cols {
                let dev = (self[(i, j)] - self[(j, i)].conj()).norm();
                if dev > worst.2 {
                    worst = (i, j, dev);
                }
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(
                    f,
                    "{}{:.6}{:+.6}i",
                    if j == 0 { "" } else { "  " },
                    z.re,
                    z.im
                )?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    dim: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct PureStateFile {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
}

/// A Hermitian, positive semidefinite, trace-one operator in the reference
/// basis. Construct through [`DensityMatrix::validate`] for untrusted input.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks every density-matrix invariant on a raw matrix: Hermiticity
    /// within `tol`, unit trace (renormalized when the deviation is below
    /// [`TRACE_NORMALIZATION_TOL`]), zero rows and columns wherever the
    /// diagonal vanishes, and a minimum eigenvalue at or above
    /// `-max(tol, PSD_EIGENVALUE_TOL)`.
    pub fn validate(raw: ComplexMatrix, tol: f64) -> Result<Self> {
        if !raw.is_square() {
            return Err(Error::Parse {
                detail: format!(
                    "density matrix must be square, got {}x{}",
                    raw.rows(),
                    raw.cols()
                ),
            });
        }
        let (i, j, dev) = raw.hermiticity_deviation();
        if dev > tol {
            return Err(Error::NotHermitian {
                i,
                j,
                deviation: dev,
            });
        }
        let trace = raw.trace();
        if (trace.re - 1.0).abs() > TRACE_NORMALIZATION_TOL
            || trace.im.abs() > TRACE_NORMALIZATION_TOL
        {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let mat = raw.scaled(Complex64::new(1.0 / trace.re, 0.0));
        let dim = mat.rows();
        for i in 0..dim {
            let diag = mat[(i, i)].re;
            if diag < -tol {
                return Err(Error::NotPsd {
                    detail: format!("diagonal entry {i} = {diag} is negative"),
                });
            }
            if diag <= tol {
                for j in 0..dim {
                    if mat[(i, j)].norm() > tol || mat[(j, i)].norm() > tol {
                        return Err(Error::NotPsd {
                            detail: format!(
                                "diagonal entry {i} vanishes but entry ({i},{j}) = {} does not",
                                mat[(i, j)]
                            ),
                        });
                    }
                }
            }
        }
        let min_eig = hermitian_eigenvalues(&mat)
            .first()
            .copied()
            .unwrap_or(f64::INFINITY);
        if min_eig < -tol.max(PSD_EIGENVALUE_TOL) {
            return Err(Error::NotPsd {
                detail: format!("minimum eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix whose validity is guaranteed by construction (tensor
    /// products, permutations, projections of validated states).
    pub(crate) fn trusted(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.is_square());
        debug_assert!((mat.trace().re - 1.0).abs() < 1e-6);
        Self { mat }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let d = psi.dim();
        let mut mat = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                mat[(i, j)] = psi.amplitude(i) * psi.amplitude(j).conj();
            }
        }
        Self::trusted(mat)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim > 0);
        let mut mat = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            mat[(i, i)] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self::trusted(mat)
    }

    /// Convex mixture of validated states.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Self {
        assert!(!parts.is_empty());
        let dim = parts[0].1.dim();
        let mut mat = ComplexMatrix::zeros(dim, dim);
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        for (w, rho) in parts {
            mat.add_assign(&rho.mat.scaled(Complex64::new(w / total, 0.0)));
        }
        Self::trusted(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    /// Diagonal of the state: the dephasing map's output distribution.
    pub fn dephase(&self) -> ProbVector {
        ProbVector::from_raw((0..self.dim()).map(|i| self.mat[(i, i)].re).collect())
    }

    /// Kronecker product of two states; valid by trace multiplicativity and
    /// closure of positive semidefiniteness.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::trusted(self.mat.kron(&other.mat))
    }

    /// Conjugation by a basis permutation: entries move to
    /// `(P(i), P(j))` without any arithmetic, so a permutation followed by
    /// its inverse reproduces the state bitwise.
    pub fn permute(&self, perm: &Permutation) -> DensityMatrix {
        assert_eq!(perm.dim(), self.dim(), "permutation dimension mismatch");
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(perm.apply(i), perm.apply(j))] = self.mat[(i, j)];
            }
        }
        DensityMatrix::trusted(out)
    }

    /// Embeds into a larger space by zero-padding rows and columns.
    pub fn embedded(&self, dim: usize) -> DensityMatrix {
        assert!(dim >= self.dim());
        if dim == self.dim() {
            return self.clone();
        }
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out[(i, j)] = self.mat[(i, j)];
            }
        }
        DensityMatrix::trusted(out)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    pub fn numerical_rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&e| e > tol).count()
    }

    /// Tr(rho^2); equals one exactly on pure states.
    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += self.mat[(i, j)].norm_sqr();
            }
        }
        acc
    }

    pub fn to_json(&self) -> String {
        let file = MatrixFile {
            dim: self.dim(),
            matrix: matrix_to_pairs(&self.mat),
        };
        serde_json::to_string(&file).expect("state serialization cannot fail")
    }

    pub fn parse_json(text: &str, tol: f64) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text)?;
        let raw = matrix_from_pairs(file.dim, file.matrix)?;
        Self::validate(raw, tol)
    }
}

fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn matrix_from_pairs(dim: usize, rows: Vec<Vec<[f64; 2]>>) -> Result<ComplexMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Parse {
            detail: format!("matrix shape does not match declared dim = {dim}"),
        });
    }
    ComplexMatrix::from_rows(
        rows.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect(),
    )
}

/// Eigenvalues of a Hermitian matrix, ascending. Backed by nalgebra's
/// self-adjoint solver on the lower triangle.
pub(crate) fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    assert!(m.is_square());
    let d = m.rows();
    let dm = nalgebra::DMatrix::from_fn(d, d, |i, j| m[(i, j)]);
    let mut eigs: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// A normalized state vector in the reference basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidPureState {
                detail: "state vector must have at least one amplitude".into(),
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > tol {
            return Err(Error::InvalidPureState {
                detail: format!("squared norm = {norm_sqr}, expected 1"),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Amplitudes `sqrt(p_i)` of a probability vector: real nonnegative state.
    pub fn from_probs(probs: &[f64]) -> Self {
        Self {
            amplitudes: probs
                .iter()
                .map(|&p| Complex64::new(p.max(0.0).sqrt(), 0.0))
                .collect(),
        }
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Self { amplitudes }
    }

    /// The uniform-amplitude state on `dim` levels.
    pub fn maximally_coherent(dim: usize) -> Self {
        assert!(dim > 0);
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amplitudes: vec![a; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize) -> Complex64 {
        self.amplitudes[i]
    }

    pub fn dephase(&self) -> ProbVector {
        ProbVector::from_raw(self.amplitudes.iter().map(|c| c.norm_sqr()).collect())
    }

    pub fn support_indices(&self, tol: f64) -> Vec<usize> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn support_size(&self, tol: f64) -> usize {
        self.support_indices(tol).len()
    }

    pub fn padded(&self, dim: usize) -> PureState {
        assert!(dim >= self.dim());
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(dim, Complex64::ZERO);
        Self { amplitudes }
    }

    pub fn to_json(&self) -> String {
        let file = PureStateFile {
            dim: self.dim(),
            amplitudes: self.amplitudes.iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_string(&file).expect("state serialization cannot fail")
    }

    pub fn parse_json(text: &str, tol: f64) -> Result<Self> {
        let file: PureStateFile = serde_json::from_str(text)?;
        if file.amplitudes.len() != file.dim {
            return Err(Error::Parse {
                detail: format!(
                    "amplitude count {} does not match declared dim = {}",
                    file.amplitudes.len(),
                    file.dim
                ),
            });
        }
        Self::new(
            file.amplitudes
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
            tol,
        )
    }
}

impl serde::Serialize for PureState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        PureStateFile {
            dim: self.dim(),
            amplitudes: self.amplitudes.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

/// A bijection on basis indices; `image[i]` is where index `i` goes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let d = image.len();
        let mut seen = vec![false; d];
        for &target in &image {
            if target >= d || seen[target] {
                return Err(Error::InvalidPermutation {
                    detail: format!("image {image:?} is not a bijection on 0..{d}"),
                });
            }
            seen[target] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            image: (0..dim).collect(),
        }
    }

    pub fn swap(dim: usize, a: usize, b: usize) -> Self {
        let mut image: Vec<usize> = (0..dim).collect();
        image.swap(a, b);
        Self { image }
    }

    pub fn dim(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, index: usize) -> usize {
        self.image[index]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.image.len()];
        for (i, &target) in self.image.iter().enumerate() {
            image[target] = i;
        }
        Self { image }
    }

    /// The permutation as a 0/1 matrix with entry at `(image[i], i)`.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            m[(self.image[i], i)] = Complex64::ONE;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::DEFAULT_TOL;

    fn plus_state() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::maximally_coherent(2))
    }

    #[test]
    fn dephase_examples() {
        let diag = plus_state().dephase();
        assert!((diag.entries()[0] - 0.5).abs() < 1e-15);
        assert!((diag.entries()[1] - 0.5).abs() < 1e-15);

        // Diagonal read-off of the pure state (sqrt .8, sqrt .2).
        let rho = DensityMatrix::validate(
            ComplexMatrix::from_real_rows(&[&[0.8, 0.4], &[0.4, 0.2]]),
            DEFAULT_TOL,
        )
        .unwrap();
        let d = rho.dephase();
        assert!((d.entries()[0] - 0.8).abs() < 1e-15);
        assert!((d.entries()[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn dephase_of_diagonal_state_is_its_diagonal() {
        let rho = DensityMatrix::maximally_mixed(3);
        for &p in rho.dephase().entries() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn tensor_of_plus_states_is_uniform() {
        let rho = plus_state().tensor(&plus_state());
        assert_eq!(rho.dim(), 4);
        for i in 0..4 {
            for j in 0..4 {
                assert!((rho.entry(i, j).re - 0.25).abs() < 1e-15);
                assert!(rho.entry(i, j).im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tensor_with_basis_state_embeds_block() {
        let rho = plus_state();
        let anchor = DensityMatrix::from_pure(&PureState::basis_state(2, 0));
        let out = rho.tensor(&anchor);
        // (i1,i2) -> 2*i1 + i2: the plus block lands on indices {0, 2}.
        assert!((out.entry(0, 0).re - 0.5).abs() < 1e-15);
        assert!((out.entry(0, 2).re - 0.5).abs() < 1e-15);
        assert!(out.entry(1, 1).norm() < 1e-15);
    }

    #[test]
    fn dephase_factorizes_over_tensor() {
        let a = DensityMatrix::validate(
            ComplexMatrix::from_real_rows(&[&[0.8, 0.4], &[0.4, 0.2]]),
            DEFAULT_TOL,
        )
        .unwrap();
        let b = DensityMatrix::maximally_mixed(2);
        let lhs = a.tensor(&b).dephase();
        let da = a.dephase();
        let db = b.dephase();
        for i in 0..2 {
            for j in 0..2 {
                let want = da.entries()[i] * db.entries()[j];
                assert!((lhs.entries()[2 * i + j] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn permute_swap_example() {
        let rho = DensityMatrix::validate(
            ComplexMatrix::from_real_rows(&[&[0.7, 0.3], &[0.3, 0.3]]),
            DEFAULT_TOL,
        )
        .unwrap();
        let swapped = rho.permute(&Permutation::swap(2, 0, 1));
        assert_eq!(swapped.entry(0, 0).re, 0.3);
        assert_eq!(swapped.entry(1, 1).re, 0.7);
        assert_eq!(swapped.entry(0, 1).re, 0.3);
    }

    #[test]
    fn permute_identity_and_involution() {
        let rho = plus_state().tensor(&DensityMatrix::maximally_mixed(2));
        let id = Permutation::identity(4);
        assert_eq!(rho.permute(&id), rho);

        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let round = rho.permute(&p).permute(&p.inverse());
        // Entries only move, so the round trip is bitwise exact.
        assert_eq!(round, rho);
    }

    #[test]
    fn permute_preserves_spectrum_and_diagonal_multiset() {
        let rho = DensityMatrix::mixture(&[
            (0.6, plus_state()),
            (0.4, DensityMatrix::from_pure(&PureState::basis_state(2, 1))),
        ]);
        let p = Permutation::swap(2, 0, 1);
        let permuted = rho.permute(&p);
        let mut eig_a = rho.eigenvalues();
        let mut eig_b = permuted.eigenvalues();
        eig_a.sort_by(f64::total_cmp);
        eig_b.sort_by(f64::total_cmp);
        for (a, b) in eig_a.iter().zip(&eig_b) {
            assert!((a - b).abs() < 1e-12);
        }
        let da = rho.dephase();
        let db = permuted.dephase();
        for i in 0..2 {
            assert!((da.entries()[i] - db.entries()[p.apply(i)]).abs() < 1e-15);
        }
    }

    #[test]
    fn validate_accepts_plus_state() {
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(DensityMatrix::validate(m, DEFAULT_TOL).is_ok());
    }

    #[test]
    fn validate_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        match DensityMatrix::validate(m, DEFAULT_TOL) {
            Err(Error::NotHermitian { .. }) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_indefinite() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, -1.0]]);
        match DensityMatrix::validate(m, DEFAULT_TOL) {
            Err(Error::NotPsd { .. }) => {}
            other => panic!("expected NotPSD, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_bad_trace_and_normalizes_small_drift() {
        let m = ComplexMatrix::from_real_rows(&[&[0.7, 0.0], &[0.0, 0.7]]);
        match DensityMatrix::validate(m, DEFAULT_TOL) {
            Err(Error::TraceNotOne { .. }) => {}
            other => panic!("expected TraceNotOne, got {other:?}"),
        }

        let drift = 1.0 + 5e-7;
        let m = ComplexMatrix::from_real_rows(&[&[0.5 * drift, 0.0], &[0.0, 0.5 * drift]]);
        let rho = DensityMatrix::validate(m, DEFAULT_TOL).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn validate_tolerates_certified_eigenvalue_dust() {
        // Min eigenvalue -2.5e-8 sits inside the -1e-7 certificate.
        let eps = 2.5e-8;
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.5 + eps], &[0.5 + eps, 0.5]]);
        assert!(DensityMatrix::validate(m, DEFAULT_TOL).is_ok());

        // Min eigenvalue -3e-7 is beyond it.
        let eps = 3e-7;
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.5 + eps], &[0.5 + eps, 0.5]]);
        match DensityMatrix::validate(m, DEFAULT_TOL) {
            Err(Error::NotPsd { .. }) => {}
            other => panic!("expected NotPSD, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_zero_diagonal_with_coupling() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::ONE;
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        m[(1, 0)] = Complex64::new(0.1, 0.0);
        match DensityMatrix::validate(m, DEFAULT_TOL) {
            Err(Error::NotPsd { .. }) => {}
            other => panic!("expected NotPSD, got {other:?}"),
        }
    }

    #[test]
    fn eigenvalues_of_known_state() {
        // 0.75 |+><+| + 0.25 |-><-| has eigenvalues {0.25, 0.75}.
        let plus = plus_state();
        let minus = DensityMatrix::from_pure(
            &PureState::new(
                vec![
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ],
                DEFAULT_TOL,
            )
            .unwrap(),
        );
        let rho = DensityMatrix::mixture(&[(0.75, plus), (0.25, minus)]);
        let eigs = rho.eigenvalues();
        assert!((eigs[0] - 0.25).abs() < 1e-12);
        assert!((eigs[1] - 0.75).abs() < 1e-12);
        assert_eq!(rho.numerical_rank(DEFAULT_TOL), 2);
    }

    #[test]
    fn density_json_round_trip() {
        let rho = plus_state().tensor(&DensityMatrix::maximally_mixed(2));
        let text = rho.to_json();
        let back = DensityMatrix::parse_json(&text, DEFAULT_TOL).unwrap();
        assert!(rho.matrix().frobenius_distance(back.matrix()) < 1e-15);
    }

    #[test]
    fn pure_state_json_round_trip_and_support() {
        let psi = PureState::new(
            vec![
                Complex64::new(0.6, 0.0),
                Complex64::new(0.0, 0.8),
                Complex64::ZERO,
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let back = PureState::parse_json(&psi.to_json(), DEFAULT_TOL).unwrap();
        assert_eq!(back, psi);
        assert_eq!(psi.support_indices(DEFAULT_TOL), vec![0, 1]);
    }

    #[test]
    fn permutation_rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![1, 0, 2]).is_ok());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_density(dim: usize) -> impl Strategy<Value = DensityMatrix> {
            let amp = (-1.0f64..1.0).prop_map(|x| x);
            proptest::collection::vec((amp.clone(), amp), dim * 2).prop_filter_map(
                "needs nonzero vectors",
                move |raw| {
                    let mut parts = Vec::new();
                    for chunk in raw.chunks(dim) {
                        let v: Vec<Complex64> = chunk
                            .iter()
                            .map(|&(re, im)| Complex64::new(re, im))
                            .collect();
                        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                        if norm < 1e-3 {
                            return None;
                        }
                        let v: Vec<Complex64> = v.into_iter().map(|c| c / norm).collect();
                        parts.push((1.0, DensityMatrix::from_pure(&PureState { amplitudes: v })));
                    }
                    Some(DensityMatrix::mixture(&parts))
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn tensor_of_valid_states_is_valid(
                a in arb_density(2),
                b in arb_density(3),
            ) {
                let t = a.tensor(&b);
                prop_assert!(DensityMatrix::validate(t.matrix().clone(), 1e-9).is_ok());
            }

            #[test]
            fn dephase_is_a_distribution(rho in arb_density(3)) {
                let d = rho.dephase();
                let sum: f64 = d.entries().iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-9);
                prop_assert!(d.entries().iter().all(|&p| p >= -1e-12));
            }
        }
    }
}
