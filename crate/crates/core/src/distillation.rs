//! Feasibility of deterministic conversions and the distillation pipeline.
//!
//! A state converts into a pure coherent target exactly when some complete
//! set of incoherent projectors cuts it into pure fragments whose dephasings
//! are all majorized by the target's dephasing; equivalently, the least upper
//! bound of the fragment dephasings is majorized by the target. The canonical
//! projector set comes from the block decomposition refined by the saturated
//! classes of the comparison matrix. The maximum number of 2-dimensional
//! maximally coherent states extractable from a collection follows from the
//! largest entry of that least upper bound.

use serde::Serialize;

use crate::decomposition::{block_decompose, BlockDecomposition};
use crate::error::{Error, Result};
use crate::majorization::{join, majorizes, ProbVector};
use crate::matrix::{DensityMatrix, PureState};
use crate::purity::{
    comparison_matrix, extract_pure, has_rank_one_submatrix, ones_classes, IncoherentProjector,
};

/// Default cap on the tensored dimension (2^13): dense matrices beyond this
/// exceed desk scale.
pub const DEFAULT_DIM_CAP: usize = 8192;

/// Floor guard so that max-norms within float error of an exact power of two
/// round to the exact exponent.
const FLOOR_EPSILON: f64 = 1e-9;

/// One pure fragment of the input state: the projector that cuts it out, the
/// extracted state, its weight, and its dephasing sorted descending.
#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    #[serde(rename = "indices")]
    pub projector: IncoherentProjector,
    pub state: PureState,
    pub weight: f64,
    pub dephased: ProbVector,
    #[serde(rename = "block")]
    pub block_index: usize,
}

impl Candidate {
    /// A fragment on a single basis index is an incoherent pure state.
    pub fn is_coherent(&self) -> bool {
        self.projector.len() >= 2
    }
}

/// The canonical projector partition of a state with its source blocks.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateSet {
    pub decomposition: BlockDecomposition,
    pub entries: Vec<Candidate>,
}

impl CandidateSet {
    pub fn all_coherent(&self) -> bool {
        self.entries.iter().all(Candidate::is_coherent)
    }

    pub fn projectors(&self) -> Vec<IncoherentProjector> {
        self.entries.iter().map(|c| c.projector.clone()).collect()
    }

    /// Least upper bound of all fragment dephasings, zero-padded to the
    /// largest fragment dimension. Total: singleton fragments contribute
    /// point masses.
    pub fn dephased_join(&self) -> ProbVector {
        let dim = self
            .entries
            .iter()
            .map(|c| c.dephased.dim())
            .max()
            .expect("candidate set covers the support, so it is nonempty");
        let padded: Vec<ProbVector> = self
            .entries
            .iter()
            .map(|c| c.dephased.padded(dim))
            .collect();
        join(&padded)
    }
}

/// Cuts `rho` into its canonical pure fragments: block decomposition, then
/// per block the saturated classes of the comparison matrix, then extraction.
pub fn candidates(rho: &DensityMatrix, tol: f64) -> Result<CandidateSet> {
    let decomposition = block_decompose(rho, tol);
    let mut entries = Vec::new();
    for (block_index, block) in decomposition.blocks.iter().enumerate() {
        let a = comparison_matrix(&block.state, tol);
        for class in ones_classes(&a, tol)? {
            let original: Vec<usize> = class
                .indices()
                .iter()
                .map(|&local| block.indices[local])
                .collect();
            let projector = IncoherentProjector::new(original)?;
            let (state, weight) = extract_pure(rho, &projector, tol)?;
            let mut support_probs: Vec<f64> = projector
                .indices()
                .iter()
                .map(|&i| state.amplitude(i).norm_sqr())
                .collect();
            support_probs.sort_by(|a, b| b.total_cmp(a));
            entries.push(Candidate {
                projector,
                state,
                weight,
                dephased: ProbVector::new(support_probs, 1e-7)?,
                block_index,
            });
        }
    }
    Ok(CandidateSet {
        decomposition,
        entries,
    })
}

/// True when some pure coherent state is reachable with certainty: every
/// canonical fragment must span at least two basis indices.
pub fn can_distill_some_pure(rho: &DensityMatrix, tol: f64) -> Result<bool> {
    Ok(candidates(rho, tol)?.all_coherent())
}

/// The dephasing of the best reachable pure state: the least upper bound of
/// the fragment dephasings. Errs with `NotDistillable` when a fragment is
/// incoherent.
pub fn join_target(rho: &DensityMatrix, tol: f64) -> Result<ProbVector> {
    let set = candidates(rho, tol)?;
    if let Some(incoherent) = set.entries.iter().find(|c| !c.is_coherent()) {
        return Err(Error::NotDistillable {
            indices: incoherent.projector.indices().to_vec(),
        });
    }
    Ok(set.dephased_join())
}

/// Outcome of a feasibility check, with the witnessing projector partition.
#[derive(Debug, Clone, Serialize)]
pub struct TransformVerdict {
    pub feasible: bool,
    pub witness: Vec<IncoherentProjector>,
    pub candidate_join: ProbVector,
    pub target_dephased: ProbVector,
}

/// Decides whether `rho` converts into the pure state `phi` with certainty.
///
/// An incoherent target (support on a single index) is always reachable: any
/// state collapses onto a basis state under a relabeling-and-collapse
/// strictly incoherent channel, so that case short-circuits the fragment
/// machinery. Otherwise feasibility is the majorization of the fragment join
/// by the target dephasing; fragments containing an incoherent singleton
/// produce a point-mass join that no coherent target majorizes, so those
/// states come back infeasible with an empty witness.
pub fn can_transform_to(
    rho: &DensityMatrix,
    phi: &PureState,
    tol: f64,
) -> Result<TransformVerdict> {
    let set = candidates(rho, tol)?;
    let candidate_join = set.dephased_join();
    let target_dephased = phi.dephase();
    if phi.support_size(tol) <= 1 {
        return Ok(TransformVerdict {
            feasible: true,
            witness: set.projectors(),
            candidate_join,
            target_dephased,
        });
    }
    let feasible = majorizes(&target_dephased, &candidate_join, tol);
    Ok(TransformVerdict {
        feasible,
        witness: if feasible {
            set.projectors()
        } else {
            Vec::new()
        },
        candidate_join,
        target_dephased,
    })
}

/// Support and rank bookkeeping for the necessary-condition screen: a state
/// with `m` occupied diagonal entries converting to a target with `n`
/// occupied amplitudes can have rank at most `m / n`.
#[derive(Debug, Clone, Serialize)]
pub struct RankBoundDiagnostics {
    pub support_size: usize,
    pub target_support: usize,
    pub rank: usize,
    pub bound_satisfied: bool,
}

/// Full outcome of the distillation pipeline on a collection of states.
#[derive(Debug, Clone, Serialize)]
pub struct DistillationReport {
    pub candidates: CandidateSet,
    pub join_target: Option<ProbVector>,
    pub n_max: u32,
    pub distillable_to_pure: bool,
    pub bound_state: bool,
    pub diagnostics: RankBoundDiagnostics,
}

impl DistillationReport {
    /// Largest entry of the join target, the max norm deciding the exponent.
    pub fn max_norm(&self) -> Option<f64> {
        self.join_target.as_ref().map(ProbVector::max_entry)
    }
}

/// Runs the pipeline on the tensor product of `states` and reports the
/// maximum number of 2-dimensional maximally coherent states extractable
/// with certainty.
///
/// States that do not split into coherent pure fragments report zero rather
/// than an error: no maximally coherent pair is extractable with certainty.
/// The rank diagnostic multiplies per-factor ranks, which is exact for
/// tensor products and avoids an eigendecomposition of the full product.
pub fn n_max(states: &[DensityMatrix], tol: f64, dim_cap: usize) -> Result<DistillationReport> {
    assert!(!states.is_empty(), "n_max needs at least one input state");
    let mut total_dim = 1usize;
    for state in states {
        total_dim = match total_dim.checked_mul(state.dim()) {
            Some(dim) if dim <= dim_cap => dim,
            _ => {
                return Err(Error::DimensionOverflow {
                    dim: total_dim.saturating_mul(state.dim()),
                    cap: dim_cap,
                })
            }
        };
    }

    let mut rho = states[0].clone();
    for state in &states[1..] {
        rho = rho.tensor(state);
    }

    let set = candidates(&rho, tol)?;
    let distillable_to_pure = set.all_coherent();
    let bound_state = !has_rank_one_submatrix(&rho, tol);

    let (join_target, n_max) = if distillable_to_pure {
        let best = set.dephased_join();
        let max_norm = best.max_entry();
        let exponent = ((1.0 / max_norm).log2() + FLOOR_EPSILON).floor().max(0.0) as u32;
        (Some(best), exponent)
    } else {
        (None, 0)
    };

    let support_size = rho.dephase().entries().iter().filter(|&&p| p > tol).count();
    let target_support = 1usize << n_max;
    let rank: usize = states.iter().map(|s| s.numerical_rank(tol)).product();
    let diagnostics = RankBoundDiagnostics {
        support_size,
        target_support,
        rank,
        bound_satisfied: rank <= support_size / target_support,
    };

    Ok(DistillationReport {
        candidates: set,
        join_target,
        n_max,
        distillable_to_pure,
        bound_state,
        diagnostics,
    })
}

/// Fast necessary-condition screen for `rho -> phi`: the numerical rank of
/// `rho` may not exceed the ratio of its diagonal support to the target's
/// amplitude support.
pub fn rank_bound_check(rho: &DensityMatrix, phi: &PureState, tol: f64) -> bool {
    let m = rho.dephase().entries().iter().filter(|&&p| p > tol).count();
    let n = phi.support_size(tol);
    if n == 0 {
        return false;
    }
    rho.numerical_rank(tol) <= m / n
}
