//! Deterministic coherence distillation under strictly incoherent operations.
//!
//! The crate decides whether a mixed state can be converted into a target
//! pure state with certainty using only strictly incoherent operations,
//! computes the maximum number of 2-dimensional maximally coherent states
//! extractable from a finite collection of states, and synthesizes the
//! channel realizing a feasible conversion.
//!
//! The pipeline runs in three stages:
//! 1. permute the state into block-diagonal form with irreducible blocks
//!    ([`decomposition`]),
//! 2. split each block into maximal pure fragments witnessed by an all-ones
//!    comparison matrix ([`purity`]),
//! 3. compare the least upper bound of the fragments' dephasings against the
//!    target on the majorization lattice ([`majorization`], [`distillation`])
//!    and emit the realizing channel ([`channels`]).

#![forbid(unsafe_code)]

pub mod channels;
pub mod decomposition;
pub mod distillation;
pub mod error;
pub mod majorization;
pub mod matrix;
pub mod purity;

pub use channels::{
    assemble_distillation_channel, is_strictly_incoherent, synthesize_pure_to_pure, KrausOperator,
    SIOChannel, COMPLETENESS_TOL,
};
pub use decomposition::{block_decompose, support_graph, Block, BlockDecomposition, SupportGraph};
pub use distillation::{
    can_distill_some_pure, can_transform_to, candidates, join_target, n_max, rank_bound_check,
    Candidate, CandidateSet, DistillationReport, RankBoundDiagnostics, TransformVerdict,
    DEFAULT_DIM_CAP,
};
pub use error::{Error, Result};
pub use majorization::{
    flatten_once, join, majorizes, meet, sort_desc, MajorizationCurve, ProbVector, DEFAULT_TOL,
};
pub use matrix::{ComplexMatrix, DensityMatrix, Permutation, PureState};
pub use purity::{
    comparison_matrix, extract_pure, has_rank_one_submatrix, ones_classes, ComparisonMatrix,
    IncoherentProjector,
};
