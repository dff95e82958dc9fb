//! Majorization preorder and lattice operations on probability distributions.
//!
//! A distribution `p` is majorized by `q` (written `p ≺ q`) when every prefix
//! sum of `q`'s descending rearrangement dominates the corresponding prefix
//! sum of `p`'s. Under this preorder the simplex carries a lattice structure:
//! [`meet`] is the greatest lower bound and [`join`] the least upper bound.
//! The meet is the pointwise minimum of the cumulative curves (a minimum of
//! concave curves stays concave); the join starts from the pointwise maximum,
//! whose increment vector may fail to be nonincreasing, and repairs it with
//! repeated averaging passes ([`flatten_once`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shared absolute tolerance for prefix-sum comparisons. Ties count as
/// satisfied inequalities.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A finite probability distribution. Entries may carry float dust down to
/// `-tol` but must sum to one within the construction tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    pub fn new(probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution {
                detail: "distribution must have at least one entry".into(),
            });
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < -tol || p > 1.0 + tol {
                return Err(Error::InvalidDistribution {
                    detail: format!("entry {i} = {p} is outside [0, 1]"),
                });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution {
                detail: format!("entries sum to {sum}, expected 1"),
            });
        }
        Ok(Self { probs })
    }

    /// Construct from entries known to form a distribution (module-internal
    /// results of curve arithmetic).
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        Self { probs }
    }

    pub fn parse_json(text: &str, tol: f64) -> Result<Self> {
        let raw: ProbVector = serde_json::from_str(text)?;
        Self::new(raw.probs, tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution serialization cannot fail")
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_entry(&self) -> f64 {
        self.probs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Zero-pad to `dim` entries. Requests below the current dimension return
    /// the vector unchanged; majorization embeds into the larger space.
    pub fn padded(&self, dim: usize) -> Self {
        let mut probs = self.probs.clone();
        if probs.len() < dim {
            probs.resize(dim, 0.0);
        }
        Self { probs }
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "uniform distribution needs a positive dimension");
        Self {
            probs: vec![1.0 / dim as f64; dim],
        }
    }

    pub fn point_mass(dim: usize) -> Self {
        assert!(dim > 0, "point mass needs a positive dimension");
        let mut probs = vec![0.0; dim];
        probs[0] = 1.0;
        Self { probs }
    }
}

/// Cumulative sums of a descending-sorted distribution (its Lorenz curve).
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationCurve {
    partial_sums: Vec<f64>,
}

impl MajorizationCurve {
    /// Sorts the distribution in descending order and accumulates.
    pub fn from_distribution(p: &ProbVector) -> Self {
        let sorted = sort_desc(p);
        let mut acc = 0.0;
        let partial_sums = sorted
            .probs
            .iter()
            .map(|&x| {
                acc += x;
                acc
            })
            .collect();
        Self { partial_sums }
    }

    pub fn dim(&self) -> usize {
        self.partial_sums.len()
    }

    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    /// First differences of the curve.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.partial_sums
            .iter()
            .map(|&s| {
                let inc = s - prev;
                prev = s;
                inc
            })
            .collect()
    }

    /// True when every partial sum of `self` dominates `other`'s within `tol`.
    pub fn dominates(&self, other: &Self, tol: f64) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.partial_sums
            .iter()
            .zip(&other.partial_sums)
            .all(|(&a, &b)| a >= b - tol)
    }

    fn pointwise(curves: &[Self], pick: fn(f64, f64) -> f64) -> Self {
        let dim = curves[0].dim();
        let mut partial_sums = curves[0].partial_sums.clone();
        for curve in &curves[1..] {
            debug_assert_eq!(curve.dim(), dim);
            for (acc, &s) in partial_sums.iter_mut().zip(&curve.partial_sums) {
                *acc = pick(*acc, s);
            }
        }
        Self { partial_sums }
    }
}

/// Returns the entries rearranged in nonincreasing order.
pub fn sort_desc(p: &ProbVector) -> ProbVector {
    let mut probs = p.probs.clone();
    probs.sort_by(|a, b| b.total_cmp(a));
    ProbVector { probs }
}

/// True iff `p ≺ q`: every prefix sum of `sort_desc(q)` dominates the
/// corresponding prefix sum of `sort_desc(p)` within `tol`. Vectors of
/// unequal dimension are zero-padded to the common dimension.
pub fn majorizes(q: &ProbVector, p: &ProbVector, tol: f64) -> bool {
    let dim = q.dim().max(p.dim());
    let qc = MajorizationCurve::from_distribution(&q.padded(dim));
    let pc = MajorizationCurve::from_distribution(&p.padded(dim));
    qc.dominates(&pc, tol)
}

/// Greatest lower bound of a nonempty set: increments of the pointwise
/// minimum of the members' cumulative curves.
pub fn meet(set: &[ProbVector]) -> ProbVector {
    assert!(!set.is_empty(), "meet of an empty set is undefined");
    let dim = set.iter().map(ProbVector::dim).max().unwrap();
    let curves: Vec<_> = set
        .iter()
        .map(|p| MajorizationCurve::from_distribution(&p.padded(dim)))
        .collect();
    let min_curve = MajorizationCurve::pointwise(&curves, f64::min);
    let mut probs = min_curve.increments();
    // A minimum of concave curves is concave; repair float dust only.
    for r in 1..probs.len() {
        if probs[r] > probs[r - 1] {
            debug_assert!(probs[r] - probs[r - 1] <= 1e-12);
            probs[r] = probs[r - 1];
        }
    }
    snap_dust(&mut probs);
    ProbVector::from_raw(probs)
}

/// Curve differences leave ~1e-16 residue where entries are exactly zero in
/// the padded space; snap it so downstream support masks stay clean.
fn snap_dust(probs: &mut [f64]) {
    for p in probs {
        if p.abs() < 1e-14 {
            *p = 0.0;
        }
    }
}

/// One averaging pass of the concavity repair.
///
/// Let `j` be the smallest index with `a[j] > a[j-1]` and `i` the greatest
/// index at or below `j-1` such that the entry before `i` dominates the mean
/// of `a[i..=j]` (the virtual entry before index 0 is +inf, so `i = 0` always
/// qualifies). Entries `i..=j` are replaced by their mean. Inputs already in
/// nonincreasing order are returned unchanged, signalling the fixed point.
pub fn flatten_once(a: &[f64]) -> Vec<f64> {
    let mut out = a.to_vec();
    let Some(j) = (1..a.len()).find(|&r| a[r] > a[r - 1]) else {
        return out;
    };
    let mut sum = a[j];
    let mut pick = 0;
    let mut avg = f64::NAN;
    for i in (0..j).rev() {
        sum += a[i];
        let mean = sum / (j - i + 1) as f64;
        if i == 0 || a[i - 1] >= mean {
            pick = i;
            avg = mean;
            break;
        }
    }
    debug_assert!(avg.is_finite());
    for entry in &mut out[pick..=j] {
        *entry = avg;
    }
    out
}

/// Least upper bound of a nonempty set: increments of the pointwise maximum
/// of the members' cumulative curves, flattened to nonincreasing order.
pub fn join(set: &[ProbVector]) -> ProbVector {
    assert!(!set.is_empty(), "join of an empty set is undefined");
    let dim = set.iter().map(ProbVector::dim).max().unwrap();
    let curves: Vec<_> = set
        .iter()
        .map(|p| MajorizationCurve::from_distribution(&p.padded(dim)))
        .collect();
    let max_curve = MajorizationCurve::pointwise(&curves, f64::max);
    let mut probs = max_curve.increments();
    let mut passes = 0;
    while !probs.windows(2).all(|w| w[0] >= w[1]) {
        probs = flatten_once(&probs);
        passes += 1;
        // Each pass merges at least two entries into one flat segment.
        assert!(passes < dim, "join flattening exceeded {dim} passes");
    }
    snap_dust(&mut probs);
    ProbVector::from_raw(probs)
}
