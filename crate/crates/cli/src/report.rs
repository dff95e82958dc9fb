//! Report assembly and text rendering. JSON output serializes these structs
//! directly; text output prints probabilities to 6 significant digits.

use cohdist_core::{
    candidates, comparison_matrix, has_rank_one_submatrix, BlockDecomposition, Candidate,
    DensityMatrix, DistillationReport, Error as CoreError, ProbVector, TransformVerdict,
};
use serde::Serialize;

/// Six significant digits, plain decimal notation.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn probs_text(p: &ProbVector) -> String {
    let rendered: Vec<String> = p.entries().iter().map(|&x| sig6(x)).collect();
    format!("({})", rendered.join(", "))
}

fn indices_text(indices: &[usize]) -> String {
    let rendered: Vec<String> = indices.iter().map(usize::to_string).collect();
    format!("{{{}}}", rendered.join(", "))
}

#[derive(Serialize)]
pub struct ComparisonSummary {
    pub support_size: usize,
    pub min_off_diagonal: Option<f64>,
    pub saturated_pairs: usize,
}

#[derive(Serialize)]
pub struct AnalyzeReport {
    pub dim: usize,
    pub decomposition: BlockDecomposition,
    pub comparison: ComparisonSummary,
    pub classes: Vec<Candidate>,
    pub distillable_to_pure: bool,
    pub bound_state: bool,
}

impl AnalyzeReport {
    pub fn build(rho: &DensityMatrix, tol: f64) -> Result<Self, CoreError> {
        let set = candidates(rho, tol)?;
        let a = comparison_matrix(rho, tol);
        let comparison = ComparisonSummary {
            support_size: a.support_indices().len(),
            min_off_diagonal: a.min_off_diagonal(),
            saturated_pairs: a.saturated_pairs(tol).len(),
        };
        Ok(Self {
            dim: rho.dim(),
            comparison,
            distillable_to_pure: set.all_coherent(),
            bound_state: !has_rank_one_submatrix(rho, tol),
            decomposition: set.decomposition,
            classes: set.entries,
        })
    }

    pub fn render_text(&self, tol: f64) -> String {
        let mut out = String::new();
        out.push_str(&format!("state dimension: {}\n", self.dim));
        out.push_str(&format!(
            "blocks: {} (null dimension {})\n",
            self.decomposition.blocks.len(),
            self.decomposition.null_dim()
        ));
        for (i, block) in self.decomposition.blocks.iter().enumerate() {
            out.push_str(&format!(
                "  block {i}: indices {}, weight {}, dim {}\n",
                indices_text(&block.indices),
                sig6(block.weight),
                block.dim()
            ));
        }
        out.push_str(&format!(
            "permutation: {:?}\n",
            self.decomposition.permutation.image()
        ));
        out.push_str(&format!(
            "comparison matrix: support {}, saturated pairs {} (threshold {}), min off-diagonal {}\n",
            self.comparison.support_size,
            self.comparison.saturated_pairs,
            sig6(1.0 - tol),
            self.comparison
                .min_off_diagonal
                .map_or_else(|| "n/a".to_string(), sig6),
        ));
        out.push_str("classes:\n");
        for class in &self.classes {
            out.push_str(&format!(
                "  {} weight {} dephased {}\n",
                indices_text(class.projector.indices()),
                sig6(class.weight),
                probs_text(&class.dephased)
            ));
        }
        out.push_str(&format!(
            "distillable to a pure coherent state: {}\n",
            self.distillable_to_pure
        ));
        out.push_str(&format!("bound state: {}\n", self.bound_state));
        out
    }
}

pub fn render_distillation_text(report: &DistillationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "blocks: {} | candidate classes: {}\n",
        report.candidates.decomposition.blocks.len(),
        report.candidates.entries.len()
    ));
    for class in &report.candidates.entries {
        out.push_str(&format!(
            "  {} weight {} dephased {}\n",
            indices_text(class.projector.indices()),
            sig6(class.weight),
            probs_text(&class.dephased)
        ));
    }
    match (&report.join_target, report.max_norm()) {
        (Some(target), Some(norm)) => {
            out.push_str(&format!(
                "join of dephased fragments: {}\n",
                probs_text(target)
            ));
            out.push_str(&format!("max norm: {}\n", sig6(norm)));
        }
        _ => out.push_str("join of dephased fragments: n/a (not distillable)\n"),
    }
    out.push_str(&format!("N_max: {}\n", report.n_max));
    out.push_str(&format!(
        "distillable to a pure coherent state: {}\n",
        report.distillable_to_pure
    ));
    out.push_str(&format!("bound state: {}\n", report.bound_state));
    let d = &report.diagnostics;
    out.push_str(&format!(
        "rank bound: rank {} vs support {} / target support {} -> satisfied: {}\n",
        d.rank, d.support_size, d.target_support, d.bound_satisfied
    ));
    out
}

#[derive(Serialize)]
pub struct ChannelExport {
    pub exported_to: String,
    pub kraus_count: usize,
    pub verified_deviation: f64,
}

#[derive(Serialize)]
pub struct TransformReport {
    #[serde(flatten)]
    pub verdict: TransformVerdict,
    pub channel: Option<ChannelExport>,
}

impl TransformReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("feasible: {}\n", self.verdict.feasible));
        out.push_str(&format!(
            "candidate join: {}\n",
            probs_text(&self.verdict.candidate_join)
        ));
        out.push_str(&format!(
            "target dephased: {}\n",
            probs_text(&self.verdict.target_dephased)
        ));
        if self.verdict.feasible {
            out.push_str("witness projectors:\n");
            for proj in &self.verdict.witness {
                out.push_str(&format!("  {}\n", indices_text(proj.indices())));
            }
        }
        if let Some(channel) = &self.channel {
            out.push_str(&format!(
                "channel: {} Kraus operators -> {} (verified, output deviation {:.3e})\n",
                channel.kraus_count, channel.exported_to, channel.verified_deviation
            ));
        }
        out
    }
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum LatticeOutcome {
    Verdict(bool),
    Vector(ProbVector),
}

#[derive(Serialize)]
pub struct LatticeReport {
    pub operation: String,
    pub result: LatticeOutcome,
}

impl LatticeReport {
    pub fn verdict(operation: &str, value: bool) -> Self {
        Self {
            operation: operation.to_string(),
            result: LatticeOutcome::Verdict(value),
        }
    }

    pub fn vector(operation: &str, value: ProbVector) -> Self {
        Self {
            operation: operation.to_string(),
            result: LatticeOutcome::Vector(value),
        }
    }

    pub fn render_text(&self) -> String {
        match &self.result {
            LatticeOutcome::Verdict(v) => format!("majorizes: {v}\n"),
            LatticeOutcome::Vector(p) => format!("{}: {}\n", self.operation, probs_text(p)),
        }
    }
}
