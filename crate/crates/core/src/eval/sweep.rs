//! Anti-sparsification measurements over thinned copies of one matrix.

use crate::engine::{run_rga, RgaConfig};
use crate::error::Result;
use crate::eval::sparsify::sparsify;
use crate::matrix::SparseTrustMatrix;

/// The eight sparsity degrees of the validity experiment, as fractions.
pub const VALIDITY_DEGREES: [f64; 8] = [
    0.009e-2, 0.018e-2, 0.028e-2, 0.039e-2, 0.048e-2, 0.052e-2, 0.064e-2, 0.072e-2,
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub target_degree: f64,
    pub seed: u64,
    pub pre_degree: f64,
    pub post_degree: f64,
    /// Off-diagonal cells that were empty before mining and hold trust after.
    pub mined_pairs: usize,
    pub depth: usize,
    pub nnz_history: Vec<usize>,
}

impl SweepPoint {
    /// `|post - pre|`.
    pub fn residual(&self) -> f64 {
        (self.post_degree - self.pre_degree).abs()
    }
}

/// Thins `matrix` to `target_degree` and mines the result.
pub fn anti_sparsification(
    matrix: &SparseTrustMatrix,
    target_degree: f64,
    seed: u64,
    rga: &RgaConfig,
) -> Result<SweepPoint> {
    let thinned = sparsify(matrix, target_degree, seed)?;
    let cfg = RgaConfig {
        retain_depths: false,
        ..rga.clone()
    };
    let mined = run_rga(&thinned.matrix, &cfg)?;
    let input = &thinned.matrix;
    let mined_pairs = mined
        .aggregated
        .records()
        .filter(|r| r.trustor != r.trustee && !input.contains(r.trustor, r.trustee))
        .count();
    Ok(SweepPoint {
        target_degree,
        seed,
        pre_degree: thinned.achieved_degree,
        post_degree: mined.aggregated.sparsity_degree(),
        mined_pairs,
        depth: mined.depth,
        nnz_history: mined.nnz_history,
    })
}

pub fn validity_sweep(
    matrix: &SparseTrustMatrix,
    targets: &[f64],
    seed: u64,
    rga: &RgaConfig,
) -> Result<Vec<SweepPoint>> {
    targets
        .iter()
        .map(|&t| anti_sparsification(matrix, t, seed, rga))
        .collect()
}

#[derive(Debug, Clone)]
pub struct StabilitySummary {
    pub points: Vec<SweepPoint>,
    pub mean_residual: f64,
    pub std_residual: f64,
}

/// Same target degree under several seeds; dispersion of the residuals.
pub fn stability_runs(
    matrix: &SparseTrustMatrix,
    target_degree: f64,
    seeds: &[u64],
    rga: &RgaConfig,
) -> Result<StabilitySummary> {
    let points: Vec<SweepPoint> = seeds
        .iter()
        .map(|&s| anti_sparsification(matrix, target_degree, s, rga))
        .collect::<Result<_>>()?;
    let n = points.len().max(1) as f64;
    let mean_residual = points.iter().map(SweepPoint::residual).sum::<f64>() / n;
    let var = points
        .iter()
        .map(|p| (p.residual() - mean_residual).powi(2))
        .sum::<f64>()
        / n;
    Ok(StabilitySummary {
        points,
        mean_residual,
        std_residual: var.sqrt(),
    })
}
