use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::SparseTrustMatrix;

#[derive(Debug, Clone)]
pub struct Sparsified {
    pub matrix: SparseTrustMatrix,
    pub keep_probability: f64,
    pub before_degree: f64,
    pub achieved_degree: f64,
}

/// Keep probability that takes `current` down to `target` in expectation.
pub fn keep_probability(target: f64, current: f64) -> Result<f64> {
    if !(target >= 0.0) {
        return Err(Error::InvalidParameter(format!("target degree {target} is negative")));
    }
    // a relative slack of a few ulps lets "target == current" through
    if target > current * (1.0 + 1e-12) {
        return Err(Error::InfeasibleTarget { target, current });
    }
    if current == 0.0 {
        return Ok(1.0);
    }
    Ok((target / current).min(1.0))
}

/// Thins the matrix by keeping each stored entry independently with
/// probability `target_degree / current_degree`. Survivors keep their values.
pub fn sparsify(matrix: &SparseTrustMatrix, target_degree: f64, seed: u64) -> Result<Sparsified> {
    let before = matrix.sparsity_degree();
    let p = keep_probability(target_degree, before)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kept: Vec<_> = matrix
        .records()
        .filter(|_| p >= 1.0 || rng.gen_bool(p))
        .collect();
    let out = SparseTrustMatrix::from_records(&kept, matrix.dim())?;
    Ok(Sparsified {
        achieved_degree: out.sparsity_degree(),
        matrix: out,
        keep_probability: p,
        before_degree: before,
    })
}
