use super::check_alphas;
use crate::error::{Error, Result};
use crate::matrix::{linear_combination, spmm_with_tolerance, SparseTrustMatrix};

/// `a1 T + a2 T'T + a3 T' + a4 T T'`: direct propagation, co-citation,
/// transpose trust and trust coupling.
pub fn guha_operator(t: &SparseTrustMatrix, alphas: [f64; 4]) -> Result<SparseTrustMatrix> {
    check_alphas(&alphas)?;
    let tt = t.transpose();
    let cocitation = spmm_with_tolerance(&tt, t, 0.0)?;
    let coupling = spmm_with_tolerance(t, &tt, 0.0)?;
    linear_combination(&[
        (alphas[0], t),
        (alphas[1], &cocitation),
        (alphas[2], &tt),
        (alphas[3], &coupling),
    ])
}

/// Belief matrix `C + C^2 + ... + C^steps`, clamped to [0, 1].
pub fn guha_propagation(t: &SparseTrustMatrix, alphas: [f64; 4], steps: usize) -> Result<SparseTrustMatrix> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    let c = guha_operator(t, alphas)?;
    let mut power = c.clone();
    let mut belief = c.clone();
    for _ in 1..steps {
        power = spmm_with_tolerance(&power, &c, 0.0)?;
        belief = linear_combination(&[(1.0, &belief), (1.0, &power)])?;
    }
    Ok(belief.map_values(|v| v.clamp(0.0, 1.0)))
}
