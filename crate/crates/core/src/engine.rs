//! Roundtable gossip propagation: self-confidence, softmax row normalization,
//! repeated transitivity and averaging of the per-depth trust matrices.

use crate::error::{Error, Result};
use crate::matrix::{linear_combination, spmm_with_tolerance, SparseTrustMatrix};

/// Which propagation depths enter the aggregated matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// Mean over `T^(0) ..= T^(r)`.
    #[default]
    IncludeInitial,
    /// Mean over `T^(1) ..= T^(r)`; falls back to `T^(0)` when `r == 0`.
    MinedOnly,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::IncludeInitial => "include-depth-0",
            Aggregation::MinedOnly => "mine-only",
        }
    }
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "include-depth-0" | "include" => Ok(Aggregation::IncludeInitial),
            "mine-only" | "mined" => Ok(Aggregation::MinedOnly),
            other => Err(Error::InvalidParameter(format!("unknown aggregation mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RgaConfig {
    /// Stop once consecutive nonzero counts differ by less than this.
    pub epsilon: usize,
    pub max_depth: usize,
    pub aggregation: Aggregation,
    /// Propagated entries below this magnitude are dropped. Zero keeps every
    /// reachable pair; all terms are non-negative so no cancellation occurs.
    pub drop_tolerance: f64,
    /// Keep every `T^(d)` in the result. Large runs can switch this off and
    /// only keep the running aggregate.
    pub retain_depths: bool,
}

impl Default for RgaConfig {
    fn default() -> Self {
        Self {
            epsilon: 1,
            max_depth: 6,
            aggregation: Aggregation::IncludeInitial,
            drop_tolerance: 0.0,
            retain_depths: true,
        }
    }
}

impl RgaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon < 1 {
            return Err(Error::InvalidParameter("epsilon must be at least 1".into()));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidParameter("max_depth must be at least 1".into()));
        }
        if !(self.drop_tolerance >= 0.0) {
            return Err(Error::InvalidParameter("drop_tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

/// Row-stochastic trust matrix `G` together with the per-row sums of
/// exponentials it was divided by.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTrustMatrix {
    matrix: SparseTrustMatrix,
    row_denominators: Vec<f64>,
}

impl NormalizedTrustMatrix {
    pub fn matrix(&self) -> &SparseTrustMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SparseTrustMatrix {
        self.matrix
    }

    /// `sum_j exp(p_ij)` over the stored entries of each row.
    pub fn row_denominators(&self) -> &[f64] {
        &self.row_denominators
    }
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    /// Number of transitivity steps performed.
    pub depth: usize,
    /// `T^(0) ..= T^(depth)`; empty unless depths were retained.
    pub per_depth: Vec<SparseTrustMatrix>,
    pub nnz_history: Vec<usize>,
    pub aggregated: SparseTrustMatrix,
    pub converged: bool,
    pub normalized: NormalizedTrustMatrix,
}

/// Sets every diagonal cell to 1.
pub fn inject_self_confidence(s: &SparseTrustMatrix) -> SparseTrustMatrix {
    s.with_diagonal(1.0)
}

/// Softmax of `values`, shifted by their maximum before exponentiating.
/// Returns the normalized values and `sum(exp(values))`.
pub fn softmax_row(values: &[f64]) -> (Vec<f64>, f64) {
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = values.iter().map(|&v| (v - peak).exp()).collect();
    let shifted_total: f64 = exps.iter().sum();
    let normalized = exps.iter().map(|&e| e / shifted_total).collect();
    (normalized, shifted_total * peak.exp())
}

/// Row-wise softmax over stored entries. Absent cells stay absent.
pub fn softmax_normalize(s: &SparseTrustMatrix) -> Result<NormalizedTrustMatrix> {
    if let Some(row) = (0..s.dim()).find(|&i| s.row_nnz(i) == 0) {
        return Err(Error::EmptyRow { row });
    }
    let row_denominators = (0..s.dim()).map(|i| softmax_row(s.row(i).1).1).collect();
    let matrix = s.map_rows(|_, vals| softmax_row(vals).0);
    Ok(NormalizedTrustMatrix {
        matrix,
        row_denominators,
    })
}

/// One transitivity step, `g * prev`. Rounding overshoot above 1 is clipped.
pub fn propagate_step(
    g: &SparseTrustMatrix,
    prev: &SparseTrustMatrix,
    drop_tolerance: f64,
) -> Result<SparseTrustMatrix> {
    Ok(spmm_with_tolerance(g, prev, drop_tolerance)?.map_values(|v| v.min(1.0)))
}

/// Entrywise mean.
pub fn aggregate(per_depth: &[SparseTrustMatrix]) -> Result<SparseTrustMatrix> {
    if per_depth.is_empty() {
        return Err(Error::DegenerateInput("aggregate of no matrices".into()));
    }
    let terms: Vec<(f64, &SparseTrustMatrix)> = per_depth.iter().map(|t| (1.0, t)).collect();
    let n = per_depth.len() as f64;
    Ok(linear_combination(&terms)?.map_values(|v| v / n))
}

pub fn run_rga(s: &SparseTrustMatrix, config: &RgaConfig) -> Result<PropagationResult> {
    run_rga_with_progress(s, config, |_, _| {})
}

/// Same as [`run_rga`], calling `progress(depth, nnz)` after every level.
pub fn run_rga_with_progress<F>(
    s: &SparseTrustMatrix,
    config: &RgaConfig,
    mut progress: F,
) -> Result<PropagationResult>
where
    F: FnMut(usize, usize),
{
    config.validate()?;
    let normalized = softmax_normalize(&inject_self_confidence(s))?;
    let g = normalized.matrix();

    let mut current = g.clone();
    let mut nnz_history = vec![current.nnz()];
    progress(0, current.nnz());
    let mut per_depth = Vec::new();
    if config.retain_depths {
        per_depth.push(current.clone());
    }

    // running sum of the depths that enter the aggregate, summed in depth order
    let mut sum = match config.aggregation {
        Aggregation::IncludeInitial => Some(current.clone()),
        Aggregation::MinedOnly => None,
    };
    let mut summed = usize::from(sum.is_some());

    let mut depth = 0;
    let mut converged = false;
    while depth < config.max_depth {
        let next = propagate_step(g, &current, config.drop_tolerance)?;
        depth += 1;
        let delta = next.nnz().abs_diff(current.nnz());
        nnz_history.push(next.nnz());
        progress(depth, next.nnz());

        sum = Some(match sum {
            Some(acc) => linear_combination(&[(1.0, &acc), (1.0, &next)])?,
            None => next.clone(),
        });
        summed += 1;
        if config.retain_depths {
            per_depth.push(next.clone());
        }
        current = next;
        if delta < config.epsilon {
            converged = true;
            break;
        }
    }

    let aggregated = match sum {
        Some(total) => {
            let n = summed as f64;
            total.map_values(|v| v / n)
        }
        None => g.clone(),
    };

    Ok(PropagationResult {
        depth,
        per_depth,
        nnz_history,
        aggregated,
        converged,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::TrustRecord;

    fn mat(records: &[(usize, usize, f64)], m: usize) -> SparseTrustMatrix {
        SparseTrustMatrix::from_records(records, m).unwrap()
    }

    #[test]
    fn injection_fills_diagonal() {
        let s = inject_self_confidence(&SparseTrustMatrix::empty(3));
        assert_eq!(s.nnz(), 3);
        assert!((0..3).all(|i| s.get(i, i) == 1.0));

        let s = inject_self_confidence(&mat(&[(0, 0, 0.4)], 1));
        assert_eq!(s.get(0, 0), 1.0);

        let s = inject_self_confidence(&mat(&[(0, 1, 0.7)], 2));
        assert_eq!(
            s.to_records(),
            vec![
                TrustRecord::new(0, 0, 1.0),
                TrustRecord::new(0, 1, 0.7),
                TrustRecord::new(1, 1, 1.0)
            ]
        );
    }

    #[test]
    fn softmax_rows() {
        let g = softmax_normalize(&inject_self_confidence(&SparseTrustMatrix::empty(1))).unwrap();
        assert_eq!(g.matrix().get(0, 0), 1.0);
        assert!((g.row_denominators()[0] - 1f64.exp()).abs() < 1e-15);

        let g = softmax_normalize(&inject_self_confidence(&mat(&[(0, 1, 1.0)], 2))).unwrap();
        assert_eq!(g.matrix().get(0, 0), 0.5);
        assert_eq!(g.matrix().get(0, 1), 0.5);

        // e / (e + e^0.5) evaluated independently: 1 / (1 + e^-0.5)
        let g = softmax_normalize(&inject_self_confidence(&mat(&[(0, 1, 0.5)], 2))).unwrap();
        assert!((g.matrix().get(0, 0) - 0.622_459_331_201_854_6).abs() < 1e-12);
        assert!((g.matrix().get(0, 1) - 0.377_540_668_798_145_4).abs() < 1e-12);
    }

    #[test]
    fn softmax_rejects_empty_row() {
        let err = softmax_normalize(&mat(&[(0, 0, 1.0)], 2)).unwrap_err();
        assert!(matches!(err, Error::EmptyRow { row: 1 }));
    }

    #[test]
    fn identity_step() {
        let prev = mat(&[(0, 1, 0.3), (1, 2, 0.9), (2, 0, 0.1)], 3);
        let next = propagate_step(&SparseTrustMatrix::identity(3), &prev, 0.0).unwrap();
        assert_eq!(next, prev);
    }

    #[test]
    fn raw_transitivity() {
        let g = mat(&[(0, 1, 1.0), (1, 2, 1.0)], 3);
        let next = propagate_step(&g, &g, 0.0).unwrap();
        assert_eq!(next.get(0, 2), 1.0);
    }

    #[test]
    fn aggregate_means() {
        let a = mat(&[(0, 1, 1.0)], 3);
        assert_eq!(aggregate(std::slice::from_ref(&a)).unwrap(), a);
        let b = mat(&[(0, 2, 1.0)], 3);
        let mean = aggregate(&[a, b]).unwrap();
        assert_eq!(mean.get(0, 1), 0.5);
        assert_eq!(mean.get(0, 2), 0.5);
        assert!(matches!(aggregate(&[]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn single_entity() {
        let r = run_rga(&mat(&[(0, 0, 0.3)], 1), &RgaConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.depth <= 1);
        assert_eq!(r.aggregated.to_records(), vec![TrustRecord::new(0, 0, 1.0)]);
        assert!(r.nnz_history.iter().all(|&n| n == 1));
    }

    #[test]
    fn max_depth_one_records_one_step() {
        let s = mat(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], 4);
        let cfg = RgaConfig {
            max_depth: 1,
            ..RgaConfig::default()
        };
        let r = run_rga(&s, &cfg).unwrap();
        assert_eq!(r.depth, 1);
        assert_eq!(r.nnz_history.len(), 2);
        assert_eq!(r.per_depth.len(), 2);
        assert!(!r.converged);
    }

    #[test]
    fn mined_only_excludes_depth_zero() {
        let s = mat(&[(0, 1, 1.0), (1, 2, 1.0)], 3);
        let base = RgaConfig {
            max_depth: 2,
            epsilon: 1,
            ..RgaConfig::default()
        };
        let full = run_rga(&s, &base).unwrap();
        let mined = run_rga(
            &s,
            &RgaConfig {
                aggregation: Aggregation::MinedOnly,
                ..base
            },
        )
        .unwrap();
        let expect = aggregate(&full.per_depth[1..]).unwrap();
        assert_eq!(mined.aggregated, expect);
        assert_eq!(full.aggregated, aggregate(&full.per_depth).unwrap());
    }

    #[test]
    fn config_validation() {
        let s = SparseTrustMatrix::empty(2);
        for cfg in [
            RgaConfig {
                epsilon: 0,
                ..RgaConfig::default()
            },
            RgaConfig {
                max_depth: 0,
                ..RgaConfig::default()
            },
        ] {
            assert!(matches!(run_rga(&s, &cfg), Err(Error::InvalidParameter(_))));
        }
    }
}
