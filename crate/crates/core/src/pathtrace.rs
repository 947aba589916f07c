//! Explains a propagated trust value by listing the gossip routes behind it.
//!
//! `T^(d)[i][k]` is a sum over walks `i -> ... -> k` of `d + 1` edges in `G`
//! (self-loops included), each contributing the product of its weights. The
//! trace walks the trust lists depth-first with an explicit stack.

use crate::error::{Error, Result};
use crate::matrix::SparseTrustMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct TrustPath {
    /// Visited entities, starting at the source and ending at the target.
    pub nodes: Vec<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    pub paths: Vec<TrustPath>,
    pub total: f64,
}

/// Enumerates all walks of exactly `depth + 1` edges from `source` to
/// `target` in `g`, i.e. the routes contributing to `T^(depth)[source][target]`.
///
/// The number of walks grows exponentially with depth; intended for small
/// graphs.
pub fn trace_paths(
    g: &SparseTrustMatrix,
    source: usize,
    target: usize,
    depth: usize,
) -> Result<PathTrace> {
    let m = g.dim();
    for id in [source, target] {
        if id >= m {
            return Err(Error::EntityOutOfRange { id, m });
        }
    }
    let hops = depth + 1;
    let mut paths = Vec::new();
    // (next child offset to try) per frame, plus the current route and weights
    let mut route = vec![source];
    let mut weights = vec![1.0];
    let mut cursor = vec![0usize];

    while let Some(&node) = route.last() {
        let level = route.len() - 1;
        if level == hops {
            if node == target {
                paths.push(TrustPath {
                    nodes: route.clone(),
                    weight: *weights.last().unwrap(),
                });
            }
            route.pop();
            weights.pop();
            cursor.pop();
            continue;
        }
        let (cols, vals) = g.row(node);
        let at = cursor[level];
        if at == cols.len() {
            route.pop();
            weights.pop();
            cursor.pop();
            continue;
        }
        cursor[level] += 1;
        let w = weights[level] * vals[at];
        route.push(cols[at]);
        weights.push(w);
        cursor.push(0);
    }

    let total = paths.iter().map(|p| p.weight).sum();
    Ok(PathTrace { paths, total })
}
