//! Dense, brute-force reference implementations.
//!
//! Everything here works on plain `Vec<Vec<f64>>` matrices and explicit path
//! enumeration. Nothing depends on `rga-core`; the point is to have a second,
//! slow and obvious route to every number the sparse engine produces.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub type Dense = Vec<Vec<f64>>;

pub fn zeros(m: usize) -> Dense {
    vec![vec![0.0; m]; m]
}

pub fn from_triplets(m: usize, triplets: &[(usize, usize, f64)]) -> Dense {
    let mut d = zeros(m);
    for &(i, j, v) in triplets {
        d[i][j] = v;
    }
    d
}

/// Plain triple loop, summing over the inner index in ascending order.
pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let m = a.len();
    let mut out = zeros(m);
    for i in 0..m {
        for k in 0..m {
            let mut acc = 0.0;
            for j in 0..m {
                acc += a[i][j] * b[j][k];
            }
            out[i][k] = acc;
        }
    }
    out
}

pub fn transpose(a: &Dense) -> Dense {
    let m = a.len();
    let mut out = zeros(m);
    for i in 0..m {
        for j in 0..m {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn row_sums(a: &Dense) -> Vec<f64> {
    a.iter().map(|r| r.iter().sum()).collect()
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    let mut worst: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

/// Diagonal set to one, then each row mapped through exp over its nonzero
/// cells and divided by the row total.
pub fn dense_normalize(raw: &Dense) -> Dense {
    let m = raw.len();
    let mut s = raw.clone();
    for (i, row) in s.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut g = zeros(m);
    for i in 0..m {
        let total: f64 = s[i].iter().filter(|v| **v != 0.0).map(|v| v.exp()).sum();
        for j in 0..m {
            if s[i][j] != 0.0 {
                g[i][j] = s[i][j].exp() / total;
            }
        }
    }
    g
}

/// Dense end-to-end reference: normalize, take `depth` further products with
/// G, and average every computed level (level 0 = G).
pub fn dense_rga(raw: &Dense, depth: usize) -> (Vec<Dense>, Dense) {
    let g = dense_normalize(raw);
    let mut levels = vec![g.clone()];
    for _ in 0..depth {
        let next = matmul(&g, levels.last().unwrap());
        levels.push(next);
    }
    let m = raw.len();
    let mut avg = zeros(m);
    for level in &levels {
        for i in 0..m {
            for j in 0..m {
                avg[i][j] += level[i][j];
            }
        }
    }
    let n = levels.len() as f64;
    for row in avg.iter_mut() {
        for v in row.iter_mut() {
            *v /= n;
        }
    }
    (levels, avg)
}

pub fn nnz(a: &Dense) -> usize {
    a.iter().flatten().filter(|v| **v != 0.0).count()
}

pub fn pattern(a: &Dense) -> BTreeSet<(usize, usize)> {
    let mut p = BTreeSet::new();
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if *v != 0.0 {
                p.insert((i, j));
            }
        }
    }
    p
}

/// Reflexive-transitive closure by breadth-first search from every node.
pub fn bfs_closure(m: usize, edges: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    let mut adj = vec![Vec::new(); m];
    for &(i, j) in edges {
        adj[i].push(j);
    }
    let mut closure = BTreeSet::new();
    for s in 0..m {
        let mut seen = vec![false; m];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(u) = queue.pop_front() {
            closure.insert((s, u));
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    closure
}

/// Sum over every walk of exactly `len` edges from `from` to `to` of the
/// product of its weights, enumerated one walk at a time.
pub fn walk_sum(g: &Dense, from: usize, to: usize, len: usize) -> f64 {
    fn go(g: &Dense, node: usize, to: usize, left: usize, acc: f64, total: &mut f64) {
        if left == 0 {
            if node == to {
                *total += acc;
            }
            return;
        }
        for (next, &w) in g[node].iter().enumerate() {
            if w != 0.0 {
                go(g, next, to, left - 1, acc * w, total);
            }
        }
    }
    let mut total = 0.0;
    go(g, from, to, len, 1.0, &mut total);
    total
}

/// Guha-style combined operator from dense matrix algebra, summed over
/// `steps` powers and clamped to [0, 1].
pub fn dense_guha(t: &Dense, alphas: [f64; 4], steps: usize) -> Dense {
    let m = t.len();
    let tt = transpose(t);
    let co = matmul(&tt, t);
    let coupling = matmul(t, &tt);
    let mut c = zeros(m);
    for i in 0..m {
        for j in 0..m {
            c[i][j] = alphas[0] * t[i][j]
                + alphas[1] * co[i][j]
                + alphas[2] * tt[i][j]
                + alphas[3] * coupling[i][j];
        }
    }
    let mut power = c.clone();
    let mut acc = c.clone();
    for _ in 1..steps {
        power = matmul(&power, &c);
        for i in 0..m {
            for j in 0..m {
                acc[i][j] += power[i][j];
            }
        }
    }
    for row in acc.iter_mut() {
        for v in row.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
    }
    acc
}

/// Every simple path from `source`, as node sequences.
pub fn simple_paths_from(t: &Dense, source: usize) -> Vec<Vec<usize>> {
    fn go(t: &Dense, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        let last = *path.last().unwrap();
        for (next, &w) in t[last].iter().enumerate() {
            if w != 0.0 && !path.contains(&next) {
                path.push(next);
                go(t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut vec![source], &mut out);
    out
}

/// MoleTrust by explicit path enumeration: a node's distance is its shortest
/// simple path length; its trust is the weighted mean over predecessors one
/// step closer whose own trust passes the threshold.
pub fn path_mole_trust(t: &Dense, source: usize, mpd: usize, threshold: f64) -> BTreeMap<usize, f64> {
    let m = t.len();
    let mut dist = vec![usize::MAX; m];
    for p in simple_paths_from(t, source) {
        let last = *p.last().unwrap();
        dist[last] = dist[last].min(p.len() - 1);
    }
    fn trust(t: &Dense, dist: &[usize], source: usize, node: usize, threshold: f64) -> Option<f64> {
        if node == source {
            return Some(1.0);
        }
        let d = dist[node];
        if d == 1 {
            return Some(t[source][node]);
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for p in 0..t.len() {
            if dist[p] != usize::MAX && dist[p] + 1 == d && t[p][node] != 0.0 {
                if let Some(tp) = trust(t, dist, source, p, threshold) {
                    if tp >= threshold {
                        num += tp * t[p][node];
                        den += tp;
                    }
                }
            }
        }
        (den > 0.0).then(|| num / den)
    }
    let mut out = BTreeMap::new();
    for node in 0..m {
        if node != source && dist[node] != usize::MAX && dist[node] <= mpd {
            if let Some(v) = trust(t, &dist, source, node, threshold) {
                out.insert(node, v);
            }
        }
    }
    out
}

/// TidalTrust by explicit enumeration of the shortest simple paths between
/// `source` and `sink`.
pub fn path_tidal_trust(t: &Dense, source: usize, sink: usize, cutoff: f64) -> Option<f64> {
    if source == sink {
        return None;
    }
    let paths: Vec<Vec<usize>> = simple_paths_from(t, source)
        .into_iter()
        .filter(|p| *p.last().unwrap() == sink)
        .collect();
    let shortest = paths.iter().map(|p| p.len()).min()?;
    let shortest: Vec<&Vec<usize>> = paths.iter().filter(|p| p.len() == shortest).collect();

    // rating of `node`, sitting at position `pos` on some shortest path
    fn rating(t: &Dense, paths: &[&Vec<usize>], node: usize, pos: usize, sink: usize, cutoff: f64) -> Option<f64> {
        if t[node][sink] != 0.0 && pos + 2 == paths[0].len() {
            return Some(t[node][sink]);
        }
        let children: BTreeSet<usize> = paths
            .iter()
            .filter(|p| p[pos] == node)
            .map(|p| p[pos + 1])
            .collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for c in children {
            let w = t[node][c];
            if w >= cutoff {
                if let Some(r) = rating(t, paths, c, pos + 1, sink, cutoff) {
                    num += w * r;
                    den += w;
                }
            }
        }
        (den > 0.0).then(|| num / den)
    }
    rating(t, &shortest, source, 0, sink, cutoff)
}

/// Mean of |binomial(n, p) - n p| <= 3 sigma band, as inclusive integer bounds.
pub fn binomial_band(n: usize, p: f64, sigmas: f64) -> (f64, f64) {
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    (mean - sigmas * sd, mean + sigmas * sd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_sum_matches_power() {
        let g = dense_normalize(&from_triplets(3, &[(0, 1, 1.0), (1, 2, 0.5)]));
        let g3 = matmul(&g, &matmul(&g, &g));
        for i in 0..3 {
            for k in 0..3 {
                assert!((walk_sum(&g, i, k, 3) - g3[i][k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn closure_of_chain() {
        let c = bfs_closure(3, &[(0, 1), (1, 2)]);
        assert_eq!(c.len(), 6);
        assert!(c.contains(&(0, 2)));
        assert!(!c.contains(&(2, 0)));
    }
}
