//! Square sparse trust matrices in compressed-row form, plus the handful of
//! kernels the propagation engine and the baselines need.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Output entries of [`spmm`] with magnitude below this are dropped.
pub const DEFAULT_DROP_TOLERANCE: f64 = 1e-15;

/// One directed trust statement `[trustor, trustee, value]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustRecord {
    pub trustor: usize,
    pub trustee: usize,
    pub value: f64,
}

impl TrustRecord {
    pub fn new(trustor: usize, trustee: usize, value: f64) -> Self {
        Self {
            trustor,
            trustee,
            value,
        }
    }
}

impl From<(usize, usize, f64)> for TrustRecord {
    fn from((trustor, trustee, value): (usize, usize, f64)) -> Self {
        Self::new(trustor, trustee, value)
    }
}

/// Sorted adjacency list of one entity: who it trusts and how much.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustList {
    pub entity: usize,
    pub neighbors: Vec<(usize, f64)>,
}

/// An `m x m` trust matrix stored row-compressed.
///
/// Every row's column indices are strictly ascending and no stored value is
/// zero, so `nnz` is exactly the number of stored entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTrustMatrix {
    m: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseTrustMatrix {
    pub fn empty(m: usize) -> Self {
        Self {
            m,
            indptr: vec![0; m + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Diagonal of ones.
    pub fn identity(m: usize) -> Self {
        Self {
            m,
            indptr: (0..=m).collect(),
            indices: (0..m).collect(),
            values: vec![1.0; m],
        }
    }

    /// Builds a matrix from ternary records.
    ///
    /// Later records overwrite earlier ones with the same key. Zero values
    /// carry no evidence and are not stored.
    pub fn from_records<R>(records: &[R], m: usize) -> Result<Self>
    where
        R: Copy + Into<TrustRecord>,
    {
        let mut keyed = Vec::with_capacity(records.len());
        for (index, r) in records.iter().enumerate() {
            let r: TrustRecord = (*r).into();
            if r.trustor >= m || r.trustee >= m {
                return Err(Error::IdOutOfRange {
                    index,
                    trustor: r.trustor,
                    trustee: r.trustee,
                    m,
                });
            }
            if !(0.0..=1.0).contains(&r.value) {
                return Err(Error::ValueOutOfRange {
                    index,
                    value: r.value,
                });
            }
            keyed.push(r);
        }
        // stable: equal keys keep input order, so the last one wins below
        keyed.sort_by_key(|r| (r.trustor, r.trustee));

        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for r in keyed {
            let row = &mut rows[r.trustor];
            match row.last_mut() {
                Some(last) if last.0 == r.trustee => last.1 = r.value,
                _ => row.push((r.trustee, r.value)),
            }
        }
        for row in rows.iter_mut() {
            row.retain(|&(_, v)| v != 0.0);
        }
        Ok(Self::from_sorted_rows(m, rows))
    }

    /// Rows must already be sorted by column with no duplicates or zeros.
    pub(crate) fn from_sorted_rows(m: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        debug_assert_eq!(rows.len(), m);
        let total = rows.iter().map(Vec::len).sum();
        let mut indptr = Vec::with_capacity(m + 1);
        let mut indices = Vec::with_capacity(total);
        let mut values = Vec::with_capacity(total);
        indptr.push(0);
        for row in rows {
            for (j, v) in row {
                debug_assert!(j < m && v != 0.0);
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Self {
            m,
            indptr,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column indices, values)` of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (cols, vals) = self.row(i);
        cols.iter().copied().zip(vals.iter().copied())
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).1.iter().sum()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.m {
            return 0.0;
        }
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|p| vals[p]).unwrap_or(0.0)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.m && self.row(i).0.binary_search(&j).is_ok()
    }

    /// Stored entries, excluding the diagonal, of row `i`.
    pub fn out_degree(&self, i: usize) -> usize {
        self.row_nnz(i) - usize::from(self.contains(i, i))
    }

    /// All stored entries in row-major order.
    pub fn records(&self) -> impl Iterator<Item = TrustRecord> + '_ {
        (0..self.m).flat_map(move |i| self.row_iter(i).map(move |(j, v)| TrustRecord::new(i, j, v)))
    }

    pub fn to_records(&self) -> Vec<TrustRecord> {
        self.records().collect()
    }

    /// Fraction of the `m x m` cells that hold a stored entry.
    pub fn sparsity_degree(&self) -> f64 {
        if self.m == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.m as f64 * self.m as f64)
    }

    pub fn trust_list(&self, i: usize) -> Result<TrustList> {
        if i >= self.m {
            return Err(Error::EntityOutOfRange { id: i, m: self.m });
        }
        Ok(TrustList {
            entity: i,
            neighbors: self.row_iter(i).collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.m];
        // row-major traversal pushes into each output row in ascending order
        for r in self.records() {
            rows[r.trustee].push((r.trustor, r.value));
        }
        Self::from_sorted_rows(self.m, rows)
    }

    /// Copy with every diagonal cell set to `value`.
    pub fn with_diagonal(&self, value: f64) -> Self {
        let rows = (0..self.m)
            .map(|i| {
                let mut row: Vec<(usize, f64)> = self.row_iter(i).filter(|&(j, _)| j != i).collect();
                if value != 0.0 {
                    let at = row.partition_point(|&(j, _)| j < i);
                    row.insert(at, (i, value));
                }
                row
            })
            .collect();
        Self::from_sorted_rows(self.m, rows)
    }

    /// Applies `f` to every stored value of row `i` as a slice; zeros that
    /// come out are dropped.
    pub(crate) fn map_rows<F>(&self, f: F) -> Self
    where
        F: Fn(usize, &[f64]) -> Vec<f64> + Sync,
    {
        let rows = (0..self.m)
            .into_par_iter()
            .map(|i| {
                let (cols, vals) = self.row(i);
                let mapped = f(i, vals);
                debug_assert_eq!(mapped.len(), vals.len());
                cols.iter()
                    .copied()
                    .zip(mapped)
                    .filter(|&(_, v)| v != 0.0)
                    .collect()
            })
            .collect();
        Self::from_sorted_rows(self.m, rows)
    }

    /// Entrywise `f(v)` over stored values.
    pub fn map_values<F>(&self, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.map_rows(|_, vals| vals.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_values(|v| v * factor)
    }
}

/// `nnz / (rows * cols)`.
pub fn sparsity_degree(nnz: usize, rows: usize, cols: usize) -> Result<f64> {
    if rows == 0 || cols == 0 {
        return Err(Error::DegenerateInput(format!(
            "sparsity degree of a {rows} x {cols} matrix"
        )));
    }
    Ok(nnz as f64 / (rows as f64 * cols as f64))
}

fn check_shapes(a: &SparseTrustMatrix, b: &SparseTrustMatrix) -> Result<()> {
    if a.m != b.m {
        return Err(Error::ShapeMismatch {
            left: a.m,
            right: b.m,
        });
    }
    Ok(())
}

/// Per-row dense scratch space for row-by-row products and sums.
struct Accumulator {
    values: Vec<f64>,
    touched: Vec<usize>,
    seen: Vec<bool>,
}

impl Accumulator {
    fn new(m: usize) -> Self {
        Self {
            values: vec![0.0; m],
            touched: Vec::new(),
            seen: vec![false; m],
        }
    }

    #[inline]
    fn add(&mut self, col: usize, v: f64) {
        if !self.seen[col] {
            self.seen[col] = true;
            self.touched.push(col);
        }
        self.values[col] += v;
    }

    /// Drains into a sorted row, keeping values with `|v| >= tol` and `v != 0`.
    fn drain(&mut self, tol: f64) -> Vec<(usize, f64)> {
        self.touched.sort_unstable();
        let mut row = Vec::with_capacity(self.touched.len());
        for &c in &self.touched {
            let v = self.values[c];
            if v != 0.0 && v.abs() >= tol {
                row.push((c, v));
            }
            self.values[c] = 0.0;
            self.seen[c] = false;
        }
        self.touched.clear();
        row
    }
}

/// Sparse product `a * b`, dropping entries below [`DEFAULT_DROP_TOLERANCE`].
pub fn spmm(a: &SparseTrustMatrix, b: &SparseTrustMatrix) -> Result<SparseTrustMatrix> {
    spmm_with_tolerance(a, b, DEFAULT_DROP_TOLERANCE)
}

/// Sparse product `a * b`, dropping entries with magnitude below `tol`.
///
/// Rows are computed in parallel. Within a row, terms are accumulated in
/// ascending order of the inner index, so the result does not depend on the
/// number of worker threads.
pub fn spmm_with_tolerance(
    a: &SparseTrustMatrix,
    b: &SparseTrustMatrix,
    tol: f64,
) -> Result<SparseTrustMatrix> {
    check_shapes(a, b)?;
    let m = a.m;
    let rows: Vec<Vec<(usize, f64)>> = (0..m)
        .into_par_iter()
        .map_init(
            || Accumulator::new(m),
            |acc, i| {
                for (j, a_ij) in a.row_iter(i) {
                    for (k, b_jk) in b.row_iter(j) {
                        acc.add(k, a_ij * b_jk);
                    }
                }
                acc.drain(tol)
            },
        )
        .collect();
    Ok(SparseTrustMatrix::from_sorted_rows(m, rows))
}

/// `sum_t coef_t * matrix_t`, accumulated per cell in the order the terms are
/// given. Exact zeros are dropped.
pub fn linear_combination(terms: &[(f64, &SparseTrustMatrix)]) -> Result<SparseTrustMatrix> {
    let Some(&(_, first)) = terms.first() else {
        return Err(Error::DegenerateInput("linear combination of no matrices".into()));
    };
    for (_, t) in terms {
        check_shapes(first, t)?;
    }
    let m = first.m;
    let rows = (0..m)
        .into_par_iter()
        .map_init(
            || Accumulator::new(m),
            |acc, i| {
                for &(coef, t) in terms {
                    for (j, v) in t.row_iter(i) {
                        acc.add(j, coef * v);
                    }
                }
                acc.drain(0.0)
            },
        )
        .collect();
    Ok(SparseTrustMatrix::from_sorted_rows(m, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(records: &[(usize, usize, f64)], dim: usize) -> SparseTrustMatrix {
        SparseTrustMatrix::from_records(records, dim).unwrap()
    }

    #[test]
    fn single_record() {
        let s = m(&[(0, 1, 0.5)], 2);
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.get(0, 1), 0.5);
    }

    #[test]
    fn last_record_wins() {
        let s = m(&[(0, 1, 0.5), (0, 1, 0.9)], 2);
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.get(0, 1), 0.9);
    }

    #[test]
    fn zero_means_absent() {
        assert_eq!(m(&[(0, 1, 0.0)], 2).nnz(), 0);
        // a later zero erases an earlier statement
        assert_eq!(m(&[(0, 1, 0.4), (0, 1, 0.0)], 2).nnz(), 0);
    }

    #[test]
    fn out_of_range_id_names_record() {
        let err = SparseTrustMatrix::from_records(&[(0, 1, 0.5), (2, 0, 0.1)], 2).unwrap_err();
        assert!(matches!(err, Error::IdOutOfRange { index: 1, .. }), "{err}");
    }

    #[test]
    fn value_range_checked() {
        for bad in [1.5, -0.1, f64::NAN] {
            let err = SparseTrustMatrix::from_records(&[(0, 1, bad)], 2).unwrap_err();
            assert!(matches!(err, Error::ValueOutOfRange { index: 0, .. }));
        }
    }

    #[test]
    fn sparsity_degree_table_rows() {
        let epinions = sparsity_degree(664_823, 49_289, 139_738).unwrap() * 100.0;
        assert!((epinions - 0.0097).abs() < 0.0001, "{epinions}");
        let ciao = sparsity_degree(278_483, 7_375, 99_746).unwrap() * 100.0;
        assert!((ciao - 0.0379).abs() < 0.0001, "{ciao}");
        assert_eq!(sparsity_degree(0, 3, 4).unwrap(), 0.0);
        assert!(matches!(sparsity_degree(1, 0, 4), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn spmm_chains() {
        let a = m(&[(0, 1, 1.0)], 3);
        let b = m(&[(1, 2, 1.0)], 3);
        let c = spmm(&a, &b).unwrap();
        assert_eq!(c.to_records(), vec![TrustRecord::new(0, 2, 1.0)]);

        let a = m(&[(0, 1, 0.5)], 3);
        let b = m(&[(1, 2, 0.5)], 3);
        assert_eq!(spmm(&a, &b).unwrap().get(0, 2), 0.25);
    }

    #[test]
    fn spmm_shape_mismatch() {
        let err = spmm(&SparseTrustMatrix::empty(2), &SparseTrustMatrix::empty(3)).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn spmm_drops_dust() {
        let a = m(&[(0, 1, 1e-8)], 3);
        let b = m(&[(1, 2, 1e-8)], 3);
        assert_eq!(spmm(&a, &b).unwrap().nnz(), 0);
        assert_eq!(spmm_with_tolerance(&a, &b, 0.0).unwrap().nnz(), 1);
    }

    #[test]
    fn trust_list_sorted() {
        let s = m(&[(0, 2, 0.3), (0, 1, 0.7)], 5);
        assert_eq!(s.trust_list(0).unwrap().neighbors, vec![(1, 0.7), (2, 0.3)]);
        assert!(s.trust_list(3).unwrap().neighbors.is_empty());
        assert!(matches!(s.trust_list(5), Err(Error::EntityOutOfRange { id: 5, m: 5 })));
        let injected = s.with_diagonal(1.0);
        assert!(injected.trust_list(4).unwrap().neighbors.contains(&(4, 1.0)));
    }

    #[test]
    fn transpose_and_combination() {
        let s = m(&[(0, 1, 0.5), (2, 1, 0.25), (1, 0, 1.0)], 3);
        let t = s.transpose();
        assert_eq!(t.get(1, 0), 0.5);
        assert_eq!(t.get(1, 2), 0.25);
        assert_eq!(t.get(0, 1), 1.0);
        let sum = linear_combination(&[(1.0, &s), (-1.0, &s)]).unwrap();
        assert_eq!(sum.nnz(), 0);
    }

    #[test]
    fn out_degree_ignores_diagonal() {
        let s = m(&[(0, 0, 1.0), (0, 1, 0.5), (1, 0, 0.5)], 2);
        assert_eq!(s.out_degree(0), 1);
        assert_eq!(s.out_degree(1), 1);
    }
}
