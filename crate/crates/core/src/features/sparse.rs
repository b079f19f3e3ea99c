use serde::{Deserialize, Serialize};

/// Compressed sparse row matrix.
///
/// Row `i` occupies `indices[indptr[i]..indptr[i + 1]]` / `values[..]`, column
/// indices strictly ascending. Zeros are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix<T> {
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

/// Raw token counts.
pub type CountMatrix = CsrMatrix<u32>;
/// tf-idf weights, or any real-valued features.
pub type WeightMatrix = CsrMatrix<f64>;

impl<T: Copy> CsrMatrix<T> {
    pub fn empty(n_cols: usize) -> Self {
        CsrMatrix {
            n_cols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Append a row. `entries` must have strictly ascending columns below
    /// `n_cols` and no zero values.
    pub fn push_row<I: IntoIterator<Item = (usize, T)>>(&mut self, entries: I) {
        for (j, v) in entries {
            debug_assert!(j < self.n_cols);
            debug_assert!(
                self.indices.len() == *self.indptr.last().unwrap()
                    || *self.indices.last().unwrap() < j
            );
            self.indices.push(j);
            self.values.push(v);
        }
        self.indptr.push(self.indices.len());
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = (&[usize], &[T])> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let (idx, vals) = self.row(i);
        idx.binary_search(&j).ok().map(|k| vals[k])
    }

    /// Rows `start..end` as a new matrix.
    pub fn slice_rows(&self, start: usize, end: usize) -> Self {
        let (a, b) = (self.indptr[start], self.indptr[end]);
        CsrMatrix {
            n_cols: self.n_cols,
            indptr: self.indptr[start..=end].iter().map(|p| p - a).collect(),
            indices: self.indices[a..b].to_vec(),
            values: self.values[a..b].to_vec(),
        }
    }

    /// Gather rows by index, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut out = CsrMatrix::empty(self.n_cols);
        for &i in rows {
            let (idx, vals) = self.row(i);
            out.push_row(idx.iter().copied().zip(vals.iter().copied()));
        }
        out
    }

    pub fn map_values<U: Copy>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            n_cols: self.n_cols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T: Copy + Default> CsrMatrix<T> {
    /// Expand to a dense row-major `n_rows × n_cols` buffer.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        self.rows()
            .map(|(idx, vals)| {
                let mut d = vec![T::default(); self.n_cols];
                for (&j, &v) in idx.iter().zip(vals) {
                    d[j] = v;
                }
                d
            })
            .collect()
    }
}

impl WeightMatrix {
    /// Build from dense rows, dropping zeros.
    pub fn from_dense(rows: &[Vec<f64>], n_cols: usize) -> Self {
        let mut m = CsrMatrix::empty(n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols);
            m.push_row(r.iter().copied().enumerate().filter(|&(_, v)| v != 0.0));
        }
        m
    }

    /// `row_i · w` for a dense vector `w` of length `n_cols`.
    pub fn row_dot(&self, i: usize, w: &[f64]) -> f64 {
        let (idx, vals) = self.row(i);
        idx.iter().zip(vals).map(|(&j, &v)| v * w[j]).sum()
    }
}
