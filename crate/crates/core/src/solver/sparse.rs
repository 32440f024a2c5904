use rayon::prelude::*;

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

/// Below this size matrix-vector products run serially.
const PAR_THRESHOLD: usize = 20_000;

impl CsrMatrix {
    /// Builds an `n × n` matrix, summing duplicate entries.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut col = Vec::with_capacity(t.len());
        let mut val: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(j);
                val.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col,
            val,
        }
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()]
            .iter()
            .copied()
            .zip(self.val[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col[r.clone()].binary_search(&j) {
            Ok(k) => self.val[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v).sum())
            .collect()
    }

    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            s += self.val[k] * x[self.col[k]];
        }
        s
    }

    /// `y = A x`. Each row is summed in a fixed order, so the result does not
    /// depend on the thread count.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        if self.n >= PAR_THRESHOLD {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(i, yi)| *yi = self.row_dot(i, x));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.row_dot(i, x);
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Self {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                t.push((j, i, v));
            }
        }
        Self::from_triplets(self.n, t)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            self.row(i)
                .all(|(j, v)| (v - self.get(j, i)).abs() <= tol * v.abs().max(1.0))
        })
    }

    /// Principal submatrix on `keep` (sorted, distinct) and the coupling block
    /// from `keep` rows to the remaining columns.
    pub fn split(&self, keep: &[bool]) -> (CsrMatrix, CsrMatrix, Vec<usize>, Vec<usize>) {
        let mut inner_id = vec![usize::MAX; self.n];
        let mut outer_id = vec![usize::MAX; self.n];
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        for i in 0..self.n {
            if keep[i] {
                inner_id[i] = inner.len();
                inner.push(i);
            } else {
                outer_id[i] = outer.len();
                outer.push(i);
            }
        }
        let mut ti = Vec::new();
        let mut to = Vec::new();
        for (r, &i) in inner.iter().enumerate() {
            for (j, v) in self.row(i) {
                if keep[j] {
                    ti.push((r, inner_id[j], v));
                } else {
                    to.push((r, outer_id[j], v));
                }
            }
        }
        let ii = Self::from_triplets(inner.len(), ti);
        // Rectangular block stored with `n` = rows; columns index `outer`.
        let mut io = Self::from_triplets(inner.len().max(outer.len()), to);
        io.row_ptr.truncate(inner.len() + 1);
        io.n = inner.len();
        (ii, io, inner, outer)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
