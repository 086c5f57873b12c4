use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Square sparse matrix in compressed sparse row layout with sorted column
/// indices in each row. Column indices are `u32` to halve index traffic.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given sparsity pattern; `rows[i]` must be sorted
    /// and free of duplicates.
    pub fn from_pattern(rows: &[Vec<usize>]) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for r in rows {
            col_idx.extend(r.iter().map(|&j| index(j)));
            row_ptr.push(col_idx.len());
        }
        Self::from_raw(n, row_ptr, col_idx)
    }

    /// Zero matrix from a ready-made CSR pattern.
    pub fn from_raw(n: usize, row_ptr: Vec<usize>, col_idx: Vec<u32>) -> Self {
        assert_eq!(row_ptr.len(), n + 1);
        assert_eq!(*row_ptr.last().unwrap(), col_idx.len());
        let values = vec![0.0; col_idx.len()];
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j, _) in triplets {
            rows[i].push(j);
        }
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        let mut m = Self::from_pattern(&rows);
        for &(i, j, v) in triplets {
            m.add(i, j, v);
        }
        m
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let mut triplets = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(rows.len(), &triplets)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (start, end) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[start..end].binary_search(&index(j)).ok().map(|p| start + p)
    }

    /// Adds `v` to entry `(i, j)`, which must belong to the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self.position(i, j).unwrap_or_else(|| panic!("entry ({i}, {j}) outside the sparsity pattern"));
        self.values[p] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (start, end) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[start..end], &self.values[start..end])
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, v)| v * x[j as usize]).sum();
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j as usize, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for (i, row) in dense.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j as usize] = v;
            }
        }
        dense
    }

    /// Writes the matrix in MatrixMarket coordinate format.
    pub fn write_matrix_market(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let write = |w: &mut std::io::BufWriter<std::fs::File>| -> std::io::Result<()> {
            writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
            writeln!(w, "{} {} {}", self.n, self.n, self.nnz())?;
            for i in 0..self.n {
                let (cols, vals) = self.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
                }
            }
            w.flush()
        };
        write(&mut w).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn index(j: usize) -> u32 {
    u32::try_from(j).expect("matrix dimension exceeds u32 range")
}

/// Writes a vector in MatrixMarket array format.
pub fn write_vector_market(values: &[f64], path: &Path) -> Result<()> {
    let mut out = format!("%%MatrixMarket matrix array real general\n{} 1\n", values.len());
    for v in values {
        out.push_str(&format!("{v:.17e}\n"));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 2.0), (0, 0, 3.0), (1, 1, 5.0)]);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.matvec(&[1.0, 1.0]), vec![6.0, 5.0]);
        assert_eq!(m.asymmetry(), 2.0);
    }

    #[test]
    fn matrix_market_dump() {
        let m = CsrMatrix::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        m.write_matrix_market(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n2 2 4\n"));
        assert_eq!(text.lines().count(), 6);
    }
}
