//! Row-compressed operators for the matrix-free Lindblad right-hand side.
//! Ladder-built operators have a handful of nonzeros per row, which keeps the
//! integrate path usable at truncations where the dense superoperator would
//! not fit in memory.

use ndarray::Array2;

use crate::C64;

#[derive(Debug, Clone)]
pub(crate) struct SparseOp {
    n: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseOp {
    pub(crate) fn from_dense(m: &Array2<C64>) -> Self {
        let rows = m
            .rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, z)| **z != C64::new(0.0, 0.0))
                    .map(|(j, z)| (j, *z))
                    .collect()
            })
            .collect();
        Self { n: m.nrows(), rows }
    }

    /// `out += self · rho`
    pub(crate) fn left_mul_add(&self, rho: &Array2<C64>, out: &mut Array2<C64>) {
        let n = self.n;
        let rho = rho.as_standard_layout();
        let src = rho.as_slice().expect("standard layout");
        let dst = out.as_slice_mut().expect("standard layout");
        for (i, row) in self.rows.iter().enumerate() {
            let out_row = &mut dst[i * n..(i + 1) * n];
            for &(k, v) in row {
                for (o, r) in out_row.iter_mut().zip(&src[k * n..(k + 1) * n]) {
                    *o += v * r;
                }
            }
        }
    }

    /// `out += rho · self`
    pub(crate) fn right_mul_add(&self, rho: &Array2<C64>, out: &mut Array2<C64>) {
        let n = self.n;
        let rho = rho.as_standard_layout();
        let src = rho.as_slice().expect("standard layout");
        let dst = out.as_slice_mut().expect("standard layout");
        for i in 0..n {
            let out_row = &mut dst[i * n..(i + 1) * n];
            for (k, &r) in src[i * n..(i + 1) * n].iter().enumerate() {
                if r == C64::new(0.0, 0.0) {
                    continue;
                }
                for &(j, v) in &self.rows[k] {
                    out_row[j] += r * v;
                }
            }
        }
    }

    pub(crate) fn left_mul(&self, rho: &Array2<C64>) -> Array2<C64> {
        let mut out = Array2::zeros((self.n, self.n));
        self.left_mul_add(rho, &mut out);
        out
    }
}
