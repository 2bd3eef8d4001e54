//! Small dense helpers shared by the physics modules.

use ndarray::{Array1, Array2, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};

use crate::error::{Error, Result};
use crate::C64;

pub(crate) fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub(crate) fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

/// Kronecker product `a ⊗ b`; `a` indexes the slow block.
pub(crate) fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &y| *o = x * y);
    }
    out
}

/// Largest elementwise `|m - m†|`.
pub(crate) fn hermiticity_error(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

pub(crate) fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
pub(crate) fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub(crate) fn trace(m: &Array2<C64>) -> C64 {
    m.diag().sum()
}

pub(crate) fn symmetrize(m: &Array2<C64>) -> Array2<C64> {
    (m + &dagger(m)).mapv(|z| z * 0.5)
}

/// Column-major copy. The Hermitian LAPACK wrappers read row-major complex
/// input as its transpose, which for a Hermitian matrix is its conjugate.
pub(crate) fn fortran(m: &Array2<C64>) -> Array2<C64> {
    let mut out = Array2::zeros(m.dim().f());
    out.assign(m);
    out
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
pub(crate) fn eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    Ok(fortran(&symmetrize(m)).eigh(UPLO::Lower)?)
}

pub(crate) fn eigvalsh(m: &Array2<C64>) -> Result<Array1<f64>> {
    use ndarray_linalg::EigValsh;
    Ok(fortran(&symmetrize(m)).eigvalsh(UPLO::Lower)?)
}

/// Clamp eigenvalues in `[-clamp, 0)` to zero; anything below is an error.
pub(crate) fn clamp_spectrum(values: &mut Array1<f64>, clamp: f64) -> Result<()> {
    for v in values.iter_mut() {
        if *v < -clamp {
            return Err(Error::NotPsd(*v));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Principal square root of a Hermitian PSD matrix.
pub(crate) fn psd_sqrt(m: &Array2<C64>, clamp: f64) -> Result<Array2<C64>> {
    let (mut w, v) = eigh(m)?;
    clamp_spectrum(&mut w, clamp)?;
    let mut scaled = v.clone();
    for (mut col, &lam) in scaled.columns_mut().into_iter().zip(w.iter()) {
        col.mapv_inplace(|z| z * lam.sqrt());
    }
    Ok(scaled.dot(&dagger(&v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn kron_block_layout() {
        let a = array![[C64::new(1.0, 0.0), C64::new(2.0, 0.0)], [C64::new(0.0, 0.0), C64::new(3.0, 0.0)]];
        let b = identity(2);
        let k = kron(&a, &b);
        assert_eq!(k[[0, 2]], C64::new(2.0, 0.0));
        assert_eq!(k[[1, 3]], C64::new(2.0, 0.0));
        assert_eq!(k[[3, 3]], C64::new(3.0, 0.0));
        assert_eq!(k[[2, 0]], C64::new(0.0, 0.0));
    }

    #[test]
    fn sqrt_squares_back() {
        let m = array![[C64::new(2.0, 0.0), C64::new(0.0, 1.0)], [C64::new(0.0, -1.0), C64::new(2.0, 0.0)]];
        let r = psd_sqrt(&m, 1e-8).unwrap();
        let back = r.dot(&r);
        assert!(max_abs(&(back - &m)) < 1e-12);
    }

    #[test]
    fn clamp_rejects_large_negative() {
        let mut w = Array1::from(vec![-1e-9, 0.5]);
        clamp_spectrum(&mut w, 1e-8).unwrap();
        assert_eq!(w[0], 0.0);
        let mut w = Array1::from(vec![-1e-6, 0.5]);
        assert!(matches!(clamp_spectrum(&mut w, 1e-8), Err(Error::NotPsd(_))));
    }

    #[test]
    fn eigh_reconstructs_complex_hermitian() {
        let m = array![[C64::new(2.0, 0.0), C64::new(0.5, 1.0)], [C64::new(0.5, -1.0), C64::new(-1.0, 0.0)]];
        let (w, v) = eigh(&m).unwrap();
        for k in 0..2 {
            let lhs = m.dot(&v.column(k));
            let rhs = v.column(k).mapv(|z| z * w[k]);
            assert!(lhs.iter().zip(&rhs).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn general_eig_on_row_major_input() {
        use ndarray_linalg::Eig;
        let m = array![[C64::new(1.0, 2.0), C64::new(0.0, 1.0)], [C64::new(3.0, 0.0), C64::new(-1.0, 0.5)]];
        let (w, v) = m.eig().unwrap();
        for k in 0..2 {
            let lhs = m.dot(&v.column(k));
            let rhs = v.column(k).mapv(|z| z * w[k]);
            assert!(lhs.iter().zip(&rhs).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }
}
