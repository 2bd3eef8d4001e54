//! Horodecki criterion for CHSH violation of a two-qubit state.
//!
//! Pauli convention: `σ₁ = x`, `σ₂ = y`, `σ₃ = z` with the standard signs,
//! tensor order `a ⊗ b`, logical basis index `2·q_a + q_b`.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;
use crate::linalg;
use crate::C64;

const VALIDATION_TOL: f64 = 1e-8;

/// `σ_{k+1}` for `k = 0, 1, 2`.
pub fn pauli(k: usize) -> [[C64; 2]; 2] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match k {
        0 => [[o, one], [one, o]],
        1 => [[o, -i], [i, o]],
        2 => [[one, o], [o, -one]],
        _ => panic!("Pauli index {k} out of range"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshReport {
    /// Correlation matrix `t_nm = tr(ρ σ_n ⊗ σ_m)`.
    pub t_matrix: [[f64; 3]; 3],
    /// Eigenvalues of `U = TᵀT`, descending.
    pub u_eigenvalues: [f64; 3],
    /// `M(ρ)`: sum of the two largest eigenvalues of `U`.
    pub m_value: f64,
    /// Violation degree `B(ρ) = √max(0, M − 1)`, in `[0, 1]`.
    pub b_value: f64,
}

impl ChshReport {
    /// `n(ρ) = max(0, M − 1) = B²`.
    pub fn n_value(&self) -> f64 {
        (self.m_value - 1.0).max(0.0)
    }

    pub fn violates(&self) -> bool {
        self.m_value > 1.0
    }
}

pub fn chsh_violation(rho_qq: &DensityMatrix) -> Result<ChshReport> {
    if rho_qq.dims().total() != 4 {
        return Err(Error::InvalidDensityMatrix(format!(
            "CHSH measure needs a two-qubit state, got dims {:?}",
            rho_qq.dims()
        )));
    }
    rho_qq.validate(VALIDATION_TOL, VALIDATION_TOL)?;
    let rho = rho_qq.matrix();

    let mut t = [[0.0; 3]; 3];
    for (n, row) in t.iter_mut().enumerate() {
        let sn = pauli(n);
        for (m, entry) in row.iter_mut().enumerate() {
            let sm = pauli(m);
            // tr(ρ S) = Σ_ij ρ_ij S_ji with S = σ_n ⊗ σ_m
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    let s_ji = sn[j / 2][i / 2] * sm[j % 2][i % 2];
                    acc += rho[[i, j]] * s_ji;
                }
            }
            *entry = acc.re;
        }
    }

    let t_arr = Array2::from_shape_fn((3, 3), |(i, j)| t[i][j]);
    let u = t_arr.t().dot(&t_arr);
    let mut u_eig: Vec<f64> = linalg::eigvalsh(&u.mapv(|x| C64::new(x, 0.0)))?.to_vec();
    u_eig.sort_by(|a, b| b.total_cmp(a));
    let u_eigenvalues = [u_eig[0], u_eig[1], u_eig[2]];
    let m_value = u_eigenvalues[0] + u_eigenvalues[1];
    let b_value = (m_value - 1.0).max(0.0).sqrt();

    Ok(ChshReport {
        t_matrix: t,
        u_eigenvalues,
        m_value,
        b_value,
    })
}
