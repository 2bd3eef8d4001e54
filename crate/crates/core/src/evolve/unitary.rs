use ndarray::{Array1, Array2};

use super::TimeGrid;
use crate::error::{Error, Result};
use crate::hilbert::{ModeDims, OperatorMatrix, StateVector};
use crate::linalg;
use crate::C64;

/// Spectral form of `exp(-iĤt)`: once `Ĥ = V diag(λ) V†` is known, any time
/// costs two matrix-vector products.
#[derive(Debug, Clone)]
pub struct UnitaryPropagator {
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<C64>,
    dims: ModeDims,
}

/// Hermitian eigendecomposition of `h`. Fails with [`Error::NotHermitian`]
/// when `max|H - H†| > 1e-10 ‖H‖_F`.
pub fn make_propagator(h: &OperatorMatrix) -> Result<UnitaryPropagator> {
    let deviation = linalg::hermiticity_error(h.matrix());
    let tolerance = 1e-10 * linalg::frobenius(h.matrix());
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    let (eigenvalues, eigenvectors) = linalg::eigh(h.matrix())?;
    Ok(UnitaryPropagator {
        eigenvalues,
        eigenvectors,
        dims: h.dims(),
    })
}

impl UnitaryPropagator {
    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<C64> {
        &self.eigenvectors
    }

    pub fn dims(&self) -> ModeDims {
        self.dims
    }

    fn phases(&self, t: f64) -> Array1<C64> {
        self.eigenvalues.mapv(|lam| C64::from_polar(1.0, -lam * t))
    }

    /// Dense `U(t) = V diag(e^{-iλt}) V†`.
    pub fn unitary(&self, t: f64) -> OperatorMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (mut col, phase) in scaled.columns_mut().into_iter().zip(self.phases(t)) {
            col.mapv_inplace(|z| z * phase);
        }
        let u = scaled.dot(&linalg::dagger(&self.eigenvectors));
        OperatorMatrix::from_parts_unchecked(self.dims, u, false)
    }

    fn eigenbasis(&self, psi: &StateVector) -> Result<Array1<C64>> {
        if psi.dims() != self.dims {
            return Err(Error::DimensionMismatch(format!(
                "state dims {:?} vs propagator dims {:?}",
                psi.dims(),
                self.dims
            )));
        }
        Ok(self.eigenvectors.t().mapv(|z| z.conj()).dot(psi.amplitudes()))
    }

    fn rotate_back(&self, coeffs: &Array1<C64>, t: f64) -> Result<StateVector> {
        let rotated = coeffs * &self.phases(t);
        StateVector::new(self.dims, self.eigenvectors.dot(&rotated))
    }

    /// `U(t)ψ`; `t = 0` returns `ψ` unchanged.
    pub fn propagate(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        let coeffs = self.eigenbasis(psi)?;
        if t == 0.0 {
            return Ok(psi.clone());
        }
        self.rotate_back(&coeffs, t)
    }
}

/// `ψ(t_k) = U(t_k) ψ0` at every grid time.
pub fn evolve_pure(prop: &UnitaryPropagator, psi0: &StateVector, grid: &TimeGrid) -> Result<Vec<StateVector>> {
    let coeffs = prop.eigenbasis(psi0)?;
    grid.times()
        .into_iter()
        .map(|t| if t == 0.0 { Ok(psi0.clone()) } else { prop.rotate_back(&coeffs, t) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::basis_state;
    use crate::model::{hamiltonian, CouplerParams};

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let d = ModeDims::square(3).unwrap();
        let prop = make_propagator(&OperatorMatrix::zeros(d)).unwrap();
        for t in [0.0, 1.3, -7.0] {
            let u = prop.unitary(t);
            assert!(linalg::max_abs(&(u.matrix() - &linalg::identity(9))) < 1e-14);
        }
    }

    #[test]
    fn diagonal_hamiltonian_phases() {
        let d = ModeDims::new(4, 3).unwrap();
        let h = hamiltonian(&CouplerParams::undamped(2.0, 0.0, 0.0), d);
        let prop = make_propagator(&h).unwrap();
        let t = 0.77;
        let u = prop.unitary(t);
        for i in 0..d.total() {
            for j in 0..d.total() {
                let expected = if i == j {
                    C64::from_polar(1.0, -h.matrix()[[i, i]].re * t)
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((u.matrix()[[i, j]] - expected).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let d = ModeDims::square(3).unwrap();
        let a = crate::hilbert::annihilation(d, crate::hilbert::Mode::A);
        assert!(matches!(make_propagator(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn stationary_state_only_gains_phase() {
        let d = ModeDims::square(5).unwrap();
        let h = hamiltonian(&CouplerParams::undamped(25.0, 0.3, 0.2), d);
        let prop = make_propagator(&h).unwrap();
        let v = prop.eigenvectors().column(7).to_owned();
        let psi0 = StateVector::normalized(d, v).unwrap();
        let grid = TimeGrid::new(0.0, 40.0, 50).unwrap();
        for psi in evolve_pure(&prop, &psi0, &grid).unwrap() {
            assert!((psi0.inner(&psi).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let prop = make_propagator(&OperatorMatrix::zeros(ModeDims::square(3).unwrap())).unwrap();
        let psi = basis_state(ModeDims::square(4).unwrap(), 2, 0).unwrap();
        let grid = TimeGrid::new(0.0, 1.0, 2).unwrap();
        assert!(matches!(evolve_pure(&prop, &psi, &grid), Err(Error::DimensionMismatch(_))));
    }
}
