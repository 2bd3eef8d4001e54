//! Lindblad master equation `dρ/dt = L̂ρ` with
//!
//! ```text
//! L̂ρ = −i[H, ρ] + Σ_k ( C_k ρ C_k† − ½{C_k†C_k, ρ} )
//! ```
//!
//! Superoperators act on the column-stacked density matrix: `stack(ρ)`
//! concatenates columns, so `AρB ↦ (Bᵀ ⊗ A)·stack(ρ)` and in particular
//! `AρB† ↦ (conj(B) ⊗ A)·stack(ρ)`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Solve};

use super::dopri::{self, Tolerances};
use super::sparse::SparseOp;
use super::TimeGrid;
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, ModeDims, OperatorMatrix};
use crate::linalg;
use crate::C64;

/// Allowed deviation of the initial density matrix from unit trace / PSD.
const INITIAL_STATE_TOL: f64 = 1e-8;
/// Trace drift above which a warning is logged.
const TRACE_DRIFT_WARN: f64 = 1e-6;
/// Spectral reconstruction error of `ρ(0)` that marks `L` as numerically
/// non-diagonalizable.
const SPECTRAL_RECONSTRUCTION_TOL: f64 = 1e-8;
/// Bound on `Σ|c_j|` in the eigenmode expansion; beyond it cancellation
/// between modes eats the requested accuracy.
const SPECTRAL_AMPLIFICATION_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Adaptive Dormand–Prince 5(4) on the density matrix.
    #[default]
    Integrate,
    /// Dense eigendecomposition of `L`: `ρ(t) = Σ_j c_j e^{s_j t} v_j`.
    Spectral,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Integrate => "integrate",
            Method::Spectral => "spectral",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "integrate" => Ok(Method::Integrate),
            "spectral" => Ok(Method::Spectral),
            other => Err(format!("unknown method '{other}' (expected integrate or spectral)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterOptions {
    pub method: Method,
    /// Relative tolerance of the integrate method.
    pub rtol: f64,
    /// Absolute tolerance of the integrate method.
    pub atol: f64,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self {
            method: Method::Integrate,
            rtol: 1e-8,
            atol: 1e-10,
        }
    }
}

impl MasterOptions {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }
}

/// Column-major flattening of a square matrix.
pub fn stack(m: &Array2<C64>) -> Array1<C64> {
    m.t().iter().copied().collect()
}

/// Inverse of [`stack`].
pub fn unstack(v: &Array1<C64>, n: usize) -> Array2<C64> {
    assert_eq!(v.len(), n * n, "stacked length must be n²");
    Array2::from_shape_fn((n, n), |(i, j)| v[j * n + i])
}

/// Dense `d² × d²` matrix acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    dims: ModeDims,
    matrix: Array2<C64>,
}

impl Superoperator {
    pub fn dims(&self) -> ModeDims {
        self.dims
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// `unstack(L · stack(ρ))`.
    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        unstack(&self.matrix.dot(&stack(rho)), self.dims.total())
    }
}

fn check_shared_dims(h: &OperatorMatrix, collapse: &[OperatorMatrix]) -> Result<()> {
    for c in collapse {
        h.check_dims(c.dims())?;
    }
    Ok(())
}

pub fn liouvillian(h: &OperatorMatrix, collapse: &[OperatorMatrix]) -> Result<Superoperator> {
    check_shared_dims(h, collapse)?;
    let n = h.dims().total();
    let id = linalg::identity(n);
    let minus_i = C64::new(0.0, -1.0);

    let mut l = (linalg::kron(&id, h.matrix()) - linalg::kron(&h.matrix().t().to_owned(), &id)).mapv(|z| z * minus_i);
    for c in collapse {
        let cm = c.matrix();
        let cdc = linalg::dagger(cm).dot(cm);
        l = l + linalg::kron(&cm.mapv(|z| z.conj()), cm);
        let anti = linalg::kron(&id, &cdc) + linalg::kron(&cdc.t().to_owned(), &id);
        l.scaled_add(C64::new(-0.5, 0.0), &anti);
    }
    Ok(Superoperator {
        dims: h.dims(),
        matrix: l,
    })
}

/// Operator-form generator `dρ/dt = Kρ + ρK† + Σ_k C_k ρ C_k†` with
/// `K = −iH − ½ Σ_k C_k†C_k`.
struct LindbladRhs {
    k: SparseOp,
    k_dag: SparseOp,
    jumps: Vec<(SparseOp, SparseOp)>,
}

impl LindbladRhs {
    fn new(h: &OperatorMatrix, collapse: &[OperatorMatrix]) -> Self {
        let mut k = h.matrix().mapv(|z| z * C64::new(0.0, -1.0));
        for c in collapse {
            let cdc = linalg::dagger(c.matrix()).dot(c.matrix());
            k.scaled_add(C64::new(-0.5, 0.0), &cdc);
        }
        let jumps = collapse
            .iter()
            .map(|c| {
                (
                    SparseOp::from_dense(c.matrix()),
                    SparseOp::from_dense(&linalg::dagger(c.matrix())),
                )
            })
            .collect();
        Self {
            k_dag: SparseOp::from_dense(&linalg::dagger(&k)),
            k: SparseOp::from_dense(&k),
            jumps,
        }
    }

    fn eval(&self, rho: &Array2<C64>) -> Array2<C64> {
        let mut out = Array2::zeros(rho.dim());
        self.k.left_mul_add(rho, &mut out);
        self.k_dag.right_mul_add(rho, &mut out);
        for (c, c_dag) in &self.jumps {
            let c_rho = c.left_mul(rho);
            c_dag.right_mul_add(&c_rho, &mut out);
        }
        out
    }
}

/// [`evolve_master_with`] using default tolerances and the given method.
pub fn evolve_master(
    h: &OperatorMatrix,
    collapse: &[OperatorMatrix],
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    method: Method,
) -> Result<Vec<DensityMatrix>> {
    evolve_master_with(h, collapse, rho0, grid, &MasterOptions::with_method(method))
}

/// `ρ(t_k)` at every grid time. Hermiticity is restored after each step by
/// `ρ ← (ρ + ρ†)/2`; the trace is never renormalized, so trace drift stays
/// visible to the caller.
pub fn evolve_master_with(
    h: &OperatorMatrix,
    collapse: &[OperatorMatrix],
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    options: &MasterOptions,
) -> Result<Vec<DensityMatrix>> {
    check_shared_dims(h, collapse)?;
    h.check_dims(rho0.dims())?;
    rho0.validate(INITIAL_STATE_TOL, INITIAL_STATE_TOL)?;
    let times = grid.times();
    let dims = h.dims();

    let raw = match options.method {
        Method::Integrate => integrate(h, collapse, rho0, &times, options)?,
        Method::Spectral => spectral(h, collapse, rho0, &times)?,
    };

    raw.into_iter()
        .zip(times)
        .map(|(m, t)| {
            let out = DensityMatrix::new(dims, m)?;
            let drift = (out.trace() - 1.0).abs();
            if drift > TRACE_DRIFT_WARN {
                log::warn!("trace drift {drift:e} at t = {t:e}");
            }
            Ok(out)
        })
        .collect()
}

fn integrate(
    h: &OperatorMatrix,
    collapse: &[OperatorMatrix],
    rho0: &DensityMatrix,
    times: &[f64],
    options: &MasterOptions,
) -> Result<Vec<Array2<C64>>> {
    let rhs = LindbladRhs::new(h, collapse);
    let tol = Tolerances {
        rtol: options.rtol,
        atol: options.atol,
    };
    let mut worst_drift = 0.0_f64;
    let out = dopri::integrate(
        |rho| rhs.eval(rho),
        rho0.matrix().clone(),
        times,
        tol,
        |rho| {
            worst_drift = worst_drift.max(linalg::hermiticity_error(rho));
            *rho = linalg::symmetrize(rho);
        },
    )?;
    log::debug!("integrate: largest pre-symmetrization Hermiticity drift {worst_drift:e}");
    Ok(out)
}

fn spectral(
    h: &OperatorMatrix,
    collapse: &[OperatorMatrix],
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<Array2<C64>>> {
    let n = h.dims().total();
    let l = liouvillian(h, collapse)?;
    let (rates, modes) = l
        .matrix
        .eig()
        .map_err(|e| Error::EigendecompositionFailed(e.to_string()))?;
    let initial = stack(rho0.matrix());
    let coeffs = modes
        .solve(&initial)
        .map_err(|e| Error::EigendecompositionFailed(e.to_string()))?;

    let reconstruction = (&modes.dot(&coeffs) - &initial)
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if reconstruction.is_nan() || reconstruction > SPECTRAL_RECONSTRUCTION_TOL {
        return Err(Error::EigendecompositionFailed(format!(
            "initial state reconstructed with error {reconstruction:e}"
        )));
    }
    let amplification: f64 = coeffs.iter().map(|c| c.norm()).sum();
    if amplification.is_nan() || amplification > SPECTRAL_AMPLIFICATION_LIMIT {
        return Err(Error::EigendecompositionFailed(format!(
            "eigenmode expansion amplification {amplification:e} (near-defective Liouvillian)"
        )));
    }
    let scale = rates.iter().fold(0.0_f64, |acc, s| acc.max(s.norm()));
    if let Some(s) = rates.iter().find(|s| s.re > 1e-9 * scale.max(1.0)) {
        return Err(Error::EigendecompositionFailed(format!("growing eigenmode with rate {s}")));
    }
    log::debug!("spectral: reconstruction {reconstruction:e}, amplification {amplification:e}");

    Ok(times
        .iter()
        .map(|&t| {
            let weights: Array1<C64> = coeffs.iter().zip(rates.iter()).map(|(c, s)| c * (s * t).exp()).collect();
            linalg::symmetrize(&unstack(&modes.dot(&weights), n))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{annihilation, basis_state, Mode};
    use crate::model::{collapse_operators, hamiltonian, CouplerParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
        let m = Array2::from_shape_fn((n, n), |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        linalg::symmetrize(&m)
    }

    #[test]
    fn stack_round_trip_and_column_order() {
        let m = Array2::from_shape_fn((3, 3), |(i, j)| C64::new(i as f64, j as f64));
        let v = stack(&m);
        assert_eq!(v[1], C64::new(1.0, 0.0));
        assert_eq!(v[3], C64::new(0.0, 1.0));
        assert_eq!(unstack(&v, 3), m);
    }

    #[test]
    fn zero_generator() {
        let d = ModeDims::square(3).unwrap();
        let l = liouvillian(&OperatorMatrix::zeros(d), &[]).unwrap();
        assert!(l.matrix().iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn superoperator_matches_direct_evaluation() {
        let d = ModeDims::square(3).unwrap();
        let p = CouplerParams {
            epsilon: C64::new(0.3, 0.2),
            alpha: C64::new(0.1, -0.4),
            ..CouplerParams::damped(2.0, 0.0, 0.0, 0.15)
        };
        let h = hamiltonian(&p, d);
        let cs = collapse_operators(&p, d);
        let l = liouvillian(&h, &cs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_hermitian(9, &mut rng);
        let hm = h.matrix();
        let mut direct = (hm.dot(&rho) - rho.dot(hm)).mapv(|z| z * C64::new(0.0, -1.0));
        for c in &cs {
            let cm = c.matrix();
            let cd = linalg::dagger(cm);
            let cdc = cd.dot(cm);
            direct = direct + cm.dot(&rho).dot(&cd) - (cdc.dot(&rho) + rho.dot(&cdc)).mapv(|z| z * 0.5);
        }
        assert!(linalg::max_abs(&(l.apply(&rho) - &direct)) < 1e-13);
        let rhs = LindbladRhs::new(&h, &cs);
        assert!(linalg::max_abs(&(rhs.eval(&rho) - &direct)) < 1e-13);
    }

    #[test]
    fn generator_is_traceless() {
        let d = ModeDims::square(4).unwrap();
        let p = CouplerParams::damped(3.0, 0.4, 0.2, 0.3);
        let l = liouvillian(&hamiltonian(&p, d), &collapse_operators(&p, d)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let rho = random_hermitian(16, &mut rng);
            assert!(linalg::trace(&l.apply(&rho)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_decay_both_methods() {
        let d = ModeDims::logical(2, 1).unwrap();
        let kappa: f64 = 0.35;
        let c = annihilation(d, Mode::A).scale(C64::new((2.0 * kappa).sqrt(), 0.0));
        let rho0 = basis_state(d, 1, 0).unwrap().to_density();
        let grid = TimeGrid::new(0.0, 4.0, 40).unwrap();
        for method in [Method::Integrate, Method::Spectral] {
            let out = evolve_master(&OperatorMatrix::zeros(d), std::slice::from_ref(&c), &rho0, &grid, method).unwrap();
            for (t, rho) in grid.times().iter().zip(&out) {
                let n = rho.matrix()[[1, 1]].re;
                assert!((n - (-2.0 * kappa * t).exp()).abs() < 1e-7, "{method} t={t}");
            }
        }
    }

    #[test]
    fn rejects_mismatched_dims() {
        let h = OperatorMatrix::zeros(ModeDims::square(3).unwrap());
        let c = annihilation(ModeDims::square(4).unwrap(), Mode::A);
        assert!(matches!(liouvillian(&h, &[c]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn rejects_unnormalized_initial_state() {
        let d = ModeDims::square(3).unwrap();
        let rho = DensityMatrix::new(d, linalg::identity(9)).unwrap();
        let grid = TimeGrid::new(0.0, 1.0, 2).unwrap();
        let err = evolve_master(&OperatorMatrix::zeros(d), &[], &rho, &grid, Method::Integrate).unwrap_err();
        assert!(matches!(err, Error::InvalidDensityMatrix(_)));
    }
}
