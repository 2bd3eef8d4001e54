//! Two-mode Fock product space and its elementary operator algebra.
//!
//! States live in the truncated space spanned by `|n⟩_a|m⟩_b` with
//! `n < dim_a`, `m < dim_b`, flattened as `index(n, m) = n * dim_b + m`.
//! Creation operators map the top Fock level to zero; that truncation
//! artifact is never reached by the resonant dynamics at the parameter sets
//! used here, and the convergence checks in [`crate::selfcheck`] guard it.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

/// Default Fock truncation per mode for the undamped scenarios.
pub const DEFAULT_DIM: usize = 10;

/// Denominator threshold below which [`project_qubit_qubit`] reports
/// [`Error::NearZeroSupport`].
pub const PROJECTION_EPS: f64 = 1e-12;

const NORM_TOL: f64 = 1e-10;
const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
const OPERATOR_HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

/// Dimensions of the two-mode product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeDims {
    dim_a: usize,
    dim_b: usize,
}

impl ModeDims {
    /// Fock truncation for the coupler; both modes must hold `|2⟩`.
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a < 3 || dim_b < 3 {
            return Err(Error::InvalidDims {
                dim_a,
                dim_b,
                reason: "each mode needs at least Fock levels 0..=2",
            });
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn square(dim: usize) -> Result<Self> {
        Self::new(dim, dim)
    }

    /// Unrestricted dimensions for logical spaces: projected qubit pairs,
    /// reduced single-mode states (`dim_b = 1`) and small test systems.
    pub fn logical(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidDims {
                dim_a,
                dim_b,
                reason: "dimensions must be positive",
            });
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self, mode: Mode) -> usize {
        match mode {
            Mode::A => self.dim_a,
            Mode::B => self.dim_b,
        }
    }

    /// Total dimension `dim_a * dim_b`.
    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn contains(&self, n: usize, m: usize) -> bool {
        n < self.dim_a && m < self.dim_b
    }

    pub fn index(&self, n: usize, m: usize) -> Result<usize> {
        if !self.contains(n, m) {
            return Err(self.out_of_range(n, m));
        }
        Ok(n * self.dim_b + m)
    }

    pub fn unflatten(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.total() {
            return Err(Error::DimensionMismatch(format!(
                "flat index {index} outside total dimension {}",
                self.total()
            )));
        }
        Ok((index / self.dim_b, index % self.dim_b))
    }

    pub(crate) fn require_levels(&self, needed: &'static str, min: usize) -> Result<()> {
        if self.dim_a < min || self.dim_b < min {
            return Err(Error::DimsTooSmall {
                dim_a: self.dim_a,
                dim_b: self.dim_b,
                needed,
            });
        }
        Ok(())
    }

    fn out_of_range(&self, n: usize, m: usize) -> Error {
        Error::OutOfRange {
            n,
            m,
            dim_a: self.dim_a,
            dim_b: self.dim_b,
        }
    }
}

/// Pure two-mode state; `amplitudes[index(n, m)] = c_{n,m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: ModeDims,
    amplitudes: Array1<C64>,
}

impl StateVector {
    /// Validates length and unit norm (within `1e-10`).
    pub fn new(dims: ModeDims, amplitudes: Array1<C64>) -> Result<Self> {
        let state = Self::from_raw(dims, amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Length-checked only. Used by isometric embeddings whose input norm is
    /// the caller's responsibility.
    pub(crate) fn from_raw(dims: ModeDims, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                dims.total()
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(dims: ModeDims, amplitudes: Array1<C64>) -> Result<Self> {
        let mut state = Self::from_raw(dims, amplitudes)?;
        let norm = state.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        state.amplitudes.mapv_inplace(|z| z / norm);
        Ok(state)
    }

    pub fn dims(&self) -> ModeDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize, m: usize) -> Result<C64> {
        Ok(self.amplitudes[self.dims.index(n, m)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "inner product of {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Coefficient matrix `C[n][m] = c_{n,m}` (rows: mode a).
    pub fn coefficient_matrix(&self) -> Array2<C64> {
        self.amplitudes
            .clone()
            .into_shape_with_order((self.dims.dim_a, self.dims.dim_b))
            .expect("length checked at construction")
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let col = self.amplitudes.view().insert_axis(ndarray::Axis(1));
        let row = self.amplitudes.mapv(|z| z.conj()).insert_axis(ndarray::Axis(0));
        DensityMatrix {
            dims: self.dims,
            matrix: col.dot(&row),
        }
    }
}

/// Mixed two-mode state (or a projected logical state).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: ModeDims,
    matrix: Array2<C64>,
}

impl DensityMatrix {
    /// Checks shape and Hermiticity within `1e-10`. Trace and positivity are
    /// properties of the producing operation; see [`DensityMatrix::validate`].
    pub fn new(dims: ModeDims, matrix: Array2<C64>) -> Result<Self> {
        let n = dims.total();
        if matrix.dim() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "density matrix of shape {:?} for total dimension {n}",
                matrix.dim()
            )));
        }
        let deviation = linalg::hermiticity_error(&matrix);
        if deviation > DENSITY_HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: DENSITY_HERMITIAN_TOL,
            });
        }
        Ok(Self { dims, matrix })
    }

    pub fn dims(&self) -> ModeDims {
        self.dims
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Array1<f64>> {
        linalg::eigvalsh(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Full density-matrix check: unit trace within `trace_tol` and no
    /// eigenvalue below `-psd_tol`.
    pub fn validate(&self, trace_tol: f64, psd_tol: f64) -> Result<()> {
        let tr = linalg::trace(&self.matrix);
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} deviates from 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -psd_tol {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.dims != self.dims {
            return Err(Error::DimensionMismatch("state and density matrix dims differ".into()));
        }
        let rho_psi = self.matrix.dot(&psi.amplitudes);
        Ok(psi
            .amplitudes
            .iter()
            .zip(rho_psi.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re)
    }
}

/// Square operator on the two-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dims: ModeDims,
    matrix: Array2<C64>,
    hermitian_hint: bool,
}

impl OperatorMatrix {
    /// When `hermitian_hint` is set, Hermiticity is verified within `1e-12`.
    pub fn new(dims: ModeDims, matrix: Array2<C64>, hermitian_hint: bool) -> Result<Self> {
        let n = dims.total();
        if matrix.dim() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "operator of shape {:?} for total dimension {n}",
                matrix.dim()
            )));
        }
        if hermitian_hint {
            let deviation = linalg::hermiticity_error(&matrix);
            if deviation > OPERATOR_HERMITIAN_TOL {
                return Err(Error::NotHermitian {
                    deviation,
                    tolerance: OPERATOR_HERMITIAN_TOL,
                });
            }
        }
        Ok(Self {
            dims,
            matrix,
            hermitian_hint,
        })
    }

    pub fn zeros(dims: ModeDims) -> Self {
        let n = dims.total();
        Self {
            dims,
            matrix: Array2::zeros((n, n)),
            hermitian_hint: true,
        }
    }

    pub fn dims(&self) -> ModeDims {
        self.dims
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dims: self.dims,
            matrix: linalg::dagger(&self.matrix),
            hermitian_hint: self.hermitian_hint,
        }
    }

    /// Operator product `self · rhs`.
    pub fn dot(&self, rhs: &OperatorMatrix) -> Result<Self> {
        self.check_dims(rhs.dims)?;
        Ok(Self {
            dims: self.dims,
            matrix: self.matrix.dot(&rhs.matrix),
            hermitian_hint: false,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dims: self.dims,
            matrix: self.matrix.mapv(|z| z * factor),
            hermitian_hint: self.hermitian_hint && factor.im == 0.0,
        }
    }

    /// `self |ψ⟩` as a raw amplitude vector (ladder operators do not
    /// preserve the norm).
    pub fn apply(&self, psi: &StateVector) -> Result<Array1<C64>> {
        self.check_dims(psi.dims)?;
        Ok(self.matrix.dot(&psi.amplitudes))
    }

    /// `⟨ψ|self|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<C64> {
        let applied = self.apply(psi)?;
        Ok(psi
            .amplitudes
            .iter()
            .zip(applied.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn check_dims(&self, other: ModeDims) -> Result<()> {
        if self.dims != other {
            return Err(Error::DimensionMismatch(format!(
                "operator dims {:?} vs {:?}",
                self.dims, other
            )));
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(dims: ModeDims, matrix: Array2<C64>, hermitian_hint: bool) -> Self {
        Self {
            dims,
            matrix,
            hermitian_hint,
        }
    }
}

fn single_mode_lowering(dim: usize) -> Array2<C64> {
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Lowering operator of `mode`, embedded with the identity on the other mode.
pub fn annihilation(dims: ModeDims, mode: Mode) -> OperatorMatrix {
    let matrix = match mode {
        Mode::A => linalg::kron(&single_mode_lowering(dims.dim_a), &linalg::identity(dims.dim_b)),
        Mode::B => linalg::kron(&linalg::identity(dims.dim_a), &single_mode_lowering(dims.dim_b)),
    };
    OperatorMatrix::from_parts_unchecked(dims, matrix, false)
}

/// Adjoint of [`annihilation`]; the top Fock level maps to zero.
pub fn creation(dims: ModeDims, mode: Mode) -> OperatorMatrix {
    annihilation(dims, mode).adjoint()
}

/// Number operator `a†a` (or `b†b`), diagonal and exact.
pub fn number(dims: ModeDims, mode: Mode) -> OperatorMatrix {
    let n = dims.total();
    let mut matrix = Array2::zeros((n, n));
    for idx in 0..n {
        let (na, nb) = (idx / dims.dim_b, idx % dims.dim_b);
        let count = match mode {
            Mode::A => na,
            Mode::B => nb,
        };
        matrix[[idx, idx]] = C64::new(count as f64, 0.0);
    }
    OperatorMatrix::from_parts_unchecked(dims, matrix, true)
}

/// `|n⟩_a|m⟩_b`.
pub fn basis_state(dims: ModeDims, n: usize, m: usize) -> Result<StateVector> {
    let idx = dims.index(n, m)?;
    let mut amplitudes = Array1::zeros(dims.total());
    amplitudes[idx] = C64::new(1.0, 0.0);
    Ok(StateVector { dims, amplitudes })
}

/// Reduced density matrix of the kept mode. The result uses logical dims
/// `(dim_kept, 1)`, so its flat index equals the Fock number.
pub fn partial_trace(rho: &DensityMatrix, keep: Mode) -> Result<DensityMatrix> {
    let (da, db) = (rho.dims.dim_a, rho.dims.dim_b);
    let m = &rho.matrix;
    let (kept, reduced) = match keep {
        Mode::A => {
            let mut r = Array2::zeros((da, da));
            for n in 0..da {
                for np in 0..da {
                    r[[n, np]] = (0..db).map(|k| m[[n * db + k, np * db + k]]).sum();
                }
            }
            (da, r)
        }
        Mode::B => {
            let mut r = Array2::zeros((db, db));
            for k in 0..db {
                for kp in 0..db {
                    r[[k, kp]] = (0..da).map(|n| m[[n * db + k, n * db + kp]]).sum();
                }
            }
            (db, r)
        }
    };
    Ok(DensityMatrix {
        dims: ModeDims::logical(kept, 1)?,
        matrix: reduced,
    })
}

/// Fock levels retained per mode by the `Π_{0,2}` projector, in logical order.
pub const LOGICAL_LEVELS: [usize; 2] = [0, 2];

/// Applies `Π_{0,2}⊗Π_{0,2}` and renormalizes, giving a two-qubit state over
/// logical `{|0⟩→0, |2⟩→1}` per mode with tensor order `a ⊗ b`.
pub fn project_qubit_qubit(rho: &DensityMatrix) -> Result<DensityMatrix> {
    project_qubit_qubit_with_threshold(rho, PROJECTION_EPS)
}

pub fn project_qubit_qubit_with_threshold(rho: &DensityMatrix, threshold: f64) -> Result<DensityMatrix> {
    rho.dims.require_levels("Fock levels 0 and 2 in both modes", 3)?;
    let fock: Vec<usize> = LOGICAL_LEVELS
        .iter()
        .flat_map(|&na| LOGICAL_LEVELS.iter().map(move |&nb| (na, nb)))
        .map(|(na, nb)| na * rho.dims.dim_b + nb)
        .collect();
    let mut projected = Array2::zeros((4, 4));
    for (i, &fi) in fock.iter().enumerate() {
        for (j, &fj) in fock.iter().enumerate() {
            projected[[i, j]] = rho.matrix[[fi, fj]];
        }
    }
    let weight = linalg::trace(&projected).re;
    if weight.is_nan() || weight <= threshold {
        return Err(Error::NearZeroSupport { weight, threshold });
    }
    projected.mapv_inplace(|z| z / weight);
    Ok(DensityMatrix {
        dims: ModeDims::logical(2, 2)?,
        matrix: projected,
    })
}
