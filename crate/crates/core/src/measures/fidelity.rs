use crate::error::{Error, Result};
use crate::evolve::TimeGrid;
use crate::hilbert::{DensityMatrix, StateVector};
use crate::linalg;
use crate::model::{analytic_amplitudes, truncated_to_full, CouplerParams};
use crate::series::TimeSeries;

/// Eigenvalues of `√ρ σ √ρ` and of `ρ` in `[-1e-8, 0)` count as zero.
const SQRT_CLAMP: f64 = 1e-8;

/// Pure-state fidelity flavour. The truncation check squares the overlap;
/// Bell-state formation is reported unsquared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityConvention {
    /// `|⟨ψ|φ⟩|`
    Amplitude,
    /// `|⟨ψ|φ⟩|²`
    Probability,
}

impl FidelityConvention {
    pub fn label(self) -> &'static str {
        match self {
            FidelityConvention::Amplitude => "amp",
            FidelityConvention::Probability => "prob",
        }
    }
}

pub fn pure_fidelity(psi: &StateVector, phi: &StateVector, convention: FidelityConvention) -> Result<f64> {
    let overlap = psi.inner(phi)?.norm();
    Ok(match convention {
        FidelityConvention::Amplitude => overlap,
        FidelityConvention::Probability => overlap * overlap,
    })
}

/// Uhlmann fidelity `tr √(√ρ σ √ρ)`; reduces to `|⟨ψ|φ⟩|` on pure states.
pub fn mixed_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between {:?} and {:?}",
            rho.dims(),
            sigma.dims()
        )));
    }
    let root = linalg::psd_sqrt(rho.matrix(), SQRT_CLAMP)?;
    let inner = root.dot(sigma.matrix()).dot(&root);
    let mut spectrum = linalg::eigvalsh(&inner)?;
    linalg::clamp_spectrum(&mut spectrum, SQRT_CLAMP)?;
    let f: f64 = spectrum.iter().map(|v| v.sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `|c_{n,m}|²` for each target level.
pub fn probabilities(psi: &StateVector, targets: &[(usize, usize)]) -> Result<Vec<f64>> {
    targets
        .iter()
        .map(|&(n, m)| psi.amplitude(n, m).map(|c| c.norm_sqr()))
        .collect()
}

/// `1 − |⟨ψ(t)|ψ_cut(t)⟩|²` between numerically propagated states and the
/// embedded closed-form three-state solution.
pub fn truncation_fidelity_series(full: &[StateVector], params: &CouplerParams, grid: &TimeGrid) -> Result<TimeSeries> {
    let times = grid.times();
    if full.len() != times.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states for {} grid times",
            full.len(),
            times.len()
        )));
    }
    let mut series = TimeSeries::new(vec!["one_minus_f_prob".to_string()]);
    for (psi, t) in full.iter().zip(times) {
        let cut = truncated_to_full(&analytic_amplitudes(params, t)?, psi.dims())?;
        let f = pure_fidelity(psi, &cut, FidelityConvention::Probability)?;
        series.push(t, vec![Some(1.0 - f)])?;
    }
    Ok(series)
}
