use ndarray::Array1;
use ndarray_linalg::SVD;

use crate::error::Result;
use crate::hilbert::{partial_trace, DensityMatrix, Mode, StateVector};
use crate::linalg;

/// Marginal eigenvalues in `[-1e-10, 0)` are treated as zero.
const ENTROPY_CLAMP: f64 = 1e-10;

/// `−Σ p log₂ p` with `0·log₂0 = 0`.
pub fn shannon_bits(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Singular values of the `dim_a × dim_b` coefficient matrix, descending.
pub fn schmidt_coefficients(psi: &StateVector) -> Result<Array1<f64>> {
    let (_, s, _) = psi.coefficient_matrix().svd(false, false)?;
    Ok(s)
}

/// Entropy of entanglement in ebits from the Schmidt spectrum.
pub fn entanglement_entropy(psi: &StateVector) -> Result<f64> {
    let s = schmidt_coefficients(psi)?;
    Ok(shannon_bits(s.iter().map(|x| x * x)))
}

/// Von Neumann entropy (base 2) of the reduced state on `side`.
pub fn entanglement_entropy_mixed_marginal(rho: &DensityMatrix, side: Mode) -> Result<f64> {
    let reduced = partial_trace(rho, side)?;
    let mut spectrum = linalg::eigvalsh(reduced.matrix())?;
    linalg::clamp_spectrum(&mut spectrum, ENTROPY_CLAMP)?;
    Ok(shannon_bits(spectrum.iter().copied()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_state, ModeDims};
    use crate::measures::{bell_state, BellStateId};
    use crate::C64;

    #[test]
    fn bell_like_is_one_ebit() {
        let d = ModeDims::square(4).unwrap();
        let b1 = bell_state(BellStateId::B1, d).unwrap();
        assert!((entanglement_entropy(&b1).unwrap() - 1.0).abs() < 1e-12);
        for side in [Mode::A, Mode::B] {
            assert!((entanglement_entropy_mixed_marginal(&b1.to_density(), side).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_states_carry_nothing() {
        let d = ModeDims::square(3).unwrap();
        let p1 = bell_state(BellStateId::P1, d).unwrap();
        assert!(entanglement_entropy(&p1).unwrap().abs() < 1e-12);
        let basis = basis_state(d, 1, 2).unwrap();
        assert!(entanglement_entropy_mixed_marginal(&basis.to_density(), Mode::A).unwrap().abs() < 1e-12);
    }

    #[test]
    fn equal_three_state_superposition() {
        // |1,2⟩ and |0,2⟩ share |2⟩_b: Schmidt weights {2/3, 1/3}
        let d = ModeDims::square(3).unwrap();
        let w = C64::new((1.0f64 / 3.0).sqrt(), 0.0);
        let mut amps = Array1::zeros(9);
        amps[d.index(2, 0).unwrap()] = w;
        amps[d.index(1, 2).unwrap()] = w;
        amps[d.index(0, 2).unwrap()] = w;
        let psi = StateVector::new(d, amps).unwrap();
        let expected = -(2.0f64 / 3.0) * (2.0f64 / 3.0).log2() - (1.0f64 / 3.0) * (1.0f64 / 3.0).log2();
        assert!((entanglement_entropy(&psi).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.9183).abs() < 1e-4);
    }

    #[test]
    fn shannon_zero_rule() {
        assert_eq!(shannon_bits([1.0, 0.0]), 0.0);
        assert!((shannon_bits([0.5, 0.5]) - 1.0).abs() < 1e-15);
    }
}
