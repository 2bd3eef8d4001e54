//! Scalar diagnostics of coupler states.

mod bell;
mod chsh;
mod entropy;
mod fidelity;

pub use bell::{bell_state, BellStateId};
pub use chsh::{chsh_violation, pauli, ChshReport};
pub use entropy::{entanglement_entropy, entanglement_entropy_mixed_marginal, schmidt_coefficients, shannon_bits};
pub use fidelity::{
    mixed_fidelity, probabilities, pure_fidelity, truncation_fidelity_series, FidelityConvention,
};
