//! Simulation of a pumped Kerr–Kerr nonlinear coupler whose two modes exchange
//! photon pairs through a nonlinear internal coupling.
//!
//! The crate is split along the physics:
//!
//! * [`hilbert`]: two-mode Fock product space, ladder operators, partial
//!   trace and the `{|0⟩,|2⟩}⊗{|0⟩,|2⟩}` qubit projection.
//! * [`model`]: coupler Hamiltonian, collapse operators and the closed-form
//!   three-state solution.
//! * [`evolve`]: unitary propagation and Lindblad master-equation evolution.
//! * [`measures`]: fidelities, Bell-like states, entanglement entropy and the
//!   Horodecki CHSH-violation measure.
//! * [`scenario`]: config-driven scenario runner producing CSV time series.
//! * [`selfcheck`]: numbered release criteria, shared by the `sim self-check`
//!   command and the `acceptance` test target.
//!
//! Flattened two-mode index convention everywhere: `index(n, m) = n * dim_b + m`
//! (mode `a` is the slow index).

pub mod error;
pub mod evolve;
pub mod hilbert;
pub(crate) mod linalg;
pub mod measures;
pub mod model;
pub mod scenario;
pub mod selfcheck;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Library version echoed into every CSV header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
