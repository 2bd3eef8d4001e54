use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use ndarray::Array1;

use crate::error::Result;
use crate::hilbert::{ModeDims, StateVector};
use crate::C64;

/// Bell-like and product superpositions of the resonant Fock states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellStateId {
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    P1,
    P2,
}

impl BellStateId {
    pub const ALL: [BellStateId; 8] = [
        BellStateId::B1,
        BellStateId::B2,
        BellStateId::B3,
        BellStateId::B4,
        BellStateId::B5,
        BellStateId::B6,
        BellStateId::P1,
        BellStateId::P2,
    ];

    /// `(first, second, relative phase)` for `(|first⟩ + phase·|second⟩)/√2`.
    fn components(self) -> ((usize, usize), (usize, usize), C64) {
        let i = C64::new(0.0, 1.0);
        let one = C64::new(1.0, 0.0);
        match self {
            BellStateId::B1 => ((2, 0), (0, 2), i),
            BellStateId::B2 => ((2, 0), (0, 2), -i),
            BellStateId::B3 => ((2, 0), (1, 2), i),
            BellStateId::B4 => ((2, 0), (1, 2), -i),
            BellStateId::B5 => ((2, 0), (1, 2), one),
            BellStateId::B6 => ((2, 0), (1, 2), -one),
            // (|1⟩ ± i|0⟩)_a ⊗ |2⟩_b, a product state
            BellStateId::P1 => ((1, 2), (0, 2), i),
            BellStateId::P2 => ((1, 2), (0, 2), -i),
        }
    }
}

impl fmt::Display for BellStateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for BellStateId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        BellStateId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown Bell-like state '{s}' (expected B1..B6, P1, P2)"))
    }
}

pub fn bell_state(id: BellStateId, dims: ModeDims) -> Result<StateVector> {
    dims.require_levels("Fock levels 0..=2 in both modes", 3)?;
    let (first, second, phase) = id.components();
    let mut amps = Array1::zeros(dims.total());
    amps[dims.index(first.0, first.1)?] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[dims.index(second.0, second.1)?] = phase * FRAC_1_SQRT_2;
    StateVector::new(dims, amps)
}
