//! Time evolution: unitary propagation of pure states and Lindblad
//! master-equation propagation of density matrices.

mod dopri;
mod master;
mod sparse;
mod unitary;

pub use master::{
    evolve_master, evolve_master_with, liouvillian, stack, unstack, MasterOptions, Method, Superoperator,
};
pub use unitary::{evolve_pure, make_propagator, UnitaryPropagator};

use crate::error::{Error, Result};

/// Uniform sample times `t_start, …, t_end` (both endpoints included, so
/// `n_steps + 1` samples).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if t_end <= t_start {
            return Err(Error::InvalidGrid(format!("t_end = {t_end} must exceed t_start = {t_start}")));
        }
        if n_steps == 0 {
            return Err(Error::InvalidGrid("n_steps must be at least 1".into()));
        }
        Ok(Self { t_start, t_end, n_steps })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.spacing();
        (0..=self.n_steps)
            .map(|k| if k == self.n_steps { self.t_end } else { self.t_start + k as f64 * dt })
            .collect()
    }
}
