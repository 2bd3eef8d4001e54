//! Coupler Hamiltonian, collapse operators and the closed-form solution of
//! the resonant three-state dynamics.

use std::fmt;

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, creation, Mode, ModeDims, OperatorMatrix, StateVector};
use crate::C64;

/// How times attached to a parameter set are to be read. Never used in
/// computation; it is echoed into outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeUnit {
    /// Dimensionless scenarios: time measured in `1/χ` units.
    #[default]
    InverseChi,
    /// Physical scenarios with rates in rad/s.
    Seconds,
}

impl fmt::Display for TimeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeUnit::InverseChi => "inverse_chi",
            TimeUnit::Seconds => "seconds",
        })
    }
}

impl std::str::FromStr for TimeUnit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "inverse_chi" => Ok(TimeUnit::InverseChi),
            "seconds" => Ok(TimeUnit::Seconds),
            other => Err(format!("unknown time unit '{other}' (expected inverse_chi or seconds)")),
        }
    }
}

/// Physical parameters of the coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerParams {
    /// Kerr nonlinearity of mode a.
    pub chi_a: f64,
    /// Kerr nonlinearity of mode b.
    pub chi_b: f64,
    /// Nonlinear internal coupling `ε (a†)²b² + h.c.`.
    pub epsilon: C64,
    /// External pump `α a† + h.c.` on mode a.
    pub alpha: C64,
    /// Amplitude damping rate of mode a.
    pub kappa_a: f64,
    /// Amplitude damping rate of mode b.
    pub kappa_b: f64,
    pub time_unit: TimeUnit,
}

impl CouplerParams {
    /// Lossless coupler with equal Kerr nonlinearities and real couplings.
    pub fn undamped(chi: f64, alpha: f64, epsilon: f64) -> Self {
        Self {
            chi_a: chi,
            chi_b: chi,
            epsilon: C64::new(epsilon, 0.0),
            alpha: C64::new(alpha, 0.0),
            kappa_a: 0.0,
            kappa_b: 0.0,
            time_unit: TimeUnit::InverseChi,
        }
    }

    /// Equal nonlinearities and equal damping on both modes, times in seconds.
    pub fn damped(chi: f64, alpha: f64, epsilon: f64, kappa: f64) -> Self {
        Self {
            kappa_a: kappa,
            kappa_b: kappa,
            time_unit: TimeUnit::Seconds,
            ..Self::undamped(chi, alpha, epsilon)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.chi_a,
            self.chi_b,
            self.epsilon.re,
            self.epsilon.im,
            self.alpha.re,
            self.alpha.im,
            self.kappa_a,
            self.kappa_b,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.kappa_a < 0.0 {
            return Err(Error::InvalidParams(format!("kappa_a = {} is negative", self.kappa_a)));
        }
        if self.kappa_b < 0.0 {
            return Err(Error::InvalidParams(format!("kappa_b = {} is negative", self.kappa_b)));
        }
        Ok(())
    }

    /// Real `(α, ε)` for the closed-form path.
    fn analytic_couplings(&self) -> Result<(f64, f64)> {
        let ok = |z: C64| z.im == 0.0 && z.re >= 0.0;
        if !ok(self.alpha) || !ok(self.epsilon) {
            return Err(Error::NonRealAnalyticParams {
                alpha: self.alpha.to_string(),
                epsilon: self.epsilon.to_string(),
            });
        }
        Ok((self.alpha.re, self.epsilon.re))
    }
}

/// Amplitudes of `|2,0⟩`, `|1,2⟩` and `|0,2⟩` in the truncated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedAmplitudes {
    pub c20: C64,
    pub c12: C64,
    pub c02: C64,
}

impl TruncatedAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.c20.norm_sqr() + self.c12.norm_sqr() + self.c02.norm_sqr()
    }
}

/// `Ĥ = (χ_a/2)(a†)²a² + (χ_b/2)(b†)²b² + ε(a†)²b² + ε*(b†)²a² + αa† + α*a`.
pub fn hamiltonian(params: &CouplerParams, dims: ModeDims) -> OperatorMatrix {
    let a = annihilation(dims, Mode::A);
    let ad = creation(dims, Mode::A);
    let b = annihilation(dims, Mode::B);
    let bd = creation(dims, Mode::B);

    let a2 = a.matrix().dot(a.matrix());
    let ad2 = ad.matrix().dot(ad.matrix());
    let b2 = b.matrix().dot(b.matrix());
    let bd2 = bd.matrix().dot(bd.matrix());

    let kerr = ad2.dot(&a2).mapv(|z| z * (params.chi_a / 2.0)) + bd2.dot(&b2).mapv(|z| z * (params.chi_b / 2.0));
    // ε X + ε* X† with X = (a†)²b², so the sum is Hermitian by construction
    let pair_exchange = ad2.dot(&b2);
    let pair_term = pair_exchange.mapv(|z| z * params.epsilon)
        + pair_exchange.t().mapv(|z| z.conj() * params.epsilon.conj());
    let pump = ad.matrix().mapv(|z| z * params.alpha) + a.matrix().mapv(|z| z * params.alpha.conj());

    OperatorMatrix::new(dims, kerr + pair_term + pump, true).expect("Hermitian by construction")
}

/// `[√(2κ_a)·a, √(2κ_b)·b]`, skipping modes with zero damping.
pub fn collapse_operators(params: &CouplerParams, dims: ModeDims) -> Vec<OperatorMatrix> {
    [(params.kappa_a, Mode::A), (params.kappa_b, Mode::B)]
        .into_iter()
        .filter(|(kappa, _)| *kappa != 0.0)
        .map(|(kappa, mode)| annihilation(dims, mode).scale(C64::new((2.0 * kappa).sqrt(), 0.0)))
        .collect()
}

/// `Ω = √(|α|² + 4|ε|²)`; for real couplings this is `√(α² + 4ε²)`.
pub fn effective_frequency(params: &CouplerParams) -> f64 {
    (params.alpha.norm_sqr() + 4.0 * params.epsilon.norm_sqr()).sqrt()
}

/// Closed-form three-state amplitudes for the initial state `|2,0⟩`:
///
/// ```text
/// c20 = (α² + 4ε² cos Ωt) / Ω²
/// c12 = 2εα (cos Ωt − 1) / Ω²
/// c02 = −2iε sin(Ωt) / Ω
/// ```
///
/// Only real, non-negative `α`, `ε` are accepted; the numeric path handles
/// complex couplings.
pub fn analytic_amplitudes(params: &CouplerParams, t: f64) -> Result<TruncatedAmplitudes> {
    let (alpha, eps) = params.analytic_couplings()?;
    if alpha == 0.0 && eps == 0.0 {
        return Err(Error::DegenerateParams);
    }
    let omega = (alpha * alpha + 4.0 * eps * eps).sqrt();
    let omega2 = omega * omega;
    let (sin, cos) = (omega * t).sin_cos();
    Ok(TruncatedAmplitudes {
        c20: C64::new((alpha * alpha + 4.0 * eps * eps * cos) / omega2, 0.0),
        c12: C64::new(2.0 * eps * alpha * (cos - 1.0) / omega2, 0.0),
        c02: C64::new(0.0, -2.0 * eps * sin / omega),
    })
}

/// Right-hand side of the three-state equations in the frame rotating at the
/// common energy `χ` of `|2,0⟩`, `|0,2⟩`, `|1,2⟩` (valid for `χ_a = χ_b`):
///
/// ```text
/// i dc20/dt = 2ε c02
/// i dc02/dt = 2ε* c20 + α* c12
/// i dc12/dt = α c02
/// ```
pub fn three_state_rhs(params: &CouplerParams, amps: &TruncatedAmplitudes) -> TruncatedAmplitudes {
    let minus_i = C64::new(0.0, -1.0);
    let (eps, alpha) = (params.epsilon, params.alpha);
    TruncatedAmplitudes {
        c20: minus_i * 2.0 * eps * amps.c02,
        c02: minus_i * (2.0 * eps.conj() * amps.c20 + alpha.conj() * amps.c12),
        c12: minus_i * alpha * amps.c02,
    }
}

/// Embeds the three amplitudes at `|2,0⟩`, `|1,2⟩`, `|0,2⟩`; all other
/// amplitudes are zero. The embedding is an isometry, so the output norm is
/// that of the input.
pub fn truncated_to_full(amps: &TruncatedAmplitudes, dims: ModeDims) -> Result<StateVector> {
    dims.require_levels("Fock levels 0..=2 in both modes", 3)?;
    let mut v = Array1::zeros(dims.total());
    v[dims.index(2, 0)?] = amps.c20;
    v[dims.index(1, 2)?] = amps.c12;
    v[dims.index(0, 2)?] = amps.c02;
    StateVector::from_raw(dims, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::basis_state;
    use crate::linalg;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn element(h: &OperatorMatrix, bra: (usize, usize), ket: (usize, usize)) -> C64 {
        let d = h.dims();
        h.matrix()[[d.index(bra.0, bra.1).unwrap(), d.index(ket.0, ket.1).unwrap()]]
    }

    #[test]
    fn kerr_only_is_diagonal() {
        let d = ModeDims::new(5, 4).unwrap();
        let p = CouplerParams {
            chi_a: 3.0,
            chi_b: 7.0,
            ..CouplerParams::undamped(1.0, 0.0, 0.0)
        };
        let h = hamiltonian(&p, d);
        for ((i, j), z) in h.matrix().indexed_iter() {
            if i != j {
                assert_eq!(*z, c(0.0, 0.0));
            } else {
                let (n, m) = d.unflatten(i).unwrap();
                let e = 1.5 * (n * n.saturating_sub(1)) as f64 + 3.5 * (m * m.saturating_sub(1)) as f64;
                assert!((z - c(e, 0.0)).norm() < 1e-12, "{n},{m}: {z}");
            }
        }
    }

    #[test]
    fn pair_exchange_and_pump_elements() {
        let d = ModeDims::square(4).unwrap();
        let p = CouplerParams::undamped(25.0, 0.3, 0.7);
        let h = hamiltonian(&p, d);
        assert!((element(&h, (2, 0), (0, 2)) - c(1.4, 0.0)).norm() < 1e-14);
        assert!((element(&h, (1, 2), (0, 2)) - c(0.3, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn resonant_triple_is_degenerate() {
        let d = ModeDims::square(6).unwrap();
        let chi = 25.0;
        let h = hamiltonian(&CouplerParams::undamped(chi, 0.0, 0.0), d);
        for level in [(2, 0), (0, 2), (1, 2)] {
            assert!((element(&h, level, level) - c(chi, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn complex_couplings_stay_hermitian() {
        let d = ModeDims::square(6).unwrap();
        let p = CouplerParams {
            epsilon: c(0.2, -0.7),
            alpha: c(-0.4, 0.9),
            ..CouplerParams::undamped(3.0, 0.0, 0.0)
        };
        let h = hamiltonian(&p, d);
        assert!(h.hermitian_hint());
        assert!(linalg::hermiticity_error(h.matrix()) <= 1e-12);
        assert!((element(&h, (2, 0), (0, 2)) - c(0.4, -1.4)).norm() < 1e-14);
        assert!((element(&h, (0, 2), (2, 0)) - c(0.4, 1.4)).norm() < 1e-14);
    }

    #[test]
    fn collapse_operator_list() {
        let d = ModeDims::square(3).unwrap();
        assert!(collapse_operators(&CouplerParams::undamped(1.0, 0.1, 0.1), d).is_empty());
        let chi = 1e8;
        let p = CouplerParams {
            kappa_b: 0.0,
            ..CouplerParams::damped(chi, chi / 20.0, chi / 40.0, chi / 500.0)
        };
        let ops = collapse_operators(&p, d);
        assert_eq!(ops.len(), 1);
        let a = annihilation(d, Mode::A);
        let expected = a.matrix().mapv(|z| z * 4e5f64.sqrt());
        assert!(linalg::max_abs(&(ops[0].matrix() - &expected)) < 1e-9);
        // C†C = 2κ n̂
        let cdc = ops[0].adjoint().dot(&ops[0]).unwrap();
        let n = crate::hilbert::number(d, Mode::A);
        assert!(linalg::max_abs(&(cdc.matrix() - &n.matrix().mapv(|z| z * 4e5))) < 1e-8);
    }

    #[test]
    fn analytic_initial_and_revival() {
        let p = CouplerParams::undamped(25.0, 0.3, 0.17);
        let omega = effective_frequency(&p);
        for t in [0.0, 2.0 * PI / omega] {
            let amps = analytic_amplitudes(&p, t).unwrap();
            assert!((amps.c20 - c(1.0, 0.0)).norm() < 1e-12);
            assert!(amps.c12.norm() < 1e-12);
            assert!(amps.c02.norm() < 1e-12);
        }
    }

    #[test]
    fn analytic_half_period_equal_couplings() {
        let g = PI / 25.0;
        let p = CouplerParams::undamped(25.0, g, g);
        let amps = analytic_amplitudes(&p, PI / effective_frequency(&p)).unwrap();
        assert!((amps.c20 - c(-0.6, 0.0)).norm() < 1e-12);
        assert!((amps.c12 - c(-0.8, 0.0)).norm() < 1e-12);
        assert!(amps.c02.norm() < 1e-12);
    }

    #[test]
    fn analytic_rejects_bad_params() {
        let zero = CouplerParams::undamped(25.0, 0.0, 0.0);
        assert!(matches!(analytic_amplitudes(&zero, 1.0), Err(Error::DegenerateParams)));
        let complex = CouplerParams {
            epsilon: c(0.1, 0.1),
            ..CouplerParams::undamped(25.0, 0.1, 0.0)
        };
        assert!(matches!(analytic_amplitudes(&complex, 1.0), Err(Error::NonRealAnalyticParams { .. })));
        let negative = CouplerParams::undamped(25.0, -0.1, 0.1);
        assert!(analytic_amplitudes(&negative, 1.0).is_err());
    }

    #[test]
    fn effective_frequency_values() {
        let g = PI / 25.0;
        let omega = effective_frequency(&CouplerParams::undamped(25.0, g, g));
        assert!((omega - g * 5f64.sqrt()).abs() < 1e-15);
        assert!((omega - 0.280993).abs() < 1e-6);
        assert_eq!(effective_frequency(&CouplerParams::undamped(1.0, 1.0, 0.0)), 1.0);
        assert_eq!(effective_frequency(&CouplerParams::undamped(1.0, 0.0, 1.0)), 2.0);
    }

    #[test]
    fn embedding_places_amplitudes() {
        let d = ModeDims::square(3).unwrap();
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let s = truncated_to_full(&TruncatedAmplitudes { c20: one, c12: zero, c02: zero }, d).unwrap();
        assert_eq!(s, basis_state(d, 2, 0).unwrap());
        let s = truncated_to_full(&TruncatedAmplitudes { c20: zero, c12: zero, c02: one }, d).unwrap();
        assert_eq!(s, basis_state(d, 0, 2).unwrap());
        let amps = TruncatedAmplitudes {
            c20: c(0.3, 0.1),
            c12: c(-0.2, 0.0),
            c02: c(0.0, 0.5),
        };
        let s = truncated_to_full(&amps, ModeDims::square(5).unwrap()).unwrap();
        assert!((s.norm() - amps.norm_sqr().sqrt()).abs() < 1e-15);
        assert!(truncated_to_full(&amps, ModeDims::logical(2, 3).unwrap()).is_err());
    }

    #[test]
    fn negative_damping_rejected() {
        let mut p = CouplerParams::damped(1.0, 0.1, 0.1, 0.01);
        assert!(p.validate().is_ok());
        p.kappa_a = -1.0;
        assert!(p.validate().is_err());
    }
}
