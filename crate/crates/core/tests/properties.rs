use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use proptest::prelude::*;

use kerr_coupler::hilbert::{partial_trace, DensityMatrix, Mode, ModeDims, StateVector};
use kerr_coupler::measures::{
    chsh_violation, entanglement_entropy, mixed_fidelity, pure_fidelity, FidelityConvention,
};
use kerr_coupler::model::{analytic_amplitudes, effective_frequency, hamiltonian, CouplerParams};
use kerr_coupler::scenario::parse_number;
use kerr_coupler::series::format_number;
use kerr_coupler::C64;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

fn dims() -> impl Strategy<Value = ModeDims> {
    (3usize..7, 3usize..7).prop_map(|(a, b)| ModeDims::new(a, b).unwrap())
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(r, i)| C64::new(r, i)), len)
}

fn pure_state(dims: ModeDims) -> impl Strategy<Value = StateVector> {
    complex_vec(dims.total())
        .prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(move |v| StateVector::normalized(dims, Array1::from(v)).unwrap())
}

/// `G G† / tr(G G†)` with a full-rank floor.
fn mixed_state(dims: ModeDims) -> impl Strategy<Value = DensityMatrix> {
    let n = dims.total();
    complex_vec(n * n).prop_map(move |v| {
        let g = Array2::from_shape_vec((n, n), v).unwrap();
        let mut m = g.dot(&g.t().mapv(|z| z.conj())) + Array2::from_diag_elem(n, C64::new(1e-3, 0.0));
        let tr: C64 = m.diag().sum();
        m.mapv_inplace(|z| z / tr);
        let herm = (&m + &m.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        DensityMatrix::new(dims, herm).unwrap()
    })
}

fn local_unitary() -> impl Strategy<Value = Array2<C64>> {
    let angle = 0.0..2.0 * PI;
    ((0.0f64..1.0), angle.clone(), angle.clone(), angle).prop_map(|(x, phi, psi, chi)| {
        let (s, c) = x.sqrt().asin().sin_cos();
        let e = |a: f64| C64::from_polar(1.0, a);
        Array2::from_shape_vec(
            (2, 2),
            vec![e(phi + psi) * c, e(phi + chi) * s, -e(phi - chi) * s, e(phi - psi) * c],
        )
        .unwrap()
    })
}

fn max_dev(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn flat_index_round_trips(d in dims(), seed in 0usize..1000) {
        let i = seed % d.total();
        let (n, m) = d.unflatten(i).unwrap();
        prop_assert_eq!(d.index(n, m).unwrap(), i);
        prop_assert_eq!(i, n * d.dim_b() + m);
    }

    #[test]
    fn closed_form_is_normalized(alpha in 0.0f64..3.0, eps in 1e-3f64..3.0, t in 0.0f64..500.0) {
        let p = CouplerParams::undamped(25.0, alpha, eps);
        let amps = analytic_amplitudes(&p, t).unwrap();
        prop_assert!((amps.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn closed_form_is_periodic(alpha in 0.1f64..2.0, eps in 0.1f64..2.0, t in 0.0f64..20.0) {
        let p = CouplerParams::undamped(25.0, alpha, eps);
        let period = 2.0 * PI / effective_frequency(&p);
        let a = analytic_amplitudes(&p, t).unwrap();
        let b = analytic_amplitudes(&p, t + period).unwrap();
        for (x, y) in [(a.c20, b.c20), (a.c12, b.c12), (a.c02, b.c02)] {
            prop_assert!((x - y).norm() <= 1e-12);
        }
    }

    #[test]
    fn hamiltonian_hermitian_for_complex_couplings(
        d in dims(),
        chi in (-5.0f64..5.0, -5.0f64..5.0),
        eps in (-2.0f64..2.0, -2.0f64..2.0),
        alpha in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let p = CouplerParams {
            chi_a: chi.0,
            chi_b: chi.1,
            epsilon: C64::new(eps.0, eps.1),
            alpha: C64::new(alpha.0, alpha.1),
            ..CouplerParams::undamped(1.0, 0.0, 0.0)
        };
        let h = hamiltonian(&p, d);
        let adj = h.matrix().t().mapv(|z| z.conj());
        prop_assert!(max_dev(h.matrix(), &adj) <= 1e-12);
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(
        (r1, r2) in dims().prop_flat_map(|d| (mixed_state(d), mixed_state(d))),
        w in 0.0f64..1.0,
    ) {
        let d = r1.dims();
        let mix = DensityMatrix::new(d, r1.matrix().mapv(|z| z * w) + r2.matrix().mapv(|z| z * (1.0 - w))).unwrap();
        for side in [Mode::A, Mode::B] {
            let lhs = partial_trace(&mix, side).unwrap();
            let p1 = partial_trace(&r1, side).unwrap();
            let p2 = partial_trace(&r2, side).unwrap();
            let rhs = p1.matrix().mapv(|z| z * w) + p2.matrix().mapv(|z| z * (1.0 - w));
            prop_assert!(max_dev(lhs.matrix(), &rhs) <= 1e-13);
            prop_assert!((lhs.trace() - 1.0).abs() <= 1e-12);
            prop_assert_eq!(lhs.dims().total(), d.dim(side));
        }
    }

    #[test]
    fn uhlmann_fidelity_is_symmetric_and_bounded(
        (r, s) in (3usize..5).prop_flat_map(|n| {
            let d = ModeDims::new(n, 3).unwrap();
            (mixed_state(d), mixed_state(d))
        }),
    ) {
        let f_rs = mixed_fidelity(&r, &s).unwrap();
        let f_sr = mixed_fidelity(&s, &r).unwrap();
        prop_assert!((f_rs - f_sr).abs() <= 1e-8);
        prop_assert!((0.0..=1.0).contains(&f_rs));
    }

    #[test]
    fn uhlmann_reduces_to_overlap_on_pure_states(
        (psi, phi) in dims().prop_flat_map(|d| (pure_state(d), pure_state(d))),
    ) {
        let f = mixed_fidelity(&psi.to_density(), &phi.to_density()).unwrap();
        let amp = pure_fidelity(&psi, &phi, FidelityConvention::Amplitude).unwrap();
        prop_assert!((f - amp).abs() <= 1e-6, "{} vs {}", f, amp);
    }

    #[test]
    fn entropy_within_schmidt_bounds(psi in dims().prop_flat_map(pure_state)) {
        let d = psi.dims();
        let e = entanglement_entropy(&psi).unwrap();
        let cap = (d.dim_a().min(d.dim_b()) as f64).log2();
        prop_assert!(e >= 0.0 && e <= cap + 1e-12);
    }

    #[test]
    fn chsh_invariant_under_local_unitaries(
        rho in mixed_state(ModeDims::logical(2, 2).unwrap()),
        ua in local_unitary(),
        ub in local_unitary(),
    ) {
        let u = Array2::from_shape_fn((4, 4), |(i, j)| ua[[i / 2, j / 2]] * ub[[i % 2, j % 2]]);
        let rotated = u.dot(rho.matrix()).dot(&u.t().mapv(|z| z.conj()));
        let rotated = DensityMatrix::new(rho.dims(), rotated).unwrap();
        let before = chsh_violation(&rho).unwrap();
        let after = chsh_violation(&rotated).unwrap();
        prop_assert!((before.m_value - after.m_value).abs() <= 1e-10);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&before.b_value));
    }

    #[test]
    fn csv_numbers_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        let text = format_number(x);
        prop_assert_eq!(text.parse::<f64>().unwrap(), x);
        prop_assert_eq!(parse_number(&text).unwrap(), x);
    }
}
