use num_complex::Complex64;
use proptest::prelude::*;
use qcool::budget::{budget_for_observable, error_from_resources, failure_probability};
use qcool::engine::{EigenSystem, StateVector};
use qcool::models::{basis_state, heisenberg, random_pauli_hamiltonian};
use qcool::pauli::{Pauli, PauliString, PauliSum};
use qcool::shots::estimator_r;
use qcool::{CoolingFunction, CoolingKind};

const REALIZABLE: [CoolingKind; 4] = [
    CoolingKind::Triangle,
    CoolingKind::Exponential,
    CoolingKind::Gaussian,
    CoolingKind::Sech,
];

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(0u8..4, n), any::<bool>()).prop_map(|(codes, neg)| {
        let letters = codes
            .into_iter()
            .map(|c| match c {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect();
        PauliString::new(letters, neg).unwrap()
    })
}

fn state(n: usize) -> impl Strategy<Value = StateVector<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map(
        "zero vector",
        move |v| {
            let amps: Vec<Complex64> = v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
            StateVector::normalized(n, amps).ok()
        },
    )
}

fn kind() -> impl Strategy<Value = CoolingKind> {
    prop::sample::select(REALIZABLE.to_vec())
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pauli_string_squares_to_identity(p in pauli_string(4), psi in state(4)) {
        let once = p.apply(psi.amplitudes()).unwrap();
        let twice = p.apply(&once).unwrap();
        prop_assert!(max_diff(&twice, psi.amplitudes()) < 1e-12);
    }

    #[test]
    fn pauli_sum_acts_linearly(
        a in pauli_string(3),
        b in pauli_string(3),
        ca in 0.01f64..2.0,
        cb in 0.01f64..2.0,
        psi in state(3),
    ) {
        let sum = PauliSum::new(3, vec![(ca, a.clone()), (cb, b.clone())]).unwrap();
        let lhs = sum.apply(psi.amplitudes()).unwrap();
        let pa = a.apply(psi.amplitudes()).unwrap();
        let pb = b.apply(psi.amplitudes()).unwrap();
        let rhs: Vec<Complex64> = pa.iter().zip(&pb).map(|(x, y)| x * ca + y * cb).collect();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn pauli_expectation_is_bounded(p in pauli_string(3), psi in state(3)) {
        let v = psi.expectation(&p).unwrap();
        prop_assert!(v.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn g_is_even_and_bounded(k in kind(), h in -20.0f64..20.0) {
        let cf = CoolingFunction::<f64>::new(k);
        prop_assert!((cf.g(h) - cf.g(-h)).abs() < 1e-15);
        prop_assert!(cf.g(h) <= 1.0 && cf.g(h) >= 0.0);
        prop_assert!((cf.g(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn g_is_non_increasing_in_magnitude(k in kind(), a in 0.0f64..10.0, d in 0.0f64..10.0) {
        let cf = CoolingFunction::<f64>::new(k);
        prop_assert!(cf.g(a + d) <= cf.g(a) + 1e-15);
    }

    #[test]
    fn g_inverse_reaches_the_target(k in kind(), p in 1e-6f64..1.0) {
        let cf = CoolingFunction::<f64>::new(k);
        let h = cf.g_inverse(p).unwrap();
        prop_assert!(h >= 0.0);
        if k == CoolingKind::Sech {
            prop_assert!(cf.g(h) <= p * (1.0 + 1e-12));
        } else {
            prop_assert!((cf.g(h) - p).abs() < 1e-9 * p.max(1e-3));
        }
    }

    #[test]
    fn tail_bound_inverts_cutoff(k in kind(), eps in 1e-8f64..0.5) {
        let cf = CoolingFunction::<f64>::new(k);
        let l = cf.cutoff(eps).unwrap();
        prop_assert!(l > 0.0);
        prop_assert!((cf.tail_bound(l).unwrap() - eps).abs() < 1e-9 * eps);
    }

    #[test]
    fn evolution_preserves_norm(seed in any::<u64>(), psi in state(3), t in -5.0f64..5.0) {
        let h = random_pauli_hamiltonian::<f64>(3, 5, seed).unwrap();
        let es = EigenSystem::eigendecompose(&h, &psi).unwrap();
        let out = es.evolve(&psi, t).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_composes(seed in any::<u64>(), psi in state(3), s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let h = random_pauli_hamiltonian::<f64>(3, 5, seed).unwrap();
        let es = EigenSystem::eigendecompose(&h, &psi).unwrap();
        let split = es.evolve(&es.evolve(&psi, s).unwrap(), t).unwrap();
        let joint = es.evolve(&psi, s + t).unwrap();
        prop_assert!(max_diff(split.amplitudes(), joint.amplitudes()) < 1e-10);
    }

    #[test]
    fn hadamard_estimator_has_modulus_two(b in 0u8..2, a in 0u8..2) {
        prop_assert!((estimator_r::<f64>(b, a).norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn observable_budget_scales_inverse_square(
        k in kind(),
        eps in 0.01f64..0.4,
        overlap in 0.05f64..1.0,
        gap in 0.1f64..3.0,
    ) {
        let cf = CoolingFunction::<f64>::new(k);
        let coarse = budget_for_observable(&cf, eps, overlap, gap, 32.0, false).unwrap();
        let fine = budget_for_observable(&cf, eps / 2.0, overlap, gap, 32.0, false).unwrap();
        let ratio = fine.n_m as f64 / coarse.n_m as f64;
        prop_assert!((ratio - 4.0).abs() < 4.0 * 2.0 / coarse.n_m as f64 + 1e-9);
        prop_assert!(fine.tau >= coarse.tau);
        prop_assert!(fine.x_m >= coarse.x_m);
        prop_assert!((coarse.t_m - coarse.tau * coarse.x_m).abs() < 1e-9 * coarse.t_m.max(1.0));
        let wider = budget_for_observable(&cf, eps, overlap, 2.0 * gap, 32.0, false).unwrap();
        prop_assert!((wider.tau * 2.0 - coarse.tau).abs() < 1e-12 * coarse.tau.max(1.0));
    }

    #[test]
    fn failure_probability_decreases_with_k(k in 1.0f64..200.0, dk in 0.1f64..50.0) {
        prop_assert!(failure_probability(k + dk) < failure_probability(k));
    }

    #[test]
    fn periodic_chain_is_translation_invariant(bits in prop::collection::vec(any::<bool>(), 5), shift in 1usize..5) {
        let n = bits.len();
        let h = heisenberg::<f64>(n, 1.0, 2.0, 0.0, true).unwrap();
        let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let rotated: String = (0..n).map(|i| text.as_bytes()[(i + shift) % n] as char).collect();
        let moments = |s: &str| {
            let psi = basis_state::<f64>(s).unwrap();
            let hpsi = h.apply(psi.amplitudes()).unwrap();
            let first: Complex64 = psi.amplitudes().iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
            let second: f64 = hpsi.iter().map(|a| a.norm_sqr()).sum();
            (first.re, second)
        };
        let (m1, m2) = moments(&text);
        let (r1, r2) = moments(&rotated);
        prop_assert!((m1 - r1).abs() < 1e-12);
        prop_assert!((m2 - r2).abs() < 1e-12);
    }

    #[test]
    fn finite_tau_normalization_error_within_half_gap(
        k in kind(),
        seed in 0u64..1000,
        bits in 0usize..8,
        tau in 0.2f64..4.0,
        offset in -0.5f64..0.5,
    ) {
        let h = random_pauli_hamiltonian::<f64>(3, 5, seed).unwrap();
        let es = EigenSystem::eigendecompose(&h, &StateVector::basis(3, bits).unwrap()).unwrap();
        let j = es.largest_overlap_index();
        let Some(gap) = es.gap(j, 1e-6) else { return Ok(()) };
        let cf = CoolingFunction::<f64>::new(k);
        let p = es.overlaps()[j];
        let errors = error_from_resources(&cf, tau, 10.0, 1000, 32.0, p, gap).unwrap();
        let ej = es.shifted_energies()[j];
        let e = ej + offset * gap;
        let main = p * cf.g(tau * (e - ej)).powi(2);
        prop_assert!((es.exact_d(&cf, tau, e) - main).abs() <= errors.d_tau_window + 1e-12);
    }
}
