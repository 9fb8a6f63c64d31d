use std::f64::consts::PI;

use proptest::prelude::*;

use gatesim_core::budget::{cavity_lifetime, squid_coupling, time_cp3, time_ntcnot_n, SquidParams};
use gatesim_core::dj::{run_dj, OracleVariant};
use gatesim_core::hamiltonians::{
    dispersive, raman_effective, raman_full, resonant_drive, DeviceParams, PerQubit, QubitRole,
};
use gatesim_core::primitives::Mode;
use gatesim_core::quantum::{
    evolve, propagator, CMatrix, CVector, HermitianOperator, HilbertSpace, StateVector, UnitaryMatrix, C64,
};
use gatesim_core::sequencer::{
    compose, compose_steps, cp3_sequence, ncp_sequence, ntcnot_sequence, ComposeOptions,
};
use gatesim_core::verification::report;

fn params(g: [f64; 3], delta_ratio: f64, omega_ratio: f64) -> DeviceParams {
    let gmax = g.iter().copied().fold(0.0, f64::max);
    DeviceParams {
        g: PerQubit::PerSlot(g.to_vec()),
        delta_c: delta_ratio * gmax,
        delta_ck: PerQubit::PerSlot(g.iter().map(|x| delta_ratio * x).collect()),
        omega_raman: None,
        omega_resonant: omega_ratio * gmax,
        ..DeviceParams::uniform(1.0, 10.0, 10.0)
    }
}

fn couplings() -> impl Strategy<Value = [f64; 3]> {
    [0.5f64..2.0, 0.5f64..2.0, 0.5f64..2.0]
}

fn random_hermitian(space: &HilbertSpace, seed: &[f64]) -> HermitianOperator {
    let d = space.total_dim();
    let mut m = CMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in i..d {
            let re = seed[k % seed.len()];
            let im = if i == j { 0.0 } else { seed[(k + 7) % seed.len()] };
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
            k += 1;
        }
    }
    HermitianOperator::new(space.clone(), m).unwrap()
}

fn max_diff(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
    (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn squid() -> SquidParams {
    SquidParams {
        junction_capacitance: 9e-14,
        loop_inductance: 1e-10,
        damping_resistance: 1e9,
        beta_l: 1.12,
        external_flux: 0.4995,
        coupling_matrix_element: 0.078,
        loop_area: 1.6e-9,
        cavity_volume: 1e-8,
        cavity_frequency: 3.6e9,
        antinode_factor: 1.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagator_is_unitary_and_preserves_norm(
        seed in prop::collection::vec(-2.0f64..2.0, 12),
        t in 0.0f64..5.0,
        amps in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let space = HilbertSpace::new(vec![4, 2, 2]).unwrap();
        let h = random_hermitian(&space, &seed);
        let u = propagator(&h, t).unwrap();
        prop_assert!(u.unitarity_error() < 1e-10);
        let v = CVector::from_iterator(16, amps.iter().map(|&x| C64::new(x, 0.5 * x)));
        prop_assume!(v.norm() > 1e-3);
        let psi = StateVector::new(space.clone(), v.unscale(v.norm())).unwrap();
        let out = evolve(&psi, &h, t).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn propagators_compose_in_time(seed in prop::collection::vec(-2.0f64..2.0, 9), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let space = HilbertSpace::new(vec![4, 3]).unwrap();
        let h = random_hermitian(&space, &seed);
        let whole = propagator(&h, s + t).unwrap();
        let split = propagator(&h, t).unwrap().then_after(&propagator(&h, s).unwrap()).unwrap();
        prop_assert!(max_diff(&whole, &split) < 1e-10);
    }

    #[test]
    fn builders_are_hermitian_and_disjoint_terms_commute(g in couplings(), ratio in 5.0f64..60.0, phi in -PI..PI) {
        let p = params(g, ratio, 10.0);
        let space = HilbertSpace::qudits_with_cavity(3, 3).unwrap();
        let emitter = raman_full(&p, 0, QubitRole::RamanEmitter, &space).unwrap();
        let absorber = raman_effective(&p, 1, QubitRole::RamanAbsorber, &space).unwrap();
        let target = dispersive(&p, 2, &space).unwrap();
        let drive = resonant_drive(p.omega_resonant, phi, 1, 0, &space).unwrap();
        for h in [&emitter, &absorber, &target, &drive] {
            let dev = (h.matrix() - h.matrix().adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(dev <= 1e-14);
        }
        // Terms on different qubits commute unless one of them moves photons
        // and the other depends on the photon number.
        let scale = p.omega_resonant * p.delta_c;
        let target1 = dispersive(&p, 1, &space).unwrap();
        prop_assert!(target.commutator_norm(&target1).unwrap() < 1e-12 * scale);
        prop_assert!(drive.commutator_norm(&target).unwrap() < 1e-12 * scale);
        prop_assert!(drive.commutator_norm(&absorber).unwrap() < 1e-12 * scale);
        let drive2 = resonant_drive(p.omega_resonant, phi, 0, 1, &space).unwrap();
        prop_assert!(drive.commutator_norm(&drive2).unwrap() < 1e-12 * scale);
    }

    #[test]
    fn effective_raman_conserves_excitations(g in couplings(), ratio in 5.0f64..60.0) {
        let p = params(g, ratio, 10.0);
        let space = HilbertSpace::qudits_with_cavity(2, 4).unwrap();
        for (slot, role) in [(0, QubitRole::RamanEmitter), (1, QubitRole::RamanAbsorber)] {
            let h = raman_effective(&p, slot, role, &space).unwrap();
            let j = role.raman_level();
            let d = space.total_dim();
            let mut number = CMatrix::zeros(d, d);
            for i in 0..d {
                let n = space.digit(i, 2) as f64;
                let on_j = if space.digit(i, slot) == j { 1.0 } else { 0.0 };
                number[(i, i)] = C64::new(n + on_j, 0.0);
            }
            let nop = HermitianOperator::new(space.clone(), number).unwrap();
            prop_assert!(h.commutator_norm(&nop).unwrap() < 1e-12 * p.delta_c);
        }
    }

    #[test]
    fn cp3_duration_matches_budget(g in couplings(), ratio in 10.0f64..60.0, omega in 2.0f64..40.0) {
        let p = params(g, ratio, omega);
        let seq = cp3_sequence(&p).unwrap();
        let t = time_cp3(&p).unwrap();
        prop_assert!((seq.total_duration() - t).abs() <= 1e-14 * t);
    }

    #[test]
    fn ntcnot_duration_is_independent_of_n(g in 0.3f64..3.0, ratio in 10.0f64..60.0, n in 2usize..12) {
        let p = DeviceParams::uniform(g, ratio, 10.0);
        prop_assert_eq!(time_ntcnot_n(&p, n).unwrap(), time_ntcnot_n(&p, 2).unwrap());
    }

    #[test]
    fn lifetime_is_linear_in_q(q in 1e2f64..1e8, nu in 1e8f64..1e11, k in 0.1f64..10.0) {
        let a = cavity_lifetime(q, nu).unwrap();
        let b = cavity_lifetime(k * q, nu).unwrap();
        prop_assert!((b - k * a).abs() <= 1e-12 * b);
        prop_assert!((a - q / (2.0 * PI * nu)).abs() <= 1e-15 * a);
    }

    #[test]
    fn squid_coupling_scaling(k in 0.01f64..100.0, which in 0usize..4) {
        let base = squid();
        let g0 = squid_coupling(&base).unwrap();
        let mut sq = base.clone();
        let expected = match which {
            0 => { sq.coupling_matrix_element *= k; k * g0 }
            1 => { sq.loop_area *= k; k * g0 }
            2 => { sq.antinode_factor = k.min(1.0); k.min(1.0) * g0 }
            _ => { sq.loop_inductance *= k; g0 / k }
        };
        let g = squid_coupling(&sq).unwrap();
        prop_assert!((g - expected).abs() <= 1e-12 * expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sequences_split_and_stay_unitary(g in couplings(), ratio in 10.0f64..40.0, cut in 0usize..8) {
        let p = params(g, ratio, 10.0);
        let opts = ComposeOptions::default();
        for seq in [cp3_sequence(&p).unwrap(), ntcnot_sequence(3, &p).unwrap()] {
            let k = cut.min(seq.step_count());
            for mode in [Mode::Analytic, Mode::SimulatedEffective, Mode::SimulatedFull] {
                let whole = compose(&seq, mode).unwrap();
                prop_assert!(whole.unitarity_error() < 1e-9);
                let a = compose_steps(&seq, 0..k, mode, &opts).unwrap();
                let b = compose_steps(&seq, k..seq.step_count(), mode, &opts).unwrap();
                prop_assert!(max_diff(&whole, &b.then_after(&a).unwrap()) < 1e-9);
            }
        }
    }

    #[test]
    fn analytic_gates_are_exact_for_any_couplings(g in couplings(), ratio in 10.0f64..40.0, n in 3usize..5) {
        let p = DeviceParams::uniform(g[0], ratio, 10.0);
        for seq in [ncp_sequence(n, &p).unwrap(), ntcnot_sequence(n, &p).unwrap()] {
            let r = report(&seq, Mode::Analytic).unwrap();
            prop_assert!(r.exact_phase_match);
            prop_assert!(r.residual_photon < 1e-12 && r.leakage < 1e-12);
            prop_assert!(r.max_level3_population == 0.0);
        }
    }

    #[test]
    fn effective_mode_reproduces_analytic(g in couplings(), ratio in 10.0f64..40.0) {
        let p = params(g, ratio, 10.0);
        let seq = cp3_sequence(&p).unwrap();
        let r = report(&seq, Mode::SimulatedEffective).unwrap();
        prop_assert!(r.max_deviation < 1e-9);
    }

    #[test]
    fn deutsch_jozsa_is_deterministic(g in 0.2f64..5.0, ratio in 10.0f64..40.0, id in 1u8..=4) {
        let p = DeviceParams::uniform(g, ratio, 10.0);
        let v = OracleVariant::new(id).unwrap();
        for mode in [Mode::Analytic, Mode::SimulatedEffective] {
            let r = run_dj(v, &p, mode).unwrap();
            prop_assert!(r.correct && (r.probability - 1.0).abs() < 1e-10);
        }
    }
}
