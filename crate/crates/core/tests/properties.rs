//! Property-based invariant tests over randomized configurations.

use proptest::prelude::*;

use qhe_core::counter_rotating;
use qhe_core::mode_dynamics::{self, FrequencyProfile};
use qhe_core::observables::{self, ThermalInit};
use qhe_core::ode;
use qhe_core::photonic_engine::{self, CycleSpec};

const TOL: f64 = 1e-9;

fn modulated_profile() -> impl Strategy<Value = FrequencyProfile> {
    (0.5f64..2.5, 0.3f64..2.0, 0.0f64..0.35, 1.0f64..4.0).prop_map(|(wb, gap, delta, nu)| {
        FrequencyProfile::sinusoidal(wb + gap, wb, delta, nu).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn unitarity_integrals_hold_along_trajectories(profile in modulated_profile()) {
        let traj = mode_dynamics::evolve_modes(&profile, 8.0, TOL).unwrap();
        prop_assert!(traj.max_unitarity_residual() <= 10.0 * TOL);
    }

    #[test]
    fn occupations_stay_convex_and_conserved(
        profile in modulated_profile(),
        q in 0.3f64..1.5,
        p in 0.3f64..1.5,
    ) {
        let init = ThermalInit::new(q, p).unwrap();
        let traj = mode_dynamics::evolve_modes(&profile, 8.0, TOL).unwrap();
        let occ = observables::occupations_from_modes(&traj, init);
        prop_assert!(occ.max_sum_drift() <= 10.0 * TOL);
        let (lo, hi) = (
            init.n_hot().min(init.n_cold()),
            init.n_hot().max(init.n_cold()),
        );
        for &na in &occ.n_a {
            prop_assert!(na >= lo - 1e-8 && na <= hi + 1e-8);
        }
    }

    #[test]
    fn moduli_are_common_mode_invariant(
        profile in modulated_profile(),
        shift in 0.5f64..3.0,
    ) {
        let FrequencyProfile::SinusoidalDetuning { omega_a0, omega_b0, delta, nu } = profile
        else { unreachable!() };
        let shifted =
            FrequencyProfile::sinusoidal(omega_a0 + shift, omega_b0 + shift, delta, nu).unwrap();
        let times = ode::linspace(0.0, 6.0, 25);
        let t1 = mode_dynamics::evolve_modes_at(&profile, &times, TOL).unwrap();
        let t2 = mode_dynamics::evolve_modes_at(&shifted, &times, TOL).unwrap();
        for (a, b) in t1.samples.iter().zip(t2.samples.iter()) {
            prop_assert!((a.c.norm() - b.c.norm()).abs() <= 10.0 * TOL);
            prop_assert!((a.d.norm() - b.d.norm()).abs() <= 10.0 * TOL);
        }
    }

    #[test]
    fn efficiency_is_heat_independent_and_work_sign_follows_thermal_gap(
        wb in 0.5f64..2.0,
        gap in 0.3f64..2.0,
        t_cold in 0.5f64..1.5,
        ratio in 1.5f64..4.0,
        delta in 0.05f64..0.35,
        nu in 1.0f64..4.0,
        t_c in 1.0f64..20.0,
    ) {
        let omega_a0 = wb + gap;
        let spec =
            CycleSpec::new(omega_a0, wb, t_cold * ratio, t_cold, delta, nu, 30.0, TOL).unwrap();
        let report = photonic_engine::run_photonic_cycle(&spec, t_c).unwrap();
        if !report.zero_heat && report.heat.abs() > 1e-9 {
            prop_assert!((report.efficiency - (1.0 - wb / omega_a0)).abs() <= 1e-10);
        }
        if report.d_sq > 1e-6 {
            let thermal_gap = spec.p() - spec.q();
            if thermal_gap.abs() > 1e-9 {
                prop_assert!(report.work * thermal_gap >= 0.0 || report.work.abs() < 1e-12);
            }
        }
        prop_assert!(report.d_sq >= 0.0 && report.d_sq <= 1.0 + 1e-12);
    }

    #[test]
    fn counter_rotating_conservation_and_floor(
        wa in 0.5f64..2.0,
        wb in 0.5f64..2.0,
        delta in 0.0f64..0.3,
        nu in 1.5f64..3.5,
        n_a0 in 0.0f64..1.5,
        n_b0 in 0.0f64..1.5,
    ) {
        let profile = FrequencyProfile::sinusoidal(wa, wb, delta, nu).unwrap();
        let traj = counter_rotating::evolve_cr_moments(&profile, n_a0, n_b0, 5.0, TOL).unwrap();
        prop_assert!(traj.max_difference_drift() <= 1e-9);
        prop_assert!(traj.sum_floor_violation() <= 1e-9);
    }

    #[test]
    fn counter_rotating_closed_cycles_never_pay_out(
        wa in 0.5f64..2.0,
        wb in 0.5f64..2.0,
        delta in 0.05f64..0.3,
        nu in 1.5f64..3.5,
        k in 1usize..=3,
        n_a0 in 0.0f64..1.5,
        n_b0 in 0.0f64..1.5,
    ) {
        let profile = FrequencyProfile::sinusoidal(wa, wb, delta, nu).unwrap();
        let t_c = k as f64 * std::f64::consts::PI / nu;
        let report = counter_rotating::run_cr_cycle(&profile, t_c, n_a0, n_b0, TOL).unwrap();
        prop_assert!(report.work <= 1e-9);
    }

    #[test]
    fn effective_temperature_inverts_bose_occupation(
        omega in 0.1f64..10.0,
        temp in 0.1f64..10.0,
    ) {
        let energy = omega * observables::bose_occupation(omega / temp).unwrap();
        let back = observables::effective_temperature(energy, omega).unwrap();
        prop_assert!((back - temp).abs() <= 1e-12 * temp.max(1.0));
    }
}
