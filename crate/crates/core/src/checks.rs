//! Seeded, reusable verification suites.
//!
//! Each function here measures one family of invariants and returns the
//! observed worst-case numbers; callers (the acceptance test target and the
//! CLI `verify` command) compare them against the release thresholds in
//! [`thresholds`]. Randomized suites draw from a ChaCha stream so a given
//! seed reproduces the same configurations everywhere.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::counter_rotating::{self, fock_oracle_cr_auto};
use crate::mode_dynamics::{self, FrequencyProfile};
use crate::observables::{self, ThermalInit};
use crate::ode;
use crate::photonic_engine::{self, CycleSpec};
use crate::three_mode;
use crate::tls_engine::{self, fermi_occupation};
use crate::Result;

use std::f64::consts::PI;

/// Default seed for randomized suites.
pub const DEFAULT_SEED: u64 = 0x51D2_C0DE;

/// Release thresholds applied to the measured values.
pub mod thresholds {
    /// Max mode-coefficient deviation from the Rabi closed form.
    pub const RABI_ORACLE: f64 = 1e-8;
    /// Max unitarity-integral residual on random modulated profiles.
    pub const UNITARITY: f64 = 1e-8;
    /// Max deviation vs the constant-profile matrix-exponential oracle.
    pub const CONSTANT_ORACLE: f64 = 1e-8;
    /// Effective-temperature exchange accuracy at the swap time.
    pub const THERMAL_SWAP: f64 = 1e-8;
    /// Reference resonance reproduction: the t_c window and the residual amplitude bound.
    pub const REFERENCE_TC_WINDOW: f64 = 0.10;
    pub const REFERENCE_ABS_C: f64 = 0.02;
    /// Efficiency-law deviation on random cycles with nonzero heat.
    pub const EFFICIENCY_LAW: f64 = 1e-10;
    /// Carnot ceiling slack on positive-work sweep points.
    pub const CARNOT_SLACK: f64 = 1e-12;
    /// Coherence error of the three-mode swap values.
    pub const THREE_MODE_COHERENCE: f64 = 1e-6;
    /// Antisymmetric-mode occupation drift.
    pub const THREE_MODE_B2_DRIFT: f64 = 1e-9;
    /// Two-qubit identity residual on a 1e4-point grid.
    pub const TLS_IDENTITY_RESIDUAL: f64 = 1e-5;
    /// Excitation-bracket slack for the two-qubit engine.
    pub const TLS_BRACKET: f64 = 1e-8;
    /// Positive-work bound for counter-rotating closed cycles.
    pub const CR_WORK: f64 = 1e-9;
    /// Conserved-difference drift and sum-floor violation bounds.
    pub const CR_DRIFT: f64 = 1e-9;
    /// Moment-vs-Fock oracle agreement.
    pub const CR_FOCK_AGREEMENT: f64 = 1e-7;
    /// Excitation-sum identity residual.
    pub const CR_IDENTITY_RESIDUAL: f64 = 1e-5;
    /// Mode-pipeline vs moment-oracle occupation gap.
    pub const CROSS_PIPELINE: f64 = 1e-7;
    /// Weighted-occupation conservation residual at q = p.
    pub const ZERO_POWER: f64 = 1e-8;
}

fn rng_for(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_modulated_profile(rng: &mut ChaCha12Rng) -> FrequencyProfile {
    let omega_b0 = rng.random_range(0.5..2.5);
    let omega_a0 = omega_b0 + rng.random_range(0.3..2.5);
    let delta = rng.random_range(0.05..0.35);
    let nu = rng.random_range(1.0..4.0);
    FrequencyProfile::sinusoidal(omega_a0, omega_b0, delta, nu).expect("valid random profile")
}

/// Max deviation of the integrated mode coefficients from the Rabi closed
/// form for `omega = 1` on a dense grid over `[0, 10 pi]`.
pub fn rabi_oracle_error(tol: f64) -> Result<f64> {
    let profile = FrequencyProfile::constant(1.0, 1.0)?;
    let times = ode::linspace(0.0, 10.0 * PI, 1257);
    let traj = mode_dynamics::evolve_modes_at(&profile, &times, tol)?;
    let mut worst = 0.0f64;
    for (t, s) in traj.times.iter().zip(traj.samples.iter()) {
        let exact = mode_dynamics::rabi_closed_form(1.0, *t);
        for (a, b) in [
            (s.c, exact.c),
            (s.d, exact.d),
            (s.e, exact.e),
            (s.f, exact.f),
        ] {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// Max unitarity residual over `n_profiles` random modulated profiles on
/// `[0, t_end]`.
pub fn unitarity_max_residual(seed: u64, n_profiles: usize, t_end: f64, tol: f64) -> Result<f64> {
    let mut rng = rng_for(seed, 1);
    let mut worst = 0.0f64;
    for _ in 0..n_profiles {
        let profile = random_modulated_profile(&mut rng);
        let traj = mode_dynamics::evolve_modes(&profile, t_end, tol)?;
        worst = worst.max(traj.max_unitarity_residual());
    }
    Ok(worst)
}

/// Max deviation of integrated coefficients from the constant-profile
/// matrix-exponential oracle over random frequency pairs in `[0.1, 10]`.
pub fn constant_oracle_max_error(seed: u64, n_profiles: usize, tol: f64) -> Result<f64> {
    let mut rng = rng_for(seed, 2);
    let times = ode::linspace(0.0, 20.0, 81);
    let mut worst = 0.0f64;
    for _ in 0..n_profiles {
        let omega_a = rng.random_range(0.1..10.0);
        let omega_b = rng.random_range(0.1..10.0);
        let profile = FrequencyProfile::constant(omega_a, omega_b)?;
        let traj = mode_dynamics::evolve_modes_at(&profile, &times, tol)?;
        for (t, s) in traj.times.iter().zip(traj.samples.iter()) {
            let exact = mode_dynamics::constant_profile_oracle(omega_a, omega_b, *t);
            worst = worst.max((s.c - exact.c).norm());
        }
    }
    Ok(worst)
}

/// Outcome of the effective-temperature swap check.
#[derive(Debug, Clone, Copy)]
pub struct ThermalSwapOutcome {
    /// Max error of the exchanged temperatures at t = pi/2.
    pub swap_error: f64,
    /// Whether the two temperature curves cross an equal-temperature point.
    pub curves_cross: bool,
}

/// Equal-frequency oscillators exchange effective temperatures at
/// `t = pi/2`; the two temperature curves pass through a crossing.
pub fn thermal_swap(tol: f64) -> Result<ThermalSwapOutcome> {
    let omega = 2.0;
    let (t_hot, t_cold) = (4.0, 1.5);
    let init = ThermalInit::new(omega / t_hot, omega / t_cold)?;
    let profile = FrequencyProfile::constant(omega, omega)?;
    let times = ode::linspace(0.0, PI / 2.0, 101);
    let traj = mode_dynamics::evolve_modes_at(&profile, &times, tol)?;
    let occ = observables::occupations_from_modes(&traj, init);

    let mut swap_error = 0.0f64;
    let mut signs = Vec::with_capacity(times.len());
    for i in 0..times.len() {
        let ta = observables::effective_temperature(omega * occ.n_a[i], omega)?;
        let tb = observables::effective_temperature(omega * occ.n_b[i], omega)?;
        signs.push(ta - tb);
        if i == times.len() - 1 {
            swap_error = (ta - t_cold).abs().max((tb - t_hot).abs());
        }
    }
    let curves_cross = signs.first().unwrap() > &0.0 && signs.last().unwrap() < &0.0;
    Ok(ThermalSwapOutcome {
        swap_error,
        curves_cross,
    })
}

/// Locate the reference resonant cycle: detuning 2, `delta = 0.2`,
/// resonant modulation; the first amplitude zero sits at t_c = 22.26.
/// Returns `(t_c, |C(t_c)|)`.
pub fn reference_resonance_root(tol: f64) -> Result<(f64, f64)> {
    let nu = photonic_engine::resonance_frequency(3.0, 1.0);
    let spec = CycleSpec::new(3.0, 1.0, 3.0, 1.0, 0.2, nu, 40.0, tol)?;
    let (t_c, d_sq) = photonic_engine::optimize_cycle_duration(&spec)?;
    Ok((t_c, (1.0 - d_sq).max(0.0).sqrt()))
}

/// Max deviation of the reported efficiency from `1 - omega_b0/omega_a0`
/// over random modulated cycles with nonzero heat; also re-checks
/// `W = Q eta` exactly.
pub fn efficiency_law_max_error(seed: u64, n_cycles: usize, tol: f64) -> Result<f64> {
    let mut rng = rng_for(seed, 3);
    let mut worst = 0.0f64;
    let mut produced = 0usize;
    while produced < n_cycles {
        let omega_b0 = rng.random_range(0.5..2.0);
        let omega_a0 = omega_b0 + rng.random_range(0.3..2.0);
        let t_cold = rng.random_range(0.5..1.5);
        let t_hot = t_cold * rng.random_range(1.5..4.0);
        let delta = rng.random_range(0.05..0.35);
        let nu = rng.random_range(1.0..4.0);
        let t_c = rng.random_range(1.0..25.0);
        let spec = CycleSpec::new(omega_a0, omega_b0, t_hot, t_cold, delta, nu, 40.0, tol)?;
        let report = photonic_engine::run_photonic_cycle(&spec, t_c)?;
        if report.zero_heat || report.heat.abs() < 1e-6 {
            continue;
        }
        produced += 1;
        let eta_freq = 1.0 - omega_b0 / omega_a0;
        worst = worst.max((report.efficiency - eta_freq).abs());
        worst = worst.max((report.work - report.heat * report.efficiency).abs());
    }
    Ok(worst)
}

/// Outcome of the reservoir/frequency sweep.
#[derive(Debug, Clone, Copy)]
pub struct CarnotGridOutcome {
    /// Worst `eta - (1 - T_c/T_h)` over positive-work points (negative when
    /// the ceiling holds strictly).
    pub max_ceiling_excess: f64,
    /// Worst positivity-boundary misplacement in grid steps (0 = every row
    /// flips sign inside the cell containing `omega_a0 T_c/T_h`).
    pub boundary_ok: bool,
    /// Number of positive-work points seen.
    pub positive_points: usize,
}

/// Sweep a `n_temps x n_freqs` grid of `(T_c, omega_b)`, running an
/// optimized cycle at every point.
pub fn carnot_grid(n_temps: usize, n_freqs: usize, tol: f64) -> Result<CarnotGridOutcome> {
    let (t_hot, omega_a0) = (2.0, 2.0);
    let mut max_excess = f64::NEG_INFINITY;
    let mut boundary_ok = true;
    let mut positive_points = 0usize;
    for i in 0..n_temps {
        let t_cold = 0.4 + 1.2 * (i as f64 + 0.5) / n_temps as f64;
        let grid: Vec<f64> = (0..n_freqs)
            .map(|j| omega_a0 * (0.08 + 0.89 * (j as f64 + 0.5) / n_freqs as f64))
            .collect();
        let sweep = photonic_engine::carnot_sweep(t_hot, t_cold, omega_a0, &grid, 0.2, tol)?;
        let ceiling = 1.0 - t_cold / t_hot;
        let boundary = sweep.boundary_omega_b;
        for p in &sweep.points {
            if p.work > 0.0 {
                positive_points += 1;
                max_excess = max_excess.max(p.efficiency - ceiling);
                // Positive work must sit above the boundary frequency.
                if p.omega_b < boundary - 1e-12 {
                    boundary_ok = false;
                }
            } else if p.omega_b > boundary + (grid[1] - grid[0]) {
                // Nonpositive work more than one grid step above the
                // boundary breaks the sign-flip structure.
                boundary_ok = false;
            }
        }
    }
    Ok(CarnotGridOutcome {
        max_ceiling_excess: max_excess,
        boundary_ok,
        positive_points,
    })
}

/// Outcome of the three-mode coherence check.
#[derive(Debug, Clone, Copy)]
pub struct ThreeModeOutcome {
    pub max_coherence_error: f64,
    pub max_b2_drift: f64,
}

/// Coherence at the collective swap time for the reference parameter pairs,
/// plus the antisymmetric-mode drift over a full trajectory.
pub fn three_mode_swap(tol: f64) -> Result<ThreeModeOutcome> {
    let t_swap = three_mode::ThreeModeTrajectory::swap_time();
    let mut max_err = 0.0f64;
    for (q, p) in [(2f64.ln(), 3f64.ln()), (0.5, 1.0)] {
        let s = three_mode::three_mode_state_at(q, p, t_swap, tol)?;
        let expected = 0.5 * (observables::bose_occupation(q)? - observables::bose_occupation(p)?);
        max_err = max_err.max((s.coherence_bc.re - expected).abs());
        max_err = max_err.max(s.coherence_bc.im.abs());
    }

    let traj = three_mode::simulate_three_mode(0.5, 1.0, 4.0, tol)?;
    let n_b2_expected = observables::bose_occupation(1.0)?;
    let max_drift = traj
        .states
        .iter()
        .map(|s| (s.n_b2 - n_b2_expected).abs())
        .fold(0.0, f64::max);
    Ok(ThreeModeOutcome {
        max_coherence_error: max_err,
        max_b2_drift: max_drift,
    })
}

/// Outcome of the two-qubit engine checks.
#[derive(Debug, Clone, Copy)]
pub struct TlsOutcome {
    /// Max residual of the occupation identity on a 1e4-point grid.
    pub identity_max_residual: f64,
    /// Worst excursion of `n_a(t)` outside `[n_b(0), n_a(0)]`.
    pub bracket_violation: f64,
    /// Whether `sign(W) = sign(n_a(0) - n_b(0))` held across the grid.
    pub work_sign_ok: bool,
    /// Whether `eta <= 1 - T_c/T_h` held on every positive-work point.
    pub ceiling_ok: bool,
    /// Points checked in the work-sign grid.
    pub grid_points: usize,
}

/// Two-qubit suite: identity residual, excitation bracket and the
/// positive-work condition over an `n x n` `(omega_b, T_c)` grid.
pub fn tls_suite(n: usize, tol: f64) -> Result<TlsOutcome> {
    // Identity residual on the dense grid.
    let profile = FrequencyProfile::sinusoidal(2.0, 1.0, 0.2, 2.2)?;
    let times = ode::linspace(0.0, 20.0, 10_001);
    let traj = tls_engine::evolve_two_qubits_at(&profile, 2.0, 0.8, &times, tol)?;
    let residuals = tls_engine::verify_occupation_identity(&traj)?;
    let identity_max_residual = residuals.iter().fold(0.0f64, |a, &b| a.max(b));

    let (n_a0, n_b0) = (traj.states[0].n_a, traj.states[0].n_b);
    let (lo, hi) = (n_b0.min(n_a0), n_b0.max(n_a0));
    let bracket_violation = traj
        .states
        .iter()
        .map(|s| (lo - s.n_a).max(s.n_a - hi).max(0.0))
        .fold(0.0, f64::max);

    // Work-sign grid: omega_b and T_c vary, T_h and omega_a fixed.
    let (omega_a0, t_hot) = (2.0, 2.0);
    let mut work_sign_ok = true;
    let mut ceiling_ok = true;
    let mut grid_points = 0usize;
    for i in 0..n {
        let t_cold = 0.4 + 1.2 * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let omega_b0 = omega_a0 * (0.1 + 0.85 * (j as f64 + 0.5) / n as f64);
            let spec = CycleSpec::new(omega_a0, omega_b0, t_hot, t_cold, 0.0, 0.0, 10.0, tol)?;
            let report = tls_engine::run_tls_cycle(&spec, 1.37)?;
            let gap = fermi_occupation(omega_a0, t_hot) - fermi_occupation(omega_b0, t_cold);
            grid_points += 1;
            if gap > 1e-9 && report.work < -1e-12 {
                work_sign_ok = false;
            }
            if gap < -1e-9 && report.work > 1e-12 {
                work_sign_ok = false;
            }
            if report.work > 0.0 && report.efficiency > report.efficiency_carnot + 1e-12 {
                ceiling_ok = false;
            }
        }
    }
    Ok(TlsOutcome {
        identity_max_residual,
        bracket_violation,
        work_sign_ok,
        ceiling_ok,
        grid_points,
    })
}

/// Outcome of the counter-rotating suite.
#[derive(Debug, Clone, Copy)]
pub struct CrOutcome {
    /// Largest cycle work seen (must stay <= CR_WORK).
    pub max_work: f64,
    pub max_diff_drift: f64,
    pub max_floor_violation: f64,
    /// Worst moment-vs-Fock occupation gap on vacuum runs.
    pub fock_gap: f64,
    /// sinh^2(1) reference error at zero frequencies.
    pub sinh_error: f64,
    /// Excitation-sum identity residual (bounded regime).
    pub sum_identity_residual: f64,
    pub cycles: usize,
}

/// Counter-rotating suite: the no-positive-work theorem over random closed
/// cycles, the conservation/floor laws, and the Fock-oracle agreement.
pub fn cr_suite(seed: u64, n_cycles: usize, tol: f64) -> Result<CrOutcome> {
    let mut rng = rng_for(seed, 4);
    let mut max_work = f64::NEG_INFINITY;
    let mut max_diff = 0.0f64;
    let mut max_floor = 0.0f64;
    for _ in 0..n_cycles {
        let omega_b0 = rng.random_range(0.5..2.0);
        let omega_a0 = rng.random_range(0.5..2.0);
        let delta = rng.random_range(0.05..0.3);
        let nu = rng.random_range(1.5..3.5);
        let k = rng.random_range(1..=3);
        let t_c = k as f64 * PI / nu;
        let n_a0 = rng.random_range(0.0..1.5);
        let n_b0 = rng.random_range(0.0..1.5);
        let profile = FrequencyProfile::sinusoidal(omega_a0, omega_b0, delta, nu)?;
        let report = counter_rotating::run_cr_cycle(&profile, t_c, n_a0, n_b0, tol)?;
        max_work = max_work.max(report.work);

        let traj = counter_rotating::evolve_cr_moments(&profile, n_a0, n_b0, t_c, tol)?;
        max_diff = max_diff.max(traj.max_difference_drift());
        max_floor = max_floor.max(traj.sum_floor_violation());
    }

    // Moment system vs truncated-Fock propagation from vacuum.
    let mut fock_gap = 0.0f64;
    for &(wa, wb, t) in &[(0.4, 0.3, 1.0), (1.1, 0.7, 1.5), (0.6, 0.6, 2.0)] {
        let profile = FrequencyProfile::constant(wa, wb)?;
        let traj = counter_rotating::evolve_cr_moments_at(&profile, 0.0, 0.0, &[t], tol)?;
        let (n_fock, _) = fock_oracle_cr_auto(wa, wb, t)?;
        fock_gap = fock_gap.max((traj.states.last().unwrap().n_a - n_fock).abs());
    }

    let zero_profile = FrequencyProfile::Constant {
        omega_a: 0.0,
        omega_b: 0.0,
    };
    let traj = counter_rotating::evolve_cr_moments_at(&zero_profile, 0.0, 0.0, &[1.0], tol)?;
    let sinh_error = (traj.states.last().unwrap().n_a - 1f64.sinh().powi(2)).abs();

    let profile = FrequencyProfile::constant(1.4, 1.2)?;
    let times = ode::linspace(0.0, 3.0, 10_001);
    let traj = counter_rotating::evolve_cr_moments_at(&profile, 0.0, 0.0, &times, tol)?;
    let sum_identity_residual = counter_rotating::verify_excitation_sum_identity(&traj)?;

    Ok(CrOutcome {
        max_work,
        max_diff_drift: max_diff,
        max_floor_violation: max_floor,
        fock_gap,
        sinh_error,
        sum_identity_residual,
        cycles: n_cycles,
    })
}

/// Max occupation gap between the mode-coefficient pipeline and the
/// first-moment oracle over random rotating-wave profiles.
pub fn cross_pipeline_max_gap(seed: u64, n_profiles: usize, tol: f64) -> Result<f64> {
    let mut rng = rng_for(seed, 5);
    let mut worst = 0.0f64;
    for _ in 0..n_profiles {
        let profile = random_modulated_profile(&mut rng);
        let q = rng.random_range(0.3..1.5);
        let p = rng.random_range(0.3..1.5);
        let init = ThermalInit::new(q, p)?;
        let times = ode::linspace(0.0, 20.0, 161);
        let traj = mode_dynamics::evolve_modes_at(&profile, &times, tol)?;
        let from_modes = observables::occupations_from_modes(&traj, init);
        let from_moments = observables::moment_ode_oracle_at(&profile, init, &times, tol)?;
        for i in 0..times.len() {
            worst = worst.max((from_modes.n_a[i] - from_moments.n_a[i]).abs());
            worst = worst.max((from_modes.n_b[i] - from_moments.n_b[i]).abs());
        }
    }
    Ok(worst)
}

/// Weighted-occupation conservation at `q = p`, plus the `q != p`
/// negative control. Returns `(matched_residual, control_residual)`.
pub fn zero_power_residuals(tol: f64) -> Result<(f64, f64)> {
    let spec = CycleSpec::new(
        1.4,
        0.7,
        2.0,
        1.0,
        0.2,
        photonic_engine::resonance_frequency(1.4, 0.7),
        30.0,
        tol,
    )?;
    let matched = photonic_engine::verify_zero_power_conservation(&spec, 20.0)?;
    let control_spec = CycleSpec::new(1.0, 1.0, 3.0, 1.0, 0.0, 0.0, 10.0, tol)?;
    let control = photonic_engine::verify_zero_power_conservation(&control_spec, PI)?;
    Ok((matched, control))
}

/// Moduli of the mode coefficients depend on the profile only through the
/// detuning; returns the worst `| |C|_1 - |C|_2 |` over two profiles with
/// identical detuning but shifted common mode.
pub fn interaction_frame_gap(tol: f64) -> Result<f64> {
    let p1 = FrequencyProfile::sinusoidal(2.0, 1.0, 0.3, 2.5)?;
    let p2 = FrequencyProfile::sinusoidal(5.5, 4.5, 0.3, 2.5)?;
    let times = ode::linspace(0.0, 12.0, 97);
    let t1 = mode_dynamics::evolve_modes_at(&p1, &times, tol)?;
    let t2 = mode_dynamics::evolve_modes_at(&p2, &times, tol)?;
    let mut worst = 0.0f64;
    for (a, b) in t1.samples.iter().zip(t2.samples.iter()) {
        worst = worst.max((a.c.norm() - b.c.norm()).abs());
        worst = worst.max((a.d.norm() - b.d.norm()).abs());
    }
    Ok(worst)
}
