//! Photonic quantum-heat-engine cycles over two coupled cavities.
//!
//! One stroke evolves the working substance under a modulated-frequency
//! profile; work and heat follow from the occupation change of the hot mode
//! once the frequencies have returned to their initial values:
//!
//! ```text
//! W = (omega_a0 - omega_b0) (n_a(0) - n_a(t_c))
//! Q =  omega_a0             (n_a(0) - n_a(t_c))
//! eta = W/Q = 1 - omega_b0/omega_a0
//! ```
//!
//! The same work is evaluated a second time through the swapped-fraction
//! form `W = (omega_a0 - omega_b0)(n_q - n_p)|d(t_c)|^2` and both routes are
//! required to agree.
//!
//! Work per cycle is maximal when `|d(t_c)| = 1`, i.e. when the modes have
//! fully swapped their excitation numbers. Modulating the detuning at the
//! parametric-resonance frequency `nu = sqrt(4 + (omega_a0 - omega_b0)^2)`
//! drives `|C(t)|` to zero under a slow envelope whose first zero sits near
//! `t_c ~ pi nu / (2 delta)`; the optimizer locates the true zero of the
//! carrier near that estimate.

use rayon::prelude::*;

use crate::mode_dynamics::{self, FrequencyProfile};
use crate::observables::ThermalInit;
use crate::ode;
use crate::{Error, Result};

use std::f64::consts::PI;

/// Parameters of one engine configuration.
#[derive(Debug, Clone, Copy)]
pub struct CycleSpec {
    /// Initial (and final) hot-mode frequency, units of g.
    pub omega_a0: f64,
    /// Initial (and final) cold-mode frequency, units of g.
    pub omega_b0: f64,
    /// Hot reservoir temperature, reduced units.
    pub t_hot: f64,
    /// Cold reservoir temperature, reduced units.
    pub t_cold: f64,
    /// Detuning modulation amplitude (0 for a constant profile).
    pub delta: f64,
    /// Detuning modulation frequency.
    pub nu: f64,
    /// Search horizon for cycle-duration optimization.
    pub t_end: f64,
    /// Integrator tolerance.
    pub tol: f64,
}

impl CycleSpec {
    /// Validate and build a cycle configuration.
    ///
    /// `omega_a0 = omega_b0` is accepted (resonant Rabi swap, zero-work
    /// engine); the work-producing regime needs `omega_a0 > omega_b0`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega_a0: f64,
        omega_b0: f64,
        t_hot: f64,
        t_cold: f64,
        delta: f64,
        nu: f64,
        t_end: f64,
        tol: f64,
    ) -> Result<Self> {
        if !(omega_b0.is_finite() && omega_b0 > 0.0) {
            return Err(Error::invalid(
                "omega_b0",
                format!("{omega_b0} must be positive"),
            ));
        }
        if !(omega_a0.is_finite() && omega_a0 >= omega_b0) {
            return Err(Error::invalid(
                "omega_a0",
                format!("{omega_a0} must be >= omega_b0 = {omega_b0}"),
            ));
        }
        if !(t_cold.is_finite() && t_cold > 0.0) {
            return Err(Error::invalid("T_c", format!("{t_cold} must be positive")));
        }
        if !(t_hot.is_finite() && t_hot > t_cold) {
            return Err(Error::invalid(
                "T_h",
                format!("{t_hot} must exceed T_c = {t_cold}"),
            ));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::invalid("delta", format!("{delta} must be >= 0")));
        }
        if delta > 0.0 && !(nu.is_finite() && nu > 0.0) {
            return Err(Error::invalid(
                "nu",
                format!("{nu} must be positive when delta > 0"),
            ));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::invalid("t_end", format!("{t_end} must be positive")));
        }
        ode::validate_tol(tol)?;
        Ok(CycleSpec {
            omega_a0,
            omega_b0,
            t_hot,
            t_cold,
            delta,
            nu,
            t_end,
            tol,
        })
    }

    /// Hot thermal parameter `q = omega_a0 / T_h`.
    pub fn q(&self) -> f64 {
        self.omega_a0 / self.t_hot
    }

    /// Cold thermal parameter `p = omega_b0 / T_c`.
    pub fn p(&self) -> f64 {
        self.omega_b0 / self.t_cold
    }

    pub fn thermal_init(&self) -> ThermalInit {
        ThermalInit {
            q: self.q(),
            p: self.p(),
        }
    }

    /// The frequency profile realizing this configuration.
    pub fn profile(&self) -> FrequencyProfile {
        if self.delta > 0.0 {
            FrequencyProfile::SinusoidalDetuning {
                omega_a0: self.omega_a0,
                omega_b0: self.omega_b0,
                delta: self.delta,
                nu: self.nu,
            }
        } else {
            FrequencyProfile::Constant {
                omega_a: self.omega_a0,
                omega_b: self.omega_b0,
            }
        }
    }
}

/// Outcome of one engine cycle.
#[derive(Debug, Clone, Copy)]
pub struct EngineReport {
    /// Work done by the engine over the cycle, units of hbar g.
    pub work: f64,
    /// Heat drawn from the hot reservoir.
    pub heat: f64,
    /// `work / heat`; the heat-independent value `1 - omega_b0/omega_a0`
    /// when `zero_heat` is set.
    pub efficiency: f64,
    /// Carnot bound `1 - T_c/T_h` for this configuration.
    pub efficiency_carnot: f64,
    /// Cycle duration.
    pub cycle_duration: f64,
    /// Swapped fraction `|d(t_c)|^2` (photonic), or its excitation-transfer
    /// analogue for other working substances.
    pub d_sq: f64,
    pub n_a_final: f64,
    pub n_b_final: f64,
    /// Set when |Q| fell below 1e-12 and `efficiency` is reported by the
    /// frequency-ratio convention.
    pub zero_heat: bool,
    /// Residual detuning offset `|Delta(t_c) - Delta(0)|` left by the
    /// modulation at the cycle end.
    pub detuning_residual: f64,
}

const ZERO_HEAT_EPS: f64 = 1e-12;

/// Run one photonic cycle of duration `t_c`.
pub fn run_photonic_cycle(spec: &CycleSpec, t_c: f64) -> Result<EngineReport> {
    if !(t_c.is_finite() && t_c >= 0.0) {
        return Err(Error::invalid("t_c", format!("{t_c} must be >= 0")));
    }
    let init = spec.thermal_init();
    let profile = spec.profile();
    // Report-grade scalars are always integrated tightly; spec.tol governs
    // trajectory output, not the cycle bookkeeping.
    let tol = spec.tol.min(1e-10);
    let coeffs = mode_dynamics::mode_coefficients_at(&profile, t_c, tol)?;

    let nq = init.n_hot();
    let np = init.n_cold();
    let n_a_final = coeffs.c.norm_sqr() * nq + coeffs.f.norm_sqr() * np;
    let n_b_final = coeffs.e.norm_sqr() * np + coeffs.d.norm_sqr() * nq;
    let d_sq = coeffs.f.norm_sqr();

    let domega = spec.omega_a0 - spec.omega_b0;
    let work = domega * (nq - n_a_final);
    let work_swapped_form = domega * (nq - np) * d_sq;
    if (work - work_swapped_form).abs() > 1e-8 {
        return Err(Error::numerical(format!(
            "work routes disagree: occupation form {work:.12e} vs swapped-fraction \
             form {work_swapped_form:.12e}"
        )));
    }

    let heat = spec.omega_a0 * (nq - n_a_final);
    let eta_freq = 1.0 - spec.omega_b0 / spec.omega_a0;
    let zero_heat = heat.abs() < ZERO_HEAT_EPS;
    let efficiency = if zero_heat { eta_freq } else { work / heat };

    Ok(EngineReport {
        work,
        heat,
        efficiency,
        efficiency_carnot: 1.0 - spec.t_cold / spec.t_hot,
        cycle_duration: t_c,
        d_sq,
        n_a_final,
        n_b_final,
        zero_heat,
        detuning_residual: (profile.delta_at(t_c) - profile.delta_at(0.0)).abs(),
    })
}

/// Parametric-resonance modulation frequency
/// `nu = sqrt(4 + (omega_a0 - omega_b0)^2)` (g-units).
pub fn resonance_frequency(omega_a0: f64, omega_b0: f64) -> f64 {
    let d = omega_a0 - omega_b0;
    (4.0 + d * d).sqrt()
}

/// Analytic cycle-duration estimate `t_c ~ pi nu / (2 delta)`.
pub fn estimate_cycle_duration(spec: &CycleSpec) -> Result<f64> {
    if spec.delta <= 0.0 {
        return Err(Error::NoResonance);
    }
    Ok(PI * spec.nu / (2.0 * spec.delta))
}

/// Locate the cycle duration maximizing the work: the first zero of
/// `|C(t)|`, found by a coarse scan near the analytic estimate followed by
/// golden-section refinement to 1e-6 time resolution.
///
/// Returns `(t_c, d_sq)` with `d_sq = 1 - |C(t_c)|^2`.
pub fn optimize_cycle_duration(spec: &CycleSpec) -> Result<(f64, f64)> {
    let profile = spec.profile();
    // Analytic estimate of the envelope zero and the carrier scale that the
    // scan has to resolve.
    let (est, carrier) = match &profile {
        FrequencyProfile::SinusoidalDetuning { delta, nu, .. } => {
            if *delta <= 0.0 {
                return Err(Error::NoResonance);
            }
            (PI * nu / (2.0 * delta), *nu)
        }
        FrequencyProfile::Constant { omega_a, omega_b } => {
            // Generalized Rabi: |C|^2 first reaches its minimum at
            // t = pi/(2 Omega).
            let d0 = 0.5 * (omega_a - omega_b);
            let big_omega = (1.0 + d0 * d0).sqrt();
            (PI / (2.0 * big_omega), 2.0 * big_omega)
        }
        FrequencyProfile::Tabulated { .. } => {
            return Err(Error::invalid(
                "shape",
                "cycle optimization requires a constant or sinusoidal-detuning profile",
            ));
        }
    };

    let hi = (1.5 * est).min(spec.t_end);
    let lo = (0.5 * est).min(0.5 * hi);
    if !(hi > lo && hi > 0.0) {
        return Err(Error::invalid(
            "t_end",
            format!("search window [{lo}, {hi}] is degenerate"),
        ));
    }

    // Coarse scan of |C(t)|^2 on a carrier-resolving grid.
    let step = (PI / (8.0 * carrier)).min((hi - lo) / 16.0);
    let n = ((hi - lo) / step).ceil() as usize;
    let times: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let traj = mode_dynamics::evolve_modes_at(&profile, &times, spec.tol)?;
    let (mut best_i, mut best_c_sq) = (0usize, f64::INFINITY);
    for (i, s) in traj.samples.iter().enumerate() {
        let c_sq = s.c.norm_sqr();
        if c_sq < best_c_sq {
            best_c_sq = c_sq;
            best_i = i;
        }
    }
    if best_c_sq >= 0.5 {
        return Err(Error::ResonanceMiss {
            min_c_sq: best_c_sq,
            t_at_min: traj.times[best_i],
            window_lo: lo,
            window_hi: hi,
        });
    }

    // Golden-section refinement inside the bracketing carrier valley,
    // restarting each evaluation from a checkpoint just before the bracket.
    let scan_step = (hi - lo) / n as f64;
    let a0 = (traj.times[best_i] - scan_step).max(0.0);
    let b0 = (traj.times[best_i] + scan_step).min(spec.t_end);
    let y_cp = mode_dynamics::advance_raw(
        &profile,
        0.0,
        mode_dynamics::identity_state(),
        a0,
        spec.tol,
    )?;
    let eval = |t: f64| -> Result<f64> {
        let y = mode_dynamics::advance_raw(&profile, a0, y_cp, t, spec.tol)?;
        Ok(mode_dynamics::c_norm_sqr(&y))
    };

    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a0, b0);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > 1e-6 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = eval(d)?;
        }
    }
    let t_c = 0.5 * (a + b);
    let c_sq = eval(t_c)?.min(best_c_sq);
    Ok((t_c, 1.0 - c_sq))
}

/// One row of a Carnot sweep.
#[derive(Debug, Clone, Copy)]
pub struct CarnotPoint {
    pub omega_b: f64,
    pub work: f64,
    pub efficiency: f64,
    pub t_c: f64,
    pub d_sq: f64,
}

/// Result of sweeping the cold-mode frequency at fixed reservoirs.
#[derive(Debug, Clone)]
pub struct CarnotSweep {
    pub points: Vec<CarnotPoint>,
    /// Zero-work frequency `omega_a0 T_c / T_h` where the sign of W flips.
    pub boundary_omega_b: f64,
    /// Index of the first grid point with positive work, if any.
    pub positive_work_onset: Option<usize>,
}

/// Run an optimized cycle for every `omega_b` in the grid and tabulate
/// `(omega_b, W, eta)`. Grid points are evaluated in parallel; results keep
/// the input order.
pub fn carnot_sweep(
    t_hot: f64,
    t_cold: f64,
    omega_a0: f64,
    omega_b_grid: &[f64],
    delta: f64,
    tol: f64,
) -> Result<CarnotSweep> {
    if omega_b_grid.is_empty() {
        return Err(Error::invalid("omega_b_grid", "empty grid"));
    }
    for &wb in omega_b_grid {
        if !(wb > 0.0 && wb < omega_a0) {
            return Err(Error::invalid(
                "omega_b_grid",
                format!("omega_b = {wb} outside (0, {omega_a0})"),
            ));
        }
    }

    let points: Vec<CarnotPoint> = omega_b_grid
        .par_iter()
        .map(|&omega_b| -> Result<CarnotPoint> {
            let nu = resonance_frequency(omega_a0, omega_b);
            let est = PI * nu / (2.0 * delta);
            let spec = CycleSpec::new(omega_a0, omega_b, t_hot, t_cold, delta, nu, 1.6 * est, tol)?;
            let (t_c, d_sq) = optimize_cycle_duration(&spec)?;
            let report = run_photonic_cycle(&spec, t_c)?;
            Ok(CarnotPoint {
                omega_b,
                work: report.work,
                efficiency: report.efficiency,
                t_c,
                d_sq,
            })
        })
        .collect::<Result<_>>()?;

    Ok(CarnotSweep {
        boundary_omega_b: omega_a0 * t_cold / t_hot,
        positive_work_onset: points.iter().position(|p| p.work > 0.0),
        points,
    })
}

/// Maximum drift of the weighted occupation `q n_a(t) + p n_b(t)` from its
/// initial value over `[0, t_end]`.
///
/// For `q = p` this quantity is conserved (it is proportional to the total
/// excitation number), which realizes the zero-power stationarity argument;
/// for `q != p` with swap dynamics it is not conserved.
pub fn verify_zero_power_conservation(spec: &CycleSpec, t_end: f64) -> Result<f64> {
    if t_end == 0.0 {
        return Ok(0.0);
    }
    let init = spec.thermal_init();
    let traj = mode_dynamics::evolve_modes(&spec.profile(), t_end, spec.tol)?;
    let occ = crate::observables::occupations_from_modes(&traj, init);
    let w0 = init.q * occ.n_a[0] + init.p * occ.n_b[0];
    Ok(occ
        .n_a
        .iter()
        .zip(&occ.n_b)
        .map(|(a, b)| (init.q * a + init.p * b - w0).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::bose;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn reference_spec() -> CycleSpec {
        // omega_a - omega_b = 2, delta = 0.2, nu = 2 sqrt(2).
        CycleSpec::new(3.0, 1.0, 3.0, 1.0, 0.2, 2.0 * SQRT2, 40.0, 1e-10).unwrap()
    }

    #[test]
    fn resonance_frequency_reference_points() {
        assert!((resonance_frequency(1.0, 1.0) - 2.0).abs() < 1e-15);
        assert!((resonance_frequency(3.0, 1.0) - 2.0 * SQRT2).abs() < 1e-15);
        assert!((resonance_frequency(4.0, 1.0) - 13f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn duration_estimate_reference_points() {
        let spec = reference_spec();
        let est = estimate_cycle_duration(&spec).unwrap();
        assert!((est - 22.214).abs() < 1e-3);

        let spec2 = CycleSpec::new(1.0, 1.0, 2.0, 1.0, 0.1, 2.0, 40.0, 1e-10).unwrap();
        assert!((estimate_cycle_duration(&spec2).unwrap() - 31.416).abs() < 1e-3);

        // Doubling delta halves the estimate.
        let spec3 = CycleSpec { delta: 0.4, ..reference_spec() };
        assert!(
            (estimate_cycle_duration(&spec3).unwrap() - 0.5 * est).abs() < 1e-12
        );

        let flat = CycleSpec { delta: 0.0, ..reference_spec() };
        assert!(matches!(estimate_cycle_duration(&flat), Err(Error::NoResonance)));
    }

    #[test]
    fn optimizer_reproduces_reference_resonance_root() {
        let spec = reference_spec();
        let (t_c, d_sq) = optimize_cycle_duration(&spec).unwrap();
        assert!((t_c - 22.26).abs() <= 0.1, "t_c = {t_c}");
        assert!((1.0 - d_sq).sqrt() <= 0.02, "|C(t_c)| = {}", (1.0 - d_sq).sqrt());
    }

    #[test]
    fn optimizer_handles_constant_resonant_profile() {
        let spec = CycleSpec::new(1.0, 1.0, 2.0, 1.0, 0.0, 0.0, 10.0, 1e-10).unwrap();
        let (t_c, d_sq) = optimize_cycle_duration(&spec).unwrap();
        assert!((t_c - std::f64::consts::FRAC_PI_2).abs() < 1e-5);
        assert!((d_sq - 1.0).abs() < 1e-9);
    }

    #[test]
    fn optimizer_misses_without_modulation_drive() {
        let spec = CycleSpec::new(3.0, 1.0, 3.0, 1.0, 1e-6, 2.0 * SQRT2, 40.0, 1e-9).unwrap();
        match optimize_cycle_duration(&spec) {
            Err(Error::ResonanceMiss { min_c_sq, .. }) => assert!(min_c_sq >= 0.5),
            other => panic!("expected resonance miss, got {other:?}"),
        }
    }

    #[test]
    fn zero_duration_cycle_does_nothing() {
        let spec = reference_spec();
        let report = run_photonic_cycle(&spec, 0.0).unwrap();
        assert_eq!(report.work, 0.0);
        assert!(report.zero_heat);
        assert!((report.n_a_final - spec.thermal_init().n_hot()).abs() < 1e-15);
        assert_eq!(report.d_sq, 0.0);
    }

    #[test]
    fn matched_thermal_parameters_produce_no_work() {
        // omega_b0 = omega_a0 T_c/T_h makes q = p, so W = 0 for any t_c.
        let spec = CycleSpec::new(3.0, 1.5, 2.0, 1.0, 0.2, resonance_frequency(3.0, 1.5), 40.0, 1e-10)
            .unwrap();
        assert!((spec.q() - spec.p()).abs() < 1e-15);
        for &t_c in &[0.7, 5.0, 18.3] {
            let report = run_photonic_cycle(&spec, t_c).unwrap();
            assert!(report.work.abs() < 1e-10, "W = {} at t_c = {t_c}", report.work);
        }
    }

    #[test]
    fn work_at_full_swap_matches_p11_arithmetic() {
        // q = 0.5, p = 1.0, omega_a0 - omega_b0 = 0.5; at |d|^2 = 1 the work
        // is 0.5 (1/(e^0.5 - 1) - 1/(e - 1)) = 0.479758...
        let expected_full = 0.5 * (bose(0.5) - bose(1.0));
        assert!((expected_full - 0.479758).abs() < 1e-6);

        let nu = resonance_frequency(1.5, 1.0);
        let est = PI * nu / (2.0 * 0.1);
        let spec = CycleSpec::new(1.5, 1.0, 3.0, 1.0, 0.1, nu, 1.6 * est, 1e-10).unwrap();
        let (t_c, d_sq) = optimize_cycle_duration(&spec).unwrap();
        let report = run_photonic_cycle(&spec, t_c).unwrap();
        assert!(d_sq > 0.99);
        assert!((report.work - expected_full * d_sq).abs() < 1e-8);
    }

    #[test]
    fn efficiency_follows_frequency_ratio() {
        let spec = reference_spec();
        let report = run_photonic_cycle(&spec, 9.0).unwrap();
        assert!(!report.zero_heat);
        assert!((report.efficiency - (1.0 - 1.0 / 3.0)).abs() < 1e-10);
        assert!((report.work - report.heat * report.efficiency).abs() < 1e-12);
    }

    #[test]
    fn detuning_residual_small_at_optimized_cycle_end() {
        let spec = reference_spec();
        let (t_c, _) = optimize_cycle_duration(&spec).unwrap();
        let report = run_photonic_cycle(&spec, t_c).unwrap();
        assert!(report.detuning_residual <= spec.delta);
    }

    #[test]
    fn envelope_zero_near_analytic_estimate() {
        // |C(t)|^2 carrier minima ride the slower of the two rotating-frame
        // branches; over the second half of the cycle they follow the
        // cos^2(delta t / nu) envelope, whose first zero lies within 5% of
        // pi nu/(2 delta).
        let spec = reference_spec();
        let profile = spec.profile();
        let est = estimate_cycle_duration(&spec).unwrap();
        let times = ode::linspace(0.0, 1.05 * est, 8001);
        let traj = mode_dynamics::evolve_modes_at(&profile, &times, 1e-10).unwrap();
        let c_sq: Vec<f64> = traj.samples.iter().map(|s| s.c.norm_sqr()).collect();

        let mut minima: Vec<(f64, f64)> = Vec::new();
        for i in 1..c_sq.len() - 1 {
            if c_sq[i] < c_sq[i - 1] && c_sq[i] <= c_sq[i + 1] {
                minima.push((times[i], c_sq[i]));
            }
        }
        assert!(minima.len() > 10);
        let (t_min, v_min) = minima
            .iter()
            .copied()
            .fold((0.0, f64::INFINITY), |acc, m| if m.1 < acc.1 { m } else { acc });
        assert!(v_min < 1e-3);
        assert!((t_min - est).abs() <= 0.05 * est, "t_min = {t_min}, est = {est}");
        // Late-cycle minima track the slow envelope.
        let (delta, nu) = (spec.delta, spec.nu);
        for &(t, v) in minima.iter().filter(|(t, _)| *t >= 0.6 * est && *t <= est) {
            let envelope = (delta * t / nu).cos().powi(2);
            assert!(
                (v - envelope).abs() < 0.08,
                "minimum {v:.4} at t = {t:.3} vs envelope {envelope:.4}"
            );
        }
    }

    #[test]
    fn carnot_sweep_brackets_sign_change() {
        let (t_hot, t_cold, omega_a0) = (2.0, 1.0, 2.0);
        let boundary = omega_a0 * t_cold / t_hot;
        let grid: Vec<f64> = (0..8).map(|i| 0.75 + 0.1 * i as f64).collect();
        let sweep = carnot_sweep(t_hot, t_cold, omega_a0, &grid, 0.2, 1e-8).unwrap();
        assert_eq!(sweep.points.len(), grid.len());
        assert!((sweep.boundary_omega_b - boundary).abs() < 1e-15);
        let onset = sweep.positive_work_onset.unwrap();
        assert!(grid[onset] > boundary);
        assert!(grid[onset - 1] <= boundary);
        for p in &sweep.points {
            if p.work > 0.0 {
                assert!(p.efficiency <= 1.0 - t_cold / t_hot + 1e-12);
            }
        }
    }

    #[test]
    fn carnot_sweep_exact_quarter_efficiency_point() {
        // T_c/T_h = 0.5 and omega_b = 0.75 omega_a give eta = 0.25 exactly.
        let sweep = carnot_sweep(2.0, 1.0, 2.0, &[1.0, 1.5], 0.2, 1e-9).unwrap();
        let p_boundary = &sweep.points[0];
        assert!(p_boundary.work.abs() < 1e-8);
        let p = &sweep.points[1];
        assert!(p.work > 0.0);
        assert!((p.efficiency - 0.25).abs() < 1e-12);
    }

    #[test]
    fn weighted_occupation_conserved_at_matched_parameters() {
        // q = p = 0.7.
        let spec = CycleSpec::new(1.4, 0.7, 2.0, 1.0, 0.2, resonance_frequency(1.4, 0.7), 30.0, 1e-10)
            .unwrap();
        assert!((spec.q() - 0.7).abs() < 1e-15 && (spec.p() - 0.7).abs() < 1e-15);
        let residual = verify_zero_power_conservation(&spec, 20.0).unwrap();
        assert!(residual <= 1e-8, "residual = {residual}");
        assert_eq!(verify_zero_power_conservation(&spec, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn weighted_occupation_not_conserved_otherwise() {
        // q != p with swap dynamics: the weighted sum moves by O(1).
        let spec = CycleSpec::new(1.0, 1.0, 3.0, 1.0, 0.0, 0.0, 10.0, 1e-10).unwrap();
        let residual = verify_zero_power_conservation(&spec, PI).unwrap();
        assert!(residual > 0.1, "residual = {residual}");
    }

    #[test]
    fn spec_validation_rejects_bad_configurations() {
        assert!(CycleSpec::new(1.0, 2.0, 2.0, 1.0, 0.1, 2.0, 10.0, 1e-9).is_err());
        assert!(CycleSpec::new(2.0, 1.0, 1.0, 1.0, 0.1, 2.0, 10.0, 1e-9).is_err());
        assert!(CycleSpec::new(2.0, 1.0, 1.0, 2.0, 0.1, 2.0, 10.0, 1e-9).is_err());
        assert!(CycleSpec::new(2.0, 1.0, 2.0, 1.0, -0.1, 2.0, 10.0, 1e-9).is_err());
        assert!(CycleSpec::new(2.0, 1.0, 2.0, 1.0, 0.1, 0.0, 10.0, 1e-9).is_err());
        assert!(CycleSpec::new(2.0, 1.0, 2.0, 1.0, 0.1, 2.0, 10.0, 1e-2).is_err());
    }
}
