//! Scenario execution: trajectory/report CSV emission plus the manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qhe_core::counter_rotating;
use qhe_core::mode_dynamics::{self, FrequencyProfile};
use qhe_core::observables::{self, ThermalInit};
use qhe_core::ode::{linspace, Stepper};
use qhe_core::photonic_engine::{self, EngineReport};
use qhe_core::three_mode;
use qhe_core::tls_engine;

use crate::config::{self, CliError, IntegratorConfig, ScenarioKind, ScenarioPlan};
use crate::csvout::write_csv;
use crate::manifest::{self, ManifestCheck, RunManifest};

pub struct RunRequest {
    pub config_path: PathBuf,
    pub out: Option<String>,
    pub fixed_step: Option<f64>,
    pub seed: Option<u64>,
}

const REPORT_HEADER: [&str; 10] = [
    "work",
    "heat",
    "efficiency",
    "efficiency_carnot",
    "cycle_duration",
    "d_sq",
    "n_a_final",
    "n_b_final",
    "zero_heat",
    "detuning_residual",
];

fn report_row(r: &EngineReport) -> Vec<f64> {
    vec![
        r.work,
        r.heat,
        r.efficiency,
        r.efficiency_carnot,
        r.cycle_duration,
        r.d_sq,
        r.n_a_final,
        r.n_b_final,
        if r.zero_heat { 1.0 } else { 0.0 },
        r.detuning_residual,
    ]
}

struct Artifacts {
    prefix: String,
    outputs: Vec<String>,
    checks: Vec<ManifestCheck>,
}

impl Artifacts {
    fn new(prefix: String) -> Result<Self, CliError> {
        if let Some(parent) = Path::new(&prefix).parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        Ok(Artifacts {
            prefix,
            outputs: Vec::new(),
            checks: Vec::new(),
        })
    }

    fn path(&self, suffix: &str) -> PathBuf {
        PathBuf::from(format!("{}_{suffix}", self.prefix))
    }

    fn csv(&mut self, suffix: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let path = self.path(suffix);
        write_csv(&path, header, rows)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(ManifestCheck::new(name, passed, detail));
    }

    fn gnuplot(&mut self, title: &str, csv_suffix: &str, columns: &[(usize, &str)]) -> Result<(), CliError> {
        let path = self.path("plot.gp");
        let csv = self.path(csv_suffix);
        let mut script = String::new();
        script.push_str("set datafile separator ','\n");
        script.push_str(&format!("set title '{title}'\nset key autotitle columnhead\n"));
        let plots: Vec<String> = columns
            .iter()
            .map(|(col, name)| format!("'{}' using 1:{} with lines title '{name}'", csv.display(), col))
            .collect();
        script.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
        std::fs::write(&path, script)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }
}

pub fn run(kind: ScenarioKind, req: RunRequest) -> Result<(), CliError> {
    let start = Instant::now();
    let (raw, echo) = config::load_raw(&req.config_path)?;

    let stepper = match (req.fixed_step, raw.integrator) {
        (Some(dt), _) => {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(CliError::Config(vec![format!(
                    "--fixed-step {dt} must be a positive number"
                )]));
            }
            Stepper::Fixed { dt }
        }
        (None, Some(IntegratorConfig::FixedStep { dt })) => {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(CliError::Config(vec![format!(
                    "integrator.fixed_step.dt = {dt} must be a positive number"
                )]));
            }
            Stepper::Fixed { dt }
        }
        (None, Some(IntegratorConfig::Adaptive { tol })) => Stepper::Adaptive { tol },
        (None, None) => Stepper::Adaptive {
            tol: config::DEFAULT_TOL,
        },
    };
    let spec_tol = match stepper {
        Stepper::Adaptive { tol } => tol,
        Stepper::Fixed { .. } => config::DEFAULT_TOL,
    };
    // Surface an out-of-range tolerance as a configuration problem before
    // any computation runs.
    if let Stepper::Adaptive { tol } = stepper {
        if let Err(e) = qhe_core::ode::validate_tol(tol) {
            return Err(CliError::Config(vec![e.to_string()]));
        }
    }

    let plan = config::build_plan(kind, &raw, spec_tol)?;
    let prefix = req
        .out
        .clone()
        .or_else(|| raw.output.clone())
        .unwrap_or_else(|| kind.name().replace('-', "_"));
    let mut art = Artifacts::new(prefix)?;

    match plan {
        ScenarioPlan::Rabi {
            omega,
            q,
            p,
            t_end,
            samples,
        } => run_rabi(&mut art, &stepper, omega, q, p, t_end, samples)?,
        ScenarioPlan::ThreeMode { q, p, t_end, samples } => {
            run_three_mode(&mut art, &stepper, q, p, t_end, samples)?
        }
        ScenarioPlan::PhotonicCycle { spec, t_cycle, samples } => {
            run_photonic_cycle(&mut art, &stepper, &spec, t_cycle, samples)?
        }
        ScenarioPlan::PhotonicOptimize { spec, samples } => {
            run_photonic_optimize(&mut art, &stepper, &spec, samples)?
        }
        ScenarioPlan::CarnotSweep {
            t_hot,
            t_cold,
            omega_a0,
            omega_b_grid,
            delta,
        } => run_carnot_sweep(&mut art, spec_tol, t_hot, t_cold, omega_a0, &omega_b_grid, delta)?,
        ScenarioPlan::TlsCycle { spec, t_cycle, samples } => {
            run_tls_cycle(&mut art, &stepper, &spec, t_cycle, samples)?
        }
        ScenarioPlan::CounterRotating {
            profile,
            n_a0,
            n_b0,
            t_cycle,
            samples,
        } => run_counter_rotating(&mut art, &stepper, &profile, n_a0, n_b0, t_cycle, samples)?,
    }

    let failed: Vec<String> = art
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();

    let manifest = RunManifest {
        scenario: kind.name().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        seed: req.seed.or(raw.seed),
        integrator: match stepper {
            Stepper::Adaptive { tol } => format!("adaptive tol={tol:e}"),
            Stepper::Fixed { dt } => format!("fixed-step dt={dt:e}"),
        },
        outputs: art.outputs.clone(),
        checks: art.checks.clone(),
        config: echo,
    };
    let manifest_path = art.path("manifest.json");
    manifest::write(&manifest_path, &manifest)?;
    println!("manifest: {}", manifest_path.display());
    for c in &manifest.checks {
        println!(
            "check [{}] {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }

    if !failed.is_empty() {
        return Err(CliError::Numerical(format!(
            "{} check(s) failed: {}",
            failed.len(),
            failed.join("; ")
        )));
    }
    Ok(())
}

fn stepper_tol(stepper: &Stepper) -> f64 {
    match *stepper {
        Stepper::Adaptive { tol } => tol,
        Stepper::Fixed { dt } => dt.powi(4),
    }
}

fn run_rabi(
    art: &mut Artifacts,
    stepper: &Stepper,
    omega: f64,
    q: f64,
    p: f64,
    t_end: f64,
    samples: usize,
) -> Result<(), CliError> {
    let profile = FrequencyProfile::constant(omega, omega)?;
    let init = ThermalInit::new(q, p)?;
    let times = linspace(0.0, t_end, samples);
    let traj = mode_dynamics::evolve_modes_on(&profile, &times, stepper)?;
    let occ = observables::occupations_from_modes(&traj, init);

    let mut rows = Vec::with_capacity(times.len());
    for (i, s) in traj.samples.iter().enumerate() {
        let [r1, r2, r3] = s.unitarity_residuals();
        let t_a = observables::effective_temperature(omega * occ.n_a[i], omega)?;
        let t_b = observables::effective_temperature(omega * occ.n_b[i], omega)?;
        rows.push(vec![
            traj.times[i],
            s.c.norm(),
            s.d.norm(),
            occ.n_a[i],
            occ.n_b[i],
            t_a,
            t_b,
            r1,
            r2,
            r3,
        ]);
    }
    art.csv(
        "trajectory.csv",
        &["t", "abs_C", "abs_D", "n_a", "n_b", "T_a_eff", "T_b_eff", "r1", "r2", "r3"],
        &rows,
    )?;
    art.gnuplot(
        "thermal Rabi exchange",
        "trajectory.csv",
        &[(4, "n_a"), (5, "n_b")],
    )?;

    let tol = stepper_tol(stepper);
    let max_res = traj.max_unitarity_residual();
    art.check(
        "unitarity",
        max_res <= (10.0 * tol).max(1e-10),
        format!("max residual {max_res:.3e}"),
    );
    let drift = occ.max_sum_drift();
    art.check(
        "occupation_conservation",
        drift <= (10.0 * tol).max(1e-10),
        format!("max drift {drift:.3e}"),
    );
    // When the grid lands on t = pi/2 the thermal states must have swapped.
    let half_pi = std::f64::consts::FRAC_PI_2;
    if let Some(i) = times.iter().position(|&t| (t - half_pi).abs() < 1e-9) {
        let err = (occ.n_a[i] - init.n_cold()).abs();
        art.check("swap_at_half_pi", err <= 1e-8, format!("|n_a - n_b(0)| = {err:.3e}"));
    }
    Ok(())
}

fn run_three_mode(
    art: &mut Artifacts,
    stepper: &Stepper,
    q: f64,
    p: f64,
    t_end: f64,
    samples: usize,
) -> Result<(), CliError> {
    let times = linspace(0.0, t_end, samples);
    let traj = three_mode::simulate_three_mode_on(q, p, &times, stepper)?;
    let rows: Vec<Vec<f64>> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| vec![*t, s.n_a, s.n_b1, s.n_b2, s.coherence_bc.re, s.coherence_bc.im])
        .collect();
    art.csv(
        "trajectory.csv",
        &["t", "n_a", "n_B1", "n_B2", "coherence_re", "coherence_im"],
        &rows,
    )?;
    art.gnuplot(
        "noise-induced coherence",
        "trajectory.csv",
        &[(2, "n_a"), (3, "n_B1"), (5, "coherence_re")],
    )?;

    let tol = stepper_tol(stepper);
    let n_b2_0 = traj.states[0].n_b2;
    let b2_drift = traj
        .states
        .iter()
        .map(|s| (s.n_b2 - n_b2_0).abs())
        .fold(0.0f64, f64::max);
    art.check(
        "antisymmetric_mode_constant",
        b2_drift <= (10.0 * tol).max(1e-9),
        format!("max drift {b2_drift:.3e}"),
    );
    let s0 = traj.states[0].n_a + traj.states[0].n_b1;
    let pair_drift = traj
        .states
        .iter()
        .map(|s| (s.n_a + s.n_b1 - s0).abs())
        .fold(0.0f64, f64::max);
    art.check(
        "coupled_pair_conservation",
        pair_drift <= (10.0 * tol).max(1e-9),
        format!("max drift {pair_drift:.3e}"),
    );
    Ok(())
}

fn mode_trajectory_csv(
    art: &mut Artifacts,
    stepper: &Stepper,
    spec: &photonic_engine::CycleSpec,
    t_cycle: f64,
    samples: usize,
) -> Result<(), CliError> {
    let profile = spec.profile();
    let times = linspace(0.0, t_cycle, samples);
    let traj = mode_dynamics::evolve_modes_on(&profile, &times, stepper)?;
    let occ = observables::occupations_from_modes(&traj, spec.thermal_init());
    let mut rows = Vec::with_capacity(times.len());
    for (i, s) in traj.samples.iter().enumerate() {
        let [r1, r2, r3] = s.unitarity_residuals();
        rows.push(vec![
            traj.times[i],
            s.c.norm(),
            s.d.norm(),
            occ.n_a[i],
            occ.n_b[i],
            r1,
            r2,
            r3,
        ]);
    }
    art.csv(
        "trajectory.csv",
        &["t", "abs_C", "abs_D", "n_a", "n_b", "r1", "r2", "r3"],
        &rows,
    )?;

    let tol = stepper_tol(stepper);
    let drift = occ.max_sum_drift();
    art.check(
        "occupation_conservation",
        drift <= (10.0 * tol).max(1e-10),
        format!("max drift {drift:.3e}"),
    );
    let max_res = traj.max_unitarity_residual();
    art.check(
        "unitarity",
        max_res <= (10.0 * tol).max(1e-10),
        format!("max residual {max_res:.3e}"),
    );
    Ok(())
}

fn efficiency_check(art: &mut Artifacts, spec: &photonic_engine::CycleSpec, report: &EngineReport) {
    if !report.zero_heat {
        let err = (report.efficiency - (1.0 - spec.omega_b0 / spec.omega_a0)).abs();
        art.check(
            "efficiency_frequency_ratio",
            err <= 1e-10,
            format!("|eta - (1 - wb/wa)| = {err:.3e}"),
        );
    }
    art.check(
        "carnot_ceiling",
        report.work <= 0.0 || report.efficiency <= report.efficiency_carnot + 1e-12,
        format!(
            "eta = {:.6} vs ceiling {:.6}",
            report.efficiency, report.efficiency_carnot
        ),
    );
}

fn run_photonic_cycle(
    art: &mut Artifacts,
    stepper: &Stepper,
    spec: &photonic_engine::CycleSpec,
    t_cycle: f64,
    samples: usize,
) -> Result<(), CliError> {
    let report = photonic_engine::run_photonic_cycle(spec, t_cycle)?;
    mode_trajectory_csv(art, stepper, spec, t_cycle, samples)?;
    art.csv("report.csv", &REPORT_HEADER, &[report_row(&report)])?;
    art.gnuplot("photonic engine stroke", "trajectory.csv", &[(2, "abs_C"), (4, "n_a"), (5, "n_b")])?;
    efficiency_check(art, spec, &report);
    Ok(())
}

fn run_photonic_optimize(
    art: &mut Artifacts,
    stepper: &Stepper,
    spec: &photonic_engine::CycleSpec,
    samples: usize,
) -> Result<(), CliError> {
    let (t_c, d_sq) = photonic_engine::optimize_cycle_duration(spec)?;
    let report = photonic_engine::run_photonic_cycle(spec, t_c)?;
    mode_trajectory_csv(art, stepper, spec, t_c * 1.02, samples)?;
    art.csv("report.csv", &REPORT_HEADER, &[report_row(&report)])?;
    art.gnuplot("cycle optimization", "trajectory.csv", &[(2, "abs_C")])?;

    art.check(
        "swap_fraction",
        d_sq > 0.5,
        format!("d_sq = {d_sq:.6} at t_c = {t_c:.6}"),
    );
    art.check(
        "detuning_residual_within_delta",
        report.detuning_residual <= spec.delta.max(1e-12),
        format!("residual {:.3e} vs delta {:.3e}", report.detuning_residual, spec.delta),
    );
    if spec.delta > 0.0 {
        let resonant = (spec.nu
            - photonic_engine::resonance_frequency(spec.omega_a0, spec.omega_b0))
        .abs()
            < 1e-6;
        if resonant {
            let est = photonic_engine::estimate_cycle_duration(spec)?;
            art.check(
                "envelope_zero_near_estimate",
                (t_c - est).abs() <= 0.05 * est,
                format!("t_c = {t_c:.4} vs estimate {est:.4}"),
            );
        }
    }
    efficiency_check(art, spec, &report);
    Ok(())
}

fn run_carnot_sweep(
    art: &mut Artifacts,
    tol: f64,
    t_hot: f64,
    t_cold: f64,
    omega_a0: f64,
    omega_b_grid: &[f64],
    delta: f64,
) -> Result<(), CliError> {
    let sweep = photonic_engine::carnot_sweep(t_hot, t_cold, omega_a0, omega_b_grid, delta, tol)?;
    let rows: Vec<Vec<f64>> = sweep
        .points
        .iter()
        .map(|p| vec![p.omega_b, p.work, p.efficiency, p.t_c, p.d_sq])
        .collect();
    art.csv("sweep.csv", &["omega_b", "W", "eta", "t_c", "d_sq"], &rows)?;
    art.gnuplot("Carnot sweep", "sweep.csv", &[(2, "W"), (3, "eta")])?;

    let ceiling = 1.0 - t_cold / t_hot;
    let ceiling_ok = sweep
        .points
        .iter()
        .all(|p| p.work <= 0.0 || p.efficiency <= ceiling + 1e-12);
    art.check(
        "carnot_ceiling",
        ceiling_ok,
        format!("ceiling 1 - T_c/T_h = {ceiling:.6}"),
    );
    let boundary_ok = sweep.points.iter().all(|p| {
        let step = if omega_b_grid.len() > 1 {
            omega_b_grid[1] - omega_b_grid[0]
        } else {
            f64::INFINITY
        };
        if p.work > 0.0 {
            p.omega_b >= sweep.boundary_omega_b - 1e-12
        } else {
            p.omega_b <= sweep.boundary_omega_b + step
        }
    });
    art.check(
        "work_sign_boundary",
        boundary_ok,
        format!(
            "sign flips at omega_b = {:.6} (onset index {:?})",
            sweep.boundary_omega_b, sweep.positive_work_onset
        ),
    );
    Ok(())
}

fn run_tls_cycle(
    art: &mut Artifacts,
    stepper: &Stepper,
    spec: &photonic_engine::CycleSpec,
    t_cycle: f64,
    samples: usize,
) -> Result<(), CliError> {
    let report = tls_engine::run_tls_cycle(spec, t_cycle)?;
    let profile = spec.profile();
    let times = linspace(0.0, t_cycle, samples);
    let traj = tls_engine::evolve_two_qubits_on(&profile, spec.t_hot, spec.t_cold, &times, stepper)?;
    let rows: Vec<Vec<f64>> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| vec![*t, s.n_a, s.n_b, s.purity(), s.min_eigenvalue()])
        .collect();
    art.csv(
        "trajectory.csv",
        &["t", "n_a", "n_b", "purity", "min_eigenvalue"],
        &rows,
    )?;
    art.csv("report.csv", &REPORT_HEADER, &[report_row(&report)])?;
    art.gnuplot("two-qubit engine stroke", "trajectory.csv", &[(2, "n_a"), (3, "n_b")])?;

    let tol = stepper_tol(stepper);
    let s0 = traj.states[0].n_a + traj.states[0].n_b;
    let drift = traj
        .states
        .iter()
        .map(|s| (s.n_a + s.n_b - s0).abs())
        .fold(0.0f64, f64::max);
    art.check(
        "excitation_conservation",
        drift <= (10.0 * tol).max(1e-10),
        format!("max drift {drift:.3e}"),
    );
    let (n_a0, n_b0) = (traj.states[0].n_a, traj.states[0].n_b);
    let (lo, hi) = (n_b0.min(n_a0), n_b0.max(n_a0));
    let bracket = traj
        .states
        .iter()
        .map(|s| (lo - s.n_a).max(s.n_a - hi).max(0.0))
        .fold(0.0f64, f64::max);
    art.check(
        "excitation_bracket",
        bracket <= 1e-8,
        format!("worst excursion {bracket:.3e}"),
    );

    // Identity residual on a dedicated dense grid at report-grade accuracy.
    let dense = linspace(0.0, t_cycle, 10_001);
    let dense_traj =
        tls_engine::evolve_two_qubits_at(&profile, spec.t_hot, spec.t_cold, &dense, 1e-10)?;
    let residuals = tls_engine::verify_occupation_identity(&dense_traj)?;
    let identity_residual = residuals.iter().fold(0.0f64, |a, &b| a.max(b));
    art.check("occupation_identity", identity_residual <= 1e-5, format!("max residual {identity_residual:.3e}"));
    Ok(())
}

fn run_counter_rotating(
    art: &mut Artifacts,
    stepper: &Stepper,
    profile: &FrequencyProfile,
    n_a0: f64,
    n_b0: f64,
    t_cycle: f64,
    samples: usize,
) -> Result<(), CliError> {
    let tol = stepper_tol(stepper);
    let report = counter_rotating::run_cr_cycle(profile, t_cycle, n_a0, n_b0, tol)?;
    let times = linspace(0.0, t_cycle, samples);
    let traj = counter_rotating::evolve_cr_moments_on(profile, n_a0, n_b0, &times, stepper)?;
    let rows: Vec<Vec<f64>> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| vec![*t, s.n_a, s.n_b, s.m.re, s.m.im])
        .collect();
    art.csv("trajectory.csv", &["t", "n_a", "n_b", "m_re", "m_im"], &rows)?;
    art.csv("report.csv", &REPORT_HEADER, &[report_row(&report)])?;
    art.gnuplot("counter-rotating stroke", "trajectory.csv", &[(2, "n_a"), (3, "n_b")])?;

    art.check(
        "no_positive_work",
        report.work <= 1e-9,
        format!("W = {:.6e}", report.work),
    );
    let diff = traj.max_difference_drift();
    art.check(
        "difference_conservation",
        diff <= 1e-9,
        format!("max drift {diff:.3e}"),
    );
    let floor = traj.sum_floor_violation();
    art.check(
        "sum_floor",
        floor <= 1e-9,
        format!("worst violation {floor:.3e}"),
    );

    // Excitation-sum identity, relative to the (possibly growing) scale.
    let dense = linspace(0.0, t_cycle, 10_001);
    let dense_traj = counter_rotating::evolve_cr_moments_at(profile, n_a0, n_b0, &dense, 1e-10)?;
    let residual = counter_rotating::verify_excitation_sum_identity(&dense_traj)?;
    let last = dense_traj.states.last().unwrap();
    let scale = 4.0 * (last.n_a + last.n_b + 1.0).powi(2);
    art.check(
        "excitation_sum_identity",
        residual <= 1e-5 * scale.max(1.0),
        format!("max residual {residual:.3e} (scale {scale:.3e})"),
    );
    Ok(())
}
