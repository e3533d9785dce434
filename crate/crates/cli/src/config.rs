//! Scenario configuration: JSON loading and full-config validation.
//!
//! Validation is collected, not short-circuited: a bad config reports every
//! offending parameter in one pass.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use qhe_core::mode_dynamics::FrequencyProfile;
use qhe_core::photonic_engine::{resonance_frequency, CycleSpec};

#[derive(Debug)]
pub enum CliError {
    /// Configuration problems; exit code 2.
    Config(Vec<String>),
    /// Runtime numerical/simulation failure; exit code 3.
    Numerical(String),
    /// One or more verify suites failed; exit code 1.
    VerifyFailed(usize),
}

impl From<qhe_core::Error> for CliError {
    fn from(e: qhe_core::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("i/o failure: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Rabi,
    ThreeMode,
    PhotonicCycle,
    PhotonicOptimize,
    CarnotSweep,
    TlsCycle,
    CounterRotating,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Rabi => "rabi",
            ScenarioKind::ThreeMode => "three-mode",
            ScenarioKind::PhotonicCycle => "photonic-cycle",
            ScenarioKind::PhotonicOptimize => "photonic-optimize",
            ScenarioKind::CarnotSweep => "carnot-sweep",
            ScenarioKind::TlsCycle => "tls-cycle",
            ScenarioKind::CounterRotating => "counter-rotating",
        }
    }
}

/// Integrator selection from the config file.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum IntegratorConfig {
    Adaptive { tol: f64 },
    FixedStep { dt: f64 },
}

/// The raw scenario document; unknown top-level keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub integrator: Option<IntegratorConfig>,
}

/// Load and parse the raw config document.
pub fn load_raw(path: &Path) -> Result<(RawConfig, Value), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    let raw: RawConfig = serde_json::from_str(&text).map_err(|e| {
        CliError::Config(vec![format!(
            "parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        )])
    })?;
    let echo: Value = serde_json::from_str(&text).expect("reparse of valid JSON");
    Ok((raw, echo))
}

/// Validated, scenario-specific execution plan.
#[derive(Debug, Clone)]
pub enum ScenarioPlan {
    Rabi {
        omega: f64,
        q: f64,
        p: f64,
        t_end: f64,
        samples: usize,
    },
    ThreeMode {
        q: f64,
        p: f64,
        t_end: f64,
        samples: usize,
    },
    PhotonicCycle {
        spec: CycleSpec,
        t_cycle: f64,
        samples: usize,
    },
    PhotonicOptimize {
        spec: CycleSpec,
        samples: usize,
    },
    CarnotSweep {
        t_hot: f64,
        t_cold: f64,
        omega_a0: f64,
        omega_b_grid: Vec<f64>,
        delta: f64,
    },
    TlsCycle {
        spec: CycleSpec,
        t_cycle: f64,
        samples: usize,
    },
    CounterRotating {
        profile: FrequencyProfile,
        n_a0: f64,
        n_b0: f64,
        t_cycle: f64,
        samples: usize,
    },
}

/// Parameter reader that records every violation instead of stopping at
/// the first.
struct Params<'a> {
    map: &'a BTreeMap<String, Value>,
    errors: Vec<String>,
    used: BTreeSet<&'a str>,
}

impl<'a> Params<'a> {
    fn new(map: &'a BTreeMap<String, Value>) -> Self {
        Params {
            map,
            errors: Vec::new(),
            used: BTreeSet::new(),
        }
    }

    fn raw_f64(&mut self, key: &'static str) -> Option<f64> {
        if let Some((k, v)) = self.map.get_key_value(key) {
            self.used.insert(k.as_str());
            match v.as_f64() {
                Some(x) if x.is_finite() => Some(x),
                _ => {
                    self.errors.push(format!("parameter {key}: expected a finite number, got {v}"));
                    None
                }
            }
        } else {
            None
        }
    }

    fn required(&mut self, key: &'static str) -> Option<f64> {
        let v = self.raw_f64(key);
        if v.is_none() && !self.map.contains_key(key) {
            self.errors.push(format!("missing required parameter {key}"));
        }
        v
    }

    fn optional(&mut self, key: &'static str, default: f64) -> f64 {
        self.raw_f64(key).unwrap_or(default)
    }

    fn positive(&mut self, key: &'static str, v: Option<f64>) -> Option<f64> {
        match v {
            Some(x) if x > 0.0 => Some(x),
            Some(x) => {
                self.errors.push(format!("parameter {key}: {x} must be positive"));
                None
            }
            None => None,
        }
    }

    fn usize_opt(&mut self, key: &'static str, default: usize) -> usize {
        if let Some((k, v)) = self.map.get_key_value(key) {
            self.used.insert(k.as_str());
            match v.as_u64() {
                Some(n) if (2..=1_000_000).contains(&(n as usize)) => n as usize,
                _ => {
                    self.errors
                        .push(format!("parameter {key}: expected an integer in [2, 1e6], got {v}"));
                    default
                }
            }
        } else {
            default
        }
    }

    fn finish(mut self) -> Vec<String> {
        for key in self.map.keys() {
            if !self.used.contains(key.as_str()) {
                self.errors.push(format!("unknown parameter {key}"));
            }
        }
        self.errors
    }
}

/// Default adaptive tolerance for scenario runs.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Build the validated plan for `kind`, or the full list of violations.
pub fn build_plan(kind: ScenarioKind, raw: &RawConfig, tol: f64) -> Result<ScenarioPlan, CliError> {
    if raw.scenario != kind.name() {
        return Err(CliError::Config(vec![format!(
            "config declares scenario `{}` but the `{}` command was invoked",
            raw.scenario,
            kind.name()
        )]));
    }
    let mut p = Params::new(&raw.parameters);
    let plan = match kind {
        ScenarioKind::Rabi => {
            let omega = p.required("omega");
            let omega = p.positive("omega", omega);
            let t_end = p.required("t_end");
            let t_end = p.positive("t_end", t_end);
            let q_raw = p.optional("q", 0.5);
            let q = p.positive("q", Some(q_raw));
            let p_raw = p.optional("p", 1.0);
            let pp = p.positive("p", Some(p_raw));
            let samples = p.usize_opt("samples", 1001);
            let errors = p.finish();
            if !errors.is_empty() {
                return Err(CliError::Config(errors));
            }
            ScenarioPlan::Rabi {
                omega: omega.unwrap(),
                q: q.unwrap(),
                p: pp.unwrap(),
                t_end: t_end.unwrap(),
                samples,
            }
        }
        ScenarioKind::ThreeMode => {
            let q = p.required("q");
            let q = p.positive("q", q);
            let pp = p.required("p");
            let pp = p.positive("p", pp);
            let t_end = p.required("t_end");
            let t_end = p.positive("t_end", t_end);
            let samples = p.usize_opt("samples", 1001);
            let errors = p.finish();
            if !errors.is_empty() {
                return Err(CliError::Config(errors));
            }
            ScenarioPlan::ThreeMode {
                q: q.unwrap(),
                p: pp.unwrap(),
                t_end: t_end.unwrap(),
                samples,
            }
        }
        ScenarioKind::PhotonicCycle | ScenarioKind::TlsCycle => {
            let (spec, t_cycle, samples, errors) = cycle_params(p, tol, true);
            if !errors.is_empty() {
                return Err(CliError::Config(errors));
            }
            let spec = spec.unwrap();
            let t_cycle = t_cycle.unwrap();
            if kind == ScenarioKind::PhotonicCycle {
                ScenarioPlan::PhotonicCycle { spec, t_cycle, samples }
            } else {
                ScenarioPlan::TlsCycle { spec, t_cycle, samples }
            }
        }
        ScenarioKind::PhotonicOptimize => {
            let (spec, _, samples, errors) = cycle_params(p, tol, false);
            if !errors.is_empty() {
                return Err(CliError::Config(errors));
            }
            ScenarioPlan::PhotonicOptimize {
                spec: spec.unwrap(),
                samples,
            }
        }
        ScenarioKind::CarnotSweep => {
            let t_hot = p.required("T_h");
            let t_cold = p.required("T_c");
            let omega_a0 = p.required("omega_a0");
            let omega_a0 = p.positive("omega_a0", omega_a0);
            let wb_min = p.required("omega_b_min");
            let wb_min = p.positive("omega_b_min", wb_min);
            let wb_max = p.required("omega_b_max");
            let wb_max = p.positive("omega_b_max", wb_max);
            let count = p.usize_opt("omega_b_count", 16);
            let delta = p.optional("delta", 0.2);
            let mut errors = p.finish();
            if let (Some(th), Some(tc)) = (t_hot, t_cold) {
                if !(th > tc && tc > 0.0) {
                    errors.push(format!("parameter T_h: need T_h > T_c > 0, got {th} <= {tc}"));
                }
            }
            if let (Some(lo), Some(hi), Some(wa)) = (wb_min, wb_max, omega_a0) {
                if !(lo < hi && hi < wa) {
                    errors.push(format!(
                        "parameter omega_b_min/omega_b_max: need 0 < {lo} < {hi} < omega_a0 = {wa}"
                    ));
                }
            }
            if !delta.is_finite() || delta <= 0.0 {
                errors.push(format!("parameter delta: {delta} must be positive"));
            }
            if !errors.is_empty() {
                return Err(CliError::Config(errors));
            }
            let (lo, hi) = (wb_min.unwrap(), wb_max.unwrap());
            let grid: Vec<f64> = (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1).max(1) as f64)
                .collect();
            ScenarioPlan::CarnotSweep {
                t_hot: t_hot.unwrap(),
                t_cold: t_cold.unwrap(),
                omega_a0: omega_a0.unwrap(),
                omega_b_grid: grid,
                delta,
            }
        }
        ScenarioKind::CounterRotating => {
            let omega_a0 = p.required("omega_a0");
            let omega_a0 = p.positive("omega_a0", omega_a0);
            let omega_b0 = p.required("omega_b0");
            let omega_b0 = p.positive("omega_b0", omega_b0);
            let delta = p.optional("delta", 0.0);
            let nu = p.optional("nu", 0.0);
            let n_a0 = p.optional("n_a0", 0.0);
            let n_b0 = p.optional("n_b0", 0.0);
            let t_cycle = p.required("t_cycle");
            let t_cycle = p.positive("t_cycle", t_cycle);
            let samples = p.usize_opt("samples", 1001);
            let mut errors = p.finish();
            if n_a0 < 0.0 {
                errors.push(format!("parameter n_a0: {n_a0} must be >= 0"));
            }
            if n_b0 < 0.0 {
                errors.push(format!("parameter n_b0: {n_b0} must be >= 0"));
            }
            let profile = if let (Some(wa), Some(wb)) = (omega_a0, omega_b0) {
                let built = if delta > 0.0 {
                    FrequencyProfile::sinusoidal(wa, wb, delta, nu)
                } else {
                    FrequencyProfile::constant(wa, wb)
                };
                match built {
                    Ok(pr) => Some(pr),
                    Err(e) => {
                        errors.push(e.to_string());
                        None
                    }
                }
            } else {
                None
            };
            if !errors.is_empty() {
                return Err(CliError::Config(errors));
            }
            ScenarioPlan::CounterRotating {
                profile: profile.unwrap(),
                n_a0,
                n_b0,
                t_cycle: t_cycle.unwrap(),
                samples,
            }
        }
    };
    Ok(plan)
}

/// Shared extraction for the cycle-based scenarios. When `need_t_cycle` is
/// unset (the optimizer), `t_cycle` is not read.
fn cycle_params(
    mut p: Params<'_>,
    tol: f64,
    need_t_cycle: bool,
) -> (Option<CycleSpec>, Option<f64>, usize, Vec<String>) {
    let omega_a0 = p.required("omega_a0");
    let omega_b0 = p.required("omega_b0");
    let t_hot = p.required("T_h");
    let t_cold = p.required("T_c");
    let delta = p.optional("delta", 0.0);
    let nu_given = p.raw_f64("nu");
    let t_cycle = if need_t_cycle {
        let t = p.required("t_cycle");
        p.positive("t_cycle", t)
    } else {
        None
    };
    let t_end = p.raw_f64("t_end");
    let samples = p.usize_opt("samples", 1001);
    let mut errors = p.finish();

    let spec = match (omega_a0, omega_b0, t_hot, t_cold) {
        (Some(wa), Some(wb), Some(th), Some(tc)) => {
            // Resonant modulation by default when a drive is requested.
            let nu = nu_given.unwrap_or_else(|| resonance_frequency(wa, wb));
            let t_end = t_end.unwrap_or_else(|| {
                if delta > 0.0 {
                    1.6 * std::f64::consts::PI * nu / (2.0 * delta)
                } else {
                    t_cycle.unwrap_or(10.0).max(10.0)
                }
            });
            match CycleSpec::new(wa, wb, th, tc, delta, nu, t_end, tol) {
                Ok(spec) => Some(spec),
                Err(e) => {
                    errors.push(e.to_string());
                    None
                }
            }
        }
        _ => None,
    };
    (spec, t_cycle, samples, errors)
}
