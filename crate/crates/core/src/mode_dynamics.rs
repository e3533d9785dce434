//! Mode-coefficient dynamics of two coupled bosonic modes.
//!
//! The evolved annihilation operators are expanded over the initial ones,
//! `A(t) = C(t) a + D(t) b` and `B(t) = E(t) b + F(t) a`, and the complex
//! amplitudes obey (coupling g = 1, time-reversed sign convention)
//!
//! ```text
//! i dC/dt = -omega_a(t) C - D        i dD/dt = -omega_b(t) D - C
//! i dE/dt = -omega_b(t) E - F        i dF/dt = -omega_a(t) F - E
//! ```
//!
//! with `C(0) = E(0) = 1`, `D(0) = F(0) = 0`. Unitarity of the underlying
//! evolution fixes three integrals of motion, `|C|^2 + |D|^2 = 1`,
//! `|E|^2 + |F|^2 = 1` and `C F* + D E* = 0`, which every trajectory is
//! checked against.

use num_complex::Complex64;

use crate::ode::{self, Sampling, Stepper};
use crate::{Error, Result};

/// Complex amplitudes of the time-evolved mode operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    pub f: Complex64,
}

impl ModeCoefficients {
    /// The t = 0 identity transform.
    pub const IDENTITY: ModeCoefficients = ModeCoefficients {
        c: Complex64::new(1.0, 0.0),
        d: Complex64::new(0.0, 0.0),
        e: Complex64::new(1.0, 0.0),
        f: Complex64::new(0.0, 0.0),
    };

    /// Residuals of the three unitarity integrals of motion:
    /// `| |C|^2+|D|^2 - 1 |`, `| |E|^2+|F|^2 - 1 |` and `|C F* + D E*|`.
    pub fn unitarity_residuals(&self) -> [f64; 3] {
        let r1 = (self.c.norm_sqr() + self.d.norm_sqr() - 1.0).abs();
        let r2 = (self.e.norm_sqr() + self.f.norm_sqr() - 1.0).abs();
        let r3 = (self.c * self.f.conj() + self.d * self.e.conj()).norm();
        [r1, r2, r3]
    }

    pub(crate) fn from_state(y: &[f64; 8]) -> Self {
        ModeCoefficients {
            c: Complex64::new(y[0], y[1]),
            d: Complex64::new(y[2], y[3]),
            e: Complex64::new(y[4], y[5]),
            f: Complex64::new(y[6], y[7]),
        }
    }

    pub(crate) fn to_state(self) -> [f64; 8] {
        [
            self.c.re, self.c.im, self.d.re, self.d.im, self.e.re, self.e.im, self.f.re, self.f.im,
        ]
    }
}

/// One row of a tabulated frequency profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub t: f64,
    pub omega_a: f64,
    pub omega_b: f64,
}

/// Time-dependent oscillator (or atomic transition) frequencies, in units
/// of the coupling g.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyProfile {
    /// Both frequencies constant.
    Constant { omega_a: f64, omega_b: f64 },
    /// Sinusoidal detuning modulation split symmetrically over the two
    /// modes: `omega_a(t) = omega_a0 + delta sin(nu t)`,
    /// `omega_b(t) = omega_b0 - delta sin(nu t)`, so the detuning is
    /// `Delta(t) = omega_a0 - omega_b0 + 2 delta sin(nu t)`.
    SinusoidalDetuning {
        omega_a0: f64,
        omega_b0: f64,
        delta: f64,
        nu: f64,
    },
    /// Piecewise-linear interpolation of sampled rows; evaluation outside
    /// the table clamps to the first/last row.
    Tabulated { table: Vec<TableRow> },
}

impl FrequencyProfile {
    pub fn constant(omega_a: f64, omega_b: f64) -> Result<Self> {
        require_positive("omega_a", omega_a)?;
        require_positive("omega_b", omega_b)?;
        Ok(FrequencyProfile::Constant { omega_a, omega_b })
    }

    pub fn sinusoidal(omega_a0: f64, omega_b0: f64, delta: f64, nu: f64) -> Result<Self> {
        require_positive("omega_a0", omega_a0)?;
        require_positive("omega_b0", omega_b0)?;
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::invalid("delta", format!("{delta} must be >= 0")));
        }
        require_positive("nu", nu)?;
        Ok(FrequencyProfile::SinusoidalDetuning {
            omega_a0,
            omega_b0,
            delta,
            nu,
        })
    }

    pub fn tabulated(table: Vec<TableRow>) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::invalid("table", "need at least two rows"));
        }
        for row in &table {
            if !(row.t.is_finite() && row.omega_a.is_finite() && row.omega_b.is_finite()) {
                return Err(Error::invalid("table", "non-finite entry"));
            }
        }
        for w in table.windows(2) {
            if w[1].t <= w[0].t {
                return Err(Error::invalid(
                    "table",
                    format!("times not strictly increasing at t = {}", w[1].t),
                ));
            }
        }
        Ok(FrequencyProfile::Tabulated { table })
    }

    /// Frequencies at the start of the evolution.
    pub fn initial(&self) -> (f64, f64) {
        self.eval(0.0)
    }

    /// Evaluate `(omega_a(t), omega_b(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            FrequencyProfile::Constant { omega_a, omega_b } => (*omega_a, *omega_b),
            FrequencyProfile::SinusoidalDetuning {
                omega_a0,
                omega_b0,
                delta,
                nu,
            } => {
                let s = delta * (nu * t).sin();
                (omega_a0 + s, omega_b0 - s)
            }
            FrequencyProfile::Tabulated { table } => {
                let first = table.first().unwrap();
                let last = table.last().unwrap();
                if t <= first.t {
                    return (first.omega_a, first.omega_b);
                }
                if t >= last.t {
                    return (last.omega_a, last.omega_b);
                }
                let i = table.partition_point(|row| row.t <= t);
                let (lo, hi) = (&table[i - 1], &table[i]);
                let w = (t - lo.t) / (hi.t - lo.t);
                (
                    lo.omega_a + w * (hi.omega_a - lo.omega_a),
                    lo.omega_b + w * (hi.omega_b - lo.omega_b),
                )
            }
        }
    }

    /// Detuning `Delta(t) = omega_a(t) - omega_b(t)`.
    pub fn delta_at(&self, t: f64) -> f64 {
        let (a, b) = self.eval(t);
        a - b
    }

    /// Whether both frequencies return to their t = 0 values at `t_c`,
    /// within `tol` (absolute).
    pub fn is_closed_at(&self, t_c: f64, tol: f64) -> bool {
        let (a0, b0) = self.initial();
        let (a, b) = self.eval(t_c);
        (a - a0).abs() <= tol && (b - b0).abs() <= tol
    }

    /// A rough scale of the fastest oscillation in the coefficient ODEs,
    /// used to pick a plot-resolving output cadence.
    fn carrier_scale(&self) -> f64 {
        let two_g = 2.0;
        match self {
            FrequencyProfile::Constant { omega_a, omega_b } => omega_a.max(*omega_b).max(two_g),
            FrequencyProfile::SinusoidalDetuning {
                omega_a0,
                omega_b0,
                delta,
                nu,
            } => (omega_a0 + delta).max(omega_b0 + delta).max(*nu).max(two_g),
            FrequencyProfile::Tabulated { table } => table
                .iter()
                .map(|r| r.omega_a.max(r.omega_b))
                .fold(two_g, f64::max),
        }
    }
}

fn require_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{v} must be positive")))
    }
}

/// A sampled mode-coefficient trajectory.
#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    pub times: Vec<f64>,
    pub samples: Vec<ModeCoefficients>,
    pub profile: FrequencyProfile,
    /// Coupling constant; fixed to 1 in reduced units.
    pub g: f64,
    /// Accuracy of the run: the adaptive tolerance, or an RK4 error
    /// estimate (`dt^4`) in fixed-step mode.
    pub tol: f64,
}

impl ModeTrajectory {
    /// Unitarity residuals `(r1, r2, r3)` for every sample.
    pub fn unitarity_residuals(&self) -> Vec<[f64; 3]> {
        self.samples
            .iter()
            .map(ModeCoefficients::unitarity_residuals)
            .collect()
    }

    /// Largest unitarity residual over the whole trajectory.
    pub fn max_unitarity_residual(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| s.unitarity_residuals())
            .fold(0.0, f64::max)
    }
}

fn rhs_mode(
    profile: &FrequencyProfile,
) -> impl FnMut(f64, &[f64; 8], &mut [f64; 8]) -> Result<()> + '_ {
    move |t, y, dy| {
        let (wa, wb) = profile.eval(t);
        if !(wa.is_finite() && wb.is_finite()) {
            return Err(Error::ProfileEvaluation { t });
        }
        // dC/dt = i(omega_a C + D), packed re/im; multiplication by i maps
        // (x + iy) to (-y + ix).
        dy[0] = -(wa * y[1] + y[3]);
        dy[1] = wa * y[0] + y[2];
        dy[2] = -(wb * y[3] + y[1]);
        dy[3] = wb * y[2] + y[0];
        dy[4] = -(wb * y[5] + y[7]);
        dy[5] = wb * y[4] + y[6];
        dy[6] = -(wa * y[7] + y[5]);
        dy[7] = wa * y[6] + y[4];
        Ok(())
    }
}

fn build_trajectory(
    profile: &FrequencyProfile,
    sol: ode::Solution<8>,
    tol: f64,
) -> ModeTrajectory {
    let samples = sol.states.iter().map(ModeCoefficients::from_state).collect();
    ModeTrajectory {
        times: sol.times,
        samples,
        profile: profile.clone(),
        g: 1.0,
        tol,
    }
}

/// Evolve the mode coefficients from the identity over `[0, t_end]`.
///
/// Samples are reported at every accepted step, with the step capped so the
/// fastest carrier oscillation stays resolved in the output.
pub fn evolve_modes(profile: &FrequencyProfile, t_end: f64, tol: f64) -> Result<ModeTrajectory> {
    ode::validate_tol(tol)?;
    require_positive("t_end", t_end)?;
    let max_step = std::f64::consts::PI / (8.0 * profile.carrier_scale());
    let sol = ode::integrate(
        rhs_mode(profile),
        0.0,
        ModeCoefficients::IDENTITY.to_state(),
        t_end,
        &Stepper::Adaptive { tol },
        Sampling::Steps { max_step },
    )?;
    Ok(build_trajectory(profile, sol, tol))
}

/// Evolve the mode coefficients, reporting exactly at the given times.
pub fn evolve_modes_at(
    profile: &FrequencyProfile,
    times: &[f64],
    tol: f64,
) -> Result<ModeTrajectory> {
    ode::validate_tol(tol)?;
    let t_end = *times
        .last()
        .ok_or_else(|| Error::invalid("times", "empty grid"))?;
    require_positive("t_end", t_end)?;
    let sol = ode::integrate(
        rhs_mode(profile),
        0.0,
        ModeCoefficients::IDENTITY.to_state(),
        t_end,
        &Stepper::Adaptive { tol },
        Sampling::Grid(times),
    )?;
    Ok(build_trajectory(profile, sol, tol))
}

/// Grid-sampled evolution with an explicit stepper, for reproducible output.
pub fn evolve_modes_on(
    profile: &FrequencyProfile,
    times: &[f64],
    stepper: &Stepper,
) -> Result<ModeTrajectory> {
    let t_end = *times
        .last()
        .ok_or_else(|| Error::invalid("times", "empty grid"))?;
    require_positive("t_end", t_end)?;
    let sol = ode::integrate(
        rhs_mode(profile),
        0.0,
        ModeCoefficients::IDENTITY.to_state(),
        t_end,
        stepper,
        Sampling::Grid(times),
    )?;
    let tol = match *stepper {
        Stepper::Adaptive { tol } => tol,
        Stepper::Fixed { dt } => dt.powi(4),
    };
    Ok(build_trajectory(profile, sol, tol))
}

/// Mode coefficients at a single time.
pub fn mode_coefficients_at(
    profile: &FrequencyProfile,
    t: f64,
    tol: f64,
) -> Result<ModeCoefficients> {
    if t == 0.0 {
        return Ok(ModeCoefficients::IDENTITY);
    }
    ode::validate_tol(tol)?;
    require_positive("t", t)?;
    let y = ode::dopri5(
        rhs_mode(profile),
        0.0,
        ModeCoefficients::IDENTITY.to_state(),
        t,
        tol,
        Sampling::Endpoint,
        |_, _| {},
    )?;
    Ok(ModeCoefficients::from_state(&y))
}

/// Resumable raw integration used by the cycle optimizer: advance a packed
/// coefficient state from `t0` to `t1`.
pub(crate) fn advance_raw(
    profile: &FrequencyProfile,
    t0: f64,
    y0: [f64; 8],
    t1: f64,
    tol: f64,
) -> Result<[f64; 8]> {
    if t1 <= t0 {
        return Ok(y0);
    }
    ode::dopri5(
        rhs_mode(profile),
        t0,
        y0,
        t1,
        tol,
        Sampling::Endpoint,
        |_, _| {},
    )
}

pub(crate) fn identity_state() -> [f64; 8] {
    ModeCoefficients::IDENTITY.to_state()
}

pub(crate) fn c_norm_sqr(y: &[f64; 8]) -> f64 {
    y[0] * y[0] + y[1] * y[1]
}

/// Closed-form solution for equal constant frequencies (Rabi oscillations):
/// `C = e^{i omega t} cos t`, `D = i e^{i omega t} sin t`, and `(E, F)`
/// identical to `(C, D)` by symmetry.
pub fn rabi_closed_form(omega: f64, t: f64) -> ModeCoefficients {
    let phase = Complex64::from_polar(1.0, omega * t);
    let c = phase * t.cos();
    let d = Complex64::i() * phase * t.sin();
    ModeCoefficients { c, d, e: c, f: d }
}

/// Exact solution for arbitrary constant frequencies via the matrix
/// exponential of the constant 2x2 coefficient matrix.
///
/// With `s = (omega_a + omega_b)/2`, `d0 = (omega_a - omega_b)/2` and the
/// generalized Rabi frequency `Omega = sqrt(1 + d0^2)`:
///
/// ```text
/// C = e^{ist} (cos(Omega t) + i (d0/Omega) sin(Omega t))
/// D = e^{ist} i sin(Omega t)/Omega
/// E = e^{ist} (cos(Omega t) - i (d0/Omega) sin(Omega t))
/// F = D
/// ```
pub fn constant_profile_oracle(omega_a: f64, omega_b: f64, t: f64) -> ModeCoefficients {
    let s = 0.5 * (omega_a + omega_b);
    let d0 = 0.5 * (omega_a - omega_b);
    let big_omega = (1.0 + d0 * d0).sqrt();
    let phase = Complex64::from_polar(1.0, s * t);
    let cos = (big_omega * t).cos();
    let sin = (big_omega * t).sin();
    let c = phase * Complex64::new(cos, d0 / big_omega * sin);
    let d = phase * Complex64::new(0.0, sin / big_omega);
    let e = phase * Complex64::new(cos, -d0 / big_omega * sin);
    ModeCoefficients { c, d, e, f: d }
}

/// Per-sample unitarity residuals of a trajectory.
pub fn unitarity_residuals(traj: &ModeTrajectory) -> Vec<[f64; 3]> {
    traj.unitarity_residuals()
}
