//! Occupations, energies and effective temperatures of thermally prepared
//! modes, derived from mode-coefficient trajectories.
//!
//! The initial state is a product of thermal states described by the
//! dimensionless parameters `q = omega_a / T_hot` and `p = omega_b / T_cold`
//! (reduced units). Inverting the unitary mode transform gives
//! `a = C* A(t) + F* B(t)`, so the occupations stay convex combinations of
//! the two initial thermal occupations:
//!
//! ```text
//! n_a(t) = |C|^2 / (e^q - 1) + |F|^2 / (e^p - 1)
//! n_b(t) = |E|^2 / (e^p - 1) + |D|^2 / (e^q - 1)
//! ```

use crate::mode_dynamics::{FrequencyProfile, ModeTrajectory};
use crate::ode::{self, Sampling, Stepper};
use crate::{Error, Result};

/// Dimensionless thermal parameters of the initial product state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalInit {
    /// `omega_a / T_hot`.
    pub q: f64,
    /// `omega_b / T_cold`.
    pub p: f64,
}

impl ThermalInit {
    pub fn new(q: f64, p: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::invalid("q", format!("{q} must be positive")));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::invalid("p", format!("{p} must be positive")));
        }
        Ok(ThermalInit { q, p })
    }

    /// Initial hot-mode occupation `1/(e^q - 1)`.
    pub fn n_hot(&self) -> f64 {
        bose(self.q)
    }

    /// Initial cold-mode occupation `1/(e^p - 1)`.
    pub fn n_cold(&self) -> f64 {
        bose(self.p)
    }
}

/// Occupation of a bosonic mode in a thermal state, `1/(e^x - 1)`,
/// with `x = omega / T`.
pub fn bose_occupation(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(
            "bose_occupation",
            format!("x = {x} must be positive"),
        ));
    }
    Ok(bose(x))
}

/// Unchecked thermal occupation for pre-validated arguments.
pub(crate) fn bose(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Occupations of both modes along a trajectory.
#[derive(Debug, Clone)]
pub struct OccupationSeries {
    pub times: Vec<f64>,
    pub n_a: Vec<f64>,
    pub n_b: Vec<f64>,
}

impl OccupationSeries {
    /// Largest drift of `n_a + n_b` from its initial value.
    pub fn max_sum_drift(&self) -> f64 {
        let s0 = self.n_a[0] + self.n_b[0];
        self.n_a
            .iter()
            .zip(&self.n_b)
            .map(|(a, b)| (a + b - s0).abs())
            .fold(0.0, f64::max)
    }
}

/// Map a mode trajectory and thermal initial data to occupations.
///
/// The inverse-transform convention `d = F*` is pinned by checking
/// `|F| = |D|` (a consequence of the unitarity integrals) on every sample.
pub fn occupations_from_modes(traj: &ModeTrajectory, init: ThermalInit) -> OccupationSeries {
    let nq = init.n_hot();
    let np = init.n_cold();
    let check = 1e-9f64.max(10.0 * traj.tol);
    let mut n_a = Vec::with_capacity(traj.samples.len());
    let mut n_b = Vec::with_capacity(traj.samples.len());
    for (t, s) in traj.times.iter().zip(traj.samples.iter()) {
        assert!(
            (s.f.norm() - s.d.norm()).abs() <= check,
            "inverse-coefficient identity |F| = |D| violated at t = {t}: \
             |F| = {}, |D| = {}",
            s.f.norm(),
            s.d.norm()
        );
        n_a.push(s.c.norm_sqr() * nq + s.f.norm_sqr() * np);
        n_b.push(s.e.norm_sqr() * np + s.d.norm_sqr() * nq);
    }
    OccupationSeries {
        times: traj.times.clone(),
        n_a,
        n_b,
    }
}

/// Average mode energies for equal constant frequencies:
/// `E_a = omega (cos^2 t / (e^q - 1) + sin^2 t / (e^p - 1))` and `E_b` with
/// the roles swapped.
pub fn mode_energies_equal_frequency(init: ThermalInit, omega: f64, t: f64) -> (f64, f64) {
    let c2 = t.cos() * t.cos();
    let s2 = t.sin() * t.sin();
    let nq = init.n_hot();
    let np = init.n_cold();
    (omega * (c2 * nq + s2 * np), omega * (c2 * np + s2 * nq))
}

/// Temperature whose thermal occupation reproduces mean energy `E` at
/// frequency `omega`: `T = omega / ln(1 + omega/E)`.
///
/// Energies below 1e-300 map to zero temperature instead of overflowing the
/// logarithm.
pub fn effective_temperature(energy: f64, omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(
            "effective_temperature",
            format!("omega = {omega} must be positive"),
        ));
    }
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::domain(
            "effective_temperature",
            format!("energy = {energy} must be positive"),
        ));
    }
    if energy < 1e-300 {
        return Ok(0.0);
    }
    Ok(omega / (omega / energy).ln_1p())
}

fn rhs_moments(
    profile: &FrequencyProfile,
) -> impl FnMut(f64, &[f64; 4], &mut [f64; 4]) -> Result<()> + '_ {
    // y = [n_a, n_b, Re<a† b>, Im<a† b>]; closed first-moment system of the
    // rotating-wave Hamiltonian:
    //   dn_a/dt = 2 Im z,  dn_b/dt = -2 Im z,
    //   dz/dt   = i Delta(t) z + i (n_b - n_a).
    move |t, y, dy| {
        let (wa, wb) = profile.eval(t);
        if !(wa.is_finite() && wb.is_finite()) {
            return Err(Error::ProfileEvaluation { t });
        }
        let delta = wa - wb;
        dy[0] = 2.0 * y[3];
        dy[1] = -2.0 * y[3];
        dy[2] = -delta * y[3];
        dy[3] = delta * y[2] + (y[1] - y[0]);
        Ok(())
    }
}

/// Independent occupation oracle: integrates the closed first-moment ODEs
/// for `n_a`, `n_b` and the cross-correlator, bypassing the
/// mode-coefficient pipeline entirely.
pub fn moment_ode_oracle(
    profile: &FrequencyProfile,
    init: ThermalInit,
    t_end: f64,
    tol: f64,
) -> Result<OccupationSeries> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid("t_end", format!("{t_end} must be positive")));
    }
    let n = ((t_end * 32.0).ceil() as usize).clamp(64, 100_000);
    let times = ode::linspace(0.0, t_end, n + 1);
    moment_ode_oracle_at(profile, init, &times, tol)
}

/// Grid-sampled variant of [`moment_ode_oracle`].
pub fn moment_ode_oracle_at(
    profile: &FrequencyProfile,
    init: ThermalInit,
    times: &[f64],
    tol: f64,
) -> Result<OccupationSeries> {
    let t_end = *times
        .last()
        .ok_or_else(|| Error::invalid("times", "empty grid"))?;
    let y0 = [init.n_hot(), init.n_cold(), 0.0, 0.0];
    let sol = ode::integrate(
        rhs_moments(profile),
        0.0,
        y0,
        t_end,
        &Stepper::Adaptive { tol },
        Sampling::Grid(times),
    )?;
    Ok(OccupationSeries {
        times: sol.times,
        n_a: sol.states.iter().map(|y| y[0]).collect(),
        n_b: sol.states.iter().map(|y| y[1]).collect(),
    })
}
