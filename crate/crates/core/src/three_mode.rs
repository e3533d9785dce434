//! Three oscillators sharing one incoherent energy source.
//!
//! Oscillators `b` and `c` (cold, parameter `p`) couple to `a` (hot,
//! parameter `q`) but not to each other. In the collective basis
//! `B1 = (b + c)/sqrt(2)`, `B2 = (b - c)/sqrt(2)` only the symmetric mode
//! couples to `a`, with effective strength `sqrt(2)`, while `B2` stays
//! thermal at its initial occupation. The cross-correlation
//! `<b c†> = (n_B1 - n_B2)/2` is therefore generated purely by contact with
//! the shared incoherent source.
//!
//! That expression holds at all times (it is pure basis-change algebra on
//! the collective occupations); at the swap times `cos(sqrt(2) t) = 0` it
//! reduces to half the difference of the initial thermal occupations,
//! `(1/(e^q - 1) - 1/(e^p - 1))/2`.

use num_complex::Complex64;

use crate::mode_dynamics::{self, FrequencyProfile};
use crate::observables::{bose, occupations_from_modes, ThermalInit};
use crate::ode::{self, Stepper};
use crate::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Occupations and coherence of the three-oscillator system at one time.
#[derive(Debug, Clone, Copy)]
pub struct ThreeModeState {
    /// Hot thermal parameter of oscillator `a`.
    pub q: f64,
    /// Cold thermal parameter of oscillators `b`, `c`.
    pub p: f64,
    pub n_a: f64,
    /// Symmetric collective mode occupation.
    pub n_b1: f64,
    /// Antisymmetric collective mode occupation (constant in time).
    pub n_b2: f64,
    /// Cross-correlation `<b c†>`.
    pub coherence_bc: Complex64,
}

/// A sampled three-mode trajectory.
#[derive(Debug, Clone)]
pub struct ThreeModeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<ThreeModeState>,
}

impl ThreeModeTrajectory {
    /// Time of the first collective swap, `pi / (2 sqrt(2))`.
    pub fn swap_time() -> f64 {
        std::f64::consts::PI / (2.0 * SQRT2)
    }
}

/// Cross-correlation `<b c†>` of a state: `(n_B1 - n_B2)/2`, real under
/// the thermal initial conditions used here.
pub fn coherence_bc(state: &ThreeModeState) -> Complex64 {
    Complex64::new(0.5 * (state.n_b1 - state.n_b2), 0.0)
}

/// Simulate the three-mode system via the collective-mode reduction.
///
/// The `(a, B1)` pair evolves as a two-mode problem with coupling
/// `sqrt(2)`, realized by rescaling time in the unit-coupling mode
/// equations; `B2` is pinned at its initial thermal occupation.
pub fn simulate_three_mode(q: f64, p: f64, t_end: f64, tol: f64) -> Result<ThreeModeTrajectory> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid("t_end", format!("{t_end} must be positive")));
    }
    let n = ((t_end * 64.0).ceil() as usize).clamp(128, 200_000);
    let times: Vec<f64> = ode::linspace(0.0, t_end, n + 1);
    simulate_three_mode_on(q, p, &times, &Stepper::Adaptive { tol })
}

/// Grid-sampled three-mode simulation with an explicit stepper.
pub fn simulate_three_mode_on(
    q: f64,
    p: f64,
    times: &[f64],
    stepper: &Stepper,
) -> Result<ThreeModeTrajectory> {
    let init = ThermalInit::new(q, p)?;
    if times.is_empty() {
        return Err(Error::invalid("times", "empty grid"));
    }

    // Unit-coupling dynamics at frequency omega/sqrt(2) over tau = sqrt(2) t
    // reproduces coupling sqrt(2) at frequency omega. Moduli are common-mode
    // invariant, so the internal frequency choice does not matter; keep the
    // rescaled value of omega = 1.
    let scaled: Vec<f64> = times.iter().map(|t| t * SQRT2).collect();
    let profile = FrequencyProfile::constant(1.0 / SQRT2, 1.0 / SQRT2)?;
    // linspace keeps strict monotonicity under scaling except at t = 0,
    // which the grid sampler handles as the emitted initial sample.
    let traj = mode_dynamics::evolve_modes_on(&profile, &scaled, stepper)?;
    let occ = occupations_from_modes(&traj, init);

    let n_b2 = bose(p);
    let states = occ
        .n_a
        .iter()
        .zip(&occ.n_b)
        .map(|(&n_a, &n_b1)| {
            let mut s = ThreeModeState {
                q,
                p,
                n_a,
                n_b1,
                n_b2,
                coherence_bc: Complex64::new(0.0, 0.0),
            };
            s.coherence_bc = coherence_bc(&s);
            s
        })
        .collect();
    Ok(ThreeModeTrajectory {
        times: times.to_vec(),
        states,
    })
}

/// State at a single time, integrated directly to `t`.
pub fn three_mode_state_at(q: f64, p: f64, t: f64, tol: f64) -> Result<ThreeModeState> {
    let traj = simulate_three_mode(q, p, t.max(f64::MIN_POSITIVE), tol)?;
    Ok(*traj.states.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{Sampling, Stepper};

    // Independent oracle: first-moment ODEs of the full three-oscillator
    // Hamiltonian (coupling 1 between a and each of b, c), in the original
    // basis. State: [n_a, n_b, n_c, Re/Im <a†b>, Re/Im <a†c>, Re/Im <b†c>].
    fn rhs_three(_t: f64, y: &[f64; 9], dy: &mut [f64; 9]) -> crate::Result<()> {
        let (ab_r, ab_i) = (y[3], y[4]);
        let (ac_r, ac_i) = (y[5], y[6]);
        let (bc_r, bc_i) = (y[7], y[8]);
        dy[0] = 2.0 * (ab_i + ac_i);
        dy[1] = -2.0 * ab_i;
        dy[2] = -2.0 * ac_i;
        // d<a†b>/dt = i(n_b - n_a + <b†c>*)
        dy[3] = bc_i;
        dy[4] = y[1] - y[0] + bc_r;
        // d<a†c>/dt = i(n_c - n_a + <b†c>)
        dy[5] = -bc_i;
        dy[6] = y[2] - y[0] + bc_r;
        // d<b†c>/dt = i(<a†c> - <a†b>*)
        dy[7] = -(ac_i + ab_i);
        dy[8] = ac_r - ab_r;
        Ok(())
    }

    fn oracle_at(q: f64, p: f64, t: f64) -> [f64; 9] {
        let y0 = [bose(q), bose(p), bose(p), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let sol = crate::ode::integrate(
            rhs_three,
            0.0,
            y0,
            t,
            &Stepper::Adaptive { tol: 1e-12 },
            Sampling::Endpoint,
        )
        .unwrap();
        sol.states[0]
    }

    #[test]
    fn initial_state_has_no_coherence() {
        let s = three_mode_state_at(0.5, 1.0, 1e-9, 1e-10).unwrap();
        assert!(s.coherence_bc.norm() < 1e-8);
    }

    #[test]
    fn swap_exchanges_a_and_symmetric_mode() {
        let (q, p) = (0.5, 1.0);
        let t = ThreeModeTrajectory::swap_time();
        let s = three_mode_state_at(q, p, t, 1e-11).unwrap();
        assert!((s.n_a - bose(p)).abs() < 1e-8);
        assert!((s.n_b1 - bose(q)).abs() < 1e-8);
    }

    #[test]
    fn coherence_at_swap_matches_paper_values() {
        let t = ThreeModeTrajectory::swap_time();
        let s = three_mode_state_at(2f64.ln(), 3f64.ln(), t, 1e-11).unwrap();
        assert!((s.coherence_bc.re - 0.25).abs() < 1e-6);
        assert!(s.coherence_bc.im.abs() < 1e-12);

        let s = three_mode_state_at(0.5, 1.0, t, 1e-11).unwrap();
        let expected = 0.5 * (bose(0.5) - bose(1.0));
        assert!((s.coherence_bc.re - expected).abs() < 1e-6);
        assert!((s.coherence_bc.re - 0.479758).abs() < 2e-6);
    }

    #[test]
    fn equal_temperatures_stay_coherence_free() {
        let traj = simulate_three_mode(0.8, 0.8, 4.0, 1e-10).unwrap();
        for s in &traj.states {
            assert!(s.coherence_bc.norm() < 1e-8);
        }
    }

    #[test]
    fn antisymmetric_mode_occupation_constant() {
        let tol = 1e-10;
        let traj = simulate_three_mode(0.5, 1.0, 6.0, tol).unwrap();
        let expected = bose(1.0);
        for s in &traj.states {
            assert!((s.n_b2 - expected).abs() <= 10.0 * tol);
        }
    }

    #[test]
    fn total_excitations_of_coupled_pair_conserved() {
        let tol = 1e-10;
        let traj = simulate_three_mode(0.4, 1.2, 5.0, tol).unwrap();
        let s0 = traj.states[0].n_a + traj.states[0].n_b1;
        for s in &traj.states {
            assert!((s.n_a + s.n_b1 - s0).abs() <= 10.0 * tol);
        }
    }

    #[test]
    fn matches_full_three_mode_moment_oracle() {
        let (q, p) = (0.5, 1.0);
        for &t in &[0.4, 1.0, ThreeModeTrajectory::swap_time(), 2.5] {
            let s = three_mode_state_at(q, p, t, 1e-11).unwrap();
            let y = oracle_at(q, p, t);
            // n_a directly; coherence <b c†> = conj(<b†c>) is real here.
            assert!((s.n_a - y[0]).abs() < 1e-8, "n_a mismatch at t = {t}");
            assert!((s.coherence_bc.re - y[7]).abs() < 1e-8, "coherence at t = {t}");
            assert!(y[8].abs() < 1e-9, "coherence acquired imaginary part");
            // Collective occupation n_B1 = (n_b + n_c)/2 + Re<b†c>.
            let n_b1 = 0.5 * (y[1] + y[2]) + y[7];
            assert!((s.n_b1 - n_b1).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(simulate_three_mode(0.0, 1.0, 1.0, 1e-10).is_err());
        assert!(simulate_three_mode(1.0, -0.5, 1.0, 1e-10).is_err());
        assert!(simulate_three_mode(1.0, 1.0, -1.0, 1e-10).is_err());
    }

    #[test]
    fn post_swap_collective_state_powers_a_standard_engine() {
        // After the swap the collective pair (B1, B2) is a thermal product
        // with parameters (q, p): an engine fed these parameters behaves
        // exactly as one between ordinary hot and cold reservoirs,
        // producing positive work iff q < p.
        let (q, p) = (0.5, 1.0);
        let t = ThreeModeTrajectory::swap_time();
        let s = three_mode_state_at(q, p, t, 1e-11).unwrap();
        let q_eff = (1.0 + 1.0 / s.n_b1).ln();
        let p_eff = (1.0 + 1.0 / s.n_b2).ln();
        assert!((q_eff - q).abs() < 1e-8);
        assert!((p_eff - p).abs() < 1e-12);

        // Engine frequencies chosen so omega_a/T_h = q_eff and
        // omega_b/T_c = p_eff.
        let (omega_a, omega_b) = (2.0, 1.2);
        let nu = crate::photonic_engine::resonance_frequency(omega_a, omega_b);
        let spec = crate::photonic_engine::CycleSpec::new(
            omega_a,
            omega_b,
            omega_a / q_eff,
            omega_b / p_eff,
            0.2,
            nu,
            40.0,
            1e-10,
        )
        .unwrap();
        let (t_c, d_sq) = crate::photonic_engine::optimize_cycle_duration(&spec).unwrap();
        assert!(d_sq > 0.9);
        let report = crate::photonic_engine::run_photonic_cycle(&spec, t_c).unwrap();
        assert!(report.work > 0.0, "q < p must give positive work");
    }
}
