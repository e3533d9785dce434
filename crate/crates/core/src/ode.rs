//! Embedded Runge-Kutta integration for small, non-stiff ODE systems.
//!
//! Two steppers are provided:
//!
//! * [`dopri5`]: the Dormand-Prince 5(4) pair with PI step-size control,
//!   used for all accuracy-driven work;
//! * [`rk4_fixed`]: a classical fourth-order method with a user-set step,
//!   used when bit-for-bit reproducible output matters more than adaptivity.
//!
//! States are fixed-size `[f64; N]` arrays; complex amplitudes are packed as
//! re/im pairs by the callers. The right-hand side is fallible so profile
//! evaluation errors can surface from inside a step.

use crate::{Error, Result};

/// Where the integrator should report samples.
#[derive(Debug, Clone, Copy)]
pub enum Sampling<'a> {
    /// Report every accepted step, with the step size capped so the output
    /// resolves the fastest oscillation (`max_step`).
    Steps { max_step: f64 },
    /// Report exactly at the given strictly increasing times. Steps are
    /// clamped to land on each requested time; nothing else is reported.
    Grid(&'a [f64]),
    /// Report only the final state at `t_end`.
    Endpoint,
}

/// Integrator selection carried through the CLI layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stepper {
    /// Dormand-Prince 5(4) with the given tolerance (atol = rtol = tol).
    Adaptive { tol: f64 },
    /// Classical RK4 with a fixed step, for reproducible golden output.
    Fixed { dt: f64 },
}

/// One recorded trajectory: aligned times and states.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
}

impl<const N: usize> Solution<N> {
    fn with_capacity(n: usize) -> Self {
        Solution {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, y: &[f64; N]) {
        self.times.push(t);
        self.states.push(*y);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[f64; N])> {
        self.times.last().map(|&t| (t, self.states.last().unwrap()))
    }
}

/// Admissible adaptive tolerance range.
pub const TOL_MIN: f64 = 1e-13;
pub const TOL_MAX: f64 = 1e-4;

/// Validate an adaptive tolerance against the supported range.
pub fn validate_tol(tol: f64) -> Result<()> {
    if !(TOL_MIN..=TOL_MAX).contains(&tol) {
        return Err(Error::invalid(
            "tol",
            format!("{tol:e} outside supported range [{TOL_MIN:e}, {TOL_MAX:e}]"),
        ));
    }
    Ok(())
}

// Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner, DOPRI5).
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const C: [f64; 6] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0];
// 5th-order minus embedded 4th-order weights (error estimator).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const MAX_STEPS: usize = 50_000_000;

// Local error is controlled a fixed factor below the requested tolerance so
// that the accumulated global error over the spans used here (tens of time
// units) stays at or under `tol` itself.
const LOCAL_TOL_FACTOR: f64 = 1.0 / 64.0;
const LOCAL_TOL_FLOOR: f64 = 1e-14;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, coeffs: &[f64], ks: &[[f64; N]]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks.iter()) {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

fn check_finite<const N: usize>(t: f64, y: &[f64; N]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::numerical(format!(
            "non-finite state encountered at t = {t}"
        )))
    }
}

/// Integrate `dy/dt = f(t, y)` from `t0` to `t_end` with Dormand-Prince 5(4).
///
/// `emit` receives every reported sample per the [`Sampling`] mode; the final
/// state at `t_end` is always both emitted (where the mode asks for it) and
/// returned. `t_end > t0` is required.
pub fn dopri5<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: f64,
    sampling: Sampling<'_>,
    mut emit: impl FnMut(f64, &[f64; N]),
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]) -> Result<()>,
{
    if !t_end.is_finite() || t_end <= t0 {
        return Err(Error::invalid("t_end", format!("{t_end} must exceed {t0}")));
    }
    let span = t_end - t0;
    let (max_step, grid) = match sampling {
        Sampling::Steps { max_step } => (max_step.min(span), None),
        Sampling::Grid(ts) => {
            validate_grid(t0, t_end, ts)?;
            (span, Some(ts))
        }
        Sampling::Endpoint => (span, None),
    };

    let ltol = (tol * LOCAL_TOL_FACTOR).max(LOCAL_TOL_FLOOR);
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    f(t, &y, &mut k[0])?;

    // Next grid index to land on; emit t0 if it is requested.
    let mut gi = 0usize;
    match grid {
        Some(ts) => {
            if !ts.is_empty() && ts[0] == t0 {
                emit(t0, &y);
                gi = 1;
            }
        }
        None => {
            if matches!(sampling, Sampling::Steps { .. }) {
                emit(t0, &y);
            }
        }
    }

    // h_free is the controller's natural step; clamping to landing points
    // must not feed back into it, or the step would collapse after every
    // grid sample.
    let mut h_free = initial_step(span, tol, max_step);
    let mut fac_old: f64 = 1e-4;
    let expo = 0.2 - BETA * 0.75;

    for _ in 0..MAX_STEPS {
        if t >= t_end {
            break;
        }
        // Clamp to the next mandatory landing point.
        let target = match grid {
            Some(ts) if gi < ts.len() => ts[gi],
            _ => t_end,
        };
        let mut h = h_free.min(max_step).min(t_end - t);
        let mut landing = false;
        if t + h >= target - 1e-14 * target.abs().max(1.0) {
            h = target - t;
            landing = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            if landing {
                // The landing point coincides with t up to roundoff: emit
                // (or finish) without taking a degenerate step.
                t = target;
                if let Some(ts) = grid {
                    if gi < ts.len() {
                        emit(ts[gi], &y);
                        gi += 1;
                    }
                }
                continue;
            }
            return Err(Error::Stiffness { t, h, tol });
        }

        // Stages 2..6 plus the FSAL stage 7.
        f(t + C[1] * h, &axpy(&y, h, &A2, &k[..1]), &mut k[1])?;
        f(t + C[2] * h, &axpy(&y, h, &A3, &k[..2]), &mut k[2])?;
        f(t + C[3] * h, &axpy(&y, h, &A4, &k[..3]), &mut k[3])?;
        f(t + C[4] * h, &axpy(&y, h, &A5, &k[..4]), &mut k[4])?;
        f(t + C[5] * h, &axpy(&y, h, &A6, &k[..5]), &mut k[5])?;
        let y_new = axpy(&y, h, &B, &k[..6]);
        let t_new = if landing { target } else { t + h };
        f(t_new, &y_new, &mut k[6])?;

        // Scaled RMS error of the embedded pair.
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let scale = ltol + ltol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            check_finite(t_new, &y_new)?;
            t = t_new;
            y = y_new;
            k[0] = k[6]; // FSAL
            match grid {
                Some(ts) => {
                    if landing && gi < ts.len() {
                        emit(ts[gi], &y);
                        gi += 1;
                    }
                }
                None => {
                    if matches!(sampling, Sampling::Steps { .. }) {
                        emit(t, &y);
                    }
                }
            }
            let fac =
                (err.powf(expo) / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            fac_old = err.max(1e-4);
            let h_prop = h / fac;
            // A shortened (clamped) step must not shrink the free proposal;
            // an unclamped step follows the controller as usual.
            h_free = if h < h_free { h_free.max(h_prop) } else { h_prop };
        } else {
            h_free = h * (SAFETY / err.powf(0.2)).clamp(1.0 / FAC_MAX, 1.0);
        }
    }

    if t < t_end {
        return Err(Error::numerical(format!(
            "step budget exhausted at t = {t} before reaching {t_end}"
        )));
    }
    Ok(y)
}

/// Classical RK4 with fixed step `dt`; grid landings are honored exactly by
/// shortening the step, which keeps the output deterministic for a given
/// `(dt, sampling)` pair.
pub fn rk4_fixed<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    dt: f64,
    sampling: Sampling<'_>,
    mut emit: impl FnMut(f64, &[f64; N]),
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]) -> Result<()>,
{
    if !t_end.is_finite() || t_end <= t0 {
        return Err(Error::invalid("t_end", format!("{t_end} must exceed {t0}")));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::invalid("dt", format!("{dt} must be positive")));
    }
    let grid = match sampling {
        Sampling::Grid(ts) => {
            validate_grid(t0, t_end, ts)?;
            Some(ts)
        }
        _ => None,
    };

    let mut t = t0;
    let mut y = y0;
    let mut gi = 0usize;
    match grid {
        Some(ts) => {
            if !ts.is_empty() && ts[0] == t0 {
                emit(t0, &y);
                gi = 1;
            }
        }
        None => {
            if matches!(sampling, Sampling::Steps { .. }) {
                emit(t0, &y);
            }
        }
    }

    let mut k1 = [0.0; N];
    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    while t < t_end {
        let target = match grid {
            Some(ts) if gi < ts.len() => ts[gi],
            _ => t_end,
        };
        let mut h = dt.min(t_end - t);
        let mut landing = false;
        if t + h >= target - 1e-14 * target.abs().max(1.0) {
            h = target - t;
            landing = true;
        }
        if h <= 0.0 {
            // The landing point coincides with t up to roundoff.
            t = target;
            if landing {
                if let Some(ts) = grid {
                    if gi < ts.len() {
                        emit(ts[gi], &y);
                        gi += 1;
                    }
                }
            }
            continue;
        }

        f(t, &y, &mut k1)?;
        let mut ym = y;
        for i in 0..N {
            ym[i] = y[i] + 0.5 * h * k1[i];
        }
        f(t + 0.5 * h, &ym, &mut k2)?;
        for i in 0..N {
            ym[i] = y[i] + 0.5 * h * k2[i];
        }
        f(t + 0.5 * h, &ym, &mut k3)?;
        for i in 0..N {
            ym[i] = y[i] + h * k3[i];
        }
        f(t + h, &ym, &mut k4)?;
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = if landing { target } else { t + h };
        check_finite(t, &y)?;
        match grid {
            Some(ts) => {
                if landing && gi < ts.len() {
                    emit(ts[gi], &y);
                    gi += 1;
                }
            }
            None => {
                if matches!(sampling, Sampling::Steps { .. }) {
                    emit(t, &y);
                }
            }
        }
    }
    Ok(y)
}

/// Integrate with either stepper, collecting the reported samples.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    stepper: &Stepper,
    sampling: Sampling<'_>,
) -> Result<Solution<N>>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]) -> Result<()>,
{
    let mut sol = Solution::with_capacity(match sampling {
        Sampling::Grid(ts) => ts.len(),
        _ => 256,
    });
    let y_end = match *stepper {
        Stepper::Adaptive { tol } => {
            validate_tol(tol)?;
            dopri5(f, t0, y0, t_end, tol, sampling, |t, y| sol.push(t, y))?
        }
        Stepper::Fixed { dt } => rk4_fixed(f, t0, y0, t_end, dt, sampling, |t, y| sol.push(t, y))?,
    };
    if matches!(sampling, Sampling::Endpoint) {
        sol.push(t_end, &y_end);
    }
    Ok(sol)
}

fn initial_step(span: f64, tol: f64, max_step: f64) -> f64 {
    (0.01 * span)
        .min((tol * LOCAL_TOL_FACTOR).max(LOCAL_TOL_FLOOR).powf(0.2))
        .min(max_step)
        .max(1e-10)
}

fn validate_grid(t0: f64, t_end: f64, ts: &[f64]) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::invalid("times", "output grid is empty"));
    }
    if let Some(bad) = ts.iter().find(|t| !t.is_finite()) {
        return Err(Error::invalid("times", format!("non-finite grid time {bad}")));
    }
    for w in ts.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid(
                "times",
                format!("output grid not strictly increasing at {} -> {}", w[0], w[1]),
            ));
        }
    }
    if ts[0] < t0 || *ts.last().unwrap() > t_end + 1e-12 * t_end.abs().max(1.0) {
        return Err(Error::invalid(
            "times",
            format!(
                "output grid [{}, {}] outside integration span [{t0}, {t_end}]",
                ts[0],
                ts.last().unwrap()
            ),
        ));
    }
    Ok(())
}

/// Build `n` uniformly spaced times covering `[t0, t_end]` inclusive.
pub fn linspace(t0: f64, t_end: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let h = (t_end - t0) / (n - 1) as f64;
    let mut ts: Vec<f64> = (0..n).map(|i| t0 + h * i as f64).collect();
    ts[n - 1] = t_end;
    ts
}
