//! `qhe verify`: run every invariant suite and report one line per suite.

use qhe_core::checks::{self, thresholds};

use crate::config::CliError;

pub fn run(seed: Option<u64>, tol: Option<f64>) -> Result<(), CliError> {
    let seed = seed.unwrap_or(checks::DEFAULT_SEED);
    let tol = tol.unwrap_or(1e-10);
    println!("verify: seed = {seed}, tol = {tol:e}");

    let mut failures = 0usize;
    let mut suite = |name: &str, outcome: Result<(bool, String), qhe_core::Error>| {
        match outcome {
            Ok((true, detail)) => println!("[PASS] {name}: {detail}"),
            Ok((false, detail)) => {
                println!("[FAIL] {name}: {detail}");
                failures += 1;
            }
            Err(e) => {
                println!("[FAIL] {name}: {e}");
                failures += 1;
            }
        }
    };

    suite(
        "rabi_oracle",
        checks::rabi_oracle_error(tol).map(|r| {
            (
                r <= thresholds::RABI_ORACLE,
                format!("max error {r:.3e} (limit {:.0e})", thresholds::RABI_ORACLE),
            )
        }),
    );
    suite(
        "mode_unitarity",
        checks::unitarity_max_residual(seed, 100, 30.0, tol).map(|r| {
            (
                r <= thresholds::UNITARITY,
                format!("max residual {r:.3e} (limit {:.0e})", thresholds::UNITARITY),
            )
        }),
    );
    suite(
        "constant_profile_oracle",
        checks::constant_oracle_max_error(seed, 100, tol).map(|r| {
            (
                r <= thresholds::CONSTANT_ORACLE,
                format!("max error {r:.3e} (limit {:.0e})", thresholds::CONSTANT_ORACLE),
            )
        }),
    );
    suite(
        "interaction_frame",
        checks::interaction_frame_gap(tol).map(|r| {
            (
                r <= 10.0 * tol,
                format!("max moduli gap {r:.3e} (limit 10 tol)"),
            )
        }),
    );
    suite(
        "thermal_swap",
        checks::thermal_swap(tol).map(|o| {
            (
                o.swap_error <= thresholds::THERMAL_SWAP && o.curves_cross,
                format!(
                    "swap error {:.3e} (limit {:.0e}), curves cross: {}",
                    o.swap_error,
                    thresholds::THERMAL_SWAP,
                    o.curves_cross
                ),
            )
        }),
    );
    suite(
        "reference_resonance",
        checks::reference_resonance_root(tol).map(|(t_c, abs_c)| {
            (
                (t_c - 22.26).abs() <= thresholds::REFERENCE_TC_WINDOW && abs_c <= thresholds::REFERENCE_ABS_C,
                format!("t_c = {t_c:.4} (22.26 +- 0.10), |C| = {abs_c:.4}"),
            )
        }),
    );
    suite(
        "efficiency_law",
        checks::efficiency_law_max_error(seed, 50, tol).map(|r| {
            (
                r <= thresholds::EFFICIENCY_LAW,
                format!("max deviation {r:.3e} (limit {:.0e})", thresholds::EFFICIENCY_LAW),
            )
        }),
    );
    suite(
        "carnot_grid",
        checks::carnot_grid(20, 20, tol.max(1e-9)).map(|o| {
            (
                o.max_ceiling_excess <= thresholds::CARNOT_SLACK
                    && o.boundary_ok
                    && o.positive_points > 0,
                format!(
                    "ceiling excess {:.3e}, boundary ok: {}, positive points: {}",
                    o.max_ceiling_excess, o.boundary_ok, o.positive_points
                ),
            )
        }),
    );
    suite(
        "zero_power_conservation",
        checks::zero_power_residuals(tol).map(|(matched, control)| {
            (
                matched <= thresholds::ZERO_POWER && control > 0.1,
                format!("matched residual {matched:.3e}, q != p control {control:.3e}"),
            )
        }),
    );
    suite(
        "three_mode_coherence",
        checks::three_mode_swap(tol).map(|o| {
            (
                o.max_coherence_error <= thresholds::THREE_MODE_COHERENCE
                    && o.max_b2_drift <= thresholds::THREE_MODE_B2_DRIFT,
                format!(
                    "coherence error {:.3e}, B2 drift {:.3e}",
                    o.max_coherence_error, o.max_b2_drift
                ),
            )
        }),
    );
    suite(
        "tls_engine",
        checks::tls_suite(15, tol).map(|o| {
            (
                o.identity_max_residual <= thresholds::TLS_IDENTITY_RESIDUAL
                    && o.bracket_violation <= thresholds::TLS_BRACKET
                    && o.work_sign_ok
                    && o.ceiling_ok,
                format!(
                    "identity residual {:.3e}, bracket violation {:.3e}, sign grid ok: {}, \
                     ceiling ok: {} ({} points)",
                    o.identity_max_residual,
                    o.bracket_violation,
                    o.work_sign_ok,
                    o.ceiling_ok,
                    o.grid_points
                ),
            )
        }),
    );
    suite(
        "counter_rotating",
        checks::cr_suite(seed, 100, tol).map(|o| {
            (
                o.max_work <= thresholds::CR_WORK
                    && o.max_diff_drift <= thresholds::CR_DRIFT
                    && o.max_floor_violation <= thresholds::CR_DRIFT
                    && o.fock_gap <= thresholds::CR_FOCK_AGREEMENT
                    && o.sinh_error <= thresholds::CR_FOCK_AGREEMENT
                    && o.sum_identity_residual <= thresholds::CR_IDENTITY_RESIDUAL,
                format!(
                    "max W {:.3e} over {} cycles, drifts {:.3e}/{:.3e}, Fock gap {:.3e}, \
                     sum-identity residual {:.3e}",
                    o.max_work,
                    o.cycles,
                    o.max_diff_drift,
                    o.max_floor_violation,
                    o.fock_gap,
                    o.sum_identity_residual
                ),
            )
        }),
    );
    suite(
        "cross_pipeline",
        checks::cross_pipeline_max_gap(seed, 20, tol).map(|r| {
            (
                r <= thresholds::CROSS_PIPELINE,
                format!("max occupation gap {r:.3e} (limit {:.0e})", thresholds::CROSS_PIPELINE),
            )
        }),
    );

    if failures > 0 {
        Err(CliError::VerifyFailed(failures))
    } else {
        println!("verify: all suites passed");
        Ok(())
    }
}
