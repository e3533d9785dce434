//! Unitary dynamics of thermally prepared working substances and the
//! heat-engine cycles built on top of them.
//!
//! The library evolves small quantum systems that start in thermal (Gibbs)
//! states and then undergo isolated, unitary evolution under time-dependent
//! quadratic Hamiltonians:
//!
//! * [`mode_dynamics`]: two coupled bosonic modes in the rotating-wave
//!   approximation, tracked through the complex mode-coefficient ODEs.
//! * [`observables`]: occupations, energies and effective temperatures
//!   derived from mode trajectories and thermal initial data.
//! * [`three_mode`]: three oscillators sharing one incoherent energy
//!   source, reduced to collective modes; noise-induced coherence.
//! * [`photonic_engine`]: cycle work/heat/efficiency for the two-cavity
//!   photonic engine, parametric-resonance cycle optimization, Carnot sweep.
//! * [`tls_engine`]: exact 4x4 density-matrix evolution of two coupled
//!   two-level atoms and the corresponding engine cycle.
//! * [`counter_rotating`]: pair-creation (two-mode-squeezing) coupling,
//!   its closed moment equations and the no-positive-work result.
//! * [`checks`]: seeded, reusable invariant suites shared by the test
//!   harness and the CLI `verify` command.
//!
//! Reduced units are used throughout: `hbar = k_B = g = 1`, so frequencies
//! are in units of the mode coupling `g`, times in `1/g` and energies in
//! `hbar*g`.

pub mod checks;
pub mod counter_rotating;
mod error;
pub mod mode_dynamics;
pub mod observables;
pub mod ode;
pub mod photonic_engine;
pub mod three_mode;
pub mod tls_engine;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
