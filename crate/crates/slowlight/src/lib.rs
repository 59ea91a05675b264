//! A 1-D numerical laboratory for slow light and stopped-light photon storage
//! in coherently driven Λ-type media.
//!
//! The crate propagates weak probe pulses through an electromagnetically
//! induced transparency (EIT) medium under a time-dependent control field,
//! stops and releases them, and cross-validates a direct Maxwell–Bloch
//! integration against the analytic dark-state-polariton propagator and
//! closed-form spectral diagnostics.
//!
//! Everything is expressed in scaled units with `c = 1` and the excited-state
//! decay rate `γ = 1` by default: rates are in units of γ, lengths in units
//! of c/γ. The figure presets in [`presets`] are directly enterable in these
//! units.
//!
//! Module map:
//! - [`medium`], [`schedule`], [`grid`], [`field`] — shared parameter and
//!   state containers (mixing angle, group index, control-field schedules).
//! - [`singlemode`] — collective-basis quantum memory in a single cavity
//!   mode, with a brute-force full-Hilbert-space oracle.
//! - [`mbsolver`] — method-of-lines integration of the linearized 1-D
//!   Maxwell–Bloch system.
//! - [`polariton`] — dark/bright polariton transform, ideal and
//!   first-order-corrected spectral propagators, adiabaticity diagnostics.
//! - [`spectra`] — susceptibility, transmission window, pulse spectra and
//!   storage bounds.
//! - [`config`], [`runner`], [`presets`] — configuration-file front end and
//!   artifact emission used by the CLI.

pub mod config;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod mbsolver;
pub mod medium;
pub mod polariton;
pub mod presets;
pub mod quadrature;
pub mod runner;
pub mod schedule;
pub mod singlemode;
pub mod spectra;

/// Speed of light in program units. All lengths are measured in c/γ.
pub const C_LIGHT: f64 = 1.0;

pub use field::{FieldState, PolaritonField};
pub use grid::Grid;
pub use medium::{group_index, mixing_angle, GroupIndex, MediumParams};
pub use schedule::{ControlSchedule, ScheduleSample};
