//! Built-in named run configurations.
//!
//! Each preset is a complete [`RunConfig`] reproducing one of the standard
//! stopped-light scenarios in c = 1, γ = 1 units:
//!
//! - `fig3` — stop-and-release of a polariton with envelope exp{−(z/10)²}
//!   under the two-ramp schedule cotθ = 100(1 − ½tanh[0.1(t−15)] +
//!   ½tanh[0.1(t−125)]), in a deeply adiabatic medium (α = 10⁴).
//! - `fig4` — simultaneous narrowing of the transmission window and the
//!   pulse spectrum over a group-velocity family (α = 20, g²N/γ² = 10).
//! - `fig5` — boundary reflection coefficient near resonance.
//! - `fig6` — marginally adiabatic storage cycle (g²N/γ² = 2.5, α = 625):
//!   a drive pulse exp[−((t−500)/200)²] decelerated by
//!   cotθ = 0.363(1 − (2/π)arccot[5(1 − ½tanh[0.005(t−2000)] +
//!   ½tanh[0.005(t−3200)])]), where non-adiabatic losses are visible and
//!   the Maxwell–Bloch and analytic propagators can be cross-checked.

use std::path::PathBuf;

use crate::config::{
    BoundsSpec, Injection, OutputSpec, PulseSpec, RunConfig, Scenario, SinglemodeSpec, SpectraSpec,
};
use crate::grid::Grid;
use crate::medium::MediumParams;
use crate::schedule::ControlSchedule;

pub const PRESET_NAMES: [&str; 4] = ["fig3", "fig4", "fig5", "fig6"];

fn output(dir: &str, stride: usize) -> OutputSpec {
    OutputSpec {
        dir: PathBuf::from(dir),
        snapshot_stride: stride,
        probe_planes: Vec::new(),
        weak_field_bound: 1.0,
    }
}

/// The fig3 stop-and-release schedule.
pub fn fig3_schedule() -> ControlSchedule {
    ControlSchedule::TanhRamps { a: 100.0, b: 0.5, c: 0.1, t1: 15.0, t2: 125.0 }
}

/// The fig6 deceleration/re-acceleration schedule.
pub fn fig6_schedule() -> ControlSchedule {
    ControlSchedule::ArccotTanh { a: 0.363, q: 5.0, c: 0.005, t1: 2000.0, t2: 3200.0 }
}

/// fig3 medium: deeply adiabatic (α = 10⁴ with g²N = 100 over L = 100).
pub fn fig3_medium() -> MediumParams {
    MediumParams::new(100.0, 1.0, 0.0, 100.0).unwrap()
}

/// fig6 medium: g²N/γ² = 2.5 over L = 250, so α = 625.
pub fn fig6_medium() -> MediumParams {
    MediumParams::new(2.5, 1.0, 0.0, 250.0).unwrap()
}

pub fn fig3_grid() -> Grid {
    Grid::with_auto_dt(-64.0, 192.0, 1024, 150.0).unwrap()
}

pub fn fig6_grid() -> Grid {
    // dt = 0.25 divides the standard snapshot times (600, 800, ...) exactly
    Grid::new(-176.0, 400.0, 1024, 0.25, 4200.0).unwrap()
}

/// Nominal spatial pulse length of the fig6 drive inside the medium,
/// L_p² = 2·z_max·γc/g²N = 200 (the marginal-adiabaticity point of the
/// preset: depth budget exactly 2 at z_max = 250).
pub fn fig6_pulse_length() -> f64 {
    200.0f64.sqrt()
}

pub fn preset(name: &str) -> Option<RunConfig> {
    match name {
        "fig3" => Some(RunConfig {
            scenario: Scenario::PropagatePolariton,
            output: output("out-fig3", 0),
            medium: Some(fig3_medium()),
            schedule: Some(fig3_schedule()),
            grid: Some(fig3_grid()),
            pulse: Some(PulseSpec::GaussianZ { center: 0.0, width: 10.0, amplitude: 1.0 }),
            spectra: None,
            singlemode: None,
            bounds: None,
        }),
        "fig4" => Some(RunConfig {
            scenario: Scenario::Spectra,
            output: output("out-fig4", 0),
            medium: Some(MediumParams::new(10.0, 1.0, 0.0, 2.0).unwrap()),
            schedule: None,
            grid: None,
            pulse: None,
            spectra: Some(SpectraSpec {
                delta_max: 2.0,
                n_delta: 401,
                depths: vec![2.0],
                vg_over_c: vec![0.02, 0.05, 0.1],
                omega_ab: 1e5,
                reflection_span: 4.0,
            }),
            singlemode: None,
            bounds: None,
        }),
        "fig5" => Some(RunConfig {
            scenario: Scenario::Spectra,
            output: output("out-fig5", 0),
            medium: Some(MediumParams::new(100.0, 1.0, 0.0, 100.0).unwrap()),
            schedule: None,
            grid: None,
            pulse: None,
            spectra: Some(SpectraSpec {
                delta_max: 0.5,
                n_delta: 201,
                depths: vec![100.0],
                // v_g/c = 0.01: reflection stays negligible within the
                // pulse band but becomes visible across the table span
                vg_over_c: vec![0.01],
                omega_ab: 1e5,
                reflection_span: 4.0,
            }),
            singlemode: None,
            bounds: None,
        }),
        "fig6" => {
            let mut out = output("out-fig6", 800);
            // the polariton amplitude jumps by sqrt(c/v_g0) ~ 3.3 at entry,
            // so the population proxy bound scales with c/v_g0
            out.weak_field_bound = 12.0;
            Some(RunConfig {
                scenario: Scenario::PropagateBoth,
                output: out,
                medium: Some(fig6_medium()),
                schedule: Some(fig6_schedule()),
                grid: Some(fig6_grid()),
                pulse: Some(PulseSpec::GaussianT {
                    t0: 500.0,
                    tau: 200.0,
                    amplitude: 1.0,
                    injection: Injection::InitialValue,
                    z_src: 0.0,
                }),
                spectra: None,
                singlemode: None,
                bounds: Some(BoundsSpec { alphas: vec![625.0, 1e4] }),
            })
        }
        _ => None,
    }
}

/// A ready-made singlemode sweep configuration (not a figure preset, but
/// handy as a template for the `singlemode` scenario).
pub fn singlemode_template() -> RunConfig {
    RunConfig {
        scenario: Scenario::Singlemode,
        output: output("out-singlemode", 0),
        medium: None,
        // one-way ramp: cot from ~50 to ~0 (the t2 term stays saturated)
        schedule: Some(ControlSchedule::TanhRamps {
            a: 50.0,
            b: 0.5,
            c: 12.0 / 200.0,
            t1: 100.0,
            t2: 1e15,
        }),
        grid: None,
        pulse: None,
        spectra: None,
        singlemode: Some(SinglemodeSpec {
            n_atoms: 4,
            n_max: 2,
            g: 1.0,
            photon_n: 1,
            durations: vec![25.0, 50.0, 100.0, 200.0],
        }),
        bounds: None,
    }
}
