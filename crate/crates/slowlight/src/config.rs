//! Run configuration: a documented key–value (TOML) grammar covering the
//! medium, the control schedule, the grid, the initial pulse and the
//! output layout. Validation is collected, not fail-fast: a config with
//! several missing keys reports all of them at once, each by name.
//!
//! All physical quantities are in γ = 1, c = 1 units.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Grid;
use crate::medium::MediumParams;
use crate::schedule::{ControlSchedule, TabulatedSchedule};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration invalid:\n{}", .0.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<String>),
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config file: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Singlemode,
    PropagateMb,
    PropagatePolariton,
    PropagateBoth,
    Spectra,
    Bounds,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Singlemode => "singlemode",
            Scenario::PropagateMb => "propagate-mb",
            Scenario::PropagatePolariton => "propagate-polariton",
            Scenario::PropagateBoth => "propagate-both",
            Scenario::Spectra => "spectra",
            Scenario::Bounds => "bounds",
        }
    }
}

/// Initial pulse description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PulseSpec {
    /// Spatial envelope amplitude·exp{−((z−center)/width)²} of the dark
    /// polariton at t = 0, already inside the medium.
    GaussianZ { center: f64, width: f64, amplitude: f64 },
    /// Temporal drive amplitude·exp{−((t−t0)/tau)²} at the entrance plane.
    ///
    /// `injection = "initial-value"` (default) realizes the drive as its
    /// ideal in-medium image at t = 0: a polariton of amplitude
    /// amplitude·√(c/v_g⁰) centered at z = −v_g⁰·t0 with width v_g⁰·tau
    /// (entrance jump plus spatial compression). `injection = "source"`
    /// injects through a thin source layer at `z_src` instead (only the
    /// Maxwell–Bloch solver supports this).
    GaussianT {
        t0: f64,
        tau: f64,
        amplitude: f64,
        injection: Injection,
        z_src: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Injection {
    #[default]
    InitialValue,
    Source,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputSpec {
    pub dir: std::path::PathBuf,
    /// Steps between snapshots; 0 keeps only the first and last.
    pub snapshot_stride: usize,
    pub probe_planes: Vec<f64>,
    pub weak_field_bound: f64,
}

/// δ-grid and parameter family for the spectra scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectraSpec {
    pub delta_max: f64,
    pub n_delta: usize,
    /// Depths (z) at which transmission curves are evaluated.
    pub depths: Vec<f64>,
    /// Group-velocity family v_g/c; each value fixes a drive strength.
    pub vg_over_c: Vec<f64>,
    /// Optical carrier in γ units; enters only n(ω) and R(ω).
    pub omega_ab: f64,
    /// Half-span of the reflection table in units of (v_g⁰/c)·ω_ab.
    pub reflection_span: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SinglemodeSpec {
    pub n_atoms: usize,
    pub n_max: usize,
    pub g: f64,
    /// Input Fock state |n⟩ to store.
    pub photon_n: usize,
    /// Ramp durations to sweep (CSV row per duration).
    pub durations: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsSpec {
    /// Opacities to tabulate in addition to the medium's own α.
    pub alphas: Vec<f64>,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub output: OutputSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ControlSchedule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectra: Option<SpectraSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singlemode: Option<SinglemodeSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSpec>,
}

impl RunConfig {
    pub fn medium(&self) -> &MediumParams {
        self.medium.as_ref().expect("validated")
    }
    pub fn schedule(&self) -> &ControlSchedule {
        self.schedule.as_ref().expect("validated")
    }
    pub fn grid(&self) -> &Grid {
        self.grid.as_ref().expect("validated")
    }
    pub fn pulse(&self) -> &PulseSpec {
        self.pulse.as_ref().expect("validated")
    }
}

// ---------------------------------------------------------------------------
// Raw (pre-validation) form: everything optional so every missing key can
// be reported in one pass.

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: Option<String>,
    pub medium: Option<RawMedium>,
    pub schedule: Option<toml::Value>,
    pub grid: Option<RawGrid>,
    pub pulse: Option<RawPulse>,
    pub output: Option<RawOutput>,
    pub spectra: Option<RawSpectra>,
    pub singlemode: Option<RawSinglemode>,
    pub bounds: Option<RawBounds>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMedium {
    pub g2n: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_ba: Option<f64>,
    pub gamma0: Option<f64>,
    pub length: Option<f64>,
    pub delta_k: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub nz: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPulse {
    pub kind: Option<String>,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub t0: Option<f64>,
    pub tau: Option<f64>,
    pub amplitude: Option<f64>,
    pub injection: Option<String>,
    pub z_src: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    pub dir: Option<std::path::PathBuf>,
    pub snapshot_stride: Option<usize>,
    pub probe_planes: Option<Vec<f64>>,
    pub weak_field_bound: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpectra {
    pub delta_max: Option<f64>,
    pub n_delta: Option<usize>,
    pub depths: Option<Vec<f64>>,
    pub vg_over_c: Option<Vec<f64>>,
    pub omega_ab: Option<f64>,
    pub reflection_span: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSinglemode {
    pub n_atoms: Option<usize>,
    pub n_max: Option<usize>,
    pub g: Option<f64>,
    pub photon_n: Option<usize>,
    pub durations: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBounds {
    pub alphas: Option<Vec<f64>>,
}

impl RawConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Validate into a [`RunConfig`], collecting every missing or invalid
    /// key. `out_override` substitutes for `output.dir` when given (the
    /// CLI `--out` flag).
    pub fn validate(
        &self,
        out_override: Option<std::path::PathBuf>,
    ) -> Result<RunConfig, ConfigError> {
        let mut errors: Vec<String> = Vec::new();

        let scenario = match self.scenario.as_deref() {
            None => {
                errors.push(
                    "missing key: scenario (one of singlemode, propagate-mb, \
                     propagate-polariton, propagate-both, spectra, bounds)"
                        .into(),
                );
                None
            }
            Some(s) => match s {
                "singlemode" => Some(Scenario::Singlemode),
                "propagate-mb" => Some(Scenario::PropagateMb),
                "propagate-polariton" => Some(Scenario::PropagatePolariton),
                "propagate-both" => Some(Scenario::PropagateBoth),
                "spectra" => Some(Scenario::Spectra),
                "bounds" => Some(Scenario::Bounds),
                other => {
                    errors.push(format!("invalid key: scenario = \"{other}\" is not a scenario"));
                    None
                }
            },
        };

        // output.dir is required for every scenario
        let raw_out = self.output.clone().unwrap_or_default();
        let dir = out_override.or(raw_out.dir.clone());
        if dir.is_none() {
            errors.push("missing key: output.dir (or pass --out)".into());
        }
        let output = OutputSpec {
            dir: dir.unwrap_or_default(),
            snapshot_stride: raw_out.snapshot_stride.unwrap_or(0),
            probe_planes: raw_out.probe_planes.clone().unwrap_or_default(),
            weak_field_bound: raw_out.weak_field_bound.unwrap_or(1.0),
        };

        let needs_medium = matches!(
            scenario,
            Some(
                Scenario::PropagateMb
                    | Scenario::PropagatePolariton
                    | Scenario::PropagateBoth
                    | Scenario::Spectra
                    | Scenario::Bounds
            )
        );
        let needs_propagation = matches!(
            scenario,
            Some(Scenario::PropagateMb | Scenario::PropagatePolariton | Scenario::PropagateBoth)
        );

        let medium = if needs_medium {
            self.validate_medium(&mut errors)
        } else {
            None
        };
        let schedule = if needs_propagation || scenario == Some(Scenario::Singlemode) {
            self.validate_schedule(&mut errors)
        } else {
            None
        };
        let grid = if needs_propagation { self.validate_grid(&mut errors) } else { None };
        let pulse = if needs_propagation {
            self.validate_pulse(scenario, &mut errors)
        } else {
            None
        };
        let spectra = if scenario == Some(Scenario::Spectra) {
            self.validate_spectra(&mut errors)
        } else {
            None
        };
        let singlemode = if scenario == Some(Scenario::Singlemode) {
            self.validate_singlemode(&mut errors)
        } else {
            None
        };
        let bounds = self
            .bounds
            .as_ref()
            .map(|b| BoundsSpec { alphas: b.alphas.clone().unwrap_or_default() });

        if !errors.is_empty() {
            return Err(ConfigError::Invalid(errors));
        }
        Ok(RunConfig {
            scenario: scenario.unwrap(),
            output,
            medium,
            schedule,
            grid,
            pulse,
            spectra,
            singlemode,
            bounds,
        })
    }

    fn validate_medium(&self, errors: &mut Vec<String>) -> Option<MediumParams> {
        let Some(m) = &self.medium else {
            errors.push("missing table: [medium]".into());
            return None;
        };
        let mut missing = Vec::new();
        if m.g2n.is_none() {
            missing.push("medium.g2n");
        }
        if m.length.is_none() {
            missing.push("medium.length");
        }
        for key in &missing {
            errors.push(format!("missing key: {key}"));
        }
        if !missing.is_empty() {
            return None;
        }
        let gamma = m.gamma.unwrap_or(1.0);
        let medium = MediumParams {
            g2n: m.g2n.unwrap(),
            gamma,
            gamma_ba: m.gamma_ba.unwrap_or(gamma),
            gamma0: m.gamma0.unwrap_or(0.0),
            length: m.length.unwrap(),
            delta_k: m.delta_k.unwrap_or(0.0),
        };
        match medium.validate() {
            Ok(()) => Some(medium),
            Err(e) => {
                errors.push(format!("invalid [medium]: {e}"));
                None
            }
        }
    }

    fn validate_schedule(&self, errors: &mut Vec<String>) -> Option<ControlSchedule> {
        let Some(value) = &self.schedule else {
            errors.push("missing table: [schedule]".into());
            return None;
        };
        match ControlSchedule::deserialize(value.clone()) {
            Ok(ControlSchedule::Tabulated(t)) => {
                // rebuild so the interpolation slopes exist and the table invariants hold
                match TabulatedSchedule::new(t.t, t.cot_theta) {
                    Ok(t) => Some(ControlSchedule::Tabulated(t)),
                    Err(e) => {
                        errors.push(format!("invalid [schedule]: {e}"));
                        None
                    }
                }
            }
            Ok(s) => Some(s),
            Err(e) => {
                errors.push(format!("invalid [schedule]: {e}"));
                None
            }
        }
    }

    fn validate_grid(&self, errors: &mut Vec<String>) -> Option<Grid> {
        let Some(g) = &self.grid else {
            errors.push("missing table: [grid]".into());
            return None;
        };
        let mut missing = Vec::new();
        if g.z_min.is_none() {
            missing.push("grid.z_min");
        }
        if g.z_max.is_none() {
            missing.push("grid.z_max");
        }
        if g.nz.is_none() {
            missing.push("grid.nz");
        }
        if g.t_final.is_none() {
            missing.push("grid.t_final");
        }
        for key in &missing {
            errors.push(format!("missing key: {key}"));
        }
        if !missing.is_empty() {
            return None;
        }
        let built = match g.dt {
            Some(dt) => Grid::new(g.z_min.unwrap(), g.z_max.unwrap(), g.nz.unwrap(), dt, g.t_final.unwrap()),
            None => Grid::with_auto_dt(g.z_min.unwrap(), g.z_max.unwrap(), g.nz.unwrap(), g.t_final.unwrap()),
        };
        match built {
            Ok(grid) => Some(grid),
            Err(e) => {
                errors.push(format!("invalid [grid]: {e}"));
                None
            }
        }
    }

    fn validate_pulse(
        &self,
        scenario: Option<Scenario>,
        errors: &mut Vec<String>,
    ) -> Option<PulseSpec> {
        let Some(p) = &self.pulse else {
            errors.push("missing table: [pulse]".into());
            return None;
        };
        let amplitude = p.amplitude.unwrap_or(1.0);
        match p.kind.as_deref() {
            None => {
                errors.push("missing key: pulse.kind (gaussian-z or gaussian-t)".into());
                None
            }
            Some("gaussian-z") => {
                let mut missing = Vec::new();
                if p.center.is_none() {
                    missing.push("pulse.center");
                }
                if p.width.is_none() {
                    missing.push("pulse.width");
                }
                for key in &missing {
                    errors.push(format!("missing key: {key}"));
                }
                if !missing.is_empty() {
                    return None;
                }
                Some(PulseSpec::GaussianZ {
                    center: p.center.unwrap(),
                    width: p.width.unwrap(),
                    amplitude,
                })
            }
            Some("gaussian-t") => {
                let mut missing = Vec::new();
                if p.t0.is_none() {
                    missing.push("pulse.t0");
                }
                if p.tau.is_none() {
                    missing.push("pulse.tau");
                }
                for key in &missing {
                    errors.push(format!("missing key: {key}"));
                }
                if !missing.is_empty() {
                    return None;
                }
                let injection = match p.injection.as_deref() {
                    None | Some("initial-value") => Injection::InitialValue,
                    Some("source") => Injection::Source,
                    Some(other) => {
                        errors.push(format!(
                            "invalid key: pulse.injection = \"{other}\" (initial-value or source)"
                        ));
                        Injection::InitialValue
                    }
                };
                if injection == Injection::Source
                    && !matches!(scenario, Some(Scenario::PropagateMb))
                {
                    errors.push(
                        "invalid key: pulse.injection = \"source\" requires scenario = \
                         \"propagate-mb\" (the analytic propagator has no source term)"
                            .into(),
                    );
                }
                Some(PulseSpec::GaussianT {
                    t0: p.t0.unwrap(),
                    tau: p.tau.unwrap(),
                    amplitude,
                    injection,
                    z_src: p.z_src.unwrap_or(0.0),
                })
            }
            Some(other) => {
                errors.push(format!("invalid key: pulse.kind = \"{other}\""));
                None
            }
        }
    }

    fn validate_spectra(&self, errors: &mut Vec<String>) -> Option<SpectraSpec> {
        let Some(s) = &self.spectra else {
            errors.push("missing table: [spectra]".into());
            return None;
        };
        let mut missing = Vec::new();
        if s.delta_max.is_none() {
            missing.push("spectra.delta_max");
        }
        if s.vg_over_c.is_none() {
            missing.push("spectra.vg_over_c");
        }
        if s.depths.is_none() {
            missing.push("spectra.depths");
        }
        for key in &missing {
            errors.push(format!("missing key: {key}"));
        }
        if !missing.is_empty() {
            return None;
        }
        Some(SpectraSpec {
            delta_max: s.delta_max.unwrap(),
            n_delta: s.n_delta.unwrap_or(401),
            depths: s.depths.clone().unwrap(),
            vg_over_c: s.vg_over_c.clone().unwrap(),
            omega_ab: s.omega_ab.unwrap_or(1e5),
            reflection_span: s.reflection_span.unwrap_or(4.0),
        })
    }

    fn validate_singlemode(&self, errors: &mut Vec<String>) -> Option<SinglemodeSpec> {
        let Some(s) = &self.singlemode else {
            errors.push("missing table: [singlemode]".into());
            return None;
        };
        let mut missing = Vec::new();
        if s.n_atoms.is_none() {
            missing.push("singlemode.n_atoms");
        }
        if s.durations.is_none() {
            missing.push("singlemode.durations");
        }
        for key in &missing {
            errors.push(format!("missing key: {key}"));
        }
        if !missing.is_empty() {
            return None;
        }
        let spec = SinglemodeSpec {
            n_atoms: s.n_atoms.unwrap(),
            n_max: s.n_max.unwrap_or(2),
            g: s.g.unwrap_or(1.0),
            photon_n: s.photon_n.unwrap_or(1),
            durations: s.durations.clone().unwrap(),
        };
        if spec.photon_n > spec.n_max {
            errors.push("invalid key: singlemode.photon_n exceeds n_max".into());
            return None;
        }
        Some(spec)
    }
}
