//! Scenario execution and artifact emission.
//!
//! Every output file is plain CSV or JSON, prefixed with a header block
//! echoing the resolved configuration so artifacts are self-describing.
//! Runs are fully deterministic: identical configs produce byte-identical
//! files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, Injection, PulseSpec, RunConfig, Scenario};
use crate::field::{gaussian_envelope, PolaritonField};
use crate::grid::Grid;
use crate::mbsolver::{
    adiabatic_initial_state, analytic_series_for, centroid, compare_with_analytic,
    polariton_energy, solve_linear_mb, DeviationReport, PulseInput, SolverError, SolverOptions,
    Trajectory,
};
use crate::medium::MediumParams;
use crate::polariton::{
    adiabaticity_check, correction_coefficients, from_polariton, nonadiabatic_propagate,
    AdiabaticityReport, PolaritonError,
};
use crate::schedule::ControlSchedule;
use crate::singlemode::{adiabatic_transfer, SymmetricBasis};
use crate::spectra::{
    measured_transmission_width, reflection, storage_bounds, susceptibility, transmission,
    transparency_width, StorageBounds,
};
use crate::C_LIGHT;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Polariton(#[from] PolaritonError),
    #[error(transparent)]
    SingleMode(#[from] crate::singlemode::SingleModeError),
    #[error(transparent)]
    Spectra(#[from] crate::spectra::SpectraError),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    /// Exit-code contract: 2 validation, 4 wrap hazard, 3 any other
    /// numerical/runtime failure, 0 success.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver(SolverError::WrapHazard { .. }) => 4,
            RunError::Polariton(PolaritonError::DomainExit(_)) => 4,
            RunError::Solver(SolverError::Polariton(PolaritonError::DomainExit(_))) => 4,
            _ => 3,
        }
    }
}

/// Summary of a completed run, also written to `summary.json`.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub scenario: &'static str,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub propagation: Option<PropagationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectra: Option<SpectraSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singlemode: Option<SinglemodeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSummary>,
    pub resolved_config: serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct PropagationSummary {
    /// ∫|Ψ|²dz at the final snapshot over its initial value, per solver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mb_energy_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_energy_ratio: Option<f64>,
    /// Pulse-center displacement at the final snapshot (Maxwell–Bloch).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mb_displacement: Option<f64>,
    /// Ideal displacement c·∫cos²θ over the full run.
    pub ideal_displacement: f64,
    pub max_sbc_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationReport>,
    pub adiabaticity: AdiabaticityReport,
}

#[derive(Debug, Serialize)]
pub struct SpectraSummary {
    pub widths: Vec<WidthRow>,
}

#[derive(Debug, Serialize)]
pub struct WidthRow {
    pub vg_over_c: f64,
    pub omega_drive: f64,
    pub depth: f64,
    pub formula_width: f64,
    pub measured_full_width: f64,
    pub delay_time: f64,
}

#[derive(Debug, Serialize)]
pub struct SinglemodeSummary {
    pub rows: Vec<TransferRow>,
}

#[derive(Debug, Serialize, Clone)]
pub struct TransferRow {
    pub duration: f64,
    pub fidelity: f64,
    pub max_a_population: f64,
    pub norm_drift: f64,
}

#[derive(Debug, Serialize)]
pub struct BoundsSummary {
    pub rows: Vec<BoundsRow>,
}

#[derive(Debug, Serialize)]
pub struct BoundsRow {
    pub alpha: f64,
    pub max_delay_ratio: f64,
    pub max_length_ratio: f64,
    pub max_delay_time: Option<f64>,
    pub dephasing_unlimited: bool,
}

struct Artifacts {
    dir: PathBuf,
    header: String,
    files: Vec<String>,
}

impl Artifacts {
    fn new(config: &RunConfig) -> Result<Self, RunError> {
        fs::create_dir_all(&config.output.dir)?;
        let mut header = String::new();
        let echo = toml::to_string(&config).unwrap_or_else(|_| "<unserializable>".into());
        writeln!(header, "# slowlight run artifact").unwrap();
        writeln!(header, "# units: c = 1, rates in units of gamma").unwrap();
        for line in echo.lines() {
            writeln!(header, "# {line}").unwrap();
        }
        Ok(Artifacts { dir: config.output.dir.clone(), header, files: Vec::new() })
    }

    fn write_csv(&mut self, name: &str, columns: &str, rows: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path)?;
        f.write_all(self.header.as_bytes())?;
        writeln!(f, "{columns}")?;
        f.write_all(rows.as_bytes())?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

/// Initial polariton profile implied by the pulse spec.
fn initial_psi(
    pulse: &PulseSpec,
    schedule: &ControlSchedule,
    medium: &MediumParams,
    grid: &Grid,
) -> Result<Vec<Complex64>, RunError> {
    match pulse {
        PulseSpec::GaussianZ { center, width, amplitude } => {
            Ok(gaussian_envelope(grid, *center, *width, *amplitude))
        }
        PulseSpec::GaussianT { t0, tau, amplitude, .. } => {
            let sample = crate::schedule::eval_schedule(schedule, medium, 0.0)
                .map_err(PolaritonError::Schedule)?;
            let vg0 = sample.v_g;
            let center = -vg0 * t0;
            let width = vg0 * tau;
            let amp = amplitude * (C_LIGHT / vg0).sqrt();
            Ok(gaussian_envelope(grid, center, width, amp))
        }
    }
}

/// Maxwell–Bloch needs dt below the dressed atomic frequency; tighten the
/// grid's dt if the advection-only choice is too coarse. Keeps t_final an
/// exact multiple of dt.
fn mb_ready_grid(
    grid: &Grid,
    medium: &MediumParams,
    schedule: &ControlSchedule,
) -> Result<Grid, RunError> {
    let omega_max = schedule.omega_max(medium.g_root_n(), 0.0, grid.t_final);
    let dressed = (medium.g2n + omega_max * omega_max).sqrt() + medium.gamma_ba;
    let bound = 1.4 / dressed;
    if grid.dt <= bound {
        return Ok(*grid);
    }
    let steps = (grid.t_final / bound).ceil();
    let dt = grid.t_final / steps;
    Ok(Grid::new(grid.z_min, grid.z_max, grid.nz, dt, grid.t_final)
        .map_err(SolverError::Grid)?)
}

fn mb_pulse_input(
    pulse: &PulseSpec,
    schedule: &ControlSchedule,
    medium: &MediumParams,
    grid: &Grid,
) -> Result<PulseInput, RunError> {
    match pulse {
        PulseSpec::GaussianT { t0, tau, amplitude, injection: Injection::Source, z_src } => {
            Ok(PulseInput::BoundaryDrive { t0: *t0, tau: *tau, amplitude: *amplitude, z_src: *z_src })
        }
        _ => {
            let psi0 = initial_psi(pulse, schedule, medium, grid)?;
            Ok(PulseInput::State(adiabatic_initial_state(&psi0, schedule, medium, grid, 0.0)?))
        }
    }
}

fn pulse_length_estimate(pulse: &PulseSpec, schedule: &ControlSchedule, medium: &MediumParams) -> f64 {
    match pulse {
        PulseSpec::GaussianZ { width, .. } => *width,
        PulseSpec::GaussianT { tau, .. } => {
            let vg0 = crate::schedule::eval_schedule(schedule, medium, 0.0)
                .map(|s| s.v_g)
                .unwrap_or(C_LIGHT);
            vg0 * tau
        }
    }
}

fn write_mb_snapshots(art: &mut Artifacts, traj: &Trajectory) -> Result<(), RunError> {
    for (i, snap) in traj.snapshots.iter().enumerate() {
        let mut rows = String::new();
        writeln!(rows, "# t = {}", fmt_f(snap.t)).unwrap();
        for j in 0..traj.grid.nz {
            writeln!(
                rows,
                "{},{},{},{},{},{},{}",
                fmt_f(traj.grid.z(j)),
                fmt_f(snap.e[j].re),
                fmt_f(snap.e[j].im),
                fmt_f(snap.sba[j].re),
                fmt_f(snap.sba[j].im),
                fmt_f(snap.sbc[j].re),
                fmt_f(snap.sbc[j].im),
            )
            .unwrap();
        }
        art.write_csv(
            &format!("mb_{i:04}.csv"),
            "z,re_e,im_e,re_sba,im_sba,re_sbc,im_sbc",
            &rows,
        )?;
    }
    for probe in &traj.probes {
        let mut rows = String::new();
        for (n, v) in probe.values.iter().enumerate() {
            writeln!(rows, "{},{},{}", fmt_f(n as f64 * probe.dt), fmt_f(v.re), fmt_f(v.im))
                .unwrap();
        }
        art.write_csv(&format!("probe_z{}.csv", probe.z), "t,re_e,im_e", &rows)?;
    }
    Ok(())
}

fn write_polariton_snapshots(
    art: &mut Artifacts,
    fields: &[PolaritonField],
    schedule: &ControlSchedule,
    medium: &MediumParams,
    grid: &Grid,
    prefix: &str,
) -> Result<(), RunError> {
    for (i, ps) in fields.iter().enumerate() {
        let theta = schedule
            .theta(medium.g_root_n(), ps.t)
            .map_err(PolaritonError::Schedule)?;
        let fs = from_polariton(ps, theta, medium, grid, true)?;
        let mut rows = String::new();
        writeln!(rows, "# t = {}", fmt_f(ps.t)).unwrap();
        for j in 0..grid.nz {
            writeln!(
                rows,
                "{},{},{},{},{},{}",
                fmt_f(grid.z(j)),
                fmt_f(ps.psi[j].re),
                fmt_f(ps.psi[j].im),
                fmt_f(fs.e[j].re),
                fmt_f(fs.e[j].im),
                fmt_f(fs.sbc[j].norm()),
            )
            .unwrap();
        }
        art.write_csv(
            &format!("{prefix}_{i:04}.csv"),
            "z,re_psi,im_psi,re_e,im_e,abs_sbc",
            &rows,
        )?;
    }
    Ok(())
}

fn snapshot_times(grid: &Grid, stride: usize) -> Vec<f64> {
    let n_steps = grid.n_steps();
    let dt = grid.t_final / n_steps as f64;
    let mut times = vec![0.0];
    if stride > 0 {
        let mut step = stride;
        while step < n_steps {
            times.push(step as f64 * dt);
            step += stride;
        }
    }
    times.push(grid.t_final);
    times
}

fn run_propagation(
    config: &RunConfig,
    art: &mut Artifacts,
    warnings: &mut Vec<String>,
) -> Result<PropagationSummary, RunError> {
    let medium = config.medium();
    let schedule = config.schedule();
    let grid = config.grid();
    let pulse = config.pulse();

    let want_mb = matches!(config.scenario, Scenario::PropagateMb | Scenario::PropagateBoth);
    let want_analytic = matches!(
        config.scenario,
        Scenario::PropagatePolariton | Scenario::PropagateBoth
    );

    let pulse_length = pulse_length_estimate(pulse, schedule, medium);
    let ideal_displacement = crate::polariton::displacement(schedule, medium, grid.t_final)?;
    let adiabaticity =
        adiabaticity_check(schedule, medium, grid, pulse_length, ideal_displacement.max(1e-12))?;

    // coefficients dump on a uniform grid
    {
        let n = 512;
        let times: Vec<f64> = (0..=n).map(|i| grid.t_final * i as f64 / n as f64).collect();
        let coeffs = correction_coefficients(schedule, medium, &times)
            .map_err(PolaritonError::Schedule)?;
        let mut rows = String::new();
        for (i, &t) in coeffs.times.iter().enumerate() {
            writeln!(
                rows,
                "{},{},{},{},{}",
                fmt_f(t),
                fmt_f(coeffs.a[i]),
                fmt_f(coeffs.b[i]),
                fmt_f(coeffs.c[i]),
                fmt_f(coeffs.d[i]),
            )
            .unwrap();
        }
        art.write_csv("coefficients.csv", "t,a,b,c,d", &rows)?;
    }

    let mut summary = PropagationSummary {
        mb_energy_ratio: None,
        analytic_energy_ratio: None,
        mb_displacement: None,
        ideal_displacement,
        max_sbc_sq: None,
        deviation: None,
        adiabaticity,
    };

    let mut traj: Option<Trajectory> = None;
    if want_mb {
        let mb_grid = mb_ready_grid(grid, medium, schedule)?;
        // keep the configured stride aligned to wall-clock intervals when
        // dt was tightened
        let stride = if config.output.snapshot_stride == 0 {
            0
        } else {
            let want_dt = grid.dt * config.output.snapshot_stride as f64;
            (want_dt / mb_grid.dt).round().max(1.0) as usize
        };
        let options = SolverOptions {
            snapshot_stride: stride,
            probe_planes: config.output.probe_planes.clone(),
            weak_field_bound: config.output.weak_field_bound,
        };
        let input = mb_pulse_input(pulse, schedule, medium, &mb_grid)?;
        let t = solve_linear_mb(input, medium, schedule, &mb_grid, &options)?;
        warnings.extend(t.warnings.iter().cloned());
        write_mb_snapshots(art, &t)?;
        let first = t.polariton_snapshot(0)?;
        let last = t.polariton_snapshot(t.snapshots.len() - 1)?;
        let e0 = polariton_energy(&first, &t.grid);
        if e0 > 0.0 {
            summary.mb_energy_ratio = Some(polariton_energy(&last, &t.grid) / e0);
            summary.mb_displacement = Some(centroid(&last, &t.grid) - centroid(&first, &t.grid));
        }
        summary.max_sbc_sq = Some(t.max_sbc_sq);
        traj = Some(t);
    }

    if want_analytic {
        let fields: Vec<PolaritonField> = match &traj {
            Some(t) => analytic_series_for(t)?,
            None => {
                let psi0 = initial_psi(pulse, schedule, medium, grid)?;
                let mut fields = Vec::new();
                for t in snapshot_times(grid, config.output.snapshot_stride) {
                    fields.push(nonadiabatic_propagate(&psi0, schedule, medium, grid, t)?);
                }
                fields
            }
        };
        let g = traj.as_ref().map(|t| t.grid).unwrap_or(*grid);
        write_polariton_snapshots(art, &fields, schedule, medium, &g, "pol")?;
        let e0 = polariton_energy(&fields[0], &g);
        if e0 > 0.0 {
            summary.analytic_energy_ratio =
                Some(polariton_energy(fields.last().unwrap(), &g) / e0);
        }
        if let Some(t) = &traj {
            summary.deviation = Some(compare_with_analytic(t, &fields)?);
        }
    }

    Ok(summary)
}

fn run_spectra(config: &RunConfig, art: &mut Artifacts) -> Result<SpectraSummary, RunError> {
    let medium = config.medium();
    let spec = config.spectra.as_ref().expect("validated");
    let mut widths = Vec::new();
    for &vg in &spec.vg_over_c {
        // v_g/c = 1/(1+n_g) -> n_g = c/v_g - 1, Omega^2 = g2n/n_g
        let ng = 1.0 / vg - 1.0;
        let omega_drive = (medium.g2n / ng).sqrt();
        for &depth in &spec.depths {
            let mut rows = String::new();
            for i in 0..spec.n_delta {
                let delta = -spec.delta_max
                    + 2.0 * spec.delta_max * i as f64 / (spec.n_delta - 1) as f64;
                let chi = susceptibility(delta, medium, omega_drive, 1.0)
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                let tr = transmission(delta, depth, medium, omega_drive, 1.0)
                    .map(|t| (t.exact, t.gaussian))
                    .unwrap_or((f64::NAN, f64::NAN));
                writeln!(
                    rows,
                    "{},{},{},{},{}",
                    fmt_f(delta),
                    fmt_f(chi.re),
                    fmt_f(chi.im),
                    fmt_f(tr.0),
                    fmt_f(tr.1),
                )
                .unwrap();
            }
            art.write_csv(
                &format!("chi_vg{vg}_z{depth}.csv"),
                "delta,re_chi,im_chi,t_exact,t_gauss",
                &rows,
            )?;
            let tw = transparency_width(medium, omega_drive, depth);
            widths.push(WidthRow {
                vg_over_c: vg,
                omega_drive,
                depth,
                formula_width: tw.width,
                measured_full_width: measured_transmission_width(medium, omega_drive, depth)?,
                delay_time: tw.delay_time,
            });
        }

        // reflection table around the carrier
        let omega_ab = spec.omega_ab;
        let span = spec.reflection_span * vg * omega_ab;
        let mut rows = String::new();
        for i in 0..spec.n_delta {
            let dw = -span + 2.0 * span * i as f64 / (spec.n_delta - 1) as f64;
            match reflection(omega_ab + dw, vg * C_LIGHT, omega_ab) {
                Ok(r) => writeln!(
                    rows,
                    "{},{},{}",
                    fmt_f(dw),
                    fmt_f(r.exact),
                    fmt_f(r.near_resonance)
                )
                .unwrap(),
                Err(_) => writeln!(rows, "{},nan,nan", fmt_f(dw)).unwrap(),
            }
        }
        art.write_csv(&format!("reflection_vg{vg}.csv"), "delta_omega,r_exact,r_near", &rows)?;
    }
    Ok(SpectraSummary { widths })
}

fn run_singlemode(config: &RunConfig, art: &mut Artifacts) -> Result<SinglemodeSummary, RunError> {
    let spec = config.singlemode.as_ref().expect("validated");
    let schedule = config.schedule();
    let basis = SymmetricBasis::new(spec.n_atoms, spec.n_max);
    let n_ph = spec.n_max + 1;
    let mut rho = ndarray::Array2::<Complex64>::zeros((n_ph, n_ph));
    rho[[spec.photon_n, spec.photon_n]] = Complex64::new(1.0, 0.0);

    let mut rows_csv = String::new();
    let mut rows = Vec::new();
    for &duration in &spec.durations {
        // rescale the ramp to the requested duration
        let ramp = scale_ramp(schedule, duration);
        let out = adiabatic_transfer(&rho, &ramp, &basis, spec.g, duration)?;
        writeln!(
            rows_csv,
            "{},{},{}",
            fmt_f(duration),
            fmt_f(out.fidelity),
            fmt_f(out.max_a_population)
        )
        .unwrap();
        rows.push(TransferRow {
            duration,
            fidelity: out.fidelity,
            max_a_population: out.max_a_population,
            norm_drift: out.norm_drift,
        });
    }
    art.write_csv("transfer.csv", "duration,fidelity,max_a_population", &rows_csv)?;
    Ok(SinglemodeSummary { rows })
}

/// Stretch a parametric ramp onto [0, duration] (tabulated ramps are used
/// as-is and must cover the duration).
fn scale_ramp(schedule: &ControlSchedule, duration: f64) -> ControlSchedule {
    match schedule {
        ControlSchedule::TanhRamps { a, b, .. } => ControlSchedule::TanhRamps {
            a: *a,
            b: *b,
            c: 12.0 / duration,
            t1: duration / 2.0,
            t2: 1e15,
        },
        other => other.clone(),
    }
}

fn run_bounds(config: &RunConfig) -> Result<BoundsSummary, RunError> {
    let medium = config.medium();
    let mut alphas = vec![medium.alpha()];
    if let Some(b) = &config.bounds {
        alphas.extend(b.alphas.iter().copied());
    }
    let rows = alphas
        .into_iter()
        .map(|alpha| {
            let StorageBounds { max_delay_ratio, max_length_ratio, max_delay_time } =
                storage_bounds(alpha, medium.gamma0);
            BoundsRow {
                alpha,
                max_delay_ratio,
                max_length_ratio,
                max_delay_time,
                dephasing_unlimited: max_delay_time.is_none(),
            }
        })
        .collect();
    Ok(BoundsSummary { rows })
}

/// Execute a validated configuration, writing all artifacts under
/// `config.output.dir`. Deterministic: no clocks, no randomness.
pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    let mut art = Artifacts::new(config)?;
    let mut summary = RunSummary {
        scenario: config.scenario.name(),
        files: Vec::new(),
        warnings: Vec::new(),
        propagation: None,
        spectra: None,
        singlemode: None,
        bounds: None,
        resolved_config: serde_json::to_value(config)?,
    };

    match config.scenario {
        Scenario::PropagateMb | Scenario::PropagatePolariton | Scenario::PropagateBoth => {
            let mut warnings = Vec::new();
            let prop = run_propagation(config, &mut art, &mut warnings)?;
            summary.warnings = warnings;
            summary.propagation = Some(prop);
        }
        Scenario::Spectra => {
            summary.spectra = Some(run_spectra(config, &mut art)?);
        }
        Scenario::Singlemode => {
            summary.singlemode = Some(run_singlemode(config, &mut art)?);
        }
        Scenario::Bounds => {
            summary.bounds = Some(run_bounds(config)?);
        }
    }

    summary.files = art.files.clone();
    summary.files.push("summary.json".into());

    let path = art.dir.join("summary.json");
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    f.write_all(b"\n")?;
    Ok(summary)
}

/// Convenience: load, validate and run a config file.
pub fn run_config_file(path: &Path, out_override: Option<PathBuf>) -> Result<RunSummary, RunError> {
    let raw = crate::config::RawConfig::from_file(path)?;
    let config = raw.validate(out_override)?;
    run(&config)
}
