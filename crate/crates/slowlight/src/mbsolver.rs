//! Direct integration of the linearized 1-D Maxwell–Bloch system.
//!
//! In the weak-probe limit (all population in |b⟩, Langevin noise dropped)
//! the probe envelope and the √N-scaled coherences obey
//!
//!   ∂t𝓔  = −c∂z𝓔 + i·g√N·S_a (+ source)
//!   ∂tS_a = −γ_ba·S_a + i·g√N·𝓔 + iΩ(t)·e^{iΔkz}·S_c
//!   ∂tS_c = −γ₀·S_c  + iΩ(t)·e^{−iΔkz}·S_a
//!
//! Method of lines: the spatial derivative of 𝓔 is spectral on the
//! periodic grid (dispersionless advection to machine precision), the
//! atomic equations are pointwise, and time stepping is fourth-order
//! Runge–Kutta. The periodic wrap is guarded, not prevented: a pulse
//! reaching the domain edge aborts the run.

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{FieldState, PolaritonField};
use crate::fourier;
use crate::grid::{Grid, GridError};
use crate::medium::MediumParams;
use crate::polariton::{nonadiabatic_propagate, to_polariton, PolaritonError};
use crate::schedule::{ControlSchedule, ScheduleError};
use crate::C_LIGHT;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Polariton(#[from] PolaritonError),
    #[error(transparent)]
    Medium(#[from] crate::medium::MediumError),
    #[error(
        "time step {dt} too large for the atomic frequencies \
         (need dt <= {bound:.3e} for max dressed frequency {omega_max:.3e})"
    )]
    StabilityBound { dt: f64, bound: f64, omega_max: f64 },
    #[error("pulse reached within 5 grid points of the domain edge at t = {t} (wrap hazard)")]
    WrapHazard { t: f64 },
    #[error("non-finite field values at t = {t}")]
    NumericalFailure { t: f64 },
    #[error("initial state does not match the grid")]
    GridMismatch,
    #[error("snapshot grids or times do not match: {0}")]
    CompareMismatch(String),
}

/// How the probe pulse enters the simulation.
#[derive(Debug, Clone)]
pub enum PulseInput {
    /// A complete field state at t = 0, already inside the medium.
    State(FieldState),
    /// A temporal boundary drive 𝓔(z_src, t) = amplitude·exp[−((t−t0)/tau)²]
    /// injected through a thin source layer around `z_src`.
    ///
    /// The source term is c·f(t)·g(z) with ∫g dz = 1, which reproduces the
    /// drive amplitude just downstream of the layer; everything left of the
    /// layer stays dark because the advection is one-directional.
    BoundaryDrive { t0: f64, tau: f64, amplitude: f64, z_src: f64 },
}

/// Solver knobs beyond the physics parameters.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Record a snapshot every this many steps (0 = only first and last).
    pub snapshot_stride: usize,
    /// Record the probe envelope time series at these z positions.
    pub probe_planes: Vec<f64>,
    /// Weak-field bound for the |sbc|² population proxy; exceeding it only
    /// sets a warning, since the linearized equations stay valid for the
    /// rescaled fields.
    pub weak_field_bound: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { snapshot_stride: 0, probe_planes: Vec::new(), weak_field_bound: 1.0 }
    }
}

/// Probe-envelope time series at a fixed plane, one sample per step.
#[derive(Debug, Clone)]
pub struct ProbeSeries {
    pub z: f64,
    pub dt: f64,
    pub values: Vec<Complex64>,
}

/// Result of a Maxwell–Bloch run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub medium: MediumParams,
    pub schedule: ControlSchedule,
    pub snapshots: Vec<FieldState>,
    pub probes: Vec<ProbeSeries>,
    /// Largest |sbc|² seen anywhere during the run.
    pub max_sbc_sq: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    /// Polariton fields for snapshot `idx`, using θ at the snapshot time.
    pub fn polariton_snapshot(&self, idx: usize) -> Result<PolaritonField, SolverError> {
        let fs = &self.snapshots[idx];
        let theta = self.schedule.theta(self.medium.g_root_n(), fs.t)?;
        Ok(to_polariton(fs, theta, &self.medium, &self.grid)?)
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    /// Index of the snapshot closest to time t.
    pub fn nearest_snapshot(&self, t: f64) -> usize {
        self.snapshots
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (a.t - t).abs().partial_cmp(&(b.t - t).abs()).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap()
    }
}

/// Build a field state on the adiabatic (dark) manifold from a polariton
/// envelope: 𝓔 = cosθ·Ψ, √Nσ_bc = −sinθ·Ψ·e^{−iΔkz}, with the
/// first-order optical coherence S_a = −(i/Ω)(∂t + γ₀)(√Nσ̃_bc) seeded
/// from the transport estimate ∂t ≈ −v_g∂z.
pub fn adiabatic_initial_state(
    psi0: &[Complex64],
    schedule: &ControlSchedule,
    medium: &MediumParams,
    grid: &Grid,
    t0: f64,
) -> Result<FieldState, SolverError> {
    if psi0.len() != grid.nz {
        return Err(SolverError::GridMismatch);
    }
    let grn = medium.g_root_n();
    let sample_u = schedule.cot_theta(grn, t0)?;
    let theta = f64::atan2(1.0, sample_u);
    let (s, c) = theta.sin_cos();
    let omega = grn * sample_u;
    let v_g = C_LIGHT * sample_u * sample_u / (1.0 + sample_u * sample_u);

    let mut fs = FieldState::zeros(grid, t0);
    // spin-wave in the rotated (de-phased) frame
    let spin_tilde: Vec<Complex64> = psi0.iter().map(|&p| -s * p).collect();
    let dspin = fourier::spectral_derivative(&spin_tilde, grid.dz());
    for j in 0..grid.nz {
        fs.e[j] = c * psi0[j];
        let phase = Complex64::from_polar(1.0, -medium.delta_k * grid.z(j));
        fs.sbc[j] = spin_tilde[j] * phase;
        if omega > 0.0 {
            let dsdt = -v_g * dspin[j] + medium.gamma0 * spin_tilde[j];
            fs.sba[j] = -Complex64::i() / omega * dsdt * phase.conj();
        }
    }
    Ok(fs)
}

struct Workspace {
    k_adv: Vec<f64>,
    drive_phase: Vec<Complex64>, // e^{i dk z}
    source_profile: Vec<f64>,
    fft_buf: Vec<Complex64>,
}

struct Rhs<'a> {
    medium: &'a MediumParams,
    schedule: &'a ControlSchedule,
    grid: &'a Grid,
    input: &'a PulseInput,
}

#[derive(Clone)]
struct SysState {
    e: Vec<Complex64>,
    sa: Vec<Complex64>,
    sc: Vec<Complex64>,
}

impl SysState {
    fn axpy(base: &SysState, k: &SysState, h: f64) -> SysState {
        let n = base.e.len();
        let mut out = base.clone();
        for j in 0..n {
            out.e[j] += h * k.e[j];
            out.sa[j] += h * k.sa[j];
            out.sc[j] += h * k.sc[j];
        }
        out
    }
}

impl Rhs<'_> {
    fn eval(&self, t: f64, s: &SysState, ws: &mut Workspace) -> Result<SysState, SolverError> {
        let nz = self.grid.nz;
        let grn = self.medium.g_root_n();
        let omega = self.schedule.omega(grn, t)?;
        let kappa = grn;

        // spectral advection term for the field
        ws.fft_buf.copy_from_slice(&s.e);
        fourier::fft(&mut ws.fft_buf);
        for (j, v) in ws.fft_buf.iter_mut().enumerate() {
            if nz % 2 == 0 && j == nz / 2 {
                *v = Complex64::new(0.0, 0.0);
            } else {
                *v *= Complex64::new(0.0, ws.k_adv[j]);
            }
        }
        fourier::ifft(&mut ws.fft_buf);

        let src_amp = match self.input {
            PulseInput::State(_) => 0.0,
            PulseInput::BoundaryDrive { t0, tau, amplitude, .. } => {
                let x = (t - t0) / tau;
                C_LIGHT * amplitude * (-x * x).exp()
            }
        };

        let mut out = SysState {
            e: vec![Complex64::new(0.0, 0.0); nz],
            sa: vec![Complex64::new(0.0, 0.0); nz],
            sc: vec![Complex64::new(0.0, 0.0); nz],
        };
        let i = Complex64::i();
        for j in 0..nz {
            let ph = ws.drive_phase[j];
            out.e[j] = -C_LIGHT * ws.fft_buf[j] + i * kappa * s.sa[j]
                + src_amp * ws.source_profile[j];
            out.sa[j] = -self.medium.gamma_ba * s.sa[j]
                + i * kappa * s.e[j]
                + i * omega * ph * s.sc[j];
            out.sc[j] = -self.medium.gamma0 * s.sc[j] + i * omega * ph.conj() * s.sa[j];
        }
        Ok(out)
    }
}

fn edge_amplitude(state: &SysState) -> (f64, f64) {
    let n = state.e.len();
    let amp = |j: usize| state.e[j].norm().max(state.sc[j].norm());
    let mut global = 0.0f64;
    for j in 0..n {
        global = global.max(amp(j));
    }
    let mut edge = 0.0f64;
    for j in (0..5.min(n)).chain(n.saturating_sub(5)..n) {
        edge = edge.max(amp(j));
    }
    (edge, global)
}

/// Integrate the linearized Maxwell–Bloch system over the grid's time
/// window. See the module docs for the scheme.
pub fn solve_linear_mb(
    input: PulseInput,
    medium: &MediumParams,
    schedule: &ControlSchedule,
    grid: &Grid,
    options: &SolverOptions,
) -> Result<Trajectory, SolverError> {
    grid.validate()?;
    medium.validate()?;

    // Atomic-frequency stability bound for RK4 on the dressed oscillation.
    let omega_max = schedule.omega_max(medium.g_root_n(), 0.0, grid.t_final);
    let dressed = (medium.g2n + omega_max * omega_max).sqrt() + medium.gamma_ba;
    let bound = 1.5 / dressed;
    if grid.dt > bound {
        return Err(SolverError::StabilityBound { dt: grid.dt, bound, omega_max: dressed });
    }

    let nz = grid.nz;
    let mut state = match &input {
        PulseInput::State(fs) => {
            if !fs.len_matches(grid) {
                return Err(SolverError::GridMismatch);
            }
            SysState { e: fs.e.clone(), sa: fs.sba.clone(), sc: fs.sbc.clone() }
        }
        PulseInput::BoundaryDrive { .. } => SysState {
            e: vec![Complex64::new(0.0, 0.0); nz],
            sa: vec![Complex64::new(0.0, 0.0); nz],
            sc: vec![Complex64::new(0.0, 0.0); nz],
        },
    };

    // Source layer: a narrow normalized Gaussian, smooth enough for the
    // spectral derivative.
    let source_profile: Vec<f64> = match &input {
        PulseInput::State(_) => vec![0.0; nz],
        PulseInput::BoundaryDrive { z_src, .. } => {
            let sigma = 2.0 * grid.dz();
            let mut prof: Vec<f64> = grid
                .z_coords()
                .iter()
                .map(|&z| (-((z - z_src) / sigma).powi(2) / 2.0).exp())
                .collect();
            let norm: f64 = prof.iter().sum::<f64>() * grid.dz();
            for p in prof.iter_mut() {
                *p /= norm;
            }
            prof
        }
    };

    let mut ws = Workspace {
        k_adv: fourier::wavenumbers(nz, grid.dz()),
        drive_phase: grid
            .z_coords()
            .iter()
            .map(|&z| Complex64::from_polar(1.0, medium.delta_k * z))
            .collect(),
        source_profile,
        fft_buf: vec![Complex64::new(0.0, 0.0); nz],
    };
    let rhs = Rhs { medium, schedule, grid, input: &input };

    let probe_indices: Vec<usize> =
        options.probe_planes.iter().map(|&z| grid.index_of(z)).collect();
    let mut probes: Vec<ProbeSeries> = probe_indices
        .iter()
        .map(|&j| ProbeSeries { z: grid.z(j), dt: grid.dt, values: Vec::new() })
        .collect();

    let n_steps = grid.n_steps();
    let dt = grid.t_final / n_steps as f64;
    let mut snapshots = Vec::new();
    let mut warnings = Vec::new();
    let mut max_sbc_sq = 0.0f64;

    let snapshot_of = |state: &SysState, t: f64| FieldState {
        t,
        e: state.e.clone(),
        sba: state.sa.clone(),
        sbc: state.sc.clone(),
    };
    snapshots.push(snapshot_of(&state, 0.0));
    for (p, &j) in probes.iter_mut().zip(&probe_indices) {
        p.values.push(state.e[j]);
    }

    let check_every = 16usize;
    let mut t = 0.0;
    for step in 1..=n_steps {
        let k1 = rhs.eval(t, &state, &mut ws)?;
        let s2 = SysState::axpy(&state, &k1, 0.5 * dt);
        let k2 = rhs.eval(t + 0.5 * dt, &s2, &mut ws)?;
        let s3 = SysState::axpy(&state, &k2, 0.5 * dt);
        let k3 = rhs.eval(t + 0.5 * dt, &s3, &mut ws)?;
        let s4 = SysState::axpy(&state, &k3, dt);
        let k4 = rhs.eval(t + dt, &s4, &mut ws)?;
        for j in 0..nz {
            state.e[j] += dt / 6.0 * (k1.e[j] + 2.0 * k2.e[j] + 2.0 * k3.e[j] + k4.e[j]);
            state.sa[j] += dt / 6.0 * (k1.sa[j] + 2.0 * k2.sa[j] + 2.0 * k3.sa[j] + k4.sa[j]);
            state.sc[j] += dt / 6.0 * (k1.sc[j] + 2.0 * k2.sc[j] + 2.0 * k3.sc[j] + k4.sc[j]);
        }
        t = step as f64 * dt;

        for (p, &j) in probes.iter_mut().zip(&probe_indices) {
            p.values.push(state.e[j]);
        }

        if step % check_every == 0 || step == n_steps {
            let finite = state
                .e
                .iter()
                .chain(state.sa.iter())
                .chain(state.sc.iter())
                .all(|c| c.re.is_finite() && c.im.is_finite());
            if !finite {
                return Err(SolverError::NumericalFailure { t });
            }
            let (edge, global) = edge_amplitude(&state);
            if global > 0.0 && edge > 1e-3 * global {
                return Err(SolverError::WrapHazard { t });
            }
            let sbc_sq = state.sc.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
            max_sbc_sq = max_sbc_sq.max(sbc_sq);
        }

        let take_snapshot = (options.snapshot_stride > 0 && step % options.snapshot_stride == 0)
            || step == n_steps;
        if take_snapshot {
            snapshots.push(snapshot_of(&state, t));
        }
    }

    if max_sbc_sq > options.weak_field_bound {
        warnings.push(format!(
            "weak-field proxy exceeded: max |sbc|^2 = {max_sbc_sq:.3e} > bound {:.3e}",
            options.weak_field_bound
        ));
    }

    Ok(Trajectory {
        grid: *grid,
        medium: *medium,
        schedule: schedule.clone(),
        snapshots,
        probes,
        max_sbc_sq,
        warnings,
    })
}

/// Polariton energy I_Ψ = ∫|Ψ(z)|² dz by trapezoidal quadrature.
pub fn polariton_energy(ps: &PolaritonField, grid: &Grid) -> f64 {
    trapezoid_abs2(&ps.psi, grid.dz())
}

/// Bright-component energy ∫|Φ|²dz, for conservation diagnostics.
pub fn bright_energy(ps: &PolaritonField, grid: &Grid) -> f64 {
    trapezoid_abs2(&ps.phi, grid.dz())
}

fn trapezoid_abs2(f: &[Complex64], dz: f64) -> f64 {
    if f.is_empty() {
        return 0.0;
    }
    let sum: f64 = f.iter().map(|c| c.norm_sqr()).sum();
    let ends = 0.5 * (f[0].norm_sqr() + f[f.len() - 1].norm_sqr());
    (sum - ends) * dz
}

/// Intensity-weighted centroid of |Ψ|².
pub fn centroid(ps: &PolaritonField, grid: &Grid) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..grid.nz {
        let w = ps.psi[j].norm_sqr();
        num += w * grid.z(j);
        den += w;
    }
    num / den
}

/// Peak position of |Ψ| refined with a three-point parabola.
pub fn peak_position(ps: &PolaritonField, grid: &Grid) -> f64 {
    let n = ps.psi.len();
    let (jmax, _) = ps
        .psi
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    if jmax == 0 || jmax == n - 1 {
        return grid.z(jmax);
    }
    let ym = ps.psi[jmax - 1].norm();
    let y0 = ps.psi[jmax].norm();
    let yp = ps.psi[jmax + 1].norm();
    let denom = ym - 2.0 * y0 + yp;
    if denom.abs() < 1e-300 {
        return grid.z(jmax);
    }
    grid.z(jmax) + 0.5 * grid.dz() * (ym - yp) / denom
}

/// Per-snapshot deviation between a Maxwell–Bloch run and an analytic
/// polariton time series on the same grid and times.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DeviationRow {
    pub t: f64,
    /// ‖|Ψ_mb| − |Ψ_ref|‖₂ / ‖|Ψ_ref|‖₂
    pub rel_l2: f64,
    pub peak_error: f64,
    /// |I_mb(t)/I_mb(0) − I_ref(t)/I_ref(0)|
    pub energy_ratio_error: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct DeviationReport {
    pub rows: Vec<DeviationRow>,
    pub max_rel_l2: f64,
}

/// Compare the trajectory's polariton snapshots against an analytic series
/// at the same times.
pub fn compare_with_analytic(
    traj: &Trajectory,
    analytic: &[PolaritonField],
) -> Result<DeviationReport, SolverError> {
    if analytic.len() != traj.snapshots.len() {
        return Err(SolverError::CompareMismatch(format!(
            "{} analytic fields vs {} snapshots",
            analytic.len(),
            traj.snapshots.len()
        )));
    }
    let grid = &traj.grid;
    let mut rows = Vec::new();
    let i_mb0 = polariton_energy(&traj.polariton_snapshot(0)?, grid);
    let i_ref0 = polariton_energy(&analytic[0], grid);
    for (idx, reference) in analytic.iter().enumerate() {
        if !reference.len_matches(grid) {
            return Err(SolverError::CompareMismatch("grid size".into()));
        }
        let t = traj.snapshots[idx].t;
        if (reference.t - t).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(SolverError::CompareMismatch(format!(
                "snapshot time {t} vs analytic {}",
                reference.t
            )));
        }
        let mb = traj.polariton_snapshot(idx)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..grid.nz {
            let d = mb.psi[j].norm() - reference.psi[j].norm();
            num += d * d;
            den += reference.psi[j].norm_sqr();
        }
        let rel_l2 = (num / den).sqrt();
        let peak_error = (peak_position(&mb, grid) - peak_position(reference, grid)).abs();
        let energy_ratio_error = (polariton_energy(&mb, grid) / i_mb0
            - polariton_energy(reference, grid) / i_ref0)
            .abs();
        rows.push(DeviationRow { t, rel_l2, peak_error, energy_ratio_error });
    }
    let max_rel_l2 = rows.iter().map(|r| r.rel_l2).fold(0.0, f64::max);
    Ok(DeviationReport { rows, max_rel_l2 })
}

/// Analytic polariton series at the trajectory's snapshot times, starting
/// from the trajectory's own initial polariton profile.
pub fn analytic_series_for(traj: &Trajectory) -> Result<Vec<PolaritonField>, SolverError> {
    let psi0 = traj.polariton_snapshot(0)?.psi;
    let mut out = Vec::with_capacity(traj.snapshots.len());
    for snap in &traj.snapshots {
        out.push(nonadiabatic_propagate(
            &psi0,
            &traj.schedule,
            &traj.medium,
            &traj.grid,
            snap.t,
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian_envelope;
    use crate::schedule::eval_schedule;

    /// Shared static-drive run: EIT medium at v_g = c/2, a long drive pulse
    /// injected through the source layer, probes before and after a 40-unit
    /// stretch of medium.
    fn static_run() -> Trajectory {
        let medium = MediumParams::new(4.0, 1.0, 0.0, 80.0).unwrap();
        let schedule = ControlSchedule::Constant { omega: 2.0 }; // n_g = 1
        let grid = Grid::new(-64.0, 256.0, 1024, 0.125, 520.0).unwrap();
        let options = SolverOptions {
            snapshot_stride: 0,
            probe_planes: vec![0.0, 40.0],
            weak_field_bound: 1.0,
        };
        let input =
            PulseInput::BoundaryDrive { t0: 200.0, tau: 60.0, amplitude: 1.0, z_src: -32.0 };
        solve_linear_mb(input, &medium, &schedule, &grid, &options).unwrap()
    }

    fn probe_centroid(p: &ProbeSeries) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (n, v) in p.values.iter().enumerate() {
            let w = v.norm_sqr();
            num += w * n as f64 * p.dt;
            den += w;
        }
        num / den
    }

    fn probe_flux(p: &ProbeSeries) -> f64 {
        p.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * p.dt
    }

    #[test]
    fn free_advection_limit() {
        // Vanishing coupling and drive: the probe advects at c with its
        // shape untouched.
        let medium = MediumParams::new(1e-30, 1.0, 0.0, 10.0).unwrap();
        let schedule = ControlSchedule::Constant { omega: 0.0 };
        let grid = Grid::new(-32.0, 96.0, 512, 0.03, 24.0).unwrap();
        let mut init = FieldState::zeros(&grid, 0.0);
        init.e = gaussian_envelope(&grid, 0.0, 5.0, 1.0);
        let traj = solve_linear_mb(
            PulseInput::State(init),
            &medium,
            &schedule,
            &grid,
            &SolverOptions::default(),
        )
        .unwrap();
        let last = traj.snapshots.last().unwrap();
        let expected = gaussian_envelope(&grid, 24.0 * C_LIGHT, 5.0, 1.0);
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..grid.nz {
            num += (last.e[j] - expected[j]).norm_sqr();
            den += expected[j].norm_sqr();
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-6, "relative L2 error {rel:.2e}");
    }

    #[test]
    fn static_drive_group_delay_and_shape() {
        // The probe-plane centroid delay over dz = 40 exceeds the vacuum
        // transit by tau_d = n_g dz / c = 40, and the temporal profile is
        // the characteristic solution E(z1, t) = E(z0, t - dz/v_g).
        let traj = static_run();
        let medium = traj.medium;
        let sample = eval_schedule(&traj.schedule, &medium, 0.0).unwrap();
        let ng = medium.g2n / (sample.omega * sample.omega);
        assert!((ng - 1.0).abs() < 1e-12);

        let p0 = &traj.probes[0];
        let p1 = &traj.probes[1];
        let dz = p1.z - p0.z;
        let measured_delay = probe_centroid(p1) - probe_centroid(p0);
        let extra = measured_delay - dz / C_LIGHT;
        let tau_d = ng * dz / C_LIGHT;
        assert!(
            (extra - tau_d).abs() < 0.01 * tau_d,
            "extra delay {extra} vs tau_d {tau_d}"
        );

        // shape: shift p0 by dz/v_g samples and compare
        let transit = dz / sample.v_g;
        let shift = (transit / p0.dt).round() as usize;
        let (mut num, mut den) = (0.0, 0.0);
        for n in 0..p1.values.len() - shift {
            num += (p1.values[n + shift] - p0.values[n]).norm_sqr();
            den += p0.values[n].norm_sqr();
        }
        let rel = (num / den).sqrt();
        assert!(rel < 0.01, "characteristic-solution deviation {rel:.3e}");
    }

    #[test]
    fn static_drive_flux_is_plane_independent() {
        let traj = static_run();
        let f0 = probe_flux(&traj.probes[0]);
        let f1 = probe_flux(&traj.probes[1]);
        assert!((f1 / f0 - 1.0).abs() < 0.01, "flux ratio {}", f1 / f0);
    }

    #[test]
    fn static_drive_preserves_spectrum() {
        let traj = static_run();
        let p0 = &traj.probes[0];
        let p1 = &traj.probes[1];
        let s0 = crate::spectra::pulse_spectrum(p0.dt, &p0.values, (0.0, 520.0)).unwrap();
        let s1 = crate::spectra::pulse_spectrum(p1.dt, &p1.values, (0.0, 520.0)).unwrap();
        let dist = crate::spectra::spectrum_shape_distance(&s1, &s0).unwrap();
        assert!(dist < 0.02, "spectrum shape distance {dist:.3e}");
        assert!((s1.rms_width / s0.rms_width - 1.0).abs() < 0.005);
    }

    #[test]
    fn weak_field_proxy_is_recorded() {
        let traj = static_run();
        assert!(traj.max_sbc_sq > 0.0);
        assert!(traj.max_sbc_sq <= 1.0 + 1e-9);
        assert!(traj.warnings.is_empty());

        // with a deliberately tiny bound the warning must fire
        let medium = traj.medium;
        let schedule = traj.schedule.clone();
        let grid = Grid::new(-64.0, 256.0, 512, 0.25, 100.0).unwrap();
        let mut init = FieldState::zeros(&grid, 0.0);
        init.e = gaussian_envelope(&grid, 0.0, 10.0, 1.0);
        init.sbc = gaussian_envelope(&grid, 0.0, 10.0, 0.9);
        let traj = solve_linear_mb(
            PulseInput::State(init),
            &medium,
            &schedule,
            &grid,
            &SolverOptions { weak_field_bound: 0.1, ..Default::default() },
        )
        .unwrap();
        assert!(!traj.warnings.is_empty());
    }

    #[test]
    fn polariton_number_is_conserved_without_decay() {
        // gamma_ba = gamma_0 = 0, static drive: int |Psi|^2 + |Phi|^2 stays
        // within 1% (the small leak is the first-order optical coherence).
        let medium = MediumParams::new(4.0, 1.0, 0.0, 80.0).unwrap().with_gamma_ba(0.0);
        let schedule = ControlSchedule::Constant { omega: 2.0 };
        let grid = Grid::new(-64.0, 64.0, 512, 0.125, 40.0).unwrap();
        let psi0 = gaussian_envelope(&grid, -10.0, 8.0, 1.0);
        let init = adiabatic_initial_state(&psi0, &schedule, &medium, &grid, 0.0).unwrap();
        let traj = solve_linear_mb(
            PulseInput::State(init),
            &medium,
            &schedule,
            &grid,
            &SolverOptions { snapshot_stride: 80, ..Default::default() },
        )
        .unwrap();
        let first = traj.polariton_snapshot(0).unwrap();
        let total0 = polariton_energy(&first, &grid) + bright_energy(&first, &grid);
        for idx in 1..traj.snapshots.len() {
            let ps = traj.polariton_snapshot(idx).unwrap();
            let total = polariton_energy(&ps, &grid) + bright_energy(&ps, &grid);
            assert!(
                (total / total0 - 1.0).abs() < 0.01,
                "t = {}: total ratio {}",
                ps.t,
                total / total0
            );
        }
    }

    #[test]
    fn delta_k_is_a_removable_phase() {
        // A nonzero two-photon mismatch must drop out of the polariton
        // once the compensating phase is applied in the transform.
        let schedule = ControlSchedule::Constant { omega: 2.0 };
        let grid = Grid::new(-32.0, 96.0, 256, 0.25, 30.0).unwrap();
        let run = |delta_k: f64| -> Vec<PolaritonField> {
            let medium =
                MediumParams::new(4.0, 1.0, 0.0, 80.0).unwrap().with_delta_k(delta_k);
            let psi0 = gaussian_envelope(&grid, -5.0, 6.0, 1.0);
            let init = adiabatic_initial_state(&psi0, &schedule, &medium, &grid, 0.0).unwrap();
            let traj = solve_linear_mb(
                PulseInput::State(init),
                &medium,
                &schedule,
                &grid,
                &SolverOptions { snapshot_stride: 40, ..Default::default() },
            )
            .unwrap();
            (0..traj.snapshots.len()).map(|i| traj.polariton_snapshot(i).unwrap()).collect()
        };
        let plain = run(0.0);
        let mismatched = run(0.7);
        for (a, b) in plain.iter().zip(&mismatched) {
            for j in 0..grid.nz {
                assert!((a.psi[j] - b.psi[j]).norm() < 1e-10);
                assert!((a.phi[j] - b.phi[j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn grid_refinement_leaves_the_exit_pulse_unchanged() {
        let medium = MediumParams::new(4.0, 1.0, 0.0, 80.0).unwrap();
        let schedule = ControlSchedule::Constant { omega: 2.0 };
        let run = |nz: usize, dt: f64| -> (Grid, PolaritonField) {
            let grid = Grid::new(-48.0, 80.0, nz, dt, 40.0).unwrap();
            let psi0 = gaussian_envelope(&grid, -10.0, 6.0, 1.0);
            let init = adiabatic_initial_state(&psi0, &schedule, &medium, &grid, 0.0).unwrap();
            let traj = solve_linear_mb(
                PulseInput::State(init),
                &medium,
                &schedule,
                &grid,
                &SolverOptions::default(),
            )
            .unwrap();
            let last = traj.polariton_snapshot(traj.snapshots.len() - 1).unwrap();
            (grid, last)
        };
        let (_, coarse) = run(512, 0.1);
        let (_, fine) = run(1024, 0.05);
        // compare on the common (coarse) points
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..512 {
            num += (coarse.psi[j] - fine.psi[2 * j]).norm_sqr();
            den += fine.psi[2 * j].norm_sqr();
        }
        let rel = (num / den).sqrt();
        assert!(rel < 0.005, "refinement changed the exit pulse by {rel:.3e}");
    }

    #[test]
    fn wrap_hazard_is_detected() {
        let medium = MediumParams::new(4.0, 1.0, 0.0, 80.0).unwrap();
        let schedule = ControlSchedule::Constant { omega: 2.0 };
        let grid = Grid::new(-16.0, 16.0, 128, 0.1, 60.0).unwrap();
        let psi0 = gaussian_envelope(&grid, 0.0, 4.0, 1.0);
        let init = adiabatic_initial_state(&psi0, &schedule, &medium, &grid, 0.0).unwrap();
        let res = solve_linear_mb(
            PulseInput::State(init),
            &medium,
            &schedule,
            &grid,
            &SolverOptions::default(),
        );
        assert!(matches!(res, Err(SolverError::WrapHazard { .. })), "{res:?}");
    }

    #[test]
    fn stability_bound_is_enforced() {
        // strong drive with a coarse dt: the dressed-frequency bound trips
        let medium = MediumParams::new(100.0, 1.0, 0.0, 100.0).unwrap();
        let schedule = ControlSchedule::Constant { omega: 500.0 };
        let grid = Grid::new(-16.0, 16.0, 128, 0.1, 10.0).unwrap();
        let res = solve_linear_mb(
            PulseInput::State(FieldState::zeros(&grid, 0.0)),
            &medium,
            &schedule,
            &grid,
            &SolverOptions::default(),
        );
        assert!(matches!(res, Err(SolverError::StabilityBound { .. })), "{res:?}");
    }

    #[test]
    fn non_finite_fields_abort() {
        let medium = MediumParams::new(4.0, 1.0, 0.0, 80.0).unwrap();
        let schedule = ControlSchedule::Constant { omega: 2.0 };
        let grid = Grid::new(-16.0, 16.0, 128, 0.1, 10.0).unwrap();
        let mut init = FieldState::zeros(&grid, 0.0);
        init.e[64] = Complex64::new(f64::INFINITY, 0.0);
        let res = solve_linear_mb(
            PulseInput::State(init),
            &medium,
            &schedule,
            &grid,
            &SolverOptions::default(),
        );
        assert!(matches!(res, Err(SolverError::NumericalFailure { .. })), "{res:?}");
    }

    #[test]
    fn polariton_energy_quadrature() {
        let grid = Grid::new(0.0, 32.0, 64, 0.1, 1.0).unwrap(); // dz = 0.5
        let mut ps = PolaritonField::zeros(&grid, 0.0);
        // 20 samples of amplitude 1 span 19 intervals plus two half-weight
        // edges: trapezoid gives exactly 10
        for j in 10..30 {
            ps.psi[j] = Complex64::new(1.0, 0.0);
        }
        assert!((polariton_energy(&ps, &grid) - 10.0).abs() < 1e-12);
        let zero = PolaritonField::zeros(&grid, 0.0);
        assert_eq!(polariton_energy(&zero, &grid), 0.0);
    }

    #[test]
    fn identical_series_have_zero_deviation() {
        let traj = {
            let medium = MediumParams::new(4.0, 1.0, 0.0, 80.0).unwrap();
            let schedule = ControlSchedule::Constant { omega: 2.0 };
            let grid = Grid::new(-32.0, 96.0, 256, 0.25, 20.0).unwrap();
            let psi0 = gaussian_envelope(&grid, -5.0, 6.0, 1.0);
            let init = adiabatic_initial_state(&psi0, &schedule, &medium, &grid, 0.0).unwrap();
            solve_linear_mb(
                PulseInput::State(init),
                &medium,
                &schedule,
                &grid,
                &SolverOptions { snapshot_stride: 40, ..Default::default() },
            )
            .unwrap()
        };
        let own: Vec<PolaritonField> =
            (0..traj.snapshots.len()).map(|i| traj.polariton_snapshot(i).unwrap()).collect();
        let report = compare_with_analytic(&traj, &own).unwrap();
        assert_eq!(report.max_rel_l2, 0.0);
        for row in &report.rows {
            assert_eq!(row.rel_l2, 0.0);
            assert_eq!(row.peak_error, 0.0);
            assert_eq!(row.energy_ratio_error, 0.0);
        }
    }

    #[test]
    fn source_injection_reproduces_the_drive_amplitude() {
        // Just downstream of the source layer the field must equal the
        // drive (up to the short EIT healing transient).
        let traj = static_run();
        let p0 = &traj.probes[0]; // z = 0, 32 units past the source
        let peak = p0.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        // drive peak is 1; transmitted peak within a few percent
        assert!((peak - 1.0).abs() < 0.03, "transmitted peak {peak}");
    }

    #[test]
    fn adiabatic_initial_state_sits_on_the_dark_manifold() {
        let medium = MediumParams::new(4.0, 1.0, 0.0, 80.0).unwrap();
        let schedule = ControlSchedule::Constant { omega: 2.0 };
        let grid = Grid::new(-32.0, 32.0, 256, 0.1, 10.0).unwrap();
        let psi0 = gaussian_envelope(&grid, 0.0, 6.0, 1.0);
        let fs = adiabatic_initial_state(&psi0, &schedule, &medium, &grid, 0.0).unwrap();
        let theta = f64::atan2(1.0, 1.0); // cot = omega/grn = 1
        for j in 0..grid.nz {
            assert!((fs.e[j] - theta.cos() * psi0[j]).norm() < 1e-12);
            assert!((fs.sbc[j] + theta.sin() * psi0[j]).norm() < 1e-12);
            // first-order optical coherence is small but nonzero
            assert!(fs.sba[j].norm() < 0.1 * psi0[j].norm() + 1e-12);
        }
        let sba_peak = fs.sba.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(sba_peak > 1e-3, "transport correction missing");
    }
}
