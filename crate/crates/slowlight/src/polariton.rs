//! Dark- and bright-state polariton transform and propagators.
//!
//! The dark polariton Ψ = cosθ·𝓔 − sinθ·√Nσ_bc·e^{iΔkz} propagates
//! form-stably at v_g(t) = c·cos²θ(t) in the adiabatic limit; rotating θ
//! from 0 to π/2 decelerates it to a full stop and maps the probe field
//! onto the stationary spin wave. This module implements
//!
//! - the exact (involutive) rotation between field and polariton variables,
//! - the ideal adiabatic propagator (Fourier shift plus Raman-decay factor),
//! - the lowest-order non-adiabatic correction coefficients A, B, C, D and
//!   the spectral propagator built from them,
//! - the boundary amplitude jump at the medium entrance, and
//! - report-style adiabaticity diagnostics.

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{FieldState, PolaritonField};
use crate::fourier;
use crate::grid::Grid;
use crate::medium::MediumParams;
use crate::quadrature::adaptive_simpson;
use crate::schedule::{ControlSchedule, ScheduleError};
use crate::C_LIGHT;

/// Tolerance used for every schedule time integral in this module. Kept
/// two orders tighter than the 1e-9 the propagator needs so quadrature
/// error never shows up in the conservation diagnostics.
pub const QUADRATURE_TOL: f64 = 1e-11;

#[derive(Debug, Error)]
pub enum PolaritonError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("input and grid sizes do not match")]
    GridMismatch,
    #[error("shifted pulse support reaches the domain edge (relative edge amplitude {0:.2e})")]
    DomainExit(f64),
    #[error("boundary-jump group velocity {0} outside (0, c]")]
    InvalidVelocity(f64),
    #[error("schedule integrand not finite (tabulated schedule too sparse?)")]
    BadIntegrand,
}

/// Rotate field variables into polariton variables at mixing angle θ.
///
/// The spin-wave amplitude `sbc` is the √N-scaled coherence, so no atom
/// number is needed; Δk enters only through the compensating phase.
pub fn to_polariton(
    fs: &FieldState,
    theta: f64,
    medium: &MediumParams,
    grid: &Grid,
) -> Result<PolaritonField, PolaritonError> {
    if !fs.len_matches(grid) {
        return Err(PolaritonError::GridMismatch);
    }
    let (s, c) = theta.sin_cos();
    let mut out = PolaritonField::zeros(grid, fs.t);
    for j in 0..grid.nz {
        let phase = Complex64::from_polar(1.0, medium.delta_k * grid.z(j));
        let spin = fs.sbc[j] * phase;
        out.psi[j] = c * fs.e[j] - s * spin;
        out.phi[j] = s * fs.e[j] + c * spin;
    }
    Ok(out)
}

/// Inverse rotation. With `adiabatic_projection` the bright component is
/// zeroed first, giving 𝓔 = cosθ·Ψ and √Nσ_bc = −sinθ·Ψ·e^{−iΔkz}; the
/// optical coherence `sba` is not reconstructible from (Ψ, Φ) and is
/// returned as zero.
pub fn from_polariton(
    ps: &PolaritonField,
    theta: f64,
    medium: &MediumParams,
    grid: &Grid,
    adiabatic_projection: bool,
) -> Result<FieldState, PolaritonError> {
    if !ps.len_matches(grid) {
        return Err(PolaritonError::GridMismatch);
    }
    let (s, c) = theta.sin_cos();
    let mut out = FieldState::zeros(grid, ps.t);
    for j in 0..grid.nz {
        let phi = if adiabatic_projection { Complex64::new(0.0, 0.0) } else { ps.phi[j] };
        let phase = Complex64::from_polar(1.0, -medium.delta_k * grid.z(j));
        out.e[j] = c * ps.psi[j] + s * phi;
        out.sbc[j] = (-s * ps.psi[j] + c * phi) * phase;
    }
    Ok(out)
}

fn ensure_schedule_domain(
    schedule: &ControlSchedule,
    g_root_n: f64,
    t0: f64,
    t1: f64,
) -> Result<(), ScheduleError> {
    schedule.cot_theta(g_root_n, t0)?;
    schedule.cot_theta(g_root_n, t1)?;
    Ok(())
}

/// Displacement of the ideal polariton after time t: c·∫₀ᵗ cos²θ(τ) dτ.
pub fn displacement(
    schedule: &ControlSchedule,
    medium: &MediumParams,
    t: f64,
) -> Result<f64, PolaritonError> {
    let grn = medium.g_root_n();
    ensure_schedule_domain(schedule, grn, 0.0, t)?;
    let d = adaptive_simpson(
        |tau| match schedule.cot_theta(grn, tau) {
            Ok(u) => C_LIGHT * u * u / (1.0 + u * u),
            Err(_) => f64::NAN,
        },
        0.0,
        t,
        QUADRATURE_TOL,
    );
    if !d.is_finite() {
        return Err(PolaritonError::BadIntegrand);
    }
    Ok(d)
}

/// ∫₀ᵗ sin²θ(τ) dτ, the exposure entering the Raman-decay factor.
pub fn spin_exposure(
    schedule: &ControlSchedule,
    medium: &MediumParams,
    t: f64,
) -> Result<f64, PolaritonError> {
    let grn = medium.g_root_n();
    ensure_schedule_domain(schedule, grn, 0.0, t)?;
    let v = adaptive_simpson(
        |tau| match schedule.cot_theta(grn, tau) {
            Ok(u) => 1.0 / (1.0 + u * u),
            Err(_) => f64::NAN,
        },
        0.0,
        t,
        QUADRATURE_TOL,
    );
    if !v.is_finite() {
        return Err(PolaritonError::BadIntegrand);
    }
    Ok(v)
}

fn wrap_check(psi: &[Complex64]) -> Result<(), PolaritonError> {
    let global = psi.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if global == 0.0 {
        return Ok(());
    }
    let n = psi.len();
    let edge = psi[..5.min(n)]
        .iter()
        .chain(psi[n.saturating_sub(5)..].iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if edge > 1e-6 * global {
        return Err(PolaritonError::DomainExit(edge / global));
    }
    Ok(())
}

/// Shape- and state-preserving adiabatic propagation:
/// Ψ(z,t) = e^{−γ₀∫₀ᵗsin²θ}·Ψ(z − c∫₀ᵗcos²θ, 0), with Φ = 0.
///
/// The shift is a Fourier phase multiplication, exact for band-limited
/// input (≥ 8 grid points per pulse width).
pub fn ideal_propagate(
    psi0: &[Complex64],
    schedule: &ControlSchedule,
    medium: &MediumParams,
    grid: &Grid,
    t: f64,
) -> Result<PolaritonField, PolaritonError> {
    if psi0.len() != grid.nz {
        return Err(PolaritonError::GridMismatch);
    }
    let shift = displacement(schedule, medium, t)?;
    let decay = (-medium.gamma0 * spin_exposure(schedule, medium, t)?).exp();
    let psi = fourier_shift_scaled(psi0, grid.dz(), shift, decay);
    wrap_check(&psi)?;
    let phi = vec![Complex64::new(0.0, 0.0); grid.nz];
    Ok(PolaritonField { t, psi, phi })
}

fn fourier_shift_scaled(psi0: &[Complex64], dz: f64, shift: f64, scale: f64) -> Vec<Complex64> {
    let mut out = fourier::fourier_shift(psi0, dz, shift);
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// Time samples of the four lowest-order non-adiabatic correction
/// coefficients:
///
/// A = (γ + ½∂t)(θ̇²sin²θ)/g²N   — homogeneous loss,
/// B = (sinθ/3g²N)·∂t²(sin³θ)    — velocity correction,
/// C = (γ + ½∂t)(sin⁴θcos²θ)/g²N — diffusive spreading,
/// D = sin⁴θcos⁴θ/g²N            — dispersive deformation.
///
/// γ here is the optical-coherence decay rate γ_ba.
#[derive(Debug, Clone)]
pub struct CorrectionCoefficients {
    pub times: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl CorrectionCoefficients {
    /// Intervals where A(t) < 0 (fast ramps can make the ∂t part dominate);
    /// reported as a diagnostic, never clamped.
    pub fn a_negative_spans(&self) -> Vec<(f64, f64)> {
        let mut spans = Vec::new();
        let mut start: Option<f64> = None;
        for (i, &a) in self.a.iter().enumerate() {
            if a < 0.0 && start.is_none() {
                start = Some(self.times[i]);
            }
            if a >= 0.0 {
                if let Some(s) = start.take() {
                    spans.push((s, self.times[i]));
                }
            }
        }
        if let Some(s) = start {
            spans.push((s, *self.times.last().unwrap()));
        }
        spans
    }
}

/// Pointwise evaluation of (A, B, C, D) at time t.
pub fn correction_coefficients_at(
    schedule: &ControlSchedule,
    medium: &MediumParams,
    t: f64,
) -> Result<(f64, f64, f64, f64), ScheduleError> {
    let grn = medium.g_root_n();
    let g2n = medium.g2n;
    let gamma = medium.gamma_ba;
    let d = schedule.theta_derivs(grn, t)?;
    let (sin_t, cos_t) = d.theta.sin_cos();
    let (s2, c2) = (sin_t * sin_t, cos_t * cos_t);
    let (td, tdd) = (d.dtheta, d.ddtheta);

    // d/dt (theta_dot^2 sin^2) = 2 td tdd sin^2 + 2 td^3 sin cos
    let a = (gamma * td * td * s2 + td * tdd * s2 + td * td * td * sin_t * cos_t) / g2n;
    // d^2/dt^2 (sin^3) = 3 [2 sin cos^2 td^2 - sin^3 td^2 + sin^2 cos tdd]
    let d2_sin3 = 3.0 * (2.0 * sin_t * c2 * td * td - s2 * sin_t * td * td + s2 * cos_t * tdd);
    let b = sin_t * d2_sin3 / (3.0 * g2n);
    // d/dt (sin^4 cos^2) = 2 td sin^3 cos (2 cos^2 - sin^2)
    let c = (gamma * s2 * s2 * c2 + td * s2 * sin_t * cos_t * (2.0 * c2 - s2)) / g2n;
    let dd = s2 * s2 * c2 * c2 / g2n;
    Ok((a, b, c, dd))
}

/// Evaluate all four coefficients on a time grid.
pub fn correction_coefficients(
    schedule: &ControlSchedule,
    medium: &MediumParams,
    times: &[f64],
) -> Result<CorrectionCoefficients, ScheduleError> {
    let mut out = CorrectionCoefficients {
        times: times.to_vec(),
        a: Vec::with_capacity(times.len()),
        b: Vec::with_capacity(times.len()),
        c: Vec::with_capacity(times.len()),
        d: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let (a, b, c, d) = correction_coefficients_at(schedule, medium, t)?;
        out.a.push(a);
        out.b.push(b);
        out.c.push(c);
        out.d.push(d);
    }
    Ok(out)
}

/// The four k-independent time integrals of the spectral propagator,
/// computed once and shared by every Fourier mode.
#[derive(Debug, Clone, Copy)]
pub struct PropagatorIntegrals {
    /// ∫ (v_g + cB) dt — displacement including the B velocity correction.
    pub displacement: f64,
    /// ∫ D dt — dispersive phase.
    pub dispersion: f64,
    /// ∫ A dt — homogeneous loss exponent.
    pub loss_a: f64,
    /// ∫ C dt — diffusive loss exponent (multiplied by k²c²).
    pub loss_c: f64,
    /// ∫ sin²θ dt — Raman-decay exposure.
    pub spin_exposure: f64,
}

/// Integrate the propagator coefficients over [0, t].
pub fn propagator_integrals(
    schedule: &ControlSchedule,
    medium: &MediumParams,
    t: f64,
) -> Result<PropagatorIntegrals, PolaritonError> {
    let grn = medium.g_root_n();
    ensure_schedule_domain(schedule, grn, 0.0, t)?;
    // Validate derivative availability up front so quadrature cannot fail
    // mid-stream (tabulated schedules may be too sparse).
    for i in 0..=16 {
        correction_coefficients_at(schedule, medium, t * i as f64 / 16.0)?;
    }
    let coeff = |tau: f64, pick: usize| -> f64 {
        match correction_coefficients_at(schedule, medium, tau) {
            Ok((a, b, c, d)) => [a, b, c, d][pick],
            Err(_) => f64::NAN,
        }
    };
    let vg_plus_cb = |tau: f64| -> f64 {
        match schedule.cot_theta(grn, tau) {
            Ok(u) => C_LIGHT * u * u / (1.0 + u * u) + C_LIGHT * coeff(tau, 1),
            Err(_) => f64::NAN,
        }
    };
    let ints = PropagatorIntegrals {
        displacement: adaptive_simpson(vg_plus_cb, 0.0, t, QUADRATURE_TOL),
        dispersion: adaptive_simpson(|tau| coeff(tau, 3), 0.0, t, QUADRATURE_TOL),
        loss_a: adaptive_simpson(|tau| coeff(tau, 0), 0.0, t, QUADRATURE_TOL),
        loss_c: adaptive_simpson(|tau| coeff(tau, 2), 0.0, t, QUADRATURE_TOL),
        spin_exposure: spin_exposure(schedule, medium, t)?,
    };
    if ![ints.displacement, ints.dispersion, ints.loss_a, ints.loss_c]
        .iter()
        .all(|v| v.is_finite())
    {
        return Err(PolaritonError::BadIntegrand);
    }
    Ok(ints)
}

/// First-order non-adiabatic spectral propagator:
///
/// Ψ̂(k,t) = Ψ̂(k,0)·e^{−ik∫(v_g+cB)}·e^{+ik³c³∫D}·e^{−∫(A+k²c²C)}·e^{−γ₀∫sin²θ}
///
/// (signs written for the e^{+ikz} transform convention used by
/// [`crate::fourier`]). Reduces to [`ideal_propagate`] when A = B = C = D = 0.
pub fn nonadiabatic_propagate(
    psi0: &[Complex64],
    schedule: &ControlSchedule,
    medium: &MediumParams,
    grid: &Grid,
    t: f64,
) -> Result<PolaritonField, PolaritonError> {
    if psi0.len() != grid.nz {
        return Err(PolaritonError::GridMismatch);
    }
    let ints = propagator_integrals(schedule, medium, t)?;
    let decay0 = (-medium.gamma0 * ints.spin_exposure).exp();
    let k = fourier::wavenumbers(grid.nz, grid.dz());
    let mut hat = psi0.to_vec();
    fourier::fft(&mut hat);
    let c = C_LIGHT;
    for (j, v) in hat.iter_mut().enumerate() {
        let kj = k[j];
        let phase = -kj * ints.displacement + kj * kj * kj * c * c * c * ints.dispersion;
        let loss = ints.loss_a + kj * kj * c * c * ints.loss_c;
        *v *= Complex64::from_polar((-loss).exp() * decay0, phase);
    }
    fourier::ifft(&mut hat);
    wrap_check(&hat)?;
    Ok(PolaritonField { t, psi: hat, phi: vec![Complex64::new(0.0, 0.0); grid.nz] })
}

/// Amplitude jump and pulse compression at the medium entrance.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryJump {
    /// Polariton amplitude just inside: Ψ(+0) = √(c/v_g⁰)·𝓔(−0).
    pub psi_inside: Complex64,
    /// The jump factor √(c/v_g⁰).
    pub factor: f64,
    /// Companion length compression Δl = (v_g/c)·Δl₀.
    pub compression: f64,
}

/// Continuity of 𝓔 across the entrance face implies a polariton jump by
/// √(c/v_g⁰) and a spatial compression by v_g⁰/c; their combination
/// conserves the total polariton number.
pub fn boundary_jump(e_in: Complex64, vg0: f64) -> Result<BoundaryJump, PolaritonError> {
    if !(vg0 > 0.0 && vg0 <= C_LIGHT) {
        return Err(PolaritonError::InvalidVelocity(vg0));
    }
    let factor = (C_LIGHT / vg0).sqrt();
    Ok(BoundaryJump { psi_inside: e_in * factor, factor, compression: vg0 / C_LIGHT })
}

/// Report of the adiabaticity margins for a planned run. All entries are
/// diagnostics; nothing here fails a run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AdiabaticityReport {
    /// γ·k²c²·∫ sin⁴θcos²θ/g²N dt at k = 1/L_p. Must be ≪ 1.
    pub freq_condition: f64,
    /// γ·∫ θ̇²/(g²N + Ω²) dt. Must be ≪ 1.
    pub rotation_condition: f64,
    /// (g²N/γc)·L_p²/z — the depth budget; ≫ 1 means the propagation
    /// depth is well inside the z ≪ √α·L_p limit.
    pub depth_budget: f64,
    /// √α of the full medium: the maximum usable depth/pulse-length ratio.
    pub sqrt_alpha: f64,
    /// Characteristic control-change time over L_p/c; ≫ 1 lets the
    /// control-field retardation Ω(t−z/c) ≈ Ω(t) be ignored.
    pub retardation_ratio: f64,
    /// Lower bound (l_abs/c)·(v_g⁰/c) on the rotation time scale.
    pub rotation_time_floor: f64,
    /// Intervals where A(t) < 0 (reported, not clamped).
    pub a_negative_spans: Vec<(f64, f64)>,
}

/// Evaluate both adiabaticity conditions at k = 1/pulse_length over the
/// grid's time window, plus the depth and retardation margins at `depth`.
pub fn adiabaticity_check(
    schedule: &ControlSchedule,
    medium: &MediumParams,
    grid: &Grid,
    pulse_length: f64,
    depth: f64,
) -> Result<AdiabaticityReport, PolaritonError> {
    let grn = medium.g_root_n();
    let t1 = grid.t_final;
    ensure_schedule_domain(schedule, grn, 0.0, t1)?;
    let gamma = medium.gamma_ba;
    let k = 1.0 / pulse_length;

    let freq_integrand = |t: f64| -> f64 {
        match schedule.theta(grn, t) {
            Ok(theta) => {
                let (s, c) = theta.sin_cos();
                s.powi(4) * c * c / medium.g2n
            }
            Err(_) => f64::NAN,
        }
    };
    let rot_integrand = |t: f64| -> f64 {
        match schedule.theta_derivs(grn, t) {
            Ok(d) => {
                let s2 = d.theta.sin().powi(2);
                d.dtheta * d.dtheta * s2 / medium.g2n
            }
            Err(_) => f64::NAN,
        }
    };
    let freq_condition =
        gamma * k * k * C_LIGHT * C_LIGHT * adaptive_simpson(freq_integrand, 0.0, t1, QUADRATURE_TOL);
    let rotation_condition = gamma * adaptive_simpson(rot_integrand, 0.0, t1, QUADRATURE_TOL);
    if !freq_condition.is_finite() || !rotation_condition.is_finite() {
        return Err(PolaritonError::BadIntegrand);
    }

    // Ramp time scale: inverse of the peak rotation speed.
    let n = 2048;
    let mut max_dtheta = 0.0f64;
    for i in 0..=n {
        let t = t1 * i as f64 / n as f64;
        if let Ok(d) = schedule.theta_derivs(grn, t) {
            max_dtheta = max_dtheta.max(d.dtheta.abs());
        }
    }
    let ramp_time = if max_dtheta > 0.0 { 1.0 / max_dtheta } else { f64::INFINITY };

    let vg0 = eval_vg(schedule, medium, 0.0)?;
    let times: Vec<f64> = (0..=n).map(|i| t1 * i as f64 / n as f64).collect();
    let coeffs = correction_coefficients(schedule, medium, &times)?;

    Ok(AdiabaticityReport {
        freq_condition,
        rotation_condition,
        depth_budget: medium.g2n * pulse_length * pulse_length
            / (medium.gamma * C_LIGHT * depth),
        sqrt_alpha: medium.alpha().sqrt(),
        retardation_ratio: ramp_time * C_LIGHT / pulse_length,
        rotation_time_floor: (medium.absorption_length() / C_LIGHT) * (vg0 / C_LIGHT),
        a_negative_spans: coeffs.a_negative_spans(),
    })
}

fn eval_vg(
    schedule: &ControlSchedule,
    medium: &MediumParams,
    t: f64,
) -> Result<f64, PolaritonError> {
    let u = schedule.cot_theta(medium.g_root_n(), t)?;
    Ok(C_LIGHT * u * u / (1.0 + u * u))
}
