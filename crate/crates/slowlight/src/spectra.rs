//! Closed-form frequency-domain diagnostics: susceptibility, transmission
//! and transparency window, refractive index and boundary reflection,
//! pulse spectra and storage-capacity bounds.

use num_complex::Complex64;
use thiserror::Error;

use crate::fourier;
use crate::medium::MediumParams;
use crate::C_LIGHT;

#[derive(Debug, Error, PartialEq)]
pub enum SpectraError {
    #[error("susceptibility evaluated at the dressed-state pole (delta^2 ~ |Omega|^2, gamma*delta ~ 0)")]
    NearPole,
    #[error("refractive index evanescent: 1 + (2c/v_g)(omega-omega_ab)/omega_ab = {0} < 0")]
    Evanescent(f64),
    #[error("pulse not contained in the window: fraction {0:.2e} of the energy lies outside")]
    TruncatedPulse(f64),
    #[error("invalid spectrum input: {0}")]
    BadInput(String),
}

/// Susceptibility of an ideal homogeneous EIT medium with a resonant
/// drive, as a function of the probe detuning δ = ν − ω_ac:
///
///   χ(δ) = (n_g/kc)·|Ω|²·δ / (|Ω|² − δ² − iγδ)
///
/// Near resonance Re χ ≈ (n_g/kc)·δ and Im χ ≈ (n_g/kc)·δ²γ/|Ω|².
pub fn susceptibility(
    delta: f64,
    medium: &MediumParams,
    omega_drive: f64,
    k: f64,
) -> Result<Complex64, SpectraError> {
    let om2 = omega_drive * omega_drive;
    let den = Complex64::new(om2 - delta * delta, -medium.gamma * delta);
    if den.norm() < 1e-12 * om2.max(delta * delta) {
        return Err(SpectraError::NearPole);
    }
    let ng = medium.g2n / om2;
    Ok(ng / (k * C_LIGHT) * om2 * delta / den)
}

/// Intensity transmission after depth z, both from the exact χ and from
/// the Gaussian transparency-window approximation exp{−δ²/Δω_tr²}.
#[derive(Debug, Clone, Copy)]
pub struct TransmissionSample {
    pub exact: f64,
    pub gaussian: f64,
}

pub fn transmission(
    delta: f64,
    z: f64,
    medium: &MediumParams,
    omega_drive: f64,
    k: f64,
) -> Result<TransmissionSample, SpectraError> {
    let chi = susceptibility(delta, medium, omega_drive, k)?;
    let width = transparency_width(medium, omega_drive, z).width;
    Ok(TransmissionSample {
        exact: (-k * z * chi.im).exp(),
        gaussian: (-(delta / width).powi(2)).exp(),
    })
}

/// Transparency window width in two algebraically identical forms:
/// Δω_tr = (|Ω|²/γ)/√α  and  Δω_tr = √α/τ_d with τ_d = n_g·l/c.
#[derive(Debug, Clone, Copy)]
pub struct TransparencyWidth {
    pub width: f64,
    pub via_delay_time: f64,
    /// Pulse delay time τ_d = n_g·l/c at this depth.
    pub delay_time: f64,
}

pub fn transparency_width(medium: &MediumParams, omega_drive: f64, l: f64) -> TransparencyWidth {
    let alpha = medium.alpha_at_depth(l);
    let width = omega_drive * omega_drive / (medium.gamma * alpha.sqrt());
    let ng = medium.g2n / (omega_drive * omega_drive);
    let delay_time = ng * l / C_LIGHT;
    TransparencyWidth { width, via_delay_time: alpha.sqrt() / delay_time, delay_time }
}

/// Measured 1/e full width of the exact transmission curve at depth z,
/// found by bisection on δ > 0 (the curve is even in δ).
pub fn measured_transmission_width(
    medium: &MediumParams,
    omega_drive: f64,
    z: f64,
) -> Result<f64, SpectraError> {
    let target = (-1.0f64).exp();
    let t_at = |d: f64| -> Result<f64, SpectraError> {
        Ok(transmission(d, z, medium, omega_drive, 1.0)?.exact)
    };
    // bracket: expand until below 1/e (stay under the dressed pole at Omega)
    let mut hi = transparency_width(medium, omega_drive, z).width * 0.5;
    while t_at(hi)? > target {
        hi *= 1.3;
        if hi > omega_drive * 0.999 {
            return Err(SpectraError::BadInput(
                "transmission never drops to 1/e below the pole".into(),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + hi) // half-width * 2 = full width
}

/// Storage-capacity bounds set by the opacity and the Raman dephasing.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StorageBounds {
    /// max τ_d/τ_p = √α
    pub max_delay_ratio: f64,
    /// max L/L_p = √α
    pub max_length_ratio: f64,
    /// max τ_d = 1/γ_bc; `None` flags dephasing-unlimited storage.
    pub max_delay_time: Option<f64>,
}

pub fn storage_bounds(alpha: f64, gamma_bc: f64) -> StorageBounds {
    let root = alpha.sqrt();
    StorageBounds {
        max_delay_ratio: root,
        max_length_ratio: root,
        max_delay_time: if gamma_bc > 0.0 { Some(1.0 / gamma_bc) } else { None },
    }
}

/// Refractive index near resonance of the idealized, resonantly driven
/// 3-level medium: n(ω) ≈ √(1 + (2c/v_g⁰)(ω−ω_ab)/ω_ab).
pub fn refractive_index(omega: f64, vg0: f64, omega_ab: f64) -> Result<f64, SpectraError> {
    let radicand = 1.0 + (2.0 * C_LIGHT / vg0) * (omega - omega_ab) / omega_ab;
    if radicand < 0.0 {
        return Err(SpectraError::Evanescent(radicand));
    }
    Ok(radicand.sqrt())
}

/// Normal-incidence reflection coefficient, exact |(1−n)/(1+n)|² and the
/// near-resonance form Δω²/(2(v_g⁰/c)ω_ab + Δω)².
#[derive(Debug, Clone, Copy)]
pub struct ReflectionSample {
    pub exact: f64,
    pub near_resonance: f64,
}

pub fn reflection(omega: f64, vg0: f64, omega_ab: f64) -> Result<ReflectionSample, SpectraError> {
    let n = refractive_index(omega, vg0, omega_ab)?;
    let dw = omega - omega_ab;
    let denom = 2.0 * (vg0 / C_LIGHT) * omega_ab + dw;
    Ok(ReflectionSample {
        exact: ((1.0 - n) / (1.0 + n)).powi(2),
        near_resonance: dw * dw / (denom * denom),
    })
}

/// Spectrum of a probe time series at a fixed position.
#[derive(Debug, Clone)]
pub struct PulseSpectrum {
    /// Angular frequencies (two-sided, FFT order sorted ascending).
    pub omega: Vec<f64>,
    /// Spectral density S(ω) = |𝓔̂(ω)|².
    pub s: Vec<f64>,
    /// Root-mean-square width about the centroid (primary width metric).
    pub rms_width: f64,
    /// Full width at half maximum of S.
    pub fwhm: f64,
}

/// Windowed discrete spectrum of 𝓔(z₀, t). The window is rectangular over
/// `[t_lo, t_hi]`; the pulse must be essentially contained in it (energy
/// outside below 1e−4 of the total) or `TruncatedPulse` is returned.
pub fn pulse_spectrum(
    dt: f64,
    values: &[Complex64],
    window: (f64, f64),
) -> Result<PulseSpectrum, SpectraError> {
    if values.len() < 8 {
        return Err(SpectraError::BadInput("need at least 8 samples".into()));
    }
    if !(dt > 0.0) {
        return Err(SpectraError::BadInput("dt must be positive".into()));
    }
    let (t_lo, t_hi) = window;
    let total: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return Err(SpectraError::BadInput("time series is identically zero".into()));
    }
    let mut inside: f64 = 0.0;
    let mut windowed: Vec<Complex64> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let t = i as f64 * dt;
        if t >= t_lo && t <= t_hi {
            inside += v.norm_sqr();
            windowed.push(v);
        }
    }
    let outside_fraction = 1.0 - inside / total;
    if outside_fraction > 1e-4 {
        return Err(SpectraError::TruncatedPulse(outside_fraction));
    }

    // zero-pad to the next power of two for the FFT
    let n = windowed.len().next_power_of_two().max(256);
    windowed.resize(n, Complex64::new(0.0, 0.0));
    fourier::fft(&mut windowed);

    let omega_bins = fourier::wavenumbers(n, dt); // same algebra as k-grid
    let mut pairs: Vec<(f64, f64)> =
        omega_bins.iter().zip(windowed.iter()).map(|(&w, v)| (w, v.norm_sqr())).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let omega: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let s: Vec<f64> = pairs.iter().map(|p| p.1).collect();

    let norm: f64 = s.iter().sum();
    let mean: f64 = omega.iter().zip(&s).map(|(w, v)| w * v).sum::<f64>() / norm;
    let var: f64 =
        omega.iter().zip(&s).map(|(w, v)| (w - mean).powi(2) * v).sum::<f64>() / norm;
    let rms_width = var.sqrt();

    let fwhm = full_width_half_max(&omega, &s);

    Ok(PulseSpectrum { omega, s, rms_width, fwhm })
}

fn full_width_half_max(x: &[f64], y: &[f64]) -> f64 {
    let (imax, &ymax) =
        y.iter().enumerate().max_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap()).unwrap();
    let half = 0.5 * ymax;
    let mut left = x[0];
    for i in (1..=imax).rev() {
        if y[i - 1] <= half && y[i] > half {
            let f = (half - y[i - 1]) / (y[i] - y[i - 1]);
            left = x[i - 1] + f * (x[i] - x[i - 1]);
            break;
        }
    }
    let mut right = *x.last().unwrap();
    for i in imax..x.len() - 1 {
        if y[i] > half && y[i + 1] <= half {
            let f = (y[i] - half) / (y[i] - y[i + 1]);
            right = x[i] + f * (x[i + 1] - x[i]);
            break;
        }
    }
    right - left
}

/// Shape comparison of two spectra: relative L2 distance of the
/// energy-normalized densities, interpolation-free (same bins required).
pub fn spectrum_shape_distance(a: &PulseSpectrum, b: &PulseSpectrum) -> Result<f64, SpectraError> {
    if a.s.len() != b.s.len() {
        return Err(SpectraError::BadInput("spectra have different bin counts".into()));
    }
    let na: f64 = a.s.iter().sum();
    let nb: f64 = b.s.iter().sum();
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.s.iter().zip(&b.s) {
        let d = x / na - y / nb;
        num += d * d;
        den += (x / na).powi(2);
    }
    Ok((num / den).sqrt())
}
