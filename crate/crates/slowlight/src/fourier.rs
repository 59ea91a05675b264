//! Thin wrappers around the discrete Fourier transform used by the
//! spectral propagators: wavenumber grids, spatial derivatives and exact
//! band-limited shifts on the periodic grid.
//!
//! Convention: fields are expanded as f(z) = Σ_k f̂(k)·e^{ikz}, so the
//! spatial derivative is multiplication by ik and a shift by Δ multiplies
//! each mode by e^{−ikΔ}.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Angular wavenumbers in FFT bin order for an nz-point grid of spacing dz.
pub fn wavenumbers(nz: usize, dz: f64) -> Vec<f64> {
    let dk = 2.0 * std::f64::consts::PI / (nz as f64 * dz);
    (0..nz)
        .map(|j| {
            let j = j as i64;
            let j = if j <= nz as i64 / 2 { j } else { j - nz as i64 };
            j as f64 * dk
        })
        .collect()
}

pub fn fft(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(data.len()).process(data);
}

pub fn ifft(data: &mut [Complex64]) {
    let n = data.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(data);
    let scale = 1.0 / n as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Spectral ∂/∂z on the periodic grid. The Nyquist mode is zeroed, as
/// usual for an odd-order derivative.
pub fn spectral_derivative(field: &[Complex64], dz: f64) -> Vec<Complex64> {
    let nz = field.len();
    let k = wavenumbers(nz, dz);
    let mut hat = field.to_vec();
    fft(&mut hat);
    for (j, v) in hat.iter_mut().enumerate() {
        if nz % 2 == 0 && j == nz / 2 {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= Complex64::new(0.0, k[j]);
        }
    }
    ifft(&mut hat);
    hat
}

/// Shift a band-limited periodic field right by `delta`:
/// output(z) = input(z − delta), exact for resolved spectra.
pub fn fourier_shift(field: &[Complex64], dz: f64, delta: f64) -> Vec<Complex64> {
    let nz = field.len();
    let k = wavenumbers(nz, dz);
    let mut hat = field.to_vec();
    fft(&mut hat);
    for (j, v) in hat.iter_mut().enumerate() {
        let phase = Complex64::from_polar(1.0, -k[j] * delta);
        *v *= phase;
    }
    ifft(&mut hat);
    hat
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(nz: usize, dz: f64, z0: f64, w: f64) -> Vec<Complex64> {
        (0..nz)
            .map(|j| {
                let z = -0.5 * nz as f64 * dz + j as f64 * dz;
                Complex64::new((-((z - z0) / w).powi(2)).exp(), 0.0)
            })
            .collect()
    }

    #[test]
    fn derivative_of_gaussian_matches_analytic() {
        let (nz, dz, w) = (256, 0.25, 4.0);
        let f = gaussian(nz, dz, 0.0, w);
        let df = spectral_derivative(&f, dz);
        for j in 0..nz {
            let z = -0.5 * nz as f64 * dz + j as f64 * dz;
            let expected = -2.0 * z / (w * w) * (-(z / w).powi(2)).exp();
            assert!((df[j].re - expected).abs() < 1e-10, "j={j}");
            assert!(df[j].im.abs() < 1e-10);
        }
    }

    #[test]
    fn shift_moves_pulse_right() {
        let (nz, dz, w) = (256, 0.25, 4.0);
        let f = gaussian(nz, dz, -5.0, w);
        let g = fourier_shift(&f, dz, 5.0);
        let h = gaussian(nz, dz, 0.0, w);
        for j in 0..nz {
            assert!((g[j] - h[j]).norm() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let (nz, dz) = (128, 0.5);
        let f = gaussian(nz, dz, 3.0, 5.0);
        let mut g = f.clone();
        fft(&mut g);
        ifft(&mut g);
        for j in 0..nz {
            assert!((g[j] - f[j]).norm() < 1e-13);
        }
    }
}
