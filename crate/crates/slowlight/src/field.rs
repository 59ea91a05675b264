//! Sampled field and polariton state containers.
//!
//! The atomic variables are stored as spin-wave amplitudes: `sba` and `sbc`
//! are the collective √N·σ̃_ba and √N·σ̃_bc, scaled so they are directly
//! comparable with the probe envelope `e`. In this normalization the
//! polariton rotation is simply Ψ = cosθ·𝓔 − sinθ·sbc·e^{iΔkz} and the
//! medium only ever needs the combination g²N.

use num_complex::Complex64;

use crate::grid::Grid;

/// Probe envelope and atomic coherences on the spatial grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    /// Probe envelope 𝓔(z).
    pub e: Vec<Complex64>,
    /// Optical spin-wave amplitude √N·σ̃_ba(z).
    pub sba: Vec<Complex64>,
    /// Raman spin-wave amplitude √N·σ̃_bc(z).
    pub sbc: Vec<Complex64>,
}

impl FieldState {
    pub fn zeros(grid: &Grid, t: f64) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.nz];
        FieldState { t, e: z.clone(), sba: z.clone(), sbc: z }
    }

    pub fn len_matches(&self, grid: &Grid) -> bool {
        self.e.len() == grid.nz && self.sba.len() == grid.nz && self.sbc.len() == grid.nz
    }

    /// Largest |sbc|² on the grid — the weak-probe population proxy.
    /// In the low-intensity regime it must stay below the configured
    /// weak-field bound (1 in the default pulse normalization).
    pub fn max_sbc_sq(&self) -> f64 {
        self.sbc.iter().map(|s| s.norm_sqr()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .chain(self.sba.iter())
            .chain(self.sbc.iter())
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Dark (Ψ) and bright (Φ) polariton amplitudes on the spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PolaritonField {
    pub t: f64,
    pub psi: Vec<Complex64>,
    pub phi: Vec<Complex64>,
}

impl PolaritonField {
    pub fn zeros(grid: &Grid, t: f64) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.nz];
        PolaritonField { t, psi: z.clone(), phi: z }
    }

    pub fn len_matches(&self, grid: &Grid) -> bool {
        self.psi.len() == grid.nz && self.phi.len() == grid.nz
    }
}

/// A Gaussian envelope exp{−((z−center)/width)²}, sampled on the grid.
pub fn gaussian_envelope(grid: &Grid, center: f64, width: f64, amplitude: f64) -> Vec<Complex64> {
    grid.z_coords()
        .iter()
        .map(|&z| {
            let x = (z - center) / width;
            Complex64::new(amplitude * (-x * x).exp(), 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containers_match_grid() {
        let g = Grid::new(0.0, 8.0, 32, 0.1, 1.0).unwrap();
        let f = FieldState::zeros(&g, 0.0);
        assert!(f.len_matches(&g));
        let p = PolaritonField::zeros(&g, 0.0);
        assert!(p.len_matches(&g));
        assert_eq!(f.max_sbc_sq(), 0.0);
        assert!(f.is_finite());
    }

    #[test]
    fn gaussian_peaks_at_center() {
        let g = Grid::new(-16.0, 16.0, 64, 0.2, 1.0).unwrap();
        let env = gaussian_envelope(&g, 0.0, 4.0, 2.0);
        let j = g.index_of(0.0);
        assert!((env[j].re - 2.0).abs() < 1e-12);
        // tail at z = -16 is exp(-16) of the peak
        assert!(env[0].norm() < 2.0 * (-15.9f64).exp());
    }
}
