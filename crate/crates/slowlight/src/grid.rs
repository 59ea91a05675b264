//! Uniform periodic spatial grid and time-step bookkeeping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C_LIGHT;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("nz = {0} is not a power of two (required by the DFT propagator)")]
    NotPowerOfTwo(usize),
    #[error("time step {dt} violates the advection bound dt <= 0.5 dz/c = {bound}")]
    CflViolation { dt: f64, bound: f64 },
    #[error("grid parameter out of range: {0}")]
    OutOfRange(String),
}

/// Spatial/temporal discretization shared by the propagation solvers.
///
/// The grid is periodic: z_j = z_min + j·dz for j = 0..nz, with z_max
/// excluded. The domain must be sized so pulses never approach the edges;
/// the solvers watch for that and fail loudly rather than wrap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub nz: usize,
    pub dt: f64,
    pub t_final: f64,
}

impl Grid {
    pub fn new(z_min: f64, z_max: f64, nz: usize, dt: f64, t_final: f64) -> Result<Self, GridError> {
        let g = Grid { z_min, z_max, nz, dt, t_final };
        g.validate()?;
        Ok(g)
    }

    /// Like [`Grid::new`] but with dt chosen as the largest step satisfying
    /// the advection bound that divides t_final into whole steps.
    pub fn with_auto_dt(z_min: f64, z_max: f64, nz: usize, t_final: f64) -> Result<Self, GridError> {
        let dz = (z_max - z_min) / nz as f64;
        let bound = 0.5 * dz / C_LIGHT;
        let steps = (t_final / bound).ceil().max(1.0);
        Grid::new(z_min, z_max, nz, t_final / steps, t_final)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.nz == 0 || !self.nz.is_power_of_two() {
            return Err(GridError::NotPowerOfTwo(self.nz));
        }
        if !(self.z_max > self.z_min) {
            return Err(GridError::OutOfRange(format!(
                "z_max = {} must exceed z_min = {}",
                self.z_max, self.z_min
            )));
        }
        if !(self.dt > 0.0) || !(self.t_final > 0.0) {
            return Err(GridError::OutOfRange("dt and t_final must be positive".into()));
        }
        let bound = 0.5 * self.dz() / C_LIGHT;
        if self.dt > bound * (1.0 + 1e-12) {
            return Err(GridError::CflViolation { dt: self.dt, bound });
        }
        Ok(())
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / self.nz as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.dz()
    }

    pub fn z_coords(&self) -> Vec<f64> {
        (0..self.nz).map(|j| self.z(j)).collect()
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round().max(1.0) as usize
    }

    /// Index of the grid point nearest to z.
    pub fn index_of(&self, z: f64) -> usize {
        let j = ((z - self.z_min) / self.dz()).round() as isize;
        j.clamp(0, self.nz as isize - 1) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 10.0, 64, 0.05, 1.0).is_ok());
        assert!(matches!(
            Grid::new(0.0, 10.0, 63, 0.05, 1.0),
            Err(GridError::NotPowerOfTwo(63))
        ));
        // dz = 10/64 = 0.15625, bound = 0.078125
        assert!(matches!(
            Grid::new(0.0, 10.0, 64, 0.1, 1.0),
            Err(GridError::CflViolation { .. })
        ));
        assert!(Grid::new(0.0, -1.0, 64, 0.01, 1.0).is_err());
    }

    #[test]
    fn auto_dt_respects_cfl_and_divides_t_final() {
        let g = Grid::with_auto_dt(-10.0, 10.0, 128, 7.3).unwrap();
        assert!(g.dt <= 0.5 * g.dz() / C_LIGHT + 1e-15);
        let steps = g.t_final / g.dt;
        assert!((steps - steps.round()).abs() < 1e-9);
    }

    #[test]
    fn coordinates_are_uniform() {
        let g = Grid::new(-4.0, 4.0, 16, 0.1, 1.0).unwrap();
        let z = g.z_coords();
        assert_eq!(z.len(), 16);
        assert_eq!(z[0], -4.0);
        assert!((z[1] - z[0] - 0.5).abs() < 1e-15);
        assert_eq!(g.index_of(3.49), 15);
        assert_eq!(g.index_of(-4.0), 0);
    }
}
