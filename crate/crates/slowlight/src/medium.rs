//! Medium parameters of the Λ-type ensemble and the two basic EIT
//! relations: mixing angle and group index.
//!
//! Only the collective combination g²N enters the 1-D propagation problem,
//! so the medium is parameterized by it directly; the single-atom coupling
//! and the atom number never appear separately outside [`crate::singlemode`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C_LIGHT;

#[derive(Debug, Error, PartialEq)]
pub enum MediumError {
    #[error("medium parameter out of range: {0}")]
    OutOfRange(String),
}

/// Collective coupling, decay rates and geometry of the Λ medium.
///
/// Rates are in units of γ and lengths in units of c/γ unless the caller
/// chooses otherwise; the relations below hold in any consistent system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Collective coupling strength g²N (square of the collective vacuum
    /// Rabi frequency g√N), units rate².
    pub g2n: f64,
    /// Excited-state decay rate γ, units rate.
    pub gamma: f64,
    /// Optical coherence decay rate γ_ba, units rate.
    pub gamma_ba: f64,
    /// Raman (b–c) coherence decay rate γ₀, units rate.
    pub gamma0: f64,
    /// Medium length L, units length.
    pub length: f64,
    /// Two-photon momentum mismatch Δk, units 1/length. Zero in the
    /// co-propagating, Doppler-free geometry (the default).
    pub delta_k: f64,
}

impl MediumParams {
    /// Medium with γ_ba = γ and Δk = 0, the configuration used by all
    /// figure presets.
    pub fn new(g2n: f64, gamma: f64, gamma0: f64, length: f64) -> Result<Self, MediumError> {
        let m = MediumParams {
            g2n,
            gamma,
            gamma_ba: gamma,
            gamma0,
            length,
            delta_k: 0.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_gamma_ba(mut self, gamma_ba: f64) -> Self {
        self.gamma_ba = gamma_ba;
        self
    }

    pub fn with_delta_k(mut self, delta_k: f64) -> Self {
        self.delta_k = delta_k;
        self
    }

    pub fn validate(&self) -> Result<(), MediumError> {
        if !(self.g2n > 0.0) {
            return Err(MediumError::OutOfRange(format!("g2n = {} (need > 0)", self.g2n)));
        }
        if !(self.gamma > 0.0) {
            return Err(MediumError::OutOfRange(format!("gamma = {} (need > 0)", self.gamma)));
        }
        if !(self.gamma_ba >= 0.0) {
            return Err(MediumError::OutOfRange(format!(
                "gamma_ba = {} (need >= 0)",
                self.gamma_ba
            )));
        }
        if !(self.gamma0 >= 0.0) {
            return Err(MediumError::OutOfRange(format!("gamma0 = {} (need >= 0)", self.gamma0)));
        }
        if !(self.length > 0.0) {
            return Err(MediumError::OutOfRange(format!("length = {} (need > 0)", self.length)));
        }
        if !self.delta_k.is_finite() {
            return Err(MediumError::OutOfRange("delta_k not finite".into()));
        }
        Ok(())
    }

    /// Collective vacuum Rabi frequency g√N.
    pub fn g_root_n(&self) -> f64 {
        self.g2n.sqrt()
    }

    /// Opacity of the medium without EIT, α = g²N·L/(γ·c).
    ///
    /// Always recomputed from the stored parameters, never cached, so it can
    /// not go stale.
    pub fn alpha(&self) -> f64 {
        self.g2n * self.length / (self.gamma * C_LIGHT)
    }

    /// Opacity accumulated over a propagation depth `z` ≤ L.
    pub fn alpha_at_depth(&self, z: f64) -> f64 {
        self.g2n * z / (self.gamma * C_LIGHT)
    }

    /// Resonant absorption length without EIT, l_abs = cγ/g²N.
    pub fn absorption_length(&self) -> f64 {
        C_LIGHT * self.gamma / self.g2n
    }
}

/// Group index n_g = g²N/Ω². A vanishing drive makes it infinite, which is
/// a valid limit (stopped light), not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupIndex {
    Finite(f64),
    Infinite,
}

impl GroupIndex {
    /// Group velocity v_g = c/(1 + n_g), equal to c·cos²θ since
    /// tan²θ = n_g.
    pub fn group_velocity(&self) -> f64 {
        match self {
            GroupIndex::Finite(ng) => C_LIGHT / (1.0 + ng),
            GroupIndex::Infinite => 0.0,
        }
    }

    pub fn unwrap_finite(&self) -> f64 {
        match self {
            GroupIndex::Finite(ng) => *ng,
            GroupIndex::Infinite => panic!("group index is infinite"),
        }
    }
}

/// Mixing angle θ = arctan(g√N/Ω) ∈ [0, π/2].
///
/// θ = 0 is a pure photon (strong drive), θ = π/2 a pure spin wave
/// (drive off). tan²θ equals the group index.
pub fn mixing_angle(omega: f64, medium: &MediumParams) -> f64 {
    debug_assert!(omega >= 0.0, "control Rabi frequency must be non-negative");
    // atan2 handles omega = 0 -> pi/2 exactly.
    f64::atan2(medium.g_root_n(), omega)
}

/// Group index n_g = g²N/Ω²; `Infinite` when the drive is off.
pub fn group_index(omega: f64, medium: &MediumParams) -> GroupIndex {
    if omega == 0.0 {
        GroupIndex::Infinite
    } else {
        GroupIndex::Finite(medium.g2n / (omega * omega))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn medium(g2n: f64) -> MediumParams {
        MediumParams::new(g2n, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn mixing_angle_limits() {
        let m = medium(2.5);
        let grn = m.g_root_n();
        assert!((mixing_angle(grn, &m) - FRAC_PI_4).abs() < 1e-15);
        assert!(mixing_angle(1e12, &m) < 2e-12);
        assert_eq!(mixing_angle(0.0, &m), FRAC_PI_2);
    }

    #[test]
    fn group_index_closed_form() {
        let m = medium(2.5);
        match group_index(0.5, &m) {
            GroupIndex::Finite(ng) => assert!((ng - 10.0).abs() < 1e-14),
            GroupIndex::Infinite => panic!("expected finite"),
        }
        // Omega = g sqrt(N): n_g = 1 and v_g = c/2.
        match group_index(m.g_root_n(), &m) {
            GroupIndex::Finite(ng) => {
                assert!((ng - 1.0).abs() < 1e-14);
                let vg = GroupIndex::Finite(ng).group_velocity();
                assert!((vg - 0.5 * C_LIGHT).abs() < 1e-14);
            }
            GroupIndex::Infinite => panic!("expected finite"),
        }
        match group_index(1e9, &m) {
            GroupIndex::Finite(ng) => assert!(ng < 1e-17),
            GroupIndex::Infinite => panic!("expected finite"),
        }
        assert_eq!(group_index(0.0, &m), GroupIndex::Infinite);
        assert_eq!(group_index(0.0, &m).group_velocity(), 0.0);
    }

    #[test]
    fn tan_squared_mixing_angle_equals_group_index() {
        // Consistency across six orders of magnitude in the drive.
        let m = medium(2.5);
        let mut omega = 1e-3;
        while omega <= 1e3 {
            let theta = mixing_angle(omega, &m);
            let ng = group_index(omega, &m).unwrap_finite();
            let t2 = theta.tan().powi(2);
            assert!(
                ((t2 - ng) / ng).abs() < 1e-12,
                "omega = {omega}: tan^2 = {t2}, n_g = {ng}"
            );
            omega *= 3.7;
        }
    }

    #[test]
    fn alpha_is_recomputed_exactly() {
        let m = MediumParams::new(2.5, 1.0, 0.0, 250.0).unwrap();
        assert_eq!(m.alpha(), 2.5 * 250.0 / (1.0 * C_LIGHT));
        assert_eq!(m.alpha(), 625.0);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(MediumParams::new(0.0, 1.0, 0.0, 1.0).is_err());
        assert!(MediumParams::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(MediumParams::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(MediumParams::new(1.0, 1.0, 0.0, 0.0).is_err());
    }
}
