//! Time-dependent control-field schedules.
//!
//! Schedules are stored in the form the stopping protocol is usually
//! written in: cotθ(t), with the drive recovered as Ω(t) = g√N·cotθ(t).
//! The drive is real and non-negative; θ(t) ∈ [0, π/2] always.
//!
//! Two smooth parametric families cover the deceleration/re-acceleration
//! protocols, plus a constant drive and a tabulated form with monotone
//! cubic interpolation for externally supplied ramps.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::medium::MediumParams;
use crate::C_LIGHT;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("time {t} outside tabulated domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },
    #[error("tabulated schedule invalid: {0}")]
    BadTable(String),
    #[error(
        "tabulated schedule too sparse for stable second derivatives \
         (refinement changed curvature by {rel_change:.2e} at t = {t})"
    )]
    TooSparse { t: f64, rel_change: f64 },
}

/// cotθ(t) and its first two time derivatives.
#[derive(Debug, Clone, Copy)]
struct CotDerivs {
    u: f64,
    du: f64,
    ddu: f64,
}

/// θ(t) with its first two time derivatives, for the non-adiabatic
/// correction coefficients.
#[derive(Debug, Clone, Copy)]
pub struct ThetaDerivs {
    pub theta: f64,
    pub dtheta: f64,
    pub ddtheta: f64,
}

/// Joint sample of the schedule at one instant: drive, mixing angle and
/// group velocity, mutually consistent.
#[derive(Debug, Clone, Copy)]
pub struct ScheduleSample {
    pub omega: f64,
    pub theta: f64,
    pub v_g: f64,
}

/// Tabulated (t, cotθ) samples interpolated with a monotone cubic
/// (Fritsch–Carlson) so no overshoot can push cotθ negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedSchedule {
    pub t: Vec<f64>,
    pub cot_theta: Vec<f64>,
    #[serde(skip)]
    slopes: Vec<f64>,
}

/// A control-field schedule, stored as cotθ(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ControlSchedule {
    /// Constant drive Ω.
    Constant { omega: f64 },
    /// cotθ(t) = a·(1 − b·tanh[c(t−t₁)] + b·tanh[c(t−t₂)]).
    ///
    /// With b = 1/2 this rotates θ from ~arccot(a) to π/2 at t₁ and back
    /// at t₂ (full stop-and-release cycle).
    TanhRamps { a: f64, b: f64, c: f64, t1: f64, t2: f64 },
    /// cotθ(t) = a·(1 − (2/π)·arccot[q·(1 − ½tanh[c(t−t₁)] + ½tanh[c(t−t₂)])]).
    ///
    /// A gentler deceleration profile whose plateau reaches cotθ = 0 only
    /// asymptotically.
    ArccotTanh { a: f64, q: f64, c: f64, t1: f64, t2: f64 },
    Tabulated(TabulatedSchedule),
}

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

impl TabulatedSchedule {
    pub fn new(t: Vec<f64>, cot_theta: Vec<f64>) -> Result<Self, ScheduleError> {
        if t.len() != cot_theta.len() {
            return Err(ScheduleError::BadTable("t/cot length mismatch".into()));
        }
        if t.len() < 3 {
            return Err(ScheduleError::BadTable("need at least 3 samples".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ScheduleError::BadTable("t not strictly increasing".into()));
        }
        if cot_theta.iter().any(|&u| u < 0.0 || !u.is_finite()) {
            return Err(ScheduleError::BadTable("cot theta must be finite and >= 0".into()));
        }
        let mut table = TabulatedSchedule { t, cot_theta, slopes: Vec::new() };
        table.slopes = table.fritsch_carlson_slopes();
        Ok(table)
    }

    /// Endpoint slopes one-sided, interior slopes limited so each cubic
    /// piece is monotone wherever the data are.
    fn fritsch_carlson_slopes(&self) -> Vec<f64> {
        let n = self.t.len();
        let h: Vec<f64> = self.t.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1)
            .map(|i| (self.cot_theta[i + 1] - self.cot_theta[i]) / h[i])
            .collect();
        let mut m = vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                // Weighted harmonic mean keeps the interpolant monotone.
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        m
    }

    fn domain(&self) -> (f64, f64) {
        (self.t[0], *self.t.last().unwrap())
    }

    fn eval(&self, t: f64) -> Result<f64, ScheduleError> {
        let (lo, hi) = self.domain();
        if t < lo || t > hi {
            return Err(ScheduleError::OutOfDomain { t, lo, hi });
        }
        let i = match self.t.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.cot_theta[i]),
            Err(i) => i - 1,
        };
        let i = i.min(self.t.len() - 2);
        let h = self.t[i + 1] - self.t[i];
        let s = (t - self.t[i]) / h;
        let (y0, y1) = (self.cot_theta[i], self.cot_theta[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1;
        // The monotone interpolant cannot overshoot below the data, but
        // guard against rounding at u ~ 0.
        Ok(v.max(0.0))
    }

    fn min_spacing(&self) -> f64 {
        self.t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

impl ControlSchedule {
    /// cotθ(t). For the constant family this needs the collective coupling
    /// g√N of the medium it drives.
    pub fn cot_theta(&self, g_root_n: f64, t: f64) -> Result<f64, ScheduleError> {
        match self {
            ControlSchedule::Constant { omega } => Ok(omega / g_root_n),
            ControlSchedule::TanhRamps { a, b, c, t1, t2 } => {
                Ok(a * (1.0 - b * (c * (t - t1)).tanh() + b * (c * (t - t2)).tanh()))
            }
            ControlSchedule::ArccotTanh { a, q, c, t1, t2 } => {
                let w = 1.0 - 0.5 * (c * (t - t1)).tanh() + 0.5 * (c * (t - t2)).tanh();
                Ok(a * (1.0 - std::f64::consts::FRAC_2_PI * f64::atan2(1.0, q * w)))
            }
            ControlSchedule::Tabulated(tab) => tab.eval(t),
        }
    }

    fn cot_derivs(&self, g_root_n: f64, t: f64) -> Result<CotDerivs, ScheduleError> {
        match self {
            ControlSchedule::Constant { omega } => {
                Ok(CotDerivs { u: omega / g_root_n, du: 0.0, ddu: 0.0 })
            }
            ControlSchedule::TanhRamps { a, b, c, t1, t2 } => {
                let (x1, x2) = (c * (t - t1), c * (t - t2));
                let u = a * (1.0 - b * x1.tanh() + b * x2.tanh());
                let du = a * b * c * (-sech2(x1) + sech2(x2));
                let ddu =
                    2.0 * a * b * c * c * (sech2(x1) * x1.tanh() - sech2(x2) * x2.tanh());
                Ok(CotDerivs { u, du, ddu })
            }
            ControlSchedule::ArccotTanh { a, q, c, t1, t2 } => {
                let (x1, x2) = (c * (t - t1), c * (t - t2));
                let w = 1.0 - 0.5 * x1.tanh() + 0.5 * x2.tanh();
                let dw = 0.5 * c * (-sech2(x1) + sech2(x2));
                let ddw = c * c * (sech2(x1) * x1.tanh() - sech2(x2) * x2.tanh());
                let den = 1.0 + q * q * w * w;
                let u = a * (1.0 - std::f64::consts::FRAC_2_PI * f64::atan2(1.0, q * w));
                let pref = a * std::f64::consts::FRAC_2_PI * q;
                let du = pref * dw / den;
                let ddu = pref * (ddw * den - 2.0 * q * q * w * dw * dw) / (den * den);
                Ok(CotDerivs { u, du, ddu })
            }
            ControlSchedule::Tabulated(tab) => {
                // Fourth-order central differences on the interpolant. The
                // curvature from a knot-spanning stencil must agree with a
                // within-piece stencil, otherwise the table is too sparse
                // to define second derivatives.
                let u = tab.eval(t)?;
                let spacing = tab.min_spacing();
                let (lo, hi) = tab.domain();
                let stencil = |tc: f64, h: f64| -> Result<(f64, f64), ScheduleError> {
                    let um2 = tab.eval(tc - 2.0 * h)?;
                    let um1 = tab.eval(tc - h)?;
                    let u0 = tab.eval(tc)?;
                    let up1 = tab.eval(tc + h)?;
                    let up2 = tab.eval(tc + 2.0 * h)?;
                    Ok((
                        (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * h),
                        (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * h * h),
                    ))
                };
                let h_coarse = spacing.min((hi - lo) / 4.0);
                // keep the widest stencil inside the domain (slight bias at
                // the edges, where ramps are flat anyway)
                let tc = t.clamp(lo + 2.0 * h_coarse, hi - 2.0 * h_coarse);
                let h_fine = (spacing / 8.0).max(1e-9);
                let (du, ddu) = stencil(tc, h_fine)?;
                let (_, ddu_coarse) = stencil(tc, h_coarse)?;
                let scale = ddu.abs().max(ddu_coarse.abs());
                let rel_change = if scale > 0.0 { (ddu - ddu_coarse).abs() / scale } else { 0.0 };
                if rel_change > 0.25 && scale > 1e-7 {
                    return Err(ScheduleError::TooSparse { t, rel_change });
                }
                Ok(CotDerivs { u, du, ddu })
            }
        }
    }

    /// Mixing angle θ(t) = arccot(cotθ(t)) ∈ (0, π/2].
    pub fn theta(&self, g_root_n: f64, t: f64) -> Result<f64, ScheduleError> {
        Ok(f64::atan2(1.0, self.cot_theta(g_root_n, t)?))
    }

    /// θ, θ̇ and θ̈, propagated analytically from the cotθ family where
    /// parametric and by finite differences for tabulated schedules.
    pub fn theta_derivs(&self, g_root_n: f64, t: f64) -> Result<ThetaDerivs, ScheduleError> {
        let CotDerivs { u, du, ddu } = self.cot_derivs(g_root_n, t)?;
        let den = 1.0 + u * u;
        Ok(ThetaDerivs {
            theta: f64::atan2(1.0, u),
            dtheta: -du / den,
            ddtheta: (-ddu * den + 2.0 * u * du * du) / (den * den),
        })
    }

    /// Control Rabi frequency Ω(t) = g√N·cotθ(t) ≥ 0.
    pub fn omega(&self, g_root_n: f64, t: f64) -> Result<f64, ScheduleError> {
        Ok(g_root_n * self.cot_theta(g_root_n, t)?)
    }

    /// Largest Ω over [t0, t1], sampled densely; used for integrator
    /// stability bounds.
    pub fn omega_max(&self, g_root_n: f64, t0: f64, t1: f64) -> f64 {
        let n = 2048;
        (0..=n)
            .map(|i| t0 + (t1 - t0) * i as f64 / n as f64)
            .filter_map(|t| self.omega(g_root_n, t).ok())
            .fold(0.0, f64::max)
    }
}

/// Evaluate a schedule against a medium: (Ω, θ, v_g) with v_g = c·cos²θ,
/// all three consistent with the mixing-angle relation.
pub fn eval_schedule(
    s: &ControlSchedule,
    medium: &MediumParams,
    t: f64,
) -> Result<ScheduleSample, ScheduleError> {
    let u = s.cot_theta(medium.g_root_n(), t)?;
    let theta = f64::atan2(1.0, u);
    // cos^2 theta = u^2/(1+u^2), exact in the stored variable.
    let v_g = C_LIGHT * u * u / (1.0 + u * u);
    Ok(ScheduleSample { omega: medium.g_root_n() * u, theta, v_g })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3_schedule() -> ControlSchedule {
        ControlSchedule::TanhRamps { a: 100.0, b: 0.5, c: 0.1, t1: 15.0, t2: 125.0 }
    }

    fn fig6_schedule() -> ControlSchedule {
        ControlSchedule::ArccotTanh { a: 0.363, q: 5.0, c: 0.005, t1: 2000.0, t2: 3200.0 }
    }

    fn medium(g2n: f64) -> MediumParams {
        MediumParams::new(g2n, 1.0, 0.0, 100.0).unwrap()
    }

    #[test]
    fn fig3_plateau_is_stopped() {
        // Between the ramps the drive is off to within the tanh tails.
        let m = medium(100.0);
        let s = fig3_schedule();
        let u = s.cot_theta(m.g_root_n(), 70.0).unwrap();
        assert!((u - 3.3402843696295204e-3).abs() < 1e-12);
        let sample = eval_schedule(&s, &m, 70.0).unwrap();
        assert!(u < 0.01);
        assert!(sample.v_g < 1e-4 * C_LIGHT);
        assert!((sample.v_g - 1.1157375181581376e-5).abs() < 1e-12);
    }

    #[test]
    fn fig3_late_time_recovers_full_drive() {
        let m = medium(100.0);
        let s = fig3_schedule();
        let u = s.cot_theta(m.g_root_n(), 1e9).unwrap();
        assert!((u - 100.0).abs() < 1e-9);
        let sample = eval_schedule(&s, &m, 1e9).unwrap();
        assert!((sample.v_g / C_LIGHT - 0.9999000099990001).abs() < 1e-9);
    }

    #[test]
    fn fig6_initial_group_velocity() {
        let m = medium(2.5);
        let s = fig6_schedule();
        let u = s.cot_theta(m.g_root_n(), 0.0).unwrap();
        assert!((u - 0.317383272263186).abs() < 1e-12);
        let sample = eval_schedule(&s, &m, 0.0).unwrap();
        assert!((sample.v_g / C_LIGHT - 0.09151376407894678).abs() < 1e-12);
        // deep in the plateau the polariton is essentially at rest
        let plateau = eval_schedule(&s, &m, 2600.0).unwrap();
        assert!(plateau.v_g / C_LIGHT < 1e-4);
    }

    #[test]
    fn samples_are_mutually_consistent() {
        let m = medium(2.5);
        for s in [fig3_schedule(), fig6_schedule(), ControlSchedule::Constant { omega: 0.7 }] {
            for i in 0..200 {
                let t = -50.0 + i as f64 * 25.0;
                let ScheduleSample { omega, theta, v_g } = eval_schedule(&s, &m, t).unwrap();
                assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&theta));
                assert!((-1e-12..=C_LIGHT + 1e-12).contains(&v_g));
                let s2c2 = theta.sin().powi(2) + theta.cos().powi(2);
                assert!((s2c2 - 1.0).abs() < 1e-15);
                assert!((v_g - C_LIGHT * theta.cos().powi(2)).abs() < 1e-12);
                let theta2 = crate::medium::mixing_angle(omega, &m);
                assert!((theta - theta2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let grn = 2.0;
        let h = 1e-4;
        for s in [fig3_schedule(), fig6_schedule()] {
            for i in 0..60 {
                let t = i as f64 * 60.0;
                let d = s.theta_derivs(grn, t).unwrap();
                let tm = s.theta(grn, t - h).unwrap();
                let tp = s.theta(grn, t + h).unwrap();
                let t0 = s.theta(grn, t).unwrap();
                let fd1 = (tp - tm) / (2.0 * h);
                let fd2 = (tp - 2.0 * t0 + tm) / (h * h);
                assert!(
                    (d.dtheta - fd1).abs() < 1e-6 * (1.0 + fd1.abs()),
                    "t={t}: dtheta {} vs fd {}",
                    d.dtheta,
                    fd1
                );
                assert!(
                    (d.ddtheta - fd2).abs() < 1e-4 * (1.0 + fd2.abs()),
                    "t={t}: ddtheta {} vs fd {}",
                    d.ddtheta,
                    fd2
                );
            }
        }
    }

    #[test]
    fn tabulated_reproduces_parametric_family() {
        // Sampled at 32 points per ramp width (width 1/c = 10 here); the
        // monotone cubic is locally third order, so ~30 points per width
        // are needed for 1e-6 relative reproduction.
        let s = fig3_schedule();
        let grn = 1.0;
        let (t0, t1) = (-40.0, 190.0);
        let n = 736; // dt = 0.3125 -> 32 samples per ramp width
        let ts: Vec<f64> = (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect();
        let us: Vec<f64> = ts.iter().map(|&t| s.cot_theta(grn, t).unwrap()).collect();
        let tab = ControlSchedule::Tabulated(TabulatedSchedule::new(ts, us).unwrap());
        let umax = 100.0;
        let mut worst = 0.0f64;
        for i in 0..=2300 {
            let t = t0 + (t1 - t0) * i as f64 / 2300.0;
            let diff = (tab.cot_theta(grn, t).unwrap() - s.cot_theta(grn, t).unwrap()).abs();
            worst = worst.max(diff / umax);
        }
        assert!(worst < 1e-6, "relative error {worst}");
    }

    #[test]
    fn tabulated_domain_and_sparsity_errors() {
        let tab = TabulatedSchedule::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.0]).unwrap();
        let s = ControlSchedule::Tabulated(tab);
        assert!(matches!(
            s.cot_theta(1.0, 3.0),
            Err(ScheduleError::OutOfDomain { .. })
        ));

        // A sharp ramp sampled far too coarsely: the interpolant's
        // curvature jumps at the knots, so knot-spanning and within-piece
        // stencils disagree.
        let src = fig3_schedule();
        let ts: Vec<f64> = (0..=23).map(|i| -40.0 + 10.0 * i as f64).collect();
        let us: Vec<f64> = ts.iter().map(|&t| src.cot_theta(1.0, t).unwrap()).collect();
        let sparse = ControlSchedule::Tabulated(TabulatedSchedule::new(ts, us).unwrap());
        let res = sparse.theta_derivs(1.0, 20.0);
        assert!(
            matches!(res, Err(ScheduleError::TooSparse { .. })),
            "expected TooSparse, got {res:?}"
        );
    }

    #[test]
    fn cot_theta_never_negative() {
        let m = medium(2.5);
        for s in [fig3_schedule(), fig6_schedule()] {
            for i in 0..=4000 {
                let t = -100.0 + i as f64;
                assert!(s.cot_theta(m.g_root_n(), t).unwrap() >= 0.0);
            }
        }
    }
}
