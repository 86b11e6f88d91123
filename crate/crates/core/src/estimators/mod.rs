//! Snapshot position estimators and recursive tracking.

mod angle;
mod doppler;
mod mlat;
mod nls;
mod tracking;

use nalgebra::Matrix3;

pub use angle::{hybrid_range_aoa, triangulate, HybridNoise};
pub use doppler::{doppler_batch_ls, DopplerFix, DopplerObservation};
pub use mlat::{mlat_range, mlat_tdoa, tdoa_from_toas, TdoaMeasurement};
pub use tracking::{
    constant_velocity_model, kf_predict, kf_update, nees, AoaModel, LinearModel, MeasurementModel,
    PseudorangeRateModel, RangeModel, TrackState,
};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Step-norm convergence threshold, m.
    pub tolerance: f64,
    /// Maximum step halvings per iteration.
    pub max_halvings: u32,
    /// Number of starting points (>= 1). Start 0 is the initial guess or
    /// the anchor centroid; the rest are antithetic jitter pairs around it.
    /// The range and TDOA solvers append one closed-form start when the
    /// anchors are not coplanar.
    pub multistart: usize,
    pub seed: u64,
    /// Standard deviation of the start jitter, m. Defaults to the RMS spread
    /// of the anchors about their centroid.
    pub jitter_scale: Option<f64>,
    pub initial_guess: Option<Vec3>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-9,
            max_halvings: 20,
            multistart: 8,
            seed: 0,
            jitter_scale: None,
            initial_guess: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || self.max_iterations == 0 || self.multistart == 0 {
            return Err(Error::config(format!(
                "solver needs tolerance > 0, max_iterations >= 1 and multistart >= 1, got {self:?}"
            )));
        }
        if let Some(s) = self.jitter_scale {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::config(format!("jitter scale must be finite and >= 0, got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEstimate {
    pub position: Vec3,
    /// m^2.
    pub covariance: Matrix3<f64>,
    /// Norm of the noise-weighted residual vector at the solution.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when a distinct, equally good solution exists (e.g. the mirror
    /// image through a plane of coplanar anchors).
    pub ambiguous: bool,
}

fn check_sigmas(sigmas: &[f64], expected: usize) -> Result<()> {
    if sigmas.len() != expected {
        return Err(Error::config(format!("expected {expected} noise sigmas, got {}", sigmas.len())));
    }
    if sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::domain("noise sigmas must be finite and > 0"));
    }
    Ok(())
}

fn centroid(points: &[Vec3]) -> Vec3 {
    points.iter().sum::<Vec3>() / points.len() as f64
}

fn rms_spread(points: &[Vec3]) -> f64 {
    let c = centroid(points);
    (points.iter().map(|p| (p - c).norm_squared()).sum::<f64>() / points.len() as f64).sqrt()
}

/// True when all points lie on one plane (or a line).
fn coplanar(points: &[Vec3]) -> bool {
    if points.len() < 4 {
        return true;
    }
    let c = centroid(points);
    let m = points.iter().fold(Matrix3::zeros(), |acc, p| {
        let d = p - c;
        acc + d * d.transpose()
    });
    let ev = m.symmetric_eigenvalues();
    let (lo, hi) = (ev.min(), ev.max());
    hi <= 0.0 || lo <= 1e-18 * hi
}
