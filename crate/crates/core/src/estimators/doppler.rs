use nalgebra::{DMatrix, DVector, Matrix3};

use super::nls;
use super::{rms_spread, PositionEstimate, SolverConfig};
use crate::anchors::EARTH_RADIUS_M;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::radio::SPEED_OF_LIGHT;

/// One pseudorange-rate observation of a satellite with known state and
/// clock drift (all Earth-fixed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerObservation {
    pub sat_position: Vec3,
    pub sat_velocity: Vec3,
    pub sat_clock_drift: f64,
    /// m/s, positive while receding.
    pub rate_mps: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerFix {
    pub estimate: PositionEstimate,
    /// Receiver clock drift, s/s.
    pub clock_drift: f64,
    pub clock_drift_sigma: f64,
}

/// Batch least squares for a static receiver: unknowns are the position and
/// the common drift term `c * drift`.
pub fn doppler_batch_ls(obs: &[DopplerObservation], cfg: &SolverConfig) -> Result<DopplerFix> {
    cfg.validate()?;
    if obs.len() < 4 {
        return Err(Error::Observability(format!(
            "{} pseudorange-rate measurements for 4 unknowns",
            obs.len()
        )));
    }
    if obs.iter().any(|o| !(o.sigma > 0.0 && o.sigma.is_finite())) {
        return Err(Error::domain("noise sigmas must be finite and > 0"));
    }
    let eval = |x: &DVector<f64>| {
        let p = Vec3::new(x[0], x[1], x[2]);
        let bias = x[3];
        let mut r = DVector::zeros(obs.len());
        let mut j = DMatrix::zeros(obs.len(), 4);
        for (k, o) in obs.iter().enumerate() {
            let d = p - o.sat_position;
            let rho = d.norm();
            if !(rho > 0.0) {
                return Err(Error::geometry("estimate coincides with a satellite"));
            }
            let u = d / rho;
            let model = -o.sat_velocity.dot(&u) + bias - SPEED_OF_LIGHT * o.sat_clock_drift;
            r[k] = (model - o.rate_mps) / o.sigma;
            let grad = -(o.sat_velocity - u * o.sat_velocity.dot(&u)) / rho;
            for c in 0..3 {
                j[(k, c)] = grad[c] / o.sigma;
            }
            j[(k, 3)] = 1.0 / o.sigma;
        }
        Ok((r, j))
    };

    let subpoints: Vec<Vec3> = obs.iter().map(|o| o.sat_position.normalize() * EARTH_RADIUS_M).collect();
    let x0 = cfg.initial_guess.unwrap_or_else(|| {
        let mean: Vec3 = subpoints.iter().sum::<Vec3>() / subpoints.len() as f64;
        mean.normalize() * EARTH_RADIUS_M
    });
    let scale = cfg.jitter_scale.unwrap_or_else(|| rms_spread(&subpoints).max(1.0));
    let x0 = DVector::from_vec(vec![x0.x, x0.y, x0.z, 0.0]);
    let o = nls::multistart(&eval, nls::starts(&x0, 3, scale, cfg), 1e-4 * scale + 1e-6, cfg)?;
    let cov = nls::covariance(&o.jacobian)
        .ok_or_else(|| Error::Observability("pass geometry leaves the position or drift unobservable".into()))?;
    let position_cov = Matrix3::from_fn(|r, c| cov[(r, c)]);
    Ok(DopplerFix {
        estimate: PositionEstimate {
            position: Vec3::new(o.x[0], o.x[1], o.x[2]),
            covariance: position_cov,
            residual_norm: o.cost.sqrt(),
            iterations: o.iterations,
            converged: o.converged,
            ambiguous: o.distinct_minima,
        },
        clock_drift: o.x[3] / SPEED_OF_LIGHT,
        clock_drift_sigma: cov[(3, 3)].sqrt() / SPEED_OF_LIGHT,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::anchors::{propagate_orbit, range_rate, spherical_to_ecef, OrbitElements};

    fn observations(user: &Vec3, user_drift: f64, extra_sat_drift: f64) -> Vec<DopplerObservation> {
        let sats = [
            OrbitElements::new(550e3, 53f64.to_radians(), 0.0, 0.2).unwrap(),
            OrbitElements::new(550e3, 53f64.to_radians(), 0.5, -0.3).unwrap(),
            OrbitElements::new(600e3, 87f64.to_radians(), -0.3, 0.1).unwrap(),
            OrbitElements::new(1200e3, 87f64.to_radians(), 0.3, -0.1).unwrap(),
        ];
        let mut out = Vec::new();
        for (i, o) in sats.iter().enumerate() {
            for k in 0..8 {
                let t = 30.0 * k as f64;
                let s = propagate_orbit(o, t);
                let drift = 1e-9 * i as f64 + extra_sat_drift;
                out.push(DopplerObservation {
                    sat_position: s.position,
                    sat_velocity: s.velocity,
                    sat_clock_drift: drift,
                    rate_mps: range_rate(&s.position, &s.velocity, user, user_drift, drift).unwrap(),
                    sigma: 0.1,
                });
            }
        }
        out
    }

    #[test]
    fn noiseless_inversion() {
        let user = spherical_to_ecef(0.1, 0.15, 0.0);
        let fix = doppler_batch_ls(&observations(&user, 2e-8, 0.0), &SolverConfig::default()).unwrap();
        assert!((fix.estimate.position - user).norm() < 1.0, "{}", (fix.estimate.position - user).norm());
        assert_abs_diff_eq!(fix.clock_drift, 2e-8, epsilon = 1e-12);
    }

    #[test]
    fn too_few_measurements() {
        let user = spherical_to_ecef(0.1, 0.15, 0.0);
        let obs = observations(&user, 0.0, 0.0);
        let three = [obs[0], obs[8], obs[16]];
        assert_eq!(doppler_batch_ls(&three, &SolverConfig::default()).unwrap_err().code(), "OBSERVABILITY");
    }

    #[test]
    fn common_drift_is_absorbed() {
        let user = spherical_to_ecef(0.1, 0.15, 0.0);
        let cfg = SolverConfig::default();
        let a = doppler_batch_ls(&observations(&user, 0.0, 0.0), &cfg).unwrap();
        // satellites all report +5e-9 more drift, but the data are unchanged
        let mut obs = observations(&user, 0.0, 0.0);
        for o in &mut obs {
            o.sat_clock_drift += 5e-9;
        }
        let b = doppler_batch_ls(&obs, &cfg).unwrap();
        assert!((a.estimate.position - b.estimate.position).norm() < 1e-3);
        assert_abs_diff_eq!(b.clock_drift - a.clock_drift, 5e-9, epsilon = 1e-13);
    }
}
