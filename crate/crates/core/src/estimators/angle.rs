use nalgebra::{Matrix3, Vector3};

use super::{check_sigmas, PositionEstimate, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{position_from_range_aoa, AnglePair, RotationMatrix, Vec3};

/// Least-squares intersection of bearing lines. Each anchor's measured local
/// angles are turned into a global bearing `R^T u`; the solution minimises
/// the weighted squared perpendicular distances to all lines, reweighted by
/// `1 / (sigma d)^2` with `d` the current anchor-target distance.
pub fn triangulate(
    poses: &[(Vec3, RotationMatrix)],
    aoas: &[AnglePair],
    sigmas: &[f64],
    cfg: &SolverConfig,
) -> Result<PositionEstimate> {
    cfg.validate()?;
    if poses.len() != aoas.len() {
        return Err(Error::config(format!("{} anchors but {} angle pairs", poses.len(), aoas.len())));
    }
    if poses.len() < 2 {
        return Err(Error::geometry("triangulation needs at least two bearings"));
    }
    check_sigmas(sigmas, aoas.len())?;
    let bearings: Vec<Vec3> = poses
        .iter()
        .zip(aoas)
        .map(|((_, rot), a)| rot.transpose().rotate(&a.unit_vector()))
        .collect();

    let solve = |weights: &[f64]| -> Result<(Vec3, Matrix3<f64>)> {
        let mut a = Matrix3::zeros();
        let mut b = Vector3::zeros();
        for (((p, _), u), w) in poses.iter().zip(&bearings).zip(weights) {
            let proj = (Matrix3::identity() - u * u.transpose()) * *w;
            a += proj;
            b += proj * p;
        }
        let ev = a.symmetric_eigenvalues();
        if ev.min() <= 1e-10 * ev.max() {
            return Err(Error::geometry("bearing lines are parallel"));
        }
        let inv = a.try_inverse().ok_or_else(|| Error::geometry("bearing lines are parallel"))?;
        Ok((inv * b, inv))
    };

    let mut weights: Vec<f64> = sigmas.iter().map(|s| 1.0 / (s * s)).collect();
    let (mut p, mut inv) = solve(&weights)?;
    let mut iterations = 1;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        for (((a, _), s), w) in poses.iter().zip(sigmas).zip(weights.iter_mut()) {
            let d = (p - a).norm().max(cfg.tolerance);
            *w = 1.0 / (s * s * d * d);
        }
        let (next, next_inv) = solve(&weights)?;
        iterations += 1;
        let step = (next - p).norm();
        p = next;
        inv = next_inv;
        if step < cfg.tolerance.max(4.0 * f64::EPSILON * p.norm()) {
            converged = true;
            break;
        }
    }
    let residual_norm = poses
        .iter()
        .zip(&bearings)
        .zip(&weights)
        .map(|(((a, _), u), w)| {
            let d = p - a;
            w * (d - u * u.dot(&d)).norm_squared()
        })
        .sum::<f64>()
        .sqrt();
    Ok(PositionEstimate {
        position: p,
        covariance: (inv + inv.transpose()) * 0.5,
        residual_norm,
        iterations,
        converged,
        ambiguous: false,
    })
}

/// Standard deviations of a single-anchor range/angle fix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HybridNoise {
    pub range_m: f64,
    pub azimuth_rad: f64,
    pub elevation_rad: f64,
}

/// Closed-form single-anchor fix with first-order covariance.
pub fn hybrid_range_aoa(
    anchor: &Vec3,
    rotation: &RotationMatrix,
    range: f64,
    aoa: &AnglePair,
    noise: &HybridNoise,
) -> Result<PositionEstimate> {
    let position = position_from_range_aoa(anchor, range, aoa, rotation)?;
    let (sa, ca) = aoa.azimuth.sin_cos();
    let (se, ce) = aoa.elevation.sin_cos();
    let u = aoa.unit_vector();
    let du_az = Vec3::new(-sa * ce, ca * ce, 0.0);
    let du_el = Vec3::new(-ca * se, -sa * se, ce);
    let rt = rotation.transpose();
    let jac = Matrix3::from_columns(&[rt.rotate(&u), rt.rotate(&(du_az * range)), rt.rotate(&(du_el * range))]);
    let s = Matrix3::from_diagonal(&Vector3::new(
        noise.range_m.powi(2),
        noise.azimuth_rad.powi(2),
        noise.elevation_rad.powi(2),
    ));
    let cov = jac * s * jac.transpose();
    Ok(PositionEstimate {
        position,
        covariance: (cov + cov.transpose()) * 0.5,
        residual_norm: 0.0,
        iterations: 0,
        converged: true,
        ambiguous: false,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    use super::*;
    use crate::geometry::{local_aoa, rotation_from_attitude, Attitude};

    #[test]
    fn two_bearings_intersect_exactly() {
        let target = Vec3::new(40.0, 70.0, 15.0);
        let poses = [
            (Vec3::new(0.0, 0.0, 30.0), rotation_from_attitude(&Attitude::new(0.1, -0.2, 0.7))),
            (Vec3::new(120.0, 10.0, 5.0), RotationMatrix::identity()),
        ];
        let aoas: Vec<AnglePair> = poses.iter().map(|(p, r)| local_aoa(p, &target, r).unwrap()).collect();
        let est = triangulate(&poses, &aoas, &[0.01, 0.01], &SolverConfig::default()).unwrap();
        assert!((est.position - target).norm() < 1e-6);
        assert!(est.converged);
    }

    #[test]
    fn rotating_anchor_and_angles_together_is_invariant() {
        let target = Vec3::new(-20.0, 35.0, 60.0);
        let anchors = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(80.0, 0.0, 0.0), Vec3::new(0.0, 90.0, 10.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let plain: Vec<AnglePair> = anchors
            .iter()
            .map(|a| {
                let g = local_aoa(a, &target, &RotationMatrix::identity()).unwrap();
                AnglePair::new(g.azimuth + noise.sample(&mut rng), g.elevation + noise.sample(&mut rng))
            })
            .collect();
        let id_poses: Vec<_> = anchors.iter().map(|a| (*a, RotationMatrix::identity())).collect();
        let base = triangulate(&id_poses, &plain, &[0.01; 3], &SolverConfig::default()).unwrap();

        let rot = rotation_from_attitude(&Attitude::new(0.3, 0.5, -1.1));
        let rotated: Vec<AnglePair> = plain
            .iter()
            .map(|a| {
                let v = rot.rotate(&a.unit_vector());
                local_aoa(&Vec3::zeros(), &v, &RotationMatrix::identity()).unwrap()
            })
            .collect();
        let rot_poses: Vec<_> = anchors.iter().map(|a| (*a, rot)).collect();
        let turned = triangulate(&rot_poses, &rotated, &[0.01; 3], &SolverConfig::default()).unwrap();
        assert!((base.position - turned.position).norm() < 1e-9);
    }

    #[test]
    fn parallel_bearings_are_rejected() {
        let poses = [(Vec3::zeros(), RotationMatrix::identity()), (Vec3::new(0.0, 10.0, 0.0), RotationMatrix::identity())];
        let aoas = [AnglePair::new(0.0, 0.0), AnglePair::new(0.0, 0.0)];
        let e = triangulate(&poses, &aoas, &[0.01; 2], &SolverConfig::default()).unwrap_err();
        assert_eq!(e.code(), "GEOMETRY");
    }

    #[test]
    fn hybrid_noiseless_and_covariance_shape() {
        let anchor = Vec3::new(5.0, -3.0, 40.0);
        let rot = rotation_from_attitude(&Attitude::new(0.2, 0.1, 0.9));
        let target = Vec3::new(60.0, 25.0, 1.5);
        let d = (target - anchor).norm();
        let aoa = local_aoa(&anchor, &target, &rot).unwrap();
        let range_only = HybridNoise { range_m: 0.7, ..Default::default() };
        let est = hybrid_range_aoa(&anchor, &rot, d, &aoa, &range_only).unwrap();
        assert!((est.position - target).norm() < 1e-9);
        // rank one along the bearing
        let bearing = (target - anchor) / d;
        let ev = est.covariance.symmetric_eigenvalues();
        let mut sorted: Vec<f64> = ev.iter().copied().collect();
        sorted.sort_by(f64::total_cmp);
        assert!(sorted[0].abs() < 1e-12 && sorted[1].abs() < 1e-12);
        assert_abs_diff_eq!(sorted[2], 0.49, epsilon = 1e-12);
        assert_abs_diff_eq!((est.covariance * bearing).norm(), 0.49, epsilon = 1e-12);

        assert!(hybrid_range_aoa(&anchor, &rot, 0.0, &aoa, &range_only).is_err());
    }

    #[test]
    fn hybrid_covariance_matches_finite_differences() {
        let anchor = Vec3::new(0.0, 0.0, 100.0);
        let rot = rotation_from_attitude(&Attitude::new(-0.3, 0.2, 2.0));
        let aoa = AnglePair::new(0.8, -0.4);
        for d in [50.0, 100.0, 400.0] {
            let noise = HybridNoise { range_m: 0.0, azimuth_rad: 0.01, elevation_rad: 0.01 };
            let est = hybrid_range_aoa(&anchor, &rot, d, &aoa, &noise).unwrap();
            // oracle: numerical Jacobian columns
            let h = 1e-6;
            let f = |az: f64, el: f64| position_from_range_aoa(&anchor, d, &AnglePair::new(az, el), &rot).unwrap();
            let j_az = (f(aoa.azimuth + h, aoa.elevation) - f(aoa.azimuth - h, aoa.elevation)) / (2.0 * h);
            let j_el = (f(aoa.azimuth, aoa.elevation + h) - f(aoa.azimuth, aoa.elevation - h)) / (2.0 * h);
            let trace = 1e-4 * (j_az.norm_squared() + j_el.norm_squared());
            assert!((est.covariance.trace() / trace - 1.0).abs() < 1e-6);
            let ce = aoa.elevation.cos();
            assert_abs_diff_eq!(est.covariance.trace(), 1e-4 * d * d * (1.0 + ce * ce), epsilon = 1e-9 * d * d);
        }
    }
}
