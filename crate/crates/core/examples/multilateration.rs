//! Snapshot positioning from the same target with four measurement types:
//! ranges, TDOA, bearings from two anchors, and one range plus one angle.

use gasloc::estimators::{
    hybrid_range_aoa, mlat_range, mlat_tdoa, tdoa_from_toas, triangulate, HybridNoise, SolverConfig,
};
use gasloc::geometry::{local_aoa, rotation_from_attitude, Attitude, RotationMatrix, Vec3};
use gasloc::radio::SPEED_OF_LIGHT;
use gasloc::rng::stream_rng;
use rand_distr::{Distribution, Normal};

fn main() -> gasloc::Result<()> {
    let anchors = vec![
        Vec3::new(0.0, 0.0, 30.0),
        Vec3::new(800.0, 0.0, 25.0),
        Vec3::new(0.0, 800.0, 40.0),
        Vec3::new(800.0, 800.0, 20.0),
        Vec3::new(400.0, 400.0, 150.0),
    ];
    let target = Vec3::new(310.0, 520.0, 1.5);
    let cfg = SolverConfig::default();
    let mut rng = stream_rng(2024, 0);
    let noise = Normal::new(0.0, 1.0).unwrap();

    let ranges: Vec<f64> = anchors.iter().map(|a| (a - target).norm() + noise.sample(&mut rng)).collect();
    let est = mlat_range(&anchors, &ranges, &[1.0; 5], &cfg)?;
    report("range", &est.position, &target, est.covariance.trace().sqrt());

    let toas: Vec<f64> =
        anchors.iter().map(|a| ((a - target).norm() + noise.sample(&mut rng)) / SPEED_OF_LIGHT).collect();
    // range differences carry the noise of two arrivals
    let est = mlat_tdoa(&anchors, &tdoa_from_toas(&toas, 4, 2f64.sqrt())?, &cfg)?;
    report("tdoa", &est.position, &target, est.covariance.trace().sqrt());

    let angle_noise = Normal::new(0.0, 0.005).unwrap();
    let poses: Vec<(Vec3, RotationMatrix)> = vec![
        (anchors[0], rotation_from_attitude(&Attitude::from_degrees(0.0, 0.0, 45.0))),
        (anchors[3], rotation_from_attitude(&Attitude::from_degrees(5.0, -3.0, 200.0))),
    ];
    let aoas: Vec<_> = poses
        .iter()
        .map(|(a, r)| {
            let mut m = local_aoa(a, &target, r)?;
            m.azimuth += angle_noise.sample(&mut rng);
            m.elevation += angle_noise.sample(&mut rng);
            Ok(m)
        })
        .collect::<gasloc::Result<_>>()?;
    let est = triangulate(&poses, &aoas, &[0.005, 0.005], &cfg)?;
    report("bearings", &est.position, &target, est.covariance.trace().sqrt());

    let (anchor, rot) = poses[1];
    let hybrid_noise = HybridNoise { range_m: 1.0, azimuth_rad: 0.005, elevation_rad: 0.005 };
    let est = hybrid_range_aoa(&anchor, &rot, ranges[3], &aoas[1], &hybrid_noise)?;
    report("range+aoa", &est.position, &target, est.covariance.trace().sqrt());
    Ok(())
}

fn report(name: &str, est: &Vec3, truth: &Vec3, predicted: f64) {
    println!("{name:>10}: error {:7.3} m (predicted rms {predicted:.3} m)", (est - truth).norm());
}
