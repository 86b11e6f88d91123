//! Error KPIs for a Monte Carlo batch: RMSE, CDF percentiles, DOP and the
//! range CRLB for the same geometry.

use gasloc::estimators::{mlat_range, SolverConfig};
use gasloc::geometry::Vec3;
use gasloc::metrics::{crlb_range, empirical_cdf, gdop, position_error, rmse, DopKind};
use gasloc::rng::stream_rng;
use rand_distr::{Distribution, Normal};

fn main() -> gasloc::Result<()> {
    let anchors = vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(500.0, 0.0, 0.0),
        Vec3::new(0.0, 500.0, 0.0),
        Vec3::new(500.0, 500.0, 0.0),
        Vec3::new(250.0, 250.0, 300.0),
    ];
    let target = Vec3::new(200.0, 300.0, 120.0);
    let sigma = 1.5;

    let dop = gdop(&anchors, &target, DopKind::Range)?;
    let bound = crlb_range(&anchors, &target, &[sigma; 5])?.trace().sqrt();
    println!("gdop {:.3} hdop {:.3} vdop {:.3}; sqrt(tr CRLB) {bound:.3} m", dop.gdop, dop.hdop, dop.vdop);

    let noise = Normal::new(0.0, sigma).unwrap();
    let cfg = SolverConfig::default();
    let mut samples = Vec::new();
    for trial in 0..2000u64 {
        let mut rng = stream_rng(77, trial);
        let ranges: Vec<f64> = anchors.iter().map(|a| (a - target).norm() + noise.sample(&mut rng)).collect();
        let est = mlat_range(&anchors, &ranges, &[sigma; 5], &cfg)?;
        samples.push(position_error(&target, &est.position).with_trial(trial as usize));
    }
    println!("rmse {:.3} m over {} trials", rmse(&samples)?, samples.len());

    let cdf = empirical_cdf(&samples.iter().map(|s| s.error_3d).collect::<Vec<_>>())?;
    for q in [0.5, 0.9, 0.95] {
        println!("p{:.0} 3D error {:.3} m", q * 100.0, cdf.percentile(q)?);
    }
    println!("P(error <= 2 m) = {:.3}", cdf.probability_at(2.0));
    let h = empirical_cdf(&samples.iter().map(|s| s.horizontal()).collect::<Vec<_>>())?;
    let v = empirical_cdf(&samples.iter().map(|s| s.ez).collect::<Vec<_>>())?;
    println!("median horizontal {:.3} m, vertical {:.3} m", h.percentile(0.5)?, v.percentile(0.5)?);
    Ok(())
}
