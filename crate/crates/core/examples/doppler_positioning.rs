//! Positioning a static receiver from pseudorange rates of four LEO
//! satellites, each seen over its first two passes.

use gasloc::anchors::{find_passes, propagate_orbit, pseudorange_rate, spherical_to_ecef, OrbitElements};
use gasloc::estimators::{doppler_batch_ls, DopplerObservation, SolverConfig};
use gasloc::radio::MeasurementKind;
use gasloc::rng::stream_rng;

fn main() -> gasloc::Result<()> {
    let user = spherical_to_ecef(0.6, 0.2, 0.0);
    let user_drift = 3e-8;
    let mut rng = stream_rng(5, 0);
    let mut obs = Vec::new();
    for k in 0..4 {
        let orbit = OrbitElements::new(550e3, 53f64.to_radians(), k as f64 * std::f64::consts::FRAC_PI_2, 0.7 * k as f64)?;
        let sat_drift = 1e-9 * (k + 1) as f64;
        let passes = find_passes(&orbit, &user, 0.0, 86_400.0, 10.0, 10f64.to_radians())?;
        for pass in passes.iter().filter(|p| p.complete).take(2) {
            let mut t = pass.start;
            while t <= pass.end {
                let s = propagate_orbit(&orbit, t);
                let m = pseudorange_rate(&s.position, &s.velocity, &user, user_drift, sat_drift, 0.1, &mut rng)?;
                if let MeasurementKind::PseudorangeRate { mps } = m.kind {
                    obs.push(DopplerObservation {
                        sat_position: s.position,
                        sat_velocity: s.velocity,
                        sat_clock_drift: sat_drift,
                        rate_mps: mps,
                        sigma: m.sigma,
                    });
                }
                t += 10.0;
            }
        }
    }
    let fix = doppler_batch_ls(&obs, &SolverConfig::default())?;
    println!("{} observations", obs.len());
    println!("position error {:.2} m (predicted rms {:.2} m)", (fix.estimate.position - user).norm(), fix.estimate.covariance.trace().sqrt());
    println!("clock drift {:.3e} (true {user_drift:.3e}, sigma {:.1e})", fix.clock_drift, fix.clock_drift_sigma);
    Ok(())
}
