//! Log-distance path loss with elevation-dependent shadowing: how the
//! shadowing spread and the implied ranging error change with the
//! elevation of an aerial anchor.

use gasloc::radio::{
    elevation_shadowing_sigma, expected_rx_power, rss_range_sigma, rss_to_distance, sample_rss, LinkCondition,
    MeasurementKind, RadioConfig, ShadowingParams,
};
use gasloc::rng::stream_rng;

fn main() -> gasloc::Result<()> {
    let radio = RadioConfig { constant_db: -40.0, ..Default::default() };
    let urban = ShadowingParams::urban_illustrative();
    let r = 500.0;

    println!("h_m,elev_deg,p_los,sigma_los_db,sigma_nlos_db,sigma_db,mean_dbm,range_sigma_m");
    for h in [10.0, 50.0, 100.0, 250.0, 500.0, 1000.0, 2000.0] {
        let elev = f64::atan2(h, r);
        let d = f64::hypot(h, r);
        println!(
            "{h},{:.1},{:.3},{:.2},{:.2},{:.2},{:.1},{:.1}",
            elev.to_degrees(),
            urban.los_probability.at(elev),
            elevation_shadowing_sigma(&urban, elev, LinkCondition::Los)?,
            elevation_shadowing_sigma(&urban, elev, LinkCondition::Nlos)?,
            urban.sigma_db(elev)?,
            expected_rx_power(&radio, d)?,
            rss_range_sigma(&radio, d, urban.sigma_db(elev)?)
        );
    }

    // A few noisy readings at 300 m altitude, inverted back to distance.
    let mut rng = stream_rng(42, 0);
    let (h, d) = (300.0, f64::hypot(300.0, r));
    for _ in 0..5 {
        let m = sample_rss(&radio, &urban, d, f64::atan2(h, r), &mut rng)?;
        if let MeasurementKind::Rss { dbm } = m.kind {
            println!("rss {dbm:.1} dBm -> {:.1} m (true {d:.1} m)", rss_to_distance(&radio, dbm));
        }
    }
    Ok(())
}
