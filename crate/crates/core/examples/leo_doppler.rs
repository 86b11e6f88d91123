//! Doppler S-curves of a 550 km satellite at 2 GHz for passes of different
//! maximum elevation, plus the ionospheric group delay at L1.

use gasloc::anchors::{doppler_profile, ionospheric_delay, user_for_pass, OrbitElements};

fn main() -> gasloc::Result<()> {
    let orbit = OrbitElements::new(550e3, 53f64.to_radians(), 0.4, 0.0)?;
    println!("max_elev_deg,duration_s,peak_doppler_khz,max_rate_hz_per_s");
    for max_el in [15.0, 30.0, 45.0, 60.0, 75.0, 90.0f64] {
        let user = user_for_pass(&orbit, max_el.to_radians(), 600.0)?;
        let passes = doppler_profile(&orbit, &user, 2e9, 0.0, 1200.0, 1.0, 0.0)?;
        let (pass, rows) = &passes[0];
        let peak = rows.iter().map(|r| r.doppler_hz.abs()).fold(0.0, f64::max);
        let rate = rows.iter().map(|r| r.doppler_rate_hz_s.abs()).fold(0.0, f64::max);
        println!("{max_el},{},{:.2},{:.1}", pass.end - pass.start, peak / 1e3, rate);
    }

    let (group, phase) = ionospheric_delay(1.575e9, 1e18)?;
    println!("STEC 1e18 at 1.575 GHz: group {group:.3} m, phase {phase:.3} m");
    Ok(())
}
