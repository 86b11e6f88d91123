//! Walker constellation generation, circular-orbit propagation, and a TLE
//! record turned into orbit elements.

use gasloc::anchors::{
    elevation_of, generate_constellation, parse_tle_file, propagate_orbit, spherical_to_ecef, Constellation,
    ConstellationKind, OrbitElements,
};

const ISS: &str = "ISS (ZARYA)
1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927
2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537
";

fn main() -> gasloc::Result<()> {
    let template = OrbitElements::new(550e3, 53f64.to_radians(), 0.0, 0.0)?;
    let shell = Constellation { kind: ConstellationKind::Walker, planes: 12, sats_per_plane: 10, template };
    let sats = generate_constellation(&shell)?;
    println!("{} satellites, period {:.1} s", sats.len(), template.period());

    let user = spherical_to_ecef(50.8f64.to_radians(), 4.7f64.to_radians(), 0.0);
    for t in [0.0, 600.0, 1200.0, 1800.0] {
        let mut visible = 0;
        let mut best = f64::NEG_INFINITY;
        for o in &sats {
            let el = elevation_of(&propagate_orbit(o, t).position, &user)?;
            if el >= 10f64.to_radians() {
                visible += 1;
            }
            best = best.max(el);
        }
        println!("t = {t:>6} s: {visible} above 10 deg, highest at {:.1} deg", best.to_degrees());
    }

    for (name, rec) in parse_tle_file(ISS)? {
        let o = rec.orbit_elements()?;
        println!(
            "{}: epoch {} day {:.3}, altitude {:.1} km, inclination {:.2} deg",
            name.unwrap_or_default(),
            rec.full_epoch_year(),
            rec.epoch_day,
            o.altitude_m / 1e3,
            o.inclination.to_degrees()
        );
    }
    Ok(())
}
