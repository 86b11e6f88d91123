//! Angles of arrival seen by a tilted anchor, and the position recovered
//! from one range plus one angle pair.

use gasloc::geometry::{
    direct_distance, geometric_angles, horizontal_distance, local_aoa, position_from_range_aoa,
    rotation_from_attitude, Attitude, Vec3,
};

fn main() -> gasloc::Result<()> {
    let anchor = Vec3::new(0.0, 0.0, 120.0);
    let target = Vec3::new(300.0, 150.0, 1.5);

    let global = geometric_angles(&anchor, &target)?;
    println!(
        "d = {:.2} m, r = {:.2} m, global az {:.2} deg, el {:.2} deg",
        direct_distance(&anchor, &target),
        horizontal_distance(&anchor, &target),
        global.azimuth.to_degrees(),
        global.elevation.to_degrees()
    );

    // A UAV nosing down 10 deg and banked 5 deg, heading 30 deg.
    let rot = rotation_from_attitude(&Attitude::from_degrees(-10.0, 5.0, 30.0));
    let local = local_aoa(&anchor, &target, &rot)?;
    println!("local az {:.2} deg, el {:.2} deg", local.azimuth.to_degrees(), local.elevation.to_degrees());

    let back = position_from_range_aoa(&anchor, direct_distance(&anchor, &target), &local, &rot)?;
    println!("recovered {:.6?}, error {:.2e} m", back.as_slice(), (back - target).norm());
    Ok(())
}
