//! Worst-case ranging error of a hovering UAV anchor whose position is off
//! by GPS and barometer errors, checked against random realizations.

use gasloc::anchors::{placement_error_bounds, PlacementError};
use gasloc::geometry::Vec3;
use gasloc::rng::stream_rng;
use rand::Rng;

fn main() -> gasloc::Result<()> {
    let e = PlacementError::new(2.0, 3.0, 5.0)?;
    let target = Vec3::new(400.0, 0.0, 0.0);
    println!("h_m,bound_xy_m,bound_z_m,worst_seen_xy_m");
    for h in [50.0, 100.0, 200.0, 400.0, 800.0] {
        let scheduled = Vec3::new(0.0, 0.0, h);
        let r = 400.0;
        let (e_r, e_h) = placement_error_bounds(&e, h, r)?;
        let mut rng = stream_rng(3, h as u64);
        let d_true = (scheduled - target).norm();
        let mut worst = 0.0f64;
        for _ in 0..20_000 {
            let actual = e.realize(&scheduled, &mut rng);
            let d_hat = (actual - target).norm() + e.range_m * rng.random_range(-1.0..1.0);
            // horizontal distance implied by the noisy range from the scheduled altitude
            let r_hat = (d_hat * d_hat - h * h).max(0.0).sqrt();
            worst = worst.max((r_hat - (d_true * d_true - h * h).sqrt()).abs());
        }
        println!("{h},{e_r:.2},{e_h:.2},{worst:.2}");
    }
    Ok(())
}
