//! Extended Kalman filter tracking a drone flying at constant velocity,
//! observed through ranges from four ground anchors.

use gasloc::estimators::{constant_velocity_model, kf_predict, kf_update, nees, RangeModel, TrackState};
use gasloc::geometry::Vec3;
use gasloc::rng::stream_rng;
use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Normal};

fn main() -> gasloc::Result<()> {
    let anchors = vec![
        Vec3::new(0.0, 0.0, 10.0),
        Vec3::new(1000.0, 0.0, 15.0),
        Vec3::new(0.0, 1000.0, 5.0),
        Vec3::new(1000.0, 1000.0, 30.0),
    ];
    let model = RangeModel { anchors: anchors.clone() };
    let sigma = 2.0;
    let r = DMatrix::identity(4, 4) * sigma * sigma;
    let (dt, q) = (1.0, 0.01);
    let (f, qm) = constant_velocity_model(dt, q);

    let mut truth = DVector::from_vec(vec![100.0, 200.0, 80.0, 12.0, 6.0, 0.5]);
    let mut x0 = truth.clone();
    x0[0] += 30.0;
    x0[1] -= 20.0;
    let mut state = TrackState::new(x0, DMatrix::from_diagonal(&DVector::from_vec(vec![900.0, 900.0, 900.0, 25.0, 25.0, 25.0])))?;

    let mut rng = stream_rng(8, 0);
    let noise = Normal::new(0.0, sigma).unwrap();
    println!("step,pos_error_m,nees");
    for k in 1..=40 {
        truth = &f * &truth;
        state = kf_predict(&state, &f, &qm, dt)?;
        let p = Vec3::new(truth[0], truth[1], truth[2]);
        let z = DVector::from_iterator(4, anchors.iter().map(|a| (p - a).norm() + noise.sample(&mut rng)));
        state = kf_update(&state, &z, &model, &r)?;
        if k % 5 == 0 {
            println!("{k},{:.2},{:.2}", (state.position() - p).norm(), nees(&state, &truth)?);
        }
    }
    Ok(())
}
