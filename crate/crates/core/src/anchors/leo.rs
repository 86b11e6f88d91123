//! LEO signal models: Doppler, ionospheric delay, pseudorange rate and pass
//! geometry. Positions and velocities are Earth-fixed.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::orbit::{elevation_of, propagate_orbit, OrbitElements, EARTH_RADIUS_M};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::radio::{Measurement, SPEED_OF_LIGHT};

/// Default visibility mask, rad.
pub const DEFAULT_ELEVATION_MASK: f64 = 10.0 * std::f64::consts::PI / 180.0;

/// Ionospheric refraction constant, m^3/s^2 per electron/m^2.
const IONO_K: f64 = 40.3;

fn line_of_sight(sat_pos: &Vec3, user_pos: &Vec3) -> Result<Vec3> {
    let d = user_pos - sat_pos;
    let n = d.norm();
    if !(n > 0.0) {
        return Err(Error::domain("satellite and user positions coincide"));
    }
    Ok(d / n)
}

/// Doppler shift, Hz; positive while the satellite approaches the user.
pub fn doppler_frequency(sat_pos: &Vec3, sat_vel: &Vec3, user_pos: &Vec3, carrier_hz: f64) -> Result<f64> {
    let closing = sat_vel.dot(&line_of_sight(sat_pos, user_pos)?);
    Ok(closing / SPEED_OF_LIGHT * carrier_hz)
}

/// Group and phase ionospheric delays in metres; `stec` in electrons/m^2.
pub fn ionospheric_delay(carrier_hz: f64, stec: f64) -> Result<(f64, f64)> {
    if !(carrier_hz > 0.0) || !(stec >= 0.0) {
        return Err(Error::domain(format!(
            "ionospheric delay needs f_c > 0 and STEC >= 0, got {carrier_hz}, {stec}"
        )));
    }
    let group = IONO_K * stec / (carrier_hz * carrier_hz);
    Ok((group, -group))
}

/// Noise-free pseudorange rate, m/s; positive while the range grows.
pub fn range_rate(
    sat_pos: &Vec3,
    sat_vel: &Vec3,
    user_pos: &Vec3,
    user_clock_drift: f64,
    sat_clock_drift: f64,
) -> Result<f64> {
    let receding = -sat_vel.dot(&line_of_sight(sat_pos, user_pos)?);
    Ok(receding + SPEED_OF_LIGHT * (user_clock_drift - sat_clock_drift))
}

/// Pseudorange-rate measurement with additive Gaussian noise.
pub fn pseudorange_rate<R: Rng + ?Sized>(
    sat_pos: &Vec3,
    sat_vel: &Vec3,
    user_pos: &Vec3,
    user_clock_drift: f64,
    sat_clock_drift: f64,
    sigma: f64,
    rng: &mut R,
) -> Result<Measurement> {
    if !(sigma >= 0.0) {
        return Err(Error::domain(format!("noise sigma must be >= 0, got {sigma}")));
    }
    let z = range_rate(sat_pos, sat_vel, user_pos, user_clock_drift, sat_clock_drift)?;
    let noise = if sigma > 0.0 {
        Normal::new(0.0, sigma).expect("sigma checked").sample(rng)
    } else {
        0.0
    };
    Ok(Measurement::pseudorange_rate(z + noise, sigma))
}

/// One interval during which a satellite stays above the mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pass {
    pub start: f64,
    pub end: f64,
    pub peak_time: f64,
    pub peak_elevation: f64,
    /// False when the pass is cut by the search window.
    pub complete: bool,
}

fn sample_times(t0: f64, t1: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::domain(format!("need t0 <= t1 and step > 0, got [{t0}, {t1}] step {step}")));
    }
    let n = ((t1 - t0) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| t0 + k as f64 * step).collect())
}

/// Visible passes of one satellite over `user`, sampled every `step` seconds.
pub fn find_passes(
    orbit: &OrbitElements,
    user: &Vec3,
    t0: f64,
    t1: f64,
    step: f64,
    mask: f64,
) -> Result<Vec<Pass>> {
    let times = sample_times(t0, t1, step)?;
    let mut passes = Vec::new();
    let mut current: Option<Pass> = None;
    for (k, &t) in times.iter().enumerate() {
        let el = elevation_of(&propagate_orbit(orbit, t).position, user)?;
        if el >= mask {
            let p = current.get_or_insert(Pass {
                start: t,
                end: t,
                peak_time: t,
                peak_elevation: el,
                complete: k > 0,
            });
            p.end = t;
            if el > p.peak_elevation {
                p.peak_time = t;
                p.peak_elevation = el;
            }
        } else if let Some(p) = current.take() {
            passes.push(p);
        }
    }
    if let Some(mut p) = current {
        p.complete = false;
        passes.push(p);
    }
    Ok(passes)
}

/// Ground user (height 0) placed so that the satellite, at `peak_time`, is
/// at closest approach with elevation `max_elevation`. The offset is taken
/// across the Earth-fixed ground track.
pub fn user_for_pass(orbit: &OrbitElements, max_elevation: f64, peak_time: f64) -> Result<Vec3> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&max_elevation) {
        return Err(Error::domain(format!("max elevation must lie in [0, pi/2], got {max_elevation}")));
    }
    let s = propagate_orbit(orbit, peak_time);
    let a = s.position.norm();
    let central = (EARTH_RADIUS_M * max_elevation.cos() / a).acos() - max_elevation;
    let up = s.position / a;
    let cross = up.cross(&s.velocity).normalize();
    Ok((up * central.cos() + cross * central.sin()) * EARTH_RADIUS_M)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerSample {
    pub time: f64,
    pub elevation: f64,
    pub doppler_hz: f64,
    /// Central difference over `time +- step`, Hz/s.
    pub doppler_rate_hz_s: f64,
}

/// Per-epoch elevation, Doppler and Doppler rate for each pass above the
/// mask, grouped by pass.
pub fn doppler_profile(
    orbit: &OrbitElements,
    user: &Vec3,
    carrier_hz: f64,
    t0: f64,
    t1: f64,
    step: f64,
    mask: f64,
) -> Result<Vec<(Pass, Vec<DopplerSample>)>> {
    let f = |t: f64| {
        let s = propagate_orbit(orbit, t);
        doppler_frequency(&s.position, &s.velocity, user, carrier_hz)
    };
    let mut out = Vec::new();
    for pass in find_passes(orbit, user, t0, t1, step, mask)? {
        let mut rows = Vec::new();
        for t in sample_times(pass.start, pass.end, step)? {
            let s = propagate_orbit(orbit, t);
            rows.push(DopplerSample {
                time: t,
                elevation: elevation_of(&s.position, user)?,
                doppler_hz: doppler_frequency(&s.position, &s.velocity, user, carrier_hz)?,
                doppler_rate_hz_s: (f(t + step)? - f(t - step)?) / (2.0 * step),
            });
        }
        out.push((pass, rows));
    }
    Ok(out)
}
