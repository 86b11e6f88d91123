use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Piecewise-linear path through waypoints `w_0..w_n` with one duration per
/// segment. A segment whose endpoints coincide is a hover.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    waypoints: Vec<Vec3>,
    durations: Vec<f64>,
}

impl Trajectory {
    pub fn new(waypoints: Vec<Vec3>, durations: Vec<f64>) -> Result<Self> {
        if waypoints.is_empty() || waypoints.len() != durations.len() + 1 {
            return Err(Error::InvalidScenario(format!(
                "trajectory needs waypoint count = duration count + 1 (got {} waypoints, {} durations)",
                waypoints.len(),
                durations.len()
            )));
        }
        if durations.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::InvalidScenario(
                "segment durations must be finite and >= 0".into(),
            ));
        }
        if waypoints.iter().any(|w| !w.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidScenario("waypoints must be finite".into()));
        }
        Ok(Self { waypoints, durations })
    }

    /// A single hover of `dwell` seconds at `point`.
    pub fn hover(point: Vec3, dwell: f64) -> Result<Self> {
        Self::new(vec![point, point], vec![dwell])
    }

    pub fn waypoints(&self) -> &[Vec3] {
        &self.waypoints
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn total_duration(&self) -> f64 {
        self.durations.iter().sum()
    }

    /// Segments as `(start, end, duration)`.
    pub fn segments(&self) -> impl Iterator<Item = (&Vec3, &Vec3, f64)> {
        self.waypoints
            .windows(2)
            .zip(&self.durations)
            .map(|(w, t)| (&w[0], &w[1], *t))
    }

    /// Hover points with their dwell time. Consecutive hovers at the same
    /// point are merged.
    pub fn dwell_points(&self) -> Vec<(Vec3, f64)> {
        let mut out: Vec<(Vec3, f64)> = Vec::new();
        for (a, b, t) in self.segments() {
            if a == b && t > 0.0 {
                match out.last_mut() {
                    Some((p, dwell)) if p == a => *dwell += t,
                    _ => out.push((*a, t)),
                }
            }
        }
        out
    }

    pub fn position(&self, time: f64) -> Result<Vec3> {
        let total = self.total_duration();
        if !(0.0..=total).contains(&time) {
            return Err(Error::domain(format!(
                "time {time} s outside mission span [0, {total}] s"
            )));
        }
        let mut start = 0.0;
        for (a, b, t) in self.segments() {
            let end = start + t;
            if time <= end && t > 0.0 {
                if time == end {
                    return Ok(*b);
                }
                let frac = (time - start) / t;
                return Ok(a + (b - a) * frac);
            }
            start = end;
        }
        Ok(*self.waypoints.last().expect("non-empty by construction"))
    }
}

/// Placement inaccuracy of an aerial anchor: range estimation error and the
/// horizontal and vertical displacement of the anchor itself (all metres).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlacementError {
    pub range_m: f64,
    pub horizontal_m: f64,
    pub vertical_m: f64,
}

impl PlacementError {
    pub fn new(range_m: f64, horizontal_m: f64, vertical_m: f64) -> Result<Self> {
        let e = Self { range_m, horizontal_m, vertical_m };
        if [range_m, horizontal_m, vertical_m].iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::domain(format!("placement errors must be >= 0, got {e:?}")));
        }
        Ok(e)
    }

    /// Actual anchor position for a scheduled waypoint: a uniform draw on a
    /// horizontal disc of radius `horizontal_m` plus a uniform vertical
    /// offset in `[-vertical_m, vertical_m]`.
    pub fn realize<R: Rng + ?Sized>(&self, scheduled: &Vec3, rng: &mut R) -> Vec3 {
        let radius = self.horizontal_m * rng.random::<f64>().sqrt();
        let angle = 2.0 * PI * rng.random::<f64>();
        let dz = self.vertical_m * (2.0 * rng.random::<f64>() - 1.0);
        scheduled + Vec3::new(radius * angle.cos(), radius * angle.sin(), dz)
    }
}

/// Worst-case ranging error projected on the horizontal plane (`E_r`) and on
/// the vertical (`E_h`) for an anchor at altitude `h` and horizontal distance
/// `r` from the target. First-order; valid while the errors are small
/// compared with `h` and `r`.
pub fn placement_error_bounds(e: &PlacementError, h: f64, r: f64) -> Result<(f64, f64)> {
    if !(h > 0.0 && r > 0.0) {
        return Err(Error::domain(format!("need h > 0 and r > 0, got h = {h}, r = {r}")));
    }
    let e_r = e.horizontal_m + (h / r) * e.vertical_m + e.range_m * (1.0 + (h * h) / (r * r)).sqrt();
    let e_h = e.vertical_m + (r / h) * e.horizontal_m + e.range_m * (1.0 + (r * r) / (h * h)).sqrt();
    Ok((e_r, e_h))
}
