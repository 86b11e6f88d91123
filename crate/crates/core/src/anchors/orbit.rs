//! Circular-orbit satellites on a spherical, uniformly rotating Earth.
//!
//! The Earth-fixed (ECEF) frame coincides with the inertial frame at `t = 0`.
//! No J2, drag or eccentricity.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{RotationMatrix, Vec3};

/// Earth gravitational parameter, m^3/s^2.
pub const EARTH_MU: f64 = 3.986004418e14;
/// Mean Earth radius, m.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Earth rotation rate, rad/s.
pub const EARTH_ROTATION_RATE: f64 = 7.2921159e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitElements {
    /// Height above the mean Earth radius, m.
    pub altitude_m: f64,
    pub inclination: f64,
    /// Right ascension of the ascending node.
    pub raan: f64,
    /// Argument of latitude at `t = 0`.
    pub phase: f64,
}

impl OrbitElements {
    pub fn new(altitude_m: f64, inclination: f64, raan: f64, phase: f64) -> Result<Self> {
        let o = Self { altitude_m, inclination, raan, phase };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_m > 0.0) || !(0.0..=PI).contains(&self.inclination) {
            return Err(Error::domain(format!(
                "orbit needs altitude > 0 and inclination in [0, pi], got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn semi_major_axis(&self) -> f64 {
        EARTH_RADIUS_M + self.altitude_m
    }

    /// Mean motion, rad/s.
    pub fn mean_motion(&self) -> f64 {
        (EARTH_MU / self.semi_major_axis().powi(3)).sqrt()
    }

    pub fn period(&self) -> f64 {
        TAU / self.mean_motion()
    }
}

/// Position and velocity of a satellite at one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitState {
    pub position: Vec3,
    pub velocity: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationKind {
    /// Near-90 degree planes spread over half a revolution of RAAN.
    Polar,
    /// Template-inclination planes spread over the full circle.
    Walker,
    /// Both of the above.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constellation {
    pub kind: ConstellationKind,
    pub planes: usize,
    pub sats_per_plane: usize,
    pub template: OrbitElements,
}

fn plane_orbits(
    template: &OrbitElements,
    inclination: f64,
    raan_span: f64,
    planes: usize,
    per_plane: usize,
) -> impl Iterator<Item = OrbitElements> + '_ {
    let total = (planes * per_plane) as f64;
    (0..planes).flat_map(move |p| {
        (0..per_plane).map(move |s| OrbitElements {
            altitude_m: template.altitude_m,
            inclination,
            raan: template.raan + raan_span * p as f64 / planes as f64,
            phase: template.phase + TAU * s as f64 / per_plane as f64 + TAU * p as f64 / total,
        })
    })
}

/// Orbit elements of every satellite, plane by plane. In-plane phases are
/// evenly spaced; plane `p` is offset by `2 pi p / (planes * sats_per_plane)`.
pub fn generate_constellation(c: &Constellation) -> Result<Vec<OrbitElements>> {
    if c.planes == 0 || c.sats_per_plane == 0 {
        return Err(Error::domain("constellation needs at least one plane and one satellite"));
    }
    c.template.validate()?;
    let t = &c.template;
    let polar = || plane_orbits(t, PI / 2.0, PI, c.planes, c.sats_per_plane);
    let walker = || plane_orbits(t, t.inclination, TAU, c.planes, c.sats_per_plane);
    Ok(match c.kind {
        ConstellationKind::Polar => polar().collect(),
        ConstellationKind::Walker => walker().collect(),
        ConstellationKind::Mixed => polar().chain(walker()).collect(),
    })
}

fn orbital_to_inertial(o: &OrbitElements) -> RotationMatrix {
    RotationMatrix::about_z(o.raan).compose(&RotationMatrix::about_x(o.inclination))
}

/// State in the inertial frame.
pub fn propagate_orbit_inertial(o: &OrbitElements, time: f64) -> OrbitState {
    let a = o.semi_major_axis();
    let n = o.mean_motion();
    let (s, c) = (o.phase + n * time).sin_cos();
    let rot = orbital_to_inertial(o);
    OrbitState {
        position: rot.rotate(&Vec3::new(a * c, a * s, 0.0)),
        velocity: rot.rotate(&Vec3::new(-a * n * s, a * n * c, 0.0)),
    }
}

/// State in the Earth-fixed frame.
pub fn propagate_orbit(o: &OrbitElements, time: f64) -> OrbitState {
    let inertial = propagate_orbit_inertial(o, time);
    let to_fixed = RotationMatrix::about_z(-EARTH_ROTATION_RATE * time);
    let position = to_fixed.rotate(&inertial.position);
    let omega = Vec3::new(0.0, 0.0, EARTH_ROTATION_RATE);
    OrbitState {
        position,
        velocity: to_fixed.rotate(&inertial.velocity) - omega.cross(&position),
    }
}

/// Earth-fixed position of a point given spherical latitude/longitude (rad)
/// and height above the mean radius.
pub fn spherical_to_ecef(latitude: f64, longitude: f64, height_m: f64) -> Vec3 {
    let r = EARTH_RADIUS_M + height_m;
    let (slat, clat) = latitude.sin_cos();
    let (slon, clon) = longitude.sin_cos();
    Vec3::new(r * clat * clon, r * clat * slon, r * slat)
}

/// Elevation of `sat` above the local horizon at `user` (both Earth-fixed).
/// Negative below the horizon.
pub fn elevation_of(sat: &Vec3, user: &Vec3) -> Result<f64> {
    let up_norm = user.norm();
    let los = sat - user;
    if !(up_norm > 0.0) || !(los.norm() > 0.0) {
        return Err(Error::domain("elevation needs a non-zero user position distinct from the satellite"));
    }
    let sin_el = (user.dot(&los) / (up_norm * los.norm())).clamp(-1.0, 1.0);
    Ok(sin_el.asin())
}
