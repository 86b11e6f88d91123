//! Ground, UAV and LEO anchors.

mod leo;
mod orbit;
mod tle;
mod trajectory;

pub use leo::{
    doppler_frequency, doppler_profile, find_passes, ionospheric_delay, pseudorange_rate, range_rate,
    user_for_pass, DopplerSample, Pass, DEFAULT_ELEVATION_MASK,
};
pub use orbit::{
    elevation_of, generate_constellation, propagate_orbit, propagate_orbit_inertial, spherical_to_ecef,
    Constellation, ConstellationKind, OrbitElements, OrbitState, EARTH_MU, EARTH_RADIUS_M, EARTH_ROTATION_RATE,
};
pub use tle::{format_tle, parse_tle, parse_tle_file, tle_checksum, TleRecord, TLE_LINE_LEN};
pub use trajectory::{placement_error_bounds, PlacementError, Trajectory};

use crate::error::Result;
use crate::geometry::{Attitude, Pose, Vec3};

/// Kinematic model of one anchor.
#[derive(Debug, Clone, PartialEq)]
pub enum AnchorModel {
    Ground(Pose),
    Uav {
        trajectory: Trajectory,
        placement_error: PlacementError,
        attitude: Attitude,
    },
    /// Earth-fixed frame.
    Leo(OrbitElements),
}

impl AnchorModel {
    /// Scheduled (error-free) position at `time`.
    pub fn position(&self, time: f64) -> Result<Vec3> {
        match self {
            AnchorModel::Ground(p) => Ok(p.position),
            AnchorModel::Uav { trajectory, .. } => trajectory.position(time),
            AnchorModel::Leo(o) => Ok(propagate_orbit(o, time).position),
        }
    }

    pub fn velocity(&self, time: f64) -> Result<Vec3> {
        match self {
            AnchorModel::Ground(p) => Ok(p.velocity),
            AnchorModel::Uav { trajectory, .. } => {
                let mut start = 0.0;
                for (a, b, t) in trajectory.segments() {
                    if time <= start + t && t > 0.0 {
                        return Ok((b - a) / t);
                    }
                    start += t;
                }
                trajectory.position(time).map(|_| Vec3::zeros())
            }
            AnchorModel::Leo(o) => Ok(propagate_orbit(o, time).velocity),
        }
    }

    pub fn attitude(&self) -> Attitude {
        match self {
            AnchorModel::Ground(p) => p.attitude,
            AnchorModel::Uav { attitude, .. } => *attitude,
            AnchorModel::Leo(_) => Attitude::default(),
        }
    }
}
