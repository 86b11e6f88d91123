//! Global/local frames, attitude rotations, distances and angles between
//! anchors and targets.
//!
//! The global frame is a flat, right-handed local Cartesian frame (x east-ish,
//! z up). Angles are radians everywhere in the library. Azimuth is the
//! counter-clockwise angle from +x in the xy-plane, elevation is measured from
//! the xy-plane towards +z.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Pitch (about x), roll (about y) and yaw (about z) of a local frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Attitude {
    pub pitch: f64,
    pub roll: f64,
    pub yaw: f64,
}

impl Attitude {
    pub fn new(pitch: f64, roll: f64, yaw: f64) -> Self {
        Self { pitch, roll, yaw }
    }

    pub fn from_degrees(pitch: f64, roll: f64, yaw: f64) -> Self {
        Self::new(pitch.to_radians(), roll.to_radians(), yaw.to_radians())
    }
}

/// Orthonormal, right-handed 3x3 rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wraps a matrix after checking orthonormality and det = +1 (within 1e-9).
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let ortho = (m.transpose() * m - Matrix3::identity()).amax();
        let det = m.determinant();
        if !(ortho < 1e-9 && (det - 1.0).abs() < 1e-9) {
            return Err(Error::domain(format!(
                "matrix is not a proper rotation (|RtR - I|max = {ortho:e}, det = {det})"
            )));
        }
        Ok(Self(m))
    }

    pub fn about_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    pub fn about_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    pub fn compose(&self, other: &RotationMatrix) -> Self {
        Self(self.0 * other.0)
    }
}

/// Position, velocity and attitude of a node in the global frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    pub velocity: Vec3,
    pub attitude: Attitude,
}

impl Pose {
    pub fn at(position: Vec3) -> Self {
        Self {
            position,
            velocity: Vec3::zeros(),
            attitude: Attitude::default(),
        }
    }

    pub fn rotation(&self) -> RotationMatrix {
        rotation_from_attitude(&self.attitude)
    }
}

/// Azimuth in (-pi, pi], elevation in [-pi/2, pi/2].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnglePair {
    pub azimuth: f64,
    pub elevation: f64,
}

impl AnglePair {
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Self { azimuth, elevation }
    }

    /// Unit direction `[cos az cos el, sin az cos el, sin el]`.
    pub fn unit_vector(&self) -> Vec3 {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        Vec3::new(ca * ce, sa * ce, se)
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_pi(angle: f64) -> f64 {
    let mut a = angle % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// `R = Rz(yaw) * Rx(pitch) * Ry(roll)`: roll is applied first, then pitch,
/// then yaw.
pub fn rotation_from_attitude(att: &Attitude) -> RotationMatrix {
    RotationMatrix::about_z(att.yaw)
        .compose(&RotationMatrix::about_x(att.pitch))
        .compose(&RotationMatrix::about_y(att.roll))
}

pub fn direct_distance(a: &Vec3, b: &Vec3) -> f64 {
    (a - b).norm()
}

/// Length of the projection of `a - b` onto the xy-plane.
pub fn horizontal_distance(a: &Vec3, b: &Vec3) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

fn angles_of(offset: &Vec3) -> Result<AnglePair> {
    let d = offset.norm();
    if !(d > 0.0) {
        return Err(Error::domain("angles undefined for coincident points"));
    }
    // Directly above/below: azimuth pinned to 0.
    let azimuth = if offset.x == 0.0 && offset.y == 0.0 {
        0.0
    } else {
        offset.y.atan2(offset.x)
    };
    let elevation = (offset.z / d).clamp(-1.0, 1.0).asin();
    Ok(AnglePair {
        azimuth: if azimuth == -PI { PI } else { azimuth },
        elevation,
    })
}

/// Global-frame azimuth/elevation of `target` as seen from `anchor`.
pub fn geometric_angles(anchor: &Vec3, target: &Vec3) -> Result<AnglePair> {
    angles_of(&(target - anchor))
}

/// Converts anchor-side geometric angles into the target-side pair.
pub fn target_side_angles(a: &AnglePair) -> AnglePair {
    let azimuth = if a.azimuth > 0.0 {
        a.azimuth - PI
    } else {
        a.azimuth + PI
    };
    AnglePair {
        azimuth,
        elevation: -a.elevation,
    }
}

/// Angles of `target` in the local frame of an anchor whose orientation is
/// `rotation`, i.e. the angles of `R * (target - anchor)`.
pub fn local_aoa(anchor: &Vec3, target: &Vec3, rotation: &RotationMatrix) -> Result<AnglePair> {
    let offset = target - anchor;
    if !(offset.norm() > 0.0) {
        return Err(Error::domain("AOA undefined for coincident points"));
    }
    angles_of(&rotation.rotate(&offset))
}

/// Inverse of `(direct_distance, local_aoa)`: `anchor + d * R^T u(az, el)`.
pub fn position_from_range_aoa(
    anchor: &Vec3,
    range: f64,
    aoa: &AnglePair,
    rotation: &RotationMatrix,
) -> Result<Vec3> {
    if !(range > 0.0) {
        return Err(Error::domain(format!("range must be positive, got {range}")));
    }
    Ok(anchor + rotation.transpose().rotate(&aoa.unit_vector()) * range)
}
