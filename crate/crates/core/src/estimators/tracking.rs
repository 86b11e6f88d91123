//! Kalman and extended Kalman filtering.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{local_aoa, wrap_pi, RotationMatrix, Vec3};

/// Filter state; for the 3D models the layout is `[position, velocity]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackState {
    pub x: DVector<f64>,
    pub p: DMatrix<f64>,
    pub epoch: u64,
}

impl TrackState {
    pub fn new(x: DVector<f64>, p: DMatrix<f64>) -> Result<Self> {
        if p.nrows() != x.len() || p.ncols() != x.len() {
            return Err(Error::config(format!("state of size {} with {}x{} covariance", x.len(), p.nrows(), p.ncols())));
        }
        if (&p - p.transpose()).amax() > 1e-9 * p.amax().max(1.0) {
            return Err(Error::config("state covariance is not symmetric"));
        }
        Ok(Self { x, p, epoch: 0 })
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x[0], self.x[1], self.x[2])
    }
}

/// Constant-velocity transition and white-acceleration process noise for
/// a `[position, velocity]` state in 3D.
pub fn constant_velocity_model(dt: f64, q: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut f = DMatrix::identity(6, 6);
    let mut qm = DMatrix::zeros(6, 6);
    for i in 0..3 {
        f[(i, i + 3)] = dt;
        qm[(i, i)] = q * dt.powi(3) / 3.0;
        qm[(i, i + 3)] = q * dt * dt / 2.0;
        qm[(i + 3, i)] = q * dt * dt / 2.0;
        qm[(i + 3, i + 3)] = q * dt;
    }
    (f, qm)
}

pub fn kf_predict(s: &TrackState, f: &DMatrix<f64>, q: &DMatrix<f64>, dt: f64) -> Result<TrackState> {
    if !(dt > 0.0) {
        return Err(Error::domain(format!("prediction step must be positive, got {dt}")));
    }
    let n = s.x.len();
    if f.shape() != (n, n) || q.shape() != (n, n) {
        return Err(Error::config(format!(
            "state size {n} with F {:?} and Q {:?}",
            f.shape(),
            q.shape()
        )));
    }
    let p = f * &s.p * f.transpose() + q;
    Ok(TrackState {
        x: f * &s.x,
        p: (&p + p.transpose()) * 0.5,
        epoch: s.epoch + 1,
    })
}

/// Measurement function `h(x)` with its Jacobian.
pub trait MeasurementModel {
    fn predict(&self, x: &DVector<f64>) -> Result<DVector<f64>>;
    fn jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>>;
    /// Innovation `z - h(x)`; angle models wrap it.
    fn residual(&self, z: &DVector<f64>, predicted: &DVector<f64>) -> DVector<f64> {
        z - predicted
    }
}

pub struct LinearModel(pub DMatrix<f64>);

impl MeasurementModel for LinearModel {
    fn predict(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if self.0.ncols() != x.len() {
            return Err(Error::config(format!("H has {} columns for a state of size {}", self.0.ncols(), x.len())));
        }
        Ok(&self.0 * x)
    }

    fn jacobian(&self, _x: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(self.0.clone())
    }
}

fn position_of(x: &DVector<f64>, min_len: usize) -> Result<Vec3> {
    if x.len() < min_len {
        return Err(Error::config(format!("model needs a state of size >= {min_len}, got {}", x.len())));
    }
    Ok(Vec3::new(x[0], x[1], x[2]))
}

fn unit(d: Vec3) -> Result<(f64, Vec3)> {
    let n = d.norm();
    if !(n > 0.0) {
        return Err(Error::geometry("state position coincides with an anchor"));
    }
    Ok((n, d / n))
}

/// Ranges from fixed anchors.
pub struct RangeModel {
    pub anchors: Vec<Vec3>,
}

impl MeasurementModel for RangeModel {
    fn predict(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let p = position_of(x, 3)?;
        Ok(DVector::from_iterator(self.anchors.len(), self.anchors.iter().map(|a| (p - a).norm())))
    }

    fn jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let p = position_of(x, 3)?;
        let mut h = DMatrix::zeros(self.anchors.len(), x.len());
        for (i, a) in self.anchors.iter().enumerate() {
            let (_, u) = unit(p - a)?;
            for c in 0..3 {
                h[(i, c)] = u[c];
            }
        }
        Ok(h)
    }
}

/// Local azimuth and elevation at one anchor.
pub struct AoaModel {
    pub anchor: Vec3,
    pub rotation: RotationMatrix,
}

impl MeasurementModel for AoaModel {
    fn predict(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let a = local_aoa(&self.anchor, &position_of(x, 3)?, &self.rotation)?;
        Ok(DVector::from_vec(vec![a.azimuth, a.elevation]))
    }

    fn jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let v = self.rotation.rotate(&(position_of(x, 3)? - self.anchor));
        let rho2 = v.x * v.x + v.y * v.y;
        if !(rho2 > 0.0) {
            return Err(Error::geometry("azimuth is singular straight above or below the anchor"));
        }
        let rho = rho2.sqrt();
        let n2 = v.norm_squared();
        let d_az = Vec3::new(-v.y / rho2, v.x / rho2, 0.0);
        let d_el = Vec3::new(-v.x * v.z, -v.y * v.z, rho2) / (n2 * rho);
        let r = self.rotation.matrix();
        let mut h = DMatrix::zeros(2, x.len());
        for (row, g) in [d_az, d_el].iter().enumerate() {
            let gp = r.transpose() * g;
            for c in 0..3 {
                h[(row, c)] = gp[c];
            }
        }
        Ok(h)
    }

    fn residual(&self, z: &DVector<f64>, predicted: &DVector<f64>) -> DVector<f64> {
        let mut y = z - predicted;
        y[0] = wrap_pi(y[0]);
        y
    }
}

/// Pseudorange rates to satellites with known states; `bias_mps` holds the
/// clock term `c * (user drift - satellite drift)` per satellite. The state
/// must carry the receiver velocity in components 3..6.
pub struct PseudorangeRateModel {
    pub satellites: Vec<(Vec3, Vec3)>,
    pub bias_mps: Vec<f64>,
}

impl MeasurementModel for PseudorangeRateModel {
    fn predict(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let p = position_of(x, 6)?;
        let v = Vec3::new(x[3], x[4], x[5]);
        let mut z = DVector::zeros(self.satellites.len());
        for (i, (s, sv)) in self.satellites.iter().enumerate() {
            let (_, u) = unit(p - s)?;
            z[i] = (v - sv).dot(&u) + self.bias_mps.get(i).copied().unwrap_or(0.0);
        }
        Ok(z)
    }

    fn jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let p = position_of(x, 6)?;
        let v = Vec3::new(x[3], x[4], x[5]);
        let mut h = DMatrix::zeros(self.satellites.len(), x.len());
        for (i, (s, sv)) in self.satellites.iter().enumerate() {
            let (rho, u) = unit(p - s)?;
            let w = v - sv;
            let dp = (w - u * u.dot(&w)) / rho;
            for c in 0..3 {
                h[(i, c)] = dp[c];
                h[(i, c + 3)] = u[c];
            }
        }
        Ok(h)
    }
}

/// Joseph-form update. `H` is the model Jacobian at the prior state.
pub fn kf_update(
    s: &TrackState,
    z: &DVector<f64>,
    model: &dyn MeasurementModel,
    r: &DMatrix<f64>,
) -> Result<TrackState> {
    let predicted = model.predict(&s.x)?;
    let h = model.jacobian(&s.x)?;
    let m = z.len();
    if predicted.len() != m || r.shape() != (m, m) || h.shape() != (m, s.x.len()) {
        return Err(Error::config(format!(
            "measurement of size {m} with prediction {}, R {:?}, H {:?}",
            predicted.len(),
            r.shape(),
            h.shape()
        )));
    }
    if (r - r.transpose()).amax() > 1e-12 * r.amax() || r.clone().cholesky().is_none() {
        return Err(Error::config("measurement noise covariance must be symmetric positive definite"));
    }
    let innovation_cov = &h * &s.p * h.transpose() + r;
    let chol = innovation_cov
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("innovation covariance is not positive definite".into()))?;
    let gain = chol.solve(&(&h * &s.p)).transpose();
    let y = model.residual(z, &predicted);
    let i_kh = DMatrix::identity(s.x.len(), s.x.len()) - &gain * &h;
    let p = &i_kh * &s.p * i_kh.transpose() + &gain * r * gain.transpose();
    Ok(TrackState {
        x: &s.x + &gain * y,
        p: (&p + p.transpose()) * 0.5,
        epoch: s.epoch,
    })
}

/// Normalised estimation error squared against a known truth.
pub fn nees(s: &TrackState, truth: &DVector<f64>) -> Result<f64> {
    let e = &s.x - truth;
    let chol = s.p.clone().cholesky().ok_or_else(|| Error::Numerical("state covariance is not positive definite".into()))?;
    Ok(e.dot(&chol.solve(&e)))
}
