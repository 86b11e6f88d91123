//! Localization KPIs: error, RMSE, empirical CDF, DOP and the range CRLB.

use nalgebra::{Matrix3, MatrixXx3};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorSample {
    pub trial: usize,
    /// Absolute per-axis errors, m.
    pub ex: f64,
    pub ey: f64,
    pub ez: f64,
    pub error_3d: f64,
}

impl ErrorSample {
    pub fn horizontal(&self) -> f64 {
        self.ex.hypot(self.ey)
    }

    pub fn with_trial(mut self, trial: usize) -> Self {
        self.trial = trial;
        self
    }
}

pub fn position_error(truth: &Vec3, estimate: &Vec3) -> ErrorSample {
    let d = estimate - truth;
    ErrorSample {
        trial: 0,
        ex: d.x.abs(),
        ey: d.y.abs(),
        ez: d.z.abs(),
        error_3d: d.norm(),
    }
}

pub fn rmse(samples: &[ErrorSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("RMSE of an empty sample set"));
    }
    Ok((samples.iter().map(|s| s.error_3d * s.error_3d).sum::<f64>() / samples.len() as f64).sqrt())
}

/// Step function through the distinct sorted values.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfCurve {
    values: Vec<f64>,
    probabilities: Vec<f64>,
}

pub fn empirical_cdf(samples: &[f64]) -> Result<CdfCurve> {
    if samples.is_empty() {
        return Err(Error::domain("CDF of an empty sample set"));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("CDF samples must not be NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut values: Vec<f64> = Vec::new();
    let mut probabilities: Vec<f64> = Vec::new();
    for (k, v) in sorted.iter().enumerate() {
        let p = (k + 1) as f64 / n;
        if values.last() == Some(v) {
            *probabilities.last_mut().expect("paired") = p;
        } else {
            values.push(*v);
            probabilities.push(p);
        }
    }
    Ok(CdfCurve { values, probabilities })
}

impl CdfCurve {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probabilities.iter().copied())
    }

    /// `P(error <= x)`.
    pub fn probability_at(&self, x: f64) -> f64 {
        match self.values.partition_point(|v| *v <= x) {
            0 => 0.0,
            k => self.probabilities[k - 1],
        }
    }

    /// Smallest value whose cumulative probability reaches `q`.
    pub fn percentile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("percentile level must lie in [0, 1], got {q}")));
        }
        let k = self.probabilities.partition_point(|p| *p < q - 1e-12);
        Ok(self.values[k.min(self.values.len() - 1)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DopKind {
    Range,
    /// Rows are `u_i - u_reference`.
    Tdoa { reference: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dop {
    pub gdop: f64,
    pub hdop: f64,
    pub vdop: f64,
}

fn unit_vectors(anchors: &[Vec3], target: &Vec3) -> Result<Vec<Vec3>> {
    anchors
        .iter()
        .map(|a| {
            let d = a - target;
            let n = d.norm();
            if !(n > 0.0) {
                return Err(Error::geometry("target coincides with an anchor"));
            }
            Ok(d / n)
        })
        .collect()
}

fn information_inverse(rows: &[Vec3], weights: &[f64]) -> Result<Matrix3<f64>> {
    let g = MatrixXx3::from_fn(rows.len(), |r, c| rows[r][c]);
    let sv = g.clone().svd(false, false).singular_values;
    if rows.len() < 3 || sv.min() <= 1e-10 * sv.max() {
        return Err(Error::geometry("design matrix is rank deficient"));
    }
    let info = rows
        .iter()
        .zip(weights)
        .fold(Matrix3::zeros(), |acc, (u, w)| acc + u * u.transpose() * *w);
    let inv = info.try_inverse().ok_or_else(|| Error::geometry("information matrix is singular"))?;
    Ok((inv + inv.transpose()) * 0.5)
}

/// Dilution of precision without a clock column.
pub fn gdop(anchors: &[Vec3], target: &Vec3, kind: DopKind) -> Result<Dop> {
    let u = unit_vectors(anchors, target)?;
    let rows: Vec<Vec3> = match kind {
        DopKind::Range => u,
        DopKind::Tdoa { reference } => {
            let r = *u.get(reference).ok_or_else(|| Error::config(format!("reference anchor {reference} out of range")))?;
            u.iter().enumerate().filter(|(i, _)| *i != reference).map(|(_, v)| v - r).collect()
        }
    };
    let c = information_inverse(&rows, &vec![1.0; rows.len()])?;
    Ok(Dop {
        gdop: c.trace().sqrt(),
        hdop: (c[(0, 0)] + c[(1, 1)]).sqrt(),
        vdop: c[(2, 2)].sqrt(),
    })
}

/// Inverse Fisher information for independent Gaussian range errors.
pub fn crlb_range(anchors: &[Vec3], target: &Vec3, sigmas: &[f64]) -> Result<Matrix3<f64>> {
    if sigmas.len() != anchors.len() {
        return Err(Error::config(format!("{} anchors but {} sigmas", anchors.len(), sigmas.len())));
    }
    if sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::domain("range sigmas must be finite and > 0"));
    }
    let u = unit_vectors(anchors, target)?;
    let w: Vec<f64> = sigmas.iter().map(|s| 1.0 / (s * s)).collect();
    information_inverse(&u, &w)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::geometry::{rotation_from_attitude, Attitude};

    fn tetrahedron() -> Vec<Vec3> {
        let s = 1.0 / 3f64.sqrt();
        vec![Vec3::new(s, s, s), Vec3::new(s, -s, -s), Vec3::new(-s, s, -s), Vec3::new(-s, -s, s)]
    }

    fn octahedron() -> Vec<Vec3> {
        let mut v = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut p = Vec3::zeros();
                p[k] = 10.0 * s;
                v.push(p);
            }
        }
        v
    }

    #[test]
    fn error_examples() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(position_error(&p, &p), ErrorSample::default());
        let e = position_error(&Vec3::zeros(), &Vec3::new(3.0, -4.0, 0.0));
        assert_eq!((e.ex, e.ey, e.ez, e.error_3d), (3.0, 4.0, 0.0, 5.0));
        let shift = Vec3::new(7.0, -1.0, 2.5);
        let moved = position_error(&shift, &(Vec3::new(3.0, -4.0, 0.0) + shift));
        assert_abs_diff_eq!(moved.error_3d, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn rmse_examples() {
        let mk = |e: f64| ErrorSample { error_3d: e, ..Default::default() };
        assert_abs_diff_eq!(rmse(&[mk(2.0), mk(2.0), mk(2.0)]).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rmse(&[mk(3.0), mk(4.0)]).unwrap(), 12.5f64.sqrt(), epsilon = 1e-15);
        assert!(rmse(&[]).is_err());
    }

    #[test]
    fn cdf_examples() {
        let c = empirical_cdf(&[7.0]).unwrap();
        assert_eq!(c.points().collect::<Vec<_>>(), vec![(7.0, 1.0)]);
        let c = empirical_cdf(&[4.0, 2.0, 1.0, 3.0]).unwrap();
        assert_eq!(c.probability_at(2.0), 0.5);
        assert_eq!(c.probability_at(0.5), 0.0);
        let ten: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(empirical_cdf(&ten).unwrap().percentile(0.9).unwrap(), 9.0);
        let tied = empirical_cdf(&[1.0, 1.0, 2.0]).unwrap();
        assert_eq!(tied.points().collect::<Vec<_>>(), vec![(1.0, 2.0 / 3.0), (2.0, 1.0)]);
        assert!(empirical_cdf(&[]).is_err());
    }

    #[test]
    fn tetrahedron_dop() {
        let d = gdop(&tetrahedron(), &Vec3::zeros(), DopKind::Range).unwrap();
        // oracle: G^T G = (4/3) I
        assert_abs_diff_eq!(d.gdop, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.hdop, 1.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.vdop, 0.75f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn planar_anchors_have_poor_vdop() {
        let anchors: Vec<Vec3> = (0..9).map(|i| Vec3::new((i % 3) as f64 * 5e3, (i / 3) as f64 * 5e3, 0.0)).collect();
        // ranges: weak vertical geometry when the target is low over a wide grid
        let d = gdop(&anchors, &Vec3::new(2.5e3, 2.5e3, 100.0), DopKind::Range).unwrap();
        assert!(d.vdop > 3.0 * d.hdop, "{d:?}");
        // differencing cancels the common vertical component for a high target
        let compact: Vec<Vec3> = anchors.iter().map(|a| a * 0.4).collect();
        let d = gdop(&compact, &Vec3::new(2.3e3, 1.6e3, 10e3), DopKind::Tdoa { reference: 4 }).unwrap();
        assert!(d.vdop > 3.0 * d.hdop, "{d:?}");
        assert_eq!(gdop(&anchors, &Vec3::new(5e3, 5e3, 0.0), DopKind::Range).unwrap_err().code(), "GEOMETRY");
    }

    #[test]
    fn octahedron_crlb() {
        let c = crlb_range(&octahedron(), &Vec3::zeros(), &[2.0; 6]).unwrap();
        assert!((c - Matrix3::identity() * 2.0).norm() < 1e-12);
        assert_abs_diff_eq!(c.trace(), 1.5 * 4.0, epsilon = 1e-12);

        let mut sig = [1.0; 6];
        sig[0] = 1e-6;
        let c = crlb_range(&octahedron(), &Vec3::zeros(), &sig).unwrap();
        assert!(c[(0, 0)] < 1e-11);
    }

    proptest! {
        #[test]
        fn dop_ties_to_crlb_and_is_rotation_invariant(
            pts in prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64, -100.0..100.0f64), 5..9),
            att in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
            sigma in 0.1..5.0f64,
            scale in 0.1..50.0f64,
        ) {
            let anchors: Vec<Vec3> = pts.iter().map(|&(x, y, z)| Vec3::new(x, y, z)).collect();
            let target = Vec3::new(1.0, 2.0, 3.0);
            let Ok(d) = gdop(&anchors, &target, DopKind::Range) else { return Ok(()) };
            prop_assume!(d.gdop < 1e3);
            let c = crlb_range(&anchors, &target, &vec![sigma; anchors.len()]).unwrap();
            prop_assert!((c.trace() / (sigma * sigma * d.gdop * d.gdop) - 1.0).abs() < 1e-9);

            let rot = rotation_from_attitude(&Attitude::new(att.0, att.1, att.2));
            let turned: Vec<Vec3> = anchors.iter().map(|a| rot.rotate(a)).collect();
            let dr = gdop(&turned, &rot.rotate(&target), DopKind::Range).unwrap();
            prop_assert!((dr.gdop / d.gdop - 1.0).abs() < 1e-9);

            let scaled: Vec<Vec3> = anchors.iter().map(|a| a * scale).collect();
            let ds = gdop(&scaled, &(target * scale), DopKind::Range).unwrap();
            prop_assert!((ds.gdop / d.gdop - 1.0).abs() < 1e-9);
        }

        #[test]
        fn cdf_is_monotone(samples in prop::collection::vec(0.0..100.0f64, 1..60), q1 in 0.0..1.0f64, q2 in 0.0..1.0f64) {
            let c = empirical_cdf(&samples).unwrap();
            prop_assert!(c.values().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(c.probabilities().windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(*c.probabilities().last().unwrap(), 1.0);
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            prop_assert!(c.percentile(lo).unwrap() <= c.percentile(hi).unwrap());
        }
    }
}
