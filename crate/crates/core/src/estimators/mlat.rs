use nalgebra::{DMatrix, DVector, Matrix3};

use super::nls::{self, Outcome};
use super::{centroid, check_sigmas, coplanar, rms_spread, PositionEstimate, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::radio::SPEED_OF_LIGHT;

/// Range difference `||p - p_first|| - ||p - p_second||`, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdoaMeasurement {
    pub first: usize,
    pub second: usize,
    pub range_diff: f64,
    pub sigma: f64,
}

/// Differences every arrival time against `reference`.
pub fn tdoa_from_toas(toas: &[f64], reference: usize, sigma: f64) -> Result<Vec<TdoaMeasurement>> {
    if reference >= toas.len() {
        return Err(Error::config(format!("reference anchor {reference} out of range")));
    }
    Ok((0..toas.len())
        .filter(|&i| i != reference)
        .map(|i| TdoaMeasurement {
            first: i,
            second: reference,
            range_diff: SPEED_OF_LIGHT * (toas[i] - toas[reference]),
            sigma,
        })
        .collect())
}

fn vec3(x: &DVector<f64>) -> Vec3 {
    Vec3::new(x[0], x[1], x[2])
}

fn unit_from(anchor: &Vec3, p: &Vec3) -> Result<(f64, Vec3)> {
    let d = p - anchor;
    let n = d.norm();
    if !(n > 0.0) {
        return Err(Error::geometry("estimate coincides with an anchor"));
    }
    Ok((n, d / n))
}

fn start_point(anchors: &[Vec3], cfg: &SolverConfig) -> (DVector<f64>, f64) {
    let x0 = cfg.initial_guess.unwrap_or_else(|| centroid(anchors));
    let scale = cfg.jitter_scale.unwrap_or_else(|| rms_spread(anchors).max(1.0));
    (DVector::from_column_slice(x0.as_slice()), scale)
}

/// Least-squares solution of `A x = b`, or `None` when `A` lacks full
/// column rank.
fn solve_full_rank(a: DMatrix<f64>, b: DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    if sv.len() < svd.v_t.as_ref()?.ncols() || !(sv.min() > 1e-10 * sv.max()) {
        return None;
    }
    svd.solve(&b, 0.0).ok()
}

/// Closed-form start from the differenced squared ranges (exact for
/// noiseless data, skipped for coplanar anchors).
fn linear_range_start(anchors: &[Vec3], ranges: &[f64]) -> Option<DVector<f64>> {
    let c = centroid(anchors);
    let a0 = anchors[0] - c;
    let rows = anchors.len() - 1;
    let mut a = DMatrix::zeros(rows, 3);
    let mut b = DVector::zeros(rows);
    for (k, (ai, ri)) in anchors.iter().zip(ranges).skip(1).enumerate() {
        let ai = ai - c;
        a.row_mut(k).copy_from(&(2.0 * (ai - a0)).transpose());
        b[k] = ai.norm_squared() - a0.norm_squared() - (ri * ri - ranges[0] * ranges[0]);
    }
    let x = solve_full_rank(a, b)?;
    Some(DVector::from_column_slice((vec3(&x) + c).as_slice()))
}

/// Closed-form start for differences that all share one anchor: unknowns
/// are the position and the distance to that shared anchor.
fn linear_tdoa_start(anchors: &[Vec3], meas: &[TdoaMeasurement]) -> Option<DVector<f64>> {
    let shared = [meas[0].first, meas[0].second].into_iter().find(|&r| meas.iter().all(|m| m.first == r || m.second == r))?;
    let c = centroid(anchors);
    let ar = anchors[shared] - c;
    let mut a = DMatrix::zeros(meas.len(), 4);
    let mut b = DVector::zeros(meas.len());
    for (k, m) in meas.iter().enumerate() {
        // delta = d_other - d_shared
        let (other, delta) = if m.second == shared { (m.first, m.range_diff) } else { (m.second, -m.range_diff) };
        let ai = anchors[other] - c;
        let g = 2.0 * (ai - ar);
        a.row_mut(k).copy_from(&nalgebra::RowVector4::new(g.x, g.y, g.z, 2.0 * delta));
        b[k] = ai.norm_squared() - ar.norm_squared() - delta * delta;
    }
    let x = solve_full_rank(a, b)?;
    Some(DVector::from_column_slice((Vec3::new(x[0], x[1], x[2]) + c).as_slice()))
}

fn finish(o: Outcome, ambiguous: bool) -> Result<PositionEstimate> {
    let cov = nls::covariance(&o.jacobian)
        .ok_or_else(|| Error::geometry("normal matrix is singular at the solution"))?;
    Ok(PositionEstimate {
        position: vec3(&o.x),
        covariance: Matrix3::from_iterator(cov.iter().copied()),
        residual_norm: o.cost.sqrt(),
        iterations: o.iterations,
        converged: o.converged,
        ambiguous: ambiguous || o.distinct_minima,
    })
}

/// Weighted nonlinear least squares on ranges to at least four anchors.
pub fn mlat_range(anchors: &[Vec3], ranges: &[f64], sigmas: &[f64], cfg: &SolverConfig) -> Result<PositionEstimate> {
    cfg.validate()?;
    if anchors.len() != ranges.len() {
        return Err(Error::config(format!("{} anchors but {} ranges", anchors.len(), ranges.len())));
    }
    if anchors.len() < 4 {
        return Err(Error::geometry(format!(
            "3D range multilateration is under-determined with {} anchors (need >= 4)",
            anchors.len()
        )));
    }
    check_sigmas(sigmas, ranges.len())?;
    if ranges.iter().any(|d| !d.is_finite()) {
        return Err(Error::domain("ranges must be finite"));
    }
    let eval = |x: &DVector<f64>| {
        let p = vec3(x);
        let mut r = DVector::zeros(anchors.len());
        let mut j = DMatrix::zeros(anchors.len(), 3);
        for (i, a) in anchors.iter().enumerate() {
            let (rho, u) = unit_from(a, &p)?;
            r[i] = (rho - ranges[i]) / sigmas[i];
            j.row_mut(i).copy_from(&(u / sigmas[i]).transpose());
        }
        Ok((r, j))
    };
    let (x0, scale) = start_point(anchors, cfg);
    let mut starts = nls::starts(&x0, 3, scale, cfg);
    starts.extend(linear_range_start(anchors, ranges));
    let o = nls::multistart(&eval, starts, 1e-4 * scale + 1e-6, cfg)?;
    finish(o, coplanar(anchors))
}

fn connected_anchor_count(n: usize, meas: &[TdoaMeasurement]) -> (usize, bool) {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut used = vec![false; n];
    for m in meas {
        used[m.first] = true;
        used[m.second] = true;
        let (a, b) = (root(&mut parent, m.first), root(&mut parent, m.second));
        parent[a] = b;
    }
    let involved: Vec<usize> = (0..n).filter(|&i| used[i]).collect();
    let roots: std::collections::BTreeSet<usize> = involved.iter().map(|&i| root(&mut parent, i)).collect();
    (involved.len(), roots.len() == 1)
}

/// Weighted nonlinear least squares on pairwise range differences.
pub fn mlat_tdoa(anchors: &[Vec3], meas: &[TdoaMeasurement], cfg: &SolverConfig) -> Result<PositionEstimate> {
    cfg.validate()?;
    if let Some(m) = meas.iter().find(|m| m.first >= anchors.len() || m.second >= anchors.len() || m.first == m.second) {
        return Err(Error::config(format!("bad anchor pair ({}, {}) for {} anchors", m.first, m.second, anchors.len())));
    }
    let (count, connected) = connected_anchor_count(anchors.len(), meas);
    if count < 4 || !connected || meas.len() < 3 {
        return Err(Error::geometry(format!(
            "3D TDOA is under-determined: measurements must connect >= 4 anchors ({count} involved, connected = {connected})"
        )));
    }
    let sigmas: Vec<f64> = meas.iter().map(|m| m.sigma).collect();
    check_sigmas(&sigmas, meas.len())?;
    let eval = |x: &DVector<f64>| {
        let p = vec3(x);
        let mut r = DVector::zeros(meas.len());
        let mut j = DMatrix::zeros(meas.len(), 3);
        for (k, m) in meas.iter().enumerate() {
            let (ri, ui) = unit_from(&anchors[m.first], &p)?;
            let (rj, uj) = unit_from(&anchors[m.second], &p)?;
            r[k] = (ri - rj - m.range_diff) / m.sigma;
            j.row_mut(k).copy_from(&((ui - uj) / m.sigma).transpose());
        }
        Ok((r, j))
    };
    let used: Vec<Vec3> = {
        let mut idx: Vec<usize> = meas.iter().flat_map(|m| [m.first, m.second]).collect();
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter().map(|i| anchors[i]).collect()
    };
    let (x0, scale) = start_point(&used, cfg);
    let mut starts = nls::starts(&x0, 3, scale, cfg);
    starts.extend(linear_tdoa_start(anchors, meas));
    let o = nls::multistart(&eval, starts, 1e-4 * scale + 1e-6, cfg)?;
    finish(o, coplanar(&used))
}
