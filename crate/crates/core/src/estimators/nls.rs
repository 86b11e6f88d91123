//! Damped Gauss-Newton with multistart, shared by the snapshot estimators.
//! Residuals and Jacobians are noise-whitened by the caller.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::SolverConfig;
use crate::error::{Error, Result};

pub(crate) type Eval<'a> = dyn Fn(&DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> + 'a;

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub x: DVector<f64>,
    pub cost: f64,
    pub jacobian: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Another start reached an equally good minimum elsewhere.
    pub distinct_minima: bool,
}

fn cost(r: &DVector<f64>) -> f64 {
    r.norm_squared()
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.min(b))
}

fn gauss_newton(eval: &Eval, x0: DVector<f64>, cfg: &SolverConfig) -> Result<Outcome> {
    let mut x = x0;
    let (mut r, mut j) = eval(&x)?;
    let mut c = cost(&r);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let svd = j.clone().svd(true, true);
        let eps = 1e-12 * svd.singular_values.max();
        let step = svd.solve(&(-&r), eps).map_err(|e| Error::Numerical(e.to_string()))?;
        let floor = cfg.tolerance.max(4.0 * f64::EPSILON * x.norm());

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let cand = &x + &step * alpha;
            if let Ok((rc, jc)) = eval(&cand) {
                let cc = cost(&rc);
                if cc <= c {
                    accepted = Some((cand, rc, jc, cc));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((cand, rc, jc, cc)) = accepted else {
            // No descent left: at a minimum to working precision, or stuck.
            converged = step.norm() <= 1e3 * floor;
            break;
        };
        let applied = (&cand - &x).norm();
        x = cand;
        r = rc;
        j = jc;
        c = cc;
        if applied < floor {
            converged = true;
            break;
        }
    }
    Ok(Outcome { x, cost: c, jacobian: j, iterations, converged, distinct_minima: false })
}

/// Start 0 is `x0`; the rest are `x0 +- jitter` pairs on the first
/// `jitter_dims` coordinates, drawn from the solver seed.
pub(crate) fn starts(x0: &DVector<f64>, jitter_dims: usize, scale: f64, cfg: &SolverConfig) -> Vec<DVector<f64>> {
    let mut out = vec![x0.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    while out.len() < cfg.multistart {
        let mut jitter = DVector::zeros(x0.len());
        for k in 0..jitter_dims {
            jitter[k] = scale * normal.sample(&mut rng);
        }
        out.push(x0 + &jitter);
        if out.len() < cfg.multistart {
            out.push(x0 - &jitter);
        }
    }
    out
}

/// Runs every start and keeps the lowest cost; ties go to the lowest index.
/// `separation` is the distance beyond which two tied minima count as
/// distinct.
pub(crate) fn multistart(
    eval: &Eval,
    starts: Vec<DVector<f64>>,
    separation: f64,
    cfg: &SolverConfig,
) -> Result<Outcome> {
    let mut runs = Vec::with_capacity(starts.len());
    let mut first_err = None;
    for s in starts {
        match gauss_newton(eval, s, cfg) {
            Ok(o) => runs.push(o),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let mut best: Option<usize> = None;
    for (i, o) in runs.iter().enumerate() {
        match best {
            Some(b) if !(o.cost < runs[b].cost && !ties(o.cost, runs[b].cost)) => {}
            _ => best = Some(i),
        }
    }
    let Some(b) = best else {
        return Err(first_err.unwrap_or_else(|| Error::Numerical("no solver start succeeded".into())));
    };
    let distinct = runs
        .iter()
        .any(|o| o.converged && ties(o.cost, runs[b].cost) && (&o.x - &runs[b].x).norm() > separation);
    let mut out = runs.swap_remove(b);
    out.distinct_minima = distinct;
    Ok(out)
}

/// `(J^T J)^-1` of a whitened Jacobian, or `None` when it is rank deficient.
pub(crate) fn covariance(j: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let svd = j.clone().svd(false, true);
    let sv = &svd.singular_values;
    let (lo, hi) = (sv.min(), sv.max());
    if sv.len() < j.ncols() || !(hi > 0.0) || lo <= 1e-10 * hi {
        return None;
    }
    let v_t = svd.v_t.expect("requested");
    let inv_sq = DMatrix::from_diagonal(&sv.map(|s| 1.0 / (s * s)));
    let cov = v_t.transpose() * inv_sq * v_t;
    Some((&cov + cov.transpose()) * 0.5)
}
