//! Monte Carlo trials over a scenario.
//!
//! Trial `i` draws from `stream_rng(seed, i)` in a fixed order: target,
//! anchor placement (one realisation per UAV anchor, in file order), then
//! measurement noise. Estimators see the scheduled anchor positions; the
//! measurements are synthesised from the realised ones.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::scenario::{MeasurementPlan, MeasurementPlanKind, Scenario, TargetSource};
use crate::anchors::AnchorModel;
use crate::error::{Error, Result};
use crate::estimators::{
    hybrid_range_aoa, mlat_range, mlat_tdoa, tdoa_from_toas, triangulate, HybridNoise, PositionEstimate, SolverConfig,
};
use crate::geometry::{local_aoa, rotation_from_attitude, AnglePair, RotationMatrix, Vec3};
use crate::metrics::{empirical_cdf, position_error, rmse, ErrorSample};
use crate::radio::{rss_range_sigma, rss_to_distance, sample_rss, MeasurementKind, SPEED_OF_LIGHT};
use crate::rng::{stream_rng, stream_seed};

#[derive(Debug, Clone, PartialEq)]
pub enum TrialStatus {
    Ok,
    /// Converged, but the solver flagged a mirror or a tied minimum.
    Ambiguous,
    NotConverged,
    /// The estimator refused the geometry; holds the error code.
    Failed(&'static str),
}

impl TrialStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialStatus::Ok => "ok",
            TrialStatus::Ambiguous => "ambiguous",
            TrialStatus::NotConverged => "not_converged",
            TrialStatus::Failed(code) => code,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub target: Vec3,
    pub estimate: Option<Vec3>,
    pub error: Option<ErrorSample>,
    pub status: TrialStatus,
}

/// Aggregates over the trials that produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub rmse_3d: f64,
    pub median_3d: f64,
    pub p90_3d: f64,
    pub p95_3d: f64,
    pub median_horizontal: f64,
    pub median_vertical: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub seed: u64,
    pub config_hash: String,
    /// Sorted by trial index.
    pub trials: Vec<TrialRecord>,
    /// `None` when every trial failed.
    pub summary: Option<Summary>,
    pub failures: usize,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn errors(&self) -> Vec<ErrorSample> {
        self.trials.iter().filter_map(|t| t.error).collect()
    }
}

/// Recomputes the aggregates from per-trial errors.
pub fn summarize(errors: &[ErrorSample]) -> Result<Summary> {
    let e3: Vec<f64> = errors.iter().map(|e| e.error_3d).collect();
    let h: Vec<f64> = errors.iter().map(ErrorSample::horizontal).collect();
    let v: Vec<f64> = errors.iter().map(|e| e.ez).collect();
    let cdf3 = empirical_cdf(&e3)?;
    Ok(Summary {
        rmse_3d: rmse(errors)?,
        median_3d: cdf3.percentile(0.5)?,
        p90_3d: cdf3.percentile(0.9)?,
        p95_3d: cdf3.percentile(0.95)?,
        median_horizontal: empirical_cdf(&h)?.percentile(0.5)?,
        median_vertical: empirical_cdf(&v)?.percentile(0.5)?,
    })
}

fn draw_target(source: &TargetSource, trial: u64, rng: &mut ChaCha8Rng) -> Vec3 {
    match source {
        TargetSource::Fixed(ts) => ts[(trial % ts.len() as u64) as usize].0,
        TargetSource::Box { min, max } => {
            Vec3::from_fn(|k, _| min[k] + (max[k] - min[k]) * rng.random::<f64>())
        }
        TargetSource::Disc { centre, radius, height_min, height_max } => {
            let r = radius * rng.random::<f64>().sqrt();
            let a = std::f64::consts::TAU * rng.random::<f64>();
            let z = height_min + (height_max - height_min) * rng.random::<f64>();
            Vec3::new(centre.x + r * a.cos(), centre.y + r * a.sin(), z)
        }
    }
}

fn gauss(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma > 0.0 {
        sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
    } else {
        0.0
    }
}

/// Weight used by the solvers when a configured sigma is zero.
fn weight_sigma(sigma: f64) -> f64 {
    if sigma > 0.0 {
        sigma
    } else {
        1.0
    }
}

fn elevation_at_target(anchor: &Vec3, target: &Vec3) -> f64 {
    let d = anchor - target;
    d.z.atan2(d.xy().norm()).clamp(0.0, std::f64::consts::FRAC_PI_2)
}

struct TrialInput<'a> {
    scenario: &'a Scenario,
    plan: &'a MeasurementPlan,
    scheduled: &'a [Vec3],
    rotations: &'a [RotationMatrix],
}

fn estimate(input: &TrialInput, actual: &[Vec3], target: &Vec3, rng: &mut ChaCha8Rng, cfg: &SolverConfig) -> Result<PositionEstimate> {
    let plan = input.plan;
    let true_ranges: Vec<f64> = actual.iter().map(|a| (a - target).norm()).collect();
    let noisy_range = |rng: &mut ChaCha8Rng, d: f64, sigma: f64| d + plan.nlos_bias_m + gauss(rng, sigma);
    match plan.kind {
        MeasurementPlanKind::Range => {
            let ranges: Vec<f64> = true_ranges.iter().map(|d| noisy_range(rng, *d, plan.range_sigma_m)).collect();
            let sigmas = vec![weight_sigma(plan.range_sigma_m); ranges.len()];
            mlat_range(input.scheduled, &ranges, &sigmas, cfg)
        }
        MeasurementPlanKind::Tdoa => {
            let toas: Vec<f64> = true_ranges
                .iter()
                .map(|d| noisy_range(rng, *d, plan.tdoa_sigma_m) / SPEED_OF_LIGHT)
                .collect();
            let pair_sigma = weight_sigma(plan.tdoa_sigma_m) * std::f64::consts::SQRT_2;
            let meas = tdoa_from_toas(&toas, plan.reference_anchor, pair_sigma)?;
            mlat_tdoa(input.scheduled, &meas, cfg)
        }
        MeasurementPlanKind::Aoa => {
            let mut aoas = Vec::with_capacity(actual.len());
            for (a, rot) in actual.iter().zip(input.rotations) {
                let t = local_aoa(a, target, rot)?;
                aoas.push(AnglePair::new(t.azimuth + gauss(rng, plan.aoa_sigma_rad), t.elevation + gauss(rng, plan.aoa_sigma_rad)));
            }
            let poses: Vec<(Vec3, RotationMatrix)> = input.scheduled.iter().copied().zip(input.rotations.iter().copied()).collect();
            let sigmas = vec![weight_sigma(plan.aoa_sigma_rad); aoas.len()];
            triangulate(&poses, &aoas, &sigmas, cfg)
        }
        MeasurementPlanKind::RangeAoa => {
            let rot = &input.rotations[0];
            let t = local_aoa(&actual[0], target, rot)?;
            let range = noisy_range(rng, true_ranges[0], plan.range_sigma_m);
            let aoa = AnglePair::new(t.azimuth + gauss(rng, plan.aoa_sigma_rad), t.elevation + gauss(rng, plan.aoa_sigma_rad));
            let noise = HybridNoise { range_m: plan.range_sigma_m, azimuth_rad: plan.aoa_sigma_rad, elevation_rad: plan.aoa_sigma_rad };
            hybrid_range_aoa(&input.scheduled[0], rot, range, &aoa, &noise)
        }
        MeasurementPlanKind::Rss => {
            let radio = input.scenario.radio.as_ref().expect("validated");
            let shadow = input.scenario.shadowing.as_ref().expect("validated");
            let mut ranges = Vec::with_capacity(actual.len());
            let mut sigmas = Vec::with_capacity(actual.len());
            for (a, d) in actual.iter().zip(&true_ranges) {
                let elev = elevation_at_target(a, target);
                let m = sample_rss(radio, shadow, *d, elev, rng)?;
                let MeasurementKind::Rss { dbm } = m.kind else { unreachable!("sample_rss returns RSS") };
                let d_hat = rss_to_distance(radio, dbm);
                ranges.push(d_hat);
                sigmas.push(weight_sigma(rss_range_sigma(radio, d_hat, m.sigma)));
            }
            mlat_range(input.scheduled, &ranges, &sigmas, cfg)
        }
    }
}

fn run_trial(input: &TrialInput, trial: u64) -> TrialRecord {
    let s = input.scenario;
    let mut rng = stream_rng(s.seed, trial);
    let target = draw_target(s.targets.as_ref().expect("validated"), trial, &mut rng);
    let actual: Vec<Vec3> = s
        .anchors
        .iter()
        .zip(input.scheduled)
        .map(|(a, p)| match a {
            AnchorModel::Uav { placement_error, .. } => placement_error.realize(p, &mut rng),
            _ => *p,
        })
        .collect();
    let cfg = SolverConfig { seed: stream_seed(s.solver.seed, trial), ..s.solver };
    match estimate(input, &actual, &target, &mut rng, &cfg) {
        Ok(est) => {
            let status = if !est.converged {
                TrialStatus::NotConverged
            } else if est.ambiguous {
                TrialStatus::Ambiguous
            } else {
                TrialStatus::Ok
            };
            TrialRecord {
                trial,
                target,
                estimate: Some(est.position),
                error: Some(position_error(&target, &est.position).with_trial(trial as usize)),
                status,
            }
        }
        Err(e) => TrialRecord { trial, target, estimate: None, error: None, status: TrialStatus::Failed(e.code()) },
    }
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::InvalidScenario("workers must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))
}

/// Runs every trial of `s` on `workers` threads. Per-trial estimator errors
/// are recorded in the trial status; only setup errors are returned.
pub fn run_monte_carlo(s: &Scenario, workers: usize) -> Result<RunReport> {
    let started = Instant::now();
    let plan = s.measurement.as_ref().ok_or_else(|| Error::MissingField("measurement".into()))?;
    let scheduled = s.anchors.iter().map(|a| a.position(plan.time_s)).collect::<Result<Vec<_>>>()?;
    let rotations: Vec<RotationMatrix> = s.anchors.iter().map(|a| rotation_from_attitude(&a.attitude())).collect();
    let input = TrialInput { scenario: s, plan, scheduled: &scheduled, rotations: &rotations };
    let pool = thread_pool(workers)?;
    let mut trials: Vec<TrialRecord> = pool.install(|| (0..s.trials).into_par_iter().map(|i| run_trial(&input, i)).collect());
    trials.sort_by_key(|t| t.trial);
    let errors: Vec<ErrorSample> = trials.iter().filter_map(|t| t.error).collect();
    let failures = trials.len() - errors.len();
    let summary = if errors.is_empty() { None } else { Some(summarize(&errors)?) };
    Ok(RunReport { seed: s.seed, config_hash: s.config_hash.clone(), trials, summary, failures, wall_time: started.elapsed() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(kind: &str, sigma_line: &str, trials: u64) -> Scenario {
        let text = format!(
            r#"
[run]
trials = {trials}
seed = 11

[measurement]
kind = "{kind}"
{sigma_line}

[[anchors]]
kind = "ground"
position_m = [0, 0, 0]
[[anchors]]
kind = "ground"
position_m = [100, 0, 5]
[[anchors]]
kind = "ground"
position_m = [0, 100, 10]
[[anchors]]
kind = "ground"
position_m = [100, 100, 60]
[[anchors]]
kind = "ground"
position_m = [50, -20, 30]

[target_region]
shape = "box"
min_m = [10, 10, 1]
max_m = [90, 90, 20]
"#
        );
        Scenario::from_toml_str(&text).unwrap()
    }

    #[test]
    fn zero_noise_recovers_every_target() {
        for (kind, line) in [
            ("range", "range_sigma_m = 0"),
            ("tdoa", "tdoa_sigma_m = 0"),
            ("aoa", "aoa_sigma_rad = 0"),
            ("range_aoa", "range_sigma_m = 0\naoa_sigma_rad = 0"),
        ] {
            let r = run_monte_carlo(&scenario(kind, line, 40), 2).unwrap();
            assert_eq!(r.failures, 0, "{kind}");
            for t in &r.trials {
                assert!(t.error.unwrap().error_3d < 1e-6, "{kind}: trial {} {:?}", t.trial, t.error);
            }
        }
    }

    #[test]
    fn summary_matches_rows_and_workers_do_not_matter() {
        let s = scenario("range", "range_sigma_m = 1.5", 64);
        let a = run_monte_carlo(&s, 1).unwrap();
        let b = run_monte_carlo(&s, 4).unwrap();
        assert_eq!(a.trials, b.trials);
        assert_eq!(a.summary, b.summary);
        assert_eq!(a.summary.unwrap(), summarize(&a.errors()).unwrap());
        assert!(a.summary.unwrap().rmse_3d > 0.0);
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let mut s = scenario("range", "range_sigma_m = 1", 5);
        s.anchors.truncate(3);
        let r = run_monte_carlo(&s, 1).unwrap();
        assert_eq!(r.failures, 5);
        assert!(r.summary.is_none());
        assert!(r.trials.iter().all(|t| t.status == TrialStatus::Failed("GEOMETRY")));
    }
}
