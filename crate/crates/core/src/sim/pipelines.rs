//! Batch pipelines behind the CLI: DOP maps, altitude sweeps, Doppler
//! profiles and trajectory optimisation.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use super::monte_carlo::thread_pool;
use super::scenario::{Scenario, UserSpec};
use crate::anchors::{
    doppler_profile, parse_tle_file, spherical_to_ecef, user_for_pass, AnchorModel, OrbitElements, PlacementError,
};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::metrics::{gdop, Dop, DopKind};
use crate::radio::{rss_to_distance, sample_rss, MeasurementKind};
use crate::rng::stream_rng;
use crate::trajopt::{
    optimize_trajectory, AnnealConfig, Constraints, EnergyModel, Objective, SearchBox, TrajOptProblem, TrajOptResult,
};

fn missing(section: &str) -> Error {
    Error::MissingField(section.to_string())
}

fn linspace(range: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range[0]];
    }
    (0..n).map(|k| range[0] + (range[1] - range[0]) * k as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdopRow {
    pub position: Vec3,
    /// `None` at rank-deficient nodes.
    pub dop: Option<Dop>,
    /// "ok" or the error code of the failed evaluation.
    pub status: &'static str,
}

/// DOP on a regular grid, x fastest.
pub fn gdop_map(s: &Scenario) -> Result<Vec<GdopRow>> {
    let g = s.gdop_map.as_ref().ok_or_else(|| missing("gdop_map"))?;
    let anchors = s.anchors.iter().map(|a| a.position(g.time_s)).collect::<Result<Vec<_>>>()?;
    if anchors.is_empty() {
        return Err(Error::InvalidScenario("gdop_map needs at least one anchor".into()));
    }
    let kind = if g.tdoa {
        if g.reference_anchor >= anchors.len() {
            return Err(Error::InvalidScenario(format!("reference anchor {} out of range", g.reference_anchor)));
        }
        DopKind::Tdoa { reference: g.reference_anchor }
    } else {
        DopKind::Range
    };
    let (xs, ys, zs) = (linspace(g.x, g.points[0]), linspace(g.y, g.points[1]), linspace(g.z, g.points[2]));
    let mut rows = Vec::with_capacity(xs.len() * ys.len() * zs.len());
    for z in &zs {
        for y in &ys {
            for x in &xs {
                let position = Vec3::new(*x, *y, *z);
                let (dop, status) = match gdop(&anchors, &position, kind) {
                    Ok(d) => (Some(d), "ok"),
                    Err(e) => (None, e.code()),
                };
                rows.push(GdopRow { position, dop, status });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub altitude_m: f64,
    pub vertical_error_m: f64,
    /// Mean horizontal-projected ranging error, m.
    pub mean_error_m: f64,
    pub samples: u64,
}

/// Horizontal-projected ranging error of one anchor-target draw: the
/// anchor's horizontal displacement, its vertical displacement scaled by
/// `h / r`, and the RSS range error scaled by `sqrt(1 + h^2 / r^2)`.
fn projected_error(scheduled: &Vec3, actual: &Vec3, target: &Vec3, d_hat: f64) -> f64 {
    let h = scheduled.z - target.z;
    let r = (scheduled - target).xy().norm().max(1e-9);
    let delta = actual - scheduled;
    let d_actual = (actual - target).norm();
    delta.xy().norm() + (h / r) * delta.z.abs() + (d_hat - d_actual).abs() * (1.0 + (h * h) / (r * r)).sqrt()
}

/// Mean projected ranging error of one hovering anchor above the centre of
/// a disc of targets, for every altitude and every vertical placement error.
/// Sample `k` uses `stream_rng(seed, k)` at every grid point (common random
/// numbers), so curves for different settings are directly comparable.
pub fn altitude_sweep(s: &Scenario, workers: usize) -> Result<Vec<SweepRow>> {
    let sw = s.altitude_sweep.as_ref().ok_or_else(|| missing("altitude_sweep"))?;
    let radio = s.radio.as_ref().ok_or_else(|| missing("radio"))?;
    let shadow = s.shadowing.as_ref().ok_or_else(|| missing("shadowing"))?;
    let settings: Vec<(f64, f64)> = sw
        .vertical_errors_m
        .iter()
        .flat_map(|eh| sw.altitudes_m.iter().map(move |h| (*eh, *h)))
        .collect();
    let errors = settings
        .iter()
        .map(|(eh, _)| PlacementError::new(sw.range_error_m, sw.horizontal_error_m, *eh))
        .collect::<Result<Vec<_>>>()?;
    let sample = |k: u64| -> Result<Vec<f64>> {
        settings
            .iter()
            .zip(&errors)
            .map(|((_, h), e)| {
                let mut rng = stream_rng(s.seed, k);
                let rho = sw.disc_radius_m * rng.random::<f64>().sqrt();
                let phi = std::f64::consts::TAU * rng.random::<f64>();
                let target = Vec3::new(
                    sw.centre_xy[0] + rho * phi.cos(),
                    sw.centre_xy[1] + rho * phi.sin(),
                    sw.target_height_m,
                );
                let scheduled = Vec3::new(sw.centre_xy[0], sw.centre_xy[1], *h);
                let actual = e.realize(&scheduled, &mut rng);
                let d = (actual - target).norm();
                let rel = actual - target;
                let elev = rel.z.atan2(rel.xy().norm()).clamp(0.0, std::f64::consts::FRAC_PI_2);
                let m = sample_rss(radio, shadow, d, elev, &mut rng)?;
                let MeasurementKind::Rss { dbm } = m.kind else { unreachable!("sample_rss returns RSS") };
                let d_hat = rss_to_distance(radio, dbm) + sw.range_error_m * (2.0 * rng.random::<f64>() - 1.0);
                Ok(projected_error(&scheduled, &actual, &target, d_hat))
            })
            .collect()
    };
    let pool = thread_pool(workers)?;
    let per_sample: Vec<Result<Vec<f64>>> = pool.install(|| (0..s.trials).into_par_iter().map(sample).collect());
    let mut sums = vec![0.0; settings.len()];
    for r in per_sample {
        for (acc, v) in sums.iter_mut().zip(r?) {
            *acc += v;
        }
    }
    Ok(settings
        .iter()
        .zip(sums)
        .map(|((eh, h), sum)| SweepRow {
            altitude_m: *h,
            vertical_error_m: *eh,
            mean_error_m: sum / s.trials as f64,
            samples: s.trials,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerRow {
    pub satellite: usize,
    pub pass: usize,
    pub time_s: f64,
    pub elevation_rad: f64,
    pub doppler_hz: f64,
    pub doppler_rate_hz_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DopplerOutput {
    pub user: Vec3,
    pub rows: Vec<DopplerRow>,
    /// Set when no satellite rises above the mask in the window.
    pub notice: Option<String>,
}

/// Satellites: the scenario's LEO anchors (including a generated
/// constellation), or the records of `doppler.tle_path`, resolved against
/// `base_dir`.
pub fn doppler_pipeline(s: &Scenario, base_dir: &Path) -> Result<DopplerOutput> {
    let d = s.doppler.as_ref().ok_or_else(|| missing("doppler"))?;
    let mut sats: Vec<OrbitElements> =
        s.anchors.iter().filter_map(|a| if let AnchorModel::Leo(o) = a { Some(*o) } else { None }).collect();
    if let Some(p) = &d.tle_path {
        let path = base_dir.join(p);
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io { path, source })?;
        for (_, rec) in parse_tle_file(&text)? {
            sats.push(rec.orbit_elements()?);
        }
    }
    if sats.is_empty() {
        return Err(Error::InvalidScenario("doppler needs LEO anchors, a constellation or a TLE file".into()));
    }
    let user = match d.user {
        UserSpec::Ecef(p) => p,
        UserSpec::Spherical { lat, lon, height } => spherical_to_ecef(lat, lon, height),
        UserSpec::ForPass { max_elevation, peak_time } => user_for_pass(&sats[0], max_elevation, peak_time)?,
    };
    let mut rows = Vec::new();
    for (i, o) in sats.iter().enumerate() {
        for (p, (_, samples)) in doppler_profile(o, &user, d.carrier_hz, d.start_s, d.end_s, d.step_s, d.mask_rad)?
            .into_iter()
            .enumerate()
        {
            rows.extend(samples.iter().map(|x| DopplerRow {
                satellite: i,
                pass: p,
                time_s: x.time,
                elevation_rad: x.elevation,
                doppler_hz: x.doppler_hz,
                doppler_rate_hz_s: x.doppler_rate_hz_s,
            }));
        }
    }
    let notice = rows.is_empty().then(|| {
        format!(
            "no satellite rises above the {:.1} deg mask between {} s and {} s",
            d.mask_rad.to_degrees(),
            d.start_s,
            d.end_s
        )
    });
    Ok(DopplerOutput { user, rows, notice })
}

/// Builds the optimisation problem declared in `[trajopt]`.
pub fn trajopt_problem(s: &Scenario) -> Result<TrajOptProblem> {
    let t = s.trajopt.as_ref().ok_or_else(|| missing("trajopt"))?;
    let objective = match t.objective.as_str() {
        "range_crlb" => Objective::RangeCrlb { sigma_m: t.sigma_m.ok_or_else(|| missing("trajopt.sigma_m"))? },
        "monte_carlo_rmse" => Objective::MonteCarloRmse {
            sigma_m: t.sigma_m.ok_or_else(|| missing("trajopt.sigma_m"))?,
            trials: t.mc_trials,
            seed: s.seed,
        },
        _ => Objective::RssRanging {
            radio: s.radio.ok_or_else(|| missing("radio"))?,
            shadowing: s.shadowing.ok_or_else(|| missing("shadowing"))?,
        },
    };
    let targets = match &s.targets {
        Some(super::scenario::TargetSource::Fixed(ts)) => ts.clone(),
        _ => return Err(Error::InvalidScenario("trajopt needs explicit [[targets]]".into())),
    };
    let problem = TrajOptProblem {
        objective,
        targets,
        constraints: Constraints {
            max_speed_mps: t.max_speed_mps,
            max_turn_rate_rad_s: t.max_turn_rate_rad_s,
            energy: EnergyModel { hover_power_w: t.hover_power_w, move_cost_j_per_m: t.move_cost_j_per_m },
            energy_budget_j: t.energy_budget_j,
            min_waypoints: t.min_waypoints,
            max_waypoints: t.max_waypoints,
            min_dwell_s: t.min_dwell_s,
            coverage_radius_m: t.coverage_radius_m,
        },
        bounds: SearchBox { min: t.box_min, max: t.box_max },
        total_dwell_s: t.total_dwell_s,
        reference_dwell_s: t.reference_dwell_s,
    };
    problem.validate().map_err(|e| Error::InvalidScenario(e.to_string()))?;
    Ok(problem)
}

pub fn trajopt_pipeline(s: &Scenario, workers: usize) -> Result<TrajOptResult> {
    let t = s.trajopt.as_ref().ok_or_else(|| missing("trajopt"))?;
    let problem = trajopt_problem(s)?;
    let cfg = AnnealConfig { iterations: t.iterations, chains: t.chains, seed: s.seed, stops: t.stops, ..Default::default() };
    thread_pool(workers)?.install(|| optimize_trajectory(&problem, &cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = r#"
[run]
trials = 1
seed = 3

[[anchors]]
kind = "ground"
position_m = [-100, -100, 0]
[[anchors]]
kind = "ground"
position_m = [100, -100, 0]
[[anchors]]
kind = "ground"
position_m = [100, 100, 0]
[[anchors]]
kind = "ground"
position_m = [-100, 100, 0]

[gdop_map]
kind = "range"
x_m = [-150, 150]
y_m = [-150, 150]
z_m = [20, 20]
points = [7, 7, 1]
"#;

    #[test]
    fn gdop_map_is_symmetric_and_flags_degenerate_nodes() {
        let s = Scenario::from_toml_str(SQUARE).unwrap();
        let rows = gdop_map(&s).unwrap();
        assert_eq!(rows.len(), 49);
        let at = |x: f64, y: f64| {
            rows.iter().find(|r| (r.position.x - x).abs() < 1e-9 && (r.position.y - y).abs() < 1e-9).unwrap().dop.unwrap()
        };
        for (x, y) in [(50.0, 100.0), (-100.0, 0.0), (150.0, -50.0)] {
            let d = at(x, y).gdop;
            for (u, v) in [(-x, y), (x, -y), (y, x), (-y, -x)] {
                assert!((at(u, v).gdop - d).abs() < 1e-9 * d);
            }
        }
        let on_anchor = SQUARE.replace("z_m = [20, 20]", "z_m = [0, 0]").replace("points = [7, 7, 1]", "points = [3, 3, 1]")
            .replace("x_m = [-150, 150]", "x_m = [-100, 100]").replace("y_m = [-150, 150]", "y_m = [-100, 100]");
        let rows = gdop_map(&Scenario::from_toml_str(&on_anchor).unwrap()).unwrap();
        assert_eq!(rows[0].status, "GEOMETRY");
        assert!(rows[0].dop.is_none());
    }

    const SWEEP: &str = r#"
[run]
trials = 300
seed = 5

[radio]
carrier_ghz = 2
bandwidth_mhz = 20
tx_power_dbm = 20
constant_db = -40
pathloss_exponent = 2
reference_distance_m = 1

[shadowing]
a_los_db = 0
b_los_per_rad = 0
a_nlos_db = 0
b_nlos_per_rad = 0
los_model = "constant"
los_probability = 1

[altitude_sweep]
altitudes_m = [50, 200, 800]
disc_radius_m = 1000
placement_vertical_errors_m = [0, 5]
"#;

    #[test]
    fn sweep_without_noise_is_zero() {
        let s = Scenario::from_toml_str(SWEEP).unwrap();
        let rows = altitude_sweep(&s, 2).unwrap();
        assert_eq!(rows.len(), 6);
        for r in rows.iter().filter(|r| r.vertical_error_m == 0.0) {
            assert!(r.mean_error_m < 1e-6, "{r:?}");
        }
        for r in rows.iter().filter(|r| r.vertical_error_m > 0.0) {
            assert!(r.mean_error_m > 0.0);
        }
        assert_eq!(rows, altitude_sweep(&s, 1).unwrap());
    }
}
