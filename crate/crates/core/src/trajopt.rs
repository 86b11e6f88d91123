//! Aerial-anchor trajectory design: a trajectory is a sequence of stops
//! (hover point + dwell time) joined by straight moves flown at the maximum
//! speed. Every stop acts as a virtual anchor whose measurement variance
//! scales as `reference_dwell / dwell`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::anchors::Trajectory;
use crate::error::{Error, Result};
use crate::estimators::{mlat_range, SolverConfig};
use crate::geometry::Vec3;
use crate::metrics::crlb_range;
use crate::radio::{rss_range_sigma, RadioConfig, ShadowingParams};
use crate::rng::stream_rng;

/// Linear energy surrogate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    pub hover_power_w: f64,
    pub move_cost_j_per_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub min: Vec3,
    pub max: Vec3,
}

impl SearchBox {
    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn centre(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    /// Signed distance to the nearest face; negative outside.
    fn margin(&self, p: &Vec3) -> f64 {
        (0..3).map(|k| (p[k] - self.min[k]).min(self.max[k] - p[k])).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// Mean trace of the range CRLB (m^2); `sigma_m` applies at the
    /// reference dwell.
    RangeCrlb { sigma_m: f64 },
    /// Mean first-order standard deviation (m) of the RSS range projected on
    /// the horizontal plane, fused over stops.
    RssRanging { radio: RadioConfig, shadowing: ShadowingParams },
    /// Monte Carlo RMSE (m) of range multilateration from the stops, with
    /// common random numbers across evaluations.
    MonteCarloRmse { sigma_m: f64, trials: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraints {
    pub max_speed_mps: f64,
    /// Heading change allowed per second of the following move.
    pub max_turn_rate_rad_s: Option<f64>,
    pub energy: EnergyModel,
    pub energy_budget_j: Option<f64>,
    pub min_waypoints: usize,
    pub max_waypoints: usize,
    pub min_dwell_s: f64,
    /// Every target must lie within this distance of some stop.
    pub coverage_radius_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajOptProblem {
    pub objective: Objective,
    /// Targets with prior weights.
    pub targets: Vec<(Vec3, f64)>,
    pub constraints: Constraints,
    pub bounds: SearchBox,
    /// Dwell time shared among the stops, s.
    pub total_dwell_s: f64,
    /// Dwell at which a stop measures with the nominal noise, s.
    pub reference_dwell_s: f64,
}

impl TrajOptProblem {
    pub fn validate(&self) -> Result<()> {
        let c = &self.constraints;
        if self.targets.is_empty() || self.targets.iter().any(|(_, w)| !(*w > 0.0)) {
            return Err(Error::config("need at least one target with positive weight"));
        }
        if (0..3).any(|k| !(self.bounds.min[k] <= self.bounds.max[k])) {
            return Err(Error::config("search box is empty"));
        }
        let thresholds = [
            c.max_speed_mps,
            c.energy.hover_power_w,
            c.energy.move_cost_j_per_m,
            c.min_dwell_s,
            c.energy_budget_j.unwrap_or(0.0),
            c.max_turn_rate_rad_s.unwrap_or(0.0),
            c.coverage_radius_m.unwrap_or(0.0),
        ];
        if thresholds.iter().any(|v| !(*v >= 0.0)) || !(c.max_speed_mps > 0.0) {
            return Err(Error::config("constraint thresholds must be >= 0 and max speed > 0"));
        }
        if c.min_waypoints == 0 || c.max_waypoints < c.min_waypoints {
            return Err(Error::config("waypoint bounds need 1 <= min <= max"));
        }
        if !(self.total_dwell_s > 0.0) || !(self.reference_dwell_s > 0.0) {
            return Err(Error::config("dwell times must be positive"));
        }
        match &self.objective {
            Objective::RangeCrlb { sigma_m } if *sigma_m > 0.0 => Ok(()),
            Objective::MonteCarloRmse { sigma_m, trials, .. } if *sigma_m > 0.0 && *trials > 0 => Ok(()),
            Objective::RssRanging { radio, shadowing } => {
                radio.validate()?;
                shadowing.validate()
            }
            other => Err(Error::config(format!("invalid objective {other:?}"))),
        }
    }
}

/// `value >= 0` means satisfied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slack {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub energy_j: f64,
    pub slacks: Vec<Slack>,
}

impl Evaluation {
    pub fn first_violation(&self) -> Option<&Slack> {
        self.slacks.iter().find(|s| !(s.value >= 0.0))
    }

    pub fn feasible(&self) -> bool {
        self.first_violation().is_none()
    }
}

/// Speed of every segment, m/s.
pub fn segment_speeds(t: &Trajectory) -> Result<Vec<f64>> {
    t.segments()
        .map(|(a, b, dur)| {
            let len = (b - a).norm();
            if len > 0.0 && dur == 0.0 {
                return Err(Error::Kinematics(format!("segment of {len} m has zero duration")));
            }
            Ok(if len == 0.0 { 0.0 } else { len / dur })
        })
        .collect()
}

/// Linear energy surrogate over the whole trajectory, J.
pub fn trajectory_energy(t: &Trajectory, e: &EnergyModel) -> f64 {
    t.segments()
        .map(|(a, b, dur)| {
            if a == b {
                e.hover_power_w * dur
            } else {
                e.move_cost_j_per_m * (b - a).norm()
            }
        })
        .sum()
}

fn stop_variance_scale(problem: &TrajOptProblem, dwell: f64) -> f64 {
    problem.reference_dwell_s / dwell
}

fn rss_projected_variance(radio: &RadioConfig, shadowing: &ShadowingParams, anchor: &Vec3, target: &Vec3) -> f64 {
    let d = (anchor - target).norm();
    let r = (anchor.x - target.x).hypot(anchor.y - target.y);
    if !(r > 0.0) || !(d >= radio.reference_distance_m) {
        return f64::INFINITY;
    }
    let elevation = ((anchor.z - target.z) / d).clamp(-1.0, 1.0).asin();
    match shadowing.sigma_db(elevation) {
        Ok(s) => (rss_range_sigma(radio, d, s) * d / r).powi(2),
        Err(_) => f64::INFINITY,
    }
}

fn objective_value(problem: &TrajOptProblem, stops: &[(Vec3, f64)]) -> f64 {
    let per_target = |target: &Vec3| -> f64 {
        match &problem.objective {
            Objective::RangeCrlb { sigma_m } => {
                let anchors: Vec<Vec3> = stops.iter().map(|s| s.0).collect();
                let sigmas: Vec<f64> = stops
                    .iter()
                    .map(|s| sigma_m * stop_variance_scale(problem, s.1).sqrt())
                    .collect();
                crlb_range(&anchors, target, &sigmas).map(|c| c.trace()).unwrap_or(f64::INFINITY)
            }
            Objective::RssRanging { radio, shadowing } => {
                let info: f64 = stops
                    .iter()
                    .map(|(p, dwell)| {
                        1.0 / (rss_projected_variance(radio, shadowing, p, target) * stop_variance_scale(problem, *dwell))
                    })
                    .sum();
                (1.0 / info).sqrt()
            }
            Objective::MonteCarloRmse { .. } => unreachable!("handled below"),
        }
    };
    let total_w: f64 = problem.targets.iter().map(|t| t.1).sum();
    match &problem.objective {
        Objective::MonteCarloRmse { sigma_m, trials, seed } => {
            monte_carlo_rmse(problem, stops, *sigma_m, *trials, *seed).unwrap_or(f64::INFINITY)
        }
        _ => problem.targets.iter().map(|(t, w)| w * per_target(t)).sum::<f64>() / total_w,
    }
}

fn monte_carlo_rmse(problem: &TrajOptProblem, stops: &[(Vec3, f64)], sigma: f64, trials: usize, seed: u64) -> Option<f64> {
    if stops.len() < 4 {
        return None;
    }
    let anchors: Vec<Vec3> = stops.iter().map(|s| s.0).collect();
    let sigmas: Vec<f64> = stops.iter().map(|s| sigma * stop_variance_scale(problem, s.1).sqrt()).collect();
    let total_w: f64 = problem.targets.iter().map(|t| t.1).sum();
    let mut acc = 0.0;
    for (ti, (target, w)) in problem.targets.iter().enumerate() {
        let mut rng = stream_rng(seed, ti as u64);
        let cfg = SolverConfig { initial_guess: Some(*target), multistart: 1, ..Default::default() };
        let mut sq = 0.0;
        for _ in 0..trials {
            let ranges: Vec<f64> = anchors
                .iter()
                .zip(&sigmas)
                .map(|(a, s)| (a - target).norm() + s * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let est = mlat_range(&anchors, &ranges, &sigmas, &cfg).ok()?;
            sq += (est.position - target).norm_squared();
        }
        acc += w * sq / trials as f64;
    }
    Some((acc / total_w).sqrt())
}

/// Objective and constraint slacks of an arbitrary trajectory.
pub fn evaluate_trajectory(problem: &TrajOptProblem, t: &Trajectory) -> Result<Evaluation> {
    let c = &problem.constraints;
    let speeds = segment_speeds(t)?;
    let stops = t.dwell_points();
    let mut slacks = Vec::new();

    let fastest = speeds.iter().copied().fold(0.0, f64::max);
    slacks.push(Slack { name: "max_speed", value: c.max_speed_mps * (1.0 + 1e-9) - fastest });

    if let Some(rate) = c.max_turn_rate_rad_s {
        let moves: Vec<(Vec3, f64)> = t
            .segments()
            .filter(|(a, b, _)| a != b)
            .map(|(a, b, dur)| ((b - a).normalize(), dur))
            .collect();
        let worst = moves
            .windows(2)
            .map(|w| rate * w[1].1 - w[0].0.dot(&w[1].0).clamp(-1.0, 1.0).acos())
            .fold(f64::INFINITY, f64::min);
        slacks.push(Slack { name: "max_turn_rate", value: worst });
    }

    let energy_j = trajectory_energy(t, &c.energy);
    if let Some(budget) = c.energy_budget_j {
        slacks.push(Slack { name: "energy_budget", value: budget * (1.0 + 1e-12) - energy_j });
    }
    slacks.push(Slack { name: "min_waypoints", value: stops.len() as f64 - c.min_waypoints as f64 });
    slacks.push(Slack { name: "max_waypoints", value: c.max_waypoints as f64 - stops.len() as f64 });
    let shortest = stops.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    slacks.push(Slack { name: "min_dwell", value: shortest - c.min_dwell_s });
    if let Some(radius) = c.coverage_radius_m {
        let worst = problem
            .targets
            .iter()
            .map(|(target, _)| stops.iter().map(|(p, _)| (p - target).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        slacks.push(Slack { name: "coverage_radius", value: radius - worst });
    }
    let margin = t.waypoints().iter().map(|w| problem.bounds.margin(w)).fold(f64::INFINITY, f64::min);
    slacks.push(Slack { name: "search_bounds", value: margin });

    Ok(Evaluation { objective: objective_value(problem, &stops), energy_j, slacks })
}

/// Hover at each stop in turn, moving between stops at the maximum speed.
pub fn trajectory_from_stops(stops: &[(Vec3, f64)], speed: f64) -> Result<Trajectory> {
    if stops.is_empty() {
        return Err(Error::config("trajectory needs at least one stop"));
    }
    let mut waypoints = vec![stops[0].0];
    let mut durations = Vec::new();
    for (k, (p, dwell)) in stops.iter().enumerate() {
        waypoints.push(*p);
        durations.push(*dwell);
        if let Some((next, _)) = stops.get(k + 1) {
            waypoints.push(*next);
            durations.push((next - p).norm() / speed);
        }
    }
    Trajectory::new(waypoints, durations)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealConfig {
    pub iterations: usize,
    pub chains: usize,
    pub seed: u64,
    /// Temperature on the log-objective scale.
    pub initial_temperature: f64,
    /// Geometric cooling ratio applied once per sweep.
    pub cooling: f64,
    /// Number of stops to optimise; defaults to the minimum waypoint count.
    pub stops: Option<usize>,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self { iterations: 3000, chains: 4, seed: 0, initial_temperature: 0.5, cooling: 0.97, stops: None }
    }
}

const SWEEPS: usize = 150;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajOptResult {
    pub trajectory: Trajectory,
    pub stops: Vec<(Vec3, f64)>,
    pub evaluation: Evaluation,
    pub evaluations: usize,
    /// Best-so-far objective at the end of every sweep.
    pub trace: Vec<f64>,
    pub chain: usize,
}

/// Stops evenly spaced on a small horizontal circle at the centre of the
/// search box, sharing the dwell equally.
pub fn default_stops(problem: &TrajOptProblem, count: usize) -> Vec<(Vec3, f64)> {
    let c = problem.bounds.centre();
    let e = problem.bounds.extent();
    let radius = 0.1 * e.x.min(e.y) / 2.0;
    let dwell = problem.total_dwell_s / count as f64;
    (0..count)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / count as f64;
            let offset = if count == 1 { Vec3::zeros() } else { Vec3::new(a.cos(), a.sin(), 0.0) * radius };
            (c + offset, dwell)
        })
        .collect()
}

fn evaluate_stops(problem: &TrajOptProblem, stops: &[(Vec3, f64)]) -> Result<(Trajectory, Evaluation)> {
    let t = trajectory_from_stops(stops, problem.constraints.max_speed_mps)?;
    let e = evaluate_trajectory(problem, &t)?;
    Ok((t, e))
}

fn propose<R: Rng>(
    problem: &TrajOptProblem,
    stops: &[(Vec3, f64)],
    heat: f64,
    rng: &mut R,
) -> Vec<(Vec3, f64)> {
    let mut next = stops.to_vec();
    let n = next.len();
    if n >= 2 && rng.random_bool(0.3) {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let spare = (next[i].1 - problem.constraints.min_dwell_s).max(0.0);
        let amount = spare * rng.random::<f64>() * 0.5;
        next[i].1 -= amount;
        next[j].1 += amount;
    } else {
        let k = rng.random_range(0..n);
        let scale = problem.bounds.extent() * (0.15 * heat.sqrt()).max(0.01);
        for axis in 0..3 {
            let z: f64 = StandardNormal.sample(rng);
            next[k].0[axis] += scale[axis] * z;
        }
    }
    next
}

fn log_objective(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else if v == 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    }
}

fn anneal_chain(problem: &TrajOptProblem, cfg: &AnnealConfig, start: &[(Vec3, f64)], chain: usize) -> Result<TrajOptResult> {
    let mut rng = stream_rng(cfg.seed, chain as u64);
    let mut current = start.to_vec();
    let (_, cur_eval) = evaluate_stops(problem, &current)?;
    let mut cur_log = log_objective(cur_eval.objective);
    let mut best = (current.clone(), cur_eval);
    let mut evaluations = 1;
    let mut trace = Vec::with_capacity(SWEEPS);
    let per_sweep = cfg.iterations.div_ceil(SWEEPS).max(1);
    let mut temperature = cfg.initial_temperature;
    for it in 0..cfg.iterations {
        let cand = propose(problem, &current, temperature / cfg.initial_temperature.max(f64::MIN_POSITIVE), &mut rng);
        if cand.iter().all(|(p, _)| problem.bounds.contains(p)) {
            if let Ok((_, e)) = evaluate_stops(problem, &cand) {
                evaluations += 1;
                if e.feasible() {
                    let l = log_objective(e.objective);
                    let delta = if l == cur_log { 0.0 } else { l - cur_log };
                    let u: f64 = rng.random();
                    if delta <= 0.0 || (temperature > 0.0 && u < (-delta / temperature).exp()) {
                        if e.objective < best.1.objective {
                            best = (cand.clone(), e.clone());
                        }
                        current = cand;
                        cur_log = l;
                    }
                }
            }
        }
        if (it + 1) % per_sweep == 0 || it + 1 == cfg.iterations {
            trace.push(best.1.objective);
            temperature *= cfg.cooling;
        }
    }
    let (trajectory, evaluation) = evaluate_stops(problem, &best.0)?;
    Ok(TrajOptResult { trajectory, stops: best.0, evaluation, evaluations, trace, chain })
}

/// Simulated annealing over stop positions and dwell splits. Chains run in
/// parallel; the best objective wins, ties going to the lowest chain index.
pub fn optimize_trajectory(problem: &TrajOptProblem, cfg: &AnnealConfig) -> Result<TrajOptResult> {
    problem.validate()?;
    if cfg.chains == 0 || !(cfg.cooling > 0.0 && cfg.cooling < 1.0) || !(cfg.initial_temperature >= 0.0) {
        return Err(Error::config(format!("invalid annealing settings {cfg:?}")));
    }
    let count = cfg.stops.unwrap_or(problem.constraints.min_waypoints);
    let start = default_stops(problem, count);
    let (_, eval) = evaluate_stops(problem, &start)?;
    if let Some(v) = eval.first_violation() {
        return Err(Error::Infeasible {
            constraint: v.name.to_string(),
            detail: format!("default trajectory misses it by {:.6}", -v.value),
        });
    }
    let results: Vec<Result<TrajOptResult>> =
        (0..cfg.chains).into_par_iter().map(|c| anneal_chain(problem, cfg, &start, c)).collect();
    let mut best: Option<TrajOptResult> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.evaluation.objective < b.evaluation.objective) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one chain"))
}
