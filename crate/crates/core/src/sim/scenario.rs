//! Scenario files: TOML, unit-suffixed keys, strict schema.
//!
//! ```toml
//! [run]
//! trials = 200
//! seed = 7
//!
//! [measurement]
//! kind = "range"          # range | tdoa | aoa | range_aoa | rss
//! range_sigma_m = 1.0
//!
//! [[anchors]]
//! kind = "ground"
//! position_m = [0.0, 0.0, 10.0]
//!
//! [[targets]]
//! position_m = [40.0, 30.0, 1.5]
//! ```
//!
//! The full key list lives in the `Raw*` structs below; every physical
//! quantity must carry a unit suffix (see `units`).

use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use toml::Table;

use super::units::normalize_units;
use crate::anchors::{
    generate_constellation, AnchorModel, Constellation, ConstellationKind, OrbitElements, PlacementError, Trajectory,
    DEFAULT_ELEVATION_MASK,
};
use crate::error::{Error, Result};
use crate::estimators::SolverConfig;
use crate::geometry::{Attitude, Pose, Vec3};
use crate::radio::{LosProbability, RadioConfig, ShadowingParams};

type V3 = [f64; 3];

fn v3(a: V3) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    run: RawRun,
    radio: Option<RawRadio>,
    shadowing: Option<RawShadowing>,
    #[serde(default)]
    anchors: Vec<RawAnchor>,
    #[serde(default)]
    targets: Vec<RawTarget>,
    target_region: Option<RawRegion>,
    measurement: Option<RawMeasurement>,
    solver: Option<RawSolver>,
    constellation: Option<RawConstellation>,
    altitude_sweep: Option<RawSweep>,
    gdop_map: Option<RawGdopMap>,
    doppler: Option<RawDoppler>,
    trajopt: Option<RawTrajOpt>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(default)]
    name: Option<String>,
    trials: u64,
    seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRadio {
    carrier_hz: f64,
    bandwidth_hz: f64,
    tx_power_dbm: f64,
    constant_db: f64,
    pathloss_exponent: f64,
    reference_distance_m: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShadowing {
    a_los_db: f64,
    b_los_per_rad: f64,
    a_nlos_db: f64,
    b_nlos_per_rad: f64,
    /// "logistic" (needs los_alpha, los_beta) or "constant" (needs los_probability).
    los_model: String,
    los_alpha: Option<f64>,
    los_beta: Option<f64>,
    los_probability: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnchor {
    kind: String,
    position_m: Option<V3>,
    #[serde(default)]
    pitch_rad: f64,
    #[serde(default)]
    roll_rad: f64,
    #[serde(default)]
    yaw_rad: f64,
    waypoints_m: Option<Vec<V3>>,
    durations_s: Option<Vec<f64>>,
    #[serde(default)]
    placement_range_error_m: f64,
    #[serde(default)]
    placement_horizontal_error_m: f64,
    #[serde(default)]
    placement_vertical_error_m: f64,
    altitude_m: Option<f64>,
    inclination_rad: Option<f64>,
    raan_rad: Option<f64>,
    phase_rad: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    position_m: V3,
    #[serde(default = "one")]
    weight: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    shape: String,
    min_m: Option<V3>,
    max_m: Option<V3>,
    centre_m: Option<V3>,
    radius_m: Option<f64>,
    height_min_m: Option<f64>,
    height_max_m: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasurement {
    kind: String,
    range_sigma_m: Option<f64>,
    tdoa_sigma_m: Option<f64>,
    aoa_sigma_rad: Option<f64>,
    #[serde(default)]
    nlos_bias_m: f64,
    #[serde(default)]
    reference_anchor: usize,
    #[serde(default)]
    time_s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    max_iterations: Option<usize>,
    tolerance_m: Option<f64>,
    max_halvings: Option<u32>,
    multistart: Option<usize>,
    seed: Option<u64>,
    initial_guess_m: Option<V3>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstellation {
    kind: String,
    planes: usize,
    sats_per_plane: usize,
    altitude_m: f64,
    inclination_rad: f64,
    #[serde(default)]
    raan_rad: f64,
    #[serde(default)]
    phase_rad: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    altitudes_m: Option<Vec<f64>>,
    altitude_min_m: Option<f64>,
    altitude_max_m: Option<f64>,
    altitude_points: Option<usize>,
    #[serde(default = "default_disc")]
    disc_radius_m: f64,
    #[serde(default)]
    centre_m: Option<[f64; 2]>,
    #[serde(default)]
    target_height_m: f64,
    #[serde(default)]
    placement_range_error_m: f64,
    #[serde(default)]
    placement_horizontal_error_m: f64,
    #[serde(default)]
    placement_vertical_errors_m: Option<Vec<f64>>,
}

fn default_disc() -> f64 {
    1000.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGdopMap {
    kind: String,
    #[serde(default)]
    reference_anchor: usize,
    x_m: [f64; 2],
    y_m: [f64; 2],
    z_m: [f64; 2],
    points: [usize; 3],
    #[serde(default)]
    time_s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoppler {
    carrier_hz: f64,
    start_s: f64,
    end_s: f64,
    step_s: f64,
    mask_rad: Option<f64>,
    user_position_m: Option<V3>,
    user_lat_rad: Option<f64>,
    user_lon_rad: Option<f64>,
    #[serde(default)]
    user_height_m: f64,
    pass_max_elevation_rad: Option<f64>,
    pass_peak_s: Option<f64>,
    tle_path: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrajOpt {
    objective: String,
    sigma_m: Option<f64>,
    mc_trials: Option<usize>,
    max_speed_mps: f64,
    max_turn_rate_rad_per_s: Option<f64>,
    hover_power_w: f64,
    move_cost_j_per_m: f64,
    energy_budget_j: Option<f64>,
    min_waypoints: usize,
    max_waypoints: usize,
    min_dwell_s: f64,
    coverage_radius_m: Option<f64>,
    total_dwell_s: f64,
    reference_dwell_s: f64,
    box_min_m: V3,
    box_max_m: V3,
    #[serde(default = "default_iterations")]
    iterations: usize,
    #[serde(default = "default_chains")]
    chains: usize,
    stops: Option<usize>,
}

fn default_iterations() -> usize {
    3000
}

fn default_chains() -> usize {
    4
}

/// Where trial targets come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSource {
    /// Trial `i` uses target `i mod n`.
    Fixed(Vec<(Vec3, f64)>),
    Box { min: Vec3, max: Vec3 },
    /// Uniform over a horizontal disc, height uniform in `[height_min, height_max]`.
    Disc { centre: Vec3, radius: f64, height_min: f64, height_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementPlanKind {
    Range,
    Tdoa,
    Aoa,
    RangeAoa,
    Rss,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementPlan {
    pub kind: MeasurementPlanKind,
    pub range_sigma_m: f64,
    /// Per-anchor arrival-time noise in metres; pair differences carry
    /// `sqrt(2)` times this.
    pub tdoa_sigma_m: f64,
    pub aoa_sigma_rad: f64,
    pub nlos_bias_m: f64,
    pub reference_anchor: usize,
    /// Epoch at which anchor positions are taken, s.
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AltitudeSweep {
    pub altitudes_m: Vec<f64>,
    pub disc_radius_m: f64,
    pub centre_xy: [f64; 2],
    pub target_height_m: f64,
    pub range_error_m: f64,
    pub horizontal_error_m: f64,
    pub vertical_errors_m: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdopMapSpec {
    pub tdoa: bool,
    pub reference_anchor: usize,
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
    pub points: [usize; 3],
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UserSpec {
    Ecef(Vec3),
    Spherical { lat: f64, lon: f64, height: f64 },
    /// Placed under the first satellite so that its pass peaks at
    /// `peak_time` with `max_elevation`.
    ForPass { max_elevation: f64, peak_time: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DopplerSpec {
    pub carrier_hz: f64,
    pub start_s: f64,
    pub end_s: f64,
    pub step_s: f64,
    pub mask_rad: f64,
    pub user: UserSpec,
    pub tle_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajOptSpec {
    pub objective: String,
    pub sigma_m: Option<f64>,
    pub mc_trials: usize,
    pub max_speed_mps: f64,
    pub max_turn_rate_rad_s: Option<f64>,
    pub hover_power_w: f64,
    pub move_cost_j_per_m: f64,
    pub energy_budget_j: Option<f64>,
    pub min_waypoints: usize,
    pub max_waypoints: usize,
    pub min_dwell_s: f64,
    pub coverage_radius_m: Option<f64>,
    pub total_dwell_s: f64,
    pub reference_dwell_s: f64,
    pub box_min: Vec3,
    pub box_max: Vec3,
    pub iterations: usize,
    pub chains: usize,
    pub stops: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub trials: u64,
    pub seed: u64,
    pub anchors: Vec<AnchorModel>,
    pub targets: Option<TargetSource>,
    pub radio: Option<RadioConfig>,
    pub shadowing: Option<ShadowingParams>,
    pub measurement: Option<MeasurementPlan>,
    pub solver: SolverConfig,
    pub altitude_sweep: Option<AltitudeSweep>,
    pub gdop_map: Option<GdopMapSpec>,
    pub doppler: Option<DopplerSpec>,
    pub trajopt: Option<TrajOptSpec>,
    /// SHA-256 of the unit-normalised scenario, hex.
    pub config_hash: String,
}

fn map_toml_error(e: toml::de::Error) -> Error {
    let msg = e.message().to_string();
    let between_ticks = |s: &str| s.split('`').nth(1).map(str::to_string);
    if msg.starts_with("unknown field") {
        Error::UnknownKey(between_ticks(&msg).unwrap_or(msg))
    } else if msg.starts_with("missing field") {
        Error::MissingField(between_ticks(&msg).unwrap_or(msg))
    } else {
        Error::InvalidScenario(msg)
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidScenario(msg.into())
}

fn require<T: Copy>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::MissingField(field.to_string()))
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| invalid(e.message().to_string()))?;
        let normalized = normalize_units(&table)?;
        let canonical = toml::to_string(&normalized).map_err(|e| invalid(e.to_string()))?;
        let config_hash = hex::encode(Sha256::digest(canonical.as_bytes()));
        let raw: RawScenario = normalized.try_into().map_err(map_toml_error)?;
        Self::from_raw(raw, config_hash)
    }

    fn from_raw(raw: RawScenario, config_hash: String) -> Result<Self> {
        if raw.run.trials == 0 {
            return Err(invalid("run.trials must be >= 1"));
        }
        let anchors = raw.anchors.iter().map(anchor_from_raw).collect::<Result<Vec<_>>>()?;
        let targets = match (&raw.target_region, raw.targets.is_empty()) {
            (Some(_), false) => return Err(invalid("give either [[targets]] or [target_region], not both")),
            (Some(r), true) => Some(region_from_raw(r)?),
            (None, false) => Some(TargetSource::Fixed(
                raw.targets.iter().map(|t| (v3(t.position_m), t.weight)).collect(),
            )),
            (None, true) => None,
        };
        if let Some(TargetSource::Fixed(ts)) = &targets {
            if ts.iter().any(|(_, w)| !(*w > 0.0)) {
                return Err(invalid("target weights must be > 0"));
            }
        }
        let radio = raw.radio.as_ref().map(radio_from_raw).transpose()?;
        let shadowing = raw.shadowing.as_ref().map(shadowing_from_raw).transpose()?;
        let measurement = raw.measurement.as_ref().map(measurement_from_raw).transpose()?;
        let solver = solver_from_raw(raw.solver.as_ref())?;
        let mut anchors = anchors;
        if let Some(c) = &raw.constellation {
            for o in generate_constellation(&constellation_from_raw(c)?)? {
                anchors.push(AnchorModel::Leo(o));
            }
        }
        let s = Scenario {
            name: raw.run.name.clone(),
            trials: raw.run.trials,
            seed: raw.run.seed,
            anchors,
            targets,
            radio,
            shadowing,
            measurement,
            solver,
            altitude_sweep: raw.altitude_sweep.as_ref().map(sweep_from_raw).transpose()?,
            gdop_map: raw.gdop_map.as_ref().map(gdop_from_raw).transpose()?,
            doppler: raw.doppler.as_ref().map(doppler_from_raw).transpose()?,
            trajopt: raw.trajopt.as_ref().map(trajopt_from_raw).transpose()?,
            config_hash,
        };
        s.check_requirements()?;
        Ok(s)
    }

    fn check_requirements(&self) -> Result<()> {
        if let Some(m) = &self.measurement {
            if self.anchors.is_empty() || self.targets.is_none() {
                return Err(invalid("a measurement plan needs at least one anchor and one target"));
            }
            if m.kind == MeasurementPlanKind::Rss && (self.radio.is_none() || self.shadowing.is_none()) {
                return Err(Error::MissingField("radio/shadowing (required by rss measurements)".into()));
            }
            if m.kind == MeasurementPlanKind::Tdoa && m.reference_anchor >= self.anchors.len() {
                return Err(invalid(format!("reference anchor {} out of range", m.reference_anchor)));
            }
        }
        if self.altitude_sweep.is_some() && (self.radio.is_none() || self.shadowing.is_none()) {
            return Err(Error::MissingField("radio/shadowing (required by altitude_sweep)".into()));
        }
        if let Some(t) = &self.trajopt {
            if t.objective == "rss_ranging" && (self.radio.is_none() || self.shadowing.is_none()) {
                return Err(Error::MissingField("radio/shadowing (required by the rss_ranging objective)".into()));
            }
            if !matches!(self.targets, Some(TargetSource::Fixed(_))) {
                return Err(invalid("trajopt needs explicit [[targets]]"));
            }
        }
        Ok(())
    }

    /// Scenario with the trial count replaced (the hash records the override).
    pub fn with_trials(mut self, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        if trials != self.trials {
            self.trials = trials;
            self.config_hash = hex::encode(Sha256::digest(format!("{}+trials={trials}", self.config_hash)));
        }
        Ok(self)
    }
}

fn anchor_from_raw(a: &RawAnchor) -> Result<AnchorModel> {
    let attitude = Attitude::new(a.pitch_rad, a.roll_rad, a.yaw_rad);
    match a.kind.as_str() {
        "ground" => {
            let mut pose = Pose::at(v3(require(a.position_m, "anchors.position_m")?));
            pose.attitude = attitude;
            Ok(AnchorModel::Ground(pose))
        }
        "uav" => {
            let waypoints: Vec<Vec3> = a
                .waypoints_m
                .clone()
                .ok_or_else(|| Error::MissingField("anchors.waypoints_m".into()))?
                .into_iter()
                .map(v3)
                .collect();
            let durations = a.durations_s.clone().ok_or_else(|| Error::MissingField("anchors.durations_s".into()))?;
            let trajectory = Trajectory::new(waypoints, durations)?;
            let placement_error = PlacementError::new(
                a.placement_range_error_m,
                a.placement_horizontal_error_m,
                a.placement_vertical_error_m,
            )
            .map_err(|e| invalid(e.to_string()))?;
            Ok(AnchorModel::Uav { trajectory, placement_error, attitude })
        }
        "leo" => Ok(AnchorModel::Leo(
            OrbitElements::new(
                require(a.altitude_m, "anchors.altitude_m")?,
                require(a.inclination_rad, "anchors.inclination_rad")?,
                a.raan_rad.unwrap_or(0.0),
                a.phase_rad.unwrap_or(0.0),
            )
            .map_err(|e| invalid(e.to_string()))?,
        )),
        other => Err(invalid(format!("unknown anchor kind `{other}` (ground | uav | leo)"))),
    }
}

fn region_from_raw(r: &RawRegion) -> Result<TargetSource> {
    match r.shape.as_str() {
        "box" => {
            let (min, max) = (v3(require(r.min_m, "target_region.min_m")?), v3(require(r.max_m, "target_region.max_m")?));
            if (0..3).any(|k| !(min[k] <= max[k])) {
                return Err(invalid("target_region box has min > max"));
            }
            Ok(TargetSource::Box { min, max })
        }
        "disc" => {
            let centre = v3(require(r.centre_m, "target_region.centre_m")?);
            let radius = require(r.radius_m, "target_region.radius_m")?;
            let (lo, hi) = (r.height_min_m.unwrap_or(centre.z), r.height_max_m.unwrap_or(centre.z));
            if !(radius >= 0.0) || !(lo <= hi) {
                return Err(invalid("target_region disc needs radius >= 0 and height_min <= height_max"));
            }
            Ok(TargetSource::Disc { centre, radius, height_min: lo, height_max: hi })
        }
        other => Err(invalid(format!("unknown target_region shape `{other}` (box | disc)"))),
    }
}

fn radio_from_raw(r: &RawRadio) -> Result<RadioConfig> {
    let cfg = RadioConfig {
        carrier_hz: r.carrier_hz,
        bandwidth_hz: r.bandwidth_hz,
        tx_power_dbm: r.tx_power_dbm,
        constant_db: r.constant_db,
        pathloss_exponent: r.pathloss_exponent,
        reference_distance_m: r.reference_distance_m,
        ..RadioConfig::default()
    };
    cfg.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(cfg)
}

fn shadowing_from_raw(s: &RawShadowing) -> Result<ShadowingParams> {
    let los = match s.los_model.as_str() {
        "logistic" => LosProbability::Logistic {
            alpha: require(s.los_alpha, "shadowing.los_alpha")?,
            beta: require(s.los_beta, "shadowing.los_beta")?,
        },
        "constant" => LosProbability::Constant(require(s.los_probability, "shadowing.los_probability")?),
        other => return Err(invalid(format!("unknown los_model `{other}` (logistic | constant)"))),
    };
    ShadowingParams::new(s.a_los_db, s.b_los_per_rad, s.a_nlos_db, s.b_nlos_per_rad, los)
        .map_err(|e| invalid(e.to_string()))
}

fn measurement_from_raw(m: &RawMeasurement) -> Result<MeasurementPlan> {
    let kind = match m.kind.as_str() {
        "range" => MeasurementPlanKind::Range,
        "tdoa" => MeasurementPlanKind::Tdoa,
        "aoa" => MeasurementPlanKind::Aoa,
        "range_aoa" => MeasurementPlanKind::RangeAoa,
        "rss" => MeasurementPlanKind::Rss,
        other => return Err(invalid(format!("unknown measurement kind `{other}`"))),
    };
    let need = |v: Option<f64>, field: &str, used: bool| -> Result<f64> {
        match (v, used) {
            (Some(x), _) if !(x >= 0.0) => Err(invalid(format!("measurement.{field} must be >= 0"))),
            (Some(x), _) => Ok(x),
            (None, true) => Err(Error::MissingField(format!("measurement.{field}"))),
            (None, false) => Ok(0.0),
        }
    };
    use MeasurementPlanKind::*;
    Ok(MeasurementPlan {
        kind,
        range_sigma_m: need(m.range_sigma_m, "range_sigma_m", matches!(kind, Range | RangeAoa))?,
        tdoa_sigma_m: need(m.tdoa_sigma_m, "tdoa_sigma_m", kind == Tdoa)?,
        aoa_sigma_rad: need(m.aoa_sigma_rad, "aoa_sigma_rad", matches!(kind, Aoa | RangeAoa))?,
        nlos_bias_m: m.nlos_bias_m,
        reference_anchor: m.reference_anchor,
        time_s: m.time_s,
    })
}

fn solver_from_raw(s: Option<&RawSolver>) -> Result<SolverConfig> {
    let mut cfg = SolverConfig::default();
    if let Some(s) = s {
        cfg.max_iterations = s.max_iterations.unwrap_or(cfg.max_iterations);
        cfg.tolerance = s.tolerance_m.unwrap_or(cfg.tolerance);
        cfg.max_halvings = s.max_halvings.unwrap_or(cfg.max_halvings);
        cfg.multistart = s.multistart.unwrap_or(cfg.multistart);
        cfg.seed = s.seed.unwrap_or(cfg.seed);
        cfg.initial_guess = s.initial_guess_m.map(v3);
    }
    cfg.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(cfg)
}

fn constellation_from_raw(c: &RawConstellation) -> Result<Constellation> {
    let kind = match c.kind.as_str() {
        "polar" => ConstellationKind::Polar,
        "walker" => ConstellationKind::Walker,
        "mixed" => ConstellationKind::Mixed,
        other => return Err(invalid(format!("unknown constellation kind `{other}`"))),
    };
    Ok(Constellation {
        kind,
        planes: c.planes,
        sats_per_plane: c.sats_per_plane,
        template: OrbitElements::new(c.altitude_m, c.inclination_rad, c.raan_rad, c.phase_rad)
            .map_err(|e| invalid(e.to_string()))?,
    })
}

fn sweep_from_raw(s: &RawSweep) -> Result<AltitudeSweep> {
    let altitudes = match (&s.altitudes_m, s.altitude_min_m, s.altitude_max_m, s.altitude_points) {
        (Some(list), None, None, None) => list.clone(),
        (None, Some(lo), Some(hi), Some(n)) if n >= 2 && lo < hi => {
            (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
        }
        _ => {
            return Err(invalid(
                "altitude_sweep needs either altitudes_m or altitude_min_m/altitude_max_m/altitude_points (>= 2)",
            ))
        }
    };
    if altitudes.is_empty() || altitudes.iter().any(|h| !(*h > s.target_height_m)) {
        return Err(invalid("sweep altitudes must be above the target height"));
    }
    let vertical = s.placement_vertical_errors_m.clone().unwrap_or_else(|| vec![0.0]);
    let errs = [s.placement_range_error_m, s.placement_horizontal_error_m];
    if vertical.is_empty() || errs.iter().chain(&vertical).any(|e| !(*e >= 0.0)) || !(s.disc_radius_m > 0.0) {
        return Err(invalid("sweep placement errors must be >= 0 and the disc radius > 0"));
    }
    Ok(AltitudeSweep {
        altitudes_m: altitudes,
        disc_radius_m: s.disc_radius_m,
        centre_xy: s.centre_m.unwrap_or([0.0, 0.0]),
        target_height_m: s.target_height_m,
        range_error_m: s.placement_range_error_m,
        horizontal_error_m: s.placement_horizontal_error_m,
        vertical_errors_m: vertical,
    })
}

fn gdop_from_raw(g: &RawGdopMap) -> Result<GdopMapSpec> {
    let tdoa = match g.kind.as_str() {
        "range" => false,
        "tdoa" => true,
        other => return Err(invalid(format!("unknown gdop_map kind `{other}` (range | tdoa)"))),
    };
    if g.points.contains(&0) {
        return Err(invalid("gdop_map.points must be >= 1 on every axis"));
    }
    Ok(GdopMapSpec { tdoa, reference_anchor: g.reference_anchor, x: g.x_m, y: g.y_m, z: g.z_m, points: g.points, time_s: g.time_s })
}

fn doppler_from_raw(d: &RawDoppler) -> Result<DopplerSpec> {
    let user = match (d.user_position_m, d.user_lat_rad, d.user_lon_rad, d.pass_max_elevation_rad) {
        (Some(p), None, None, None) => UserSpec::Ecef(v3(p)),
        (None, Some(lat), Some(lon), None) => UserSpec::Spherical { lat, lon, height: d.user_height_m },
        (None, None, None, Some(el)) => UserSpec::ForPass {
            max_elevation: el,
            peak_time: require(d.pass_peak_s, "doppler.pass_peak_s")?,
        },
        _ => {
            return Err(invalid(
                "doppler needs exactly one of user_position_m, user_lat_rad/user_lon_rad, pass_max_elevation_rad",
            ))
        }
    };
    if !(d.carrier_hz > 0.0) || !(d.step_s > 0.0) || !(d.end_s >= d.start_s) {
        return Err(invalid("doppler needs carrier > 0, step > 0 and end >= start"));
    }
    Ok(DopplerSpec {
        carrier_hz: d.carrier_hz,
        start_s: d.start_s,
        end_s: d.end_s,
        step_s: d.step_s,
        mask_rad: d.mask_rad.unwrap_or(DEFAULT_ELEVATION_MASK),
        user,
        tle_path: d.tle_path.clone(),
    })
}

fn trajopt_from_raw(t: &RawTrajOpt) -> Result<TrajOptSpec> {
    match t.objective.as_str() {
        "range_crlb" | "monte_carlo_rmse" => {
            require(t.sigma_m, "trajopt.sigma_m")?;
        }
        "rss_ranging" => {}
        other => {
            return Err(invalid(format!(
                "unknown trajopt objective `{other}` (range_crlb | rss_ranging | monte_carlo_rmse)"
            )))
        }
    }
    Ok(TrajOptSpec {
        objective: t.objective.clone(),
        sigma_m: t.sigma_m,
        mc_trials: t.mc_trials.unwrap_or(100),
        max_speed_mps: t.max_speed_mps,
        max_turn_rate_rad_s: t.max_turn_rate_rad_per_s,
        hover_power_w: t.hover_power_w,
        move_cost_j_per_m: t.move_cost_j_per_m,
        energy_budget_j: t.energy_budget_j,
        min_waypoints: t.min_waypoints,
        max_waypoints: t.max_waypoints,
        min_dwell_s: t.min_dwell_s,
        coverage_radius_m: t.coverage_radius_m,
        total_dwell_s: t.total_dwell_s,
        reference_dwell_s: t.reference_dwell_s,
        box_min: v3(t.box_min_m),
        box_max: v3(t.box_max_m),
        iterations: t.iterations,
        chains: t.chains,
        stops: t.stops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[run]
trials = 10
seed = 1

[measurement]
kind = "range"
range_sigma_m = 0.5

[[anchors]]
kind = "ground"
position_m = [0, 0, 10]

[[targets]]
position_m = [40, 30, 1.5]
"#;

    #[test]
    fn minimal_g2g() {
        let s = Scenario::from_toml_str(MINIMAL).unwrap();
        assert_eq!(s.anchors.len(), 1);
        assert!(matches!(&s.targets, Some(TargetSource::Fixed(t)) if t.len() == 1));
        assert_eq!(s, Scenario::from_toml_str(MINIMAL).unwrap());
        assert_eq!(s.config_hash.len(), 64);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("seed = 1", "seed = 1\nsede = 2");
        match Scenario::from_toml_str(&text) {
            Err(Error::UnknownKey(k)) => assert_eq!(k, "sede"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_field_is_named() {
        let text = MINIMAL.replace("trials = 10\n", "");
        match Scenario::from_toml_str(&text) {
            Err(Error::MissingField(k)) => assert_eq!(k, "trials"),
            other => panic!("unexpected {other:?}"),
        }
        let text = MINIMAL.replace("range_sigma_m = 0.5\n", "");
        assert_eq!(Scenario::from_toml_str(&text).unwrap_err().code(), "SCENARIO_MISSING_FIELD");
    }

    #[test]
    fn trajectory_invariant_is_cited() {
        let text = MINIMAL.replace(
            "position_m = [0, 0, 10]",
            "waypoints_m = [[0, 0, 50], [10, 0, 50]]\ndurations_s = [1, 2]",
        )
        .replace("kind = \"ground\"", "kind = \"uav\"");
        let e = Scenario::from_toml_str(&text).unwrap_err();
        assert!(e.to_string().contains("waypoint count = duration count + 1"), "{e}");
    }

    #[test]
    fn units_are_converted() {
        let text = MINIMAL.replace("range_sigma_m = 0.5", "range_sigma_km = 0.002");
        let s = Scenario::from_toml_str(&text).unwrap();
        assert_eq!(s.measurement.unwrap().range_sigma_m, 2.0);
        let bad = MINIMAL.replace("range_sigma_m = 0.5", "range_sigma_hz = 1");
        assert_eq!(Scenario::from_toml_str(&bad).unwrap_err().code(), "SCENARIO_UNIT");
    }

    #[test]
    fn shadowing_must_be_spelled_out() {
        let text = format!(
            "{MINIMAL}\n[shadowing]\na_los_db = 10.39\nb_los_per_deg = 0.05\na_nlos_db = 29.6\nb_nlos_per_deg = 0.03\nlos_model = \"logistic\"\nlos_alpha = 9.61\n"
        );
        match Scenario::from_toml_str(&text) {
            Err(Error::MissingField(k)) => assert_eq!(k, "shadowing.los_beta"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
