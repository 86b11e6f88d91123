//! Log-distance path loss, antenna gain and elevation-dependent shadowing.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Measurement, RadioConfig};
use crate::error::{Error, Result};

/// Line-of-sight condition of an air-to-ground link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkCondition {
    Los,
    Nlos,
}

/// Probability of a line-of-sight link as a function of elevation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LosProbability {
    /// `1 / (1 + alpha * exp(-beta * (elevation_deg - alpha)))`.
    Logistic { alpha: f64, beta: f64 },
    Constant(f64),
}

impl LosProbability {
    /// Logistic presets for common environments. The values are the widely
    /// used air-to-ground fits and are illustrative only.
    pub fn suburban() -> Self {
        Self::Logistic { alpha: 4.88, beta: 0.43 }
    }

    pub fn urban() -> Self {
        Self::Logistic { alpha: 9.61, beta: 0.16 }
    }

    pub fn dense_urban() -> Self {
        Self::Logistic { alpha: 12.08, beta: 0.11 }
    }

    pub fn at(&self, elevation: f64) -> f64 {
        match *self {
            LosProbability::Logistic { alpha, beta } => {
                1.0 / (1.0 + alpha * (-beta * (elevation.to_degrees() - alpha)).exp())
            }
            LosProbability::Constant(p) => p,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            LosProbability::Logistic { alpha, beta } if alpha >= 0.0 && beta >= 0.0 => Ok(()),
            LosProbability::Constant(p) if (0.0..=1.0).contains(&p) => Ok(()),
            other => Err(Error::config(format!("invalid LOS probability model {other:?}"))),
        }
    }
}

/// Coefficients of `sigma_j(elevation) = a_j * exp(-b_j * elevation)` for the
/// LOS and NLOS conditions. `b` is per radian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowingParams {
    pub a_los_db: f64,
    pub b_los_per_rad: f64,
    pub a_nlos_db: f64,
    pub b_nlos_per_rad: f64,
    pub los_probability: LosProbability,
}

impl ShadowingParams {
    pub fn new(
        a_los_db: f64,
        b_los_per_rad: f64,
        a_nlos_db: f64,
        b_nlos_per_rad: f64,
        los_probability: LosProbability,
    ) -> Result<Self> {
        let p = Self {
            a_los_db,
            b_los_per_rad,
            a_nlos_db,
            b_nlos_per_rad,
            los_probability,
        };
        p.validate()?;
        Ok(p)
    }

    /// No shadowing at any elevation.
    pub fn none() -> Self {
        Self {
            a_los_db: 0.0,
            b_los_per_rad: 0.0,
            a_nlos_db: 0.0,
            b_nlos_per_rad: 0.0,
            los_probability: LosProbability::Constant(1.0),
        }
    }

    /// Illustrative urban preset: per-degree fits of 10.39/0.05 (LOS) and
    /// 29.6/0.03 (NLOS) converted to per radian, with the urban LOS curve.
    pub fn urban_illustrative() -> Self {
        let per_rad = 180.0 / PI;
        Self {
            a_los_db: 10.39,
            b_los_per_rad: 0.05 * per_rad,
            a_nlos_db: 29.6,
            b_nlos_per_rad: 0.03 * per_rad,
            los_probability: LosProbability::urban(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let coeffs = [
            self.a_los_db,
            self.b_los_per_rad,
            self.a_nlos_db,
            self.b_nlos_per_rad,
        ];
        if coeffs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::config(format!(
                "shadowing coefficients must be finite and non-negative, got {coeffs:?}"
            )));
        }
        self.los_probability.validate()
    }

    /// Standard deviation of the combined shadowing at `elevation`, in dB.
    pub fn sigma_db(&self, elevation: f64) -> Result<f64> {
        let los = elevation_shadowing_sigma(self, elevation, LinkCondition::Los)?;
        let nlos = elevation_shadowing_sigma(self, elevation, LinkCondition::Nlos)?;
        Ok(combined_shadowing_var(self.los_probability.at(elevation), los, nlos)?.sqrt())
    }
}

/// Antenna gain pattern.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GainModel {
    #[default]
    Isotropic,
    /// Constant efficiency and effective aperture (m^2).
    Aperture { efficiency: f64, effective_area_m2: f64 },
}

/// Mean received power in dBm at distance `d`, without shadowing.
pub fn expected_rx_power(cfg: &RadioConfig, d: f64) -> Result<f64> {
    if !(d >= cfg.reference_distance_m) {
        return Err(Error::domain(format!(
            "distance {d} m is below the reference distance {} m",
            cfg.reference_distance_m
        )));
    }
    Ok(cfg.tx_power_dbm + cfg.constant_db
        - 10.0 * cfg.pathloss_exponent * (d / cfg.reference_distance_m).log10())
}

/// Linear antenna gain `eta * 4 pi A_e / lambda^2`.
pub fn antenna_gain(model: &GainModel, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength must be positive"));
    }
    Ok(match *model {
        GainModel::Isotropic => 1.0,
        GainModel::Aperture {
            efficiency,
            effective_area_m2,
        } => efficiency * 4.0 * PI * effective_area_m2 / (wavelength * wavelength),
    })
}

pub fn elevation_shadowing_sigma(
    p: &ShadowingParams,
    elevation: f64,
    cond: LinkCondition,
) -> Result<f64> {
    if !(0.0..=PI / 2.0).contains(&elevation) {
        return Err(Error::domain(format!(
            "elevation {elevation} rad outside [0, pi/2]"
        )));
    }
    let (a, b) = match cond {
        LinkCondition::Los => (p.a_los_db, p.b_los_per_rad),
        LinkCondition::Nlos => (p.a_nlos_db, p.b_nlos_per_rad),
    };
    Ok(a * (-b * elevation).exp())
}

/// Variance (dB^2) of the LOS/NLOS shadowing mixture.
pub fn combined_shadowing_var(p_los: f64, sigma_los: f64, sigma_nlos: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_los) {
        return Err(Error::domain(format!("LOS probability {p_los} outside [0, 1]")));
    }
    let q = 1.0 - p_los;
    Ok(p_los * p_los * sigma_los * sigma_los + q * q * sigma_nlos * sigma_nlos)
}

/// Draws one received-power sample at distance `d` and elevation `elevation`.
pub fn sample_rss<R: Rng + ?Sized>(
    cfg: &RadioConfig,
    shadow: &ShadowingParams,
    d: f64,
    elevation: f64,
    rng: &mut R,
) -> Result<Measurement> {
    let mean = expected_rx_power(cfg, d)?;
    let sigma = shadow.sigma_db(elevation)?;
    let z: f64 = StandardNormal.sample(rng);
    Ok(Measurement::rss(mean + sigma * z, sigma))
}

/// Distance implied by a received power through the inverted path-loss law.
pub fn rss_to_distance(cfg: &RadioConfig, rx_power_dbm: f64) -> f64 {
    cfg.reference_distance_m
        * 10f64.powf(
            (cfg.tx_power_dbm + cfg.constant_db - rx_power_dbm) / (10.0 * cfg.pathloss_exponent),
        )
}

/// First-order standard deviation (m) of an RSS range at true distance `d`
/// under `sigma_db` of shadowing.
pub fn rss_range_sigma(cfg: &RadioConfig, d: f64, sigma_db: f64) -> f64 {
    d * std::f64::consts::LN_10 * sigma_db / (10.0 * cfg.pathloss_exponent)
}
