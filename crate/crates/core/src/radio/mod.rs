//! Measurement models: received power, time ranging, array steering and the
//! multi-path OFDM channel.

mod channel;
mod power;
mod ranging;

pub use channel::{
    frequency_shift_factor, nlos_path_length, path_gain_to_amplitude, received_symbol,
    steering_vector, synth_channel, AntennaArray, ChannelTensor, PathSpec,
};
pub use power::{
    antenna_gain, combined_shadowing_var, elevation_shadowing_sigma, expected_rx_power,
    rss_range_sigma, rss_to_distance, sample_rss, GainModel, LinkCondition, LosProbability,
    ShadowingParams,
};
pub use ranging::{rtt_range, tdoa_range_diff, toa_range};

use crate::error::{Error, Result};
use crate::geometry::AnglePair;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    /// Distance-independent term of the path gain (dB).
    pub constant_db: f64,
    pub pathloss_exponent: f64,
    pub reference_distance_m: f64,
    pub subcarriers: usize,
    pub symbols: usize,
    pub subcarrier_spacing_hz: f64,
    pub cyclic_prefix_s: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            carrier_hz: 2.0e9,
            bandwidth_hz: 20.0e6,
            tx_power_dbm: 20.0,
            constant_db: 0.0,
            pathloss_exponent: 2.0,
            reference_distance_m: 1.0,
            subcarriers: 64,
            symbols: 14,
            subcarrier_spacing_hz: 30.0e3,
            cyclic_prefix_s: 2.34e-6,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.carrier_hz > 0.0
            && self.reference_distance_m > 0.0
            && self.pathloss_exponent > 0.0
            && self.subcarriers >= 1
            && self.symbols >= 1
            && self.subcarrier_spacing_hz > 0.0
            && self.cyclic_prefix_s >= 0.0
            && self.bandwidth_hz >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid radio configuration {self:?}")))
        }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// OFDM symbol duration including the cyclic prefix.
    pub fn symbol_duration(&self) -> f64 {
        self.cyclic_prefix_s + 1.0 / self.subcarrier_spacing_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementKind {
    Rss { dbm: f64 },
    Toa { seconds: f64 },
    /// Arrival-time difference between anchors `first` and `second`.
    TdoaPair { first: usize, second: usize, seconds: f64 },
    Aoa(AnglePair),
    PseudorangeRate { mps: f64 },
}

/// One observation plus the standard deviation of its noise in native units
/// (dB, s, rad or m/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub kind: MeasurementKind,
    pub sigma: f64,
}

impl Measurement {
    pub fn new(kind: MeasurementKind, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::domain(format!("noise sigma must be >= 0, got {sigma}")));
        }
        if let MeasurementKind::TdoaPair { first, second, .. } = kind {
            if first == second {
                return Err(Error::domain("TDOA pair needs two distinct anchors"));
            }
        }
        Ok(Self { kind, sigma })
    }

    pub(crate) fn rss(dbm: f64, sigma: f64) -> Self {
        Self { kind: MeasurementKind::Rss { dbm }, sigma }
    }

    pub(crate) fn pseudorange_rate(mps: f64, sigma: f64) -> Self {
        Self { kind: MeasurementKind::PseudorangeRate { mps }, sigma }
    }
}
