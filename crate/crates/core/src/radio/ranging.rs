use super::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Range from a one-way flight time `t_rx - t_tx`; `bias` (s) models clock
/// offset or NLOS excess delay.
pub fn toa_range(t_tx: f64, t_rx: f64, bias: f64) -> f64 {
    SPEED_OF_LIGHT * (t_rx - t_tx) + SPEED_OF_LIGHT * bias
}

/// Range difference implied by two synchronized arrival times.
pub fn tdoa_range_diff(t_first: f64, t_second: f64) -> f64 {
    (t_first - t_second) * SPEED_OF_LIGHT
}

/// Two-way ranging: half the round-trip flight time after removing the
/// responder's processing delay.
pub fn rtt_range(t_out: f64, t_back: f64, t_proc: f64) -> Result<f64> {
    let flight = t_back - t_out - t_proc;
    if flight < 0.0 {
        return Err(Error::domain(format!("negative round-trip flight time {flight} s")));
    }
    Ok(SPEED_OF_LIGHT * flight / 2.0)
}
