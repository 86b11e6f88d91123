//! Unit suffixes on scenario keys.
//!
//! Every physical quantity in a scenario file carries its unit in the key
//! name (`altitude_km`, `carrier_ghz`, `b_los_per_deg`, ...). Before the file
//! is deserialized, each such key is converted to SI and renamed to its
//! canonical suffix (`altitude_m`, `carrier_hz`, `b_los_per_rad`). Arrays are
//! converted element-wise.

use std::f64::consts::PI;

use toml::{Table, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Frequency,
    Angle,
    AngularRate,
    PerAngle,
    PowerDbm,
    Decibel,
    Speed,
    Power,
    Energy,
    EnergyPerLength,
}

impl Dimension {
    fn canonical(self) -> &'static str {
        match self {
            Dimension::Length => "m",
            Dimension::Time => "s",
            Dimension::Frequency => "hz",
            Dimension::Angle => "rad",
            Dimension::AngularRate => "rad_per_s",
            Dimension::PerAngle => "per_rad",
            Dimension::PowerDbm => "dbm",
            Dimension::Decibel => "db",
            Dimension::Speed => "mps",
            Dimension::Power => "w",
            Dimension::Energy => "j",
            Dimension::EnergyPerLength => "j_per_m",
        }
    }
}

/// Recognised suffixes, longest match first: (suffix, dimension, factor to SI).
const SUFFIXES: &[(&str, Dimension, f64)] = &[
    ("rad_per_s", Dimension::AngularRate, 1.0),
    ("deg_per_s", Dimension::AngularRate, PI / 180.0),
    ("per_rad", Dimension::PerAngle, 1.0),
    ("per_deg", Dimension::PerAngle, 180.0 / PI),
    ("j_per_m", Dimension::EnergyPerLength, 1.0),
    ("kj_per_km", Dimension::EnergyPerLength, 1.0),
    ("dbm", Dimension::PowerDbm, 1.0),
    ("db", Dimension::Decibel, 1.0),
    ("ghz", Dimension::Frequency, 1e9),
    ("mhz", Dimension::Frequency, 1e6),
    ("khz", Dimension::Frequency, 1e3),
    ("hz", Dimension::Frequency, 1.0),
    ("mps", Dimension::Speed, 1.0),
    ("kmph", Dimension::Speed, 1000.0 / 3600.0),
    ("km", Dimension::Length, 1000.0),
    ("m", Dimension::Length, 1.0),
    ("ms", Dimension::Time, 1e-3),
    ("us", Dimension::Time, 1e-6),
    ("ns", Dimension::Time, 1e-9),
    ("min", Dimension::Time, 60.0),
    ("s", Dimension::Time, 1.0),
    ("deg", Dimension::Angle, PI / 180.0),
    ("rad", Dimension::Angle, 1.0),
    ("kw", Dimension::Power, 1e3),
    ("w", Dimension::Power, 1.0),
    ("kj", Dimension::Energy, 1e3),
    ("j", Dimension::Energy, 1.0),
];

/// Quantity names that require a unit, with their dimension.
const QUANTITIES: &[(&str, Dimension)] = &[
    ("position", Dimension::Length),
    ("waypoints", Dimension::Length),
    ("altitude", Dimension::Length),
    ("altitudes", Dimension::Length),
    ("altitude_min", Dimension::Length),
    ("altitude_max", Dimension::Length),
    ("height", Dimension::Length),
    ("height_min", Dimension::Length),
    ("height_max", Dimension::Length),
    ("target_height", Dimension::Length),
    ("radius", Dimension::Length),
    ("disc_radius", Dimension::Length),
    ("coverage_radius", Dimension::Length),
    ("centre", Dimension::Length),
    ("min", Dimension::Length),
    ("max", Dimension::Length),
    ("box_min", Dimension::Length),
    ("box_max", Dimension::Length),
    ("x", Dimension::Length),
    ("y", Dimension::Length),
    ("z", Dimension::Length),
    ("reference_distance", Dimension::Length),
    ("range_sigma", Dimension::Length),
    ("tdoa_sigma", Dimension::Length),
    ("nlos_bias", Dimension::Length),
    ("sigma", Dimension::Length),
    ("tolerance", Dimension::Length),
    ("initial_guess", Dimension::Length),
    ("user_position", Dimension::Length),
    ("user_height", Dimension::Length),
    ("placement_range_error", Dimension::Length),
    ("placement_horizontal_error", Dimension::Length),
    ("placement_vertical_error", Dimension::Length),
    ("placement_vertical_errors", Dimension::Length),
    ("durations", Dimension::Time),
    ("time", Dimension::Time),
    ("start", Dimension::Time),
    ("end", Dimension::Time),
    ("step", Dimension::Time),
    ("pass_peak", Dimension::Time),
    ("min_dwell", Dimension::Time),
    ("total_dwell", Dimension::Time),
    ("reference_dwell", Dimension::Time),
    ("carrier", Dimension::Frequency),
    ("bandwidth", Dimension::Frequency),
    ("inclination", Dimension::Angle),
    ("raan", Dimension::Angle),
    ("phase", Dimension::Angle),
    ("pitch", Dimension::Angle),
    ("roll", Dimension::Angle),
    ("yaw", Dimension::Angle),
    ("aoa_sigma", Dimension::Angle),
    ("mask", Dimension::Angle),
    ("user_lat", Dimension::Angle),
    ("user_lon", Dimension::Angle),
    ("pass_max_elevation", Dimension::Angle),
    ("max_turn_rate", Dimension::AngularRate),
    ("b_los", Dimension::PerAngle),
    ("b_nlos", Dimension::PerAngle),
    ("tx_power", Dimension::PowerDbm),
    ("constant", Dimension::Decibel),
    ("a_los", Dimension::Decibel),
    ("a_nlos", Dimension::Decibel),
    ("max_speed", Dimension::Speed),
    ("hover_power", Dimension::Power),
    ("energy_budget", Dimension::Energy),
    ("move_cost", Dimension::EnergyPerLength),
];

fn quantity(base: &str) -> Option<Dimension> {
    QUANTITIES.iter().find(|(n, _)| *n == base).map(|(_, d)| *d)
}

fn split_suffix(key: &str) -> Option<(&str, Dimension, f64)> {
    SUFFIXES.iter().find_map(|(suffix, dim, factor)| {
        let base = key.strip_suffix(suffix)?.strip_suffix('_')?;
        (!base.is_empty()).then_some((base, *dim, *factor))
    })
}

fn scale(value: &Value, factor: f64, path: &str) -> Result<Value> {
    match value {
        Value::Float(f) => Ok(Value::Float(f * factor)),
        Value::Integer(i) => Ok(Value::Float(*i as f64 * factor)),
        Value::Array(items) => items.iter().map(|v| scale(v, factor, path)).collect::<Result<Vec<_>>>().map(Value::Array),
        other => Err(Error::UnitMismatch {
            key: path.to_string(),
            detail: format!("expected a number or array of numbers, found {}", other.type_str()),
        }),
    }
}

/// Rewrites every unit-suffixed key of `table` (recursively) into its SI
/// canonical form.
pub fn normalize_units(table: &Table) -> Result<Table> {
    normalize_table(table, "")
}

fn normalize_table(table: &Table, prefix: &str) -> Result<Table> {
    let mut out = Table::new();
    for (key, value) in table {
        let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
        let (new_key, new_value) = match value {
            Value::Table(t) => (key.clone(), Value::Table(normalize_table(t, &path)?)),
            Value::Array(items) if items.iter().all(Value::is_table) && !items.is_empty() => {
                let tables = items
                    .iter()
                    .enumerate()
                    .map(|(i, v)| normalize_table(v.as_table().expect("checked"), &format!("{path}[{i}]")).map(Value::Table))
                    .collect::<Result<Vec<_>>>()?;
                (key.clone(), Value::Array(tables))
            }
            _ => normalize_entry(key, value, &path)?,
        };
        if out.insert(new_key.clone(), new_value).is_some() {
            return Err(Error::InvalidScenario(format!("`{path}` given twice (as `{new_key}` in another unit)")));
        }
    }
    Ok(out)
}

fn normalize_entry(key: &str, value: &Value, path: &str) -> Result<(String, Value)> {
    if let Some(dim) = quantity(key) {
        return Err(Error::UnitMismatch {
            key: path.to_string(),
            detail: format!("missing unit suffix; write `{key}_{}`", dim.canonical()),
        });
    }
    let Some((base, dim, factor)) = split_suffix(key) else {
        return Ok((key.to_string(), value.clone()));
    };
    match quantity(base) {
        Some(expected) if expected == dim => {
            Ok((format!("{base}_{}", dim.canonical()), scale(value, factor, path)?))
        }
        Some(expected) => Err(Error::UnitMismatch {
            key: path.to_string(),
            detail: format!("`{base}` is a {expected:?} quantity but the suffix denotes {dim:?}"),
        }),
        // Not a physical quantity; left for the schema to accept or reject.
        None => Ok((key.to_string(), value.clone())),
    }
}
