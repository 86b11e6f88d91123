//! Geometric multi-path MIMO-OFDM channel.
//!
//! Each path contributes `alpha * exp(-j 2 pi (f_c + k df) tau) *
//! exp(j 2 pi f_c nu l T_sym) * a_rx a_tx^T` to the channel matrix of
//! subcarrier `k` and symbol `l`. Path amplitudes are linear; use
//! [`path_gain_to_amplitude`] to map a dB path gain onto this amplitude
//! convention. The received-power model in `power` works in dBm and is kept
//! separate.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{GainModel, RadioConfig, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::geometry::{direct_distance, AnglePair, Vec3};

/// Antenna elements in the array's local frame; they lie in the local
/// xz-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaArray {
    elements: Vec<Vec3>,
    pub gain: GainModel,
}

impl AntennaArray {
    pub fn new(elements: Vec<Vec3>, gain: GainModel) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::config("antenna array needs at least one element"));
        }
        if elements.iter().any(|p| !p.iter().all(|c| c.is_finite()) || p.y != 0.0) {
            return Err(Error::config(
                "array elements must be finite and lie in the local xz-plane (y = 0)",
            ));
        }
        Ok(Self { elements, gain })
    }

    pub fn single() -> Self {
        Self {
            elements: vec![Vec3::zeros()],
            gain: GainModel::Isotropic,
        }
    }

    /// Uniform linear array along the local x-axis, first element at the origin.
    pub fn ula_x(count: usize, spacing: f64) -> Result<Self> {
        Self::new(
            (0..count).map(|i| Vec3::new(i as f64 * spacing, 0.0, 0.0)).collect(),
            GainModel::Isotropic,
        )
    }

    /// Uniform rectangular array in the xz-plane.
    pub fn ura_xz(nx: usize, nz: usize, spacing: f64) -> Result<Self> {
        let mut elements = Vec::with_capacity(nx * nz);
        for iz in 0..nz {
            for ix in 0..nx {
                elements.push(Vec3::new(ix as f64 * spacing, 0.0, iz as f64 * spacing));
            }
        }
        Self::new(elements, GainModel::Isotropic)
    }

    pub fn elements(&self) -> &[Vec3] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Element `i` is `exp(j 2 pi / lambda * p_i . u(az, el))`.
pub fn steering_vector(array: &AntennaArray, angles: &AnglePair, wavelength: f64) -> Result<Vec<Complex64>> {
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength must be positive"));
    }
    let u = angles.unit_vector();
    let k = 2.0 * PI / wavelength;
    Ok(array
        .elements
        .iter()
        .map(|p| Complex64::from_polar(1.0, k * p.dot(&u)))
        .collect())
}

/// Length of the anchor -> scatterers -> target chain.
pub fn nlos_path_length(anchor: &Vec3, chain: &[Vec3], target: &Vec3) -> Result<f64> {
    let (first, last) = match (chain.first(), chain.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => {
            return Err(Error::domain(
                "empty scatterer chain; use the direct distance for LOS paths",
            ))
        }
    };
    let inner: f64 = chain.windows(2).map(|w| direct_distance(&w[0], &w[1])).sum();
    Ok(direct_distance(anchor, first) + inner + direct_distance(last, target))
}

/// Doppler factor `v . u / c + cfo` for velocity `v` and unit direction `u`.
pub fn frequency_shift_factor(velocity: &Vec3, direction: &Vec3, cfo: f64) -> Result<f64> {
    if (direction.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "direction must be a unit vector, |u| = {}",
            direction.norm()
        )));
    }
    Ok(velocity.dot(direction) / SPEED_OF_LIGHT + cfo)
}

/// Linear amplitude for a path gain given in dB.
pub fn path_gain_to_amplitude(gain_db: f64) -> f64 {
    10f64.powf(gain_db / 20.0)
}

/// One propagation path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    /// Real linear amplitude; a negative value flips the path's phase.
    pub gain: f64,
    pub delay_s: f64,
    pub frequency_shift: f64,
    pub departure: AnglePair,
    pub arrival: AnglePair,
    pub scatterers: Vec<Vec3>,
}

impl PathSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.gain.is_finite() || !(self.delay_s >= 0.0) || !self.frequency_shift.is_finite() {
            return Err(Error::config(format!(
                "path needs finite gain, delay >= 0 and finite shift (gain {}, delay {})",
                self.gain, self.delay_s
            )));
        }
        Ok(())
    }
}

/// Channel matrices `H[k][l]` of shape `rx x tx`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    subcarriers: usize,
    symbols: usize,
    rx: usize,
    tx: usize,
    data: Vec<DMatrix<Complex64>>,
}

impl ChannelTensor {
    fn zeros(subcarriers: usize, symbols: usize, rx: usize, tx: usize) -> Self {
        Self {
            subcarriers,
            symbols,
            rx,
            tx,
            data: vec![DMatrix::zeros(rx, tx); subcarriers * symbols],
        }
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.subcarriers, self.symbols, self.rx, self.tx)
    }

    pub fn at(&self, subcarrier: usize, symbol: usize) -> &DMatrix<Complex64> {
        &self.data[subcarrier * self.symbols + symbol]
    }

    pub fn max_abs_diff(&self, other: &ChannelTensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

pub fn synth_channel(
    cfg: &RadioConfig,
    tx: &AntennaArray,
    rx: &AntennaArray,
    paths: &[PathSpec],
) -> Result<ChannelTensor> {
    cfg.validate()?;
    if paths.is_empty() {
        return Err(Error::config("channel synthesis needs at least one path"));
    }
    let lambda = cfg.wavelength();
    let t_sym = cfg.symbol_duration();
    let mut h = ChannelTensor::zeros(cfg.subcarriers, cfg.symbols, rx.len(), tx.len());
    for path in paths {
        path.validate()?;
        let a_rx = DVector::from_vec(steering_vector(rx, &path.arrival, lambda)?);
        let a_tx = DVector::from_vec(steering_vector(tx, &path.departure, lambda)?);
        let outer = &a_rx * a_tx.transpose();
        for k in 0..cfg.subcarriers {
            let f = cfg.carrier_hz + k as f64 * cfg.subcarrier_spacing_hz;
            let delay = Complex64::from_polar(path.gain, -2.0 * PI * f * path.delay_s);
            for l in 0..cfg.symbols {
                let shift = Complex64::from_polar(
                    1.0,
                    2.0 * PI * cfg.carrier_hz * path.frequency_shift * l as f64 * t_sym,
                );
                h.data[k * cfg.symbols + l] += &outer * (delay * shift);
            }
        }
    }
    Ok(h)
}

/// `y = W^H H f s + n`, with `n = W^H z` and `z ~ CN(0, sigma^2 I)`.
pub fn received_symbol<R: Rng + ?Sized>(
    combiner: &DMatrix<Complex64>,
    channel: &DMatrix<Complex64>,
    precoder: &DVector<Complex64>,
    pilot: Complex64,
    noise_sigma: f64,
    rng: &mut R,
) -> Result<DVector<Complex64>> {
    if combiner.nrows() != channel.nrows() || precoder.len() != channel.ncols() {
        return Err(Error::config(format!(
            "dimension mismatch: W is {}x{}, H is {}x{}, f has {} entries",
            combiner.nrows(),
            combiner.ncols(),
            channel.nrows(),
            channel.ncols(),
            precoder.len()
        )));
    }
    if !(noise_sigma >= 0.0) {
        return Err(Error::domain("noise sigma must be >= 0"));
    }
    let wh = combiner.adjoint();
    let mut y = &wh * channel * precoder * pilot;
    if noise_sigma > 0.0 {
        let s = noise_sigma / 2f64.sqrt();
        let z = DVector::from_fn(channel.nrows(), |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * s, im * s)
        });
        y += wh * z;
    }
    Ok(y)
}
