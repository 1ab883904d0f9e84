use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::waveform::Waveform;

/// Speed of sound in dry air at 0 °C (m/s).
pub const SOUND_SPEED_0C: f64 = 331.6;

/// Ambient conditions of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Environment {
    /// Air temperature (°C).
    pub temperature: f64,
    /// Received SNR (dB); `None` disables additive noise.
    pub snr_db: Option<f64>,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            temperature: 20.0,
            snr_db: None,
        }
    }
}

impl Environment {
    pub fn sound_speed(&self) -> Result<f64> {
        speed_of_sound(self.temperature)
    }
}

/// `c = c0 · sqrt(1 + T / 273.15)`.
pub fn speed_of_sound(temperature: f64) -> Result<f64> {
    if !(temperature > -273.15) {
        return Err(param(format!(
            "temperature {temperature} °C is at or below absolute zero"
        )));
    }
    Ok(SOUND_SPEED_0C * (1.0 + temperature / 273.15).sqrt())
}

/// Adds white Gaussian noise with variance `mean(x²) / 10^(snr/10)`.
///
/// An infinite SNR returns the input unchanged.
pub fn add_awgn<R: Rng + ?Sized>(w: &Waveform, snr_db: f64, rng: &mut R) -> Result<Waveform> {
    if w.is_empty() {
        return Err(Error::Empty("waveform"));
    }
    let power = w.samples.iter().map(|s| s * s).sum::<f64>() / w.len() as f64;
    let mut samples = w.samples.clone();
    add_noise(&mut samples, power, snr_db, rng)?;
    Ok(w.with_samples(samples))
}

/// Adds white Gaussian noise to `samples` at `snr_db` relative to a signal
/// mean-square of `power`.
pub fn add_noise<R: Rng + ?Sized>(
    samples: &mut [f64],
    power: f64,
    snr_db: f64,
    rng: &mut R,
) -> Result<()> {
    if snr_db == f64::INFINITY {
        return Ok(());
    }
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(param(format!("invalid SNR {snr_db} dB")));
    }
    if !(power > 0.0) {
        return Err(Error::UndefinedRatio("SNR of a zero-energy signal".into()));
    }
    let sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    for s in samples.iter_mut() {
        *s += sigma * rng.sample::<f64, _>(StandardNormal);
    }
    Ok(())
}
