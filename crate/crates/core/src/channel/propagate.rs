use rand::Rng;

use super::{add_awgn, Environment, FirModel, PathList};
use crate::error::{Error, Result};
use crate::waveform::{check_rates, Waveform};

/// A transmitted waveform and the paths it reaches the receiver by.
#[derive(Debug, Clone)]
pub struct Emission {
    pub waveform: Waveform,
    pub paths: PathList,
}

/// Nearest-sample delay.
pub(crate) fn delay_samples(delay: f64, sample_rate: f64) -> usize {
    (delay * sample_rate).round().max(0.0) as usize
}

/// Adds `gain · signal` into `out` starting at `offset`, growing `out` as needed.
pub(crate) fn superpose(out: &mut Vec<f64>, signal: &[f64], offset: usize, gain: f64) {
    let end = offset + signal.len();
    if out.len() < end {
        out.resize(end, 0.0);
    }
    out[offset..end]
        .iter_mut()
        .zip(signal)
        .for_each(|(o, s)| *o += gain * s);
}

/// Noise-free receiver input: every emission passed through the transducer
/// model, then delayed and scaled per path and summed.
pub fn propagate_clean(emissions: &[Emission], fir: &FirModel) -> Result<Waveform> {
    let first = emissions.first().ok_or(Error::Empty("emission list"))?;
    let fs = first.waveform.sample_rate;
    check_rates(fs, fir.sample_rate)?;
    let mut out = Vec::new();
    for e in emissions {
        check_rates(fs, e.waveform.sample_rate)?;
        e.paths.validate()?;
        let filtered = fir.filter(&e.waveform.samples);
        for p in &e.paths.paths {
            superpose(
                &mut out,
                &filtered,
                delay_samples(p.delay, fs),
                p.attenuation,
            );
        }
    }
    if out.is_empty() {
        return Err(Error::Empty("no propagation paths"));
    }
    Waveform::new(out, fs)
}

/// [`propagate_clean`] followed by white noise at `env.snr_db` (if set).
pub fn propagate<R: Rng + ?Sized>(
    emissions: &[Emission],
    fir: &FirModel,
    env: &Environment,
    rng: &mut R,
) -> Result<Waveform> {
    let clean = propagate_clean(emissions, fir)?;
    match env.snr_db {
        Some(snr) => add_awgn(&clean, snr, rng),
        None => Ok(clean),
    }
}
