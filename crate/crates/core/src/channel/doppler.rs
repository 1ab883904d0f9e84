use std::f64::consts::PI;

use super::fir::kaiser_beta_window;
use crate::error::{param, Error, Result};
use crate::waveform::Waveform;

/// Interpolation kernel half-width in input samples.
const HALF_WIDTH: usize = 32;
/// Kernel table resolution (entries per input sample).
const PHASES: usize = 2048;
const KAISER_BETA: f64 = 8.6;

/// Relative motion between one emitter and a moving receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerSpec {
    /// Receiver velocity (m/s).
    pub velocity: [f64; 3],
    pub emitter: [f64; 3],
    pub receiver: [f64; 3],
    pub sound_speed: f64,
    pub sample_rate: f64,
}

impl DopplerSpec {
    /// Receiver moving straight at the emitter with `speed` (negative: receding).
    pub fn radial(speed: f64, sound_speed: f64, sample_rate: f64) -> Self {
        Self {
            velocity: [speed, 0.0, 0.0],
            emitter: [1.0, 0.0, 0.0],
            receiver: [0.0, 0.0, 0.0],
            sound_speed,
            sample_rate,
        }
    }

    /// `fs' = fs · (c + v · û) / c`, û the unit vector from receiver to emitter.
    pub fn virtual_rate(&self) -> Result<f64> {
        let d: Vec<f64> = (0..3).map(|i| self.emitter[i] - self.receiver[i]).collect();
        let dist = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(dist > 0.0) {
            return Err(Error::Geometry("emitter and receiver coincide".into()));
        }
        if !(self.sound_speed > 0.0 && self.sample_rate > 0.0) {
            return Err(param("sound speed and sample rate must be positive"));
        }
        let radial: f64 = (0..3).map(|i| self.velocity[i] * d[i] / dist).sum();
        let rate = self.sample_rate * ((self.sound_speed + radial) / self.sound_speed);
        if !(rate > 0.0) {
            return Err(param(format!(
                "virtual sample rate {rate} Hz is not positive"
            )));
        }
        Ok(rate)
    }
}

/// Re-times `w` as seen by a receiver sampling at `fs` while the signal
/// arrives at the virtual rate of `spec`.
pub fn doppler_resample(w: &Waveform, spec: &DopplerSpec) -> Result<Waveform> {
    let rate = spec.virtual_rate()?;
    resample_ratio(w, rate / w.sample_rate)
}

/// Band-limited re-sampling: `y[n] = x(n · ratio)` with a Kaiser-windowed
/// sinc kernel read from a fine polyphase table.
///
/// `ratio > 1` compresses the signal (and lowers the kernel cut-off to
/// `1/ratio` to avoid aliasing); `ratio < 1` stretches it. The output covers
/// every position inside the input span.
pub fn resample_ratio(w: &Waveform, ratio: f64) -> Result<Waveform> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(param(format!("resampling ratio {ratio} must be positive")));
    }
    if w.is_empty() {
        return Ok(w.clone());
    }
    if ratio == 1.0 {
        return Ok(w.clone());
    }
    let cutoff = (1.0 / ratio).min(1.0);
    let kernel = KernelTable::new(cutoff);
    let x = &w.samples;
    let n_in = x.len();
    let n_out = ((n_in - 1) as f64 / ratio).floor() as usize + 1;
    let reach = (HALF_WIDTH as f64 / cutoff).ceil() as isize;
    let samples = (0..n_out)
        .map(|n| {
            let pos = n as f64 * ratio;
            let base = pos.floor() as isize;
            let lo = (base - reach + 1).max(0);
            let hi = (base + reach).min(n_in as isize - 1);
            (lo..=hi)
                .map(|k| x[k as usize] * kernel.eval(pos - k as f64))
                .sum::<f64>()
        })
        .collect();
    Ok(w.with_samples(samples))
}

struct KernelTable {
    cutoff: f64,
    values: Vec<f64>,
}

impl KernelTable {
    fn new(cutoff: f64) -> Self {
        let len = HALF_WIDTH * PHASES + 2;
        let values = (0..len)
            .map(|i| {
                let t = i as f64 / PHASES as f64;
                let s = if t == 0.0 {
                    1.0
                } else {
                    (PI * t).sin() / (PI * t)
                };
                cutoff * s * kaiser_beta_window(t, HALF_WIDTH as f64, KAISER_BETA)
            })
            .collect();
        Self { cutoff, values }
    }

    /// Kernel at offset `x` input samples.
    fn eval(&self, x: f64) -> f64 {
        let t = (x * self.cutoff).abs() * PHASES as f64;
        let i = t.floor() as usize;
        if i + 1 >= self.values.len() {
            return 0.0;
        }
        let frac = t - i as f64;
        self.values[i] + (self.values[i + 1] - self.values[i]) * frac
    }
}
