use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{param, Result};
use crate::waveform::ComplexWaveform;

/// Parameters of one two-segment complex chirp symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpParams {
    pub f_low: f64,
    pub f_high: f64,
    /// Total symbol duration `T_c` (s).
    pub duration: f64,
    pub sample_rate: f64,
    pub start_p: f64,
    pub start_q: f64,
    /// Sweep rates (Hz/s) of the two segments.
    pub rate_p: f64,
    pub rate_q: f64,
    pub duration_p: f64,
    pub duration_q: f64,
    pub phase: f64,
}

impl ChirpParams {
    pub fn bandwidth(&self) -> f64 {
        self.f_high - self.f_low
    }

    /// Full-band sweep rate `B / T_c`.
    pub fn rate(&self) -> f64 {
        self.bandwidth() / self.duration
    }

    /// Member `k` (1..=5) of the quasi-orthogonal layout: start frequencies
    /// and rates per segment, equal segment durations.
    pub fn layout(
        k: usize,
        f_low: f64,
        f_high: f64,
        duration: f64,
        sample_rate: f64,
    ) -> Result<Self> {
        if !(f_low > 0.0 && f_high > f_low) {
            return Err(param(format!(
                "chirp band [{f_low}, {f_high}] is empty or non-positive"
            )));
        }
        if !(duration > 0.0 && sample_rate > 0.0) {
            return Err(param("chirp duration and sample rate must be positive"));
        }
        if f_high >= sample_rate / 2.0 {
            return Err(param("chirp band exceeds Nyquist"));
        }
        let b = f_high - f_low;
        let mu = b / duration;
        let (start_p, start_q, rate_p, rate_q) = match k {
            1 => (f_low, f_low + b / 4.0, mu / 2.0, 1.5 * mu),
            2 => (f_high, f_high - b / 4.0, -mu / 2.0, -1.5 * mu),
            3 => (f_low, f_low + 0.75 * b, 1.5 * mu, mu / 2.0),
            4 => (f_high, f_high - 0.75 * b, -1.5 * mu, -mu / 2.0),
            5 => (f_low, f_low + b / 2.0, mu, mu),
            _ => {
                return Err(param(format!(
                    "chirp layout defines members 1..=5, got {k}"
                )))
            }
        };
        Ok(Self {
            f_low,
            f_high,
            duration,
            sample_rate,
            start_p,
            start_q,
            rate_p,
            rate_q,
            duration_p: duration / 2.0,
            duration_q: duration / 2.0,
            phase: 0.0,
        })
    }

    pub fn sample_count(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    /// Instantaneous frequency at time `t` (s) within the symbol.
    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        if t < self.duration_p {
            self.start_p + self.rate_p * t
        } else {
            self.start_q + self.rate_q * (t - self.duration_p)
        }
    }

    pub fn synthesize(&self) -> ComplexWaveform {
        let n = self.sample_count();
        let split = (self.duration_p * self.sample_rate).round() as usize;
        let samples = (0..n)
            .map(|i| {
                let (f0, mu, t) = if i < split {
                    (self.start_p, self.rate_p, i as f64 / self.sample_rate)
                } else {
                    (
                        self.start_q,
                        self.rate_q,
                        (i - split) as f64 / self.sample_rate,
                    )
                };
                Complex64::from_polar(1.0, 2.0 * PI * (f0 * t + 0.5 * mu * t * t) + self.phase)
            })
            .collect();
        ComplexWaveform {
            samples,
            sample_rate: self.sample_rate,
        }
    }
}

/// The first `count` (≤ 5) chirp symbols of the quasi-orthogonal layout.
pub fn gen_chirp_set(
    f_low: f64,
    f_high: f64,
    duration: f64,
    sample_rate: f64,
    count: usize,
) -> Result<Vec<ComplexWaveform>> {
    if count == 0 || count > 5 {
        return Err(param(format!("chirp set size must be 1..=5, got {count}")));
    }
    (1..=count)
        .map(|k| {
            ChirpParams::layout(k, f_low, f_high, duration, sample_rate).map(|p| p.synthesize())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FL: f64 = 37e3;
    const FH: f64 = 45e3;
    const TC: f64 = 0.36e-3;
    const FS: f64 = 500e3;

    #[test]
    fn member1_and_member5_layout() {
        let p1 = ChirpParams::layout(1, FL, FH, TC, FS).unwrap();
        let mu = 8e3 / TC;
        assert_eq!(p1.start_p, 37e3);
        assert_eq!(p1.start_q, 39e3);
        assert!((p1.rate_p - mu / 2.0).abs() < 1e-6);
        assert!((p1.rate_q - 1.5 * mu).abs() < 1e-6);
        let p5 = ChirpParams::layout(5, FL, FH, TC, FS).unwrap();
        assert_eq!(p5.start_q, 41e3);
        assert!((p5.rate_p - mu).abs() < 1e-6 && (p5.rate_q - mu).abs() < 1e-6);
    }

    #[test]
    fn sample_count_is_180() {
        let set = gen_chirp_set(FL, FH, TC, FS, 5).unwrap();
        assert_eq!(set.len(), 5);
        assert!(set.iter().all(|w| w.len() == 180));
    }

    #[test]
    fn frequencies_stay_in_band() {
        for k in 1..=5 {
            let p = ChirpParams::layout(k, FL, FH, TC, FS).unwrap();
            for i in 0..=1000 {
                let t = TC * i as f64 / 1000.0 * 0.999_999;
                let f = p.instantaneous_frequency(t);
                assert!((FL - 1e-6..=FH + 1e-6).contains(&f), "k={k} t={t} f={f}");
            }
            assert!((p.duration_p + p.duration_q - TC).abs() < 1e-15);
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(gen_chirp_set(45e3, 37e3, TC, FS, 5).is_err());
        assert!(gen_chirp_set(FL, FH, 0.0, FS, 5).is_err());
        assert!(gen_chirp_set(FL, FH, TC, FS, 6).is_err());
        assert!(gen_chirp_set(-1.0, FH, TC, FS, 1).is_err());
    }
}
