use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dsp;
use crate::error::{param, Error, Result};

/// Centre of the transducer passband (Hz).
pub const TRANSDUCER_CENTER_HZ: f64 = 41_670.0;
/// Stopband limits used when validating a design (Hz).
const STOPBAND_LOW_HZ: f64 = 30_000.0;
const STOPBAND_HIGH_HZ: f64 = 55_000.0;
const MIN_REJECTION_DB: f64 = 30.0;
/// Kaiser window shape for roughly 60 dB sidelobes.
const KAISER_BETA: f64 = 5.65;

/// Linear-phase FIR standing in for the ultrasonic transducer response.
///
/// Filtering compensates the group delay so that a pattern passed through
/// the model stays aligned with the unfiltered original.
#[derive(Debug, Clone, PartialEq)]
pub struct FirModel {
    pub taps: Vec<f64>,
    pub sample_rate: f64,
    /// Design band edges (Hz); `None` for externally loaded taps.
    pub band: Option<(f64, f64)>,
}

impl FirModel {
    pub fn from_taps(taps: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Empty("FIR taps"));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(param("FIR taps must be finite"));
        }
        if !(sample_rate > 0.0) {
            return Err(param("FIR sample rate must be positive"));
        }
        Ok(Self {
            taps,
            sample_rate,
            band: None,
        })
    }

    /// A single unit tap: filtering is the identity.
    pub fn identity(sample_rate: f64) -> Self {
        Self {
            taps: vec![1.0],
            sample_rate,
            band: None,
        }
    }

    pub fn order(&self) -> usize {
        self.taps.len() - 1
    }

    /// Group delay in samples (exact for symmetric taps).
    pub fn delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }

    pub fn response(&self, freq: f64) -> Complex64 {
        let w = 2.0 * PI * freq / self.sample_rate;
        self.taps
            .iter()
            .enumerate()
            .map(|(n, &h)| Complex64::from_polar(h, -w * n as f64))
            .sum()
    }

    pub fn gain(&self, freq: f64) -> f64 {
        self.response(freq).norm()
    }

    pub fn gain_db(&self, freq: f64) -> f64 {
        20.0 * self.gain(freq).max(1e-300).log10()
    }

    /// Peak gain and its frequency over a 50 Hz grid up to Nyquist.
    pub fn peak(&self) -> (f64, f64) {
        let steps = (self.sample_rate / 2.0 / 50.0) as usize;
        (0..=steps)
            .map(|i| {
                let f = i as f64 * 50.0;
                (f, self.gain(f))
            })
            .fold((0.0, 0.0), |best, c| if c.1 > best.1 { c } else { best })
    }

    /// Worst stopband gain relative to the peak (dB, negative) outside
    /// `[low, high]`.
    pub fn stopband_rejection_db(&self, low: f64, high: f64) -> f64 {
        let (_, peak) = self.peak();
        let steps = (self.sample_rate / 2.0 / 50.0) as usize;
        let worst = (0..=steps)
            .map(|i| i as f64 * 50.0)
            .filter(|&f| f <= low || f >= high)
            .map(|f| self.gain(f))
            .fold(0.0_f64, f64::max);
        20.0 * (worst / peak).max(1e-300).log10()
    }

    /// Convolves and removes the group delay: output sample `n` is full
    /// convolution sample `n + delay`, covering the input span plus the
    /// trailing filter tail.
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        if x.is_empty() {
            return Vec::new();
        }
        let full = dsp::convolve(x, &self.taps);
        full[self.delay()..].to_vec()
    }
}

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half = x / 2.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

pub(crate) fn kaiser(n: usize, len: usize, beta: f64) -> f64 {
    if len == 1 {
        return 1.0;
    }
    let r = 2.0 * n as f64 / (len - 1) as f64 - 1.0;
    bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / bessel_i0(beta)
}

pub(crate) fn kaiser_beta_window(x: f64, half_width: f64, beta: f64) -> f64 {
    let r = x / half_width;
    if r.abs() >= 1.0 {
        0.0
    } else {
        bessel_i0(beta * (1.0 - r * r).sqrt()) / bessel_i0(beta)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Parameters of the default transducer design.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct FirDesign {
    pub f_low: f64,
    pub f_high: f64,
    pub taps: usize,
}

impl Default for FirDesign {
    fn default() -> Self {
        Self {
            f_low: 34_000.0,
            f_high: 49_000.0,
            taps: 201,
        }
    }
}

impl FirDesign {
    pub fn build(&self, sample_rate: f64) -> Result<FirModel> {
        design_transducer_fir(self.f_low, self.f_high, sample_rate, self.taps)
    }
}

/// Kaiser-windowed band-pass design with `taps` coefficients (odd counts
/// give an integer group delay).
///
/// `f_low`/`f_high` are the −6 dB cut-offs of the ideal response. The result
/// is scaled to unit gain at 41.67 kHz and checked against the transducer
/// envelope: the centre within 3 dB of the passband peak and at least 30 dB
/// rejection outside 30–55 kHz.
pub fn design_transducer_fir(
    f_low: f64,
    f_high: f64,
    sample_rate: f64,
    taps: usize,
) -> Result<FirModel> {
    if !(f_low > 0.0 && f_high > f_low && f_high < sample_rate / 2.0) {
        return Err(param(format!(
            "band [{f_low}, {f_high}] Hz must lie inside (0, {})",
            sample_rate / 2.0
        )));
    }
    if taps < 3 {
        return Err(Error::Design(format!(
            "{taps} taps cannot form a band-pass filter"
        )));
    }
    let center = (taps - 1) as f64 / 2.0;
    let a = f_low / sample_rate;
    let b = f_high / sample_rate;
    let mut h: Vec<f64> = (0..taps)
        .map(|n| {
            let m = n as f64 - center;
            let ideal = 2.0 * b * sinc(2.0 * b * m) - 2.0 * a * sinc(2.0 * a * m);
            ideal * kaiser(n, taps, KAISER_BETA)
        })
        .collect();
    let mut model = FirModel {
        taps: h.clone(),
        sample_rate,
        band: Some((f_low, f_high)),
    };
    let g = model.gain(TRANSDUCER_CENTER_HZ);
    if g <= 0.0 {
        return Err(Error::Design("zero gain at the transducer centre".into()));
    }
    h.iter_mut().for_each(|v| *v /= g);
    model.taps = h;

    let (_, peak) = model.peak();
    let center_db = 20.0 * (model.gain(TRANSDUCER_CENTER_HZ) / peak).log10();
    if center_db < -3.0 {
        return Err(Error::Design(format!(
            "gain at 41.67 kHz is {center_db:.1} dB below the passband peak"
        )));
    }
    let rejection = model.stopband_rejection_db(STOPBAND_LOW_HZ, STOPBAND_HIGH_HZ);
    if rejection > -MIN_REJECTION_DB {
        return Err(Error::Design(format!(
            "stopband rejection only {:.1} dB with {taps} taps (need {MIN_REJECTION_DB} dB)",
            -rejection
        )));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> FirModel {
        FirDesign::default().build(500e3).unwrap()
    }

    #[test]
    fn centre_and_dc() {
        let m = model();
        let (_, peak) = m.peak();
        assert!(20.0 * (m.gain(41_670.0) / peak).log10() > -3.0);
        assert!(20.0 * (m.gain(0.0) / peak).log10() <= -30.0);
        assert!(m.stopband_rejection_db(30e3, 55e3) <= -30.0);
    }

    #[test]
    fn three_db_band_covers_37_to_46() {
        let m = model();
        let (_, peak) = m.peak();
        for f in [37_000.0, 41_670.0, 46_000.0] {
            assert!(m.gain(f) / peak > 0.5_f64.sqrt(), "f={f}");
        }
    }

    #[test]
    fn tone_transmission() {
        let m = model();
        let fs = 500e3;
        let n = 20_000;
        let tone = |f: f64| -> Vec<f64> {
            (0..n)
                .map(|i| (2.0 * PI * f * i as f64 / fs).sin())
                .collect()
        };
        let amp = |x: &[f64]| x[5000..15000].iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let pass = m.filter(&tone(41_670.0));
        let stop = m.filter(&tone(10_000.0));
        assert!(amp(&pass) >= 0.7);
        assert!(amp(&stop) <= 0.03);
    }

    #[test]
    fn filter_is_delay_compensated() {
        let m = model();
        let mut x = vec![0.0; 600];
        x[300] = 1.0;
        let y = m.filter(&x);
        // impulse response centred on the impulse
        let (imax, _) =
            y.iter().enumerate().fold(
                (0, 0.0),
                |b, (i, &v)| if v.abs() > b.1 { (i, v.abs()) } else { b },
            );
        assert_eq!(imax, 300);
        assert_eq!(y.len(), 600 + m.delay());
    }

    #[test]
    fn too_short_design_is_rejected() {
        match design_transducer_fir(36_500.0, 46_500.0, 500e3, 31) {
            Err(Error::Design(msg)) => assert!(msg.contains("rejection") || msg.contains("dB")),
            other => panic!("expected design error, got {other:?}"),
        }
        assert!(design_transducer_fir(37e3, 300e3, 500e3, 255).is_err());
    }
}
