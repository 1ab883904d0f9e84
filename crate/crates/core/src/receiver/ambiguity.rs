use rayon::prelude::*;

use crate::channel::{doppler_resample, DopplerSpec, Environment, FirModel};
use crate::dsp::PatternCorrelator;
use crate::error::{param, Result};
use crate::waveform::{check_rates, Waveform};

/// Correlation magnitude as a function of receiver speed and lag.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySurface {
    /// Radial receiver speeds (m/s, positive towards the emitter).
    pub speeds: Vec<f64>,
    /// Lag of each column (s).
    pub lags: Vec<f64>,
    /// `magnitude[i][j]` at `speeds[i]`, `lags[j]`, relative to the static peak.
    pub magnitude: Vec<Vec<f64>>,
}

impl AmbiguitySurface {
    /// `(lag seconds, magnitude)` of the maximum of every row.
    pub fn row_peaks(&self) -> Vec<(f64, f64)> {
        self.magnitude
            .iter()
            .map(|row| {
                let (j, v) = crate::codes::argmax(row);
                (self.lags[j], v)
            })
            .collect()
    }
}

/// Sweeps the filtered `pattern` through a radial Doppler shift for each
/// speed and correlates it with the clean pattern over lags
/// `−max_lag..=max_lag` samples.
pub fn ambiguity_surface(
    pattern: &Waveform,
    fir: &FirModel,
    speeds: &[f64],
    env: &Environment,
    max_lag: usize,
) -> Result<AmbiguitySurface> {
    if pattern.is_empty() {
        return Err(param("empty pattern"));
    }
    if speeds.iter().any(|v| !v.is_finite()) {
        return Err(param("speed grid must be finite"));
    }
    check_rates(pattern.sample_rate, fir.sample_rate)?;
    let c = env.sound_speed()?;
    let fs = pattern.sample_rate;
    let filtered = pattern.with_samples(fir.filter(&pattern.samples));
    let longest = speeds
        .iter()
        .chain(std::iter::once(&0.0))
        .map(|&v| DopplerSpec::radial(v, c, fs).virtual_rate().map(|r| fs / r))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(1.0_f64, f64::max);
    let max_len = (filtered.len() as f64 * longest).ceil() as usize + 2;
    let corr = PatternCorrelator::new(&pattern.samples, max_len);
    let origin = pattern.len() - 1;

    let row = |v: f64| -> Result<Vec<f64>> {
        let y = doppler_resample(&filtered, &DopplerSpec::radial(v, c, fs))?;
        let t = corr.correlate(&y.samples);
        Ok((-(max_lag as isize)..=max_lag as isize)
            .map(|lag| {
                let i = origin as isize + lag;
                if i >= 0 && (i as usize) < t.len() {
                    t[i as usize].abs()
                } else {
                    0.0
                }
            })
            .collect())
    };
    let reference = row(0.0)?.into_iter().fold(0.0_f64, f64::max);
    if !(reference > 0.0) {
        return Err(param("pattern has no energy inside the transducer band"));
    }
    let magnitude = speeds
        .par_iter()
        .map(|&v| row(v).map(|r| r.into_iter().map(|x| x / reference).collect()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let lags = (-(max_lag as isize)..=max_lag as isize)
        .map(|l| l as f64 / fs)
        .collect();
    Ok(AmbiguitySurface {
        speeds: speeds.to_vec(),
        lags,
        magnitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FirDesign;
    use crate::modem::SchemeParams;
    use crate::Scheme;

    fn surface(s: Scheme, speeds: &[f64]) -> AmbiguitySurface {
        let p = SchemeParams::default();
        let pat = &p.patterns(s).unwrap()[0];
        let fir = FirDesign::default().build(500e3).unwrap();
        ambiguity_surface(pat, &fir, speeds, &Environment::default(), 600).unwrap()
    }

    #[test]
    fn static_row_is_normalized_correlation() {
        let a = surface(Scheme::ZcQpsk, &[0.0]);
        let (lag, v) = a.row_peaks()[0];
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(lag, 0.0);
        assert!(a.magnitude[0].iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn bpsk_fades_while_qpsk_drifts() {
        let bpsk = surface(Scheme::KasBpsk, &[0.0, 2.0]).row_peaks();
        let qpsk = surface(Scheme::ZcQpsk, &[0.0, 2.0]).row_peaks();
        assert!(bpsk[1].1 < 0.5 * qpsk[1].1, "{bpsk:?} {qpsk:?}");
        assert!(qpsk[1].1 > 0.5);
        // about 250 samples of drift at 2 m/s
        assert!(
            qpsk[1].0 > 200.0 / 500e3 && qpsk[1].0 < 300.0 / 500e3,
            "{qpsk:?}"
        );
    }

    #[test]
    fn sign_flip_mirrors_the_drift() {
        let a = surface(Scheme::ZcQpsk, &[1.5, -1.5]).row_peaks();
        assert!((a[0].1 - a[1].1).abs() < 0.05 * a[0].1, "{a:?}");
        assert!((a[0].0 + a[1].0).abs() <= 13.0 / 500e3, "{a:?}");
    }
}
