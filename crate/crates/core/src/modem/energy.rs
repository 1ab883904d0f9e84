use crate::channel::FirModel;
use crate::error::{Error, Result};
use crate::waveform::{check_rates, Scheme, Waveform};

/// Mean-square value `Σ x² / N`.
pub fn signal_energy(w: &Waveform) -> f64 {
    if w.is_empty() {
        return 0.0;
    }
    w.samples.iter().map(|s| s * s).sum::<f64>() / w.len() as f64
}

/// Outcome of an energy equalisation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// `(scheme, beacon)` tags of the inputs, in order.
    pub labels: Vec<(Option<Scheme>, Option<usize>)>,
    /// Filtered mean-square energy of each unit-peak input.
    pub energies: Vec<f64>,
    /// `min(E) / E_k`.
    pub attenuation: Vec<f64>,
    /// Amplitude factor applied to the unit-peak input: `sqrt(AF_k)`.
    pub amplitude: Vec<f64>,
}

impl EnergyReport {
    pub fn attenuation_of(&self, scheme: Scheme, beacon: usize) -> Option<f64> {
        self.labels
            .iter()
            .position(|&l| l == (Some(scheme), Some(beacon)))
            .map(|i| self.attenuation[i])
    }
}

/// Filtered energy of `w` with the mean taken over the modulated length.
pub fn filtered_energy(w: &Waveform, fir: &FirModel) -> f64 {
    let y = fir.filter(&w.samples);
    y.iter().map(|s| s * s).sum::<f64>() / w.len() as f64
}

/// Peak-normalises every waveform, measures its energy after the transducer
/// model and scales it so all filtered energies match the weakest one.
///
/// `AF_k = min_j E_j / E_k` is an energy ratio, so the amplitude is scaled by
/// `sqrt(AF_k)`.
pub fn equalize_energy(
    waveforms: &[Waveform],
    fir: &FirModel,
) -> Result<(EnergyReport, Vec<Waveform>)> {
    if waveforms.is_empty() {
        return Err(Error::Empty("waveform set"));
    }
    let normalized: Vec<Waveform> = waveforms.iter().map(Waveform::peak_normalized).collect();
    let mut energies = Vec::with_capacity(waveforms.len());
    for w in &normalized {
        check_rates(w.sample_rate, fir.sample_rate)?;
        let e = filtered_energy(w, fir);
        if !(e > 0.0) {
            return Err(Error::UndefinedRatio("zero filtered energy".into()));
        }
        energies.push(e);
    }
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let attenuation: Vec<f64> = energies.iter().map(|e| min / e).collect();
    let amplitude: Vec<f64> = attenuation.iter().map(|a| a.sqrt()).collect();
    let scaled = normalized
        .iter()
        .zip(&amplitude)
        .map(|(w, a)| w.scaled(*a))
        .collect();
    let report = EnergyReport {
        labels: waveforms.iter().map(|w| (w.scheme, w.beacon_id)).collect(),
        energies,
        attenuation,
        amplitude,
    };
    Ok((report, scaled))
}
