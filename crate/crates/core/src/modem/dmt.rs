use num_complex::Complex64;

use crate::codes::ComplexSequence;
use crate::dsp;
use crate::error::{param, Result};
use crate::waveform::{Scheme, Waveform};

/// Bin layout of a DMT symbol.
///
/// The half spectrum holds `N = 1 + pad_low + code_len + pad_high` bins:
/// the DC bin, the low zero pad, the code, the high zero pad. The inverse
/// transform has `2N` points so that the Hermitian extension gives a real
/// output of `2N` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtParams {
    pub code_len: usize,
    pub pad_low: usize,
    pub pad_high: usize,
    pub sample_rate: f64,
    pub f_low: f64,
    pub f_high: f64,
}

impl DmtParams {
    /// Pad counts from the band edges:
    /// `pad_high = L (fs − 2 fh) / (2 (fh − fl))`,
    /// `pad_low = 2 fl (L + pad_high) / (fs − 2 fl)`, each rounded.
    pub fn new(code_len: usize, sample_rate: f64, f_low: f64, f_high: f64) -> Result<Self> {
        if code_len == 0 {
            return Err(param("DMT code length must be positive"));
        }
        if !(f_low > 0.0 && f_low < f_high && f_high < sample_rate / 2.0) {
            return Err(param(format!(
                "DMT band [{f_low}, {f_high}] Hz must satisfy 0 < fl < fh < fs/2 = {}",
                sample_rate / 2.0
            )));
        }
        let l = code_len as f64;
        let high = l * (sample_rate - 2.0 * f_high) / (2.0 * (f_high - f_low));
        let low = 2.0 * f_low * (l + high) / (sample_rate - 2.0 * f_low);
        Ok(Self {
            code_len,
            pad_low: low.round() as usize,
            pad_high: high.round() as usize,
            sample_rate,
            f_low,
            f_high,
        })
    }

    /// Half-spectrum size `N`.
    pub fn bins(&self) -> usize {
        1 + self.pad_low + self.code_len + self.pad_high
    }

    /// Output length `2N`.
    pub fn symbol_len(&self) -> usize {
        2 * self.bins()
    }

    pub fn first_code_bin(&self) -> usize {
        1 + self.pad_low
    }

    pub fn bin_frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.sample_rate / self.symbol_len() as f64
    }

    pub fn occupied_band(&self) -> (f64, f64) {
        let first = self.first_code_bin();
        (
            self.bin_frequency(first),
            self.bin_frequency(first + self.code_len - 1),
        )
    }

    /// Hermitian-extended `2N` spectrum carrying `code`.
    pub fn spectrum(&self, code: &ComplexSequence) -> Result<Vec<Complex64>> {
        if code.len() != self.code_len {
            return Err(param(format!(
                "code length {} does not match the DMT layout ({})",
                code.len(),
                self.code_len
            )));
        }
        let n = self.bins();
        let mut spec = vec![Complex64::new(0.0, 0.0); 2 * n];
        let first = self.first_code_bin();
        spec[first..first + self.code_len].copy_from_slice(&code.values);
        for l in 1..n {
            spec[2 * n - l] = spec[l].conj();
        }
        Ok(spec)
    }
}

/// Inverse transform `x[n] = (1/M) Σ_l S[l] e^{j2πnl/M}` of a full spectrum.
/// Returns the real part and the largest discarded imaginary magnitude.
pub fn dmt_synthesize(spectrum: &[Complex64]) -> (Vec<f64>, f64) {
    let m = spectrum.len();
    let (_, inv) = dsp::plan(m);
    let mut buf = spectrum.to_vec();
    inv.process(&mut buf);
    let scale = 1.0 / m as f64;
    let residue = buf.iter().fold(0.0_f64, |a, c| a.max((c.im * scale).abs()));
    (buf.iter().map(|c| c.re * scale).collect(), residue)
}

/// DMT (real-output OFDM) modulation of `code` into the `[f_low, f_high]` band.
pub fn dmt_modulate(
    code: &ComplexSequence,
    sample_rate: f64,
    f_low: f64,
    f_high: f64,
) -> Result<Waveform> {
    let p = DmtParams::new(code.len(), sample_rate, f_low, f_high)?;
    let (samples, _) = dmt_synthesize(&p.spectrum(code)?);
    Ok(Waveform::new(samples, sample_rate)?.tagged(Scheme::ZcOfdm, 0))
}
