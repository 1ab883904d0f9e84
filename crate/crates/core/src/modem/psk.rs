use std::f64::consts::PI;

use crate::codes::{BinarySequence, ComplexSequence};
use crate::error::{param, Result};
use crate::waveform::{Scheme, Waveform};

/// Carrier layout shared by BPSK and QPSK.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PskParams {
    pub carrier: f64,
    /// Carrier cycles per code symbol `O_c`.
    pub cycles_per_symbol: usize,
    pub sample_rate: f64,
}

impl PskParams {
    /// Carrier at `sample_rate / oversampling`.
    pub fn from_oversampling(
        sample_rate: f64,
        oversampling: usize,
        cycles_per_symbol: usize,
    ) -> Self {
        Self {
            carrier: sample_rate / oversampling as f64,
            cycles_per_symbol,
            sample_rate,
        }
    }

    /// `O_f = fs / fc`; must be an integer.
    pub fn oversampling(&self) -> Result<usize> {
        if !(self.carrier > 0.0 && self.sample_rate > 0.0) {
            return Err(param("carrier and sample rate must be positive"));
        }
        let ratio = self.sample_rate / self.carrier;
        let rounded = ratio.round();
        if rounded < 2.0 || (ratio - rounded).abs() > 1e-9 * ratio {
            return Err(param(format!("fs / fc = {ratio} is not an integer >= 2")));
        }
        if self.cycles_per_symbol == 0 {
            return Err(param("at least one carrier cycle per symbol is required"));
        }
        Ok(rounded as usize)
    }

    pub fn symbol_len(&self) -> Result<usize> {
        Ok(self.oversampling()? * self.cycles_per_symbol)
    }
}

/// One symbol of the carrier pair: `(cos θ_n, sin θ_n)` with `θ_n = 2π n / O_f`.
fn carrier(p: &PskParams) -> Result<Vec<(f64, f64)>> {
    let of = p.oversampling()?;
    Ok((0..of * p.cycles_per_symbol)
        .map(|n| {
            let th = 2.0 * PI * n as f64 / of as f64;
            (th.cos(), th.sin())
        })
        .collect())
}

/// BPSK: each bit is `O_c` sine cycles with phase 0 (bit 0) or π (bit 1).
pub fn bpsk_modulate(code: &BinarySequence, p: &PskParams) -> Result<Waveform> {
    let car = carrier(p)?;
    let samples = code
        .bipolar()
        .into_iter()
        .flat_map(|b| car.iter().map(move |&(_, s)| b * s))
        .collect();
    Ok(Waveform::new(samples, p.sample_rate)?.tagged(Scheme::KasBpsk, 0))
}

/// QPSK: `Re(z)·Re(C) − Im(z)·Im(C)` with the complex carrier
/// `C[n] = cos θ_n − j sin θ_n`, i.e. `Re(z) cos θ_n + Im(z) sin θ_n`.
pub fn qpsk_modulate(code: &ComplexSequence, p: &PskParams) -> Result<Waveform> {
    let car = carrier(p)?;
    let samples = code
        .values
        .iter()
        .flat_map(|z| car.iter().map(move |&(c, s)| z.re * c - z.im * (-s)))
        .collect();
    Ok(Waveform::new(samples, p.sample_rate)?.tagged(Scheme::ZcQpsk, 0))
}
