use serde::{Deserialize, Serialize};

use super::{bpsk_modulate, dmt_modulate, ocdm_modulate, qpsk_modulate, PskParams};
use crate::codes::{
    default_primitive_taps, gen_chirp_set, gen_kasami_family_with, gen_zadoff_chu, BinarySequence,
    ComplexSequence,
};
use crate::error::{param, Result};
use crate::waveform::{Scheme, Waveform};

/// Waveform-design parameters of the four schemes. Defaults are the
/// five-beacon, 500 kHz configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeParams {
    pub sample_rate: f64,
    pub f_low: f64,
    pub f_high: f64,
    pub beacons: usize,
    pub kasami_degree: u32,
    /// Feedback taps of the m-sequence generator; `None` picks the built-in
    /// primitive polynomial for the degree.
    pub kasami_taps: Option<u32>,
    pub kasami_seed: u32,
    pub psk_oversampling: usize,
    pub psk_cycles: usize,
    pub qpsk_len: usize,
    pub qpsk_roots: Vec<usize>,
    pub ofdm_len: usize,
    pub ofdm_roots: Vec<usize>,
    pub chirp_len: usize,
    pub chirp_roots: Vec<usize>,
    pub chirp_duration: f64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            sample_rate: 500e3,
            f_low: 37e3,
            f_high: 45e3,
            beacons: 5,
            kasami_degree: 8,
            kasami_taps: None,
            kasami_seed: 1,
            psk_oversampling: 12,
            psk_cycles: 4,
            qpsk_len: 257,
            qpsk_roots: vec![1, 256, 129, 128, 86],
            ofdm_len: 191,
            ofdm_roots: vec![1, 2, 190, 189, 3],
            chirp_len: 67,
            chirp_roots: vec![1, 66, 34, 33, 22],
            chirp_duration: 0.36e-3,
        }
    }
}

impl SchemeParams {
    pub fn psk(&self) -> PskParams {
        PskParams::from_oversampling(self.sample_rate, self.psk_oversampling, self.psk_cycles)
    }

    /// Default matched-filter guard (samples) for sidelobe ratios: one
    /// modulated symbol for PSK, one chirp symbol for OCDM, and the PSK
    /// symbol length for DMT.
    pub fn guard(&self, scheme: Scheme) -> usize {
        match scheme {
            Scheme::KasBpsk | Scheme::ZcQpsk | Scheme::ZcOfdm => {
                self.psk_oversampling * self.psk_cycles
            }
            Scheme::ZcChirp => (self.chirp_duration * self.sample_rate).round() as usize,
        }
    }

    fn roots(&self, scheme: Scheme) -> &[usize] {
        match scheme {
            Scheme::KasBpsk => &[],
            Scheme::ZcQpsk => &self.qpsk_roots,
            Scheme::ZcOfdm => &self.ofdm_roots,
            Scheme::ZcChirp => &self.chirp_roots,
        }
    }

    fn kasami_codes(&self) -> Result<Vec<BinarySequence>> {
        let taps = match self.kasami_taps {
            Some(t) => t,
            None => default_primitive_taps(self.kasami_degree).ok_or_else(|| {
                param(format!(
                    "no built-in polynomial for degree {}",
                    self.kasami_degree
                ))
            })?,
        };
        let mut family = gen_kasami_family_with(self.kasami_degree, taps, self.kasami_seed)?;
        if family.len() < self.beacons {
            return Err(param("Kasami family smaller than the beacon count"));
        }
        family.truncate(self.beacons);
        Ok(family)
    }

    /// Code of every beacon of `scheme` before modulation; Kasami codes
    /// appear in antipodal form.
    pub fn sequences(&self, scheme: Scheme) -> Result<Vec<ComplexSequence>> {
        self.check_roots(scheme)?;
        match scheme {
            Scheme::KasBpsk => Ok(self
                .kasami_codes()?
                .iter()
                .enumerate()
                .map(|(k, c)| c.to_complex(k as i64))
                .collect()),
            Scheme::ZcQpsk => self.zc_codes(&self.qpsk_roots, self.qpsk_len),
            Scheme::ZcOfdm => self.zc_codes(&self.ofdm_roots, self.ofdm_len),
            Scheme::ZcChirp => self.zc_codes(&self.chirp_roots, self.chirp_len),
        }
    }

    fn zc_codes(&self, roots: &[usize], len: usize) -> Result<Vec<ComplexSequence>> {
        roots[..self.beacons]
            .iter()
            .map(|&r| gen_zadoff_chu(len, r))
            .collect()
    }

    fn check_roots(&self, scheme: Scheme) -> Result<()> {
        if self.beacons == 0 {
            return Err(param("at least one beacon is required"));
        }
        if scheme != Scheme::KasBpsk && self.roots(scheme).len() < self.beacons {
            return Err(param(format!(
                "{scheme} needs {} roots, {} configured",
                self.beacons,
                self.roots(scheme).len()
            )));
        }
        Ok(())
    }

    /// Unscaled transmit patterns of `scheme`, one per beacon (ids from 0).
    pub fn patterns(&self, scheme: Scheme) -> Result<Vec<Waveform>> {
        self.check_roots(scheme)?;
        let out: Vec<Waveform> = match scheme {
            Scheme::KasBpsk => {
                let p = self.psk();
                self.kasami_codes()?
                    .iter()
                    .map(|c| bpsk_modulate(c, &p))
                    .collect::<Result<_>>()?
            }
            Scheme::ZcQpsk => {
                let p = self.psk();
                self.qpsk_roots[..self.beacons]
                    .iter()
                    .map(|&r| qpsk_modulate(&gen_zadoff_chu(self.qpsk_len, r)?, &p))
                    .collect::<Result<_>>()?
            }
            Scheme::ZcOfdm => self.ofdm_roots[..self.beacons]
                .iter()
                .map(|&r| {
                    dmt_modulate(
                        &gen_zadoff_chu(self.ofdm_len, r)?,
                        self.sample_rate,
                        self.f_low,
                        self.f_high,
                    )
                })
                .collect::<Result<_>>()?,
            Scheme::ZcChirp => {
                if self.beacons > 5 {
                    return Err(param("the chirp layout supports at most five beacons"));
                }
                let chirps = gen_chirp_set(
                    self.f_low,
                    self.f_high,
                    self.chirp_duration,
                    self.sample_rate,
                    self.beacons,
                )?;
                self.chirp_roots[..self.beacons]
                    .iter()
                    .zip(&chirps)
                    .map(|(&r, ch)| ocdm_modulate(&gen_zadoff_chu(self.chirp_len, r)?, ch))
                    .collect::<Result<_>>()?
            }
        };
        Ok(out
            .into_iter()
            .enumerate()
            .map(|(k, w)| w.tagged(scheme, k))
            .collect())
    }
}

/// Energy-equalised transmit patterns of several schemes.
#[derive(Debug, Clone)]
pub struct SchemeSet {
    pub params: SchemeParams,
    pub schemes: Vec<Scheme>,
    /// `patterns[i][k]`: scheme `schemes[i]`, beacon `k`.
    pub patterns: Vec<Vec<Waveform>>,
    pub report: super::EnergyReport,
}

impl SchemeSet {
    /// Builds every beacon pattern of `schemes` and equalises all of them
    /// jointly through `fir`.
    pub fn build(
        params: &SchemeParams,
        schemes: &[Scheme],
        fir: &crate::channel::FirModel,
    ) -> Result<Self> {
        let mut flat = Vec::new();
        for &s in schemes {
            flat.extend(params.patterns(s)?);
        }
        let (report, scaled) = super::equalize_energy(&flat, fir)?;
        let per = params.beacons;
        let patterns = scaled.chunks(per).map(|c| c.to_vec()).collect();
        Ok(Self {
            params: params.clone(),
            schemes: schemes.to_vec(),
            patterns,
            report,
        })
    }

    pub fn patterns_of(&self, scheme: Scheme) -> Option<&[Waveform]> {
        self.schemes
            .iter()
            .position(|&s| s == scheme)
            .map(|i| self.patterns[i].as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_durations() {
        let p = SchemeParams::default();
        let expect = [
            (Scheme::KasBpsk, 12_240),
            (Scheme::ZcQpsk, 12_336),
            (Scheme::ZcOfdm, 11_938),
            (Scheme::ZcChirp, 12_060),
        ];
        for (s, n) in expect {
            let pats = p.patterns(s).unwrap();
            assert_eq!(pats.len(), 5);
            for (k, w) in pats.iter().enumerate() {
                assert_eq!(w.len(), n, "{s}");
                assert_eq!(w.scheme, Some(s));
                assert_eq!(w.beacon_id, Some(k));
            }
        }
    }

    #[test]
    fn missing_roots_rejected() {
        let p = SchemeParams {
            qpsk_roots: vec![1, 2],
            ..Default::default()
        };
        assert!(p.patterns(Scheme::ZcQpsk).is_err());
    }
}
