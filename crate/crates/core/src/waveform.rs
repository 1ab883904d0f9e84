//! Sampled signal containers.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// The four encoding/modulation schemes under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scheme {
    KasBpsk,
    ZcQpsk,
    ZcOfdm,
    ZcChirp,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::KasBpsk,
        Scheme::ZcQpsk,
        Scheme::ZcOfdm,
        Scheme::ZcChirp,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::KasBpsk => "Kas-BPSK",
            Scheme::ZcQpsk => "ZC-QPSK",
            Scheme::ZcOfdm => "ZC-OFDM",
            Scheme::ZcChirp => "ZC-Chirp",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl TryFrom<String> for Scheme {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Scheme> for String {
    fn from(s: Scheme) -> String {
        s.label().to_string()
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "kasbpsk" | "bpsk" | "kasami" => Ok(Scheme::KasBpsk),
            "zcqpsk" | "qpsk" => Ok(Scheme::ZcQpsk),
            "zcofdm" | "ofdm" | "dmt" | "zcdmt" => Ok(Scheme::ZcOfdm),
            "zcchirp" | "chirp" | "ocdm" | "zcocdm" => Ok(Scheme::ZcChirp),
            _ => Err(param(format!("unknown scheme '{s}'"))),
        }
    }
}

/// A real-valued sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    pub scheme: Option<Scheme>,
    pub beacon_id: Option<usize>,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(param(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(param("waveform contains non-finite samples"));
        }
        Ok(Self {
            samples,
            sample_rate,
            scheme: None,
            beacon_id: None,
        })
    }

    pub fn tagged(mut self, scheme: Scheme, beacon_id: usize) -> Self {
        self.scheme = Some(scheme);
        self.beacon_id = Some(beacon_id);
        self
    }

    /// Same metadata, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Self {
        Self {
            samples,
            sample_rate: self.sample_rate,
            scheme: self.scheme,
            beacon_id: self.beacon_id,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.with_samples(self.samples.iter().map(|s| s * factor).collect())
    }

    /// Scales to unit peak amplitude. A silent waveform is returned unchanged.
    pub fn peak_normalized(&self) -> Self {
        let p = self.peak();
        if p > 0.0 {
            self.scaled(1.0 / p)
        } else {
            self.clone()
        }
    }
}

/// A complex-valued sampled signal (chirp symbols).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexWaveform {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
}

impl ComplexWaveform {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn real_part(&self) -> Waveform {
        Waveform {
            samples: self.samples.iter().map(|c| c.re).collect(),
            sample_rate: self.sample_rate,
            scheme: None,
            beacon_id: None,
        }
    }
}

pub(crate) fn check_rates(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
        Err(Error::SampleRateMismatch(a, b))
    } else {
        Ok(())
    }
}
