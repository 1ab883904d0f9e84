//! Spreading-code families and their correlation properties.
//!
//! Binary codes come from a Fibonacci LFSR (m-sequences) combined into the
//! small Kasami set. Polyphase codes are Zadoff-Chu sequences. The chirp
//! family produces the five two-segment complex chirps used as OCDM symbols.

mod chirp;
mod correlation;
mod kasami;
mod lfsr;
mod zadoff_chu;

pub use chirp::{gen_chirp_set, ChirpParams};
pub(crate) use correlation::argmax;
pub use correlation::{
    aperiodic_correlation, aperiodic_correlation_values, periodic_autocorrelation,
    periodic_correlation_values, sidelobe_ratio, smr, waveform_correlation, CorrelationResult,
};
pub use kasami::{default_primitive_taps, gen_kasami_family, gen_kasami_family_with};
pub use lfsr::gen_m_sequence;
pub use zadoff_chu::gen_zadoff_chu;

use num_complex::Complex64;

/// A sequence over {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySequence {
    pub bits: Vec<u8>,
}

impl BinarySequence {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Antipodal form: 0 → +1, 1 → −1.
    pub fn bipolar(&self) -> Vec<f64> {
        self.bits
            .iter()
            .map(|&b| if b == 0 { 1.0 } else { -1.0 })
            .collect()
    }

    /// Antipodal form lifted to a complex sequence.
    pub fn to_complex(&self, index: i64) -> ComplexSequence {
        ComplexSequence {
            values: self
                .bipolar()
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
            family: SequenceFamily::Kasami,
            index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceFamily {
    ZadoffChu,
    Kasami,
    Custom,
}

/// A complex code: unit-amplitude ZC values or a lifted ±1 binary code.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence {
    pub values: Vec<Complex64>,
    pub family: SequenceFamily,
    /// ZC root, or member index for binary families.
    pub index: i64,
}

impl ComplexSequence {
    pub fn custom(values: Vec<Complex64>) -> Self {
        Self {
            values,
            family: SequenceFamily::Custom,
            index: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}
