//! Matched-filter detection, peak validation and arrival-time extraction.

mod ambiguity;
mod peak;
mod toa;

pub use ambiguity::{ambiguity_surface, AmbiguitySurface};
pub use peak::{local_peaks, validate_peak, PeakDecision, PeakRule, PeakStatus, RejectReason};
pub use toa::{extract_dtoa, ToaSet};

use crate::codes::{sidelobe_ratio, waveform_correlation, CorrelationResult};
use crate::error::Result;
use crate::waveform::Waveform;

/// Correlates `received` against `pattern`. Lag `t` of the result means the
/// pattern starts at received sample `t`.
pub fn matched_filter(received: &Waveform, pattern: &Waveform) -> Result<CorrelationResult> {
    waveform_correlation(received, pattern)
}

/// Sidelobe-to-mainlobe ratio of a receiver trace with `guard` samples
/// excluded on each side of the detected peak.
pub fn guarded_smr(corr: &CorrelationResult, guard: usize) -> Result<f64> {
    sidelobe_ratio(&corr.trace, corr.peak_index, guard)
}
