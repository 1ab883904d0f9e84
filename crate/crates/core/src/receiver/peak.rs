use serde::{Deserialize, Serialize};

use crate::codes::CorrelationResult;
use crate::error::{param, Error, Result};

/// Window and threshold of the peak validation rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeakRule {
    /// Total validation window (s), centred on the main peak.
    pub window: f64,
    /// Fraction of the main peak a competing peak must exceed.
    pub threshold: f64,
    /// A local maximum only counts as a peak if it is the largest value
    /// within this distance (s). Zero accepts every local maximum, which
    /// lets the carrier ripple of a band-pass correlation count as peaks.
    pub min_separation: f64,
}

impl Default for PeakRule {
    fn default() -> Self {
        Self {
            window: 4e-3,
            threshold: 0.7,
            min_separation: 0.1e-3,
        }
    }
}

impl PeakRule {
    fn check(&self) -> Result<()> {
        if !(self.window > 0.0) {
            return Err(param("validation window must be positive"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(param("threshold must lie in (0, 1)"));
        }
        if !(self.min_separation >= 0.0) {
            return Err(param("peak separation must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeakStatus {
    Valid,
    Discarded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectReason {
    /// A peak outside the window exceeds the threshold.
    OutOfWindowPeak,
    /// The trace carries no energy.
    NoPeak,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakDecision {
    pub status: PeakStatus,
    /// Arrival time (s) when valid.
    pub toa: Option<f64>,
    pub main_peak_index: usize,
    pub main_peak_value: f64,
    pub chosen_peak_index: usize,
    pub chosen_peak_value: f64,
    pub reject_reason: Option<RejectReason>,
}

impl PeakDecision {
    pub fn is_valid(&self) -> bool {
        self.status == PeakStatus::Valid
    }

    fn discarded(main: usize, value: f64, reason: RejectReason) -> Self {
        Self {
            status: PeakStatus::Discarded,
            toa: None,
            main_peak_index: main,
            main_peak_value: value,
            chosen_peak_index: main,
            chosen_peak_value: value,
            reject_reason: Some(reason),
        }
    }
}

/// Indices of the peaks of `trace`: values strictly greater than the left
/// neighbour and at least as large as everything up to the next strictly
/// lower value (a plateau reports its first index). Edges count when they
/// exceed their single neighbour. With `separation > 0` a peak must also be
/// the largest value within `separation` samples on both sides, the earliest
/// one winning ties.
pub fn local_peaks(trace: &[f64], separation: usize) -> Vec<usize> {
    peaks_above(trace, separation, 0.0)
}

/// [`local_peaks`] restricted to values above `floor`.
fn peaks_above(trace: &[f64], separation: usize, floor: f64) -> Vec<usize> {
    let n = trace.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let v = trace[i];
        if v <= floor || (i > 0 && trace[i - 1] >= v) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && trace[j + 1] == v {
            j += 1;
        }
        let falls = j + 1 == n || trace[j + 1] < v;
        if falls && dominates(trace, i, separation) {
            out.push(i);
        }
        i = j + 1;
    }
    out
}

fn dominates(trace: &[f64], i: usize, separation: usize) -> bool {
    if separation == 0 {
        return true;
    }
    let v = trace[i];
    let lo = i.saturating_sub(separation);
    let hi = (i + separation).min(trace.len() - 1);
    trace[lo..i].iter().all(|&x| x < v) && trace[i + 1..=hi].iter().all(|&x| x <= v)
}

/// Window/threshold validation of a correlation trace.
///
/// The global maximum is the main peak. If any peak outside the window
/// exceeds `threshold` times the main peak the measurement is discarded;
/// otherwise the arrival time is the earliest in-window peak above that
/// level.
pub fn validate_peak(corr: &CorrelationResult, rule: &PeakRule) -> Result<PeakDecision> {
    rule.check()?;
    if corr.is_empty() {
        return Err(Error::Empty("correlation trace"));
    }
    let main = corr.peak_index;
    let main_value = corr.peak_value;
    if !(main_value > 0.0) {
        return Ok(PeakDecision::discarded(main, 0.0, RejectReason::NoPeak));
    }
    let half = (rule.window / 2.0 * corr.sample_rate).round() as usize;
    let sep = (rule.min_separation * corr.sample_rate).round() as usize;
    let level = rule.threshold * main_value;
    let in_window = |i: usize| i.abs_diff(main) <= half;

    let mut chosen = main;
    for p in peaks_above(&corr.trace, sep, level) {
        if !in_window(p) {
            return Ok(PeakDecision::discarded(
                main,
                main_value,
                RejectReason::OutOfWindowPeak,
            ));
        }
        chosen = chosen.min(p);
    }
    Ok(PeakDecision {
        status: PeakStatus::Valid,
        toa: Some(corr.lag_seconds(chosen)),
        main_peak_index: main,
        main_peak_value: main_value,
        chosen_peak_index: chosen,
        chosen_peak_value: corr.trace[chosen],
        reject_reason: None,
    })
}
