use num_complex::Complex64;

use super::ComplexSequence;
use crate::dsp;
use crate::error::{param, Error, Result};
use crate::waveform::{check_rates, Waveform};

/// Magnitude correlation trace with its peak annotations.
///
/// `trace[i]` holds the lag `i - lag_origin` (in samples). For a matched
/// filter of a received signal against a pattern, lag `t` means the pattern
/// starts at received sample `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub trace: Vec<f64>,
    pub lag_origin: usize,
    pub sample_rate: f64,
    pub peak_index: usize,
    pub peak_value: f64,
    /// Unguarded sidelobe-to-mainlobe ratio around the peak (0 for a silent trace).
    pub smr: f64,
}

impl CorrelationResult {
    pub fn from_trace(trace: Vec<f64>, lag_origin: usize, sample_rate: f64) -> Self {
        let (peak_index, peak_value) = argmax(&trace);
        let smr = sidelobe_ratio(&trace, peak_index, 0).unwrap_or(0.0);
        Self {
            trace,
            lag_origin,
            sample_rate,
            peak_index,
            peak_value,
            smr,
        }
    }

    pub fn len(&self) -> usize {
        self.trace.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trace.is_empty()
    }

    /// Lag in samples of trace index `index`.
    pub fn lag(&self, index: usize) -> isize {
        index as isize - self.lag_origin as isize
    }

    pub fn lag_seconds(&self, index: usize) -> f64 {
        self.lag(index) as f64 / self.sample_rate
    }

    pub fn peak_lag(&self) -> isize {
        self.lag(self.peak_index)
    }

    /// Trace index of lag `lag`, if inside the trace.
    pub fn index_of_lag(&self, lag: isize) -> Option<usize> {
        let i = lag + self.lag_origin as isize;
        (i >= 0 && (i as usize) < self.trace.len()).then_some(i as usize)
    }

    /// Recomputes `smr` with a guard of `guard` samples around the peak.
    pub fn with_guard(mut self, guard: usize) -> Result<Self> {
        self.smr = sidelobe_ratio(&self.trace, self.peak_index, guard)?;
        Ok(self)
    }
}

/// First index of the maximum; `(0, 0.0)` for an empty slice.
pub(crate) fn argmax(trace: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in trace.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    if trace.is_empty() {
        (0, 0.0)
    } else {
        best
    }
}

/// `max |trace[n]|, |n − center| > guard` divided by `max |trace[n]|`.
///
/// With `guard = 0` and `center` at zero lag this is the classic aperiodic
/// SMR; a positive guard skips the modulation lobes around the mainlobe.
pub fn sidelobe_ratio(trace: &[f64], center: usize, guard: usize) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::Empty("correlation trace"));
    }
    let main = trace.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if main == 0.0 {
        return Err(Error::UndefinedRatio("all-zero correlation trace".into()));
    }
    let lo = center.saturating_sub(guard);
    let hi = center
        .saturating_add(guard)
        .saturating_add(1)
        .min(trace.len());
    let side = trace[..lo.min(trace.len())]
        .iter()
        .chain(&trace[hi..])
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(side / main)
}

/// Periodic correlation `R[t] = Σ_l a[l] · conj(b[(l + t) mod L])`.
pub fn periodic_correlation_values(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    if a.len() != b.len() {
        return Err(param("periodic correlation needs equal lengths"));
    }
    let n = a.len();
    Ok((0..n)
        .map(|t| (0..n).map(|l| a[l] * b[(l + t) % n].conj()).sum())
        .collect())
}

pub fn periodic_autocorrelation(seq: &ComplexSequence) -> Result<CorrelationResult> {
    let values = periodic_correlation_values(&seq.values, &seq.values)?;
    Ok(CorrelationResult::from_trace(
        values.iter().map(|v| v.norm()).collect(),
        0,
        1.0,
    ))
}

/// Complex aperiodic cross-correlation, lags `-(b.len()-1) ..= a.len()-1`.
pub fn aperiodic_correlation_values(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    Ok(dsp::xcorr_complex(a, b))
}

pub fn aperiodic_correlation(
    a: &ComplexSequence,
    b: &ComplexSequence,
) -> Result<CorrelationResult> {
    let values = aperiodic_correlation_values(&a.values, &b.values)?;
    Ok(CorrelationResult::from_trace(
        values.iter().map(|v| v.norm()).collect(),
        b.len() - 1,
        1.0,
    ))
}

/// Aperiodic cross-correlation of two real waveforms (magnitude trace).
pub fn waveform_correlation(a: &Waveform, b: &Waveform) -> Result<CorrelationResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("waveform"));
    }
    check_rates(a.sample_rate, b.sample_rate)?;
    let values = dsp::xcorr_real(&a.samples, &b.samples);
    Ok(CorrelationResult::from_trace(
        values.iter().map(|v| v.abs()).collect(),
        b.len() - 1,
        a.sample_rate,
    ))
}

/// Aperiodic autocorrelation SMR of `seq` with a guard of `guard` lags
/// around zero lag.
pub fn smr(seq: &ComplexSequence, guard: usize) -> Result<f64> {
    let corr = aperiodic_correlation(seq, seq)?;
    if 2 * guard >= corr.len() {
        return Err(param(format!(
            "guard {guard} must be below half the trace length {}",
            corr.len()
        )));
    }
    sidelobe_ratio(&corr.trace, corr.lag_origin, guard)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{gen_kasami_family, gen_zadoff_chu};
    use std::collections::BTreeSet;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn periodic_ac_of_zc_is_perfect() {
        let z = gen_zadoff_chu(257, 1).unwrap();
        let r = periodic_autocorrelation(&z).unwrap();
        assert!((r.trace[0] - 257.0).abs() < 1e-9);
        assert!(r.trace[1..].iter().all(|&v| v < 1e-9 * 257.0));
    }

    #[test]
    fn periodic_ac_of_all_ones() {
        let s = ComplexSequence::custom(vec![c(1.0); 4]);
        let r = periodic_autocorrelation(&s).unwrap();
        assert!(r.trace.iter().all(|&v| (v - 4.0).abs() < 1e-12));
    }

    #[test]
    fn kasami_member_off_peak_values() {
        let fam = gen_kasami_family(4).unwrap();
        for (k, m) in fam.iter().enumerate() {
            let s = m.to_complex(k as i64);
            let v = periodic_correlation_values(&s.values, &s.values).unwrap();
            let off: BTreeSet<i64> = v[1..].iter().map(|x| x.re.round() as i64).collect();
            assert!(off.is_subset(&[-1, -5, 3].into_iter().collect()), "{off:?}");
        }
    }

    #[test]
    fn aperiodic_zero_lag_is_length() {
        let z = gen_zadoff_chu(257, 1).unwrap();
        let r = aperiodic_correlation(&z, &z).unwrap();
        assert_eq!(r.len(), 2 * 257 - 1);
        assert_eq!(r.lag_origin, 256);
        assert!((r.trace[256] - 257.0).abs() < 1e-9);
        assert_eq!(r.peak_lag(), 0);
    }

    #[test]
    fn single_point() {
        let a = ComplexSequence::custom(vec![c(1.0)]);
        let r = aperiodic_correlation(&a, &a).unwrap();
        assert_eq!(r.trace, vec![1.0]);
    }

    #[test]
    fn waveform_rate_mismatch() {
        let a = Waveform::new(vec![1.0, 2.0], 10.0).unwrap();
        let b = Waveform::new(vec![1.0], 20.0).unwrap();
        assert!(matches!(
            waveform_correlation(&a, &b),
            Err(Error::SampleRateMismatch(..))
        ));
    }

    #[test]
    fn smr_cases() {
        // perfect periodic trace, guard 0
        let z = gen_zadoff_chu(67, 1).unwrap();
        let p = periodic_autocorrelation(&z).unwrap();
        assert!(sidelobe_ratio(&p.trace, 0, 0).unwrap() < 1e-12);
        // sidelobes entirely inside the guard
        assert_eq!(
            sidelobe_ratio(&[0.0, 0.0, 5.0, 0.0, 0.0], 2, 1).unwrap(),
            0.0
        );
        assert!(matches!(
            sidelobe_ratio(&[0.0; 5], 2, 0),
            Err(Error::UndefinedRatio(_))
        ));
        assert!(smr(&z, 200).is_err());
    }

    #[test]
    fn smr_never_below_edge_term() {
        // The lag L-1 sidelobe is a single unit-magnitude product, so the
        // aperiodic SMR of any unit-modulus sequence is at least 1/L.
        for len in [7usize, 11, 13, 31, 43] {
            for root in 1..len {
                let z = gen_zadoff_chu(len, root).unwrap();
                let s = smr(&z, 0).unwrap();
                assert!(s >= 1.0 / len as f64 - 1e-12);
            }
        }
    }
}
