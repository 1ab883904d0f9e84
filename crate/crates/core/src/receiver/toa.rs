use super::PeakDecision;
use crate::error::{Error, Result};

/// Minimum number of valid beacons for a 3D hyperbolic fix.
pub const MIN_VALID_BEACONS: usize = 4;

/// Arrival times of one measurement and their differences to a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ToaSet {
    /// Decision per beacon, indexed by beacon id.
    pub decisions: Vec<PeakDecision>,
    pub reference: usize,
    /// `(beacon id, toa_id − toa_ref)` for every valid non-reference beacon.
    pub dtoa: Vec<(usize, f64)>,
}

impl ToaSet {
    pub fn valid_count(&self) -> usize {
        self.decisions.iter().filter(|d| d.is_valid()).count()
    }

    /// Same measurement expressed against another valid reference beacon.
    pub fn rebased(&self, reference: usize) -> Result<Self> {
        let ok = self
            .decisions
            .get(reference)
            .is_some_and(PeakDecision::is_valid);
        if !ok {
            return Err(Error::Parameter(format!(
                "beacon {reference} is not a valid reference"
            )));
        }
        Ok(Self {
            decisions: self.decisions.clone(),
            reference,
            dtoa: differences(&self.decisions, reference),
        })
    }
}

fn differences(decisions: &[PeakDecision], reference: usize) -> Vec<(usize, f64)> {
    let t_ref = decisions[reference].toa.unwrap_or(0.0);
    decisions
        .iter()
        .enumerate()
        .filter(|&(i, d)| i != reference && d.is_valid())
        .filter_map(|(i, d)| d.toa.map(|t| (i, t - t_ref)))
        .collect()
}

/// Builds the DTOA vector from per-beacon decisions. The reference is the
/// valid beacon with the largest main peak.
pub fn extract_dtoa(decisions: &[PeakDecision]) -> Result<ToaSet> {
    let valid = decisions.iter().filter(|d| d.is_valid()).count();
    if valid < MIN_VALID_BEACONS {
        return Err(Error::InsufficientBeacons {
            valid,
            required: MIN_VALID_BEACONS,
        });
    }
    let reference = decisions
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_valid())
        .fold((usize::MAX, f64::NEG_INFINITY), |best, (i, d)| {
            if d.main_peak_value > best.1 {
                (i, d.main_peak_value)
            } else {
                best
            }
        })
        .0;
    Ok(ToaSet {
        decisions: decisions.to_vec(),
        reference,
        dtoa: differences(decisions, reference),
    })
}
