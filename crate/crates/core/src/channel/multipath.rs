use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// One propagation path: delay relative to the direct arrival (or absolute
/// TOA when building a geometric emission) and amplitude factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub delay: f64,
    pub attenuation: f64,
    pub beacon_id: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathList {
    pub paths: Vec<Path>,
}

impl PathList {
    pub fn direct(beacon_id: usize) -> Self {
        Self::single(0.0, 1.0, beacon_id)
    }

    pub fn single(delay: f64, attenuation: f64, beacon_id: usize) -> Self {
        Self {
            paths: vec![Path {
                delay,
                attenuation,
                beacon_id,
            }],
        }
    }

    pub fn push(&mut self, delay: f64, attenuation: f64, beacon_id: usize) {
        self.paths.push(Path {
            delay,
            attenuation,
            beacon_id,
        });
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Every path shifted by `offset` seconds and scaled by `gain`.
    pub fn shifted(&self, offset: f64, gain: f64) -> Self {
        Self {
            paths: self
                .paths
                .iter()
                .map(|p| Path {
                    delay: p.delay + offset,
                    attenuation: p.attenuation * gain,
                    beacon_id: p.beacon_id,
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.paths {
            if !(p.delay >= 0.0 && p.delay.is_finite()) {
                return Err(param(format!("path delay {} s must be >= 0", p.delay)));
            }
            if !(0.0..=1.0).contains(&p.attenuation) {
                return Err(param(format!(
                    "path attenuation {} outside [0, 1]",
                    p.attenuation
                )));
            }
        }
        Ok(())
    }
}

/// Exponentially decaying reflection profile `A(d) = a0 · exp(−(d − d_min)/τ)`
/// with delays uniform in `[d_min, d_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MultipathProfile {
    pub delay_min: f64,
    pub delay_max: f64,
    pub a0: f64,
    pub tau: f64,
}

impl Default for MultipathProfile {
    fn default() -> Self {
        Self {
            delay_min: 0.4e-3,
            delay_max: 2.0e-3,
            a0: 0.5,
            tau: 0.7e-3,
        }
    }
}

impl MultipathProfile {
    pub fn attenuation(&self, delay: f64) -> f64 {
        self.a0 * (-(delay - self.delay_min) / self.tau).exp()
    }
}

/// Direct path plus `count` random reflections for `beacon_id`.
pub fn sample_multipath<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    profile: &MultipathProfile,
    beacon_id: usize,
) -> Result<PathList> {
    if !(profile.delay_min >= 0.0 && profile.delay_max >= profile.delay_min) {
        return Err(param(format!(
            "multipath delay range [{}, {}] is inverted or negative",
            profile.delay_min, profile.delay_max
        )));
    }
    if !(profile.tau > 0.0 && (0.0..=1.0).contains(&profile.a0)) {
        return Err(param("multipath profile needs tau > 0 and a0 in [0, 1]"));
    }
    let mut list = PathList::direct(beacon_id);
    for _ in 0..count {
        let d = if profile.delay_max > profile.delay_min {
            rng.gen_range(profile.delay_min..=profile.delay_max)
        } else {
            profile.delay_min
        };
        list.push(d, profile.attenuation(d), beacon_id);
    }
    Ok(list)
}
