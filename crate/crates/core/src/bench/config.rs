use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{Environment, FirModel, MultipathProfile};
use crate::error::{param, Error, Result};
use crate::locate::{BeaconArray, Point, SolverOptions};
use crate::modem::SchemeParams;
use crate::receiver::PeakRule;
use crate::waveform::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Effect {
    Noise,
    #[serde(alias = "near-far", alias = "near_far")]
    NearFar,
    Multipath,
    Doppler,
    Positioning,
}

impl Effect {
    pub const ALL: [Effect; 5] = [
        Effect::Noise,
        Effect::NearFar,
        Effect::Multipath,
        Effect::Doppler,
        Effect::Positioning,
    ];

    /// Grid swept by default: SNR (dB), attenuation A₂, multipath count,
    /// receiver speed (m/s) or test-point index.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Effect::Noise => (-5..=35).map(f64::from).collect(),
            Effect::NearFar => (0..=50).map(|i| i as f64 / 100.0).collect(),
            Effect::Multipath => vec![10.0],
            Effect::Doppler => (0..=400).map(|i| i as f64 / 100.0).collect(),
            Effect::Positioning => (0..14).map(f64::from).collect(),
        }
    }

    /// Trials per grid point used by the original measurement campaign.
    pub fn full_scale_iterations(self) -> usize {
        match self {
            Effect::Multipath => 10_000,
            Effect::Positioning => 100,
            _ => 5_000,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Effect::Noise => "noise",
            Effect::NearFar => "nearfar",
            Effect::Multipath => "multipath",
            Effect::Doppler => "doppler",
            Effect::Positioning => "positioning",
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Effect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        Effect::ALL
            .into_iter()
            .find(|e| e.name() == key.to_ascii_lowercase())
            .ok_or_else(|| param(format!("unknown effect '{s}'")))
    }
}

/// Beacon geometry and solver settings of the positioning experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocateSetup {
    pub beacons: BeaconArray,
    /// Starting point of every solve; `None` is below the array centroid
    /// at 0.55 m.
    pub initial: Option<Point>,
    pub solver: SolverOptions,
    /// Receiver positions; empty selects the built-in stand-in grid.
    pub test_points: Vec<Point>,
}

impl LocateSetup {
    pub fn initial_guess(&self) -> Point {
        self.initial.unwrap_or_else(|| {
            let c = self.beacons.centroid();
            [c[0], c[1], 0.55]
        })
    }

    pub fn points(&self) -> Vec<Point> {
        if self.test_points.is_empty() {
            crate::locate::stand_in_test_points()
        } else {
            self.test_points.clone()
        }
    }
}

/// Everything one sweep needs.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub schemes: Vec<Scheme>,
    pub effect: Effect,
    pub grid: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
    /// Temperature and the SNR applied by every effect except the noise
    /// sweep, whose grid is the SNR.
    pub env: Environment,
    pub scheme_params: SchemeParams,
    pub fir: FirModel,
    pub rule: PeakRule,
    pub multipath: MultipathProfile,
    /// Replicas per emission in positioning runs.
    pub multipath_count: usize,
    /// Range of the interferer delay t₂ (s) in near-far runs.
    pub near_far_delay: [f64; 2],
    pub locate: LocateSetup,
}

impl SweepConfig {
    /// Defaults for `effect`: all four schemes, the reference grid, 200
    /// trials per point, 20 dB SNR and ten replicas for positioning.
    pub fn new(effect: Effect, fir: FirModel) -> Self {
        Self {
            schemes: Scheme::ALL.to_vec(),
            effect,
            grid: effect.default_grid(),
            iterations: 200,
            seed: 1,
            env: Environment {
                snr_db: Some(20.0),
                ..Environment::default()
            },
            scheme_params: SchemeParams::default(),
            fir,
            rule: PeakRule::default(),
            multipath: MultipathProfile::default(),
            multipath_count: 10,
            near_far_delay: [0.4e-3, 2e-3],
            locate: LocateSetup::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(param("at least one iteration per grid point is required"));
        }
        if self.grid.is_empty() || self.grid.iter().any(|g| !g.is_finite()) {
            return Err(param("grid must be non-empty and finite"));
        }
        if self.schemes.is_empty() {
            return Err(param("no schemes selected"));
        }
        match self.effect {
            Effect::NearFar => {
                if self.grid.iter().any(|&a| !(0.0..=1.0).contains(&a)) {
                    return Err(param("near-far attenuations must lie in [0, 1]"));
                }
                let [lo, hi] = self.near_far_delay;
                if !(lo >= 0.0 && hi >= lo) {
                    return Err(param(
                        "near-far delay range must be ordered and non-negative",
                    ));
                }
            }
            Effect::Multipath => {
                if self.grid.iter().any(|&m| m < 0.0 || m.fract() != 0.0) {
                    return Err(param("multipath counts must be non-negative integers"));
                }
            }
            Effect::Positioning => {
                let n = self.locate.points().len();
                if self
                    .grid
                    .iter()
                    .any(|&i| i < 0.0 || i.fract() != 0.0 || i as usize >= n)
                {
                    return Err(param(format!("test-point indices must lie in 0..{n}")));
                }
                self.locate.beacons.validate()?;
                if self.scheme_params.beacons != self.locate.beacons.len() {
                    return Err(param("scheme beacon count differs from the beacon layout"));
                }
            }
            Effect::Noise | Effect::Doppler => {}
        }
        Ok(())
    }
}
