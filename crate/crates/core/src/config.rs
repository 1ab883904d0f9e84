//! Sectioned TOML configuration covering every tunable of the simulator.
//!
//! ```toml
//! [scheme]
//! qpsk_roots = [1, 256, 129, 128, 86]
//!
//! [transducer]
//! f_low = 34000.0
//! taps_file = "measured_taps.csv"   # replaces the designed filter
//!
//! [locate]
//! beacons = [[0.0, 0.0, 3.5], [1.0, 0.0, 3.5], [1.0, 1.0, 3.5], [0.0, 1.0, 3.5]]
//!
//! [sweep]
//! seed = 7
//! iterations = 500
//! doppler = { start = 0.0, stop = 2.0, step = 0.05 }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{Effect, LocateSetup, SweepConfig};
use crate::channel::{design_transducer_fir, Environment, FirDesign, FirModel, MultipathProfile};
use crate::error::{param, Error, Result};
use crate::io::read_fir_taps;
use crate::modem::SchemeParams;
use crate::receiver::PeakRule;
use crate::waveform::Scheme;

/// Explicit list of grid values or an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::List(v) => Ok(v.clone()),
            &GridSpec::Range { start, stop, step } => {
                if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
                    return Err(param(format!("bad grid range {start}..{stop} step {step}")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                // built from the index so the steps do not accumulate rounding
                Ok((0..=n).map(|i| start + i as f64 * step).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransducerConfig {
    pub f_low: f64,
    pub f_high: f64,
    pub taps: usize,
    /// Measured response, one coefficient per line; overrides the design.
    pub taps_file: Option<PathBuf>,
}

impl Default for TransducerConfig {
    fn default() -> Self {
        let d = FirDesign::default();
        Self {
            f_low: d.f_low,
            f_high: d.f_high,
            taps: d.taps,
            taps_file: None,
        }
    }
}

impl TransducerConfig {
    /// Relative `taps_file` paths resolve against `base`.
    pub fn build(&self, sample_rate: f64, base: Option<&Path>) -> Result<FirModel> {
        match &self.taps_file {
            Some(p) => {
                let path = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                FirModel::from_taps(read_fir_taps(&path)?, sample_rate)
            }
            None => design_transducer_fir(self.f_low, self.f_high, sample_rate, self.taps),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultipathConfig {
    pub delay_min: f64,
    pub delay_max: f64,
    pub a0: f64,
    pub tau: f64,
    /// Replicas per emission in positioning runs.
    pub count: usize,
}

impl Default for MultipathConfig {
    fn default() -> Self {
        let p = MultipathProfile::default();
        Self {
            delay_min: p.delay_min,
            delay_max: p.delay_max,
            a0: p.a0,
            tau: p.tau,
            count: 10,
        }
    }
}

impl MultipathConfig {
    pub fn profile(&self) -> MultipathProfile {
        MultipathProfile {
            delay_min: self.delay_min,
            delay_max: self.delay_max,
            a0: self.a0,
            tau: self.tau,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub seed: u64,
    /// Trials per grid point.
    pub iterations: usize,
    /// Use the trial counts of the original campaign instead of `iterations`.
    pub full_scale: bool,
    pub schemes: Vec<Scheme>,
    /// Interferer delay range (s) of near-far runs.
    pub near_far_delay: [f64; 2],
    pub output_dir: PathBuf,
    pub noise: Option<GridSpec>,
    pub nearfar: Option<GridSpec>,
    pub multipath: Option<GridSpec>,
    pub doppler: Option<GridSpec>,
    pub positioning: Option<GridSpec>,
    /// CDF abscissae (s) written next to multipath runs.
    pub cdf_points: Option<GridSpec>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            seed: 1,
            iterations: 200,
            full_scale: false,
            schemes: Scheme::ALL.to_vec(),
            near_far_delay: [0.4e-3, 2e-3],
            output_dir: PathBuf::from("out"),
            noise: None,
            nearfar: None,
            multipath: None,
            doppler: None,
            positioning: None,
            cdf_points: None,
        }
    }
}

impl SweepSettings {
    fn grid(&self, effect: Effect) -> Option<&GridSpec> {
        match effect {
            Effect::Noise => self.noise.as_ref(),
            Effect::NearFar => self.nearfar.as_ref(),
            Effect::Multipath => self.multipath.as_ref(),
            Effect::Doppler => self.doppler.as_ref(),
            Effect::Positioning => self.positioning.as_ref(),
        }
    }

    /// Abscissae for exported CDFs; 0 to 2.5 ms in 10 µs steps by default.
    pub fn cdf_abscissae(&self) -> Result<Vec<f64>> {
        match &self.cdf_points {
            Some(g) => g.values(),
            None => Ok((0..=250).map(|i| i as f64 * 1e-5).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmbiguitySettings {
    pub speeds: GridSpec,
    /// Half-width of the lag axis (s).
    pub max_lag: f64,
}

impl Default for AmbiguitySettings {
    fn default() -> Self {
        Self {
            speeds: GridSpec::Range {
                start: -4.0,
                stop: 4.0,
                step: 0.05,
            },
            max_lag: 2e-3,
        }
    }
}

fn default_environment() -> Environment {
    Environment {
        snr_db: Some(20.0),
        ..Environment::default()
    }
}

/// Whole configuration file. Missing sections and keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scheme: SchemeParams,
    pub transducer: TransducerConfig,
    /// Temperature and the SNR of every run except the noise sweep.
    pub environment: Environment,
    pub multipath: MultipathConfig,
    pub receiver: PeakRule,
    pub locate: LocateSetup,
    pub sweep: SweepSettings,
    pub ambiguity: AmbiguitySettings,
    /// Directory that relative paths in the file refer to.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            scheme: SchemeParams::default(),
            transducer: TransducerConfig::default(),
            environment: default_environment(),
            multipath: MultipathConfig::default(),
            receiver: PeakRule::default(),
            locate: LocateSetup::default(),
            sweep: SweepSettings::default(),
            ambiguity: AmbiguitySettings::default(),
            base_dir: None,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn fir(&self) -> Result<FirModel> {
        self.transducer
            .build(self.scheme.sample_rate, self.base_dir.as_deref())
    }

    /// Resolves a path from the file against its directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn sweep_config(&self, effect: Effect) -> Result<SweepConfig> {
        let mut c = SweepConfig::new(effect, self.fir()?);
        c.schemes = self.sweep.schemes.clone();
        if let Some(g) = self.sweep.grid(effect) {
            c.grid = g.values()?;
        }
        c.iterations = if self.sweep.full_scale {
            effect.full_scale_iterations()
        } else {
            self.sweep.iterations
        };
        c.seed = self.sweep.seed;
        c.env = self.environment;
        c.scheme_params = self.scheme.clone();
        c.rule = self.receiver;
        c.multipath = self.multipath.profile();
        c.multipath_count = self.multipath.count;
        c.near_far_delay = self.sweep.near_far_delay;
        c.locate = self.locate.clone();
        c.validate()?;
        Ok(c)
    }
}
