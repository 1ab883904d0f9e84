use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{compute_rmse, trial_rng, Effect, MetricRow, MetricTable, SweepConfig};
use crate::channel::{
    add_noise, delay_samples, doppler_resample, sample_multipath, superpose, DopplerSpec, FirModel,
};
use crate::codes::{argmax, sidelobe_ratio, CorrelationResult};
use crate::dsp::PatternCorrelator;
use crate::error::{param, Error, Result};
use crate::modem::SchemeSet;
use crate::receiver::{validate_peak, PeakRule};
use crate::waveform::{Scheme, Waveform};

/// Outcome of one detection trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Trial {
    /// Detected lag minus true delay (s).
    pub offset: f64,
    pub smr: f64,
    pub peak: f64,
    pub valid: bool,
}

/// Pattern-side assets of one scheme, shared read-only by the workers.
pub(crate) struct Detector {
    pub correlator: PatternCorrelator,
    pub origin: usize,
    pub sample_rate: f64,
    /// Clean static correlation peak used to normalise peak heights.
    pub reference_peak: f64,
    pub guard: usize,
}

impl Detector {
    pub fn new(pattern: &Waveform, fir: &FirModel, guard: usize, max_received: usize) -> Self {
        let filtered = fir.filter(&pattern.samples);
        let correlator = PatternCorrelator::new(&pattern.samples, max_received.max(filtered.len()));
        let clean = correlator.correlate(&filtered);
        let reference_peak = clean.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Self {
            correlator,
            origin: pattern.len() - 1,
            sample_rate: pattern.sample_rate,
            reference_peak,
            guard,
        }
    }

    /// Correlation magnitude of one received frame.
    pub fn trace(&self, received: &[f64]) -> CorrelationResult {
        let t = self.correlator.correlate(received);
        self.result(t)
    }

    pub fn trace_pair(&self, a: &[f64], b: &[f64]) -> (CorrelationResult, CorrelationResult) {
        let (x, y) = self.correlator.correlate_pair(a, b);
        (self.result(x), self.result(y))
    }

    /// Magnitude trace whose `smr` field carries the guarded ratio.
    fn result(&self, mut t: Vec<f64>) -> CorrelationResult {
        t.iter_mut().for_each(|v| *v = v.abs());
        let (peak_index, peak_value) = argmax(&t);
        let smr = sidelobe_ratio(&t, peak_index, self.guard).unwrap_or(1.0);
        CorrelationResult {
            trace: t,
            lag_origin: self.origin,
            sample_rate: self.sample_rate,
            peak_index,
            peak_value,
            smr,
        }
    }

    /// Scores a trace against the true delay (samples): the main peak gives
    /// the position error, the validation rule the valid flag.
    pub fn score(&self, corr: &CorrelationResult, true_delay: usize, rule: &PeakRule) -> Trial {
        let offset = (corr.peak_lag() - true_delay as isize) as f64 / self.sample_rate;
        let valid = validate_peak(corr, rule)
            .map(|d| d.is_valid())
            .unwrap_or(false);
        Trial {
            offset,
            smr: corr.smr,
            peak: corr.peak_value / self.reference_peak,
            valid,
        }
    }
}

pub(crate) fn mean_square(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64
}

pub(crate) fn aggregate(grid: f64, scheme: Scheme, trials: &[Trial]) -> Result<MetricRow> {
    let n = trials.len();
    let offsets: Vec<f64> = trials.iter().map(|t| t.offset).collect();
    let errors: Vec<f64> = offsets.iter().map(|o| o.abs()).collect();
    let mean = |f: fn(&Trial) -> f64| trials.iter().map(f).sum::<f64>() / n as f64;
    Ok(MetricRow {
        grid,
        scheme,
        n,
        rmse_ms: compute_rmse(&errors)?,
        errors,
        offsets,
        mean_smr: mean(|t| t.smr),
        mean_peak: mean(|t| t.peak),
        valid_pct: 100.0 * trials.iter().filter(|t| t.valid).count() as f64 / n as f64,
    })
}

/// Builds the energy-equalised scheme set and checks that every pattern
/// leaves the transducer model with the same energy.
pub(crate) fn equalized_set(cfg: &SweepConfig) -> Result<SchemeSet> {
    let set = SchemeSet::build(&cfg.scheme_params, &cfg.schemes, &cfg.fir)?;
    let energies: Vec<f64> = set
        .patterns
        .iter()
        .flatten()
        .map(|w| crate::modem::filtered_energy(w, &cfg.fir))
        .collect();
    let first = energies[0];
    if energies.iter().any(|e| ((e - first) / first).abs() > 1e-9) {
        return Err(Error::Design("patterns are not energy-equalised".into()));
    }
    Ok(set)
}

/// Runs a detection sweep (noise, near-far, multipath or Doppler).
///
/// Every trial synthesises the scheme's equalised pattern, applies the
/// effect through the transducer model, adds noise and locates the main
/// correlation peak. Trial `i` at grid point `g` draws its randomness from
/// a stream keyed by `(seed, g, i)` shared by all schemes, so results do not
/// depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<MetricTable> {
    cfg.validate()?;
    if cfg.effect == Effect::Positioning {
        return Err(param("positioning runs go through run_positioning"));
    }
    let set = equalized_set(cfg)?;
    let fs = cfg.scheme_params.sample_rate;
    let c = cfg.env.sound_speed()?;

    let mut detectors = Vec::new();
    let mut signals = Vec::new();
    for (si, &scheme) in cfg.schemes.iter().enumerate() {
        let pats = &set.patterns[si];
        // near-far detects the weak second emitter under the first one
        let (target, other) = match cfg.effect {
            Effect::NearFar => {
                if pats.len() < 2 {
                    return Err(param("near-far needs two beacons"));
                }
                (&pats[1], Some(&pats[0]))
            }
            _ => (&pats[0], None),
        };
        let target_f = cfg.fir.filter(&target.samples);
        let other_f = other.map(|w| cfg.fir.filter(&w.samples));
        let max_received = max_frame(
            cfg,
            target_f.len().max(other_f.as_ref().map_or(0, Vec::len)),
            c,
        )?;
        detectors.push(Detector::new(
            target,
            &cfg.fir,
            cfg.scheme_params.guard(scheme),
            max_received,
        ));
        signals.push((target_f, other_f));
    }
    let jobs: Vec<(usize, usize)> = (0..cfg.grid.len())
        .flat_map(|gi| (0..cfg.schemes.len()).map(move |si| (gi, si)))
        .collect();
    let rows: Vec<Result<MetricRow>> = jobs
        .par_iter()
        .map(|&(gi, si)| {
            let g = cfg.grid[gi];
            let det = &detectors[si];
            let (target_f, other_f) = &signals[si];
            let frame = |rng: &mut ChaCha8Rng| -> Result<(Vec<f64>, usize)> {
                let (mut x, truth, snr) = match cfg.effect {
                    Effect::Noise => (target_f.clone(), 0, g),
                    Effect::NearFar => {
                        let [lo, hi] = cfg.near_far_delay;
                        let t2 = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
                        let d = delay_samples(t2, fs);
                        let mut x = other_f.clone().unwrap_or_default();
                        superpose(&mut x, target_f, d, g);
                        (x, d, snr_of(cfg)?)
                    }
                    Effect::Multipath => {
                        let paths = sample_multipath(rng, g as usize, &cfg.multipath, 0)?;
                        let mut x = Vec::new();
                        for p in &paths.paths {
                            superpose(&mut x, target_f, delay_samples(p.delay, fs), p.attenuation);
                        }
                        (x, 0, snr_of(cfg)?)
                    }
                    Effect::Doppler => unreachable!("handled with a cached resampled frame"),
                    Effect::Positioning => unreachable!(),
                };
                let p = mean_square(&x);
                add_noise(&mut x, p, snr, rng)?;
                Ok((x, truth))
            };
            let doppler = if cfg.effect == Effect::Doppler {
                let w = Waveform::new(target_f.clone(), fs)?;
                Some(doppler_resample(&w, &DopplerSpec::radial(g, c, fs))?.samples)
            } else {
                None
            };
            let make = |i: usize| -> Result<(Vec<f64>, usize)> {
                let mut rng = trial_rng(cfg.seed, gi, i);
                match &doppler {
                    Some(y) => {
                        let mut x = y.clone();
                        add_noise(&mut x, mean_square(y), snr_of(cfg)?, &mut rng)?;
                        Ok((x, 0))
                    }
                    None => frame(&mut rng),
                }
            };
            let mut trials = Vec::with_capacity(cfg.iterations);
            let mut i = 0;
            while i < cfg.iterations {
                let (a, ta) = make(i)?;
                if i + 1 < cfg.iterations {
                    let (b, tb) = make(i + 1)?;
                    let (ca, cb) = det.trace_pair(&a, &b);
                    trials.push(det.score(&ca, ta, &cfg.rule));
                    trials.push(det.score(&cb, tb, &cfg.rule));
                    i += 2;
                } else {
                    trials.push(det.score(&det.trace(&a), ta, &cfg.rule));
                    i += 1;
                }
            }
            aggregate(g, cfg.schemes[si], &trials)
        })
        .collect();
    Ok(MetricTable {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

fn snr_of(cfg: &SweepConfig) -> Result<f64> {
    Ok(cfg.env.snr_db.unwrap_or(f64::INFINITY))
}

/// Longest received frame a sweep can produce for a filtered pattern of
/// `filtered_len` samples.
fn max_frame(cfg: &SweepConfig, filtered_len: usize, c: f64) -> Result<usize> {
    let fs = cfg.scheme_params.sample_rate;
    let tail = match cfg.effect {
        Effect::NearFar => cfg.near_far_delay[1],
        Effect::Multipath => cfg.multipath.delay_max,
        _ => 0.0,
    };
    let mut n = filtered_len + delay_samples(tail, fs) + 1;
    if cfg.effect == Effect::Doppler {
        let slowest = cfg
            .grid
            .iter()
            .map(|&v| DopplerSpec::radial(v, c, fs).virtual_rate())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(fs, f64::min);
        n = (n as f64 * fs / slowest).ceil() as usize + 2;
    }
    Ok(n)
}
