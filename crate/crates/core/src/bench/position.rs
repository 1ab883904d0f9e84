use std::io::Write;

use rayon::prelude::*;

use super::sweep::{equalized_set, mean_square, Detector};
use super::LocateSetup;
use super::{compute_rmse, trial_rng, Effect, MetricRow, MetricTable, SweepConfig};
use crate::channel::{
    add_noise, delay_samples, sample_multipath, superpose, Environment, FirModel,
};
use crate::error::{param, Result};
use crate::locate::{distance, solve_position, Point, PositionFix};
use crate::receiver::{
    extract_dtoa, matched_filter, validate_peak, PeakDecision, PeakRule, ToaSet,
};
use crate::waveform::{check_rates, Scheme, Waveform};

/// One positioning trial.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionRecord {
    pub point: usize,
    pub scheme: Scheme,
    pub iteration: usize,
    pub truth: Point,
    pub valid_beacons: usize,
    /// Present when at least four beacons were valid and the solve succeeded.
    pub fix: Option<PositionFix>,
    /// Euclidean position error (m).
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositioningReport {
    /// Per test point and scheme: arrival-time errors of the valid beacon
    /// detections and the percentage of trials that produced a fix.
    pub table: MetricTable,
    pub log: Vec<PositionRecord>,
}

impl PositioningReport {
    pub fn position_errors(&self, scheme: Scheme) -> Vec<f64> {
        self.log
            .iter()
            .filter(|r| r.scheme == scheme)
            .filter_map(|r| r.error)
            .collect()
    }

    /// Percentage of all trials of `scheme` that produced a fix.
    pub fn valid_pct(&self, scheme: Scheme) -> f64 {
        let all = self.log.iter().filter(|r| r.scheme == scheme).count();
        100.0 * self.position_errors(scheme).len() as f64 / all.max(1) as f64
    }

    /// `point,scheme,iteration,valid_beacons,x,y,z,error_m,converged`.
    pub fn write_log_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "point,scheme,iteration,valid_beacons,x,y,z,error_m,converged"
        )?;
        for r in &self.log {
            match &r.fix {
                Some(f) => writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.point,
                    r.scheme.label(),
                    r.iteration,
                    r.valid_beacons,
                    f.position[0],
                    f.position[1],
                    f.position[2],
                    r.error.unwrap_or(f64::NAN),
                    f.converged
                )?,
                None => writeln!(
                    out,
                    "{},{},{},{},,,,,",
                    r.point,
                    r.scheme.label(),
                    r.iteration,
                    r.valid_beacons
                )?,
            }
        }
        Ok(())
    }
}

/// Simultaneous emission of every beacon to each test point, followed by
/// detection, the four-beacon gate and a Gauss-Newton fix.
///
/// Each beacon reaches the receiver with its geometric delay, an amplitude
/// proportional to the inverse distance (nearest beacon at 1) and, when
/// `multipath_count > 0`, its own set of replicas. The grid holds test-point
/// indices.
pub fn run_positioning(cfg: &SweepConfig) -> Result<PositioningReport> {
    if cfg.effect != Effect::Positioning {
        return Err(param("run_positioning needs the positioning effect"));
    }
    cfg.validate()?;
    let set = equalized_set(cfg)?;
    let fs = cfg.scheme_params.sample_rate;
    let c = cfg.env.sound_speed()?;
    let snr = cfg.env.snr_db.unwrap_or(f64::INFINITY);
    let points = cfg.locate.points();
    let beacons = &cfg.locate.beacons;
    let initial = cfg.locate.initial_guess();

    let farthest = cfg
        .grid
        .iter()
        .flat_map(|&g| {
            let p = points[g as usize];
            beacons.positions.iter().map(move |b| distance(&p, b))
        })
        .fold(0.0_f64, f64::max);
    let tail = if cfg.multipath_count > 0 {
        cfg.multipath.delay_max
    } else {
        0.0
    };

    let mut filtered = Vec::new();
    let mut detectors = Vec::new();
    for (si, &scheme) in cfg.schemes.iter().enumerate() {
        let pats = &set.patterns[si];
        let f: Vec<Vec<f64>> = pats.iter().map(|p| cfg.fir.filter(&p.samples)).collect();
        let longest = f.iter().map(Vec::len).max().unwrap_or(0);
        let max_received = longest + delay_samples(farthest / c + tail, fs) + 2;
        detectors.push(
            pats.iter()
                .map(|p| Detector::new(p, &cfg.fir, cfg.scheme_params.guard(scheme), max_received))
                .collect::<Vec<_>>(),
        );
        filtered.push(f);
    }

    let jobs: Vec<(usize, usize)> = (0..cfg.grid.len())
        .flat_map(|gi| (0..cfg.schemes.len()).map(move |si| (gi, si)))
        .collect();
    let results: Vec<Result<(MetricRow, Vec<PositionRecord>)>> = jobs
        .par_iter()
        .map(|&(gi, si)| {
            let point_idx = cfg.grid[gi] as usize;
            let truth = points[point_idx];
            let dist: Vec<f64> = beacons
                .positions
                .iter()
                .map(|b| distance(&truth, b))
                .collect();
            let nearest = dist.iter().copied().fold(f64::INFINITY, f64::min);
            let delays: Vec<usize> = dist.iter().map(|d| delay_samples(d / c, fs)).collect();
            let mut toa_errors = Vec::new();
            let (mut smr_sum, mut peak_sum, mut count) = (0.0, 0.0, 0usize);
            let mut log = Vec::with_capacity(cfg.iterations);
            for it in 0..cfg.iterations {
                let mut rng = trial_rng(cfg.seed, gi, it);
                let mut x = Vec::new();
                for (k, sig) in filtered[si].iter().enumerate() {
                    let gain = nearest / dist[k];
                    let paths = sample_multipath(&mut rng, cfg.multipath_count, &cfg.multipath, k)?;
                    for p in &paths.paths {
                        let offset = delays[k] + delay_samples(p.delay, fs);
                        superpose(&mut x, sig, offset, gain * p.attenuation);
                    }
                }
                let power = mean_square(&x);
                add_noise(&mut x, power, snr, &mut rng)?;

                let mut decisions = Vec::with_capacity(delays.len());
                for (k, det) in detectors[si].iter().enumerate() {
                    let corr = det.trace(&x);
                    let trial = det.score(&corr, delays[k], &cfg.rule);
                    smr_sum += trial.smr;
                    peak_sum += trial.peak;
                    count += 1;
                    let d = validate_peak(&corr, &cfg.rule)?;
                    if let Some(t) = d.toa {
                        toa_errors.push(t - delays[k] as f64 / fs);
                    }
                    decisions.push(d);
                }
                let valid_beacons = decisions.iter().filter(|d| d.is_valid()).count();
                let fix = extract_dtoa(&decisions).ok().and_then(|set| {
                    solve_position(
                        beacons,
                        set.reference,
                        &set.dtoa,
                        c,
                        initial,
                        &cfg.locate.solver,
                    )
                    .ok()
                });
                let error = fix.as_ref().map(|f| distance(&f.position, &truth));
                log.push(PositionRecord {
                    point: point_idx,
                    scheme: cfg.schemes[si],
                    iteration: it,
                    truth,
                    valid_beacons,
                    fix,
                    error,
                });
            }
            let fixes = log.iter().filter(|r| r.fix.is_some()).count();
            let errors: Vec<f64> = toa_errors.iter().map(|e| e.abs()).collect();
            let row = MetricRow {
                grid: cfg.grid[gi],
                scheme: cfg.schemes[si],
                n: cfg.iterations,
                rmse_ms: if errors.is_empty() {
                    f64::NAN
                } else {
                    compute_rmse(&errors)?
                },
                errors,
                offsets: toa_errors,
                mean_smr: smr_sum / count.max(1) as f64,
                mean_peak: peak_sum / count.max(1) as f64,
                valid_pct: 100.0 * fixes as f64 / cfg.iterations as f64,
            };
            Ok((row, log))
        })
        .collect();
    let mut table = MetricTable::default();
    let mut log = Vec::new();
    for r in results {
        let (row, l) = r?;
        table.rows.push(row);
        log.extend(l);
    }
    Ok(PositioningReport { table, log })
}

/// Simulated recording of one simultaneous emission heard at `point`,
/// preceded by `lead` seconds of silence. Gains follow the inverse distance
/// with the nearest beacon at 1; noise uses `env.snr_db` against the
/// composite signal.
pub fn synthesize_capture<R: rand::Rng + ?Sized>(
    patterns: &[Waveform],
    fir: &FirModel,
    setup: &LocateSetup,
    point: Point,
    env: &Environment,
    lead: f64,
    rng: &mut R,
) -> Result<Waveform> {
    let beacons = &setup.beacons.positions;
    if patterns.len() != beacons.len() {
        return Err(param(format!(
            "{} patterns for {} beacons",
            patterns.len(),
            beacons.len()
        )));
    }
    let fs = fir.sample_rate;
    let c = env.sound_speed()?;
    let dist: Vec<f64> = beacons.iter().map(|b| distance(&point, b)).collect();
    let nearest = dist.iter().copied().fold(f64::INFINITY, f64::min);
    let mut x = Vec::new();
    for (p, &d) in patterns.iter().zip(&dist) {
        check_rates(p.sample_rate, fs)?;
        superpose(
            &mut x,
            &fir.filter(&p.samples),
            delay_samples(lead + d / c, fs),
            nearest / d,
        );
    }
    let power = mean_square(&x);
    add_noise(&mut x, power, env.snr_db.unwrap_or(f64::INFINITY), rng)?;
    Waveform::new(x, fs)
}

/// Matched filter and peak validation of every beacon pattern against one
/// recording. The result is indexed by beacon id.
pub fn detect_beacons(
    capture: &Waveform,
    patterns: &[Waveform],
    rule: &PeakRule,
) -> Result<Vec<PeakDecision>> {
    patterns
        .iter()
        .map(|p| validate_peak(&matched_filter(capture, p)?, rule))
        .collect()
}

/// DTOA extraction and position solve from per-beacon decisions.
pub fn locate_decisions(
    decisions: &[PeakDecision],
    setup: &LocateSetup,
    env: &Environment,
) -> Result<(ToaSet, PositionFix)> {
    let set = extract_dtoa(decisions)?;
    let fix = solve_position(
        &setup.beacons,
        set.reference,
        &set.dtoa,
        env.sound_speed()?,
        setup.initial_guess(),
        &setup.solver,
    )?;
    Ok((set, fix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locate::SolveDims;
    use crate::modem::SchemeSet;
    use rand::SeedableRng;

    #[test]
    fn clean_capture_locates_in_plane() {
        let fir = crate::channel::FirDesign::default().build(500e3).unwrap();
        let set = SchemeSet::build(&Default::default(), &[Scheme::ZcQpsk], &fir).unwrap();
        let mut setup = LocateSetup::default();
        setup.solver.dims = SolveDims::Planar;
        let truth = [0.4, -0.3, 0.55];
        let env = Environment::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let cap = synthesize_capture(&set.patterns[0], &fir, &setup, truth, &env, 1e-3, &mut rng)
            .unwrap();
        let dec = detect_beacons(&cap, &set.patterns[0], &PeakRule::default()).unwrap();
        assert!(dec.iter().all(PeakDecision::is_valid));
        let (_, fix) = locate_decisions(&dec, &setup, &env).unwrap();
        assert!(distance(&fix.position, &truth) < 0.01, "{:?}", fix.position);
    }

    #[test]
    fn pattern_count_must_match() {
        let fir = FirModel::identity(500e3);
        let w = Waveform::new(vec![1.0; 10], 500e3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let r = synthesize_capture(
            &[w],
            &fir,
            &LocateSetup::default(),
            [0.0; 3],
            &Environment::default(),
            0.0,
            &mut rng,
        );
        assert!(r.is_err());
    }
}
