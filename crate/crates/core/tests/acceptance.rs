//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any
//! criterion fails. Built with `harness = false` so the report is printed
//! even when everything passes.

use std::process::ExitCode;
use std::time::Instant;

use alps::bench::{percentile, run_positioning, run_sweep, Effect, MetricTable, SweepConfig};
use alps::channel::{FirDesign, FirModel};
use alps::codes::{gen_kasami_family, gen_zadoff_chu, periodic_correlation_values};
use alps::locate::{
    forward_dtoa, solve_position, BeaconArray, DtoaProblem, Point, SolveDims, SolverOptions,
};
use alps::modem::{dmt_synthesize, DmtParams, SchemeParams, SchemeSet};
use alps::Scheme;
use rand::{Rng, SeedableRng};

const FS: f64 = 500e3;
const SAMPLE: f64 = 1.0 / FS;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn fir() -> FirModel {
    FirDesign::default()
        .build(FS)
        .expect("default transducer model")
}

fn sweep(effect: Effect, iterations: usize, grid: Option<Vec<f64>>) -> MetricTable {
    let mut cfg = SweepConfig::new(effect, fir());
    cfg.iterations = iterations;
    if let Some(g) = grid {
        cfg.grid = g;
    }
    run_sweep(&cfg).expect("sweep runs")
}

fn rmse_at(t: &MetricTable, s: Scheme, g: f64) -> f64 {
    t.at(s, g).map(|r| r.rmse_ms).unwrap_or(f64::NAN)
}

fn c01_zc_periodic_autocorrelation() -> Outcome {
    let p = SchemeParams::default();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (len, roots) in [
        (p.chirp_len, &p.chirp_roots),
        (p.ofdm_len, &p.ofdm_roots),
        (p.qpsk_len, &p.qpsk_roots),
    ] {
        for &r in roots {
            let z = gen_zadoff_chu(len, r).unwrap();
            let v = periodic_correlation_values(&z.values, &z.values).unwrap();
            let off = v[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
            ok &= (v[0].norm() - len as f64).abs() < 1e-9 * len as f64 && off < 1e-9 * len as f64;
            worst = worst.max(off / len as f64);
        }
    }
    Outcome::new(
        ok,
        format!("worst off-peak |R|/L = {worst:.2e} (bound 1e-9)"),
    )
}

fn c02_kasami_structure() -> Outcome {
    let big = gen_kasami_family(8).unwrap();
    let size_ok = big.len() == 16 && big.iter().all(|s| s.len() == 255);
    let small = gen_kasami_family(4).unwrap();
    let mut values = std::collections::BTreeSet::new();
    for (i, a) in small.iter().enumerate() {
        for (j, b) in small.iter().enumerate() {
            if i == j {
                continue;
            }
            let r = periodic_correlation_values(&a.to_complex(0).values, &b.to_complex(0).values)
                .unwrap();
            values.extend(r.iter().map(|c| c.re.round() as i64));
        }
    }
    let alphabet_ok = values.iter().all(|v| [-1, -5, 3].contains(v));
    Outcome::new(
        size_ok && alphabet_ok,
        format!(
            "N=8: {} sequences of length {}; N=4 cross-correlation values {:?}",
            big.len(),
            big[0].len(),
            values
        ),
    )
}

fn c03_durations() -> Outcome {
    let p = SchemeParams::default();
    let table = [
        (Scheme::KasBpsk, 24.48e-3),
        (Scheme::ZcQpsk, 24.67e-3),
        (Scheme::ZcOfdm, 23.87e-3),
        (Scheme::ZcChirp, 24.25e-3),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (s, t) in table {
        let d = p.patterns(s).unwrap()[0].duration();
        if s == Scheme::ZcChirp {
            // 67 symbols of 0.36 ms; the tabulated value is not reachable
            ok &= (d - 24.12e-3).abs() < 1e-12;
            parts.push(format!(
                "{s} {:.3} ms (table {:.2} ms, deviation {:.2} ms)",
                d * 1e3,
                t * 1e3,
                (t - d) * 1e3
            ));
        } else {
            // tabulated values are truncated to 10 µs
            let shown = (d * 1e5 + 1e-9).floor() / 1e5;
            ok &= (shown - t).abs() < 1e-12 && (d - t).abs() <= 5.0 * SAMPLE;
            parts.push(format!("{s} {:.3} ms", d * 1e3));
        }
    }
    Outcome::new(ok, parts.join("; "))
}

fn c04_dmt_pads() -> Outcome {
    let p = DmtParams::new(191, FS, 37e3, 45e3).unwrap();
    let z = gen_zadoff_chu(191, 1).unwrap();
    let (samples, residue) = dmt_synthesize(&p.spectrum(&z).unwrap());
    let (lo, hi) = p.occupied_band();
    let ok = p.pad_low == 883
        && p.pad_high == 4894
        && p.bins() == 5969
        && samples.len() == 11938
        && residue < 1e-9
        && lo >= 37e3
        && hi <= 45e3;
    Outcome::new(
        ok,
        format!(
            "pads {{{}, {}}}, N = {}, imaginary residue {residue:.1e}, occupied {:.2}..{:.2} kHz",
            p.pad_low,
            p.pad_high,
            p.bins(),
            lo / 1e3,
            hi / 1e3
        ),
    )
}

fn c05_energy_equalization() -> Outcome {
    let fir = fir();
    // one emitter per scheme, as in the single-signal comparison
    let params = SchemeParams {
        beacons: 1,
        ..SchemeParams::default()
    };
    let set = SchemeSet::build(&params, &Scheme::ALL, &fir).unwrap();
    let energies: Vec<f64> = set
        .patterns
        .iter()
        .map(|p| alps::modem::filtered_energy(&p[0], &fir))
        .collect();
    let spread = energies
        .iter()
        .map(|e| (e / energies[0] - 1.0).abs())
        .fold(0.0, f64::max);
    let table = [0.58, 0.61, 1.00, 0.57];
    let af: Vec<f64> = Scheme::ALL
        .iter()
        .map(|&s| set.report.attenuation_of(s, 0).unwrap())
        .collect();
    let ofdm_max = af[2] == 1.0 && af.iter().all(|&a| a <= 1.0);
    let close = af.iter().zip(table).all(|(a, t)| (a - t).abs() <= 0.15);
    Outcome::new(
        spread < 1e-9 && ofdm_max && close,
        format!(
            "AF {:.3}/{:.3}/{:.3}/{:.3} vs 0.58/0.61/1.00/0.57; filtered-energy spread {spread:.1e}",
            af[0], af[1], af[2], af[3]
        ),
    )
}

fn onset(t: &MetricTable, s: Scheme) -> Option<f64> {
    t.scheme_rows(s)
        .filter(|r| r.rmse_ms > 0.0)
        .map(|r| r.grid)
        .reduce(f64::max)
}

fn c06_noise() -> Outcome {
    let t = sweep(Effect::Noise, 200, None);
    let zero_above_5 = t
        .rows
        .iter()
        .filter(|r| r.grid >= 5.0)
        .all(|r| r.rmse_ms == 0.0);
    let worst_stated = Scheme::ALL
        .iter()
        .map(|&s| onset(&t, s).map_or("none".into(), |g| format!("{g} dB")))
        .collect::<Vec<_>>()
        .join("/");
    // the stated grid stays error-free, so the ordering is read on an extension
    let ext = sweep(
        Effect::Noise,
        200,
        Some((-30..=-5).map(f64::from).collect()),
    );
    let onsets: Vec<Option<f64>> = Scheme::ALL.iter().map(|&s| onset(&ext, s)).collect();
    let ofdm = onsets[2].unwrap_or(f64::NEG_INFINITY);
    let ordering = [0, 1, 3]
        .iter()
        .all(|&i| ofdm > onsets[i].unwrap_or(f64::NEG_INFINITY));
    let show = |o: &Option<f64>| o.map_or("none".into(), |g| format!("{g}"));
    Outcome::new(
        zero_above_5 && ordering,
        format!(
            "RMSE = 0 at >= 5 dB: {zero_above_5}; highest nonzero-RMSE SNR on -5..35: {worst_stated}; \
             on -30..-5 dB BPSK/QPSK/OFDM/Chirp: {}/{}/{}/{} dB (OFDM first: {ordering})",
            show(&onsets[0]),
            show(&onsets[1]),
            show(&onsets[2]),
            show(&onsets[3])
        ),
    )
}

/// Smallest grid value from which the RMSE stays zero to the end of the grid.
fn zero_from(t: &MetricTable, s: Scheme) -> Option<f64> {
    let rows: Vec<_> = t.scheme_rows(s).collect();
    let mut start = None;
    for r in rows.iter().rev() {
        if r.rmse_ms == 0.0 {
            start = Some(r.grid);
        } else {
            break;
        }
    }
    start
}

fn c07_near_far() -> Outcome {
    let t = sweep(Effect::NearFar, 200, None);
    let at_half: Vec<f64> = Scheme::ALL.iter().map(|&s| rmse_at(&t, s, 0.5)).collect();
    let zero_at_half = [0, 1, 3].iter().all(|&i| at_half[i] == 0.0);
    let mean: Vec<f64> = Scheme::ALL
        .iter()
        .map(|&s| {
            let r: Vec<f64> = t.scheme_rows(s).map(|r| r.rmse_ms).collect();
            r.iter().sum::<f64>() / r.len() as f64
        })
        .collect();
    let ofdm_worst = [0, 1, 3].iter().all(|&i| mean[2] > mean[i]);
    let zeros: Vec<Option<f64>> = Scheme::ALL.iter().map(|&s| zero_from(&t, s)).collect();
    let qpsk_first = match zeros[1] {
        Some(q) => zeros.iter().all(|z| z.is_none_or(|z| q <= z)),
        None => false,
    };
    let show = |o: &Option<f64>| o.map_or("never".into(), |g| format!("{g:.2}"));
    Outcome::new(
        zero_at_half && ofdm_worst && qpsk_first,
        format!(
            "RMSE at A2=0.5 (ms) {:.4}/{:.4}/{:.4}/{:.4}; mean RMSE {:.4}/{:.4}/{:.4}/{:.4} (OFDM worst: {ofdm_worst}); \
             zero from A2 = {}/{}/{}/{} (QPSK first: {qpsk_first})",
            at_half[0],
            at_half[1],
            at_half[2],
            at_half[3],
            mean[0],
            mean[1],
            mean[2],
            mean[3],
            show(&zeros[0]),
            show(&zeros[1]),
            show(&zeros[2]),
            show(&zeros[3])
        ),
    )
}

fn c08_multipath() -> Outcome {
    let t = sweep(Effect::Multipath, 1000, Some(vec![10.0]));
    let rows: Vec<_> = Scheme::ALL
        .iter()
        .map(|&s| t.at(s, 10.0).unwrap())
        .collect();
    let zero: Vec<f64> = rows.iter().map(|r| r.zero_error_fraction()).collect();
    // error mass: area between the CDF and one, i.e. the mean absolute error
    let mass: Vec<f64> = rows
        .iter()
        .map(|r| r.errors.iter().sum::<f64>() / r.n as f64 * 1e3)
        .collect();
    let zero_ok = zero.iter().all(|&z| z >= 0.9);
    let (b, q, o, c) = (mass[0], mass[1], mass[2], mass[3]);
    let order_ok = q <= b && b <= c && c <= o;
    Outcome::new(
        zero_ok && order_ok,
        format!(
            "zero-error fraction {:.3}/{:.3}/{:.3}/{:.3}; error mass (ms) {b:.5}/{q:.5}/{o:.5}/{c:.5} \
             (QPSK <= BPSK <= Chirp <= OFDM: {order_ok})",
            zero[0], zero[1], zero[2], zero[3]
        ),
    )
}

fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

fn c09_doppler() -> Outcome {
    let t = sweep(Effect::Doppler, 200, None);
    let smr2: Vec<f64> = Scheme::ALL
        .iter()
        .map(|&s| t.at(s, 2.0).unwrap().mean_smr)
        .collect();
    let (b, q, o, c) = (smr2[0], smr2[1], smr2[2], smr2[3]);
    let bpsk_smr = b > 0.8;
    // divergence: RMSE beyond 0.1 ms; "about 0.4 m/s" is read as ±50 %
    let diverge = t
        .scheme_rows(Scheme::KasBpsk)
        .find(|r| r.rmse_ms > 0.1)
        .map(|r| r.grid);
    let onset_ok = diverge.is_some_and(|v| (0.2..=0.6).contains(&v));
    let mut robust = true;
    let mut fits = Vec::new();
    for s in [Scheme::ZcQpsk, Scheme::ZcOfdm] {
        let rows: Vec<_> = t.scheme_rows(s).collect();
        let min_peak = rows
            .iter()
            .map(|r| r.mean_peak)
            .fold(f64::INFINITY, f64::min);
        let min_valid = rows
            .iter()
            .map(|r| r.valid_pct)
            .fold(f64::INFINITY, f64::min);
        let x: Vec<f64> = rows.iter().map(|r| r.grid).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.mean_offset_ms()).collect();
        let r2 = r_squared(&x, &y);
        robust &= min_peak >= 0.5 && min_valid >= 90.0 && r2 > 0.99;
        fits.push(format!(
            "{s} min peak {min_peak:.2}, min valid {min_valid:.0}%, drift R² {r2:.4}"
        ));
    }
    let order_ok = q <= o && o < c && c < b;
    Outcome::new(
        bpsk_smr && onset_ok && robust && order_ok,
        format!(
            "SMR at 2 m/s {b:.2}/{q:.2}/{o:.2}/{c:.2} (QPSK <= OFDM < Chirp < BPSK: {order_ok}; |QPSK-OFDM| = {:.2}); \
             BPSK RMSE > 0.1 ms from {} m/s (0.2..0.6: {onset_ok}); {}",
            (q - o).abs(),
            diverge.map_or("never".into(), |v| format!("{v:.2}")),
            fits.join("; ")
        ),
    )
}

fn c10_solver_oracle() -> Outcome {
    let beacons = BeaconArray::default();
    let c = 343.0;
    let opts = SolverOptions::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p: Point = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.0..2.5),
        ];
        let r = rng.gen_range(0..beacons.len());
        let dtoa = forward_dtoa(&p, &beacons, c, r);
        let fix = solve_position(&beacons, r, &dtoa, c, [0.0, 0.0, 0.55], &opts);
        let e = fix.map_or(f64::INFINITY, |f| alps::locate::distance(&f.position, &p));
        worst = worst.max(e);
    }
    let mut jac_err: f64 = 0.0;
    for _ in 0..50 {
        let p: Point = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.0..2.5),
        ];
        let dtoa = forward_dtoa(&[0.1, 0.2, 0.5], &beacons, c, 0);
        let prob = DtoaProblem::new(&beacons, 0, &dtoa, c).unwrap();
        let j = prob.jacobian(&p);
        for k in 0..3 {
            let h = 1e-6;
            let (mut a, mut b) = (p, p);
            a[k] += h;
            b[k] -= h;
            let fd = (prob.residuals(&a) - prob.residuals(&b)) / (2.0 * h);
            for i in 0..fd.len() {
                let scale = j[(i, k)].abs().max(1e-3 / c);
                jac_err = jac_err.max((fd[i] - j[(i, k)]).abs() / scale);
            }
        }
    }
    Outcome::new(
        worst < 1e-6 && jac_err < 1e-6,
        format!("worst round-trip error {worst:.2e} m over 1000 points; Jacobian vs central differences {jac_err:.1e}"),
    )
}

fn c11_positioning() -> Outcome {
    let mut cfg = SweepConfig::new(Effect::Positioning, fir());
    cfg.iterations = 100;
    let report = run_positioning(&cfg).unwrap();
    let valid: Vec<f64> = Scheme::ALL.iter().map(|&s| report.valid_pct(s)).collect();
    let (b, q, o, c) = (valid[0], valid[1], valid[2], valid[3]);
    let order_ok = q >= b && b >= c && c >= o;
    let p90 = percentile(&report.position_errors(Scheme::ZcQpsk), 0.9).unwrap_or(f64::INFINITY);
    let mut planar = cfg.clone();
    planar.schemes = vec![Scheme::ZcQpsk];
    planar.locate.solver.dims = SolveDims::Planar;
    let pr = run_positioning(&planar).unwrap();
    let p90_planar = percentile(&pr.position_errors(Scheme::ZcQpsk), 0.9).unwrap_or(f64::INFINITY);
    Outcome::new(
        order_ok && p90 < 0.14,
        format!(
            "valid {b:.1}/{q:.1}/{o:.1}/{c:.1} % (QPSK >= BPSK >= Chirp >= OFDM: {order_ok}); \
             QPSK p90 {p90:.3} m in 3D (bound 0.14); supplementary: {p90_planar:.3} m with the height known"
        ),
    )
}

fn c12_determinism() -> Outcome {
    let mut cfg = SweepConfig::new(Effect::Multipath, fir());
    cfg.iterations = 60;
    cfg.grid = vec![3.0, 10.0];
    let mut dop = SweepConfig::new(Effect::Doppler, fir());
    dop.iterations = 30;
    dop.grid = vec![0.0, 0.7, 2.0];
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| (run_sweep(&cfg).unwrap(), run_sweep(&dop).unwrap()))
    };
    let a = run(1);
    let b = run(4);
    let bits = |t: &MetricTable| -> Vec<u64> {
        t.rows
            .iter()
            .flat_map(|r| {
                [r.grid, r.rmse_ms, r.mean_smr, r.mean_peak, r.valid_pct]
                    .into_iter()
                    .chain(r.offsets.iter().copied())
                    .map(f64::to_bits)
            })
            .collect()
    };
    let same = bits(&a.0) == bits(&b.0) && bits(&a.1) == bits(&b.1);
    Outcome::new(
        same,
        format!("multipath and Doppler reruns on 1 and 4 threads bit-identical: {same}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "ZC periodic autocorrelation",
            c01_zc_periodic_autocorrelation,
        ),
        ("Kasami family structure", c02_kasami_structure),
        ("transmit durations", c03_durations),
        ("DMT pad arithmetic", c04_dmt_pads),
        ("energy equalisation", c05_energy_equalization),
        ("noise sweep", c06_noise),
        ("near-far sweep", c07_near_far),
        ("multipath CDF", c08_multipath),
        ("Doppler sweep", c09_doppler),
        ("solver round trip", c10_solver_oracle),
        ("positioning", c11_positioning),
        ("determinism", c12_determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = format!("c{:02}", i + 1);
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|p| id.contains(p.as_str()) || name.contains(p.as_str()))
        {
            continue;
        }
        let start = Instant::now();
        let o = f();
        failed += usize::from(!o.pass);
        println!(
            "{} {id} {name} [{:.1}s]: {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
