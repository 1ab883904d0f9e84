use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use alps::bench::{
    compute_cdf, detect_beacons, locate_decisions, percentile, run_positioning, run_sweep,
    synthesize_capture, Effect,
};
use alps::channel::Environment;
use alps::io::{read_capture, write_raw_f32, write_sequence_csv, write_wav};
use alps::locate::Point;
use alps::modem::SchemeSet;
use alps::receiver::{ambiguity_surface, PeakStatus};
use alps::{Config, Scheme};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;

// stdout writes propagate errors so a closed pipe ends the run quietly
macro_rules! out {
    ($($t:tt)*) => {
        writeln!(std::io::stdout(), $($t)*)?
    };
}

/// Acoustic local positioning simulator.
#[derive(Parser)]
#[command(name = "alps", version)]
struct Cli {
    /// TOML configuration; every key is optional.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Overrides `sweep.output_dir`.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Code sequences as `re,im` lines.
    Csv,
    /// Energy-equalised patterns as f32 little-endian with a text sidecar.
    Raw,
    /// Energy-equalised patterns as mono float WAV.
    Wav,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write sequences or transmit patterns, or simulate a capture.
    Gen {
        #[arg(short, long, value_parser = parse_scheme)]
        scheme: Vec<Scheme>,
        #[arg(short, long, value_enum, default_value = "csv")]
        format: Format,
        /// Instead of patterns, write one simulated recording heard at
        /// `x,y,z` (raw or wav format).
        #[arg(long, value_parser = parse_point)]
        capture: Option<Point>,
        /// SNR (dB) of the simulated recording; default noiseless.
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run one Monte Carlo effect sweep.
    Sweep {
        #[arg(value_parser = parse_effect)]
        effect: Effect,
        #[arg(short, long)]
        iterations: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        full_scale: bool,
    },
    /// Run the positioning experiment over the test points.
    Position {
        #[arg(short, long)]
        iterations: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        full_scale: bool,
    },
    /// Correlation magnitude against receiver speed and lag.
    Ambiguity {
        #[arg(short, long, value_parser = parse_scheme)]
        scheme: Vec<Scheme>,
        #[arg(short, long, default_value_t = 0)]
        beacon: usize,
    },
    /// Detect every beacon in a recording and solve the position.
    Ingest {
        file: PathBuf,
        #[arg(short, long, value_parser = parse_scheme)]
        scheme: Scheme,
        /// Sample rate of a raw file without a sidecar.
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Print the effective configuration as TOML.
    Config,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: alps::Error| e.to_string())
}

fn parse_effect(s: &str) -> Result<Effect, String> {
    s.parse().map_err(|e: alps::Error| e.to_string())
}

fn parse_point(s: &str) -> Result<Point, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "expected x,y,z".to_string())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        if let Some(io) = e.downcast_ref::<std::io::Error>() {
            if io.kind() == std::io::ErrorKind::BrokenPipe {
                return;
            }
        }
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(o) = cli.out {
        cfg.sweep.output_dir = o;
    }
    let out_dir = cfg.resolve(&cfg.sweep.output_dir.clone());
    match cli.cmd {
        Cmd::Config => write!(std::io::stdout(), "{}", cfg.to_toml()?)?,
        Cmd::Gen {
            scheme,
            format,
            capture,
            snr,
            seed,
        } => gen(&cfg, &out_dir, or_all(scheme), format, capture, snr, seed)?,
        Cmd::Sweep {
            effect,
            iterations,
            seed,
            full_scale,
        } => {
            apply_run_overrides(&mut cfg, iterations, seed, full_scale);
            if effect == Effect::Positioning {
                position(&cfg, &out_dir)?;
            } else {
                sweep(&cfg, &out_dir, effect)?;
            }
        }
        Cmd::Position {
            iterations,
            seed,
            full_scale,
        } => {
            apply_run_overrides(&mut cfg, iterations, seed, full_scale);
            position(&cfg, &out_dir)?;
        }
        Cmd::Ambiguity { scheme, beacon } => ambiguity(&cfg, &out_dir, or_all(scheme), beacon)?,
        Cmd::Ingest { file, scheme, rate } => ingest(&cfg, &file, scheme, rate)?,
    }
    Ok(())
}

fn or_all(s: Vec<Scheme>) -> Vec<Scheme> {
    if s.is_empty() {
        Scheme::ALL.to_vec()
    } else {
        s
    }
}

fn apply_run_overrides(
    cfg: &mut Config,
    iterations: Option<usize>,
    seed: Option<u64>,
    full_scale: bool,
) {
    if let Some(n) = iterations {
        cfg.sweep.iterations = n;
    }
    if let Some(s) = seed {
        cfg.sweep.seed = s;
    }
    cfg.sweep.full_scale |= full_scale;
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(f)))
}

fn slug(s: Scheme) -> String {
    s.label().to_ascii_lowercase()
}

fn gen(
    cfg: &Config,
    dir: &Path,
    schemes: Vec<Scheme>,
    format: Format,
    capture: Option<Point>,
    snr: Option<f64>,
    seed: u64,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    if let Format::Csv = format {
        if capture.is_some() {
            bail!("captures are written as raw or wav");
        }
        for s in schemes {
            for (k, seq) in cfg.scheme.sequences(s)?.iter().enumerate() {
                let (path, mut w) = create(dir, &format!("{}_b{k}.csv", slug(s)))?;
                write_sequence_csv(&seq.values, &mut w)?;
                w.flush()?;
                out!("{}", path.display());
            }
        }
        return Ok(());
    }
    let fir = cfg.fir()?;
    // equalised against all four schemes so a subset keeps the same scaling
    let set = SchemeSet::build(&cfg.scheme, &Scheme::ALL, &fir)?;
    let ext = if let Format::Wav = format {
        "wav"
    } else {
        "f32"
    };
    let write = |path: &Path, w: &alps::Waveform| -> Result<()> {
        match format {
            Format::Wav => write_wav(path, w)?,
            _ => write_raw_f32(path, w)?,
        }
        out!("{}", path.display());
        Ok(())
    };
    match capture {
        Some(point) => {
            let env = Environment {
                snr_db: snr,
                ..cfg.environment
            };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for &s in &schemes {
                let mut w = synthesize_capture(
                    patterns(&set, s),
                    &fir,
                    &cfg.locate,
                    point,
                    &env,
                    1e-3,
                    &mut rng,
                )?;
                w.scheme = Some(s);
                // keep float WAV within full scale
                let peak = w.peak();
                if peak > 0.0 {
                    w = w.scaled(0.9 / peak);
                }
                write(&dir.join(format!("capture_{}.{ext}", slug(s))), &w)?;
            }
        }
        None => {
            for &s in &schemes {
                for (k, w) in patterns(&set, s).iter().enumerate() {
                    write(&dir.join(format!("{}_b{k}.{ext}", slug(s))), w)?;
                }
                let af = set.report.attenuation_of(s, 0).unwrap_or(f64::NAN);
                eprintln!("{}: attenuation factor {af:.3}", s.label());
            }
        }
    }
    Ok(())
}

fn patterns(set: &SchemeSet, s: Scheme) -> &[alps::Waveform] {
    set.patterns_of(s).expect("set holds every scheme")
}

fn sweep(cfg: &Config, dir: &Path, effect: Effect) -> Result<()> {
    let sc = cfg.sweep_config(effect)?;
    eprintln!(
        "{effect}: {} grid points x {} schemes x {} iterations",
        sc.grid.len(),
        sc.schemes.len(),
        sc.iterations
    );
    let table = run_sweep(&sc)?;
    let (path, mut w) = create(dir, &format!("{}.csv", effect.name()))?;
    table.write_csv(&mut w)?;
    w.flush()?;
    out!("{}", path.display());
    if effect == Effect::Multipath {
        let (path, mut w) = create(dir, "multipath_cdf.csv")?;
        table.write_cdf_csv(&cfg.sweep.cdf_abscissae()?, &mut w)?;
        w.flush()?;
        out!("{}", path.display());
    }
    Ok(())
}

fn position(cfg: &Config, dir: &Path) -> Result<()> {
    let sc = cfg.sweep_config(Effect::Positioning)?;
    eprintln!(
        "positioning: {} points x {} schemes x {} iterations",
        sc.grid.len(),
        sc.schemes.len(),
        sc.iterations
    );
    let report = run_positioning(&sc)?;
    let (path, mut w) = create(dir, "positioning.csv")?;
    report.table.write_csv(&mut w)?;
    w.flush()?;
    out!("{}", path.display());
    let (path, mut w) = create(dir, "positioning_log.csv")?;
    report.write_log_csv(&mut w)?;
    w.flush()?;
    out!("{}", path.display());

    let xs: Vec<f64> = (0..=200).map(|i| i as f64 * 0.005).collect();
    let (path, mut w) = create(dir, "positioning_cdf.csv")?;
    writeln!(w, "grid,scheme,metric,value,n")?;
    for &s in &sc.schemes {
        let errors = report.position_errors(s);
        if errors.is_empty() {
            eprintln!("{:>9}: no fixes", s.label());
            continue;
        }
        for (x, p) in xs.iter().zip(compute_cdf(&errors, &xs)?) {
            writeln!(w, "{x},{},cdf,{p},{}", s.label(), errors.len())?;
        }
        eprintln!(
            "{:>9}: fixes {:5.1}%  p50 {:.3} m  p90 {:.3} m",
            s.label(),
            report.valid_pct(s),
            percentile(&errors, 0.5)?,
            percentile(&errors, 0.9)?
        );
    }
    w.flush()?;
    out!("{}", path.display());
    Ok(())
}

fn ambiguity(cfg: &Config, dir: &Path, schemes: Vec<Scheme>, beacon: usize) -> Result<()> {
    let fir = cfg.fir()?;
    let set = SchemeSet::build(&cfg.scheme, &schemes, &fir)?;
    let speeds = cfg.ambiguity.speeds.values()?;
    let max_lag = (cfg.ambiguity.max_lag * cfg.scheme.sample_rate).round() as usize;
    let (path, mut w) = create(dir, "ambiguity.csv")?;
    let (peaks_path, mut pw) = create(dir, "ambiguity_peaks.csv")?;
    writeln!(w, "speed,scheme,lag_s,magnitude")?;
    writeln!(pw, "grid,scheme,metric,value,n")?;
    for (i, &s) in schemes.iter().enumerate() {
        let pattern = set.patterns[i]
            .get(beacon)
            .with_context(|| format!("no beacon {beacon}"))?;
        let surf = ambiguity_surface(pattern, &fir, &speeds, &cfg.environment, max_lag)?;
        for (v, row) in surf.speeds.iter().zip(&surf.magnitude) {
            for (lag, m) in surf.lags.iter().zip(row) {
                writeln!(w, "{v},{},{lag},{m}", s.label())?;
            }
        }
        for (v, (lag, m)) in surf.speeds.iter().zip(surf.row_peaks()) {
            writeln!(pw, "{v},{},peak_lag_ms,{},1", s.label(), lag * 1e3)?;
            writeln!(pw, "{v},{},peak_value,{m},1", s.label())?;
        }
    }
    w.flush()?;
    pw.flush()?;
    out!("{}\n{}", path.display(), peaks_path.display());
    Ok(())
}

fn ingest(cfg: &Config, file: &Path, scheme: Scheme, rate: Option<f64>) -> Result<()> {
    let capture = read_capture(file, rate)?;
    if (capture.sample_rate - cfg.scheme.sample_rate).abs() > 1e-6 {
        bail!(
            "capture is sampled at {} Hz, patterns at {} Hz",
            capture.sample_rate,
            cfg.scheme.sample_rate
        );
    }
    let fir = cfg.fir()?;
    let set = SchemeSet::build(&cfg.scheme, &[scheme], &fir)?;
    let decisions = detect_beacons(&capture, &set.patterns[0], &cfg.receiver)?;
    out!("beacon,status,toa_s,peak");
    for (k, d) in decisions.iter().enumerate() {
        let status = match d.status {
            PeakStatus::Valid => "valid",
            PeakStatus::Discarded => "discarded",
        };
        let toa = d.toa.map(|t| format!("{t:.7}")).unwrap_or_default();
        out!("{k},{status},{toa},{:.4}", d.main_peak_value);
    }
    let (toa, fix) = locate_decisions(&decisions, &cfg.locate, &cfg.environment)?;
    let [x, y, z] = fix.position;
    out!(
        "position {x:.4} {y:.4} {z:.4}  reference {}  iterations {}  residual {:.3e} s{}",
        toa.reference,
        fix.iterations,
        fix.residual,
        if fix.converged {
            ""
        } else {
            "  (not converged)"
        }
    );
    Ok(())
}
