//! File formats: complex sequences as CSV, waveforms as raw float32 with a
//! text sidecar or as mono WAV, and FIR taps as one coefficient per line.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::waveform::{Scheme, Waveform};

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Writes one `re,im` pair per line.
pub fn write_sequence_csv<W: Write>(values: &[Complex64], mut out: W) -> Result<()> {
    for v in values {
        writeln!(out, "{},{}", v.re, v.im)?;
    }
    Ok(())
}

/// Reads `re,im` (or a bare `re`) per line; blank lines and `#` comments are
/// skipped.
pub fn read_sequence_csv<R: BufRead>(input: R) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let parse = |s: Option<&str>| -> Result<f64> {
            s.unwrap_or("0")
                .parse()
                .map_err(|_| Error::Io(format!("line {}: cannot parse '{line}'", n + 1)))
        };
        let re = parse(parts.next())?;
        let im = parse(parts.next())?;
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

/// Coefficients, one per line (blank lines and `#` comments skipped).
pub fn read_fir_taps(path: &Path) -> Result<Vec<f64>> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut taps = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t
            .split(',')
            .next()
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| io_err(path, format!("line {}: '{t}' is not a number", n + 1)))?;
        taps.push(v);
    }
    if taps.is_empty() {
        return Err(io_err(path, "no coefficients"));
    }
    Ok(taps)
}

pub fn write_fir_taps(path: &Path, taps: &[f64]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path).map_err(|e| io_err(path, e))?);
    for t in taps {
        writeln!(out, "{t}")?;
    }
    Ok(())
}

/// Sidecar path of a raw waveform file: the same name with `.txt` appended.
pub fn sidecar_path(raw: &Path) -> PathBuf {
    let mut s = raw.as_os_str().to_owned();
    s.push(".txt");
    PathBuf::from(s)
}

/// Writes little-endian float32 samples plus a `key = value` sidecar with
/// the sample rate, scheme and beacon id.
pub fn write_raw_f32(path: &Path, w: &Waveform) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path).map_err(|e| io_err(path, e))?);
    for &s in &w.samples {
        out.write_all(&(s as f32).to_le_bytes())?;
    }
    out.flush()?;
    let side = sidecar_path(path);
    let mut meta = format!("sample_rate = {}\n", w.sample_rate);
    if let Some(s) = w.scheme {
        meta.push_str(&format!("scheme = {}\n", s.label()));
    }
    if let Some(b) = w.beacon_id {
        meta.push_str(&format!("beacon_id = {b}\n"));
    }
    fs::write(&side, meta).map_err(|e| io_err(&side, e))
}

/// Reads a raw float32 file. The sample rate comes from `sample_rate` if
/// given, otherwise from the sidecar next to the file.
pub fn read_raw_f32(path: &Path, sample_rate: Option<f64>) -> Result<Waveform> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.len() % 4 != 0 {
        return Err(io_err(path, "length is not a multiple of 4 bytes"));
    }
    let samples: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let (mut rate, mut scheme, mut beacon) = (sample_rate, None, None);
    let side = sidecar_path(path);
    if let Ok(text) = fs::read_to_string(&side) {
        for line in text.lines() {
            let Some((k, v)) = line.split_once(['=', ':']) else {
                continue;
            };
            let v = v.trim().trim_matches('"');
            match k.trim() {
                "sample_rate" | "f_s" | "fs" if rate.is_none() => {
                    rate = Some(
                        v.parse()
                            .map_err(|_| io_err(&side, format!("bad sample rate '{v}'")))?,
                    )
                }
                "scheme" => scheme = v.parse::<Scheme>().ok(),
                "beacon_id" | "beacon" => beacon = v.parse::<usize>().ok(),
                _ => {}
            }
        }
    }
    let rate =
        rate.ok_or_else(|| io_err(path, "sample rate unknown: no sidecar and none given"))?;
    let mut w = Waveform::new(samples, rate)?;
    w.scheme = scheme;
    w.beacon_id = beacon;
    Ok(w)
}

/// Mono 32-bit float WAV.
pub fn write_wav(path: &Path, w: &Waveform) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: w.sample_rate.round() as u32,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut out = hound::WavWriter::create(path, spec).map_err(|e| io_err(path, e))?;
    for &s in &w.samples {
        out.write_sample(s as f32).map_err(|e| io_err(path, e))?;
    }
    out.finalize().map_err(|e| io_err(path, e))
}

/// Reads a mono WAV capture (16-bit integer or 32-bit float). Integer
/// samples are scaled to [−1, 1).
pub fn read_wav(path: &Path) -> Result<Waveform> {
    let mut r = hound::WavReader::open(path).map_err(|e| io_err(path, e))?;
    let spec = r.spec();
    if spec.channels != 1 {
        return Err(io_err(
            path,
            format!("{} channels, expected a mono capture", spec.channels),
        ));
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => r
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| io_err(path, e))?,
        (hound::SampleFormat::Float, 32) => r
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| io_err(path, e))?,
        (fmt, bits) => {
            return Err(io_err(
                path,
                format!("unsupported sample format {fmt:?}/{bits} bit"),
            ))
        }
    };
    Waveform::new(samples, spec.sample_rate as f64)
}

/// Loads a capture: `.wav` files through [`read_wav`], anything else as raw
/// float32 with a sidecar or the given rate.
pub fn read_capture(path: &Path, sample_rate: Option<f64>) -> Result<Waveform> {
    let is_wav = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
    if is_wav {
        read_wav(path)
    } else {
        read_raw_f32(path, sample_rate)
    }
}
