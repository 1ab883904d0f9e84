use std::io::Write;

use crate::error::{Error, Result};
use crate::waveform::Scheme;

/// Root-mean-square of `errors` (s), returned in milliseconds.
pub fn compute_rmse(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::Empty("error list"));
    }
    let ms = errors.iter().map(|e| (e * 1e3).powi(2)).sum::<f64>() / errors.len() as f64;
    Ok(ms.sqrt())
}

/// Empirical CDF `P(e ≤ x)` at each abscissa.
pub fn compute_cdf(errors: &[f64], abscissae: &[f64]) -> Result<Vec<f64>> {
    if errors.is_empty() {
        return Err(Error::Empty("error list"));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(abscissae
        .iter()
        .map(|&x| sorted.partition_point(|&e| e <= x) as f64 / n)
        .collect())
}

/// Value below which a fraction `q` of the samples fall (nearest rank).
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("sample list"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[rank - 1])
}

/// Aggregated results of one scheme at one grid value.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub grid: f64,
    pub scheme: Scheme,
    /// Trials run.
    pub n: usize,
    /// Absolute peak-position errors (s), one per trial.
    pub errors: Vec<f64>,
    /// Signed detected lag minus true delay (s), one per trial.
    pub offsets: Vec<f64>,
    pub rmse_ms: f64,
    pub mean_smr: f64,
    /// Mean main-peak height relative to the clean static correlation peak.
    pub mean_peak: f64,
    /// Percentage of trials passing peak validation (or the beacon gate for
    /// positioning runs).
    pub valid_pct: f64,
}

impl MetricRow {
    pub fn zero_error_fraction(&self) -> f64 {
        self.errors.iter().filter(|&&e| e == 0.0).count() as f64 / self.n.max(1) as f64
    }

    pub fn mean_offset_ms(&self) -> f64 {
        self.offsets.iter().sum::<f64>() / self.offsets.len().max(1) as f64 * 1e3
    }
}

/// Rows in grid-major, scheme-minor order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricTable {
    pub rows: Vec<MetricRow>,
}

impl MetricTable {
    pub fn scheme_rows(&self, scheme: Scheme) -> impl Iterator<Item = &MetricRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }

    pub fn at(&self, scheme: Scheme, grid: f64) -> Option<&MetricRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && (r.grid - grid).abs() < 1e-9)
    }

    /// Long-format CSV: `grid,scheme,metric,value,n`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "grid,scheme,metric,value,n")?;
        for r in &self.rows {
            let metrics = [
                ("rmse_ms", r.rmse_ms),
                ("mean_smr", r.mean_smr),
                ("mean_peak", r.mean_peak),
                ("valid_pct", r.valid_pct),
                ("mean_offset_ms", r.mean_offset_ms()),
                ("zero_error_pct", 100.0 * r.zero_error_fraction()),
            ];
            for (name, v) in metrics {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.grid,
                    r.scheme.label(),
                    name,
                    v,
                    r.n
                )?;
            }
        }
        Ok(())
    }

    /// Empirical CDF of the absolute errors at `abscissae` (s), one row per
    /// grid value, scheme and abscissa: `grid,scheme,error_ms,cdf,n`.
    pub fn write_cdf_csv<W: Write>(&self, abscissae: &[f64], mut out: W) -> Result<()> {
        writeln!(out, "grid,scheme,error_ms,cdf,n")?;
        for r in &self.rows {
            if r.errors.is_empty() {
                continue;
            }
            for (x, p) in abscissae.iter().zip(compute_cdf(&r.errors, abscissae)?) {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.grid,
                    r.scheme.label(),
                    x * 1e3,
                    p,
                    r.n
                )?;
            }
        }
        Ok(())
    }
}
