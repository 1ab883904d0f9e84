//! FFT-backed correlation and convolution kernels shared by the modem,
//! channel and receiver layers.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Products of lengths below this are correlated directly.
const DIRECT_LIMIT: usize = 1 << 15;

pub(crate) fn fft_size(len: usize) -> usize {
    len.next_power_of_two()
}

pub(crate) fn plan(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

/// Full linear cross-correlation in matched-filter orientation:
/// `out[t + b.len() - 1] = Σ_l a[l + t] · conj(b[l])` for
/// `t ∈ [-(b.len()-1), a.len()-1]`.
pub fn xcorr_complex(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len() * b.len() <= DIRECT_LIMIT {
        xcorr_direct(a, b)
    } else {
        xcorr_fft(a, b)
    }
}

pub(crate) fn xcorr_direct(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() + b.len() - 1;
    let origin = b.len() as isize - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (idx, slot) in out.iter_mut().enumerate() {
        let t = idx as isize - origin;
        let lo = (-t).max(0) as usize;
        let hi = (a.len() as isize - t).min(b.len() as isize);
        let mut acc = Complex64::new(0.0, 0.0);
        for l in lo..hi.max(lo as isize) as usize {
            acc += a[(l as isize + t) as usize] * b[l].conj();
        }
        *slot = acc;
    }
    out
}

fn xcorr_fft(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n_out = a.len() + b.len() - 1;
    let n = fft_size(n_out);
    let (fwd, inv) = plan(n);
    // Place b reversed-conjugated so a plain convolution yields the correlation.
    let mut fa = vec![Complex64::new(0.0, 0.0); n];
    fa[..a.len()].copy_from_slice(a);
    let mut fb = vec![Complex64::new(0.0, 0.0); n];
    for (i, v) in b.iter().rev().enumerate() {
        fb[i] = v.conj();
    }
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / n as f64;
    fa.truncate(n_out);
    fa.iter_mut().for_each(|v| *v *= scale);
    fa
}

/// Real cross-correlation, same orientation as [`xcorr_complex`].
pub fn xcorr_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    let ca: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let cb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    xcorr_complex(&ca, &cb).into_iter().map(|c| c.re).collect()
}

/// Full linear convolution of two real sequences.
pub fn convolve(x: &[f64], h: &[f64]) -> Vec<f64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let n_out = x.len() + h.len() - 1;
    if x.len() * h.len() <= DIRECT_LIMIT {
        let mut out = vec![0.0; n_out];
        for (i, &xv) in x.iter().enumerate() {
            for (j, &hv) in h.iter().enumerate() {
                out[i + j] += xv * hv;
            }
        }
        return out;
    }
    let n = fft_size(n_out);
    let (fwd, inv) = plan(n);
    let mut fx = vec![Complex64::new(0.0, 0.0); n];
    let mut fh = vec![Complex64::new(0.0, 0.0); n];
    fx.iter_mut().zip(x).for_each(|(d, &s)| d.re = s);
    fh.iter_mut().zip(h).for_each(|(d, &s)| d.re = s);
    fwd.process(&mut fx);
    fwd.process(&mut fh);
    fx.iter_mut().zip(&fh).for_each(|(a, b)| *a *= *b);
    inv.process(&mut fx);
    let scale = 1.0 / n as f64;
    fx[..n_out].iter().map(|c| c.re * scale).collect()
}

/// Correlator for one fixed real pattern against many received signals.
///
/// The FFT plans and the pattern spectrum are computed once; each call only
/// allocates its own working buffer, so a single instance can be shared by
/// worker threads.
pub struct PatternCorrelator {
    pattern_len: usize,
    max_received: usize,
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    pattern_spectrum: Vec<Complex64>,
}

impl PatternCorrelator {
    pub fn new(pattern: &[f64], max_received: usize) -> Self {
        let n = fft_size(max_received + pattern.len() - 1);
        let (fwd, inv) = plan(n);
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        for (i, &v) in pattern.iter().rev().enumerate() {
            spec[i].re = v;
        }
        fwd.process(&mut spec);
        let scale = 1.0 / n as f64;
        spec.iter_mut().for_each(|v| *v *= scale);
        Self {
            pattern_len: pattern.len(),
            max_received,
            n,
            fwd,
            inv,
            pattern_spectrum: spec,
        }
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern_len
    }

    pub fn max_received(&self) -> usize {
        self.max_received
    }

    /// Correlates one received signal; output layout as [`xcorr_real`].
    pub fn correlate(&self, received: &[f64]) -> Vec<f64> {
        assert!(
            received.len() <= self.max_received,
            "received signal longer than planned"
        );
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        buf.iter_mut().zip(received).for_each(|(d, &s)| d.re = s);
        self.run(&mut buf);
        let n_out = received.len() + self.pattern_len - 1;
        buf[..n_out].iter().map(|c| c.re).collect()
    }

    /// Correlates two received signals with one transform pair by packing
    /// them into the real and imaginary lanes.
    pub fn correlate_pair(&self, first: &[f64], second: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert!(first.len() <= self.max_received && second.len() <= self.max_received);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        buf.iter_mut().zip(first).for_each(|(d, &s)| d.re = s);
        buf.iter_mut().zip(second).for_each(|(d, &s)| d.im = s);
        self.run(&mut buf);
        let n1 = first.len() + self.pattern_len - 1;
        let n2 = second.len() + self.pattern_len - 1;
        (
            buf[..n1].iter().map(|c| c.re).collect(),
            buf[..n2].iter().map(|c| c.im).collect(),
        )
    }

    fn run(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
        buf.iter_mut()
            .zip(&self.pattern_spectrum)
            .for_each(|(a, b)| *a *= *b);
        self.inv.process(buf);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn fft_and_direct_paths_agree() {
        let mut s = 7;
        let a: Vec<Complex64> = (0..300)
            .map(|_| Complex64::new(lcg(&mut s), lcg(&mut s)))
            .collect();
        let b: Vec<Complex64> = (0..200)
            .map(|_| Complex64::new(lcg(&mut s), lcg(&mut s)))
            .collect();
        let d = xcorr_direct(&a, &b);
        let f = xcorr_fft(&a, &b);
        assert_eq!(d.len(), f.len());
        for (x, y) in d.iter().zip(&f) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let mut s = 3;
        let x: Vec<f64> = (0..400).map(|_| lcg(&mut s)).collect();
        let h: Vec<f64> = (0..120).map(|_| lcg(&mut s)).collect();
        let fast = convolve(&x, &h);
        for (k, v) in fast.iter().enumerate() {
            let mut acc = 0.0;
            for (j, hv) in h.iter().enumerate() {
                if k >= j && k - j < x.len() {
                    acc += x[k - j] * hv;
                }
            }
            assert!((acc - v).abs() < 1e-9);
        }
    }

    #[test]
    fn pattern_correlator_pair_matches_single() {
        let mut s = 11;
        let p: Vec<f64> = (0..64).map(|_| lcg(&mut s)).collect();
        let r1: Vec<f64> = (0..500).map(|_| lcg(&mut s)).collect();
        let r2: Vec<f64> = (0..450).map(|_| lcg(&mut s)).collect();
        let pc = PatternCorrelator::new(&p, 500);
        let (c1, c2) = pc.correlate_pair(&r1, &r2);
        let e1 = xcorr_real(&r1, &p);
        let e2 = xcorr_real(&r2, &p);
        assert_eq!(c2.len(), e2.len());
        for (x, y) in c1.iter().zip(&e1).chain(c2.iter().zip(&e2)) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
