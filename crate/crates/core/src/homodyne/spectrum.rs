//! Photocurrent spectra. Power is a two-sided density in quadrature-variance
//! units: a white trace of variance `V` has a flat floor at `V`, so the shot
//! noise floor sits at 1/2 regardless of sample rate.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::PhotocurrentTrace;
use crate::error::{Error, Result};

const MIN_SEGMENTS: usize = 4;
const MIN_SEGMENT_LEN: usize = 8;

/// Squeezed and anti-squeezed variance against sideband frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpectrum {
    pub freqs: Vec<f64>,
    pub v_plus: Vec<f64>,
    pub v_minus: Vec<f64>,
    pub meta: BTreeMap<String, f64>,
}

impl NoiseSpectrum {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["freq_hz", "v_plus", "v_minus"])?;
        for ((f, p), m) in self.freqs.iter().zip(&self.v_plus).zip(&self.v_minus) {
            out.serialize((f, p, m))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Welch-averaged periodogram of a raw trace, non-negative frequencies only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub n_segments: usize,
}

impl PowerSpectrum {
    /// Bins with `lo ≤ f ≤ hi`.
    pub fn band(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.freqs.iter().zip(&self.power).filter(move |(f, _)| **f >= lo && **f <= hi).map(|(f, p)| (*f, *p))
    }

    pub fn band_mean(&self, lo: f64, hi: f64) -> Option<f64> {
        let (n, s) = self.band(lo, hi).fold((0usize, 0.0), |(n, s), (_, p)| (n + 1, s + p));
        (n > 0).then(|| s / n as f64)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["freq_hz", "power"])?;
        for (f, p) in self.freqs.iter().zip(&self.power) {
            out.serialize((f, p))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Welch estimate with `n_segments` non-overlapping Hann-windowed segments,
/// each mean-subtracted.
pub fn spectrum(trace: &PhotocurrentTrace, n_segments: usize) -> Result<PowerSpectrum> {
    if n_segments < MIN_SEGMENTS {
        return Err(Error::invalid(format!("need at least {MIN_SEGMENTS} segments, got {n_segments}")));
    }
    let seg_len = trace.len() / n_segments;
    if seg_len < MIN_SEGMENT_LEN {
        return Err(Error::TraceTooShort(format!(
            "{} samples cannot form {n_segments} segments of {MIN_SEGMENT_LEN}",
            trace.len()
        )));
    }
    let window: Vec<f64> = (0..seg_len).map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / seg_len as f64).cos()).collect();
    let w_energy: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(seg_len);
    let n_out = seg_len / 2 + 1;
    let mut acc = vec![0.0; n_out];
    let mut buf = vec![Complex::new(0.0, 0.0); seg_len];
    for seg in trace.values.chunks_exact(seg_len).take(n_segments) {
        let mean = seg.iter().sum::<f64>() / seg_len as f64;
        for ((b, x), w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex::new((x - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let scale = trace.dt / (w_energy * n_segments as f64);
    let df = 1.0 / (seg_len as f64 * trace.dt);
    Ok(PowerSpectrum {
        freqs: (0..n_out).map(|k| k as f64 * df).collect(),
        power: acc.into_iter().map(|a| a * scale).collect(),
        n_segments,
    })
}

/// Cosine and sine components of the DFT bin nearest `freq`, scaled by
/// `√(2dt/N)` so that a white trace of quadrature variance `V` gives two
/// independent components of variance `V` each. These are the sideband
/// amplitude and phase quadratures at `±freq`.
pub fn sideband_quadratures(trace: &PhotocurrentTrace, freq: f64) -> Result<[f64; 2]> {
    let n = trace.len();
    let k = (freq * n as f64 * trace.dt).round() as usize;
    if k == 0 || 2 * k >= n {
        return Err(Error::invalid(format!("frequency {freq} Hz maps to bin {k}, outside (0, N/2)")));
    }
    let step = -2.0 * PI * k as f64 / n as f64;
    let sum = trace
        .values
        .iter()
        .enumerate()
        .fold(Complex::new(0.0, 0.0), |s, (j, &x)| s + Complex::from_polar(x, step * j as f64));
    let scale = (2.0 * trace.dt / n as f64).sqrt();
    Ok([sum.re * scale, sum.im * scale])
}
