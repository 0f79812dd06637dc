//! Sampled photocurrents. A sample of a quadrature with variance `V` at
//! interval `dt` carries variance `V/dt`, so that the matched-filter integral
//! `∫ φ(t) I(t) dt` of a unit-norm mode function has variance `V`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::child_rng;
use crate::error::{Error, Result};

const MODE_NORM_TOL: f64 = 1e-6;
const MIN_DRIFT_SAMPLES: usize = 1 << 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotocurrentTrace {
    pub dt: f64,
    pub values: Vec<f64>,
    /// Per-sample shot-noise variance `0.5/dt`.
    pub sql_variance: f64,
}

impl PhotocurrentTrace {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("sample interval must be positive, got {dt}")));
        }
        Ok(Self { dt, values, sql_variance: 0.5 / dt })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    /// Time-domain sample variance.
    pub fn variance(&self) -> f64 {
        let n = self.values.len() as f64;
        let m = self.values.iter().sum::<f64>() / n;
        self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)
    }

    /// Sample variance relative to shot noise, in dB.
    pub fn variance_db(&self) -> f64 {
        10.0 * (self.variance() / self.sql_variance).log10()
    }
}

/// `∫ φ(t) I(t) dt`. The mode function must be sampled on the trace's grid
/// with `Σ φ² dt = 1` to within 1e-6.
pub fn matched_filter_quadrature(trace: &PhotocurrentTrace, mode_fn: &[f64]) -> Result<f64> {
    if mode_fn.len() != trace.len() {
        return Err(Error::DimensionMismatch(format!(
            "mode function has {} samples, trace has {}",
            mode_fn.len(),
            trace.len()
        )));
    }
    let norm: f64 = mode_fn.iter().map(|f| f * f).sum::<f64>() * trace.dt;
    if (norm - 1.0).abs() > MODE_NORM_TOL {
        return Err(Error::invalid(format!("mode function norm is {norm}, expected 1")));
    }
    Ok(mode_fn.iter().zip(&trace.values).map(|(f, i)| f * i).sum::<f64>() * trace.dt)
}

/// White photocurrent of a stationary quadrature with variance `quad_variance`.
pub fn white_trace(quad_variance: f64, fs: f64, n_samples: usize, seed: u64) -> Result<PhotocurrentTrace> {
    if !(quad_variance >= 0.0) {
        return Err(Error::invalid("quadrature variance must be non-negative"));
    }
    let dt = 1.0 / fs;
    let sd = (quad_variance / dt).sqrt();
    let mut rng = child_rng(seed, 0);
    PhotocurrentTrace::new(dt, (0..n_samples).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftModel {
    /// First-order Ornstein-Uhlenbeck: Lorentzian spectrum, `f⁻²` tail.
    OrnsteinUhlenbeck,
    /// Two cascaded first-order stages: `f⁻⁴` tail, so the drift stays below
    /// a few hundred kHz.
    CascadedOrnsteinUhlenbeck,
}

/// Squeezed photocurrent plus slow phase/amplitude drift of the measured quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftConfig {
    pub quad_variance: f64,
    /// RMS of the drift term in units of the shot-noise sample rms `√(0.5/dt)`.
    pub drift_amplitude: f64,
    /// Correlation time of each filter stage, seconds.
    pub drift_timescale: f64,
    pub fs: f64,
    pub duration: f64,
    pub seed: u64,
    pub model: DriftModel,
    /// Detector electronic noise, in the same units as `quad_variance`.
    pub electronic_variance: f64,
}

impl DriftConfig {
    pub fn new(quad_variance: f64, drift_amplitude: f64, drift_timescale: f64, fs: f64, duration: f64, seed: u64) -> Self {
        Self {
            quad_variance,
            drift_amplitude,
            drift_timescale,
            fs,
            duration,
            seed,
            model: DriftModel::CascadedOrnsteinUhlenbeck,
            electronic_variance: 0.0,
        }
    }
}

pub fn photocurrent_with_drift(cfg: &DriftConfig) -> Result<PhotocurrentTrace> {
    let finite_pos = |v: f64| v > 0.0 && v.is_finite();
    if !(finite_pos(cfg.fs) && finite_pos(cfg.duration) && finite_pos(cfg.drift_timescale)) {
        return Err(Error::invalid("fs, duration and drift_timescale must be positive"));
    }
    if !(cfg.quad_variance >= 0.0 && cfg.drift_amplitude >= 0.0 && cfg.electronic_variance >= 0.0) {
        return Err(Error::invalid("variances and drift amplitude must be non-negative"));
    }
    let n = (cfg.duration * cfg.fs).round() as usize;
    if n < MIN_DRIFT_SAMPLES {
        return Err(Error::invalid(format!("fs*duration = {n} samples, need at least {MIN_DRIFT_SAMPLES}")));
    }
    let dt = 1.0 / cfg.fs;
    let shot_sd = (cfg.quad_variance / dt).sqrt();
    let drift_sd = cfg.drift_amplitude * (0.5 / dt).sqrt();
    let elec_sd = (cfg.electronic_variance / dt).sqrt();

    let a = (-dt / cfg.drift_timescale).exp();
    let kick = (1.0 - a * a).sqrt();
    // second stage y_k = a y_{k-1} + (1-a) x_k has stationary variance (1+a²)/(1+a)²
    let stage2_gain = (1.0 + a) / (1.0 + a * a).sqrt();

    let mut shot = child_rng(cfg.seed, 0);
    let mut drift = child_rng(cfg.seed, 1);
    let mut elec = child_rng(cfg.seed, 2);
    let mut x: f64 = drift.sample(StandardNormal);
    let mut y = x;
    let values = (0..n)
        .map(|_| {
            x = a * x + kick * drift.sample::<f64, _>(StandardNormal);
            let d = match cfg.model {
                DriftModel::OrnsteinUhlenbeck => x,
                DriftModel::CascadedOrnsteinUhlenbeck => {
                    y = a * y + (1.0 - a) * x;
                    y * stage2_gain
                }
            };
            let mut v = shot_sd * shot.sample::<f64, _>(StandardNormal) + drift_sd * d;
            if elec_sd > 0.0 {
                v += elec_sd * elec.sample::<f64, _>(StandardNormal);
            }
            v
        })
        .collect();
    PhotocurrentTrace::new(dt, values)
}
