//! Wigner-function tomography by filtered backprojection.
//!
//! With marginals `pr(x, θ)` of `X_θ = x cosθ + p sinθ`,
//! `W(q, p) = (1/4π²) ∫₀^π dθ ∫ dx pr(x, θ) K(q cosθ + p sinθ − x)` where the
//! Ram-Lak kernel `K(y) = ∫_{−kc}^{kc} |k| e^{iky} dk` is band-limited at `kc`.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{child_rng, QuadratureDataset};
use crate::error::{Error, Result};

const MIN_PHASES: usize = 12;
/// Largest allowed gap between neighbouring phases (mod π).
const MAX_PHASE_GAP: f64 = PI / 4.0;
const PHASE_MERGE_TOL: f64 = 1e-9;
/// Default cutoff relative to the MSE-optimal one for a Gaussian with the data's moments.
const CUTOFF_FACTOR: f64 = 1.5;

/// `K(y) = 2[(cos(kc y) − 1)/y² + kc sin(kc y)/y]`, `K(0) = kc²`.
pub fn ram_lak_kernel(y: f64, kc: f64) -> f64 {
    let u = kc * y;
    if u.abs() < 1e-3 {
        kc * kc * (1.0 - u * u / 4.0)
    } else {
        2.0 * kc * kc * ((u.cos() - 1.0) / (u * u) + u.sin() / u)
    }
}

/// Phases folded into `[0, π)` (with `x → −x` for the upper half), sorted,
/// each with its backprojection weight `Δθ`.
struct Projections {
    phases: Vec<f64>,
    weights: Vec<f64>,
    samples: Vec<Vec<f64>>,
}

impl Projections {
    fn new(data: &QuadratureDataset) -> Result<Self> {
        let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
        for &(theta, x) in &data.samples {
            if !theta.is_finite() || !x.is_finite() {
                return Err(Error::invalid("non-finite sample"));
            }
            let t = theta.rem_euclid(2.0 * PI);
            let (t, x) = if t >= PI { (t - PI, -x) } else { (t, x) };
            let t = if PI - t < PHASE_MERGE_TOL { 0.0 } else { t };
            match groups.iter_mut().find(|(g, _)| (g - t).abs() < PHASE_MERGE_TOL) {
                Some((_, xs)) => xs.push(x),
                None => groups.push((t, vec![x])),
            }
        }
        if groups.len() < MIN_PHASES {
            return Err(Error::InsufficientPhases(format!(
                "{} distinct phases mod π, need at least {MIN_PHASES}",
                groups.len()
            )));
        }
        groups.sort_by(|a, b| a.0.total_cmp(&b.0));
        let m = groups.len();
        let phases: Vec<f64> = groups.iter().map(|g| g.0).collect();
        let gap = |j: usize| if j + 1 < m { phases[j + 1] - phases[j] } else { phases[0] + PI - phases[m - 1] };
        if let Some(max_gap) = (0..m).map(gap).reduce(f64::max) {
            if max_gap > MAX_PHASE_GAP {
                return Err(Error::InsufficientPhases(format!(
                    "phases leave a gap of {max_gap:.3} rad in [0, π)"
                )));
            }
        }
        let weights = (0..m).map(|j| 0.5 * (gap(j) + gap((j + m - 1) % m))).collect();
        Ok(Self { phases, weights, samples: groups.into_iter().map(|g| g.1).collect() })
    }

    fn total(&self) -> usize {
        self.samples.iter().map(Vec::len).sum()
    }

    fn sample_variance(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)
    }

    /// Least-squares fit of `Var(X_θ) = a cos²θ + 2b sinθ cosθ + c sin²θ`,
    /// returned as the variance function `s(θ)` clamped away from zero.
    fn fitted_variance(&self) -> impl Fn(f64) -> f64 {
        let mut ata = [[0.0; 3]; 3];
        let mut atb = [0.0; 3];
        for (t, xs) in self.phases.iter().zip(&self.samples) {
            let row = [t.cos().powi(2), 2.0 * t.sin() * t.cos(), t.sin().powi(2)];
            let v = Self::sample_variance(xs);
            for i in 0..3 {
                atb[i] += row[i] * v;
                for j in 0..3 {
                    ata[i][j] += row[i] * row[j];
                }
            }
        }
        let a = crate::linalg::Matrix::from_rows(&ata.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        let coef = a
            .ok()
            .and_then(|m| m.inverse().ok())
            .map(|inv| inv.mul_vec(&atb))
            .unwrap_or_else(|| vec![0.5, 0.0, 0.5]);
        let floor = 1e-3;
        move |t: f64| {
            (coef[0] * t.cos().powi(2) + 2.0 * coef[1] * t.sin() * t.cos() + coef[2] * t.sin().powi(2)).max(floor)
        }
    }
}

/// Cutoff minimizing the integrated squared error of the reconstruction of a
/// Gaussian with the data's fitted covariance, times 1.5.
///
/// Bias: `(1/4π²) ∫₀^{2π} e^{−kc² s(θ)} / (2 s(θ)) dθ` (spectral content beyond
/// `kc`). Noise: `R kc³ / (6π N)` over a disk of radius `R = 3 √max s`.
pub fn default_filter_cutoff(data: &QuadratureDataset) -> Result<f64> {
    let proj = Projections::new(data)?;
    Ok(CUTOFF_FACTOR * gaussian_optimal_cutoff(&proj))
}

fn gaussian_optimal_cutoff(proj: &Projections) -> f64 {
    let s = proj.fitted_variance();
    let n_angles = 360;
    let svals: Vec<f64> = (0..n_angles).map(|k| s(2.0 * PI * k as f64 / n_angles as f64)).collect();
    let s_max = svals.iter().cloned().fold(0.0, f64::max);
    let radius = 3.0 * s_max.sqrt();
    let n = proj.total() as f64;
    let ise = |kc: f64| {
        let bias = svals.iter().map(|&sv| (-kc * kc * sv).exp() / (2.0 * sv)).sum::<f64>() * (2.0 * PI / n_angles as f64)
            / (4.0 * PI * PI);
        bias + radius * kc.powi(3) / (6.0 * PI * n)
    };
    (0..=600)
        .map(|i| 0.5 * 200f64.powf(i as f64 / 600.0))
        .min_by(|a, b| ise(*a).total_cmp(&ise(*b)))
        .expect("scan grid is non-empty")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerEstimate {
    pub points: Vec<[f64; 2]>,
    pub values: Vec<f64>,
    pub filter_cutoff: f64,
    pub n_phases: usize,
}

/// Filtered-backprojection estimate of `W` at `grid`. `filter_cutoff = None`
/// uses [`default_filter_cutoff`].
pub fn reconstruct_wigner(
    data: &QuadratureDataset,
    grid: &[[f64; 2]],
    filter_cutoff: Option<f64>,
) -> Result<WignerEstimate> {
    let proj = Projections::new(data)?;
    let kc = match filter_cutoff {
        Some(kc) if kc > 0.0 && kc.is_finite() => kc,
        Some(kc) => return Err(Error::invalid(format!("filter cutoff must be positive, got {kc}"))),
        None => CUTOFF_FACTOR * gaussian_optimal_cutoff(&proj),
    };
    let reach = grid.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
    // filtered projections are smooth on the scale 1/kc; tabulate finely and interpolate
    let h = (0.1 / kc).min(0.01);
    let n_tab = (2.0 * reach / h).ceil() as usize + 3;
    let y0 = -reach - h;
    let tables: Vec<Vec<f64>> = proj.samples.par_iter().map(|xs| filtered_projection(xs, kc, y0, h, n_tab)).collect();
    let trig: Vec<(f64, f64)> = proj.phases.iter().map(|t| (t.cos(), t.sin())).collect();
    let norm = 1.0 / (4.0 * PI * PI);
    let values = grid
        .par_iter()
        .map(|&[q, p]| {
            let mut w = 0.0;
            for ((tab, &(c, s)), wt) in tables.iter().zip(&trig).zip(&proj.weights) {
                let pos = (q * c + p * s - y0) / h;
                let i = (pos.floor() as usize).min(n_tab - 2);
                let f = pos - i as f64;
                w += wt * (tab[i] * (1.0 - f) + tab[i + 1] * f);
            }
            w * norm
        })
        .collect();
    Ok(WignerEstimate { points: grid.to_vec(), values, filter_cutoff: kc, n_phases: proj.phases.len() })
}

/// `(1/n) Σ_i K(y_k − x_i)` on `y_k = y0 + k h`. Samples are spread linearly
/// onto the two nearest grid nodes and convolved with the tabulated kernel;
/// the binning error is `O((kc h)²)`.
fn filtered_projection(xs: &[f64], kc: f64, y0: f64, h: f64, n_tab: usize) -> Vec<f64> {
    let pos: Vec<f64> = xs.iter().map(|x| (x - y0) / h).collect();
    let lo = pos.iter().map(|p| p.floor() as i64).min().unwrap_or(0);
    let hi = pos.iter().map(|p| p.floor() as i64 + 1).max().unwrap_or(0);
    let mut hist = vec![0.0; (hi - lo + 1) as usize];
    for p in &pos {
        let i = p.floor();
        let f = p - i;
        let k = (i as i64 - lo) as usize;
        hist[k] += 1.0 - f;
        hist[k + 1] += f;
    }
    // offsets k − m range over [−hi, n_tab − 1 − lo]
    let off0 = -hi;
    let kernel: Vec<f64> = (off0..=(n_tab as i64 - 1 - lo)).map(|o| ram_lak_kernel(o as f64 * h, kc)).collect();
    let inv_n = 1.0 / xs.len() as f64;
    (0..n_tab as i64)
        .map(|k| {
            hist.iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(m, w)| w * kernel[(k - (m as i64 + lo) - off0) as usize])
                .sum::<f64>()
                * inv_n
        })
        .collect()
}

fn wigner_at_direct(proj: &Projections, samples: &[Vec<f64>], point: [f64; 2], kc: f64) -> f64 {
    let mut w = 0.0;
    for ((t, xs), wt) in proj.phases.iter().zip(samples).zip(&proj.weights) {
        let y = point[0] * t.cos() + point[1] * t.sin();
        w += wt * xs.iter().map(|x| ram_lak_kernel(y - x, kc)).sum::<f64>() / xs.len() as f64;
    }
    w / (4.0 * PI * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapEstimate {
    pub value: f64,
    pub std_err: f64,
    pub filter_cutoff: f64,
}

/// `W(point)` with a bootstrap standard error: samples are resampled with
/// replacement within each phase, `n_boot` times.
pub fn bootstrap_wigner(
    data: &QuadratureDataset,
    point: [f64; 2],
    filter_cutoff: Option<f64>,
    n_boot: usize,
    seed: u64,
) -> Result<BootstrapEstimate> {
    if n_boot < 2 {
        return Err(Error::invalid("bootstrap needs at least two replicates"));
    }
    let proj = Projections::new(data)?;
    let kc = filter_cutoff.unwrap_or_else(|| CUTOFF_FACTOR * gaussian_optimal_cutoff(&proj));
    let value = wigner_at_direct(&proj, &proj.samples, point, kc);
    let reps: Vec<f64> = (0..n_boot)
        .into_par_iter()
        .map(|b| {
            let mut rng = child_rng(seed, b as u64);
            let resampled: Vec<Vec<f64>> = proj
                .samples
                .iter()
                .map(|xs| (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())]).collect())
                .collect();
            wigner_at_direct(&proj, &resampled, point, kc)
        })
        .collect();
    let mean = reps.iter().sum::<f64>() / n_boot as f64;
    let var = reps.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n_boot - 1) as f64;
    Ok(BootstrapEstimate { value, std_err: var.sqrt(), filter_cutoff: kc })
}

/// Ratio of principal standard deviations of the region where `W` exceeds
/// half its maximum, from `W`-weighted second moments. Assumes a uniform grid.
pub fn principal_axis_ratio(points: &[[f64; 2]], values: &[f64]) -> Result<f64> {
    if points.len() != values.len() || points.is_empty() {
        return Err(Error::DimensionMismatch("points and values must be non-empty and equal in length".into()));
    }
    let peak = values.iter().cloned().fold(f64::MIN, f64::max);
    if !(peak > 0.0) {
        return Err(Error::invalid("Wigner estimate has no positive peak"));
    }
    let region: Vec<([f64; 2], f64)> =
        points.iter().zip(values).filter(|(_, v)| **v >= 0.5 * peak).map(|(p, v)| (*p, *v)).collect();
    let total: f64 = region.iter().map(|r| r.1).sum();
    let mx = region.iter().map(|(p, v)| p[0] * v).sum::<f64>() / total;
    let my = region.iter().map(|(p, v)| p[1] * v).sum::<f64>() / total;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (p, v) in &region {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += v * dx * dx;
        sxy += v * dx * dy;
        syy += v * dy * dy;
    }
    let tr = (sxx + syy) / 2.0;
    let disc = (((sxx - syy) / 2.0).powi(2) + sxy * sxy).sqrt();
    let (lo, hi) = (tr - disc, tr + disc);
    if !(lo > 0.0) {
        return Err(Error::invalid("half-maximum region is degenerate"));
    }
    Ok((hi / lo).sqrt())
}
