//! Homodyne measurement: quadrature sampling, photocurrent traces, spectra and
//! Wigner-function tomography. The local oscillator is a classical phase
//! reference; all quadrature values are in vacuum-variance-1/2 units.

mod spectrum;
mod tomography;
mod trace;

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockState};
use crate::gaussian::{check_mode, GaussianState};

pub use spectrum::{sideband_quadratures, spectrum, NoiseSpectrum, PowerSpectrum};
pub use tomography::{
    bootstrap_wigner, default_filter_cutoff, BootstrapEstimate, principal_axis_ratio, reconstruct_wigner, ram_lak_kernel,
    WignerEstimate,
};
pub use trace::{
    matched_filter_quadrature, photocurrent_with_drift, white_trace, DriftConfig, DriftModel, PhotocurrentTrace,
};

/// Deterministic child generator: one independent ChaCha stream per task index.
pub fn child_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Homodyne record: `(θ, x)` pairs with `θ ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureDataset {
    pub samples: Vec<(f64, f64)>,
    pub source_meta: String,
    pub rng_seed: u64,
}

/// What to measure: a Gaussian state, a pure Fock state, or a density operator.
#[derive(Debug, Clone, Copy)]
pub enum QuadratureSource<'a> {
    Gaussian(&'a GaussianState<f64>),
    Fock(&'a FockState<f64>),
    Density(&'a DensityMatrix<f64>),
}

impl<'a> From<&'a GaussianState<f64>> for QuadratureSource<'a> {
    fn from(s: &'a GaussianState<f64>) -> Self {
        Self::Gaussian(s)
    }
}

impl<'a> From<&'a FockState<f64>> for QuadratureSource<'a> {
    fn from(s: &'a FockState<f64>) -> Self {
        Self::Fock(s)
    }
}

impl<'a> From<&'a DensityMatrix<f64>> for QuadratureSource<'a> {
    fn from(s: &'a DensityMatrix<f64>) -> Self {
        Self::Density(s)
    }
}

/// Normalized harmonic-oscillator eigenfunctions `ψ_0..ψ_{d−1}` at `x`, by the
/// three-term recursion `ψ_{n+1} = √(2/(n+1)) x ψ_n − √(n/(n+1)) ψ_{n−1}`.
pub fn hermite_functions(x: f64, d: usize) -> Vec<f64> {
    let mut psi = vec![0.0; d];
    if d == 0 {
        return psi;
    }
    psi[0] = PI.powf(-0.25) * (-x * x / 2.0).exp();
    if d > 1 {
        psi[1] = 2f64.sqrt() * x * psi[0];
    }
    for n in 1..d.saturating_sub(1) {
        let nf = n as f64;
        psi[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
    }
    psi
}

const PDF_GRID_POINTS: usize = 8001;

/// Tabulated inverse CDF of `X_θ` for a single-mode density operator.
struct QuadratureSampler {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl QuadratureSampler {
    /// `rho` is row-major `d×d`; the distribution is
    /// `p(x) = Σ ρ_mn e^{−i(m−n)θ} ψ_m(x) ψ_n(x)`.
    fn new(rho: &[Complex<f64>], d: usize, theta: f64) -> Self {
        let half_width = (2.0 * d as f64).sqrt() + 5.0;
        let h = 2.0 * half_width / (PDF_GRID_POINTS - 1) as f64;
        let xs: Vec<f64> = (0..PDF_GRID_POINTS).map(|i| -half_width + i as f64 * h).collect();
        let phases: Vec<Complex<f64>> = (0..d).map(|n| Complex::from_polar(1.0, -(n as f64) * theta)).collect();
        let pdf: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let psi = hermite_functions(x, d);
                let amp: Vec<Complex<f64>> = (0..d).map(|n| phases[n] * psi[n]).collect();
                let mut acc = 0.0;
                for m in 0..d {
                    if amp[m] == Complex::new(0.0, 0.0) {
                        continue;
                    }
                    for n in 0..d {
                        acc += (rho[m * d + n] * amp[m] * amp[n].conj()).re;
                    }
                }
                acc.max(0.0)
            })
            .collect();
        let mut cdf = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            cdf[i] = cdf[i - 1] + 0.5 * h * (pdf[i] + pdf[i - 1]);
        }
        let total = *cdf.last().expect("grid is non-empty");
        cdf.iter_mut().for_each(|c| *c /= total);
        Self { xs, cdf }
    }

    fn draw(&self, u: f64) -> f64 {
        let k = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.xs[k - 1] + t * (self.xs[k] - self.xs[k - 1])
    }
}

fn single_mode_density(src: QuadratureSource<'_>, mode: usize) -> Result<(Vec<Complex<f64>>, usize)> {
    let rho = match src {
        QuadratureSource::Fock(st) => {
            let norm = st.norm_sqr();
            if (norm - 1.0).abs() > 1e-6 + st.norm_leak() {
                return Err(Error::Unnormalized(norm));
            }
            st.reduced_density(&[mode])?
        }
        QuadratureSource::Density(rho) => {
            let tr = rho.trace();
            if (tr - 1.0).abs() > 1e-6 + rho.norm_leak() {
                return Err(Error::Unnormalized(tr));
            }
            if rho.n_modes() == 1 {
                check_mode(mode, 1)?;
                rho.clone()
            } else {
                rho.partial_trace(&[mode])?
            }
        }
        QuadratureSource::Gaussian(_) => unreachable!("Gaussian sources are sampled exactly"),
    };
    let d = rho.cutoff();
    let rho = rho.normalized();
    Ok(((0..d * d).map(|i| rho.element(i / d, i % d)).collect(), d))
}

/// Draws `n_per_theta` homodyne outcomes of `X_θ` on `mode` for every phase.
///
/// Gaussian sources use exact normal draws; Fock sources use inverse-CDF
/// sampling of the rotated wavefunction's density on a fine grid. Each phase
/// gets its own child stream, so results do not depend on thread scheduling.
pub fn sample_quadratures<'a>(
    source: impl Into<QuadratureSource<'a>>,
    mode: usize,
    thetas: &[f64],
    n_per_theta: usize,
    seed: u64,
) -> Result<QuadratureDataset> {
    let source = source.into();
    if thetas.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("phases must be finite"));
    }
    let per_phase: Vec<Vec<(f64, f64)>> = match source {
        QuadratureSource::Gaussian(g) => {
            check_mode(mode, g.n_modes())?;
            thetas
                .par_iter()
                .enumerate()
                .map(|(k, &theta)| {
                    let mean = g.quadrature_mean(mode, theta)?;
                    let sd = g.quadrature_variance(mode, theta)?.sqrt();
                    let mut rng = child_rng(seed, k as u64);
                    let th = theta.rem_euclid(TAU);
                    Ok((0..n_per_theta).map(|_| (th, mean + sd * rng.sample::<f64, _>(StandardNormal))).collect())
                })
                .collect::<Result<_>>()?
        }
        QuadratureSource::Fock(_) | QuadratureSource::Density(_) => {
            let (rho, d) = single_mode_density(source, mode)?;
            thetas
                .par_iter()
                .enumerate()
                .map(|(k, &theta)| {
                    let sampler = QuadratureSampler::new(&rho, d, theta);
                    let mut rng = child_rng(seed, k as u64);
                    let th = theta.rem_euclid(TAU);
                    (0..n_per_theta).map(|_| (th, sampler.draw(rng.random::<f64>()))).collect()
                })
                .collect()
        }
    };
    let kind = match source {
        QuadratureSource::Gaussian(_) => "gaussian",
        QuadratureSource::Fock(_) => "fock",
        QuadratureSource::Density(_) => "density",
    };
    Ok(QuadratureDataset {
        samples: per_phase.into_iter().flatten().collect(),
        source_meta: format!("{kind} source, mode {mode}, {} phases x {n_per_theta}", thetas.len()),
        rng_seed: seed,
    })
}

/// Evenly spaced phases `kπ/n`, `k = 0..n`.
pub fn uniform_phases(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * PI / n as f64).collect()
}

impl QuadratureDataset {
    /// Samples grouped by phase, in order of first appearance.
    pub fn by_phase(&self) -> Vec<(f64, Vec<f64>)> {
        let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
        for &(theta, x) in &self.samples {
            match groups.iter_mut().find(|(t, _)| (t - theta).abs() < 1e-12) {
                Some((_, xs)) => xs.push(x),
                None => groups.push((theta, vec![x])),
            }
        }
        groups
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["theta", "x"])?;
        for (t, x) in &self.samples {
            out.serialize((t, x))?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a `theta,x` CSV; `source_meta` and `rng_seed` are not stored in
    /// the file and must be supplied.
    pub fn read_csv<R: Read>(r: R, source_meta: impl Into<String>, rng_seed: u64) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["theta", "x"] {
            return Err(Error::Parse(format!("expected header theta,x, got {:?}", headers)));
        }
        let mut samples = Vec::new();
        for rec in rdr.deserialize() {
            let (t, x): (f64, f64) = rec?;
            if !t.is_finite() || !x.is_finite() {
                return Err(Error::Parse("non-finite sample".into()));
            }
            samples.push((t.rem_euclid(TAU), x));
        }
        Ok(Self { samples, source_meta: source_meta.into(), rng_seed })
    }
}

/// Writes `x,p,w` rows.
pub fn write_wigner_csv<W: Write>(w: W, points: &[[f64; 2]], values: &[f64]) -> Result<()> {
    if points.len() != values.len() {
        return Err(Error::DimensionMismatch("points and values differ in length".into()));
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "p", "w"])?;
    for (p, v) in points.iter().zip(values) {
        out.serialize((p[0], p[1], v))?;
    }
    out.flush()?;
    Ok(())
}

/// Square grid of `n×n` points covering `[−half_width, half_width]²`, row-major in `x`.
pub fn square_grid(half_width: f64, n: usize) -> Vec<[f64; 2]> {
    let step = if n > 1 { 2.0 * half_width / (n - 1) as f64 } else { 0.0 };
    (0..n)
        .flat_map(|i| (0..n).map(move |j| [-half_width + i as f64 * step, -half_width + j as f64 * step]))
        .collect()
}
