//! Truncated photon-number engine.
//!
//! A [`FockState`] stores a dense amplitude tensor of shape `d^N` (same cutoff
//! `d` for every mode), flattened row-major with mode 0 most significant:
//! index `Σ n_k d^{N−1−k}`. Dense storage is intended for `N ≤ 3`, `d ≤ 64`;
//! memory grows as `d^N` and nothing here tries to be clever past that.

mod density;
mod herald;
mod ops;
mod wigner;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{check_mode, GaussianState};
use crate::linalg::Matrix;
use crate::scalar::Real;

pub use density::DensityMatrix;
pub use herald::{herald, herald_click, Detector, Herald};
pub use ops::{beam_splitter_fock, displace_fock, loss_fock};
pub use wigner::wigner_fock;

/// Leak above which constructors flag [`Truncation::Warning`].
pub const DEFAULT_LEAK_TOLERANCE: f64 = 1e-6;

/// Tail mass targeted by the `suggest_cutoff_*` helpers.
pub const CUTOFF_TAIL_TARGET: f64 = 1e-8;

/// Whether the weight lost to truncation stayed under the leak tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    Ok,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState<T: Real> {
    n_modes: usize,
    cutoff: usize,
    amps: Vec<Complex<T>>,
    norm_leak: T,
    truncation: Truncation,
}

fn classify<T: Real>(leak: T) -> Truncation {
    if leak > T::lit(DEFAULT_LEAK_TOLERANCE) {
        Truncation::Warning
    } else {
        Truncation::Ok
    }
}

pub(crate) fn dim(n_modes: usize, cutoff: usize) -> usize {
    cutoff.pow(n_modes as u32)
}

impl<T: Real> FockState<T> {
    /// Wraps raw amplitudes; requires `0 < Σ|c|² ≤ 1 + 1e-9`.
    pub fn new(n_modes: usize, cutoff: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        Self::with_leak(n_modes, cutoff, amps, T::zero())
    }

    pub(crate) fn with_leak(n_modes: usize, cutoff: usize, amps: Vec<Complex<T>>, norm_leak: T) -> Result<Self> {
        if n_modes == 0 || cutoff == 0 {
            return Err(Error::invalid("FockState needs n_modes >= 1 and cutoff >= 1"));
        }
        if amps.len() != dim(n_modes, cutoff) {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {n_modes} modes with cutoff {cutoff}",
                amps.len()
            )));
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("non-finite amplitude"));
        }
        let norm: T = amps.iter().map(|c| c.norm_sqr()).sum();
        if norm <= T::zero() {
            return Err(Error::ZeroState);
        }
        if norm > T::one() + T::physics_tol() {
            return Err(Error::Unnormalized(norm.as_f64()));
        }
        let norm_leak = norm_leak.max(T::zero());
        Ok(Self { n_modes, cutoff, amps, norm_leak, truncation: classify(norm_leak) })
    }

    /// Product basis state `|n_0, n_1, …⟩`.
    pub fn basis(cutoff: usize, occupation: &[usize]) -> Result<Self> {
        if let Some(&n) = occupation.iter().find(|&&n| n >= cutoff) {
            return Err(Error::invalid(format!("photon number {n} needs cutoff > {n}")));
        }
        let n_modes = occupation.len();
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim(n_modes, cutoff)];
        amps[flat_index(cutoff, occupation)] = Complex::new(T::one(), T::zero());
        Self::new(n_modes, cutoff, amps)
    }

    pub fn vacuum(n_modes: usize, cutoff: usize) -> Result<Self> {
        Self::basis(cutoff, &vec![0; n_modes])
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// Amplitude of the product basis state `|occupation⟩` (zero beyond the cutoff).
    pub fn amp(&self, occupation: &[usize]) -> Complex<T> {
        assert_eq!(occupation.len(), self.n_modes, "occupation length must equal n_modes");
        if occupation.iter().any(|&n| n >= self.cutoff) {
            return Complex::new(T::zero(), T::zero());
        }
        self.amps[flat_index(self.cutoff, occupation)]
    }

    /// Weight missing relative to the untruncated target state.
    pub fn norm_leak(&self) -> T {
        self.norm_leak
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rescaled to unit norm; the leak bookkeeping is kept.
    pub fn normalized(&self) -> Self {
        let s = T::one() / self.norm_sqr().sqrt();
        Self { amps: self.amps.iter().map(|c| c * s).collect(), ..self.clone() }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeCountMismatch(self.n_modes, other.n_modes));
        }
        let d = self.cutoff.max(other.cutoff);
        let (a, b) = (self.pad_to(d), other.pad_to(d));
        Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
    }

    /// Embeds into a larger cutoff by zero-padding; smaller cutoffs are returned unchanged.
    pub fn pad_to(&self, cutoff: usize) -> Self {
        if cutoff <= self.cutoff {
            return self.clone();
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim(self.n_modes, cutoff)];
        for (i, &c) in self.amps.iter().enumerate() {
            let occ = occupation(self.n_modes, self.cutoff, i);
            amps[flat_index(cutoff, &occ)] = c;
        }
        Self { n_modes: self.n_modes, cutoff, amps, ..self.clone() }
    }

    /// Tensor product; both factors must share a cutoff.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch(format!("cutoffs {} and {}", self.cutoff, other.cutoff)));
        }
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        let leak = T::one() - (T::one() - self.norm_leak) * (T::one() - other.norm_leak);
        Self::with_leak(self.n_modes + other.n_modes, self.cutoff, amps, leak)
    }

    /// Phase rotation `e^{−iθ n̂}` on `mode`, the Fock counterpart of the
    /// Gaussian phase-space rotation.
    pub fn rotate(&self, mode: usize, theta: T) -> Result<Self> {
        check_mode(mode, self.n_modes)?;
        let mut out = self.clone();
        for (i, c) in out.amps.iter_mut().enumerate() {
            let n = occupation_of(self.n_modes, self.cutoff, i, mode);
            *c = *c * Complex::from_polar(T::one(), -theta * T::from_usize_lossy(n));
        }
        Ok(out)
    }

    /// Photon-number distribution of one mode (unnormalized if the state is).
    pub fn photon_distribution(&self, mode: usize) -> Result<Vec<T>> {
        check_mode(mode, self.n_modes)?;
        let mut p = vec![T::zero(); self.cutoff];
        for (i, c) in self.amps.iter().enumerate() {
            let n = occupation_of(self.n_modes, self.cutoff, i, mode);
            p[n] = p[n] + c.norm_sqr();
        }
        Ok(p)
    }

    pub fn mean_photon_number(&self, mode: usize) -> Result<T> {
        let p = self.photon_distribution(mode)?;
        let norm: T = p.iter().copied().sum();
        Ok(p.iter().enumerate().map(|(n, &w)| T::from_usize_lossy(n) * w).sum::<T>() / norm)
    }

    /// `⟨(−1)^{n̂}⟩` on `mode`.
    pub fn parity(&self, mode: usize) -> Result<T> {
        let p = self.photon_distribution(mode)?;
        let norm: T = p.iter().copied().sum();
        let signed: T = p.iter().enumerate().map(|(n, &w)| if n % 2 == 0 { w } else { -w }).sum();
        Ok(signed / norm)
    }

    /// `a_mode |ψ⟩` without renormalization.
    pub(crate) fn lower(&self, mode: usize) -> Vec<Complex<T>> {
        let stride = self.cutoff.pow((self.n_modes - 1 - mode) as u32);
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.amps.len()];
        for (i, c) in self.amps.iter().enumerate() {
            let n = occupation_of(self.n_modes, self.cutoff, i, mode);
            if n > 0 {
                out[i - stride] = c * T::from_usize_lossy(n).sqrt();
            }
        }
        out
    }

    /// Quadrature means and symmetrized covariance computed from the
    /// amplitudes, in the Gaussian engine's units.
    pub fn quadrature_moments(&self) -> (Vec<T>, Matrix<T>) {
        let psi = self.normalized();
        let n = self.n_modes;
        let lowered: Vec<Vec<Complex<T>>> = (0..n).map(|j| psi.lower(j)).collect();
        let dot = |a: &[Complex<T>], b: &[Complex<T>]| -> Complex<T> { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
        let a1: Vec<Complex<T>> = lowered.iter().map(|l| dot(&psi.amps, l)).collect();
        let mut aa = vec![Complex::new(T::zero(), T::zero()); n * n];
        let mut ada = aa.clone();
        for k in 0..n {
            let shifted = FockState { amps: lowered[k].clone(), ..psi.clone() };
            for j in 0..n {
                aa[j * n + k] = dot(&psi.amps, &shifted.lower(j));
                ada[j * n + k] = dot(&lowered[j], &lowered[k]);
            }
        }
        moments_from_ladder(n, &a1, &aa, &ada)
    }

    /// Gaussian state with the same first and second moments.
    pub fn gaussian_moments(&self) -> Result<GaussianState<T>> {
        let (mean, cov) = self.quadrature_moments();
        GaussianState::new(mean, cov)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&FockStateJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<FockStateJson<T>>(s)?.try_into()
    }
}

/// Assembles quadrature moments from `⟨a_j⟩`, `⟨a_j a_k⟩` and `⟨a_j† a_k⟩`
/// (row-major `n×n` slices).
pub(crate) fn moments_from_ladder<T: Real>(
    n: usize,
    a1: &[Complex<T>],
    aa: &[Complex<T>],
    ada: &[Complex<T>],
) -> (Vec<T>, Matrix<T>) {
    let sqrt2 = T::SQRT_2();
    let half = T::lit(0.5);
    let mean: Vec<T> = a1.iter().flat_map(|a| [a.re * sqrt2, a.im * sqrt2]).collect();
    let mut cov = Matrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let (p, q) = (aa[j * n + k], ada[j * n + k]);
            let delta = if j == k { half } else { T::zero() };
            let (xj, pj, xk, pk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            cov[(xj, xk)] = p.re + q.re + delta - mean[xj] * mean[xk];
            cov[(pj, pk)] = -p.re + q.re + delta - mean[pj] * mean[pk];
            cov[(xj, pk)] = p.im + q.im - mean[xj] * mean[pk];
            cov[(pj, xk)] = p.im - q.im - mean[pj] * mean[xk];
        }
    }
    (mean, cov)
}

pub(crate) fn flat_index(cutoff: usize, occupation: &[usize]) -> usize {
    occupation.iter().fold(0, |acc, &n| acc * cutoff + n)
}

pub(crate) fn occupation(n_modes: usize, cutoff: usize, mut index: usize) -> Vec<usize> {
    let mut occ = vec![0; n_modes];
    for k in (0..n_modes).rev() {
        occ[k] = index % cutoff;
        index /= cutoff;
    }
    occ
}

pub(crate) fn occupation_of(n_modes: usize, cutoff: usize, index: usize, mode: usize) -> usize {
    (index / cutoff.pow((n_modes - 1 - mode) as u32)) % cutoff
}

fn single_mode<T: Real>(amps: Vec<Complex<T>>) -> Result<FockState<T>> {
    let cutoff = amps.len();
    let leak = T::one() - amps.iter().map(|c| c.norm_sqr()).sum::<T>();
    FockState::with_leak(1, cutoff, amps, leak)
}

/// Coherent state `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`, truncated.
pub fn coherent_fock<T: Real>(alpha: Complex<T>, cutoff: usize) -> Result<FockState<T>> {
    if cutoff == 0 {
        return Err(Error::invalid("cutoff must be at least 1"));
    }
    let mut amps = Vec::with_capacity(cutoff);
    let mut c = Complex::new((-alpha.norm_sqr() * T::lit(0.5)).exp(), T::zero());
    for n in 0..cutoff {
        if n > 0 {
            c = c * alpha / T::from_usize_lossy(n).sqrt();
        }
        amps.push(c);
    }
    single_mode(amps)
}

/// Squeezed vacuum with the X quadrature squeezed:
/// `c_{2m} = (−tanh r)^m √((2m)!)/(2^m m!) / √cosh r`, odd amplitudes zero.
pub fn squeezed_vacuum_fock<T: Real>(r: T, cutoff: usize) -> Result<FockState<T>> {
    if cutoff == 0 {
        return Err(Error::invalid("cutoff must be at least 1"));
    }
    let t = r.tanh();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); cutoff];
    let mut c = T::one() / r.cosh().sqrt();
    let mut n = 0;
    while n < cutoff {
        amps[n] = Complex::new(c, T::zero());
        // c_{n+2}/c_n = −tanh r · √((n+1)/(n+2))
        c = -c * t * (T::from_usize_lossy(n + 1) / T::from_usize_lossy(n + 2)).sqrt();
        n += 2;
    }
    single_mode(amps)
}

/// Two-mode squeezed vacuum `Σ tanhⁿ r / cosh r |n, n⟩`, truncated.
pub fn tmsv_fock<T: Real>(r: T, cutoff: usize) -> Result<FockState<T>> {
    if cutoff == 0 {
        return Err(Error::invalid("cutoff must be at least 1"));
    }
    let t = r.tanh();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); cutoff * cutoff];
    let mut c = T::one() / r.cosh();
    for n in 0..cutoff {
        amps[n * cutoff + n] = Complex::new(c, T::zero());
        c = c * t;
    }
    let leak = t.powi(2 * cutoff as i32);
    FockState::with_leak(2, cutoff, amps, leak)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatParity {
    Even,
    Odd,
}

/// Normalized `|α⟩ ± |−α⟩`.
pub fn cat_fock<T: Real>(alpha: Complex<T>, parity: CatParity, cutoff: usize) -> Result<FockState<T>> {
    let coh = coherent_fock(alpha, cutoff)?;
    let keep = match parity {
        CatParity::Even => 0,
        CatParity::Odd => 1,
    };
    let amps: Vec<Complex<T>> = coh
        .amps
        .iter()
        .enumerate()
        .map(|(n, &c)| if n % 2 == keep { c } else { Complex::new(T::zero(), T::zero()) })
        .collect();
    let weight: T = amps.iter().map(|c| c.norm_sqr()).sum();
    if weight <= T::zero() {
        return Err(Error::ZeroState);
    }
    // untruncated weight of the retained parity sector: e^{-|α|²} cosh|α|² or sinh|α|²
    let m = alpha.norm_sqr();
    let exact = match parity {
        CatParity::Even => (T::one() + (-T::lit(2.0) * m).exp()) * T::lit(0.5),
        CatParity::Odd => (T::one() - (-T::lit(2.0) * m).exp()) * T::lit(0.5),
    };
    let s = T::one() / exact.sqrt();
    let amps: Vec<Complex<T>> = amps.iter().map(|c| c * s).collect();
    let leak = T::one() - weight / exact;
    let mut st = FockState::with_leak(1, cutoff, amps, leak)?;
    if st.norm_sqr() > T::one() {
        st = st.normalized();
    }
    Ok(st)
}

fn first_cutoff_below<T: Real>(mut weights: impl Iterator<Item = T>, max_cutoff: usize) -> usize {
    let target = T::lit(CUTOFF_TAIL_TARGET);
    let mut cum = T::zero();
    for d in 1..=max_cutoff {
        cum = cum + weights.next().unwrap_or_else(T::zero);
        if T::one() - cum < target {
            return d;
        }
    }
    max_cutoff
}

const MAX_SUGGESTED_CUTOFF: usize = 4096;

/// Smallest `d` whose coherent-state tail mass is below [`CUTOFF_TAIL_TARGET`].
pub fn suggest_cutoff_coherent<T: Real>(alpha: Complex<T>) -> usize {
    let m = alpha.norm_sqr();
    let mut p = (-m).exp();
    let weights = (0..).map(move |n: usize| {
        if n > 0 {
            p = p * m / T::from_usize_lossy(n);
        }
        p
    });
    first_cutoff_below(weights, MAX_SUGGESTED_CUTOFF)
}

/// Smallest `d` whose squeezed-vacuum tail mass is below [`CUTOFF_TAIL_TARGET`].
pub fn suggest_cutoff_squeezed<T: Real>(r: T) -> usize {
    let t2 = r.tanh().powi(2);
    let mut p = T::one() / r.cosh();
    let weights = (0..).map(move |n: usize| {
        if n % 2 == 1 {
            return T::zero();
        }
        let out = p;
        p = p * t2 * T::from_usize_lossy(n + 1) / T::from_usize_lossy(n + 2);
        out
    });
    first_cutoff_below(weights, MAX_SUGGESTED_CUTOFF)
}

/// Smallest per-mode `d` with TMSV tail mass `tanh^{2d} r` below [`CUTOFF_TAIL_TARGET`].
pub fn suggest_cutoff_tmsv<T: Real>(r: T) -> usize {
    let t2 = r.tanh().powi(2);
    let mut p = T::one() - t2;
    let weights = (0..).map(move |_| {
        let out = p;
        p = p * t2;
        out
    });
    first_cutoff_below(weights, MAX_SUGGESTED_CUTOFF)
}

/// `a_mode |ψ⟩ / ‖a_mode |ψ⟩‖` together with the success probability `‖a ψ‖²`
/// (for normalized `ψ`, this is `⟨n̂⟩`).
pub fn apply_annihilation<T: Real>(state: &FockState<T>, mode: usize) -> Result<(FockState<T>, T)> {
    check_mode(mode, state.n_modes)?;
    let lowered = state.normalized().lower(mode);
    let p: T = lowered.iter().map(|c| c.norm_sqr()).sum();
    if p <= T::epsilon() * T::epsilon() {
        return Err(Error::ZeroState);
    }
    let s = T::one() / p.sqrt();
    let amps = lowered.iter().map(|c| c * s).collect();
    Ok((FockState::with_leak(state.n_modes, state.cutoff, amps, state.norm_leak)?, p))
}

/// Pure-state fidelity `|⟨a|b⟩|²` of the normalized states; cutoffs are
/// reconciled by zero-padding.
pub fn fidelity<T: Real>(a: &FockState<T>, b: &FockState<T>) -> Result<T> {
    let ov = a.inner(b)?;
    Ok(ov.norm_sqr() / (a.norm_sqr() * b.norm_sqr()))
}

/// On-disk form of a [`FockState`]: amplitudes flattened row-major by mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FockStateJson<T> {
    pub n_modes: usize,
    pub cutoff: usize,
    pub amps_re: Vec<T>,
    pub amps_im: Vec<T>,
    pub version: String,
}

pub const FSTATE_VERSION: &str = "fstate-v1";

impl<T: Real> From<&FockState<T>> for FockStateJson<T> {
    fn from(s: &FockState<T>) -> Self {
        Self {
            n_modes: s.n_modes,
            cutoff: s.cutoff,
            amps_re: s.amps.iter().map(|c| c.re).collect(),
            amps_im: s.amps.iter().map(|c| c.im).collect(),
            version: FSTATE_VERSION.into(),
        }
    }
}

impl<T: Real> TryFrom<FockStateJson<T>> for FockState<T> {
    type Error = Error;

    fn try_from(j: FockStateJson<T>) -> Result<Self> {
        if j.version != FSTATE_VERSION {
            return Err(Error::Parse(format!("unsupported version {:?}, expected {FSTATE_VERSION}", j.version)));
        }
        if j.amps_re.len() != j.amps_im.len() {
            return Err(Error::Parse("amps_re and amps_im differ in length".into()));
        }
        let amps = j.amps_re.iter().zip(&j.amps_im).map(|(&re, &im)| Complex::new(re, im)).collect();
        FockState::new(j.n_modes, j.cutoff, amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn indexing_round_trip() {
        for i in 0..125 {
            assert_eq!(flat_index(5, &occupation(3, 5, i)), i);
        }
        assert_eq!(occupation_of(3, 5, flat_index(5, &[1, 4, 2]), 1), 4);
    }

    #[test]
    fn coherent_basics() {
        let vac = coherent_fock(c(0.0, 0.0), 10).unwrap();
        assert_eq!(vac.amps()[0], c(1.0, 0.0));
        assert!(vac.amps()[1..].iter().all(|a| a.norm() == 0.0));
        let one = coherent_fock(c(1.0, 0.0), 20).unwrap();
        assert_relative_eq!(one.mean_photon_number(0).unwrap(), 1.0, epsilon = 1e-9);
        assert!(one.amps().iter().all(|a| a.re > 0.0 && a.im == 0.0));
        assert_eq!(one.truncation(), Truncation::Ok);
        let small = coherent_fock(c(3.0, 0.0), 5).unwrap();
        assert_eq!(small.truncation(), Truncation::Warning);
    }

    #[test]
    fn squeezed_vacuum_amplitudes() {
        let r: f64 = 0.01;
        let sq = squeezed_vacuum_fock(r, 10).unwrap();
        assert_relative_eq!(sq.amps()[2].re / sq.amps()[0].re, -r / 2f64.sqrt(), epsilon = 1e-6);
        let sq = squeezed_vacuum_fock(0.8, 31).unwrap();
        assert!(sq.amps().iter().skip(1).step_by(2).all(|a| *a == c(0.0, 0.0)));
        assert_eq!(sq.parity(0).unwrap(), 1.0);
    }

    #[test]
    fn squeezed_vacuum_variance_matches_gaussian() {
        let sq = squeezed_vacuum_fock(0.5, 40).unwrap();
        let (_, cov) = sq.quadrature_moments();
        assert_relative_eq!(cov[(0, 0)], (-1.0f64).exp() / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn tmsv_statistics() {
        let r: f64 = 0.6;
        let t = tmsv_fock(r, 60).unwrap();
        assert_relative_eq!(t.mean_photon_number(0).unwrap(), r.sinh().powi(2), epsilon = 1e-8);
        for n in 0..20 {
            let ratio = t.amp(&[n + 1, n + 1]).norm_sqr() / t.amp(&[n, n]).norm_sqr();
            assert_relative_eq!(ratio, r.tanh().powi(2), epsilon = 1e-12);
        }
        assert_eq!(t.amp(&[1, 2]), c(0.0, 0.0));
        let small = tmsv_fock(1e-3, 5).unwrap();
        assert_relative_eq!(small.amp(&[1, 1]).re / small.amp(&[0, 0]).re, 1e-3, epsilon = 1e-9);
    }

    #[test]
    fn zero_plus_two_variance() {
        let s = 0.01;
        let amps = vec![c(1.0, 0.0), c(0.0, 0.0), c(-s / 2f64.sqrt(), 0.0)];
        let st = FockState::new(1, 3, amps.iter().map(|a| a / (1.0f64 + s * s / 2.0).sqrt()).collect()).unwrap();
        let (_, cov) = st.quadrature_moments();
        // first-order result 1/2 − s; the normalized state adds a +s² correction
        assert!((cov[(0, 0)] - (0.5 - s)).abs() < 1.5 * s * s);
    }

    #[test]
    fn zero_plus_one_one_correlation() {
        let s = 0.01;
        let norm = (1.0f64 + s * s).sqrt();
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[0] = c(1.0 / norm, 0.0);
        amps[3] = c(s / norm, 0.0);
        let st = FockState::new(2, 2, amps).unwrap();
        let g = st.gaussian_moments().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g.linear_variance(&[h, 0.0, -h, 0.0]).unwrap() - (0.5 - s)).abs() < 1.5 * s * s);
    }

    #[test]
    fn annihilation_ladder() {
        let one = FockState::<f64>::basis(5, &[1]).unwrap();
        let (out, p) = apply_annihilation(&one, 0).unwrap();
        assert_relative_eq!(p, 1.0);
        assert_relative_eq!(fidelity(&out, &FockState::basis(5, &[0]).unwrap()).unwrap(), 1.0);
        let vac = FockState::<f64>::vacuum(1, 5).unwrap();
        assert!(matches!(apply_annihilation(&vac, 0), Err(Error::ZeroState)));
    }

    #[test]
    fn annihilation_maps_even_cat_to_odd_cat() {
        let a = c(0.7, 0.0);
        let even = cat_fock(a, CatParity::Even, 30).unwrap();
        let odd = cat_fock(a, CatParity::Odd, 30).unwrap();
        let (out, _) = apply_annihilation(&even, 0).unwrap();
        assert!((fidelity(&out, &odd).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_basics() {
        let sq = squeezed_vacuum_fock(0.3, 20).unwrap();
        assert_relative_eq!(fidelity(&sq, &sq).unwrap(), 1.0, epsilon = 1e-12);
        let z = FockState::<f64>::basis(4, &[0]).unwrap();
        let o = FockState::<f64>::basis(4, &[1]).unwrap();
        assert_eq!(fidelity(&z, &o).unwrap(), 0.0);
        // mismatched cutoffs are padded
        assert_relative_eq!(fidelity(&z, &FockState::basis(9, &[0]).unwrap()).unwrap(), 1.0);
        let two = FockState::<f64>::vacuum(2, 4).unwrap();
        assert!(matches!(fidelity(&z, &two), Err(Error::ModeCountMismatch(1, 2))));
    }

    #[test]
    fn squeezed_vacuum_approximates_even_cat() {
        // X-squeezed vacuum matches the even cat with imaginary amplitude: |0⟩ − (r/√2)|2⟩
        let alpha: f64 = 0.5;
        let sq = squeezed_vacuum_fock(alpha * alpha, 30).unwrap();
        let cat = cat_fock(c(0.0, alpha), CatParity::Even, 30).unwrap();
        assert!(fidelity(&sq, &cat).unwrap() > 0.99);
    }

    #[test]
    fn cutoff_suggestions_meet_tail_target() {
        let d = suggest_cutoff_tmsv(0.6f64);
        assert!(0.6f64.tanh().powi(2 * d as i32) < CUTOFF_TAIL_TARGET);
        assert!(0.6f64.tanh().powi(2 * (d as i32 - 1)) >= CUTOFF_TAIL_TARGET);
        let d = suggest_cutoff_coherent(c(2.0, 0.0));
        assert!(coherent_fock(c(2.0, 0.0), d).unwrap().norm_leak() < CUTOFF_TAIL_TARGET);
        let d = suggest_cutoff_squeezed(0.7f64);
        assert!(squeezed_vacuum_fock(0.7, d).unwrap().norm_leak() < CUTOFF_TAIL_TARGET);
        assert!(squeezed_vacuum_fock(0.7, d - 2).unwrap().norm_leak() >= CUTOFF_TAIL_TARGET);
    }

    #[test]
    fn json_round_trip() {
        let st = tmsv_fock(0.3, 6).unwrap().rotate(1, 0.4).unwrap();
        let text = st.to_json().unwrap();
        assert!(text.contains("fstate-v1"));
        let back = FockState::<f64>::from_json(&text).unwrap();
        assert_eq!(back.amps(), st.amps());
    }

    #[test]
    fn unnormalized_input_rejected() {
        let amps = vec![c(1.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(FockState::new(1, 2, amps), Err(Error::Unnormalized(_))));
        assert!(matches!(FockState::<f64>::new(1, 2, vec![c(0.0, 0.0); 2]), Err(Error::ZeroState)));
    }
}
