use num_complex::Complex;

use super::{dim, flat_index, moments_from_ladder, occupation, FockState};
use crate::error::{Error, Result};
use crate::gaussian::{check_mode, GaussianState};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Dense density operator on `n_modes` truncated modes, stored row-major as a
/// `D×D` matrix with `D = cutoff^n_modes` and the same basis ordering as
/// [`FockState`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    n_modes: usize,
    cutoff: usize,
    data: Vec<Complex<T>>,
    norm_leak: T,
}

/// Splits full indices into `(kept, traced)` sub-indices.
fn split_index(n_modes: usize, cutoff: usize, keep: &[usize], traced: &[usize], index: usize) -> (usize, usize) {
    let occ = occupation(n_modes, cutoff, index);
    let k: Vec<usize> = keep.iter().map(|&m| occ[m]).collect();
    let t: Vec<usize> = traced.iter().map(|&m| occ[m]).collect();
    (flat_index(cutoff, &k), flat_index(cutoff, &t))
}

fn check_keep(keep: &[usize], n_modes: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::invalid("partial trace must keep at least one mode"));
    }
    for (a, &m) in keep.iter().enumerate() {
        check_mode(m, n_modes)?;
        if keep[..a].contains(&m) {
            return Err(Error::DuplicateModes(m));
        }
    }
    Ok((0..n_modes).filter(|m| !keep.contains(m)).collect())
}

impl<T: Real> FockState<T> {
    /// Reduced density operator of the listed modes (in that order).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let traced = check_keep(keep, self.n_modes)?;
        let dk = dim(keep.len(), self.cutoff);
        let dt = dim(traced.len(), self.cutoff);
        let zero = Complex::new(T::zero(), T::zero());
        // arrange amplitudes as a dk × dt matrix ψ[k, t]
        let mut psi = vec![zero; dk * dt];
        for (i, &c) in self.amps.iter().enumerate() {
            let (k, t) = split_index(self.n_modes, self.cutoff, keep, &traced, i);
            psi[k * dt + t] = c;
        }
        let mut data = vec![zero; dk * dk];
        for a in 0..dk {
            let row_a = &psi[a * dt..(a + 1) * dt];
            if row_a.iter().all(|c| *c == zero) {
                continue;
            }
            for b in 0..dk {
                let row_b = &psi[b * dt..(b + 1) * dt];
                data[a * dk + b] = row_a.iter().zip(row_b).map(|(x, y)| x * y.conj()).sum();
            }
        }
        Ok(DensityMatrix { n_modes: keep.len(), cutoff: self.cutoff, data, norm_leak: self.norm_leak })
    }
}

impl<T: Real> DensityMatrix<T> {
    pub fn from_pure(state: &FockState<T>) -> Self {
        let all: Vec<usize> = (0..state.n_modes).collect();
        state.reduced_density(&all).expect("all modes are valid")
    }

    /// Wraps a row-major `D×D` matrix; checks Hermiticity and a positive trace.
    pub fn new(n_modes: usize, cutoff: usize, data: Vec<Complex<T>>) -> Result<Self> {
        let d = dim(n_modes, cutoff);
        if data.len() != d * d {
            return Err(Error::DimensionMismatch(format!("{} entries for dimension {d}", data.len())));
        }
        let rho = Self { n_modes, cutoff, data, norm_leak: T::zero() };
        let herm = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| (rho.element(i, j) - rho.element(j, i).conj()).norm())
            .fold(T::zero(), T::max);
        if herm > T::structural_tol() {
            return Err(Error::NotSymmetric(herm.as_f64()));
        }
        if rho.trace() <= T::zero() {
            return Err(Error::ZeroState);
        }
        Ok(rho)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        dim(self.n_modes, self.cutoff)
    }

    pub fn norm_leak(&self) -> T {
        self.norm_leak
    }

    pub fn element(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim() + j]
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.element(i, i).re).sum()
    }

    pub fn normalized(&self) -> Self {
        let s = T::one() / self.trace();
        Self { data: self.data.iter().map(|c| c * s).collect(), ..self.clone() }
    }

    /// `Tr ρ² / (Tr ρ)²`.
    pub fn purity(&self) -> T {
        let tr = self.trace();
        let sq: T = self.data.iter().map(|c| c.norm_sqr()).sum();
        sq / (tr * tr)
    }

    /// Diagonal photon-number distribution of one mode (normalized).
    pub fn photon_distribution(&self, mode: usize) -> Result<Vec<T>> {
        check_mode(mode, self.n_modes)?;
        let mut p = vec![T::zero(); self.cutoff];
        for i in 0..self.dim() {
            let n = super::occupation_of(self.n_modes, self.cutoff, i, mode);
            p[n] = p[n] + self.element(i, i).re;
        }
        let tr = self.trace();
        Ok(p.into_iter().map(|x| x / tr).collect())
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let traced = check_keep(keep, self.n_modes)?;
        let d = self.dim();
        let dk = dim(keep.len(), self.cutoff);
        let split: Vec<(usize, usize)> =
            (0..d).map(|i| split_index(self.n_modes, self.cutoff, keep, &traced, i)).collect();
        let mut data = vec![Complex::new(T::zero(), T::zero()); dk * dk];
        for i in 0..d {
            for j in 0..d {
                if split[i].1 == split[j].1 {
                    let slot = &mut data[split[i].0 * dk + split[j].0];
                    *slot = *slot + self.element(i, j);
                }
            }
        }
        Ok(Self { n_modes: keep.len(), cutoff: self.cutoff, data, norm_leak: self.norm_leak })
    }

    /// `⟨φ|ρ|φ⟩ / (Tr ρ ‖φ‖²)`: fidelity with a pure state.
    pub fn fidelity_with(&self, phi: &FockState<T>) -> Result<T> {
        if phi.n_modes != self.n_modes {
            return Err(Error::ModeCountMismatch(self.n_modes, phi.n_modes));
        }
        let phi = phi.pad_to(self.cutoff);
        if phi.cutoff != self.cutoff {
            // components of φ above our cutoff have no overlap with ρ
            return self.fidelity_with(&truncate(&phi, self.cutoff)?);
        }
        let d = self.dim();
        let rho_phi = (0..d).map(|i| (0..d).map(|j| self.element(i, j) * phi.amps[j]).sum::<Complex<T>>());
        let num: Complex<T> = phi.amps.iter().zip(rho_phi).map(|(a, b)| a.conj() * b).sum();
        Ok(num.re / (self.trace() * phi.norm_sqr()))
    }

    /// Largest eigenvalue (of the normalized operator) and its eigenvector,
    /// by power iteration.
    pub fn principal_component(&self) -> Result<(T, FockState<T>)> {
        let rho = self.normalized();
        let d = rho.dim();
        let apply = |v: &[Complex<T>]| -> Vec<Complex<T>> {
            (0..d).map(|i| (0..d).map(|j| rho.element(i, j) * v[j]).sum()).collect()
        };
        let start = (0..d)
            .max_by(|&a, &b| rho.element(a, a).re.partial_cmp(&rho.element(b, b).re).expect("finite"))
            .ok_or(Error::ZeroState)?;
        let mut v: Vec<Complex<T>> = (0..d).map(|i| rho.element(i, start)).collect();
        let mut lambda = T::zero();
        for _ in 0..10_000 {
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
            if norm <= T::zero() {
                return Err(Error::ZeroState);
            }
            v.iter_mut().for_each(|c| *c = *c / norm);
            let w = apply(&v);
            let next: T = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            let resid: T = w.iter().zip(&v).map(|(a, b)| (a - b * next).norm_sqr()).sum::<T>().sqrt();
            v = w;
            let done = resid <= T::lit(1e-13) * next.max(T::epsilon()) || (next - lambda).abs() <= T::epsilon();
            lambda = next;
            if done {
                break;
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        let amps = v.iter().map(|c| c / norm).collect();
        Ok((lambda, FockState::with_leak(self.n_modes, self.cutoff, amps, self.norm_leak)?))
    }

    /// Quadrature means and symmetrized covariance.
    pub fn quadrature_moments(&self) -> (Vec<T>, Matrix<T>) {
        let rho = self.normalized();
        let (n, d) = (self.n_modes, self.cutoff);
        let zero = Complex::new(T::zero(), T::zero());
        let mut a1 = vec![zero; n];
        let mut aa = vec![zero; n * n];
        let mut ada = vec![zero; n * n];
        let sqrt = |k: usize| T::from_usize_lossy(k).sqrt();
        for i in 0..rho.dim() {
            let occ = occupation(n, d, i);
            for j in 0..n {
                if occ[j] > 0 {
                    let mut o = occ.clone();
                    o[j] -= 1;
                    a1[j] = a1[j] + rho.element(i, flat_index(d, &o)) * sqrt(occ[j]);
                }
            }
            for k in 0..n {
                if occ[k] == 0 {
                    continue;
                }
                let mut lowered = occ.clone();
                lowered[k] -= 1;
                let ck = sqrt(occ[k]);
                for j in 0..n {
                    // Tr(ρ a_j a_k): a_j a_k |occ⟩
                    if lowered[j] > 0 {
                        let mut o = lowered.clone();
                        o[j] -= 1;
                        let c = ck * sqrt(lowered[j]);
                        aa[j * n + k] = aa[j * n + k] + rho.element(i, flat_index(d, &o)) * c;
                    }
                    // Tr(ρ a_j† a_k): a_j† a_k |occ⟩
                    if lowered[j] + 1 < d {
                        let mut o = lowered.clone();
                        o[j] += 1;
                        let c = ck * sqrt(lowered[j] + 1);
                        ada[j * n + k] = ada[j * n + k] + rho.element(i, flat_index(d, &o)) * c;
                    }
                }
            }
        }
        moments_from_ladder(n, &a1, &aa, &ada)
    }

    pub fn gaussian_moments(&self) -> Result<GaussianState<T>> {
        let (mean, cov) = self.quadrature_moments();
        GaussianState::new(mean, cov)
    }
}

fn truncate<T: Real>(state: &FockState<T>, cutoff: usize) -> Result<FockState<T>> {
    let amps = (0..dim(state.n_modes, cutoff))
        .map(|i| state.amp(&occupation(state.n_modes, cutoff, i)))
        .collect();
    FockState::new(state.n_modes, cutoff, amps)
}
