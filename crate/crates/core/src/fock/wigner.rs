//! Wigner functions of truncated states by displaced parity:
//! `W(x, p) = (1/π) Σ_n (−1)^n ⟨n| D(−β) ρ D(−β)† |n⟩` with `β = (x + ip)/√2`,
//! normalized so the vacuum peaks at `1/π`.

use num_complex::Complex;
use rayon::prelude::*;

use super::ops::{displace_vector, padded_dim};
use super::{DensityMatrix, FockState};
use crate::error::{Error, Result};
use crate::gaussian::check_mode;
use crate::scalar::Real;

fn beta_of<T: Real>(point: [T; 2]) -> Complex<T> {
    Complex::new(point[0], point[1]) / T::SQRT_2()
}

fn parity_sum<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().enumerate().map(|(n, c)| if n % 2 == 0 { c.norm_sqr() } else { -c.norm_sqr() }).sum()
}

fn wigner_pure<T: Real>(amps: &[Complex<T>], point: [T; 2]) -> T {
    let beta = beta_of(point);
    let m = padded_dim(amps.len(), beta);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); m];
    buf[..amps.len()].copy_from_slice(amps);
    let norm: T = amps.iter().map(|c| c.norm_sqr()).sum();
    parity_sum(&displace_vector(&buf, -beta)) / (norm * T::PI())
}

/// Single-mode Wigner function of `mode` at phase-space points `(x, p)`.
///
/// The remaining modes must factor off as a pure product; otherwise the
/// reduced state is entangled with them and an error is returned.
pub fn wigner_fock<T: Real>(state: &FockState<T>, points: &[[T; 2]], mode: usize) -> Result<Vec<T>> {
    check_mode(mode, state.n_modes)?;
    let amps = if state.n_modes == 1 {
        state.amps.clone()
    } else {
        let reduced = state.reduced_density(&[mode])?;
        if reduced.purity() < T::one() - T::physics_tol() {
            return Err(Error::EntangledResidual(mode));
        }
        reduced.principal_component()?.1.amps
    };
    Ok(points.par_iter().map(|&p| wigner_pure(&amps, p)).collect())
}

impl<T: Real> DensityMatrix<T> {
    /// Wigner function of a single-mode density operator (mixed states allowed).
    pub fn wigner(&self, points: &[[T; 2]]) -> Result<Vec<T>> {
        if self.n_modes() != 1 {
            return Err(Error::invalid(format!(
                "Wigner evaluation needs a single-mode operator, got {} modes",
                self.n_modes()
            )));
        }
        let rho = self.normalized();
        let d = rho.cutoff();
        Ok(points
            .par_iter()
            .map(|&point| {
                let beta = beta_of(point);
                let m = padded_dim(d, beta);
                // columns D(−β)|j⟩, j < d, in the padded space
                let cols: Vec<Vec<Complex<T>>> = (0..d)
                    .map(|j| {
                        let mut e = vec![Complex::new(T::zero(), T::zero()); m];
                        e[j] = Complex::new(T::one(), T::zero());
                        displace_vector(&e, -beta)
                    })
                    .collect();
                let mut total = T::zero();
                for n in 0..m {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for j in 0..d {
                        let left = cols[j][n];
                        if left == Complex::new(T::zero(), T::zero()) {
                            continue;
                        }
                        for k in 0..d {
                            acc = acc + left * rho.element(j, k) * cols[k][n].conj();
                        }
                    }
                    total = if n % 2 == 0 { total + acc.re } else { total - acc.re };
                }
                total / T::PI()
            })
            .collect())
    }
}
