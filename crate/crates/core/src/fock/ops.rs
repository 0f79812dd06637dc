use num_complex::Complex;

use super::{DensityMatrix, FockState};
use crate::error::{Error, Result};
use crate::gaussian::{check_beam_splitter, check_mode, check_pair};
use crate::scalar::Real;

/// Matrix blocks of the beam-splitter unitary on each total-photon-number
/// sector: `blocks[N][k][n] = ⟨k, N−k| U |n, N−n⟩`.
///
/// Built with the creation-operator recursion
/// `U|n+1, m⟩ = (τa† + ρb†) U|n, m⟩ / √(n+1)` and
/// `U|0, m+1⟩ = (−ρa† + τb†) U|0, m⟩ / √(m+1)`, which is consistent with the
/// Heisenberg map `a → τa − ρb`, `b → τb + ρa` of the Gaussian engine and
/// avoids the cancellation of the binomial closed form.
fn beam_splitter_blocks<T: Real>(max_total: usize, tau: T, rho: T) -> Vec<Vec<Vec<T>>> {
    let mut blocks: Vec<Vec<Vec<T>>> = Vec::with_capacity(max_total + 1);
    blocks.push(vec![vec![T::one()]]);
    for total in 1..=max_total {
        let prev = &blocks[total - 1];
        let mut cur = vec![vec![T::zero(); total + 1]; total + 1];
        // raise one photon: coefficients for a† and b† acting on |k, total−1−k⟩
        let raise = |col: &[T], ca: T, cb: T, out: &mut Vec<Vec<T>>, n: usize, scale: T| {
            for (k, &v) in col.iter().enumerate() {
                if v == T::zero() {
                    continue;
                }
                out[k + 1][n] = out[k + 1][n] + ca * T::from_usize_lossy(k + 1).sqrt() * v * scale;
                out[k][n] = out[k][n] + cb * T::from_usize_lossy(total - k).sqrt() * v * scale;
            }
        };
        let column = |n: usize| -> Vec<T> { prev.iter().map(|row| row[n]).collect() };
        raise(&column(0), -rho, tau, &mut cur, 0, T::one() / T::from_usize_lossy(total).sqrt());
        for n in 1..=total {
            raise(&column(n - 1), tau, rho, &mut cur, n, T::one() / T::from_usize_lossy(n).sqrt());
        }
        blocks.push(cur);
    }
    blocks
}

/// Beam splitter on modes `(i, j)` with the same convention as the Gaussian
/// engine, so `|1,0⟩ → τ|1,0⟩ + ρ|0,1⟩`. Output components beyond the cutoff
/// are dropped and accounted in `norm_leak`.
pub fn beam_splitter_fock<T: Real>(state: &FockState<T>, i: usize, j: usize, tau: T, rho: T) -> Result<FockState<T>> {
    check_pair(i, j, state.n_modes)?;
    check_beam_splitter(tau, rho)?;
    let d = state.cutoff;
    let n = state.n_modes;
    let blocks = beam_splitter_blocks(2 * (d - 1), tau, rho);
    let (si, sj) = (d.pow((n - 1 - i) as u32), d.pow((n - 1 - j) as u32));
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; state.amps.len()];
    for base in 0..state.amps.len() {
        // visit each slice once, from its (0, 0) corner
        if super::occupation_of(n, d, base, i) != 0 || super::occupation_of(n, d, base, j) != 0 {
            continue;
        }
        let at = |p: usize, q: usize| base + p * si + q * sj;
        for (total, block) in blocks.iter().enumerate() {
            let lo = total.saturating_sub(d - 1);
            let hi = total.min(d - 1);
            for p_out in lo..=hi {
                let mut acc = zero;
                for p_in in lo..=hi {
                    let b = block[p_out][p_in];
                    if b != T::zero() {
                        acc = acc + state.amps[at(p_in, total - p_in)] * b;
                    }
                }
                out[at(p_out, total - p_out)] = acc;
            }
        }
    }
    let lost = (state.norm_sqr() - out.iter().map(|c| c.norm_sqr()).sum::<T>()).max(T::zero());
    FockState::with_leak(n, d, out, state.norm_leak + lost)
}

/// `exp(β a† − β* a) v` on a single-mode vector of dimension `v.len()`.
///
/// The truncated generator is anti-Hermitian, so the result is exactly
/// unitary on the padded space; the Taylor series is applied in steps small
/// enough to keep every term bounded.
pub(crate) fn displace_vector<T: Real>(v: &[Complex<T>], beta: Complex<T>) -> Vec<Complex<T>> {
    let m = v.len();
    let bound = T::lit(2.0) * beta.norm() * T::from_usize_lossy(m).sqrt();
    let steps = (bound / T::lit(2.0)).ceil().to_usize().unwrap_or(1).max(1);
    let b = beta / T::from_usize_lossy(steps);
    let sq: Vec<T> = (0..=m).map(|n| T::from_usize_lossy(n).sqrt()).collect();
    let apply_g = |x: &[Complex<T>], out: &mut [Complex<T>]| {
        for n in 0..m {
            let mut acc = Complex::new(T::zero(), T::zero());
            if n > 0 {
                acc = acc + b * x[n - 1] * sq[n];
            }
            if n + 1 < m {
                acc = acc - b.conj() * x[n + 1] * sq[n + 1];
            }
            out[n] = acc;
        }
    };
    let tiny = T::epsilon() * T::epsilon();
    let mut y = v.to_vec();
    let mut term = vec![Complex::new(T::zero(), T::zero()); m];
    let mut next = term.clone();
    for _ in 0..steps {
        term.copy_from_slice(&y);
        for k in 1..=80 {
            apply_g(&term, &mut next);
            let inv_k = T::one() / T::from_usize_lossy(k);
            let mut size = T::zero();
            for (t, nx) in term.iter_mut().zip(&next) {
                *t = nx * inv_k;
                size = size + t.norm_sqr();
            }
            for (yy, t) in y.iter_mut().zip(&term) {
                *yy = *yy + t;
            }
            if size < tiny {
                break;
            }
        }
    }
    y
}

/// Padded working dimension for displacing states supported below `cutoff`.
pub(crate) fn padded_dim<T: Real>(cutoff: usize, beta: Complex<T>) -> usize {
    let reach = T::from_usize_lossy(cutoff).sqrt() + beta.norm() + T::lit(7.0);
    let m = (reach * reach).ceil().to_usize().unwrap_or(cutoff);
    m.max(cutoff + 20)
}

/// Displacement `D(α) = exp(αa† − α*a)` on `mode`, evaluated as a matrix
/// exponential in a padded space and truncated back to the cutoff; the weight
/// pushed past the cutoff is added to `norm_leak`.
pub fn displace_fock<T: Real>(state: &FockState<T>, mode: usize, alpha: Complex<T>) -> Result<FockState<T>> {
    check_mode(mode, state.n_modes)?;
    if alpha == Complex::new(T::zero(), T::zero()) {
        return Ok(state.clone());
    }
    let d = state.cutoff;
    let n = state.n_modes;
    let m = padded_dim(d, alpha);
    let stride = d.pow((n - 1 - mode) as u32);
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; state.amps.len()];
    let mut lost = T::zero();
    let mut buf = vec![zero; m];
    for base in 0..state.amps.len() {
        if super::occupation_of(n, d, base, mode) != 0 {
            continue;
        }
        buf.iter_mut().for_each(|x| *x = zero);
        for k in 0..d {
            buf[k] = state.amps[base + k * stride];
        }
        if buf.iter().all(|x| *x == zero) {
            continue;
        }
        let moved = displace_vector(&buf, alpha);
        for k in 0..d {
            out[base + k * stride] = moved[k];
        }
        lost = lost + moved[d..].iter().map(|c| c.norm_sqr()).sum::<T>();
    }
    FockState::with_leak(n, d, out, state.norm_leak + lost)
}

/// Pure loss of transmissivity `t` on `mode`, modelled as a beam splitter
/// with a vacuum ancilla that is then traced out.
pub fn loss_fock<T: Real>(state: &FockState<T>, mode: usize, t: T) -> Result<DensityMatrix<T>> {
    check_mode(mode, state.n_modes)?;
    if !(T::zero()..=T::one()).contains(&t) {
        return Err(Error::invalid(format!("transmissivity {t} outside [0, 1]")));
    }
    let n = state.n_modes;
    let anc = FockState::vacuum(1, state.cutoff)?;
    let joint = state.tensor(&anc)?;
    let mixed = beam_splitter_fock(&joint, mode, n, t.sqrt(), (T::one() - t).sqrt())?;
    let keep: Vec<usize> = (0..n).collect();
    mixed.reduced_density(&keep)
}
