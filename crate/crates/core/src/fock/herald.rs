use num_complex::Complex;

use super::{occupation_of, DensityMatrix, FockState};
use crate::error::{Error, Result};
use crate::gaussian::check_mode;
use crate::scalar::Real;

/// Heralding detector model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    /// Non-photon-number-resolving: projects onto "one or more photons".
    Click,
    /// Photon-number-resolving: projects onto exactly `n` photons.
    PhotonNumber(usize),
}

impl Detector {
    fn fires(self, n: usize) -> bool {
        match self {
            Detector::Click => n >= 1,
            Detector::PhotonNumber(k) => n == k,
        }
    }
}

/// Outcome of conditioning on a detector event.
#[derive(Debug, Clone)]
pub struct Herald<T: Real> {
    /// Conditional state of the remaining modes.
    pub density: DensityMatrix<T>,
    /// Dominant pure branch of `density` (its principal eigenvector).
    pub state: FockState<T>,
    /// Weight of that branch, the largest eigenvalue of `density`.
    pub branch_weight: T,
    pub probability: T,
}

/// Conditions `state` on `detector` firing on `mode`, then traces out `mode`
/// and every mode in `traced`.
pub fn herald<T: Real>(state: &FockState<T>, mode: usize, detector: Detector, traced: &[usize]) -> Result<Herald<T>> {
    check_mode(mode, state.n_modes)?;
    for &m in traced {
        check_mode(m, state.n_modes)?;
    }
    let keep: Vec<usize> = (0..state.n_modes).filter(|m| *m != mode && !traced.contains(m)).collect();
    if keep.is_empty() {
        return Err(Error::invalid("heralding must leave at least one mode"));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let psi = state.normalized();
    let projected: Vec<Complex<T>> = psi
        .amps
        .iter()
        .enumerate()
        .map(|(i, &c)| if detector.fires(occupation_of(state.n_modes, state.cutoff, i, mode)) { c } else { zero })
        .collect();
    let probability: T = projected.iter().map(|c| c.norm_sqr()).sum();
    if probability <= T::epsilon() * T::epsilon() {
        return Err(Error::ZeroState);
    }
    let s = T::one() / probability.sqrt();
    let cond = FockState::with_leak(
        state.n_modes,
        state.cutoff,
        projected.iter().map(|c| c * s).collect(),
        state.norm_leak,
    )?;
    let density = cond.reduced_density(&keep)?;
    let (branch_weight, dominant) = density.principal_component()?;
    Ok(Herald { density, state: dominant, branch_weight, probability })
}

/// Click heralding on `mode`: returns the dominant pure branch of the
/// conditional state of the other modes and the click probability.
pub fn herald_click<T: Real>(state: &FockState<T>, mode: usize) -> Result<(FockState<T>, T)> {
    let h = herald(state, mode, Detector::Click, &[])?;
    Ok((h.state, h.probability))
}
