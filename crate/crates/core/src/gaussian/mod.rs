//! Gaussian-state engine.
//!
//! Conventions used throughout the crate: `[X, P] = i` (ħ = 1),
//! `X = (a + a†)/√2`, `P = (a − a†)/(√2 i)`, vacuum quadrature variance 1/2,
//! quadrature vector ordered `(X1, P1, X2, P2, …)`.
//!
//! States are immutable values; every operation returns a new state.

mod io;
mod symplectic;

pub use io::GaussianStateJson;
pub use symplectic::SymplecticOp;
pub(crate) use symplectic::{check_beam_splitter, check_mode, check_pair};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{symplectic_form, Matrix};
use crate::scalar::Real;

/// N-mode Gaussian state: quadrature means and covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T> {
    n_modes: usize,
    mean: Vec<T>,
    cov: Matrix<T>,
}

impl<T: Real> GaussianState<T> {
    /// N-mode vacuum: zero mean, covariance `I/2`.
    ///
    /// # Panics
    /// If `n_modes == 0`.
    pub fn vacuum(n_modes: usize) -> Self {
        assert!(n_modes >= 1, "a Gaussian state needs at least one mode");
        let half = T::lit(0.5);
        Self { n_modes, mean: vec![T::zero(); 2 * n_modes], cov: Matrix::identity(2 * n_modes).scale(half) }
    }

    /// Single-mode coherent state `|α⟩`.
    pub fn coherent(alpha: Complex<T>) -> Self {
        Self::vacuum(1).displace(0, alpha).expect("mode 0 exists")
    }

    /// Single-mode thermal state with mean photon number `n_th`.
    pub fn thermal(n_th: T) -> Result<Self> {
        if n_th < T::zero() {
            return Err(Error::invalid("thermal photon number must be non-negative"));
        }
        let v = n_th + T::lit(0.5);
        Self::new(vec![T::zero(); 2], Matrix::identity(2).scale(v))
    }

    /// Validating constructor.
    pub fn new(mean: Vec<T>, cov: Matrix<T>) -> Result<Self> {
        if !cov.is_square() || cov.rows() % 2 != 0 || cov.rows() == 0 || mean.len() != cov.rows() {
            return Err(Error::DimensionMismatch(format!(
                "mean of length {} with covariance {}x{}",
                mean.len(),
                cov.rows(),
                cov.cols()
            )));
        }
        let state = Self { n_modes: mean.len() / 2, mean, cov };
        state.validate()?;
        Ok(state)
    }

    /// Checks symmetry and the uncertainty relation `V + iΩ/2 ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        if self.mean.iter().chain(self.cov.as_slice()).any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite entries in Gaussian state"));
        }
        let asym = self.cov.asymmetry();
        if asym > T::structural_tol() * T::one().max(self.cov.max_abs()) {
            return Err(Error::NotSymmetric(asym.as_f64()));
        }
        let (eig, _) = self.cov.symmetric_eigen();
        if eig[0] <= T::zero() {
            return Err(Error::UncertaintyViolation(eig[0].as_f64()));
        }
        let nu_min = self.symplectic_eigenvalues()[0];
        if nu_min < T::lit(0.5) - T::physics_tol() {
            return Err(Error::UncertaintyViolation(nu_min.as_f64()));
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix<T> {
        &self.cov
    }

    /// Symplectic eigenvalues in ascending order (each ≥ 1/2 for physical states).
    ///
    /// Computed as the square roots of the eigenvalues of the symmetric matrix
    /// `V^{1/2} Ωᵀ V Ω V^{1/2}`, each of which appears twice.
    pub fn symplectic_eigenvalues(&self) -> Vec<T> {
        let omega = symplectic_form::<T>(self.n_modes);
        let sqrt_v = self.cov.symmetric_map(|x| x.max(T::zero()).sqrt());
        let inner = self.cov.congruence(&omega.transpose());
        let m = inner.congruence(&sqrt_v);
        let sym = Matrix::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] + m[(j, i)]) * T::lit(0.5));
        let (vals, _) = sym.symmetric_eigen();
        vals.chunks(2).map(|pair| ((pair[0] + pair[1]) * T::lit(0.5)).max(T::zero()).sqrt()).collect()
    }

    /// Purity `Tr ρ² = 1 / sqrt(det 2V)`.
    pub fn purity(&self) -> T {
        T::one() / self.cov.scale(T::lit(2.0)).determinant().sqrt()
    }

    /// Applies an affine symplectic map (unitary Gaussian operation).
    pub fn apply(&self, op: &SymplecticOp<T>) -> Result<Self> {
        if op.n_modes() != self.n_modes {
            return Err(Error::ModeCountMismatch(op.n_modes(), self.n_modes));
        }
        let mut mean = op.matrix.mul_vec(&self.mean);
        for (m, d) in mean.iter_mut().zip(&op.shift) {
            *m = *m + *d;
        }
        let cov = self.cov.congruence(&op.matrix);
        Ok(Self { n_modes: self.n_modes, mean, cov: symmetrize(cov) })
    }

    pub fn squeeze(&self, mode: usize, r: T, phi: T) -> Result<Self> {
        self.apply(&SymplecticOp::squeeze(self.n_modes, mode, r, phi)?)
    }

    pub fn two_mode_squeeze(&self, i: usize, j: usize, r: T) -> Result<Self> {
        self.apply(&SymplecticOp::two_mode_squeeze(self.n_modes, i, j, r)?)
    }

    pub fn beam_splitter(&self, i: usize, j: usize, tau: T, rho: T) -> Result<Self> {
        self.apply(&SymplecticOp::beam_splitter(self.n_modes, i, j, tau, rho)?)
    }

    pub fn rotate(&self, mode: usize, theta: T) -> Result<Self> {
        self.apply(&SymplecticOp::rotation(self.n_modes, mode, theta)?)
    }

    pub fn displace(&self, mode: usize, alpha: Complex<T>) -> Result<Self> {
        check_mode(mode, self.n_modes)?;
        let mut out = self.clone();
        out.mean[2 * mode] = out.mean[2 * mode] + alpha.re * T::SQRT_2();
        out.mean[2 * mode + 1] = out.mean[2 * mode + 1] + alpha.im * T::SQRT_2();
        Ok(out)
    }

    /// Pure-loss channel of transmissivity `t`: the beam-splitter model with
    /// vacuum in the other port. Variances go to `t V + (1 − t)/2`,
    /// cross-covariances with other modes and the mean scale by `√t`.
    pub fn loss_channel(&self, mode: usize, t: T) -> Result<Self> {
        check_mode(mode, self.n_modes)?;
        if !(T::zero()..=T::one()).contains(&t) {
            return Err(Error::invalid(format!("transmissivity {t} outside [0, 1]")));
        }
        let sqrt_t = t.sqrt();
        let mut out = self.clone();
        let block = [2 * mode, 2 * mode + 1];
        for k in block {
            out.mean[k] = out.mean[k] * sqrt_t;
        }
        let n = 2 * self.n_modes;
        for i in 0..n {
            for j in 0..n {
                let (bi, bj) = (block.contains(&i), block.contains(&j));
                let v = self.cov[(i, j)];
                out.cov[(i, j)] = match (bi, bj) {
                    (true, true) if i == j => t * v + (T::one() - t) * T::lit(0.5),
                    (true, true) => t * v,
                    (true, false) | (false, true) => sqrt_t * v,
                    (false, false) => v,
                };
            }
        }
        Ok(out)
    }

    /// Direction vector of `X_θ = X cos θ + P sin θ` on `mode`.
    fn direction(&self, mode: usize, theta: T) -> Vec<T> {
        let mut c = vec![T::zero(); 2 * self.n_modes];
        c[2 * mode] = theta.cos();
        c[2 * mode + 1] = theta.sin();
        c
    }

    /// `Var(X_θ)` of `mode`.
    pub fn quadrature_variance(&self, mode: usize, theta: T) -> Result<T> {
        check_mode(mode, self.n_modes)?;
        Ok(self.cov.quad_form(&self.direction(mode, theta)))
    }

    /// `⟨X_θ⟩` of `mode`.
    pub fn quadrature_mean(&self, mode: usize, theta: T) -> Result<T> {
        check_mode(mode, self.n_modes)?;
        Ok(self.direction(mode, theta).iter().zip(&self.mean).map(|(&a, &b)| a * b).sum())
    }

    /// Variance of an arbitrary linear combination `cᵀ r` of quadratures.
    pub fn linear_variance(&self, c: &[T]) -> Result<T> {
        if c.len() != 2 * self.n_modes {
            return Err(Error::DimensionMismatch("coefficient vector length".into()));
        }
        Ok(self.cov.quad_form(c))
    }

    /// Tensor product `self ⊗ other`; `other`'s modes are appended.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut mean = self.mean.clone();
        mean.extend_from_slice(&other.mean);
        Self { n_modes: self.n_modes + other.n_modes, mean, cov: self.cov.direct_sum(&other.cov) }
    }

    /// Reduced state of the listed modes (partial trace), in the given order.
    pub fn reduce(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid("reduced state needs at least one mode"));
        }
        for &m in modes {
            check_mode(m, self.n_modes)?;
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        Ok(Self {
            n_modes: modes.len(),
            mean: idx.iter().map(|&i| self.mean[i]).collect(),
            cov: self.cov.submatrix(&idx),
        })
    }

    /// Wigner function evaluated at 2N-dimensional phase-space points.
    ///
    /// Normalized to unit integral; the single-mode vacuum peaks at `1/π`.
    pub fn wigner(&self, points: &[Vec<T>]) -> Result<Vec<T>> {
        let evaluator = WignerEvaluator::new(self)?;
        points.iter().map(|p| evaluator.eval(p)).collect()
    }

    pub fn wigner_at(&self, point: &[T]) -> Result<T> {
        WignerEvaluator::new(self)?.eval(point)
    }

    /// Overlap `Tr(ρ σ)` between two single-mode Gaussian states. Equals the
    /// fidelity when either state is pure.
    pub fn overlap(&self, other: &Self) -> Result<T> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeCountMismatch(self.n_modes, other.n_modes));
        }
        let sum = &self.cov + &other.cov;
        let inv = sum.inverse()?;
        let delta: Vec<T> = self.mean.iter().zip(&other.mean).map(|(&a, &b)| a - b).collect();
        let det = sum.determinant();
        Ok((-T::lit(0.5) * inv.quad_form(&delta)).exp() / det.sqrt())
    }
}

fn symmetrize<T: Real>(m: Matrix<T>) -> Matrix<T> {
    let half = T::lit(0.5);
    Matrix::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] + m[(j, i)]) * half)
}

/// Precomputed inverse covariance for repeated Wigner evaluations.
pub struct WignerEvaluator<T> {
    mean: Vec<T>,
    inv: Matrix<T>,
    norm: T,
}

impl<T: Real> WignerEvaluator<T> {
    pub fn new(state: &GaussianState<T>) -> Result<Self> {
        let (vals, vecs) = state.cov.symmetric_eigen();
        if vals[0] <= T::zero() {
            return Err(Error::SingularCovariance);
        }
        let n = vals.len();
        let inv = Matrix::from_fn(n, n, |i, j| (0..n).map(|k| vecs[(i, k)] * vecs[(j, k)] / vals[k]).sum());
        let det: T = vals.iter().fold(T::one(), |acc, &v| acc * v);
        let two_pi = T::lit(2.0) * T::PI();
        let norm = T::one() / (two_pi.powi(state.n_modes as i32) * det.sqrt());
        Ok(Self { mean: state.mean.clone(), inv, norm })
    }

    pub fn eval(&self, point: &[T]) -> Result<T> {
        if point.len() != self.mean.len() {
            return Err(Error::DimensionMismatch(format!(
                "phase-space point of dimension {} for a {}-dimensional state",
                point.len(),
                self.mean.len()
            )));
        }
        let d: Vec<T> = point.iter().zip(&self.mean).map(|(&p, &m)| p - m).collect();
        Ok(self.norm * (-T::lit(0.5) * self.inv.quad_form(&d)).exp())
    }
}

/// Squeezing in decibels, `10 log10(2V)`; negative below the standard quantum
/// limit.
pub fn squeezing_db<T: Real>(variance: T) -> Result<T> {
    if variance <= T::zero() || !variance.is_finite() {
        return Err(Error::invalid(format!("variance {variance} must be positive")));
    }
    Ok(T::lit(10.0) * (T::lit(2.0) * variance).log10())
}

/// Loss/squeezing pair explaining a measured (min, max) variance pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossEstimate<T> {
    pub transmissivity: T,
    pub r: T,
}

/// Infers `(T, r)` such that a pure squeezed vacuum of parameter `r` sent
/// through a loss channel of transmissivity `T` has minimum and maximum
/// quadrature variances `v_min`, `v_max`.
///
/// With `a = 2v_min − 1 = −T(1 − e^{−2r})` and `b = 2v_max − 1 = T(e^{2r} − 1)`
/// the solution is `e^{2r} = −b/a` and `T = −ab/(a + b)`.
pub fn infer_effective_loss<T: Real>(v_min: T, v_max: T) -> Result<LossEstimate<T>> {
    if !(v_min > T::zero()) || v_min > v_max || !v_max.is_finite() {
        return Err(Error::invalid(format!("need 0 < v_min <= v_max, got ({v_min}, {v_max})")));
    }
    let tol = T::physics_tol();
    if v_min * v_max < T::lit(0.25) - tol {
        return Err(Error::UncertaintyViolation((T::lit(2.0) * (v_min * v_max).sqrt()).as_f64()));
    }
    let half = T::lit(0.5);
    if (v_min - half).abs() <= tol && (v_max - half).abs() <= tol {
        return Ok(LossEstimate { transmissivity: T::one(), r: T::zero() });
    }
    let a = T::lit(2.0) * v_min - T::one();
    let b = T::lit(2.0) * v_max - T::one();
    if a >= -tol {
        return Err(Error::ThermalNotSqueezed { v_min: v_min.as_f64(), v_max: v_max.as_f64() });
    }
    let e2r = -b / a;
    let t = (-a * b / (a + b)).min(T::one());
    Ok(LossEstimate { transmissivity: t, r: T::lit(0.5) * e2r.ln() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn vacuum_variances_and_uncertainty_product() {
        let v = GaussianState::<f64>::vacuum(1);
        let vx = v.quadrature_variance(0, 0.0).unwrap();
        let vp = v.quadrature_variance(0, PI / 2.0).unwrap();
        assert_eq!(vx, 0.5);
        assert_relative_eq!(vp, 0.5, epsilon = 1e-15);
        assert_relative_eq!(vx * vp, 0.25, epsilon = 1e-15);
        let v2 = GaussianState::<f64>::vacuum(2);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(v2.cov()[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn squeeze_ln2_gives_one_eighth() {
        let s = GaussianState::<f64>::vacuum(1).squeeze(0, LN_2, 0.0).unwrap();
        assert_relative_eq!(s.quadrature_variance(0, 0.0).unwrap(), 1.0 / 8.0, epsilon = 1e-15);
        assert_relative_eq!(s.quadrature_variance(0, PI / 2.0).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn squeeze_identity_and_inverse() {
        let base = GaussianState::<f64>::vacuum(1).displace(0, c(0.3, -0.2)).unwrap().squeeze(0, 0.4, 0.7).unwrap();
        let same = base.squeeze(0, 0.0, 1.1).unwrap();
        assert!(same.cov().max_abs_diff(base.cov()) < 1e-15);
        let back = GaussianState::<f64>::vacuum(1).squeeze(0, 0.9, 0.0).unwrap().squeeze(0, -0.9, 0.0).unwrap();
        assert!(back.cov().max_abs_diff(GaussianState::vacuum(1).cov()) < 1e-14);
    }

    #[test]
    fn tmsv_local_and_joint_variances() {
        let r = 0.5;
        let t = GaussianState::<f64>::vacuum(2).two_mode_squeeze(0, 1, r).unwrap();
        let big_r = f64::exp(r);
        let local = (1.0 + big_r.powi(4)) / (4.0 * big_r * big_r);
        assert_relative_eq!(t.quadrature_variance(0, 0.0).unwrap(), local, epsilon = 1e-14);
        assert_relative_eq!(local, (2.0 * r).cosh() / 2.0, epsilon = 1e-14);
        let s = FRAC_1_SQRT_2;
        let diff_x = t.linear_variance(&[s, 0.0, -s, 0.0]).unwrap();
        let sum_p = t.linear_variance(&[0.0, s, 0.0, s]).unwrap();
        assert_relative_eq!(diff_x, f64::exp(-1.0) / 2.0, epsilon = 1e-14);
        assert_relative_eq!(diff_x, 0.18393972058572117, epsilon = 1e-14);
        assert_relative_eq!(sum_p, f64::exp(-1.0) / 2.0, epsilon = 1e-14);
        let id = GaussianState::<f64>::vacuum(2).two_mode_squeeze(0, 1, 0.0).unwrap();
        assert!(id.cov().max_abs_diff(GaussianState::vacuum(2).cov()) == 0.0);
    }

    #[test]
    fn symmetric_bs_disentangles_tmsv() {
        let r = 0.7;
        let s = FRAC_1_SQRT_2;
        let out = GaussianState::<f64>::vacuum(2).two_mode_squeeze(0, 1, r).unwrap().beam_splitter(0, 1, s, s).unwrap();
        // X'_a = e^{-r} X^0_a, X'_b = e^{+r} X^0_b
        let expect = GaussianState::<f64>::vacuum(2).squeeze(0, r, 0.0).unwrap().squeeze(1, -r, 0.0).unwrap();
        assert!(out.cov().max_abs_diff(expect.cov()) < 1e-13);
    }

    #[test]
    fn orthogonal_squeezers_through_bs_make_tmsv() {
        let r = 0.9;
        let s = FRAC_1_SQRT_2;
        let two = GaussianState::<f64>::vacuum(2).squeeze(0, r, 0.0).unwrap().squeeze(1, -r, 0.0).unwrap();
        // inverse of the symmetric beam splitter swaps the sign of rho
        let out = two.beam_splitter(0, 1, s, -s).unwrap();
        let tmsv = GaussianState::<f64>::vacuum(2).two_mode_squeeze(0, 1, r).unwrap();
        assert!(out.cov().max_abs_diff(tmsv.cov()) < 1e-13);
    }

    #[test]
    fn vacuum_invariant_under_bs() {
        let out = GaussianState::<f64>::vacuum(2).beam_splitter(0, 1, 0.6, 0.8).unwrap();
        assert!(out.cov().max_abs_diff(GaussianState::vacuum(2).cov()) < 1e-15);
    }

    #[test]
    fn displacement_shifts_mean_only() {
        let d = GaussianState::<f64>::vacuum(1).displace(0, c(1.0, 0.0)).unwrap();
        assert_relative_eq!(d.mean()[0], 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(d.mean()[1], 0.0);
        assert_eq!(d.cov(), GaussianState::vacuum(1).cov());
        let a = d.displace(0, c(-0.4, 0.25)).unwrap();
        let b = GaussianState::<f64>::vacuum(1).displace(0, c(0.6, 0.25)).unwrap();
        assert!(a.mean().iter().zip(b.mean()).all(|(x, y)| (x - y).abs() < 1e-15));
        assert!(matches!(d.displace(3, c(0.0, 0.0)), Err(Error::ModeOutOfRange { .. })));
    }

    #[test]
    fn loss_channel_follows_beam_splitter_model() {
        let r = 0.8;
        let sq = GaussianState::<f64>::vacuum(1).squeeze(0, r, 0.0).unwrap();
        let out = sq.loss_channel(0, 0.5).unwrap();
        assert_relative_eq!(out.quadrature_variance(0, 0.0).unwrap(), 0.25 * (-2.0 * r).exp() + 0.25, epsilon = 1e-15);
        assert_eq!(sq.loss_channel(0, 1.0).unwrap(), sq);
        let dead = sq.displace(0, c(1.0, 2.0)).unwrap().loss_channel(0, 0.0).unwrap();
        assert!(dead.cov().max_abs_diff(GaussianState::vacuum(1).cov()) < 1e-15);
        assert!(dead.mean().iter().all(|&m| m == 0.0));
        assert!(sq.loss_channel(0, 1.2).is_err());
        assert!(sq.loss_channel(0, -0.1).is_err());
    }

    #[test]
    fn loss_matches_explicit_ancilla_beam_splitter() {
        let t: f64 = 0.37;
        let st = GaussianState::<f64>::vacuum(2)
            .two_mode_squeeze(0, 1, 0.6)
            .unwrap()
            .displace(0, c(0.4, -0.3))
            .unwrap();
        let via_channel = st.loss_channel(0, t).unwrap();
        let via_bs = st
            .tensor(&GaussianState::vacuum(1))
            .beam_splitter(0, 2, t.sqrt(), (1.0 - t).sqrt())
            .unwrap()
            .reduce(&[0, 1])
            .unwrap();
        assert!(via_channel.cov().max_abs_diff(via_bs.cov()) < 1e-14);
        assert!(via_channel.mean().iter().zip(via_bs.mean()).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn quadrature_variance_examples() {
        let r = 0.6;
        let sq = GaussianState::<f64>::vacuum(1).squeeze(0, r, 0.0).unwrap();
        assert_relative_eq!(sq.quadrature_variance(0, PI / 2.0).unwrap(), (2.0 * r).exp() / 2.0, epsilon = 1e-14);
        for theta in [0.0, 0.3, 1.2, 2.9] {
            let a = sq.quadrature_variance(0, theta).unwrap();
            let b = sq.quadrature_variance(0, theta + PI).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-14);
            assert_relative_eq!(GaussianState::<f64>::vacuum(1).quadrature_variance(0, theta).unwrap(), 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn squeezing_db_anchors() {
        assert_eq!(squeezing_db(0.5).unwrap(), 0.0);
        assert_relative_eq!(squeezing_db(0.25).unwrap(), -3.010299956639812, epsilon = 1e-12);
        assert_relative_eq!(squeezing_db(0.05).unwrap(), -10.0, epsilon = 1e-12);
        assert!(squeezing_db(0.0).is_err());
        assert!(squeezing_db(-1.0).is_err());
    }

    #[test]
    fn infer_effective_loss_cases() {
        let pure = infer_effective_loss(0.1, 2.5).unwrap();
        assert_relative_eq!(pure.transmissivity, 1.0, epsilon = 1e-12);
        let vac = infer_effective_loss(0.5, 0.5).unwrap();
        assert_eq!((vac.transmissivity, vac.r), (1.0, 0.0));
        let st = GaussianState::<f64>::vacuum(1).squeeze(0, 1.0, 0.0).unwrap().loss_channel(0, 0.7).unwrap();
        let vmin = st.quadrature_variance(0, 0.0).unwrap();
        let vmax = st.quadrature_variance(0, PI / 2.0).unwrap();
        let est = infer_effective_loss(vmin, vmax).unwrap();
        assert_relative_eq!(est.transmissivity, 0.7, epsilon = 1e-9);
        assert_relative_eq!(est.r, 1.0, epsilon = 1e-9);
        assert!(matches!(infer_effective_loss(0.1, 1.0), Err(Error::UncertaintyViolation(_))));
        assert!(matches!(infer_effective_loss(0.8, 0.8), Err(Error::ThermalNotSqueezed { .. })));
        assert!(matches!(infer_effective_loss(0.6, 0.9), Err(Error::ThermalNotSqueezed { .. })));
        assert!(infer_effective_loss(0.9, 0.6).is_err());
    }

    #[test]
    fn wigner_values() {
        let vac = GaussianState::<f64>::vacuum(1);
        assert_relative_eq!(vac.wigner_at(&[0.0, 0.0]).unwrap(), 1.0 / PI, epsilon = 1e-15);
        let alpha = c(0.7, -0.4);
        let d = vac.displace(0, alpha).unwrap();
        let peak = [alpha.re * 2f64.sqrt(), alpha.im * 2f64.sqrt()];
        let w_peak = d.wigner_at(&peak).unwrap();
        assert_relative_eq!(w_peak, 1.0 / PI, epsilon = 1e-15);
        for off in [[0.1, 0.0], [0.0, -0.1], [0.3, 0.2]] {
            assert!(d.wigner_at(&[peak[0] + off[0], peak[1] + off[1]]).unwrap() < w_peak);
        }
        assert!(vac.wigner_at(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn wigner_integrates_to_one() {
        let st = GaussianState::<f64>::vacuum(1).squeeze(0, 0.5, 0.4).unwrap().displace(0, c(0.3, 0.1)).unwrap();
        let h = 0.05;
        let mut total = 0.0;
        for i in -160..=160 {
            for j in -160..=160 {
                total += st.wigner_at(&[i as f64 * h, j as f64 * h]).unwrap();
            }
        }
        assert_relative_eq!(total * h * h, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn thermal_state_is_mixed_and_valid() {
        let th = GaussianState::<f64>::thermal(1.5).unwrap();
        assert_relative_eq!(th.purity(), 0.25, epsilon = 1e-14);
        assert_relative_eq!(th.symplectic_eigenvalues()[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_covariances_rejected() {
        let m = Matrix::from_rows(&[vec![0.1, 0.0], vec![0.0, 0.1]]).unwrap();
        assert!(matches!(GaussianState::new(vec![0.0, 0.0], m), Err(Error::UncertaintyViolation(_))));
        let asym = Matrix::from_rows(&[vec![1.0, 0.2], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(GaussianState::new(vec![0.0, 0.0], asym), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn argmin_of_variance_is_squeezing_angle() {
        let phi = 0.83;
        let sq = GaussianState::<f64>::vacuum(1).squeeze(0, 0.7, phi).unwrap();
        let best = (0..3600)
            .map(|k| k as f64 * PI / 3600.0)
            .min_by(|&a, &b| sq.quadrature_variance(0, a).unwrap().partial_cmp(&sq.quadrature_variance(0, b).unwrap()).unwrap())
            .unwrap();
        assert!((best - phi).abs() < PI / 3600.0);
        assert_relative_eq!(sq.quadrature_variance(0, phi).unwrap(), (-1.4f64).exp() / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn single_precision_engine_works() {
        let s = GaussianState::<f32>::vacuum(1).squeeze(0, 0.5, 0.0).unwrap().loss_channel(0, 0.8).unwrap();
        let v = s.quadrature_variance(0, 0.0).unwrap();
        assert!((v - (0.8 * (-1.0f32).exp() / 2.0 + 0.1)).abs() < 1e-6);
        assert!(s.validate().is_ok());
    }
}
