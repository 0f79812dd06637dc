use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{symplectic_form, Matrix};
use crate::scalar::Real;

/// Affine symplectic map `r ↦ S r + d` on the quadrature vector of an N-mode
/// system.
///
/// Operators transform in the Heisenberg picture: `matrix` expresses output
/// quadratures in terms of input quadratures, so covariances transform as
/// `S V Sᵀ` and means as `S μ + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp<T> {
    pub matrix: Matrix<T>,
    pub shift: Vec<T>,
}

pub(crate) fn check_mode(mode: usize, n_modes: usize) -> Result<()> {
    if mode < n_modes {
        Ok(())
    } else {
        Err(Error::ModeOutOfRange { mode, n_modes })
    }
}

pub(crate) fn check_pair(i: usize, j: usize, n_modes: usize) -> Result<()> {
    check_mode(i, n_modes)?;
    check_mode(j, n_modes)?;
    if i == j {
        return Err(Error::DuplicateModes(i));
    }
    Ok(())
}

pub(crate) fn check_beam_splitter<T: Real>(tau: T, rho: T) -> Result<()> {
    let norm = tau * tau + rho * rho;
    if (norm - T::one()).abs() > T::structural_tol() {
        return Err(Error::NonUnitaryBeamSplitter { norm: norm.as_f64() });
    }
    Ok(())
}

impl<T: Real> SymplecticOp<T> {
    pub fn identity(n_modes: usize) -> Self {
        Self { matrix: Matrix::identity(2 * n_modes), shift: vec![T::zero(); 2 * n_modes] }
    }

    /// Wraps an arbitrary matrix, checking `SᵀΩS = Ω`.
    pub fn new(matrix: Matrix<T>, shift: Vec<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() % 2 != 0 || shift.len() != matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "symplectic matrix {}x{} with shift of length {}",
                matrix.rows(),
                matrix.cols(),
                shift.len()
            )));
        }
        let op = Self { matrix, shift };
        let dev = op.symplectic_defect();
        let scale = T::one().max(op.matrix.max_abs() * op.matrix.max_abs());
        if dev > T::structural_tol() * scale {
            return Err(Error::NotSymplectic(dev.as_f64()));
        }
        Ok(op)
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.rows() / 2
    }

    /// `max |SᵀΩS − Ω|`.
    pub fn symplectic_defect(&self) -> T {
        let omega = symplectic_form::<T>(self.n_modes());
        let st = self.matrix.transpose();
        let lhs = &(&st * &omega) * &self.matrix;
        lhs.max_abs_diff(&omega)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Self) -> Self {
        let matrix = &self.matrix * &first.matrix;
        let moved = self.matrix.mul_vec(&first.shift);
        let shift = moved.iter().zip(&self.shift).map(|(&a, &b)| a + b).collect();
        Self { matrix, shift }
    }

    /// Embeds a 2x2 single-mode block acting on `mode`.
    fn single_mode(n_modes: usize, mode: usize, block: [[T; 2]; 2]) -> Result<Self> {
        check_mode(mode, n_modes)?;
        let mut op = Self::identity(n_modes);
        for a in 0..2 {
            for b in 0..2 {
                op.matrix[(2 * mode + a, 2 * mode + b)] = block[a][b];
            }
        }
        Ok(op)
    }

    /// Phase-space rotation of `mode` by `theta`: `X_θ` of the input becomes
    /// the X quadrature of the output.
    pub fn rotation(n_modes: usize, mode: usize, theta: T) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        Self::single_mode(n_modes, mode, [[c, s], [-s, c]])
    }

    /// Single-mode squeezer. For `phi = 0`, `X → X e^{-r}` and `P → P e^{r}`;
    /// other angles conjugate this by a rotation so the squeezed quadrature is
    /// `X_phi`.
    pub fn squeeze(n_modes: usize, mode: usize, r: T, phi: T) -> Result<Self> {
        let (s, c) = phi.sin_cos();
        let (em, ep) = ((-r).exp(), r.exp());
        // R(φ) diag(e^-r, e^r) R(φ)ᵀ with R(φ) = [[c, -s], [s, c]]
        let block = [
            [c * c * em + s * s * ep, c * s * (em - ep)],
            [c * s * (em - ep), s * s * em + c * c * ep],
        ];
        Self::single_mode(n_modes, mode, block)
    }

    /// Two-mode squeezer `a → a cosh r + b† sinh r`, `b → b cosh r + a† sinh r`.
    pub fn two_mode_squeeze(n_modes: usize, i: usize, j: usize, r: T) -> Result<Self> {
        check_pair(i, j, n_modes)?;
        let (ch, sh) = (r.cosh(), r.sinh());
        let mut op = Self::identity(n_modes);
        let m = &mut op.matrix;
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        m[(xi, xi)] = ch;
        m[(xi, xj)] = sh;
        m[(pi, pi)] = ch;
        m[(pi, pj)] = -sh;
        m[(xj, xj)] = ch;
        m[(xj, xi)] = sh;
        m[(pj, pj)] = ch;
        m[(pj, pi)] = -sh;
        Ok(op)
    }

    /// Beam splitter `a' = τa − ρb`, `b' = τb + ρa`, applied identically to
    /// both quadratures. No extra phases.
    pub fn beam_splitter(n_modes: usize, i: usize, j: usize, tau: T, rho: T) -> Result<Self> {
        check_pair(i, j, n_modes)?;
        check_beam_splitter(tau, rho)?;
        let mut op = Self::identity(n_modes);
        let m = &mut op.matrix;
        for q in 0..2 {
            let (a, b) = (2 * i + q, 2 * j + q);
            m[(a, a)] = tau;
            m[(a, b)] = -rho;
            m[(b, b)] = tau;
            m[(b, a)] = rho;
        }
        Ok(op)
    }

    /// Phase-space displacement `a → a + α`.
    pub fn displacement(n_modes: usize, mode: usize, alpha: Complex<T>) -> Result<Self> {
        check_mode(mode, n_modes)?;
        let mut op = Self::identity(n_modes);
        let sqrt2 = T::SQRT_2();
        op.shift[2 * mode] = alpha.re * sqrt2;
        op.shift[2 * mode + 1] = alpha.im * sqrt2;
        Ok(op)
    }
}
