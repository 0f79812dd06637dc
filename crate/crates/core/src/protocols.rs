//! Composite pipelines: continuous-variable teleportation, squeezed-light
//! enhanced phase readout, and photon-subtraction state engineering.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    beam_splitter_fock, cat_fock, coherent_fock, herald, squeezed_vacuum_fock, tmsv_fock, CatParity, DensityMatrix,
    Detector, FockState,
};
use crate::gaussian::{GaussianState, WignerEvaluator};
use crate::linalg::Matrix;

// ---------------------------------------------------------------------------
// Teleportation

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportResult {
    pub output_state: GaussianState<f64>,
    pub added_noise_per_quadrature: f64,
    /// `Tr(ρ_in ρ_out)`: the fidelity whenever the input is pure.
    pub coherent_fidelity: f64,
}

/// Variance added to each output quadrature, `[(1+g²) cosh 2r − 2g sinh 2r]/2`;
/// `e^{−2r}` at unit gain.
pub fn teleport_added_noise(r: f64, gain: f64) -> f64 {
    ((1.0 + gain * gain) * (2.0 * r).cosh() - 2.0 * gain * (2.0 * r).sinh()) / 2.0
}

/// Closed-form teleportation of a single-mode Gaussian input through a
/// two-mode squeezed resource of strength `r` with classical gain `gain`.
pub fn teleport_gaussian(input: &GaussianState<f64>, r: f64, gain: f64) -> Result<TeleportResult> {
    if input.n_modes() != 1 {
        return Err(Error::ModeCountMismatch(input.n_modes(), 1));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("resource squeezing must be a finite r >= 0, got {r}")));
    }
    if !gain.is_finite() {
        return Err(Error::invalid("gain must be finite"));
    }
    let added = teleport_added_noise(r, gain);
    let v = input.cov();
    let cov = Matrix::from_fn(2, 2, |i, j| gain * gain * v[(i, j)] + if i == j { added } else { 0.0 });
    let mean = input.mean().iter().map(|m| gain * m).collect();
    let output_state = GaussianState::new(mean, cov)?;
    let coherent_fidelity = input.overlap(&output_state)?;
    Ok(TeleportResult { output_state, added_noise_per_quadrature: added, coherent_fidelity })
}

/// Unit-gain coherent-state fidelity `1/(1 + e^{−2r})`.
pub fn teleport_fidelity(r: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * r).exp())
}

/// Resource squeezing giving unit-gain coherent fidelity `f ∈ [1/2, 1)`.
pub fn resource_r_for_fidelity(f: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&f) {
        return Err(Error::invalid(format!("fidelity {f} is outside [1/2, 1)")));
    }
    Ok(-0.5 * (1.0 / f - 1.0).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerCheck {
    /// Sup-norm difference between the marginalized and closed-form output Wigner functions.
    pub max_discrepancy: f64,
    /// Grid spacing exceeds half the narrowest output width, or the grid
    /// does not reach three widths from the output mean.
    pub coarse_grid: bool,
}

const GH_NODES: usize = 6;

/// Gauss-Hermite nodes and weights for weight `e^{−t²}` (Golub-Welsch).
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = Matrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            ((i.max(j)) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let (nodes, vecs) = jacobi.symmetric_eigen();
    let weights = (0..n).map(|k| PI.sqrt() * vecs[(0, k)].powi(2)).collect();
    (nodes, weights)
}

/// Marginalizes the three-mode Wigner function of (input, resource) after the
/// sender's beam splitter over the Bell-measurement outcomes and compares it
/// with [`teleport_gaussian`] at unit gain.
///
/// Modes are `a` (input), `b` (sender half), `c` (receiver half). With
/// `u = (X'_a, P'_a, X'_b, P'_b)` the receiver's displaced output is
/// `W_out(x, p) = ∫ d⁴u W'_abc(u, x − √2 X'_a, p − √2 P'_b)`. The 4D integral
/// uses tensor Gauss-Hermite quadrature in coordinates that whiten the
/// integrand's Hessian about its maximum.
pub fn teleport_wigner_check(input: &GaussianState<f64>, r: f64, grid: &[[f64; 2]]) -> Result<WignerCheck> {
    if grid.is_empty() || grid.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("grid must be non-empty and finite"));
    }
    let closed = teleport_gaussian(input, r, 1.0)?.output_state;
    let resource = GaussianState::vacuum(2).two_mode_squeeze(0, 1, r)?;
    let joint = input.tensor(&resource).beam_splitter(0, 1, FRAC_1_SQRT_2, FRAC_1_SQRT_2)?;
    let w6 = WignerEvaluator::new(&joint)?;
    let vinv = joint.cov().inverse()?;

    // z = L u + e(x, p)
    let l = Matrix::from_fn(6, 4, |i, j| match (i, j) {
        (i, j) if i < 4 => f64::from(u8::from(i == j)),
        (4, 0) | (5, 3) => -SQRT_2,
        _ => 0.0,
    });
    let lt = l.transpose();
    let hess = &(&lt * &vinv) * &l;
    let hess_inv = hess.inverse()?;
    let scale = hess.symmetric_map(|v| (2.0 / v).sqrt());
    let jac = scale.determinant().abs();
    let (nodes, weights) = gauss_hermite(GH_NODES);
    let mu = joint.mean();

    let mut max_discrepancy: f64 = 0.0;
    for &[x, p] in grid {
        let e = [0.0, 0.0, 0.0, 0.0, x, p];
        let shifted: Vec<f64> = e.iter().zip(mu).map(|(a, m)| a - m).collect();
        let b = (&lt * &vinv).mul_vec(&shifted);
        let u_star: Vec<f64> = hess_inv.mul_vec(&b).iter().map(|v| -v).collect();
        let mut total = 0.0;
        for i0 in 0..GH_NODES {
            for i1 in 0..GH_NODES {
                for i2 in 0..GH_NODES {
                    for i3 in 0..GH_NODES {
                        let t = [nodes[i0], nodes[i1], nodes[i2], nodes[i3]];
                        let st = scale.mul_vec(&t);
                        let u: Vec<f64> = u_star.iter().zip(&st).map(|(a, b)| a + b).collect();
                        let z = [u[0], u[1], u[2], u[3], x - SQRT_2 * u[0], p - SQRT_2 * u[3]];
                        let w = weights[i0] * weights[i1] * weights[i2] * weights[i3];
                        let t2: f64 = t.iter().map(|v| v * v).sum();
                        total += w * t2.exp() * w6.eval(&z)?;
                    }
                }
            }
        }
        let numeric = jac * total;
        max_discrepancy = max_discrepancy.max((numeric - closed.wigner_at(&[x, p])?).abs());
    }

    let (vals, _) = closed.cov().symmetric_eigen();
    let (sd_min, sd_max) = (vals[0].sqrt(), vals[1].sqrt());
    let spacing = min_grid_spacing(grid);
    let m = closed.mean();
    let reach = |k: usize, sign: f64| grid.iter().any(|g| sign * (g[k] - m[k]) >= 3.0 * sd_max);
    let covers = reach(0, 1.0) && reach(0, -1.0) && reach(1, 1.0) && reach(1, -1.0);
    Ok(WignerCheck { max_discrepancy, coarse_grid: spacing > 0.5 * sd_min || !covers })
}

fn min_grid_spacing(grid: &[[f64; 2]]) -> f64 {
    let axis = |k: usize| {
        let mut v: Vec<f64> = grid.iter().map(|g| g[k]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    };
    let s = axis(0).max(axis(1));
    if s.is_finite() { s } else { 0.0 }
}

// ---------------------------------------------------------------------------
// Phase readout

/// `|φ|` above which the linearized readout is flagged.
pub const LINEAR_REGIME_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    pub phi_true: f64,
    /// Momentum-quadrature mean of the dark-port output, `√2 φ α`.
    pub signal_displacement: f64,
    pub readout_variance: f64,
    pub snr: f64,
    pub phi_min_detectable: f64,
    /// `|φ|` exceeds [`LINEAR_REGIME_LIMIT`].
    pub outside_linear_regime: bool,
}

/// Interferometer dark-port readout: the signal displaces the dark-port
/// mode along `+P` by `√2 φ α`; the dark port carries vacuum squeezed in `P`
/// by `dark_port_r`, degraded by detection efficiency `eta_detect`.
pub fn gw_phase_readout(phi: f64, alpha: f64, dark_port_r: f64, eta_detect: f64) -> Result<PhaseEstimate> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("carrier amplitude must be positive, got {alpha}")));
    }
    if !phi.is_finite() || !(dark_port_r >= 0.0) || !(0.0..=1.0).contains(&eta_detect) {
        return Err(Error::invalid("need finite phi, r >= 0 and eta in [0, 1]"));
    }
    let dark = GaussianState::vacuum(1).squeeze(0, dark_port_r, PI / 2.0)?.loss_channel(0, eta_detect)?;
    let variance = dark.quadrature_variance(0, PI / 2.0)?;
    let displacement = SQRT_2 * phi * alpha;
    Ok(PhaseEstimate {
        phi_true: phi,
        signal_displacement: displacement,
        readout_variance: variance,
        snr: displacement / variance.sqrt(),
        phi_min_detectable: variance.sqrt() / (SQRT_2 * alpha),
        outside_linear_regime: phi.abs() > LINEAR_REGIME_LIMIT,
    })
}

/// Sensitivity gain over a vacuum dark port in dB, `−10 log10(2V)`.
pub fn readout_improvement_db(dark_port_r: f64, eta_detect: f64) -> Result<f64> {
    let v = gw_phase_readout(0.0, 1.0, dark_port_r, eta_detect)?.readout_variance;
    Ok(-10.0 * (2.0 * v).log10())
}

/// Detection efficiency at which squeezing `dark_port_r` yields a net
/// improvement of `target_db`, by bisection on the readout pipeline.
pub fn eta_for_improvement(dark_port_r: f64, target_db: f64) -> Result<f64> {
    if !(target_db > 0.0) {
        return Err(Error::invalid("target improvement must be positive"));
    }
    if readout_improvement_db(dark_port_r, 1.0)? < target_db {
        return Err(Error::invalid(format!(
            "r = {dark_port_r} gives at most {:.3} dB",
            readout_improvement_db(dark_port_r, 1.0)?
        )));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if readout_improvement_db(dark_port_r, mid)? < target_db {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// State engineering

#[derive(Debug, Clone)]
pub struct Heralded {
    /// Dominant pure branch of the conditional state.
    pub state: FockState<f64>,
    /// Full conditional state (mixed when the detector does not resolve photon number).
    pub density: DensityMatrix<f64>,
    pub probability: f64,
}

/// Click on the idler of a two-mode squeezed vacuum heralds a photon in the signal.
pub fn make_heralded_photon(r: f64, cutoff: usize) -> Result<Heralded> {
    if !(r >= 0.0) {
        return Err(Error::invalid(format!("r must be non-negative, got {r}")));
    }
    let h = herald(&tmsv_fock(r, cutoff)?, 1, Detector::Click, &[])?;
    Ok(Heralded { state: h.state, density: h.density, probability: h.probability })
}

/// Reference amplitude for the kitten pipelines: the `X`-squeezed vacuum
/// `|0⟩ − (r/√2)|2⟩ + …` is the even cat of amplitude `i√r`.
pub fn kitten_alpha(r: f64) -> Complex<f64> {
    Complex::new(0.0, r.sqrt())
}

#[derive(Debug, Clone)]
pub struct Kitten {
    pub heralded: Heralded,
    /// `⟨cat|ρ|cat⟩` against the normalized odd cat of amplitude [`kitten_alpha`].
    pub fidelity: f64,
}

/// Photon subtraction: squeezed vacuum, weak tap of reflectivity `rho`,
/// click on the tap.
pub fn make_kitten(r: f64, cutoff: usize, rho: f64) -> Result<Kitten> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid(format!("tap reflectivity must lie in (0, 1), got {rho}")));
    }
    let tau = (1.0 - rho * rho).sqrt();
    let sq = squeezed_vacuum_fock(r, cutoff)?.tensor(&FockState::vacuum(1, cutoff)?)?;
    let h = herald(&beam_splitter_fock(&sq, 0, 1, tau, rho)?, 1, Detector::Click, &[])?;
    let target = cat_fock(kitten_alpha(r), CatParity::Odd, cutoff)?;
    let fidelity = h.density.fidelity_with(&target)?;
    Ok(Kitten { heralded: Heralded { state: h.state, density: h.density, probability: h.probability }, fidelity })
}

#[derive(Debug, Clone)]
pub struct KittenSuperposition {
    pub heralded: Heralded,
    /// `⟨even|ψ⟩`, real and non-negative by choice of global phase.
    pub even_overlap: Complex<f64>,
    /// `⟨odd|ψ⟩` in the same phase convention.
    pub odd_overlap: Complex<f64>,
}

/// Mixes the tap with a weak coherent ancilla on a second beam splitter of
/// reflectivity `rho_mix` before the click, so the click cannot reveal
/// whether a photon left the signal. The conditional signal state is then a
/// superposition of the even (no subtraction) and odd (one photon
/// subtracted) kittens, weighted by the ancilla amplitude and phase.
///
/// Modes: 0 signal, 1 tap (clicked), 2 ancilla (traced).
pub fn engineer_kitten_superposition(
    r: f64,
    ancilla_alpha: Complex<f64>,
    rho_tap: f64,
    rho_mix: f64,
    cutoff: usize,
) -> Result<KittenSuperposition> {
    for (name, v) in [("rho_tap", rho_tap), ("rho_mix", rho_mix)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::invalid(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    let sq = squeezed_vacuum_fock(r, cutoff)?;
    let three = sq
        .tensor(&FockState::vacuum(1, cutoff)?)?
        .tensor(&coherent_fock(ancilla_alpha, cutoff)?.normalized())?;
    let tapped = beam_splitter_fock(&three, 0, 1, (1.0 - rho_tap * rho_tap).sqrt(), rho_tap)?;
    let mixed = beam_splitter_fock(&tapped, 1, 2, (1.0 - rho_mix * rho_mix).sqrt(), rho_mix)?;
    let h = herald(&mixed, 1, Detector::Click, &[2])?;

    let alpha = kitten_alpha(r);
    let even = cat_fock(alpha, CatParity::Even, cutoff)?;
    let odd = cat_fock(alpha, CatParity::Odd, cutoff)?;
    let e = even.inner(&h.state)?;
    // fix the global phase so ⟨even|ψ⟩ ≥ 0
    let phase = if e.norm() > 1e-14 { e.conj() / e.norm() } else { Complex::new(1.0, 0.0) };
    let amps: Vec<Complex<f64>> = h.state.amps().iter().map(|c| c * phase).collect();
    let state = FockState::new(1, cutoff, amps)?;
    let even_overlap = even.inner(&state)?;
    let odd_overlap = odd.inner(&state)?;
    Ok(KittenSuperposition {
        heralded: Heralded { state, density: h.density, probability: h.probability },
        even_overlap,
        odd_overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_annihilation, fidelity};
    use crate::homodyne::square_grid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn gauss_hermite_moments() {
        let (x, w) = gauss_hermite(GH_NODES);
        let m = |k: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum::<f64>();
        assert_relative_eq!(m(0), PI.sqrt(), max_relative = 1e-13);
        assert!(m(1).abs() < 1e-13);
        assert_relative_eq!(m(2), PI.sqrt() / 2.0, max_relative = 1e-13);
        assert_relative_eq!(m(4), 3.0 * PI.sqrt() / 4.0, max_relative = 1e-13);
    }

    #[test]
    fn teleport_benchmarks() {
        let coh = GaussianState::coherent(Complex::new(0.7, -0.2));
        assert_eq!(teleport_gaussian(&coh, 0.0, 1.0).unwrap().coherent_fidelity, 0.5);
        let r23 = resource_r_for_fidelity(2.0 / 3.0).unwrap();
        assert_relative_eq!(r23, 2f64.ln() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(teleport_gaussian(&coh, r23, 1.0).unwrap().coherent_fidelity, 2.0 / 3.0, max_relative = 1e-12);
        let r58 = resource_r_for_fidelity(0.58).unwrap();
        assert!((r58 - 0.161).abs() < 1e-3);
        assert_relative_eq!(teleport_fidelity(r58), 0.58, max_relative = 1e-14);
        let ideal = teleport_gaussian(&coh, 10.0, 1.0).unwrap();
        assert!(ideal.coherent_fidelity > 0.9999);
        assert!(ideal.output_state.cov().max_abs_diff(coh.cov()) < 1e-8);
        assert_eq!(ideal.output_state.mean(), coh.mean());
        assert!(teleport_gaussian(&coh, -0.1, 1.0).is_err());
    }

    #[test]
    fn fidelity_is_amplitude_independent() {
        let f: Vec<f64> = [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(0.0, 2.0)]
            .iter()
            .map(|&a| teleport_gaussian(&GaussianState::coherent(a), 0.4, 1.0).unwrap().coherent_fidelity)
            .collect();
        assert!(f.iter().all(|v| (v - f[0]).abs() < 1e-14));
        assert_relative_eq!(f[0], teleport_fidelity(0.4), max_relative = 1e-14);
    }

    #[test]
    fn vacuum_through_classical_channel() {
        let out = teleport_gaussian(&GaussianState::vacuum(1), 0.0, 1.0).unwrap();
        assert_relative_eq!(out.output_state.quadrature_variance(0, 0.0).unwrap(), 1.5, max_relative = 1e-14);
        assert_relative_eq!(out.output_state.quadrature_variance(0, PI / 2.0).unwrap(), 1.5, max_relative = 1e-14);
    }

    #[test]
    fn added_noise_matches_quadrature_algebra() {
        // Var(X_c − g X_b) for a TMSV with the engine's correlation signs
        let (r, g) = (0.6, 0.8);
        let tmsv = GaussianState::vacuum(2).two_mode_squeeze(0, 1, r).unwrap();
        let v = tmsv.linear_variance(&[-g, 0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(v, teleport_added_noise(r, g), max_relative = 1e-12);
    }

    #[test]
    fn wigner_integral_matches_closed_form() {
        let coh = GaussianState::coherent(Complex::new(0.5, 0.3));
        let grid = square_grid(3.0, 9);
        let chk = teleport_wigner_check(&coh, 1.0, &grid).unwrap();
        assert!(chk.max_discrepancy < 1e-6, "{}", chk.max_discrepancy);
        let sq = GaussianState::vacuum(1).squeeze(0, 0.3, 0.4).unwrap().displace(0, Complex::new(-0.2, 0.1)).unwrap();
        assert!(teleport_wigner_check(&sq, 0.5, &grid).unwrap().max_discrepancy < 1e-6);
    }

    #[test]
    fn strong_resource_reproduces_input_wigner() {
        let coh = GaussianState::coherent(Complex::new(0.5, 0.3));
        let out = teleport_gaussian(&coh, 8.0, 1.0).unwrap().output_state;
        for p in square_grid(3.0, 21) {
            assert!((out.wigner_at(&p).unwrap() - coh.wigner_at(&p).unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn coarse_grid_flag() {
        let coh = GaussianState::coherent(Complex::new(0.0, 0.0));
        assert!(teleport_wigner_check(&coh, 1.0, &square_grid(1.0, 3)).unwrap().coarse_grid);
    }

    #[test]
    fn gw_readout() {
        let zero = gw_phase_readout(0.0, 100.0, 1.0, 1.0).unwrap();
        assert_eq!(zero.snr, 0.0);
        let vac = gw_phase_readout(1e-3, 100.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(vac.phi_min_detectable, 1.0 / 200.0, max_relative = 1e-14);
        let sq = gw_phase_readout(1e-3, 100.0, 1.151, 1.0).unwrap();
        assert_relative_eq!(sq.snr / vac.snr, 1.151f64.exp(), max_relative = 1e-9);
        assert!(gw_phase_readout(0.2, 1.0, 0.0, 1.0).unwrap().outside_linear_regime);
        let twice = gw_phase_readout(1e-3, 200.0, 0.5, 0.9).unwrap();
        let once = gw_phase_readout(1e-3, 100.0, 0.5, 0.9).unwrap();
        assert_relative_eq!(twice.snr, 2.0 * once.snr, max_relative = 1e-14);
    }

    #[test]
    fn eta_solver_matches_closed_form() {
        let r = 1.151;
        let eta = eta_for_improvement(r, 2.2).unwrap();
        let closed = (1.0 - 10f64.powf(-0.22)) / (1.0 - (-2.0 * r).exp());
        assert_relative_eq!(eta, closed, max_relative = 1e-12);
        assert_relative_eq!(readout_improvement_db(r, eta).unwrap(), 2.2, max_relative = 1e-12);
        assert!(eta_for_improvement(0.1, 2.2).is_err());
    }

    #[test]
    fn heralded_photon() {
        let h = make_heralded_photon(0.05, 20).unwrap();
        let one = FockState::basis(20, &[1]).unwrap();
        assert!(h.density.fidelity_with(&one).unwrap() > 0.997);
        assert!(matches!(make_heralded_photon(0.0, 20), Err(Error::ZeroState)));
        let probs: Vec<f64> = (1..=20).map(|k| make_heralded_photon(0.1 * k as f64, 40).unwrap().probability).collect();
        assert!(probs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn kitten_fidelity() {
        let k = make_kitten(0.2, 20, 0.05).unwrap();
        assert!(k.fidelity > 0.95, "{}", k.fidelity);
        assert!(matches!(make_kitten(0.0, 20, 0.05), Err(Error::ZeroState)));
    }

    #[test]
    fn weak_tap_approaches_annihilation() {
        let k = make_kitten(0.3, 20, 0.01).unwrap();
        let (ideal, _) = apply_annihilation(&squeezed_vacuum_fock(0.3, 20).unwrap(), 0).unwrap();
        assert!(k.heralded.density.fidelity_with(&ideal).unwrap() > 0.999);
    }

    #[test]
    fn kitten_click_probability_grows_with_tap() {
        let p: Vec<f64> = [0.01, 0.03, 0.05, 0.08, 0.1].iter().map(|&rho| make_kitten(0.2, 16, rho).unwrap().heralded.probability).collect();
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn superposition_limits() {
        let (r, d) = (0.2, 12);
        let none = engineer_kitten_superposition(r, Complex::new(0.0, 0.0), 0.05, 0.5, d).unwrap();
        let k = make_kitten(r, d, 0.05).unwrap();
        assert!(fidelity(&none.heralded.state, &k.heralded.state).unwrap() > 0.999);

        let strong = engineer_kitten_superposition(r, Complex::new(0.5, 0.0), 0.01, 0.3, d).unwrap();
        let sq = squeezed_vacuum_fock(r, d).unwrap();
        assert!(fidelity(&strong.heralded.state, &sq).unwrap() > 0.95);

        let plus = engineer_kitten_superposition(r, Complex::new(0.05, 0.0), 0.05, 0.3, d).unwrap();
        let minus = engineer_kitten_superposition(r, Complex::new(-0.05, 0.0), 0.05, 0.3, d).unwrap();
        assert!(plus.even_overlap.im.abs() < 1e-12 && plus.even_overlap.re > 0.0);
        let (a, b) = (plus.odd_overlap, minus.odd_overlap);
        assert!(a.norm() > 0.1 && b.norm() > 0.1);
        assert!((a + b).norm() < 1e-6 * a.norm().max(1.0) + 0.05 * a.norm(), "{a} vs {b}");
        assert!((a.re * b.re + a.im * b.im) < 0.0);
    }

    proptest! {
        #[test]
        fn fidelity_monotone_in_resource(r in 0.0f64..4.0, dr in 1e-3f64..1.0) {
            let coh = GaussianState::coherent(Complex::new(0.3, 0.1));
            let f1 = teleport_gaussian(&coh, r, 1.0).unwrap().coherent_fidelity;
            let f2 = teleport_gaussian(&coh, r + dr, 1.0).unwrap().coherent_fidelity;
            prop_assert!(f2 > f1);
            prop_assert!((0.0..=1.0).contains(&f1));
        }

        #[test]
        fn unit_gain_preserves_mean(re in -3.0f64..3.0, im in -3.0f64..3.0, r in 0.0f64..3.0) {
            let coh = GaussianState::coherent(Complex::new(re, im));
            let out = teleport_gaussian(&coh, r, 1.0).unwrap();
            prop_assert_eq!(out.output_state.mean(), coh.mean());
            prop_assert!(out.added_noise_per_quadrature >= 0.0);
        }
    }
}
