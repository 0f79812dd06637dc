//! Device models in SI units: single-pass parametric gain in a nonlinear
//! crystal, cavity figures of merit, and the below-threshold OPA spectrum.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::homodyne::NoiseSpectrum;
use crate::linalg::Matrix;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Upper bound on a plausible effective nonlinearity, m/V.
const CHI_EFF_MAX: f64 = 1e-9;
/// Variances below this are reported as a near-singular state.
pub const NEAR_SINGULAR_VARIANCE: f64 = 1e-6;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrystalConfig {
    /// m/V
    pub chi_eff: f64,
    pub refractive_index: f64,
    /// m
    pub length: f64,
    /// m
    pub signal_wavelength: f64,
}

impl CrystalConfig {
    pub fn validate(&self) -> Result<()> {
        positive("chi_eff", self.chi_eff)?;
        if self.chi_eff >= CHI_EFF_MAX {
            return Err(Error::invalid(format!("chi_eff {} m/V is implausibly large", self.chi_eff)));
        }
        positive("refractive_index", self.refractive_index)?;
        positive("length", self.length)?;
        positive("signal_wavelength", self.signal_wavelength)
    }

    /// Signal angular frequency `2πc/λ`, rad/s.
    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.signal_wavelength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    /// W
    pub power: f64,
    /// m
    pub waist_radius: f64,
}

impl PumpConfig {
    pub fn validate(&self) -> Result<()> {
        positive("power", self.power)?;
        positive("waist_radius", self.waist_radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpField {
    /// W/m²
    pub intensity: f64,
    /// V/m
    pub amplitude: f64,
}

/// `I = P/(πw²)` and `|ε| = √(I/(2nε₀c))`.
pub fn pump_field_amplitude(pump: &PumpConfig, crystal: &CrystalConfig) -> Result<PumpField> {
    pump.validate()?;
    crystal.validate()?;
    let intensity = pump.power / (PI * pump.waist_radius.powi(2));
    let amplitude = (intensity / (2.0 * crystal.refractive_index * VACUUM_PERMITTIVITY * SPEED_OF_LIGHT)).sqrt();
    Ok(PumpField { intensity, amplitude })
}

/// Single-pass squeezing parameter `r = χ_eff Ω |ε_p| L / (n c)` for a
/// perfectly phase-matched crystal. The pump amplitude is the peak field
/// `|ε_p|` returned by [`pump_field_amplitude`].
pub fn single_pass_r(crystal: &CrystalConfig, pump: &PumpConfig) -> Result<f64> {
    let field = pump_field_amplitude(pump, crystal)?;
    Ok(crystal.chi_eff * crystal.angular_frequency() / (crystal.refractive_index * SPEED_OF_LIGHT)
        * field.amplitude
        * crystal.length)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    /// m
    pub roundtrip_length: f64,
    pub roundtrip_loss_excl_coupler: f64,
    pub output_coupler_t: f64,
}

impl CavityConfig {
    pub fn validate(&self) -> Result<()> {
        positive("roundtrip_length", self.roundtrip_length)?;
        for (name, v) in [("roundtrip_loss_excl_coupler", self.roundtrip_loss_excl_coupler), ("output_coupler_t", self.output_coupler_t)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        let total = self.roundtrip_loss_excl_coupler + self.output_coupler_t;
        if total >= 0.5 {
            return Err(Error::invalid(format!("total round-trip loss {total} is outside the weak-coupling regime")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityFigures {
    /// Hz
    pub fsr: f64,
    pub finesse: f64,
    /// Half-linewidth, Hz; the full width at half maximum is `2γ`.
    pub gamma: f64,
    pub escape_efficiency: f64,
}

impl CavityFigures {
    pub fn fwhm(&self) -> f64 {
        2.0 * self.gamma
    }
}

pub fn cavity_figures(cavity: &CavityConfig) -> Result<CavityFigures> {
    cavity.validate()?;
    let total = cavity.roundtrip_loss_excl_coupler + cavity.output_coupler_t;
    let fsr = SPEED_OF_LIGHT / cavity.roundtrip_length;
    let finesse = PI / total;
    Ok(CavityFigures {
        fsr,
        finesse,
        gamma: fsr / finesse,
        escape_efficiency: cavity.output_coupler_t / total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpaConfig {
    /// Half-linewidth, Hz.
    pub gamma: f64,
    pub eta: f64,
    /// `P/P_th`, in `[0, 1)`.
    pub pump_ratio: f64,
}

impl OpaConfig {
    pub fn validate(&self) -> Result<()> {
        positive("gamma", self.gamma)?;
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::invalid(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if !(self.pump_ratio >= 0.0) {
            return Err(Error::invalid(format!("pump_ratio must be non-negative, got {}", self.pump_ratio)));
        }
        if self.pump_ratio >= 1.0 {
            return Err(Error::invalid(format!("pump_ratio {} is at or above threshold", self.pump_ratio)));
        }
        Ok(())
    }

    /// `(V⁺, V⁻)` at sideband frequency `nu`.
    pub fn variances(&self, nu: f64) -> Result<(f64, f64)> {
        self.validate()?;
        Ok(opa_variances(self.gamma, self.eta, self.pump_ratio, nu))
    }
}

/// `V± = 1/2 ± η·2x / [(ν/γ)² + (1∓x)²]` with `x = √(P/P_th)`. No threshold
/// check: `pump_ratio = 1` gives the limiting curve.
pub fn opa_variances(gamma: f64, eta: f64, pump_ratio: f64, nu: f64) -> (f64, f64) {
    let x = pump_ratio.sqrt();
    let f2 = (nu / gamma).powi(2);
    let plus = 0.5 + eta * 2.0 * x / (f2 + (1.0 - x).powi(2));
    let minus = 0.5 - eta * 2.0 * x / (f2 + (1.0 + x).powi(2));
    (plus, minus)
}

pub fn opa_spectrum(opa: &OpaConfig, freqs: &[f64]) -> Result<NoiseSpectrum> {
    opa.validate()?;
    if freqs.iter().any(|f| !f.is_finite()) {
        return Err(Error::invalid("frequencies must be finite"));
    }
    let (v_plus, v_minus) = freqs.iter().map(|&f| opa_variances(opa.gamma, opa.eta, opa.pump_ratio, f)).unzip();
    let meta = BTreeMap::from([
        ("gamma_hz".to_string(), opa.gamma),
        ("fwhm_hz".to_string(), 2.0 * opa.gamma),
        ("eta".to_string(), opa.eta),
        ("pump_ratio".to_string(), opa.pump_ratio),
    ]);
    Ok(NoiseSpectrum { freqs: freqs.to_vec(), v_plus, v_minus, meta })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveState {
    pub state: GaussianState<f64>,
    /// `Var(X)` is below [`NEAR_SINGULAR_VARIANCE`].
    pub near_singular: bool,
}

/// Single-mode state with `Var(X) = V⁻(ν)`, `Var(P) = V⁺(ν)`, zero mean.
pub fn effective_gaussian_state(opa: &OpaConfig, nu: f64) -> Result<EffectiveState> {
    let (v_plus, v_minus) = opa.variances(nu)?;
    if v_minus <= 0.0 {
        return Err(Error::SingularCovariance);
    }
    if v_plus * v_minus < 0.25 - 1e-12 {
        return Err(Error::UncertaintyViolation((v_plus * v_minus).sqrt()));
    }
    let cov = Matrix::from_rows(&[vec![v_minus, 0.0], vec![0.0, v_plus]])?;
    Ok(EffectiveState { state: GaussianState::new(vec![0.0, 0.0], cov)?, near_singular: v_minus < NEAR_SINGULAR_VARIANCE })
}

/// Reads a device config from a JSON file.
pub fn load_config<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    pub(crate) fn ppktp() -> (CrystalConfig, PumpConfig) {
        (
            CrystalConfig { chi_eff: 14e-12, refractive_index: 1.8, length: 5e-3, signal_wavelength: 780e-9 },
            PumpConfig { power: 0.1, waist_radius: 50e-6 },
        )
    }

    #[test]
    fn pump_field_hand_values() {
        let (c, p) = ppktp();
        let f = pump_field_amplitude(&p, &c).unwrap();
        // 0.1 / (π 2.5e-9) and √(I / (2·1.8·ε₀·c))
        assert_relative_eq!(f.intensity, 1.273_239_544_735_162_7e7, max_relative = 1e-12);
        assert_relative_eq!(f.amplitude, 3.650_220_438_781_519e4, max_relative = 1e-12);
        let f2 = pump_field_amplitude(&PumpConfig { power: 0.2, ..p }, &c).unwrap();
        assert_relative_eq!(f2.amplitude / f.amplitude, 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn single_pass_scaling() {
        let (c, p) = ppktp();
        let r = single_pass_r(&c, &p).unwrap();
        assert!((r - 1.1e-2).abs() / 1.1e-2 < 0.15);
        let r2 = single_pass_r(&CrystalConfig { length: 1e-2, ..c }, &p).unwrap();
        assert_relative_eq!(r2, 2.0 * r, max_relative = 1e-12);
        let r4 = single_pass_r(&c, &PumpConfig { power: 0.4, ..p }).unwrap();
        assert_relative_eq!(r4, 2.0 * r, max_relative = 1e-12);
    }

    #[test]
    fn crystal_validation() {
        let (c, p) = ppktp();
        assert!(single_pass_r(&CrystalConfig { chi_eff: 2e-9, ..c }, &p).is_err());
        assert!(single_pass_r(&CrystalConfig { length: 0.0, ..c }, &p).is_err());
    }

    #[test]
    fn cavity_hand_values() {
        let cav = CavityConfig { roundtrip_length: 0.3, roundtrip_loss_excl_coupler: 0.005, output_coupler_t: 0.015 };
        let f = cavity_figures(&cav).unwrap();
        assert_relative_eq!(f.fsr, 999_308_193.333_333_3, max_relative = 1e-12);
        assert_relative_eq!(f.finesse, PI / 0.02, max_relative = 1e-12);
        assert_relative_eq!(f.gamma, 999_308_193.333_333_3 * 0.02 / PI, max_relative = 1e-12);
        assert_eq!(f.escape_efficiency, 0.75);
        assert_eq!(f.fwhm(), 2.0 * f.gamma);
        assert!(cavity_figures(&CavityConfig { output_coupler_t: 0.6, ..cav }).is_err());
    }

    #[test]
    fn opa_limits() {
        let (_, m) = opa_variances(1e6, 0.75, 1.0, 0.0);
        assert_relative_eq!(m, 0.125, max_relative = 1e-15);
        let off = opa_spectrum(&OpaConfig { gamma: 1e6, eta: 0.9, pump_ratio: 0.0 }, &[0.0, 1e6, 1e9]).unwrap();
        assert!(off.v_plus.iter().chain(&off.v_minus).all(|&v| v == 0.5));
        let (_, m) = opa_variances(1e6, 1.0, 0.9, 1e7);
        assert!((m - 0.5).abs() / 0.5 < 0.04);
        assert!(OpaConfig { gamma: 1e6, eta: 0.5, pump_ratio: 1.0 }.validate().is_err());
    }

    #[test]
    fn effective_state() {
        let vac = effective_gaussian_state(&OpaConfig { gamma: 1e6, eta: 0.8, pump_ratio: 0.0 }, 0.0).unwrap();
        assert_eq!(vac.state, GaussianState::vacuum(1));
        assert!(!vac.near_singular);
        let near = effective_gaussian_state(&OpaConfig { gamma: 1e6, eta: 1.0, pump_ratio: 1.0 - 1e-7 }, 0.0).unwrap();
        assert!(near.near_singular);
        let s = effective_gaussian_state(&OpaConfig { gamma: 1e6, eta: 0.75, pump_ratio: 0.999_999 }, 0.0).unwrap();
        let cov = s.state.cov();
        assert!(cov[(0, 0)] * cov[(1, 1)] > 0.25);
    }

    #[test]
    fn config_json() {
        let (c, _) = ppktp();
        let back: CrystalConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #[test]
        fn opa_ordering_and_monotonicity(
            eta in 0.0f64..=1.0,
            x in 0.0f64..0.999,
            nu in 0.0f64..1e8,
            dnu in 0.0f64..1e7,
            dx in 0.0f64..0.5,
        ) {
            let g = 3e6;
            let (p, m) = opa_variances(g, eta, x, nu);
            prop_assert!(p >= 0.5 && 0.5 >= m);
            let (_, m2) = opa_variances(g, eta, x, nu + dnu);
            prop_assert!(m2 >= m - 1e-15);
            let x2 = (x + dx).min(0.999);
            let (_, m0) = opa_variances(g, eta, x2, 0.0);
            let (_, m1) = opa_variances(g, eta, x, 0.0);
            prop_assert!(m0 <= m1 + 1e-15);
            let (pz, mz) = opa_variances(g, 0.0, x, nu);
            prop_assert!(pz == 0.5 && mz == 0.5);
        }
    }
}
