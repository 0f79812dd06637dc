use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GaussianState;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

pub const GSTATE_VERSION: &str = "gstate-v1";

/// On-disk form of a [`GaussianState`]; covariance stored row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GaussianStateJson<T> {
    pub version: String,
    pub n_modes: usize,
    pub mean: Vec<T>,
    pub cov: Vec<Vec<T>>,
}

impl<T: Real> From<&GaussianState<T>> for GaussianStateJson<T> {
    fn from(s: &GaussianState<T>) -> Self {
        Self { version: GSTATE_VERSION.into(), n_modes: s.n_modes, mean: s.mean.clone(), cov: s.cov.to_rows() }
    }
}

impl<T: Real> TryFrom<GaussianStateJson<T>> for GaussianState<T> {
    type Error = Error;

    fn try_from(j: GaussianStateJson<T>) -> Result<Self> {
        if j.version != GSTATE_VERSION {
            return Err(Error::Parse(format!("unsupported version {:?}, expected {GSTATE_VERSION}", j.version)));
        }
        if j.mean.len() != 2 * j.n_modes {
            return Err(Error::Parse(format!("n_modes = {} but mean has {} entries", j.n_modes, j.mean.len())));
        }
        GaussianState::new(j.mean, Matrix::from_rows(&j.cov)?)
    }
}

impl<T: Real> GaussianState<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&GaussianStateJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<GaussianStateJson<T>>(s)?.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = GaussianState::<f64>::vacuum(2).two_mode_squeeze(0, 1, 0.4).unwrap();
        let text = s.to_json().unwrap();
        assert!(text.contains("\"version\": \"gstate-v1\""));
        let back = GaussianState::<f64>::from_json(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_wrong_version_and_unphysical() {
        let bad = r#"{"version":"gstate-v0","n_modes":1,"mean":[0,0],"cov":[[0.5,0],[0,0.5]]}"#;
        assert!(matches!(GaussianState::<f64>::from_json(bad), Err(Error::Parse(_))));
        let unphys = r#"{"version":"gstate-v1","n_modes":1,"mean":[0,0],"cov":[[0.1,0],[0,0.1]]}"#;
        assert!(matches!(GaussianState::<f64>::from_json(unphys), Err(Error::UncertaintyViolation(_))));
    }
}
