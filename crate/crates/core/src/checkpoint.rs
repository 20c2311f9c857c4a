//! Flat, versioned parameter checkpoints: named tensors with shapes and
//! row-major values, serialized as JSON.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::params::ParamSet;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorRecord {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub tensors: Vec<TensorRecord>,
}

impl Checkpoint {
    pub fn from_params(params: &ParamSet<f64>) -> Self {
        let tensors = params
            .iter()
            .map(|(name, m)| TensorRecord {
                name: name.to_string(),
                rows: m.rows(),
                cols: m.cols(),
                data: m.data().to_vec(),
            })
            .collect();
        Self { version: CHECKPOINT_VERSION, tensors }
    }

    pub fn into_params(self) -> Result<ParamSet<f64>> {
        if self.version != CHECKPOINT_VERSION {
            return Err(CoreError::CheckpointVersion {
                found: self.version,
                expected: CHECKPOINT_VERSION,
            });
        }
        let mut params = ParamSet::new();
        for t in self.tensors {
            params.push(t.name, Matrix::new(t.rows, t.cols, t.data)?)?;
        }
        Ok(params)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&json)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_values_exactly() {
        let mut params = ParamSet::new();
        params
            .push("w", Matrix::from_rows(&[vec![0.1, -2.5e-7], vec![3.0, 4.125]]).unwrap())
            .unwrap();
        params.push("b", Matrix::from_rows(&[vec![1.0 / 3.0]]).unwrap()).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt.json");
        Checkpoint::from_params(&params).save(&path).unwrap();
        let restored = Checkpoint::load(&path).unwrap().into_params().unwrap();
        assert_eq!(params, restored);
    }

    #[test]
    fn rejects_unknown_version() {
        let ckpt = Checkpoint { version: 99, tensors: vec![] };
        assert!(matches!(
            ckpt.into_params(),
            Err(CoreError::CheckpointVersion { found: 99, .. })
        ));
    }
}
