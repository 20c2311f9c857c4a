use epiwave_wmn::AdjacencyNorm;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Full,
    /// Without the awareness recovery: rates pinned at zero, scaling bypassed.
    Wsa,
    /// Without the temporal module: one perceptron over the concatenated days.
    Wt,
    /// Without the spatial module: features pass through untouched.
    Ws,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Self::Full),
            "wsa" => Ok(Self::Wsa),
            "wt" => Ok(Self::Wt),
            "ws" => Ok(Self::Ws),
            other => Err(format!("unknown variant '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    /// Roll the recurrence D2 further steps on zero inputs, one scalar per step.
    #[default]
    Rollout,
    /// Map the final hidden state straight to a D2-vector.
    Direct,
}

impl std::str::FromStr for Readout {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rollout" => Ok(Self::Rollout),
            "direct" => Ok(Self::Direct),
            other => Err(format!("unknown readout '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    /// Graph convolution layers.
    pub l1: usize,
    /// Recurrent layers.
    pub l2: usize,
    pub hidden: usize,
    /// Number of most-frequent symptoms fed to the model.
    pub k: usize,
    pub d1: usize,
    pub d2: usize,
    pub dropout: f64,
    pub adjacency_norm: AdjacencyNorm,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub variant: Variant,
    pub readout: Readout,
    /// Starting value of the per-district awareness rates. Zero is a
    /// stationary point of rate^2, so training needs a nonzero start.
    pub lambda_init: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            l1: 1,
            l2: 2,
            hidden: 10,
            k: 8,
            d1: 21,
            d2: 7,
            dropout: 0.5,
            adjacency_norm: AdjacencyNorm::Column,
            epochs: 100,
            batch_size: 8,
            learning_rate: 1e-4,
            seed: 0,
            variant: Variant::Full,
            readout: Readout::Rollout,
            lambda_init: 0.05,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ModelError::BadConfig(msg));
        if self.l1 == 0 || self.l2 == 0 {
            return bad("l1 and l2 must be at least 1".into());
        }
        if self.hidden == 0 || self.k == 0 {
            return bad("hidden and k must be at least 1".into());
        }
        if self.d1 == 0 || self.d2 == 0 {
            return bad("d1 and d2 must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} must lie in [0, 1)", self.dropout));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch_size must be at least 1".into());
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return bad(format!("learning rate {} must be positive", self.learning_rate));
        }
        Ok(())
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_scenario(mut self, d1: usize, d2: usize) -> Self {
        self.d1 = d1;
        self.d2 = d2;
        self
    }
}
