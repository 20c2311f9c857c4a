//! Learnable tensors per variant, with seeded initialization.
//!
//! Weights and biases draw uniformly from +-1/sqrt(fan-in). The awareness
//! rates start at a small constant instead of zero: the rates enter the
//! model squared, so zero is a stationary point no gradient step can leave.

use epiwave_core::{Matrix64, ParamSet64};
use rand::Rng;

use crate::config::{ModelConfig, Readout, Variant};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub set: ParamSet64,
}

pub(crate) const LSTM_GATES: [&str; 4] = ["i", "f", "g", "o"];

fn uniform_tensor(rows: usize, cols: usize, fan_in: usize, rng: &mut impl Rng) -> Matrix64 {
    let bound = 1.0 / (fan_in as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.random_range(-bound..bound)).collect();
    Matrix64::new(rows, cols, data).expect("finite init")
}

/// Push one LSTM layer's twelve tensors under `prefix` (e.g. "lstm0").
pub(crate) fn push_lstm_layer(
    set: &mut ParamSet64,
    prefix: &str,
    input: usize,
    hidden: usize,
    rng: &mut impl Rng,
) -> Result<()> {
    for gate in LSTM_GATES {
        set.push(format!("{prefix}.w_x{gate}"), uniform_tensor(input, hidden, input, rng))?;
        set.push(format!("{prefix}.w_h{gate}"), uniform_tensor(hidden, hidden, hidden, rng))?;
        set.push(format!("{prefix}.b_{gate}"), uniform_tensor(1, hidden, hidden, rng))?;
    }
    Ok(())
}

impl ModelParams {
    /// Fresh parameters for `cfg` over `n` districts. Tensor order is fixed
    /// and doubles as the RNG draw order, so identical seeds give identical
    /// parameters.
    pub fn init(cfg: &ModelConfig, n: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut set = ParamSet64::new();
        let k = cfg.k;
        let feature_width = k + 1;

        if !matches!(cfg.variant, Variant::Ws) {
            for layer in 0..cfg.l1 {
                set.push(format!("gcn.w{layer}"), uniform_tensor(k, k, k, rng))?;
            }
        }

        let lambda_start = match cfg.variant {
            Variant::Wsa => 0.0,
            _ => cfg.lambda_init,
        };
        set.push("awareness.lambda", Matrix64::filled(n, 1, lambda_start))?;

        match cfg.variant {
            Variant::Wt => {
                let input = cfg.d1 * feature_width;
                set.push("direct.w", uniform_tensor(input, cfg.d2, input, rng))?;
                set.push("direct.b", uniform_tensor(1, cfg.d2, input, rng))?;
            }
            _ => {
                for layer in 0..cfg.l2 {
                    let input = if layer == 0 { feature_width } else { cfg.hidden };
                    push_lstm_layer(&mut set, &format!("lstm{layer}"), input, cfg.hidden, rng)?;
                }
                let out_cols = match cfg.readout {
                    Readout::Rollout => 1,
                    Readout::Direct => cfg.d2,
                };
                set.push("readout.w", uniform_tensor(cfg.hidden, out_cols, cfg.hidden, rng))?;
                set.push("readout.b", uniform_tensor(1, out_cols, cfg.hidden, rng))?;
            }
        }

        Ok(Self { set })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn same_seed_same_params() {
        let cfg = ModelConfig::default();
        let a = ModelParams::init(&cfg, 5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = ModelParams::init(&cfg, 5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn full_variant_tensor_inventory() {
        let cfg = ModelConfig::default();
        let params = ModelParams::init(&cfg, 4, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let names: Vec<&str> = params.set.names().collect();
        assert!(names.contains(&"gcn.w0"));
        assert!(names.contains(&"awareness.lambda"));
        assert!(names.contains(&"lstm0.w_xi"));
        assert!(names.contains(&"lstm1.w_ho"));
        assert!(names.contains(&"readout.w"));
        // 1 gcn + lambda + 2 layers x 12 + readout w/b
        assert_eq!(params.set.len(), 1 + 1 + 24 + 2);
        assert_eq!(params.set.get("gcn.w0").unwrap().shape(), (8, 8));
        assert_eq!(params.set.get("lstm0.w_xi").unwrap().shape(), (9, 10));
        assert_eq!(params.set.get("readout.w").unwrap().shape(), (10, 1));
    }

    #[test]
    fn variant_inventories_differ() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ws = ModelParams::init(
            &ModelConfig::default().with_variant(Variant::Ws),
            4,
            &mut rng,
        )
        .unwrap();
        assert!(ws.set.get("gcn.w0").is_err());

        let wt = ModelParams::init(
            &ModelConfig::default().with_variant(Variant::Wt),
            4,
            &mut rng,
        )
        .unwrap();
        assert!(wt.set.get("lstm0.w_xi").is_err());
        assert_eq!(wt.set.get("direct.w").unwrap().shape(), (21 * 9, 7));

        let wsa = ModelParams::init(
            &ModelConfig::default().with_variant(Variant::Wsa),
            4,
            &mut rng,
        )
        .unwrap();
        assert!(wsa.set.get("awareness.lambda").unwrap().data().iter().all(|&v| v == 0.0));
    }
}
