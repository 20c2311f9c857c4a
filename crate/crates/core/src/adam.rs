//! Adam with bias correction, operating on named parameter sets.

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::params::ParamSet;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct AdamConfig<T> {
    pub learning_rate: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Scalar> Default for AdamConfig<T> {
    fn default() -> Self {
        Self {
            learning_rate: T::c(1e-4),
            beta1: T::c(0.9),
            beta2: T::c(0.999),
            epsilon: T::c(1e-8),
        }
    }
}

impl<T: Scalar> AdamConfig<T> {
    pub fn with_learning_rate(learning_rate: T) -> Self {
        Self { learning_rate, ..Self::default() }
    }
}

/// Per-parameter first and second moment accumulators plus the step counter.
#[derive(Clone, Debug)]
pub struct AdamState<T> {
    config: AdamConfig<T>,
    step: u64,
    first: Vec<Matrix<T>>,
    second: Vec<Matrix<T>>,
    names: Vec<String>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(params: &ParamSet<T>, config: AdamConfig<T>) -> Self {
        let first = params.iter().map(|(_, m)| Matrix::zeros(m.rows(), m.cols())).collect();
        let second = params.iter().map(|(_, m)| Matrix::zeros(m.rows(), m.cols())).collect();
        let names = params.names().map(str::to_string).collect();
        Self { config, step: 0, first, second, names }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn config(&self) -> &AdamConfig<T> {
        &self.config
    }

    pub fn moment_pair(&self, name: &str) -> Option<(&Matrix<T>, &Matrix<T>)> {
        let idx = self.names.iter().position(|n| n == name)?;
        Some((&self.first[idx], &self.second[idx]))
    }

    /// One Adam update. Rejects NaN gradients, naming the offending tensor.
    pub fn step(&mut self, params: &mut ParamSet<T>, grads: &ParamSet<T>) -> Result<()> {
        params.check_aligned(grads)?;
        for (name, grad) in grads.iter() {
            if grad.data().iter().any(|v| v.is_nan()) {
                return Err(CoreError::NanGradient(name.to_string()));
            }
        }
        self.step += 1;
        let t = self.step;
        let AdamConfig { learning_rate, beta1, beta2, epsilon } = self.config;
        let one = T::one();
        let bias1 = one - beta1.powi(t as i32);
        let bias2 = one - beta2.powi(t as i32);

        for idx in 0..params.len() {
            let g = {
                let (_, g) = grads.slot(idx);
                g.clone()
            };
            let m = &mut self.first[idx];
            let v = &mut self.second[idx];
            let (_, p) = params.slot_mut(idx);
            let (md, vd, pd, gd) = (m.data_mut(), v.data_mut(), p.data_mut(), g.data());
            for i in 0..gd.len() {
                let gi = gd[i];
                md[i] = beta1 * md[i] + (one - beta1) * gi;
                vd[i] = beta2 * vd[i] + (one - beta2) * gi * gi;
                let m_hat = md[i] / bias1;
                let v_hat = vd[i] / bias2;
                pd[i] = pd[i] - learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(value: f64) -> ParamSet<f64> {
        let mut p = ParamSet::new();
        p.push("p", Matrix::filled(1, 1, value)).unwrap();
        p
    }

    #[test]
    fn zero_gradient_from_fresh_state_leaves_params_unchanged() {
        let mut params = single(1.5);
        let mut state = AdamState::new(&params, AdamConfig::default());
        let zero = params.zeros_like();
        for _ in 0..200 {
            state.step(&mut params, &zero).unwrap();
        }
        assert_eq!(params.get("p").unwrap().get(0, 0), 1.5);
    }

    #[test]
    fn moments_decay_toward_zero_once_gradients_stop() {
        let mut params = single(1.5);
        let mut state = AdamState::new(&params, AdamConfig::default());
        let mut g = params.zeros_like();
        g.get_mut("p").unwrap().set(0, 0, 0.3);
        state.step(&mut params, &g).unwrap();
        let m_before = state.moment_pair("p").unwrap().0.get(0, 0).abs();

        let zero = params.zeros_like();
        for _ in 0..200 {
            state.step(&mut params, &zero).unwrap();
        }
        let (m, v) = state.moment_pair("p").unwrap();
        assert!(m.get(0, 0).abs() < m_before * 1e-8);
        assert!(v.get(0, 0).abs() < 1e-4);
    }

    #[test]
    fn constant_gradient_update_magnitude_approaches_learning_rate() {
        let mut params = single(0.0);
        let cfg = AdamConfig::default();
        let mut state = AdamState::new(&params, cfg);
        let mut g = params.zeros_like();
        g.get_mut("p").unwrap().set(0, 0, 0.5);
        let mut prev = params.get("p").unwrap().get(0, 0);
        let mut last_delta = 0.0;
        for _ in 0..10_000 {
            state.step(&mut params, &g).unwrap();
            let cur = params.get("p").unwrap().get(0, 0);
            last_delta = (cur - prev).abs();
            prev = cur;
        }
        let lr = cfg.learning_rate;
        assert!(
            (last_delta - lr).abs() / lr < 0.05,
            "expected |delta| within 5% of lr, got {last_delta}"
        );
    }

    #[test]
    fn quadratic_converges_to_minimum() {
        // loss = (p - 3)^2, gradient 2(p - 3)
        let mut params = single(0.0);
        let mut state = AdamState::new(&params, AdamConfig::default());
        let mut steps = 0;
        for _ in 0..50_000 {
            let p = params.get("p").unwrap().get(0, 0);
            let mut g = params.zeros_like();
            g.get_mut("p").unwrap().set(0, 0, 2.0 * (p - 3.0));
            state.step(&mut params, &g).unwrap();
            steps += 1;
            if (params.get("p").unwrap().get(0, 0) - 3.0).abs() < 1e-3 {
                break;
            }
        }
        let p = params.get("p").unwrap().get(0, 0);
        assert!((p - 3.0).abs() < 1e-3, "p = {p} after {steps} steps");
    }

    #[test]
    fn nan_gradient_names_parameter() {
        let mut params = single(0.0);
        let mut state = AdamState::new(&params, AdamConfig::default());
        let mut g = params.zeros_like();
        g.get_mut("p").unwrap().data_mut()[0] = f64::NAN;
        let err = state.step(&mut params, &g).unwrap_err().to_string();
        assert!(err.contains("'p'"), "{err}");
    }

    #[test]
    fn step_counter_increases() {
        let mut params = single(0.0);
        let mut state = AdamState::new(&params, AdamConfig::default());
        let g = params.zeros_like();
        for expect in 1..=5 {
            state.step(&mut params, &g).unwrap();
            assert_eq!(state.step_count(), expect);
        }
    }
}
