//! Central finite-difference verification of analytic gradients.
//!
//! The check lives on the opposite side of a dual route: callers compute
//! analytic gradients through the tape, and this module re-derives them by
//! perturbing each parameter entry, never touching the tape machinery.

use std::fmt::Display;

use crate::error::{CoreError, Result};
use crate::params::ParamSet;
use crate::scalar::Scalar;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Entries where analytic and numeric magnitudes both fall below this floor
/// are below finite-difference resolution and compare as equal.
const ABS_FLOOR: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct TensorCheck {
    pub name: String,
    pub max_rel_err: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct GradCheckReport {
    pub tensors: Vec<TensorCheck>,
    pub tolerance: f64,
    pub passed: bool,
}

impl GradCheckReport {
    pub fn failing(&self) -> impl Iterator<Item = &TensorCheck> {
        self.tensors.iter().filter(|t| !t.passed)
    }

    pub fn max_rel_err(&self) -> f64 {
        self.tensors.iter().map(|t| t.max_rel_err).fold(0.0, f64::max)
    }
}

/// Compare `analytic` gradients of `loss_fn` at `params` against central
/// finite differences with step `FD_STEP`, reporting the max relative error
/// per tensor. The loss must be deterministic: it is evaluated twice at the
/// base point and any bit-level disagreement is a hard error.
pub fn finite_diff_check<T, F, E>(
    loss_fn: F,
    params: &ParamSet<T>,
    analytic: &ParamSet<T>,
    tolerance: f64,
) -> Result<GradCheckReport>
where
    T: Scalar,
    F: Fn(&ParamSet<T>) -> std::result::Result<T, E>,
    E: Display,
{
    params.check_aligned(analytic)?;
    let eval = |p: &ParamSet<T>| -> Result<T> {
        loss_fn(p).map_err(|e| CoreError::LossEval(e.to_string()))
    };

    let base_a = eval(params)?;
    let base_b = eval(params)?;
    if base_a != base_b {
        return Err(CoreError::NonDeterministic {
            first: format!("{base_a}"),
            second: format!("{base_b}"),
        });
    }

    let step = T::c(FD_STEP);
    let two = T::c(2.0);
    let mut work = params.clone();
    let mut tensors = Vec::with_capacity(params.len());

    for idx in 0..params.len() {
        let (name, base) = params.slot(idx);
        let name = name.to_string();
        let mut max_rel: f64 = 0.0;
        for elem in 0..base.len() {
            let original = base.data()[elem];
            work.slot_mut(idx).1.data_mut()[elem] = original + step;
            let plus = eval(&work)?;
            work.slot_mut(idx).1.data_mut()[elem] = original - step;
            let minus = eval(&work)?;
            work.slot_mut(idx).1.data_mut()[elem] = original;

            let numeric = ((plus - minus) / (two * step)).to_f64().unwrap_or(f64::NAN);
            let exact = analytic.slot(idx).1.data()[elem].to_f64().unwrap_or(f64::NAN);
            let scale = exact.abs().max(numeric.abs());
            let rel = if scale < ABS_FLOOR { 0.0 } else { (exact - numeric).abs() / scale };
            max_rel = max_rel.max(rel);
        }
        let passed = max_rel <= tolerance;
        tensors.push(TensorCheck { name, max_rel_err: max_rel, passed });
    }

    let passed = tensors.iter().all(|t| t.passed);
    Ok(GradCheckReport { tensors, tolerance, passed })
}
