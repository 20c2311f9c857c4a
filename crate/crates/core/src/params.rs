//! Ordered collections of named tensors. Parameter order is significant:
//! optimizers and gradient reports align by slot, and serialization
//! preserves it.

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet<T> {
    entries: Vec<(String, Matrix<T>)>,
}

impl<T: Scalar> Default for ParamSet<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ParamSet<T> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, value: Matrix<T>) -> Result<()> {
        let name = name.into();
        if self.entries.iter().any(|(n, _)| *n == name) {
            return Err(CoreError::DuplicateParam(name));
        }
        self.entries.push((name, value));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_scalars(&self) -> usize {
        self.entries.iter().map(|(_, m)| m.len()).sum()
    }

    pub fn get(&self, name: &str) -> Result<&Matrix<T>> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| CoreError::UnknownParam(name.to_string()))
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Matrix<T>> {
        self.entries
            .iter_mut()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| CoreError::UnknownParam(name.to_string()))
    }

    pub fn slot(&self, idx: usize) -> (&str, &Matrix<T>) {
        let (n, m) = &self.entries[idx];
        (n, m)
    }

    pub fn slot_mut(&mut self, idx: usize) -> (&str, &mut Matrix<T>) {
        let (n, m) = &mut self.entries[idx];
        (n, m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Matrix<T>)> {
        self.entries.iter().map(|(n, m)| (n.as_str(), m))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn zeros_like(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(n, m)| (n.clone(), Matrix::zeros(m.rows(), m.cols())))
            .collect();
        Self { entries }
    }

    /// Verify that `other` has the same names and shapes in the same order.
    pub fn check_aligned(&self, other: &Self) -> Result<()> {
        for (slot, ((na, ma), (nb, mb))) in self.entries.iter().zip(&other.entries).enumerate() {
            if na != nb {
                return Err(CoreError::ParamOrder { slot, expected: na.clone(), got: nb.clone() });
            }
            if ma.shape() != mb.shape() {
                return Err(CoreError::ParamShape {
                    name: na.clone(),
                    expected_rows: ma.rows(),
                    expected_cols: ma.cols(),
                    got_rows: mb.rows(),
                    got_cols: mb.cols(),
                });
            }
        }
        if self.entries.len() != other.entries.len() {
            return Err(CoreError::ParamOrder {
                slot: self.entries.len().min(other.entries.len()),
                expected: format!("{} tensors", self.entries.len()),
                got: format!("{} tensors", other.entries.len()),
            });
        }
        Ok(())
    }
}
