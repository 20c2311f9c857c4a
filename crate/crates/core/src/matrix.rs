//! Row-major dense matrices. Every constructor and operation rejects
//! non-finite entries so that NaN/Inf can never propagate silently.

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CoreError::DataLength { rows, cols, len: data.len() });
        }
        let m = Self { rows, cols, data };
        m.check_finite("new")?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CoreError::DataLength { rows: r, cols: c, len: 0 });
        }
        Self::new(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.cols + col] = value;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn check_finite(&self, op: &'static str) -> Result<()> {
        for (idx, v) in self.data.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFinite { op, row: idx / self.cols.max(1), col: idx % self.cols.max(1) });
            }
        }
        Ok(())
    }

    fn shape_err(
        op: &'static str,
        a: &Self,
        b: &Self,
    ) -> CoreError {
        CoreError::ShapeMismatch {
            op,
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        }
    }

    /// self * rhs
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Self::shape_err("matmul", self, rhs));
        }
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            let a_row = &self.data[i * k..(i + 1) * k];
            let o_row = &mut out.data[i * n..(i + 1) * n];
            for (p, &a) in a_row.iter().enumerate() {
                let b_row = &rhs.data[p * n..(p + 1) * n];
                for (o, &b) in o_row.iter_mut().zip(b_row) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    /// self * rhs^T, without materializing the transpose.
    pub fn matmul_nt(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.cols {
            return Err(Self::shape_err("matmul_nt", self, rhs));
        }
        let (m, k, n) = (self.rows, self.cols, rhs.rows);
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            let a_row = &self.data[i * k..(i + 1) * k];
            for j in 0..n {
                let b_row = &rhs.data[j * k..(j + 1) * k];
                let mut acc = T::zero();
                for (&a, &b) in a_row.iter().zip(b_row) {
                    acc = acc + a * b;
                }
                out.data[i * n + j] = acc;
            }
        }
        Ok(out)
    }

    /// self^T * rhs, without materializing the transpose.
    pub fn matmul_tn(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Self::shape_err("matmul_tn", self, rhs));
        }
        let (m, k, n) = (self.cols, self.rows, rhs.cols);
        let mut out = Self::zeros(m, n);
        for p in 0..k {
            let a_row = &self.data[p * m..(p + 1) * m];
            let b_row = &rhs.data[p * n..(p + 1) * n];
            for (i, &a) in a_row.iter().enumerate() {
                let o_row = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in o_row.iter_mut().zip(b_row) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Self::shape_err("add", self, rhs));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Self::shape_err("sub", self, rhs));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn hadamard(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Self::shape_err("hadamard", self, rhs));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a * b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scaled(&self, factor: T) -> Self {
        let data = self.data.iter().map(|&a| a * factor).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        let data = self.data.iter().map(|&a| f(a)).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.cols];
        for row in self.data.chunks(self.cols) {
            for (s, &v) in sums.iter_mut().zip(row) {
                *s = *s + v;
            }
        }
        sums
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().copied().fold(T::zero(), |a, b| a + b))
            .collect()
    }

    pub fn sum(&self) -> T {
        self.data.iter().copied().fold(T::zero(), |a, b| a + b)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        debug_assert_eq!(self.shape(), rhs.shape());
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    type M = Matrix<f64>;

    #[test]
    fn matmul_identity_is_noop() {
        let b = M::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let i3 = M::identity(3);
        assert_eq!(i3.matmul(&b).unwrap(), b);
    }

    #[test]
    fn matmul_hand_case() {
        let a = M::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = M::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let got = a.matmul(&b).unwrap();
        assert_eq!(got, M::from_rows(&[vec![2.0], vec![4.0]]).unwrap());
    }

    #[test]
    fn matmul_zero_annihilates() {
        let z = M::zeros(2, 3);
        let b = M::from_rows(&[vec![1.0, -1.0], vec![2.0, 0.5], vec![0.0, 9.0]]).unwrap();
        assert_eq!(z.matmul(&b).unwrap(), M::zeros(2, 2));
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let a = M::zeros(2, 3);
        let b = M::zeros(4, 5);
        let err = a.matmul(&b).unwrap_err().to_string();
        assert!(err.contains("2x3"), "{err}");
        assert!(err.contains("4x5"), "{err}");
    }

    #[test]
    fn transposed_kernels_match_explicit_transpose() {
        let a = M::from_rows(&[vec![1.0, 2.0, -1.0], vec![0.5, -3.0, 2.0]]).unwrap();
        let b = M::from_rows(&[vec![2.0, 1.0, 0.0], vec![-1.0, 4.0, 1.5]]).unwrap();
        assert_eq!(a.matmul_nt(&b).unwrap(), a.matmul(&b.transpose()).unwrap());
        let c = M::from_rows(&[vec![1.0, 0.0], vec![2.0, -1.0]]).unwrap();
        let d = M::from_rows(&[vec![3.0, 1.0, 2.0], vec![0.0, -2.0, 1.0]]).unwrap();
        assert_eq!(c.matmul_tn(&d).unwrap(), c.transpose().matmul(&d).unwrap());
    }

    #[test]
    fn rejects_non_finite() {
        let err = M::new(1, 2, vec![1.0, f64::NAN]);
        assert!(err.is_err());
    }

    #[test]
    fn data_length_checked() {
        assert!(M::new(2, 2, vec![1.0; 3]).is_err());
    }
}
