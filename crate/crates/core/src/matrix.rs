//! Dense square matrices over a [`Scalar`], with the few products the
//! mixing computations need.

use alloc::vec::Vec;

use crate::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    dim: usize,
    data: Vec<S>,
}

/// Row-compressed view of a matrix, used as the right factor when stepping
/// `P^t -> P^{t+1}` for sparse `P`.
#[derive(Clone, Debug)]
pub struct SparseRows<S> {
    rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: alloc::vec![S::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = S::one();
        }
        m
    }

    /// Builds from row-major data. Panics if the length is not a square.
    pub fn from_rows(dim: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix data must be dim * dim");
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: S) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[S] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { dim: self.dim, data: self.data.iter().map(f).collect() }
    }

    pub fn sparse(&self) -> SparseRows<S> {
        SparseRows {
            rows: self
                .rows()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(j, v)| (j, v.clone()))
                        .collect()
                })
                .collect(),
        }
    }

    /// `self * rhs`; every row is computed independently, so the parallel
    /// and sequential results are identical.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        self.mul_sparse(&rhs.sparse())
    }

    /// `self * rhs` where `rhs` is given row-compressed.
    pub fn mul_sparse(&self, rhs: &SparseRows<S>) -> Self {
        let dim = self.dim;
        let row_product = |i: usize| -> Vec<S> {
            let mut out = alloc::vec![S::zero(); dim];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in &rhs.rows[k] {
                    out[*j].add_product(a, b);
                }
            }
            out
        };
        #[cfg(feature = "parallel")]
        let rows: Vec<Vec<S>> = {
            use rayon::prelude::*;
            (0..dim).into_par_iter().map(row_product).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let rows: Vec<Vec<S>> = (0..dim).map(row_product).collect();
        Self { dim, data: rows.into_iter().flatten().collect() }
    }

    /// `v * self` for a row vector `v`.
    pub fn left_apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.dim);
        let mut out = alloc::vec![S::zero(); self.dim];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in self.row(k).iter().enumerate() {
                if !b.is_zero() {
                    out[j].add_product(a, b);
                }
            }
        }
        out
    }

    /// `self^exponent` by repeated squaring.
    pub fn pow(&self, mut exponent: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut square = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.mul(&square);
            }
            exponent >>= 1;
            if exponent > 0 {
                square = square.mul(&square);
            }
        }
        result
    }
}

impl<S: Scalar> SparseRows<S> {
    pub fn row(&self, row: usize) -> &[(usize, S)] {
        &self.rows[row]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Ascending powers `P^(2^i)`, kept so that mixing-time searches can combine
/// them without recomputing.
#[derive(Clone, Debug)]
pub struct PowerLadder<S> {
    powers: Vec<Matrix<S>>,
}

impl<S: Scalar> PowerLadder<S> {
    pub fn new(base: Matrix<S>) -> Self {
        Self { powers: alloc::vec![base] }
    }

    /// `P^(2^level)`, squaring as needed.
    pub fn level(&mut self, level: usize) -> &Matrix<S> {
        while self.powers.len() <= level {
            let last = self.powers.last().expect("ladder is never empty");
            let next = last.mul(last);
            self.powers.push(next);
        }
        &self.powers[level]
    }

    /// `P^exponent` assembled from the ladder.
    pub fn power(&mut self, exponent: u64) -> Matrix<S> {
        let dim = self.powers[0].dim();
        let mut result: Option<Matrix<S>> = None;
        let mut bit = 0;
        while bit < 64 && (exponent >> bit) != 0 {
            if (exponent >> bit) & 1 == 1 {
                let factor = self.level(bit).clone();
                result = Some(match result {
                    None => factor,
                    Some(acc) => acc.mul(&factor),
                });
            }
            bit += 1;
        }
        result.unwrap_or_else(|| Matrix::identity(dim))
    }
}
