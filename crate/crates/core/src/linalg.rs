//! Dense matrices over exact scalars.

use serde::{Deserialize, Serialize};

use crate::error::{shape, Result};
use crate::scalar::{ExactField, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return shape("ragged rows");
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Matrix::from_fn(self.rows, cols.len(), |r, c| self.get(r, cols[c]).clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |r, c| {
            (0..self.cols).fold(T::zero(), |acc, k| {
                acc + self.get(r, k).clone() * other.get(k, c).clone()
            })
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return shape("matrix-vector length mismatch");
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return shape("matrix sum shape mismatch");
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|v| v.clone() * k.clone())
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[T]) -> T {
        let mv = self.mul_vec(v).expect("quadratic form length");
        v.iter()
            .zip(mv)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b)
    }

    /// `uᵀ M v`.
    pub fn bilinear_form(&self, u: &[T], v: &[T]) -> T {
        let mv = self.mul_vec(v).expect("bilinear form length");
        u.iter()
            .zip(mv)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b)
    }

    /// Sum of absolute values of all entries.
    pub fn abs_entry_sum(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc + v.abs())
    }

    /// Block-diagonal matrix with `copies` copies of `self` on the diagonal.
    pub fn block_diagonal(&self, copies: usize) -> Self {
        let (n, m) = (self.rows, self.cols);
        Matrix::from_fn(n * copies, m * copies, |r, c| {
            if r / n == c / m {
                self.get(r % n, c % m).clone()
            } else {
                T::zero()
            }
        })
    }
}

/// Row-echelon data from fraction-full Gaussian elimination.
struct Echelon<T> {
    reduced: Matrix<T>,
    pivots: Vec<usize>,
    swaps: usize,
}

fn echelon<T: ExactField>(m: &Matrix<T>) -> Echelon<T> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
            continue;
        };
        if p != row {
            a.swap_rows(p, row);
            swaps += 1;
        }
        let pivot = a.get(row, col).clone();
        for r in (row + 1)..a.rows {
            let f = a.get(r, col).clone() / pivot.clone();
            if f.is_zero() {
                continue;
            }
            for c in col..a.cols {
                let v = a.get(r, c).clone() - f.clone() * a.get(row, c).clone();
                a.set(r, c, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    Echelon {
        reduced: a,
        pivots,
        swaps,
    }
}

impl<T: ExactField> Matrix<T> {
    pub fn rank(&self) -> usize {
        echelon(self).pivots.len()
    }

    pub fn determinant(&self) -> Result<T> {
        if !self.is_square() {
            return shape("determinant of a non-square matrix");
        }
        if self.rows == 0 {
            return Ok(T::one());
        }
        let e = echelon(self);
        if e.pivots.len() < self.rows {
            return Ok(T::zero());
        }
        let mut det = (0..self.rows).fold(T::one(), |acc, i| acc * e.reduced.get(i, i).clone());
        if e.swaps % 2 == 1 {
            det = -det;
        }
        Ok(det)
    }

    /// Exact solution of `self · x = b`; `None` when inconsistent. When the
    /// system is underdetermined the free variables are set to zero.
    pub fn solve(&self, b: &[T]) -> Result<Option<Vec<T>>> {
        if b.len() != self.rows {
            return shape("right-hand side length");
        }
        let aug = Matrix::from_fn(self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                b[r].clone()
            }
        });
        let e = echelon(&aug);
        if e.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![T::zero(); self.cols];
        for (i, &pc) in e.pivots.iter().enumerate().rev() {
            let mut acc = e.reduced.get(i, self.cols).clone();
            for (c, xc) in x.iter().enumerate().take(self.cols).skip(pc + 1) {
                acc = acc - e.reduced.get(i, c).clone() * xc.clone();
            }
            x[pc] = acc / e.reduced.get(i, pc).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Option<Self>> {
        if !self.is_square() {
            return shape("inverse of a non-square matrix");
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let e: Vec<T> = (0..n).map(|i| if i == k { T::one() } else { T::zero() }).collect();
            match self.solve(&e)? {
                Some(x) if self.rank() == n => cols.push(x),
                _ => return Ok(None),
            }
        }
        Ok(Some(Matrix::from_fn(n, n, |r, c| cols[c][r].clone())))
    }

    /// Leading principal minors `det(M[..k, ..k])` for `k = 1..=n`.
    pub fn leading_minors(&self) -> Result<Vec<T>> {
        if !self.is_square() {
            return shape("minors of a non-square matrix");
        }
        (1..=self.rows)
            .map(|k| Matrix::from_fn(k, k, |r, c| self.get(r, c).clone()).determinant())
            .collect()
    }

    /// Sylvester's criterion.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric()
            && self
                .leading_minors()
                .map(|m| m.iter().all(|d| *d > T::zero()))
                .unwrap_or(false)
    }

    /// All principal minors non-negative.
    pub fn is_positive_semidefinite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.rows;
        (1u64..(1u64 << n)).all(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sub = Matrix::from_fn(idx.len(), idx.len(), |r, c| self.get(idx[r], idx[c]).clone());
            sub.determinant().map(|d| d >= T::zero()).unwrap_or(false)
        })
    }
}
