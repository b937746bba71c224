use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::real::Real;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_diag(&vec![T::one(); d])
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let d = diag.len();
        let mut m = Self::zeros(d, d);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, &v| if v.abs() > m { v.abs() } else { m })
    }

    /// Largest asymmetry `|a_ij - a_ji|` and where it occurs.
    pub fn asymmetry(&self) -> (T, usize, usize) {
        let mut worst = (T::zero(), 0, 0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                let d = (self[(i, j)] - self[(j, i)]).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower Cholesky factor `L` with `L·Lᵀ = m`.
///
/// Only the lower triangle of `m` is read.
pub fn cholesky<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    if m.rows != m.cols {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: m.cols,
        });
    }
    let d = m.rows;
    let mut l = Matrix::zeros(d, d);
    for j in 0..d {
        let mut diag = m[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                pivot: j,
                value: diag.as_f64(),
            });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..d {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Symmetric positive-definite matrix with its Cholesky factor cached.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix<T> {
    matrix: Matrix<T>,
    chol: Matrix<T>,
    log_det: T,
}

impl<T: Real> SpdMatrix<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        let (asym, row, col) = matrix.asymmetry();
        let scale = matrix.max_abs().max(T::min_positive_value());
        if asym > T::of(1e-12) * scale {
            return Err(Error::NotSymmetric {
                row,
                col,
                diff: asym.as_f64(),
            });
        }
        let chol = cholesky(&matrix)?;
        let log_det = (0..chol.rows)
            .map(|i| chol[(i, i)].ln())
            .sum::<T>()
            * T::of(2.0);
        Ok(Self {
            matrix,
            chol,
            log_det,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::scaled_identity(d, T::one())
    }

    pub fn scaled_identity(d: usize, s: T) -> Self {
        Self::diagonal(&vec![s; d]).expect("positive diagonal")
    }

    pub fn diagonal(diag: &[T]) -> Result<Self> {
        Self::new(Matrix::from_diag(diag))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn cholesky(&self) -> &Matrix<T> {
        &self.chol
    }

    pub fn log_det(&self) -> T {
        self.log_det
    }

    pub fn scale(&self, s: T) -> Result<Self> {
        Self::new(self.matrix.scale(s))
    }

    /// Solves `L z = b` for the cached lower factor.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let d = self.dim();
        let mut z = vec![T::zero(); d];
        for i in 0..d {
            let mut s = b[i];
            for k in 0..i {
                s -= self.chol[(i, k)] * z[k];
            }
            z[i] = s / self.chol[(i, i)];
        }
        z
    }

    /// Solves `Lᵀ z = b`.
    pub fn solve_upper(&self, b: &[T]) -> Vec<T> {
        let d = self.dim();
        let mut z = vec![T::zero(); d];
        for i in (0..d).rev() {
            let mut s = b[i];
            for k in (i + 1)..d {
                s -= self.chol[(k, i)] * z[k];
            }
            z[i] = s / self.chol[(i, i)];
        }
        z
    }

    /// `m⁻¹ b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.solve_upper(&self.solve_lower(b))
    }

    pub fn inverse(&self) -> Matrix<T> {
        let d = self.dim();
        let mut inv = Matrix::zeros(d, d);
        let mut e = vec![T::zero(); d];
        for j in 0..d {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..d {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    /// `(x)ᵀ m⁻¹ (x)`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        self.solve_lower(x).iter().map(|&z| z * z).sum()
    }

    /// `L z`, mapping a standard-normal vector to covariance `m`.
    pub fn correlate(&self, z: &[T]) -> Vec<T> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..=i).map(|k| self.chol[(i, k)] * z[k]).sum())
            .collect()
    }

    /// Largest eigenvalue by power iteration.
    pub fn max_eigenvalue(&self) -> T {
        let d = self.dim();
        let mut v = vec![T::one() / T::from_count(d).sqrt(); d];
        let mut lambda = T::zero();
        for _ in 0..500 {
            let w = self.matrix.mul_vec(&v).expect("square");
            let norm = w.iter().map(|&a| a * a).sum::<T>().sqrt();
            if norm == T::zero() {
                return T::zero();
            }
            let next: Vec<T> = w.iter().map(|&a| a / norm).collect();
            let delta = (norm - lambda).abs();
            lambda = norm;
            v = next;
            if delta <= T::of(1e-12) * lambda {
                break;
            }
        }
        lambda
    }
}
