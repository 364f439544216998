//! Dense vectors and matrices, the symmetric Toeplitz type, the shift-down and
//! reversal operators, and the norms used by every error metric in the crate.
//!
//! The shift-down matrix `Z` and the reversal matrix `J` are never stored;
//! [`shift_down`] and [`reverse`] apply them to a vector in O(n).

use std::ops::{Deref, Index, IndexMut};

use crate::error::{Error, Result};

/// Unit roundoff of IEEE double precision, 2^-53.
pub const EPSILON: f64 = 1.0 / 9_007_199_254_740_992.0;

/// Sweep cap for the cyclic Jacobi eigenvalue iteration.
pub const MAX_JACOBI_SWEEPS: usize = 1000;

/// Iteration cap and relative tolerance for power iteration on `MᵀM`.
pub const MAX_POWER_ITERATIONS: usize = 1000;
pub const POWER_TOLERANCE: f64 = 1e-10;

/// A non-empty vector of finite doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(entries))
    }

    /// Zero vector of length `n` (`n >= 1`).
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self(entries)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Self::new(entries)
    }
}

/// Euclidean norm of a slice, scaled to avoid overflow in the sum of squares.
pub fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * sum.sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `Z x`: moves every entry one place down and inserts a zero on top.
pub fn shift_down(x: &[f64]) -> Vec<f64> {
    shift_down_by(x, 1)
}

/// `Z_j x = Z^j x`, with `Z_0 = I`.
pub fn shift_down_by(x: &[f64], j: usize) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    if j < n {
        out[j..].copy_from_slice(&x[..n - j]);
    }
    out
}

/// `‖Z_j x‖` without forming the shifted vector: the norm of the leading `n - j` entries.
pub fn shifted_norm(x: &[f64], j: usize) -> f64 {
    let n = x.len();
    if j >= n {
        0.0
    } else {
        norm2(&x[..n - j])
    }
}

/// `J x`: the entries of `x` in reverse order.
pub fn reverse(x: &[f64]) -> Vec<f64> {
    x.iter().rev().copied().collect()
}

/// Row-major dense matrix of finite doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        Ok(m)
    }

    pub(crate) fn zeros_unchecked(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros_unchecked(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros_unchecked(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `AᵀA`.
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut out = Self::zeros_unchecked(n, n);
        for k in 0..self.rows {
            let r = self.row(k);
            for i in 0..n {
                if r[i] == 0.0 {
                    continue;
                }
                for j in i..n {
                    out.data[i * n + j] += r[i] * r[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out.data[i * n + j] = out.data[j * n + i];
            }
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Exact symmetry test.
    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric positive definite Toeplitz matrix, stored as its first column
/// `t_0, …, t_{n-1}`; entry `(i, j)` is `t_{|i-j|}`.
///
/// Construction checks the necessary conditions `t_0 > 0` and `|t_k| < t_0`.
/// Full positive definiteness is only established by a successful factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSpd {
    first_column: Vector,
}

impl ToeplitzSpd {
    pub fn new(first_column: Vec<f64>) -> Result<Self> {
        let first_column = Vector::new(first_column)?;
        let t0 = first_column[0];
        if t0 <= 0.0 {
            return Err(Error::NonPositiveDiagonal { t0 });
        }
        if let Some(k) = first_column.iter().skip(1).position(|t| t.abs() >= t0) {
            return Err(Error::Domain(format!(
                "|t_{}| >= t_0 violates positive definiteness",
                k + 1
            )));
        }
        Ok(Self { first_column })
    }

    pub fn n(&self) -> usize {
        self.first_column.len()
    }

    pub fn t0(&self) -> f64 {
        self.first_column[0]
    }

    pub fn first_column(&self) -> &[f64] {
        &self.first_column
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.first_column[i.abs_diff(j)]
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n();
        let mut m = DenseMatrix::zeros_unchecked(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.entry(i, j);
            }
        }
        m
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        toeplitz_matvec(self, x)
    }
}

/// `T x` computed directly in O(n²).
pub fn toeplitz_matvec(t: &ToeplitzSpd, x: &[f64]) -> Result<Vec<f64>> {
    let n = t.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let col = t.first_column();
    Ok((0..n)
        .map(|i| (0..n).map(|j| col[i.abs_diff(j)] * x[j]).sum())
        .collect())
}

/// Matrix norms used by the error metrics.
pub trait MatrixNorms {
    /// Spectral norm `max ‖M a‖` over unit `a`.
    fn two_norm(&self) -> Result<f64>;
    fn frobenius_norm(&self) -> f64;
    /// Maximum absolute column sum.
    fn one_norm(&self) -> f64;
}

impl MatrixNorms for DenseMatrix {
    fn two_norm(&self) -> Result<f64> {
        if self.is_symmetric() {
            let eig = symmetric_eigenvalues(self)?;
            Ok(eig.iter().fold(0.0, |m: f64, l| m.max(l.abs())))
        } else {
            power_two_norm(self)
        }
    }

    fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl MatrixNorms for ToeplitzSpd {
    fn two_norm(&self) -> Result<f64> {
        self.to_dense().two_norm()
    }

    fn frobenius_norm(&self) -> f64 {
        let n = self.n();
        let col = self.first_column();
        let sum: f64 = col
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let copies = if k == 0 { n } else { 2 * (n - k) };
                copies as f64 * t * t
            })
            .sum();
        sum.sqrt()
    }

    fn one_norm(&self) -> f64 {
        let n = self.n();
        let col = self.first_column();
        (0..n)
            .map(|j| (0..n).map(|i| col[i.abs_diff(j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method, sorted ascending.
///
/// Only the upper triangle is read. Rotations whose off-diagonal entry is
/// negligible against both diagonal entries are skipped after the fourth sweep,
/// which keeps small eigenvalues accurate to O(ε‖M‖).
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.data.clone();
    let at = |i: usize, j: usize| i * n + j;
    let mut d: Vec<f64> = (0..n).map(|i| a[at(i, i)]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    for sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[at(p, q)].abs();
            }
        }
        if off == 0.0 {
            d.sort_by(f64::total_cmp);
            return Ok(d);
        }
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[at(p, q)];
                let g = 100.0 * apq.abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[at(p, q)] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[at(p, q)] = 0.0;
                let rotate = |a: &mut [f64], i: usize, j: usize| {
                    let g = a[i];
                    let h = a[j];
                    a[i] = g - s * (h + g * tau);
                    a[j] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(&mut a, at(j, p), at(j, q));
                }
                for j in p + 1..q {
                    rotate(&mut a, at(p, j), at(j, q));
                }
                for j in q + 1..n {
                    rotate(&mut a, at(p, j), at(q, j));
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    Err(Error::IllConditioned)
}

/// Spectral norm of a general matrix by power iteration on `MᵀM`.
fn power_two_norm(m: &DenseMatrix) -> Result<f64> {
    let n = m.cols();
    let mt = m.transpose();
    // deterministic start vector with no special alignment
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64)
        .collect();
    let mut estimate = 0.0;
    for _ in 0..MAX_POWER_ITERATIONS {
        let nx = norm2(&x);
        if nx == 0.0 {
            return Ok(0.0);
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = mt.matvec(&m.matvec(&x)?)?;
        let next = norm2(&y);
        if next == 0.0 {
            return Ok(0.0);
        }
        if (next - estimate).abs() <= POWER_TOLERANCE * next {
            return Ok(next.sqrt());
        }
        estimate = next;
        x = y;
    }
    Err(Error::IllConditioned)
}
