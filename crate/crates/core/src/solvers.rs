//! Baselines and building blocks: dense Cholesky, triangular solves, the
//! Levinson recursion for a general right-hand side, and the spectral
//! condition number.

use crate::error::{Error, Result};
use crate::matrix::{dot, symmetric_eigenvalues, DenseMatrix, ToeplitzSpd};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Upper,
    Lower,
}

/// A square triangular matrix with exact zeros outside its triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularFactor {
    matrix: DenseMatrix,
    orientation: Orientation,
}

impl TriangularFactor {
    /// Checks squareness and the zero pattern. A zero diagonal is accepted
    /// here and reported by [`solve_triangular`].
    pub fn new(matrix: DenseMatrix, orientation: Orientation) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let n = matrix.rows();
        for i in 0..n {
            for j in 0..n {
                let outside = match orientation {
                    Orientation::Upper => j < i,
                    Orientation::Lower => j > i,
                };
                if outside && matrix[(i, j)] != 0.0 {
                    return Err(Error::Structure(format!(
                        "entry ({}, {}) outside the triangle is nonzero",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self {
            matrix,
            orientation,
        })
    }

    pub fn upper(matrix: DenseMatrix) -> Result<Self> {
        Self::new(matrix, Orientation::Upper)
    }

    pub fn lower(matrix: DenseMatrix) -> Result<Self> {
        Self::new(matrix, Orientation::Lower)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            orientation: match self.orientation {
                Orientation::Upper => Orientation::Lower,
                Orientation::Lower => Orientation::Upper,
            },
        }
    }
}

/// Right-looking Cholesky `M = UᵀU` of a symmetric matrix.
pub fn cholesky_dense(m: &DenseMatrix) -> Result<TriangularFactor> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    if !m.is_symmetric() {
        return Err(Error::Structure("matrix is not symmetric".into()));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut u = DenseMatrix::zeros_unchecked(n, n);
    for k in 0..n {
        let pivot = a[(k, k)];
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: k });
        }
        let r = pivot.sqrt();
        for j in k..n {
            u[(k, j)] = a[(k, j)] / r;
        }
        for i in k + 1..n {
            let uki = u[(k, i)];
            if uki == 0.0 {
                continue;
            }
            for j in i..n {
                a[(i, j)] -= uki * u[(k, j)];
            }
        }
    }
    Ok(TriangularFactor {
        matrix: u,
        orientation: Orientation::Upper,
    })
}

/// Back substitution for upper, forward substitution for lower factors.
pub fn solve_triangular(f: &TriangularFactor, b: &[f64]) -> Result<Vec<f64>> {
    let n = f.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let m = &f.matrix;
    let mut x = b.to_vec();
    let solve_row = |i: usize, range: std::ops::Range<usize>, x: &mut Vec<f64>| {
        let d = m[(i, i)];
        if d == 0.0 {
            return Err(Error::ZeroPivot { index: i });
        }
        let s = dot(&m.row(i)[range.clone()], &x[range]);
        x[i] = (x[i] - s) / d;
        Ok(())
    };
    match f.orientation {
        Orientation::Upper => {
            for i in (0..n).rev() {
                solve_row(i, i + 1..n, &mut x)?;
            }
        }
        Orientation::Lower => {
            for i in 0..n {
                solve_row(i, 0..i, &mut x)?;
            }
        }
    }
    Ok(x)
}

/// Solves `UᵀU x = b` for an upper triangular `U`.
pub fn solve_with_factor(u: &TriangularFactor, b: &[f64]) -> Result<Vec<f64>> {
    let (upper, lower) = match u.orientation {
        Orientation::Upper => (u.clone(), u.transpose()),
        Orientation::Lower => (u.transpose(), u.clone()),
    };
    let y = solve_triangular(&lower, b)?;
    solve_triangular(&upper, &y)
}

/// Levinson recursion for `T x = b`, returning `x` and the sines `sin θ_k`
/// (the negated reflection coefficients), `k = 1, …, n − 1`.
///
/// Fails with `Breakdown { step }` once a prediction-error energy is not positive.
pub fn levinson_solve(t: &ToeplitzSpd, b: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = t.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let t0 = t.t0();
    let r: Vec<f64> = t.first_column()[1..].iter().map(|x| x / t0).collect();
    let b: Vec<f64> = b.iter().map(|x| x / t0).collect();
    let mut x = vec![0.0; n];
    x[0] = b[0];
    if n == 1 {
        return Ok((x, Vec::new()));
    }
    let mut y = vec![0.0; n - 1];
    let mut alphas = Vec::with_capacity(n - 1);
    let mut alpha = -r[0];
    y[0] = alpha;
    alphas.push(alpha);
    let mut beta = 1.0;
    for k in 1..n {
        beta *= (1.0 - alpha) * (1.0 + alpha);
        if !(beta > 0.0) {
            return Err(Error::Breakdown { step: k });
        }
        let mut acc = 0.0;
        for i in 0..k {
            acc += r[i] * x[k - 1 - i];
        }
        let mu = (b[k] - acc) / beta;
        for i in 0..k {
            x[i] += mu * y[k - 1 - i];
        }
        x[k] = mu;
        if k < n - 1 {
            let mut acc = 0.0;
            for i in 0..k {
                acc += r[i] * y[k - 1 - i];
            }
            alpha = -(r[k] + acc) / beta;
            let z: Vec<f64> = (0..k).map(|i| y[i] + alpha * y[k - 1 - i]).collect();
            y[..k].copy_from_slice(&z);
            y[k] = alpha;
            alphas.push(alpha);
        }
    }
    Ok((x, alphas.into_iter().map(|a| -a).collect()))
}

/// `max|λ| / min|λ|` over the eigenvalues of `T`; infinite if `T` is singular.
pub fn cond_2(t: &ToeplitzSpd) -> Result<f64> {
    cond_2_dense(&t.to_dense())
}

pub fn cond_2_dense(m: &DenseMatrix) -> Result<f64> {
    let eig = symmetric_eigenvalues(m)?;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), l| {
        (lo.min(l.abs()), hi.max(l.abs()))
    });
    Ok(if lo == 0.0 { f64::INFINITY } else { hi / lo })
}
