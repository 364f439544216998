//! Full-matrix symmetric Bareiss elimination for Toeplitz matrices.
//!
//! Two sequences `A⁽ⁱ⁾` and `A⁽⁻ⁱ⁾` start from `T`. Step `i` subtracts
//! `α_{i−1}` times the other matrix shifted by `i` rows:
//!
//! ```text
//! A⁽ⁱ⁾  = A⁽ⁱ⁻¹⁾  − α_{i−1} Z_i  A⁽⁻ⁱ⁺¹⁾
//! A⁽⁻ⁱ⁾ = A⁽⁻ⁱ⁺¹⁾ − α_{i−1} Z_iᵀ A⁽ⁱ⁻¹⁾
//! ```
//!
//! with `α_{i−1}` annihilating the `i`-th subdiagonal of `A⁽ⁱ⁾`. By symmetry
//! `A⁽⁻ⁱ⁾ = J A⁽ⁱ⁾ J`, and the multipliers equal the sines of generator-form
//! downdating. State is O(n²); this path exists to cross-check the generator form.

use crate::error::{Error, Result};
use crate::factor::{factor_with, Method};
use crate::genmat::toeplitz_generators;
use crate::matrix::{DenseMatrix, ToeplitzSpd};
use crate::solvers::{solve_with_factor, TriangularFactor};

#[derive(Debug, Clone, PartialEq)]
pub struct BareissState {
    pos: DenseMatrix,
    neg: DenseMatrix,
    step: usize,
    alphas: Vec<f64>,
    scale: f64,
}

impl BareissState {
    pub fn new(t: &ToeplitzSpd) -> Self {
        let dense = t.to_dense();
        Self {
            pos: dense.clone(),
            neg: dense,
            step: 0,
            alphas: Vec::new(),
            scale: t.t0(),
        }
    }

    /// `A⁽ⁱ⁾` after the steps taken so far.
    pub fn a_pos(&self) -> &DenseMatrix {
        &self.pos
    }

    /// `A⁽⁻ⁱ⁾` after the steps taken so far.
    pub fn a_neg(&self) -> &DenseMatrix {
        &self.neg
    }

    /// Number of completed steps `i`.
    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn n(&self) -> usize {
        self.pos.rows()
    }

    pub fn is_complete(&self) -> bool {
        self.step + 1 >= self.n()
    }

    /// Performs step `i = step_count() + 1` and returns `α_{i−1}`.
    pub fn step(&mut self) -> Result<f64> {
        let n = self.n();
        let i = self.step + 1;
        if i >= n {
            return Err(Error::Structure(format!("no Bareiss step {i} for n = {n}")));
        }
        let pivot = self.neg[(0, 0)];
        if !(pivot > 0.0) {
            return Err(Error::Breakdown { step: i });
        }
        let alpha = self.pos[(i, 0)] / pivot;
        if !(alpha.abs() < 1.0) {
            return Err(Error::Breakdown { step: i });
        }
        let old_pos = self.pos.clone();
        for r in i..n {
            let src = self.neg.row(r - i).to_vec();
            for (x, y) in self.pos.row_mut(r).iter_mut().zip(&src) {
                *x -= alpha * y;
            }
            self.pos[(r, r - i)] = 0.0;
        }
        for r in 0..n - i {
            let src = old_pos.row(r + i);
            for (x, y) in self.neg.row_mut(r).iter_mut().zip(src) {
                *x -= alpha * y;
            }
            self.neg[(r, r + i)] = 0.0;
        }
        self.step = i;
        self.alphas.push(alpha);
        Ok(alpha)
    }

    /// Largest deviation from Toeplitz structure in the trailing block
    /// `T⁽ⁱ⁺¹⁾` of `A⁽ⁱ⁾` and the leading block `T⁽⁻ⁱ⁻¹⁾` of `A⁽⁻ⁱ⁾`, relative to `t_0`.
    pub fn toeplitz_deviation(&self) -> f64 {
        let n = self.n();
        let i = self.step;
        let mut worst: f64 = 0.0;
        for r in i..n.saturating_sub(1) {
            for c in 0..n - 1 {
                worst = worst.max((self.pos[(r, c)] - self.pos[(r + 1, c + 1)]).abs());
            }
        }
        for r in 0..(n - i).saturating_sub(1) {
            for c in 0..n - 1 {
                worst = worst.max((self.neg[(r, c)] - self.neg[(r + 1, c + 1)]).abs());
            }
        }
        worst / self.scale
    }

    /// `max |A⁽ⁱ⁾ − J A⁽⁻ⁱ⁾ J|` relative to `t_0`; the trailing block relation
    /// `T⁽ⁱ⁺¹⁾ = J T⁽⁻ⁱ⁻¹⁾ J` is contained in it.
    pub fn symmetry_deviation(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                worst = worst.max((self.pos[(r, c)] - self.neg[(n - 1 - r, n - 1 - c)]).abs());
            }
        }
        worst / self.scale
    }

    /// Rows `1..=i+1` of `A⁽ⁱ⁾` are upper and rows `n−i..=n` of `A⁽⁻ⁱ⁾` lower
    /// trapezoidal, with exact zeros.
    pub fn is_trapezoidal(&self) -> bool {
        let n = self.n();
        let i = self.step;
        let upper = (0..=i.min(n - 1)).all(|r| (0..r).all(|c| self.pos[(r, c)] == 0.0));
        let lower = (n - 1 - i.min(n - 1)..n).all(|r| (r + 1..n).all(|c| self.neg[(r, c)] == 0.0));
        upper && lower
    }

    /// The upper triangular factor with `T = UᵀU`; requires a completed run.
    pub fn factor(&self) -> Result<DenseMatrix> {
        if !self.is_complete() {
            return Err(Error::Structure("Bareiss elimination is incomplete".into()));
        }
        let n = self.n();
        let mut u = self.pos.clone();
        for k in 0..n {
            let d = u[(k, k)];
            if !(d > 0.0) {
                return Err(Error::Breakdown { step: k.max(1) });
            }
            let r = d.sqrt();
            u.row_mut(k).iter_mut().for_each(|x| *x /= r);
        }
        Ok(u)
    }
}

/// Runs all `n − 1` Bareiss steps; returns the normalized factor and the multipliers.
pub fn bareiss_factor(t: &ToeplitzSpd) -> Result<(DenseMatrix, Vec<f64>)> {
    let mut state = BareissState::new(t);
    while !state.is_complete() {
        state.step()?;
    }
    Ok((state.factor()?, state.alphas))
}

/// Where the triangular factor for [`bareiss_solve`] comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorSource {
    Bareiss,
    Generator(Method),
}

/// Solves `T x = b` through `T = UᵀU` and two triangular solves.
pub fn bareiss_solve(t: &ToeplitzSpd, b: &[f64], source: FactorSource) -> Result<Vec<f64>> {
    if b.len() != t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            found: b.len(),
        });
    }
    let u = match source {
        FactorSource::Bareiss => bareiss_factor(t)?.0,
        FactorSource::Generator(m) => factor_with(&toeplitz_generators(t)?, m)?.u,
    };
    solve_with_factor(&TriangularFactor::upper(u)?, b)
}
