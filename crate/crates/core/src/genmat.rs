//! Test matrices and generators: Toeplitz generators, dense displacement
//! generators, the Prolate matrix, synthesis from reflection coefficients and
//! a seeded random ensemble.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::downdate::GeneratorPair;
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, ToeplitzSpd};

/// Name and version of the generator behind [`EnsembleRng`], recorded in experiment output.
pub const RNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.3";

/// `u = (t_0, …, t_{n−1})/√t_0`, `v = (0, t_1, …, t_{n−1})/√t_0`.
pub fn toeplitz_generators(t: &ToeplitzSpd) -> Result<GeneratorPair> {
    let col = t.first_column();
    let t0 = col[0];
    if !(t0 > 0.0) {
        return Err(Error::NonPositiveDiagonal { t0 });
    }
    let root = t0.sqrt();
    let u: Vec<f64> = col.iter().map(|x| x / root).collect();
    let mut v = u.clone();
    v[0] = 0.0;
    GeneratorPair::initial(u, v)
}

/// Generators of a symmetric matrix `M` with `M − Z M Zᵀ = u uᵀ − v vᵀ` and `v[1] = 0`.
///
/// Fails with `Structure` if `M` is not symmetric or its displacement does not
/// have that form (relative tolerance `1e-10`).
pub fn displacement_generators(m: &DenseMatrix) -> Result<GeneratorPair> {
    if !m.is_symmetric() {
        return Err(Error::Structure("matrix is not symmetric".into()));
    }
    let n = m.rows();
    let mut d = DenseMatrix::zeros_unchecked(n, n);
    for i in 0..n {
        for j in 0..n {
            let shifted = if i > 0 && j > 0 {
                m[(i - 1, j - 1)]
            } else {
                0.0
            };
            d[(i, j)] = m[(i, j)] - shifted;
        }
    }
    let d00 = d[(0, 0)];
    if !(d00 > 0.0) {
        return Err(Error::NonPositiveDiagonal { t0: d00 });
    }
    let root = d00.sqrt();
    let u: Vec<f64> = (0..n).map(|i| d[(i, 0)] / root).collect();
    // R = u uᵀ − D must be the rank-one matrix v vᵀ
    let mut r = DenseMatrix::zeros_unchecked(n, n);
    for i in 0..n {
        for j in 0..n {
            r[(i, j)] = u[i] * u[j] - d[(i, j)];
        }
    }
    let pivot = (1..n).max_by(|&a, &b| r[(a, a)].total_cmp(&r[(b, b)]));
    let mut v = vec![0.0; n];
    if let Some(p) = pivot {
        let rpp = r[(p, p)];
        if rpp > 0.0 {
            let root = rpp.sqrt();
            for i in 1..n {
                v[i] = r[(i, p)] / root;
            }
        }
    }
    let scale = m.max_abs();
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            defect = defect.max((r[(i, j)] - v[i] * v[j]).abs());
        }
    }
    if defect > 1e-10 * scale {
        return Err(Error::Structure(format!(
            "displacement rank exceeds two (defect {defect:e})"
        )));
    }
    GeneratorPair::initial(u, v)
}

/// The Prolate matrix: `t_0 = 2ω`, `t_k = sin(2πωk)/(πk)`, for `0 < ω <= 1/2`.
pub fn prolate(n: usize, omega: f64) -> Result<ToeplitzSpd> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if !(omega > 0.0 && omega <= 0.5) {
        return Err(Error::Domain(format!("omega = {omega} outside (0, 1/2]")));
    }
    let mut col = Vec::with_capacity(n);
    col.push(2.0 * omega);
    for k in 1..n {
        let kf = k as f64;
        // sin(2πωk) with the argument reduced exactly when 2ωk is an integer
        let arg = 2.0 * omega * kf;
        let s = if arg.fract() == 0.0 {
            0.0
        } else {
            (PI * arg).sin()
        };
        col.push(s / (PI * kf));
    }
    ToeplitzSpd::new(col)
}

/// How a reflection-coefficient sequence of one magnitude is signed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionPattern {
    /// `+K, −K, +K, …`
    Alternating,
    /// `K, K, K, …`
    Constant,
}

impl ReflectionPattern {
    pub fn name(self) -> &'static str {
        match self {
            ReflectionPattern::Alternating => "alternating",
            ReflectionPattern::Constant => "constant",
        }
    }
}

impl fmt::Display for ReflectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReflectionPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alternating" => Ok(ReflectionPattern::Alternating),
            "constant" => Ok(ReflectionPattern::Constant),
            other => Err(Error::Domain(format!("unknown pattern '{other}'"))),
        }
    }
}

/// Diagonal `t_0 > 0` and reflection coefficients `ρ_1, …, ρ_{n−1}` in `(−1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSpec {
    t0: f64,
    rhos: Vec<f64>,
}

impl ReflectionSpec {
    pub fn new(t0: f64, rhos: Vec<f64>) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::NonPositiveDiagonal { t0 });
        }
        if let Some(i) = rhos.iter().position(|r| !(r.abs() < 1.0)) {
            return Err(Error::Domain(format!(
                "reflection coefficient {} = {} not in (-1, 1)",
                i + 1,
                rhos[i]
            )));
        }
        Ok(Self { t0, rhos })
    }

    /// `n − 1` coefficients of magnitude `magnitude` signed by `pattern`.
    pub fn from_pattern(
        t0: f64,
        pattern: ReflectionPattern,
        magnitude: f64,
        n: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let rhos = (0..n - 1)
            .map(|i| match pattern {
                ReflectionPattern::Alternating if i % 2 == 1 => -magnitude,
                _ => magnitude,
            })
            .collect();
        Self::new(t0, rhos)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    pub fn n(&self) -> usize {
        self.rhos.len() + 1
    }
}

/// The Toeplitz matrix with diagonal `t_0` whose reflection coefficients are `spec.rhos`.
///
/// Runs the Toeplitz generator recurrence backwards in the lag domain: with
/// `p_k[m] = u_k[m + k − 1]` and `q_k[m] = v_k[m + k − 1]`, step `k` reads
/// `p_{k+1}[m] = (p_k[m] − s_k q_k[m+1])/c_k` and `q_{k+1}[m] = (q_k[m+1] − s_k p_k[m])/c_k`.
/// Each new `t_k` is the unique value making `q_k[1]/p_k[0] = s_k = −ρ_k`.
pub fn from_reflection_coeffs(spec: &ReflectionSpec) -> Result<ToeplitzSpd> {
    let n = spec.n();
    let t0 = spec.t0;
    let root = t0.sqrt();
    let s: Vec<f64> = spec.rhos.iter().map(|r| -r).collect();
    let c: Vec<f64> = s.iter().map(|s| ((1.0 - s) * (1.0 + s)).sqrt()).collect();
    let mut t = vec![0.0; n];
    t[0] = t0;
    // p[j] = p_j[k − j] and q[j] = q_j[k + 1 − j] at iteration k (1-based j)
    let mut p = vec![0.0; n + 1];
    let mut q = vec![0.0; n + 1];
    for k in 1..n {
        for j in (1..k).rev() {
            p[j + 1] = (p[j] - s[j - 1] * q[j]) / c[j - 1];
        }
        p[1] = t[k - 1] / root;
        q[k] = s[k - 1] * p[k];
        for j in (1..k).rev() {
            q[j] = c[j - 1] * q[j + 1] + s[j - 1] * p[j];
        }
        t[k] = root * q[1];
    }
    ToeplitzSpd::new(t)
}

/// Seeded ChaCha8 stream. Floats are `(next_u64 >> 11) · 2^-53`, which keeps
/// the sequence independent of any distribution code.
#[derive(Debug, Clone)]
pub struct EnsembleRng(ChaCha8Rng);

impl EnsembleRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as usize
    }

    /// Uniform entries in `[−1, 1)`, scaled to unit Euclidean norm.
    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..n).map(|_| self.uniform(-1.0, 1.0)).collect();
            let norm = crate::matrix::norm2(&x);
            if norm > 0.0 {
                return x.into_iter().map(|v| v / norm).collect();
            }
        }
    }
}

/// `t_0 = 1` with reflection coefficients uniform in `[−rho_max, rho_max]`.
pub fn random_spd_toeplitz(n: usize, rho_max: f64, seed: u64) -> Result<ToeplitzSpd> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if !(rho_max > 0.0 && rho_max < 1.0) {
        return Err(Error::Domain(format!("rho_max = {rho_max} outside (0, 1)")));
    }
    let mut rng = EnsembleRng::new(seed);
    let rhos = (1..n).map(|_| rng.uniform(-rho_max, rho_max)).collect();
    from_reflection_coeffs(&ReflectionSpec::new(1.0, rhos)?)
}

/// `uuᵀ − vvᵀ` minus the displacement `T − Z T Zᵀ`, largest entry in magnitude.
pub fn displacement_defect(t: &ToeplitzSpd, g: &GeneratorPair) -> f64 {
    let n = t.n();
    let (u, v) = (g.u(), g.v());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let shifted = if i > 0 && j > 0 {
                t.entry(i - 1, j - 1)
            } else {
                0.0
            };
            let d = t.entry(i, j) - shifted;
            worst = worst.max((d - (u[i] * u[j] - v[i] * v[j])).abs());
        }
    }
    worst
}

impl TryFrom<&ReflectionSpec> for ToeplitzSpd {
    type Error = Error;

    fn try_from(spec: &ReflectionSpec) -> Result<Self> {
        from_reflection_coeffs(spec)
    }
}
