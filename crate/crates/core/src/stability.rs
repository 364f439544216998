//! Error metrics and stability experiments.
//!
//! All metrics are stated in the spectral norm and in units of the unit
//! roundoff `ε = 2^-53`:
//!
//! * decomposition error `‖T − UᵀU‖ / (ε‖T‖)`
//! * scaled residual `‖T x − b‖ / (ε ‖x‖ ‖T‖)`
//! * solution error `‖x − x_true‖ / ‖x_true‖`

use std::fmt;
use std::str::FromStr;

use crate::bareiss::bareiss_factor;
use crate::error::{Error, Result};
use crate::factor::{factor_with, Method};
use crate::genmat::{from_reflection_coeffs, prolate, random_spd_toeplitz, toeplitz_generators};
use crate::genmat::{EnsembleRng, ReflectionSpec};
use crate::matrix::{norm2, DenseMatrix, MatrixNorms, ToeplitzSpd, EPSILON};
use crate::solvers::{
    cholesky_dense, cond_2, levinson_solve, solve_triangular, solve_with_factor, TriangularFactor,
};

/// Largest order for which [`inverse_one_norm`] forms the inverse.
pub const INVERSE_LIMIT: usize = 40;

/// `‖T − UᵀU‖₂ / (ε ‖T‖₂)` for an upper triangular `U`.
pub fn decomposition_error(t: &DenseMatrix, u: &DenseMatrix) -> Result<f64> {
    let norm_t = t.two_norm()?;
    decomposition_error_with_norm(t, u, norm_t)
}

fn decomposition_error_with_norm(t: &DenseMatrix, u: &DenseMatrix, norm_t: f64) -> Result<f64> {
    let diff = t.sub(&u.gram())?;
    Ok(diff.two_norm()? / (EPSILON * norm_t))
}

/// `‖T x − b‖₂ / (ε ‖x‖₂ ‖T‖₂)`.
pub fn scaled_residual(t: &ToeplitzSpd, x: &[f64], b: &[f64]) -> Result<f64> {
    let norm_t = t.two_norm()?;
    scaled_residual_with_norm(t, x, b, norm_t)
}

fn scaled_residual_with_norm(t: &ToeplitzSpd, x: &[f64], b: &[f64], norm_t: f64) -> Result<f64> {
    if b.len() != t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            found: b.len(),
        });
    }
    let nx = norm2(x);
    if nx == 0.0 {
        return Err(Error::ZeroSolution);
    }
    let r: Vec<f64> = t.matvec(x)?.iter().zip(b).map(|(p, q)| p - q).collect();
    Ok(norm2(&r) / (EPSILON * nx * norm_t))
}

/// `‖x − x_true‖₂ / ‖x_true‖₂`.
pub fn solution_error(x: &[f64], x_true: &[f64]) -> Result<f64> {
    if x.len() != x_true.len() {
        return Err(Error::DimensionMismatch {
            expected: x_true.len(),
            found: x.len(),
        });
    }
    let nt = norm2(x_true);
    if nt == 0.0 {
        return Err(Error::ZeroTruth);
    }
    let d: Vec<f64> = x.iter().zip(x_true).map(|(a, b)| a - b).collect();
    Ok(norm2(&d) / nt)
}

/// Bounds on `‖T⁻¹‖₁` for `t_0 = 1` from the reflection coefficients, with `sin θ_i = −ρ_i`:
///
/// ```text
/// lower = max{ 1/Π cos²θ_i, 1/Π (1 + sin θ_i) }
/// upper = Π (1 + |sin θ_i|) / (1 − |sin θ_i|)
/// ```
pub fn cybenko_bounds(rhos: &[f64]) -> Result<(f64, f64)> {
    if let Some(i) = rhos.iter().position(|r| !(r.abs() < 1.0)) {
        return Err(Error::Domain(format!(
            "reflection coefficient {} = {} not in (-1, 1)",
            i + 1,
            rhos[i]
        )));
    }
    let mut cos2 = 1.0;
    let mut plus = 1.0;
    let mut upper = 1.0;
    for &rho in rhos {
        let s = -rho;
        cos2 *= (1.0 - s) * (1.0 + s);
        plus *= 1.0 + s;
        upper *= (1.0 + s.abs()) / (1.0 - s.abs());
    }
    Ok(((1.0 / cos2).max(1.0 / plus), upper))
}

/// `‖T⁻¹‖₁` by dense inversion through the Cholesky factor, for `n <= 40`.
pub fn inverse_one_norm(t: &ToeplitzSpd) -> Result<f64> {
    let n = t.n();
    if n > INVERSE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: INVERSE_LIMIT,
        });
    }
    let u = cholesky_dense(&t.to_dense())?;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve_with_factor(&u, &e)?;
        worst = worst.max(col.iter().map(|x| x.abs()).sum());
    }
    Ok(worst)
}

/// Solvers compared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Cholesky,
    BareissHyperbolic,
    BareissMixed,
    BareissMixedAlt,
    BareissScaledHyperbolic,
    BareissScaledMixed,
    BareissFull,
    Levinson,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Cholesky,
        Algorithm::BareissHyperbolic,
        Algorithm::BareissMixed,
        Algorithm::BareissMixedAlt,
        Algorithm::BareissScaledHyperbolic,
        Algorithm::BareissScaledMixed,
        Algorithm::BareissFull,
        Algorithm::Levinson,
    ];

    /// The four solvers of the classic comparison table.
    pub const TABLE: [Algorithm; 4] = [
        Algorithm::Cholesky,
        Algorithm::BareissHyperbolic,
        Algorithm::BareissMixed,
        Algorithm::Levinson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cholesky => "cholesky",
            Algorithm::BareissHyperbolic => "bareiss-hyp",
            Algorithm::BareissMixed => "bareiss-mixed",
            Algorithm::BareissMixedAlt => "bareiss-mixed-alt",
            Algorithm::BareissScaledHyperbolic => "bareiss-scaled-hyp",
            Algorithm::BareissScaledMixed => "bareiss-scaled-mixed",
            Algorithm::BareissFull => "bareiss-full",
            Algorithm::Levinson => "levinson",
        }
    }

    /// The generator-form method behind a Bareiss-type algorithm.
    pub fn method(self) -> Option<Method> {
        match self {
            Algorithm::BareissHyperbolic => Some(Method::Hyperbolic),
            Algorithm::BareissMixed => Some(Method::Mixed),
            Algorithm::BareissMixedAlt => Some(Method::MixedAlt),
            Algorithm::BareissScaledHyperbolic => Some(Method::ScaledHyperbolic),
            Algorithm::BareissScaledMixed => Some(Method::ScaledMixed),
            _ => None,
        }
    }

    pub fn has_factor(self) -> bool {
        self != Algorithm::Levinson
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown algorithm '{s}'")))
    }
}

/// A test matrix, either described by its generator parameters or given explicitly.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Prolate { n: usize, omega: f64 },
    Reflection(ReflectionSpec),
    Random { n: usize, rho_max: f64, seed: u64 },
    Explicit { name: String, matrix: ToeplitzSpd },
}

impl Instance {
    pub fn resolve(&self) -> Result<ToeplitzSpd> {
        match self {
            Instance::Prolate { n, omega } => prolate(*n, *omega),
            Instance::Reflection(spec) => from_reflection_coeffs(spec),
            Instance::Random { n, rho_max, seed } => random_spd_toeplitz(*n, *rho_max, *seed),
            Instance::Explicit { matrix, .. } => Ok(matrix.clone()),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            Instance::Prolate { n, omega } => format!("prolate(n={n},omega={omega})"),
            Instance::Reflection(spec) => {
                let rhos = spec.rhos();
                let first = rhos.first().copied().unwrap_or(0.0);
                if rhos.iter().all(|r| r.abs() == first.abs()) {
                    format!(
                        "refl(n={},t0={},|rho|={})",
                        spec.n(),
                        spec.t0(),
                        first.abs()
                    )
                } else {
                    format!("refl(n={},t0={})", spec.n(), spec.t0())
                }
            }
            Instance::Random { n, rho_max, seed } => {
                format!("random(n={n},rho_max={rho_max},seed={seed})")
            }
            Instance::Explicit { name, .. } => name.clone(),
        }
    }
}

/// How the right-hand side of each experiment is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsMode {
    /// `x_true = (1, −1, 1, …)/√n`, `b = T x_true`.
    UnitSolution,
    /// Seeded random unit `x_true`, `b = T x_true`.
    Random { seed: u64 },
    /// Seeded random unit `b`; no reference solution.
    Scaled { seed: u64 },
}

impl RhsMode {
    /// `(b, x_true)`.
    pub fn build(self, t: &ToeplitzSpd) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        let n = t.n();
        match self {
            RhsMode::UnitSolution => {
                let scale = 1.0 / (n as f64).sqrt();
                let x: Vec<f64> = (0..n)
                    .map(|i| if i % 2 == 0 { scale } else { -scale })
                    .collect();
                Ok((t.matvec(&x)?, Some(x)))
            }
            RhsMode::Random { seed } => {
                let x = EnsembleRng::new(seed).unit_vector(n);
                Ok((t.matvec(&x)?, Some(x)))
            }
            RhsMode::Scaled { seed } => Ok((EnsembleRng::new(seed).unit_vector(n), None)),
        }
    }
}

/// One algorithm on one instance. Metrics are absent when they do not apply
/// or the algorithm failed; the failure is kept in `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub algorithm: Algorithm,
    pub instance: String,
    pub n: usize,
    pub cond_estimate: f64,
    pub decomp_error: Option<f64>,
    pub soln_error: Option<f64>,
    pub scaled_residual: Option<f64>,
    pub warnings: Vec<usize>,
    pub error: Option<Error>,
}

struct Outcome {
    x: Vec<f64>,
    u: Option<DenseMatrix>,
    warnings: Vec<usize>,
}

fn run_one(
    t: &ToeplitzSpd,
    dense: &DenseMatrix,
    b: &[f64],
    algorithm: Algorithm,
) -> Result<Outcome> {
    let (u, warnings) = match algorithm {
        Algorithm::Levinson => {
            let (x, _) = levinson_solve(t, b)?;
            return Ok(Outcome {
                x,
                u: None,
                warnings: Vec::new(),
            });
        }
        Algorithm::Cholesky => (cholesky_dense(dense)?.into_matrix(), Vec::new()),
        Algorithm::BareissFull => (bareiss_factor(t)?.0, Vec::new()),
        other => {
            let method = other.method().expect("generator-form algorithm");
            let f = factor_with(&toeplitz_generators(t)?, method)?;
            (f.u, f.warnings)
        }
    };
    let upper = TriangularFactor::upper(u)?;
    let y = solve_triangular(&upper.transpose(), b)?;
    let x = solve_triangular(&upper, &y)?;
    Ok(Outcome {
        x,
        u: Some(upper.into_matrix()),
        warnings,
    })
}

/// Runs each algorithm on the same right-hand side. Reports follow the order
/// of `algorithms`; a failing algorithm yields a report carrying its error.
pub fn run_experiment(
    instance: &Instance,
    algorithms: &[Algorithm],
    rhs: RhsMode,
) -> Result<Vec<StabilityReport>> {
    let t = instance.resolve()?;
    let dense = t.to_dense();
    let norm_t = dense.two_norm()?;
    let cond = cond_2(&t)?;
    let (b, x_true) = rhs.build(&t)?;
    let descriptor = instance.descriptor();
    let reports = algorithms
        .iter()
        .map(|&algorithm| {
            let mut report = StabilityReport {
                algorithm,
                instance: descriptor.clone(),
                n: t.n(),
                cond_estimate: cond,
                decomp_error: None,
                soln_error: None,
                scaled_residual: None,
                warnings: Vec::new(),
                error: None,
            };
            let metrics = run_one(&t, &dense, &b, algorithm).and_then(|out| {
                report.warnings = out.warnings;
                if let Some(u) = &out.u {
                    report.decomp_error = Some(decomposition_error_with_norm(&dense, u, norm_t)?);
                }
                if let Some(xt) = &x_true {
                    report.soln_error = Some(solution_error(&out.x, xt)?);
                }
                report.scaled_residual = Some(scaled_residual_with_norm(&t, &out.x, &b, norm_t)?);
                Ok(())
            });
            if let Err(e) = metrics {
                report.error = Some(e);
            }
            report
        })
        .collect();
    Ok(reports)
}
