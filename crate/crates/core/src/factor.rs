//! Cholesky factorization of displacement-rank-2 matrices by repeated
//! elementary downdating.
//!
//! Starting from generators `(u, v)` with `T − Z T Zᵀ = u uᵀ − v vᵀ`, the rows
//! `u_1, …, u_n` produced by `n − 1` downdating steps form the upper triangular
//! factor of `T = UᵀU`.

use std::fmt;
use std::str::FromStr;

use crate::downdate::{
    downdate_hyperbolic, downdate_mixed, downdate_mixed_alt, downdate_scaled_hyperbolic,
    downdate_scaled_mixed, GeneratorPair, HyperbolicParams, ScaledGeneratorPair,
};
use crate::error::{Error, Result};
use crate::genmat::toeplitz_generators;
use crate::matrix::{DenseMatrix, ToeplitzSpd};

/// Unscaled downdating variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Downdating {
    Hyperbolic,
    Mixed,
    MixedAlt,
}

/// Scaled downdating variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaledDowndating {
    Hyperbolic,
    Mixed,
}

/// Any of the five generator-form factorization paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Hyperbolic,
    Mixed,
    MixedAlt,
    ScaledHyperbolic,
    ScaledMixed,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Hyperbolic,
        Method::Mixed,
        Method::MixedAlt,
        Method::ScaledHyperbolic,
        Method::ScaledMixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hyperbolic => "hyperbolic",
            Method::Mixed => "mixed",
            Method::MixedAlt => "mixed-alt",
            Method::ScaledHyperbolic => "scaled-hyperbolic",
            Method::ScaledMixed => "scaled-mixed",
        }
    }

    /// True for the variants whose error bound carries the `‖H(θ)‖` growth factor.
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, Method::Hyperbolic | Method::ScaledHyperbolic)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown method '{s}'")))
    }
}

impl From<Downdating> for Method {
    fn from(d: Downdating) -> Self {
        match d {
            Downdating::Hyperbolic => Method::Hyperbolic,
            Downdating::Mixed => Method::Mixed,
            Downdating::MixedAlt => Method::MixedAlt,
        }
    }
}

impl From<ScaledDowndating> for Method {
    fn from(d: ScaledDowndating) -> Self {
        match d {
            ScaledDowndating::Hyperbolic => Method::ScaledHyperbolic,
            ScaledDowndating::Mixed => Method::ScaledMixed,
        }
    }
}

/// Upper triangular `U` with `T = UᵀU`, the sines of the `n − 1` steps and
/// the 1-based indices of steps flagged as near breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorResult {
    pub u: DenseMatrix,
    pub sines: Vec<f64>,
    pub warnings: Vec<usize>,
}

impl FactorResult {
    /// `UᵀU`.
    pub fn reconstruct(&self) -> DenseMatrix {
        self.u.gram()
    }

    /// `−sin θ_k`, the reflection coefficients.
    pub fn reflection_coefficients(&self) -> Vec<f64> {
        self.sines.iter().map(|s| -s).collect()
    }
}

/// `T = Wᵀ D² W` with `D = diag(α_1, …, α_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledFactorResult {
    pub w: DenseMatrix,
    pub d: Vec<f64>,
    pub sines: Vec<f64>,
    pub warnings: Vec<usize>,
}

impl ScaledFactorResult {
    /// `U = D W`.
    pub fn to_unscaled(&self) -> FactorResult {
        let mut u = self.w.clone();
        for (k, &alpha) in self.d.iter().enumerate() {
            u.row_mut(k).iter_mut().for_each(|x| *x *= alpha);
        }
        FactorResult {
            u,
            sines: self.sines.clone(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Generators and rotations of every step, for inspecting the recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `(u_k, v_k)` for `k = 1, …, n`.
    pub pairs: Vec<GeneratorPair>,
    /// `θ_k` for `k = 1, …, n − 1`.
    pub params: Vec<HyperbolicParams>,
}

fn check_initial(k: usize, v0: f64) -> Result<()> {
    if k != 1 {
        return Err(Error::Structure(format!(
            "factorization starts at step 1, got step {k}"
        )));
    }
    debug_assert_eq!(v0, 0.0);
    Ok(())
}

fn terminal_pivot(row: &[f64], n: usize) -> Result<()> {
    if !(row[n - 1] > 0.0) {
        return Err(Error::Breakdown { step: n });
    }
    Ok(())
}

type Step = fn(&GeneratorPair) -> Result<(GeneratorPair, HyperbolicParams)>;

fn step_fn(variant: Downdating) -> Step {
    match variant {
        Downdating::Hyperbolic => downdate_hyperbolic,
        Downdating::Mixed => downdate_mixed,
        Downdating::MixedAlt => downdate_mixed_alt,
    }
}

/// Runs `n − 1` unscaled downdating steps from `g0` (which must be at step 1).
///
/// Fails with `Breakdown { step }` if the matrix defined by the generators is
/// not positive definite; a zero final pivot is reported as step `n`.
pub fn factor(g0: &GeneratorPair, variant: Downdating) -> Result<FactorResult> {
    check_initial(g0.k(), g0.v()[0])?;
    let n = g0.n();
    let step = step_fn(variant);
    let mut u = DenseMatrix::zeros_unchecked(n, n);
    let mut sines = Vec::with_capacity(n - 1);
    let mut warnings = Vec::new();
    let mut g = g0.clone();
    u.row_mut(0).copy_from_slice(g.u());
    while !g.is_terminal() {
        let (next, h) = step(&g)?;
        if h.near_breakdown() {
            warnings.push(g.k());
        }
        sines.push(h.sin_theta());
        g = next;
        u.row_mut(g.k() - 1).copy_from_slice(g.u());
    }
    terminal_pivot(g.u(), n)?;
    Ok(FactorResult { u, sines, warnings })
}

/// Scaled factorization `T = Wᵀ D² W`.
pub fn factor_scaled(
    g0: &ScaledGeneratorPair,
    variant: ScaledDowndating,
) -> Result<ScaledFactorResult> {
    check_initial(g0.k(), g0.x()[0])?;
    let n = g0.n();
    let step = match variant {
        ScaledDowndating::Hyperbolic => downdate_scaled_hyperbolic,
        ScaledDowndating::Mixed => downdate_scaled_mixed,
    };
    let mut w = DenseMatrix::zeros_unchecked(n, n);
    let mut d = Vec::with_capacity(n);
    let mut sines = Vec::with_capacity(n - 1);
    let mut warnings = Vec::new();
    let mut g = g0.clone();
    w.row_mut(0).copy_from_slice(g.w());
    d.push(g.alpha());
    while !g.is_terminal() {
        let (next, h) = step(&g)?;
        if h.near_breakdown() {
            warnings.push(g.k());
        }
        sines.push(h.sin_theta());
        g = next;
        w.row_mut(g.k() - 1).copy_from_slice(g.w());
        d.push(g.alpha());
    }
    terminal_pivot(g.w(), n)?;
    Ok(ScaledFactorResult {
        w,
        d,
        sines,
        warnings,
    })
}

/// Factorization by any of the five methods, returned as the unscaled `U`.
pub fn factor_with(g0: &GeneratorPair, method: Method) -> Result<FactorResult> {
    match method {
        Method::Hyperbolic => factor(g0, Downdating::Hyperbolic),
        Method::Mixed => factor(g0, Downdating::Mixed),
        Method::MixedAlt => factor(g0, Downdating::MixedAlt),
        Method::ScaledHyperbolic => Ok(factor_scaled(
            &ScaledGeneratorPair::from_unscaled(g0),
            ScaledDowndating::Hyperbolic,
        )?
        .to_unscaled()),
        Method::ScaledMixed => Ok(factor_scaled(
            &ScaledGeneratorPair::from_unscaled(g0),
            ScaledDowndating::Mixed,
        )?
        .to_unscaled()),
    }
}

/// Every generator pair and rotation of an unscaled factorization.
pub fn trajectory(g0: &GeneratorPair, variant: Downdating) -> Result<Trajectory> {
    check_initial(g0.k(), g0.v()[0])?;
    let step = step_fn(variant);
    let mut pairs = vec![g0.clone()];
    let mut params = Vec::with_capacity(g0.n() - 1);
    while !pairs.last().is_some_and(GeneratorPair::is_terminal) {
        let (next, h) = step(pairs.last().expect("non-empty"))?;
        pairs.push(next);
        params.push(h);
    }
    Ok(Trajectory { pairs, params })
}

/// Reflection coefficients `−sin θ_k` of a Toeplitz matrix, from mixed downdating.
pub fn reflection_coefficients(t: &ToeplitzSpd) -> Result<Vec<f64>> {
    let g = toeplitz_generators(t)?;
    Ok(factor(&g, Downdating::Mixed)?.reflection_coefficients())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmat::{from_reflection_coeffs, random_spd_toeplitz, ReflectionSpec};
    use crate::matrix::{MatrixNorms, EPSILON};
    use crate::solvers::cholesky_dense;

    fn worked() -> GeneratorPair {
        GeneratorPair::initial(vec![5.0, 4.0, 3.0], vec![0.0, 3.0, 1.0]).unwrap()
    }

    fn worked_t() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            vec![25.0, 20.0, 15.0],
            vec![20.0, 32.0, 29.0],
            vec![15.0, 29.0, 40.0],
        ])
        .unwrap()
    }

    fn max_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn worked_example_all_methods() {
        let expected = DenseMatrix::from_rows(&[
            vec![5.0, 4.0, 3.0],
            vec![0.0, 4.0, 4.25],
            vec![0.0, 0.0, 12.9375f64.sqrt()],
        ])
        .unwrap();
        let chol = cholesky_dense(&worked_t()).unwrap();
        for m in Method::ALL {
            let r = factor_with(&worked(), m).unwrap();
            assert!(max_diff(&r.u, &expected) <= 1e-14, "{m}");
            assert!(max_diff(&r.u, chol.matrix()) <= 1e-12, "{m}");
            assert!(r.reconstruct().sub(&worked_t()).unwrap().frobenius_norm() <= 1e-12);
            assert_eq!(r.sines.len(), 2);
            assert_eq!(r.sines[0], 0.6);
            assert!((r.sines[1] + 0.4375).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_generators() {
        let mut u = vec![0.0; 4];
        u[0] = 1.0;
        let g = GeneratorPair::initial(u, vec![0.0; 4]).unwrap();
        for m in Method::ALL {
            let r = factor_with(&g, m).unwrap();
            assert_eq!(r.u, DenseMatrix::identity(4).unwrap());
            assert!(r.sines.iter().all(|&s| s == 0.0));
        }
        let s = factor_scaled(
            &ScaledGeneratorPair::from_unscaled(&g),
            ScaledDowndating::Mixed,
        )
        .unwrap();
        assert_eq!(s.w, DenseMatrix::identity(4).unwrap());
        assert_eq!(s.d, vec![1.0; 4]);
    }

    #[test]
    fn two_by_two_toeplitz() {
        let r2 = 2f64.sqrt();
        let g = GeneratorPair::initial(vec![r2, 1.0 / r2], vec![0.0, 1.0 / r2]).unwrap();
        let t = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let chol = cholesky_dense(&t).unwrap();
        for m in Method::ALL {
            let r = factor_with(&g, m).unwrap();
            assert!(max_diff(&r.u, chol.matrix()) <= 1e-14, "{m}");
        }
    }

    #[test]
    fn scaled_worked_example_matches_unscaled() {
        let plain = factor(&worked(), Downdating::Hyperbolic).unwrap();
        for v in [ScaledDowndating::Hyperbolic, ScaledDowndating::Mixed] {
            let s = factor_scaled(&ScaledGeneratorPair::from_unscaled(&worked()), v).unwrap();
            assert_eq!(s.d[0], 1.0);
            assert!(max_diff(&s.to_unscaled().u, &plain.u) <= 1e-13);
        }
        let s = factor_scaled(
            &ScaledGeneratorPair::from_unscaled(&worked()),
            ScaledDowndating::Hyperbolic,
        )
        .unwrap();
        assert!((s.d[1] - 1.25).abs() < 1e-15);
    }

    #[test]
    fn scaled_reconstructs_random_toeplitz() {
        let t = random_spd_toeplitz(20, 0.6, 11).unwrap();
        let dense = t.to_dense();
        let g = toeplitz_generators(&t).unwrap();
        for v in [ScaledDowndating::Hyperbolic, ScaledDowndating::Mixed] {
            let s = factor_scaled(&ScaledGeneratorPair::from_unscaled(&g), v).unwrap();
            let u = s.to_unscaled().u;
            let err = dense.sub(&u.gram()).unwrap().frobenius_norm();
            assert!(err <= 1e-12 * dense.frobenius_norm(), "{err}");
        }
    }

    #[test]
    fn breakdown_on_indefinite_generators() {
        // T = [[1, 2], [2, 1]]: u = (1, 2), v = (0, 2)
        let g = GeneratorPair::initial(vec![1.0, 2.0], vec![0.0, 2.0]).unwrap();
        for m in Method::ALL {
            assert_eq!(
                factor_with(&g, m).unwrap_err(),
                Error::Breakdown { step: 1 }
            );
        }
    }

    #[test]
    fn breakdown_on_singular_matrix() {
        // all-ones 3×3 Toeplitz is rank one
        let g = GeneratorPair::initial(vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 1.0]).unwrap();
        let err = factor(&g, Downdating::Mixed).unwrap_err();
        assert!(err.is_breakdown());
    }

    #[test]
    fn factor_requires_step_one() {
        let g = GeneratorPair::new(
            crate::matrix::Vector::new(vec![0.0, 1.0]).unwrap(),
            crate::matrix::Vector::new(vec![0.0, 0.0]).unwrap(),
            2,
        )
        .unwrap();
        assert!(matches!(
            factor(&g, Downdating::Mixed),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("nope".parse::<Method>().is_err());
    }

    #[test]
    fn reflection_coefficient_examples() {
        let id = ToeplitzSpd::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(reflection_coefficients(&id).unwrap(), vec![0.0; 3]);

        let t =
            from_reflection_coeffs(&ReflectionSpec::new(1.0, vec![0.5, -0.3]).unwrap()).unwrap();
        let rho = reflection_coefficients(&t).unwrap();
        assert!((rho[0] - 0.5).abs() <= 1e-12 && (rho[1] + 0.3).abs() <= 1e-12);

        let p = crate::genmat::prolate(4, 0.25).unwrap();
        let rho = reflection_coefficients(&p).unwrap();
        assert_eq!(rho.len(), 3);
        assert!(rho.iter().all(|r| r.abs() < 1.0));
    }

    #[test]
    fn two_by_two_sine_sign() {
        let t = ToeplitzSpd::new(vec![2.0, 1.0]).unwrap();
        let r = factor(&toeplitz_generators(&t).unwrap(), Downdating::Mixed).unwrap();
        assert_eq!(r.sines, vec![0.5]);
    }

    #[test]
    fn trajectory_ends_in_zero_shift() {
        let t = random_spd_toeplitz(12, 0.7, 2).unwrap();
        let tr = trajectory(&toeplitz_generators(&t).unwrap(), Downdating::Hyperbolic).unwrap();
        assert_eq!(tr.pairs.len(), 12);
        assert_eq!(tr.params.len(), 11);
        let last = tr.pairs.last().unwrap();
        assert!(last.v().iter().all(|&x| x == 0.0));
        assert!(last.u()[..11].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn decomposition_error_small_on_well_conditioned() {
        let t = random_spd_toeplitz(40, 0.5, 5).unwrap();
        let dense = t.to_dense();
        let g = toeplitz_generators(&t).unwrap();
        for m in Method::ALL {
            let u = factor_with(&g, m).unwrap().u;
            let err = dense.sub(&u.gram()).unwrap().two_norm().unwrap()
                / (EPSILON * dense.two_norm().unwrap());
            assert!(err < 40.0 * 40.0, "{m}: {err}");
        }
    }
}
