//! Cholesky factorization of symmetric positive definite matrices of
//! displacement rank two, Toeplitz matrices in particular, by elementary
//! downdating, together with Bareiss and Levinson baselines and the error
//! metrics used to compare their numerical stability.
//!
//! ```
//! use toepstab::{factor, toeplitz_generators, Downdating, ToeplitzSpd};
//!
//! let t = ToeplitzSpd::new(vec![2.0, 1.0]).unwrap();
//! let f = factor(&toeplitz_generators(&t).unwrap(), Downdating::Mixed).unwrap();
//! assert_eq!(f.sines, vec![0.5]);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // the negations also reject NaN

pub mod bareiss;
pub mod downdate;
pub mod error;
pub mod factor;
pub mod genmat;
pub mod matrix;
pub mod solvers;
pub mod stability;

pub use bareiss::{bareiss_factor, bareiss_solve, BareissState, FactorSource};
pub use downdate::{
    downdate_hyperbolic, downdate_mixed, downdate_mixed_alt, downdate_scaled_hyperbolic,
    downdate_scaled_mixed, rotation_params, GeneratorPair, HyperbolicParams, ScaledGeneratorPair,
};
pub use error::{Error, Result};
pub use factor::{
    factor, factor_scaled, factor_with, reflection_coefficients, trajectory, Downdating,
    FactorResult, Method, ScaledDowndating, ScaledFactorResult, Trajectory,
};
pub use genmat::{
    displacement_generators, from_reflection_coeffs, prolate, random_spd_toeplitz,
    toeplitz_generators, EnsembleRng, ReflectionPattern, ReflectionSpec, RNG_NAME,
};
pub use matrix::{
    reverse, shift_down, shift_down_by, toeplitz_matvec, DenseMatrix, MatrixNorms, ToeplitzSpd,
    Vector, EPSILON,
};
pub use solvers::{
    cholesky_dense, cond_2, levinson_solve, solve_triangular, solve_with_factor, Orientation,
    TriangularFactor,
};
pub use stability::{
    cybenko_bounds, decomposition_error, inverse_one_norm, run_experiment, scaled_residual,
    solution_error, Algorithm, Instance, RhsMode, StabilityReport,
};
