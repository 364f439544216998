//! Fixtures shared by the criterion benches.

use toepstab::{toeplitz_generators, GeneratorPair, RhsMode, ToeplitzSpd};

/// Orders timed by every bench group.
pub const SIZES: [usize; 4] = [16, 64, 128, 256];

/// The matrix `t_k = 2^{-k}`, whose condition number stays below 9 for every
/// order, with its generators and a right-hand side.
pub struct Fixture {
    pub t: ToeplitzSpd,
    pub g: GeneratorPair,
    pub b: Vec<f64>,
}

impl Fixture {
    pub fn new(n: usize) -> Self {
        let col = (0..n).map(|k| 0.5f64.powi(k as i32)).collect();
        let t = ToeplitzSpd::new(col).expect("diagonally dominant");
        let g = toeplitz_generators(&t).expect("positive diagonal");
        let (b, _) = RhsMode::UnitSolution.build(&t).expect("nonempty");
        Self { t, g, b }
    }
}
