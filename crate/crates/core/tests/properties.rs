use proptest::prelude::*;
use toepstab::factor::trajectory;
use toepstab::matrix::shifted_norm;
use toepstab::{
    cond_2, factor_with, from_reflection_coeffs, random_spd_toeplitz, toeplitz_generators,
    Downdating, GeneratorPair, MatrixNorms, Method, ReflectionSpec, Trajectory, EPSILON,
};

const SLACK: f64 = 1.0 + 1e-10;

/// Largest lhs/rhs over both shift-norm inequalities of a trajectory.
fn inequality_ratios(tr: &Trajectory) -> (f64, f64) {
    let n = tr.pairs.len();
    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    for k in 1..n {
        let (uk, vk) = (tr.pairs[k - 1].u(), tr.pairs[k - 1].v());
        for j in 0..n {
            let lhs = shifted_norm(vk, j);
            if lhs > 0.0 {
                first = first.max(lhs / shifted_norm(uk, j + 1));
            }
        }
        let h = tr.params[k - 1].norm();
        for j in 0..=n - k {
            let lhs = h * shifted_norm(tr.pairs[k].u(), j);
            if lhs > 0.0 {
                second = second.max(lhs / (2.0 * (n - k - j) as f64 * shifted_norm(uk, j + 1)));
            }
        }
    }
    (first, second)
}

#[test]
fn inequalities_hold_on_the_integer_example() {
    let g = GeneratorPair::initial(vec![5.0, 4.0, 3.0], vec![0.0, 3.0, 1.0]).unwrap();
    for v in [
        Downdating::Hyperbolic,
        Downdating::Mixed,
        Downdating::MixedAlt,
    ] {
        let (a, b) = inequality_ratios(&trajectory(&g, v).unwrap());
        assert!(a <= 1.0 && b <= 1.0, "{a} {b}");
    }
}

#[test]
fn inequalities_hold_on_small_rational_toeplitz() {
    // t = (4, 2, 1, 1/2): dyadic entries keep the first steps exact
    let t = toepstab::ToeplitzSpd::new(vec![4.0, 2.0, 1.0, 0.5]).unwrap();
    let g = toeplitz_generators(&t).unwrap();
    let (a, b) = inequality_ratios(&trajectory(&g, Downdating::Mixed).unwrap());
    assert!(a <= 1.0 && b <= 1.0, "{a} {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_norm_inequalities(n in 2usize..30, rho_max in 0.05..0.9f64, seed in 0u64..1000) {
        let t = random_spd_toeplitz(n, rho_max, seed).unwrap();
        let g = toeplitz_generators(&t).unwrap();
        for v in [Downdating::Hyperbolic, Downdating::Mixed, Downdating::MixedAlt] {
            let (a, b) = inequality_ratios(&trajectory(&g, v).unwrap());
            prop_assert!(a <= SLACK && b <= SLACK, "{} {}", a, b);
        }
    }

    #[test]
    fn no_breakdown_for_bounded_coefficients(rhos in prop::collection::vec(-0.95..0.95f64, 1..12)) {
        let t = from_reflection_coeffs(&ReflectionSpec::new(1.0, rhos).unwrap()).unwrap();
        let g = toeplitz_generators(&t).unwrap();
        for m in Method::ALL {
            prop_assert!(factor_with(&g, m).is_ok());
        }
    }

    #[test]
    fn variants_agree_when_well_conditioned(n in 2usize..40, rho_max in 0.05..0.8f64, seed in 0u64..1000) {
        let t = random_spd_toeplitz(n, rho_max, seed).unwrap();
        prop_assume!(cond_2(&t).unwrap() <= 1e6);
        let g = toeplitz_generators(&t).unwrap();
        let reference = factor_with(&g, Method::Mixed).unwrap().u;
        let scale = reference.max_abs();
        for m in Method::ALL {
            let u = factor_with(&g, m).unwrap().u;
            prop_assert!(u.sub(&reference).unwrap().max_abs() <= 1e-10 * scale, "{}", m);
        }
    }

    #[test]
    fn reconstruction_error_is_polynomial_in_n(n in 2usize..50, rho_max in 0.05..0.8f64, seed in 0u64..1000) {
        let t = random_spd_toeplitz(n, rho_max, seed).unwrap();
        let dense = t.to_dense();
        let g = toeplitz_generators(&t).unwrap();
        let nf = n as f64;
        for m in Method::ALL {
            let u = factor_with(&g, m).unwrap().u;
            let err = dense.sub(&u.gram()).unwrap().two_norm().unwrap() / (EPSILON * dense.two_norm().unwrap());
            let bound = if m.is_hyperbolic() { 100.0 * nf.powi(3) } else { 100.0 * nf * nf };
            prop_assert!(err <= bound, "{}: {}", m, err);
        }
    }

    #[test]
    fn norm_sandwich(n in 1usize..30, rho_max in 0.05..0.9f64, seed in 0u64..1000) {
        let t = random_spd_toeplitz(n, rho_max, seed).unwrap();
        let two = t.two_norm().unwrap();
        let fro = t.frobenius_norm();
        prop_assert!(two <= fro * (1.0 + 1e-12));
        prop_assert!(two >= fro / (n as f64).sqrt() * (1.0 - 1e-12));
    }
}
