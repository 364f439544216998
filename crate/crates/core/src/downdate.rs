//! Elementary downdating: one step `(u_k, v_k) -> (u_{k+1}, v_{k+1})` with
//!
//! ```text
//! u_{k+1} u_{k+1}ᵀ − v_{k+1} v_{k+1}ᵀ = Z u_k u_kᵀ Zᵀ − v_k v_kᵀ
//! ```
//!
//! where `u_{k+1}` gains one leading zero and `v_{k+1}` gains one more. Five
//! variants are provided: hyperbolic, mixed, mixed with the opposite
//! elimination order, scaled hyperbolic and scaled mixed.
//!
//! Step indices are 1-based, so the pivot of step `k` is the 0-based entry
//! `k - 1` of `u_k`.

use crate::error::{Error, Result};
use crate::matrix::{shift_down, Vector};

/// `cos θ` below which a step is flagged as near breakdown.
pub const NEAR_BREAKDOWN_COS: f64 = 1e-8;

/// Scale factors of the scaled variants are folded back into their vectors
/// once they leave `[SCALE_MIN, SCALE_MAX]`.
pub const SCALE_MAX: f64 = 1e154;
pub const SCALE_MIN: f64 = 1e-154;

/// The hyperbolic rotation `H(θ) = sec θ · [[1, −sin θ], [−sin θ, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicParams {
    sin_theta: f64,
    cos_theta: f64,
}

impl HyperbolicParams {
    /// Builds the rotation from `sin θ`; `|sin θ| < 1` is required.
    pub fn from_sin(sin_theta: f64) -> Result<Self> {
        if !(sin_theta.abs() < 1.0) {
            return Err(Error::Breakdown { step: 0 });
        }
        // (1-s)(1+s) avoids the cancellation in 1 - s² near |s| = 1
        let cos_theta = ((1.0 - sin_theta) * (1.0 + sin_theta)).sqrt();
        if !(cos_theta > 0.0) {
            return Err(Error::Breakdown { step: 0 });
        }
        Ok(Self {
            sin_theta,
            cos_theta,
        })
    }

    pub fn sin_theta(&self) -> f64 {
        self.sin_theta
    }

    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    /// `‖H(θ)‖₂ = (1 + |sin θ|) / cos θ`.
    pub fn norm(&self) -> f64 {
        (1.0 + self.sin_theta.abs()) / self.cos_theta
    }

    /// The eigenvalues `sec θ − tan θ` and `sec θ + tan θ`, in that order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let s = self.sin_theta;
        ((1.0 - s) / self.cos_theta, (1.0 + s) / self.cos_theta)
    }

    pub fn near_breakdown(&self) -> bool {
        self.cos_theta < NEAR_BREAKDOWN_COS
    }

    /// `H(θ) (a, b)ᵀ`.
    pub fn apply(&self, a: f64, b: f64) -> (f64, f64) {
        let s = self.sin_theta;
        let c = self.cos_theta;
        ((a - s * b) / c, (b - s * a) / c)
    }
}

/// Rotation mapping `(a, b)` to `(√(a² − b²), 0)` up to the sign of `a`.
///
/// Fails with `Breakdown { step: 0 }` when `|a| <= |b|`; the step drivers
/// replace the zero with their own step index.
pub fn rotation_params(a: f64, b: f64) -> Result<HyperbolicParams> {
    if !(a.abs() > b.abs()) {
        return Err(Error::Breakdown { step: 0 });
    }
    HyperbolicParams::from_sin(b / a)
}

fn at_step(err: Error, step: usize) -> Error {
    match err {
        Error::Breakdown { .. } => Error::Breakdown { step },
        other => other,
    }
}

fn check_staircase(u: &[f64], v: &[f64], k: usize, names: (&str, &str)) -> Result<()> {
    let n = u.len();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::Structure(format!("step index {k} outside 1..={n}")));
    }
    if let Some(j) = u[..k - 1].iter().position(|&x| x != 0.0) {
        return Err(Error::Structure(format!(
            "{}[{}] must be zero at step {k}",
            names.0,
            j + 1
        )));
    }
    if let Some(j) = v[..k].iter().position(|&x| x != 0.0) {
        return Err(Error::Structure(format!(
            "{}[{}] must be zero at step {k}",
            names.1,
            j + 1
        )));
    }
    Ok(())
}

/// Generator vectors `(u_k, v_k)` at step `k`, with `u[j] = 0` for `j < k`
/// and `v[j] = 0` for `j <= k` (1-based). The pivot `u[k]` is kept non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPair {
    u: Vector,
    v: Vector,
    k: usize,
}

impl GeneratorPair {
    /// Validates lengths and the zero staircase. `u` is negated if its pivot is negative.
    pub fn new(u: Vector, v: Vector, k: usize) -> Result<Self> {
        check_staircase(&u, &v, k, ("u", "v"))?;
        let u = if u[k - 1] < 0.0 {
            Vector::from_vec_unchecked(u.iter().map(|x| -x).collect())
        } else {
            u
        };
        Ok(Self { u, v, k })
    }

    /// Pair at step 1; requires `v[1] = 0`.
    pub fn initial(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        Self::new(Vector::new(u)?, Vector::new(v)?, 1)
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.k == self.n()
    }

    fn ensure_active(&self) -> Result<()> {
        if self.is_terminal() {
            return Err(Error::Structure(format!(
                "no downdating step after step {}",
                self.k
            )));
        }
        Ok(())
    }

    fn from_parts(mut u: Vec<f64>, v: Vec<f64>, k: usize) -> Self {
        if u[k - 1] < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        Self {
            u: Vector::from_vec_unchecked(u),
            v: Vector::from_vec_unchecked(v),
            k,
        }
    }
}

/// Scaled generators with `u_k = α_k w_k` and `v_k = β_k x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledGeneratorPair {
    w: Vector,
    x: Vector,
    alpha: f64,
    beta: f64,
    k: usize,
}

impl ScaledGeneratorPair {
    pub fn new(w: Vector, x: Vector, alpha: f64, beta: f64, k: usize) -> Result<Self> {
        check_staircase(&w, &x, k, ("w", "x"))?;
        for (name, s) in [("alpha", alpha), ("beta", beta)] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Domain(format!("{name} = {s} must be positive")));
            }
        }
        let w = if w[k - 1] < 0.0 {
            Vector::from_vec_unchecked(w.iter().map(|x| -x).collect())
        } else {
            w
        };
        Ok(Self {
            w,
            x,
            alpha,
            beta,
            k,
        })
    }

    /// `α = β = 1`, `w = u`, `x = v`.
    pub fn from_unscaled(g: &GeneratorPair) -> Self {
        Self {
            w: g.u.clone(),
            x: g.v.clone(),
            alpha: 1.0,
            beta: 1.0,
            k: g.k,
        }
    }

    /// The pair `(α w, β x)`.
    pub fn unscaled(&self) -> GeneratorPair {
        GeneratorPair::from_parts(
            self.w.iter().map(|x| self.alpha * x).collect(),
            self.x.iter().map(|x| self.beta * x).collect(),
            self.k,
        )
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.k == self.n()
    }
}

fn fold_scale(scale: &mut f64, vector: &mut [f64]) {
    if *scale > SCALE_MAX || *scale < SCALE_MIN {
        vector.iter_mut().for_each(|x| *x *= *scale);
        *scale = 1.0;
    }
}

/// `(u_{k+1}, v_{k+1}) = H(θ_k) (Z u_k, v_k)` with `sin θ_k = v_k[k+1] / u_k[k]`.
pub fn downdate_hyperbolic(g: &GeneratorPair) -> Result<(GeneratorPair, HyperbolicParams)> {
    g.ensure_active()?;
    let n = g.n();
    let p = g.k - 1;
    let (u, v) = (g.u(), g.v());
    let h = rotation_params(u[p], v[p + 1]).map_err(|e| at_step(e, g.k))?;
    let (s, c) = (h.sin_theta, h.cos_theta);
    let zu = shift_down(u);
    let mut nu = vec![0.0; n];
    let mut nv = vec![0.0; n];
    for j in p + 1..n {
        nu[j] = (zu[j] - s * v[j]) / c;
    }
    for j in p + 2..n {
        nv[j] = (v[j] - s * zu[j]) / c;
    }
    Ok((GeneratorPair::from_parts(nu, nv, g.k + 1), h))
}

/// Mixed downdating: `v_{k+1}` by the hyperbolic formula, then
/// `u_{k+1} = −sin θ_k v_{k+1} + cos θ_k Z u_k`.
pub fn downdate_mixed(g: &GeneratorPair) -> Result<(GeneratorPair, HyperbolicParams)> {
    g.ensure_active()?;
    let n = g.n();
    let p = g.k - 1;
    let (u, v) = (g.u(), g.v());
    let h = rotation_params(u[p], v[p + 1]).map_err(|e| at_step(e, g.k))?;
    let (s, c) = (h.sin_theta, h.cos_theta);
    let zu = shift_down(u);
    let mut nu = vec![0.0; n];
    let mut nv = vec![0.0; n];
    for j in p + 2..n {
        nv[j] = (v[j] - s * zu[j]) / c;
    }
    for j in p + 1..n {
        nu[j] = -s * nv[j] + c * zu[j];
    }
    Ok((GeneratorPair::from_parts(nu, nv, g.k + 1), h))
}

/// Mixed downdating in the other order: `u_{k+1}` by the hyperbolic formula, then
/// `v_{k+1} = −sin θ_k u_{k+1} + cos θ_k v_k`.
pub fn downdate_mixed_alt(g: &GeneratorPair) -> Result<(GeneratorPair, HyperbolicParams)> {
    g.ensure_active()?;
    let n = g.n();
    let p = g.k - 1;
    let (u, v) = (g.u(), g.v());
    let h = rotation_params(u[p], v[p + 1]).map_err(|e| at_step(e, g.k))?;
    let (s, c) = (h.sin_theta, h.cos_theta);
    let zu = shift_down(u);
    let mut nu = vec![0.0; n];
    let mut nv = vec![0.0; n];
    for j in p + 1..n {
        nu[j] = (zu[j] - s * v[j]) / c;
    }
    for j in p + 2..n {
        nv[j] = -s * nu[j] + c * v[j];
    }
    Ok((GeneratorPair::from_parts(nu, nv, g.k + 1), h))
}

/// Scaled hyperbolic step with `α_k = β_k`:
/// `α_{k+1} = α_k / cos θ_k`, `w_{k+1} = Z w_k − sin θ_k x_k`, `x_{k+1} = x_k − sin θ_k Z w_k`.
pub fn downdate_scaled_hyperbolic(
    g: &ScaledGeneratorPair,
) -> Result<(ScaledGeneratorPair, HyperbolicParams)> {
    if g.alpha != g.beta {
        return Err(Error::Structure(format!(
            "scaled hyperbolic step needs alpha = beta, got {} and {}",
            g.alpha, g.beta
        )));
    }
    if g.is_terminal() {
        return Err(Error::Structure(format!(
            "no downdating step after step {}",
            g.k
        )));
    }
    let n = g.n();
    let p = g.k - 1;
    let (w, x) = (g.w(), g.x());
    let h = rotation_params(w[p], x[p + 1]).map_err(|e| at_step(e, g.k))?;
    let s = h.sin_theta;
    let zw = shift_down(w);
    let mut nw = vec![0.0; n];
    let mut nx = vec![0.0; n];
    for j in p + 1..n {
        nw[j] = zw[j] - s * x[j];
    }
    for j in p + 2..n {
        nx[j] = x[j] - s * zw[j];
    }
    let mut alpha = g.alpha / h.cos_theta;
    if !(SCALE_MIN..=SCALE_MAX).contains(&alpha) {
        nw.iter_mut().for_each(|v| *v *= alpha);
        nx.iter_mut().for_each(|v| *v *= alpha);
        alpha = 1.0;
    }
    if nw[p + 1] < 0.0 {
        nw.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((
        ScaledGeneratorPair {
            w: Vector::from_vec_unchecked(nw),
            x: Vector::from_vec_unchecked(nx),
            alpha,
            beta: alpha,
            k: g.k + 1,
        },
        h,
    ))
}

/// Scaled mixed step with independent scales:
/// `sin θ_k = β_k x_k[k+1] / (α_k w_k[k])`, `α_{k+1} = α_k cos θ_k`, `β_{k+1} = β_k / cos θ_k`,
/// `x_{k+1} = x_k − (sin θ_k α_k / β_k) Z w_k`, `w_{k+1} = −(sin θ_k β_{k+1} / α_{k+1}) x_{k+1} + Z w_k`.
pub fn downdate_scaled_mixed(
    g: &ScaledGeneratorPair,
) -> Result<(ScaledGeneratorPair, HyperbolicParams)> {
    if g.is_terminal() {
        return Err(Error::Structure(format!(
            "no downdating step after step {}",
            g.k
        )));
    }
    let n = g.n();
    let p = g.k - 1;
    let (w, x) = (g.w(), g.x());
    let ratio = g.beta / g.alpha;
    let (a, b) = (w[p], x[p + 1]);
    if !(a.abs() > 0.0) {
        return Err(Error::Breakdown { step: g.k });
    }
    let h = HyperbolicParams::from_sin(ratio * (b / a)).map_err(|e| at_step(e, g.k))?;
    let (s, c) = (h.sin_theta, h.cos_theta);
    let zw = shift_down(w);
    let mut alpha = g.alpha * c;
    let mut beta = g.beta / c;
    let mut nx = vec![0.0; n];
    let mut nw = vec![0.0; n];
    let gx = s / ratio;
    for j in p + 2..n {
        nx[j] = x[j] - gx * zw[j];
    }
    let gw = s * (beta / alpha);
    for j in p + 1..n {
        nw[j] = -gw * nx[j] + zw[j];
    }
    fold_scale(&mut alpha, &mut nw);
    fold_scale(&mut beta, &mut nx);
    if nw[p + 1] < 0.0 {
        nw.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((
        ScaledGeneratorPair {
            w: Vector::from_vec_unchecked(nw),
            x: Vector::from_vec_unchecked(nx),
            alpha,
            beta,
            k: g.k + 1,
        },
        h,
    ))
}

/// `‖(u'u'ᵀ − v'v'ᵀ) − (Z u uᵀ Zᵀ − v vᵀ)‖_F`, the defect of one downdating step.
pub fn identity_residual(before: &GeneratorPair, after: &GeneratorPair) -> f64 {
    let zu = shift_down(before.u());
    let (v, nu, nv) = (before.v(), after.u(), after.v());
    let n = zu.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = (nu[i] * nu[j] - nv[i] * nv[j]) - (zu[i] * zu[j] - v[i] * v[j]);
            sum += d * d;
        }
    }
    sum.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{norm2, EPSILON};
    use proptest::prelude::*;

    fn pair(u: &[f64], v: &[f64], k: usize) -> GeneratorPair {
        GeneratorPair::new(
            Vector::new(u.to_vec()).unwrap(),
            Vector::new(v.to_vec()).unwrap(),
            k,
        )
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn worked() -> GeneratorPair {
        pair(&[5.0, 4.0, 3.0], &[0.0, 3.0, 1.0], 1)
    }

    #[test]
    fn rotation_examples() {
        let h = rotation_params(5.0, 3.0).unwrap();
        assert_eq!(h.sin_theta(), 0.6);
        assert!((h.cos_theta() - 0.8).abs() < 1e-16);
        let h = rotation_params(1.0, 0.0).unwrap();
        assert_eq!((h.sin_theta(), h.cos_theta()), (0.0, 1.0));
        let h = rotation_params(4.0, -1.75).unwrap();
        assert_eq!(h.sin_theta(), -0.4375);
        assert!((h.cos_theta() - (1.0f64 - 0.4375 * 0.4375).sqrt()).abs() < 1e-16);
        let s = h.sin_theta();
        let c = h.cos_theta();
        assert!((s * s + c * c - 1.0).abs() <= 4.0 * EPSILON);
    }

    #[test]
    fn rotation_breakdown() {
        assert_eq!(rotation_params(1.0, 1.0), Err(Error::Breakdown { step: 0 }));
        assert_eq!(
            rotation_params(1.0, -2.0),
            Err(Error::Breakdown { step: 0 })
        );
        assert_eq!(rotation_params(0.0, 0.0), Err(Error::Breakdown { step: 0 }));
        assert!(rotation_params(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn rotation_zeroes_second_component() {
        let (a, b) = (5.0, 3.0);
        let h = rotation_params(a, b).unwrap();
        let (r, z) = h.apply(a, b);
        assert!((r - 4.0).abs() <= 4.0 * EPSILON * 4.0);
        assert!((h.cos_theta() * z).abs() <= 4.0 * EPSILON * a);
    }

    #[test]
    fn near_breakdown_flag() {
        // the largest double below one still gives cos θ = 2^-26 > 1e-8
        let s = 1.0 - EPSILON;
        let h = HyperbolicParams::from_sin(s).unwrap();
        assert!((h.cos_theta() - 2f64.powi(-26)).abs() < 1e-15);
        assert!(!h.near_breakdown());
        assert!(!rotation_params(1.0, 0.5).unwrap().near_breakdown());
        let tiny = HyperbolicParams {
            sin_theta: 1.0,
            cos_theta: 1e-9,
        };
        assert!(tiny.near_breakdown());
    }

    #[test]
    fn pair_validation() {
        let bad_v = GeneratorPair::initial(vec![1.0, 2.0], vec![1.0, 0.0]);
        assert!(matches!(bad_v, Err(Error::Structure(_))));
        let bad_u = GeneratorPair::new(
            Vector::new(vec![1.0, 2.0, 3.0]).unwrap(),
            Vector::new(vec![0.0, 0.0, 1.0]).unwrap(),
            2,
        );
        assert!(matches!(bad_u, Err(Error::Structure(_))));
        let len = GeneratorPair::initial(vec![1.0, 2.0], vec![0.0]);
        assert!(matches!(len, Err(Error::DimensionMismatch { .. })));
        let flipped = GeneratorPair::initial(vec![-2.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(flipped.u(), &[2.0, -1.0]);
        assert!(ScaledGeneratorPair::new(
            Vector::new(vec![1.0]).unwrap(),
            Vector::new(vec![0.0]).unwrap(),
            0.0,
            1.0,
            1
        )
        .is_err());
    }

    #[test]
    fn hyperbolic_worked_example() {
        let g = worked();
        let (next, h) = downdate_hyperbolic(&g).unwrap();
        assert_eq!(h.sin_theta(), 0.6);
        assert!(close(next.u(), &[0.0, 4.0, 4.25], 1e-14));
        assert!(close(next.v(), &[0.0, 0.0, -1.75], 1e-14));
        assert_eq!(next.k(), 2);
        assert!(identity_residual(&g, &next) < 1e-13);
    }

    #[test]
    fn pure_shift_when_v_is_zero() {
        let c = 2.5;
        let g = pair(&[c, 0.0, 0.0, 0.0], &[0.0; 4], 1);
        for step in [downdate_hyperbolic, downdate_mixed, downdate_mixed_alt] {
            let (next, h) = step(&g).unwrap();
            assert_eq!(h.sin_theta(), 0.0);
            assert_eq!(next.u(), &[0.0, c, 0.0, 0.0]);
            assert_eq!(next.v(), &[0.0; 4]);
        }
    }

    #[test]
    fn two_by_two_step() {
        let g = pair(&[1.0, 0.5], &[0.0, 0.5], 1);
        let (next, h) = downdate_hyperbolic(&g).unwrap();
        assert_eq!(h.sin_theta(), 0.5);
        // Z u = (0, 1), so u' = (0, (1 − 0.5·0.5)/cos θ) = (0, √0.75)
        let expected = 0.75f64.sqrt();
        assert!(close(next.u(), &[0.0, expected], 1e-15));
        assert_eq!(next.v(), &[0.0, 0.0]);
        assert!(identity_residual(&g, &next) <= 1e-14);
        assert!(next.is_terminal());
        assert!(downdate_hyperbolic(&next).is_err());
    }

    #[test]
    fn mixed_variants_match_worked_example() {
        for step in [downdate_mixed, downdate_mixed_alt] {
            let (next, h) = step(&worked()).unwrap();
            assert_eq!(h.sin_theta(), 0.6);
            assert!(close(next.u(), &[0.0, 4.0, 4.25], 1e-14));
            assert!(close(next.v(), &[0.0, 0.0, -1.75], 1e-14));
        }
    }

    #[test]
    fn breakdown_carries_step() {
        let g = pair(&[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0], 2);
        assert_eq!(
            downdate_mixed(&g).unwrap_err(),
            Error::Breakdown { step: 2 }
        );
        let s = ScaledGeneratorPair::from_unscaled(&g);
        assert_eq!(
            downdate_scaled_mixed(&s).unwrap_err(),
            Error::Breakdown { step: 2 }
        );
        assert_eq!(
            downdate_scaled_hyperbolic(&s).unwrap_err(),
            Error::Breakdown { step: 2 }
        );
    }

    #[test]
    fn scaled_hyperbolic_worked_example() {
        let g = ScaledGeneratorPair::from_unscaled(&worked());
        let (next, h) = downdate_scaled_hyperbolic(&g).unwrap();
        assert_eq!(h.sin_theta(), 0.6);
        assert!((next.alpha() - 1.25).abs() < 1e-15);
        assert_eq!(next.alpha(), next.beta());
        assert!(close(next.w(), &[0.0, 3.2, 3.4], 1e-14));
        assert!(close(next.x(), &[0.0, 0.0, -1.4], 1e-14));
        assert!(close(next.unscaled().u(), &[0.0, 4.0, 4.25], 1e-14));
    }

    #[test]
    fn scaled_mixed_worked_example() {
        let g = ScaledGeneratorPair::from_unscaled(&worked());
        let (next, h) = downdate_scaled_mixed(&g).unwrap();
        assert_eq!(h.sin_theta(), 0.6);
        assert!((next.alpha() - 0.8).abs() < 1e-15);
        assert!((next.beta() - 1.25).abs() < 1e-15);
        assert!(close(next.x(), &[0.0, 0.0, -1.4], 1e-14));
        assert!(close(next.w(), &[0.0, 5.0, 5.3125], 1e-14));
        assert!(close(next.unscaled().u(), &[0.0, 4.0, 4.25], 1e-14));
        assert!(close(next.unscaled().v(), &[0.0, 0.0, -1.75], 1e-14));
    }

    #[test]
    fn scaled_zero_sine_keeps_scales() {
        let w = Vector::new(vec![2.0, 1.0, 0.0]).unwrap();
        let x = Vector::new(vec![0.0, 0.0, 1.0]).unwrap();
        let g = ScaledGeneratorPair::new(w, x, 3.0, 3.0, 1).unwrap();
        let (h, _) = downdate_scaled_hyperbolic(&g).unwrap();
        assert_eq!((h.alpha(), h.beta()), (3.0, 3.0));
        assert_eq!(h.w(), &[0.0, 2.0, 1.0]);
        assert_eq!(h.x(), &[0.0, 0.0, 1.0]);
        let (m, _) = downdate_scaled_mixed(&g).unwrap();
        assert_eq!((m.alpha(), m.beta()), (3.0, 3.0));
        assert_eq!(m.w(), &[0.0, 2.0, 1.0]);
        assert_eq!(m.x(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn scaled_hyperbolic_rejects_unequal_scales() {
        let w = Vector::new(vec![2.0, 1.0]).unwrap();
        let x = Vector::new(vec![0.0, 1.0]).unwrap();
        let g = ScaledGeneratorPair::new(w, x, 1.0, 2.0, 1).unwrap();
        assert!(matches!(
            downdate_scaled_hyperbolic(&g),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn overflow_guard_folds_scale() {
        let w = Vector::new(vec![1.0, 0.5, 0.25]).unwrap();
        let x = Vector::new(vec![0.0, 0.5, 0.1]).unwrap();
        let g = ScaledGeneratorPair::new(w, x, 0.9e154, 0.9e154, 1).unwrap();
        let (next, _) = downdate_scaled_hyperbolic(&g).unwrap();
        assert_eq!(next.alpha(), 1.0);
        let plain = downdate_hyperbolic(&g.unscaled()).unwrap().0;
        let got = next.unscaled();
        for (a, b) in got.u().iter().zip(plain.u()) {
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0));
        }

        let g = ScaledGeneratorPair::new(
            Vector::new(vec![1.0, 0.5, 0.25]).unwrap(),
            Vector::new(vec![0.0, 0.5, 0.1]).unwrap(),
            1.1e-154,
            1.1e-154,
            1,
        )
        .unwrap();
        let (next, _) = downdate_scaled_mixed(&g).unwrap();
        assert_eq!(next.alpha(), 1.0);
        assert!(next.w()[1] > 0.0 && next.w()[1] < 1e-150);
    }

    #[test]
    fn hyperbolic_norm_matches_eigenvalues() {
        for s in [0.0, 0.3, -0.7, 0.99] {
            let h = HyperbolicParams::from_sin(s).unwrap();
            let (lo, hi) = h.eigenvalues();
            assert!((lo * hi - 1.0).abs() <= 4.0 * EPSILON);
            assert!((h.norm() - lo.max(hi)).abs() <= 4.0 * EPSILON * h.norm());
        }
    }

    /// A random step-`k` pair of length `n` with `|sin θ| <= 0.9`.
    fn valid_pair() -> impl Strategy<Value = GeneratorPair> {
        (2usize..10)
            .prop_flat_map(|n| (Just(n), 1..n))
            .prop_flat_map(|(n, k)| {
                (
                    Just(n),
                    Just(k),
                    prop::collection::vec(-1.0..1.0f64, n),
                    prop::collection::vec(-1.0..1.0f64, n),
                    0.1..2.0f64,
                    -0.9..0.9f64,
                )
            })
            .prop_map(|(n, k, mut u, mut v, pivot, s)| {
                let p = k - 1;
                u[..p].iter_mut().for_each(|x| *x = 0.0);
                v[..=p].iter_mut().for_each(|x| *x = 0.0);
                u[p] = pivot;
                v[p + 1] = s * pivot;
                let _ = n;
                pair(&u, &v, k)
            })
    }

    proptest! {
        #[test]
        fn shift_down_n_times_is_zero(x in prop::collection::vec(-1e3..1e3f64, 1..30)) {
            let mut y = x.clone();
            for _ in 0..x.len() {
                y = shift_down(&y);
            }
            prop_assert!(y.iter().all(|&v| v == 0.0));
        }

        #[test]
        fn reverse_is_an_isometric_involution(x in prop::collection::vec(-1e3..1e3f64, 1..30)) {
            let r = crate::matrix::reverse(&x);
            prop_assert_eq!(crate::matrix::reverse(&r), x.clone());
            prop_assert!((norm2(&r) - norm2(&x)).abs() <= 4.0 * EPSILON * norm2(&x));
        }

        #[test]
        fn rotation_is_consistent(a in 0.01..10.0f64, frac in -0.999..0.999f64) {
            let b = frac * a;
            let h = rotation_params(a, b).unwrap();
            let (s, c) = (h.sin_theta(), h.cos_theta());
            prop_assert!(s.abs() < 1.0 && c > 0.0);
            prop_assert!((s * s + c * c - 1.0).abs() <= 4.0 * EPSILON);
            let (_, z) = h.apply(a, b);
            prop_assert!((c * z).abs() <= 4.0 * EPSILON * a);
            let (lo, hi) = h.eigenvalues();
            prop_assert!((h.norm() - lo.max(hi)).abs() <= 4.0 * EPSILON * h.norm());
        }

        #[test]
        fn every_variant_satisfies_the_downdating_identity(g in valid_pair()) {
            let zu = shift_down(g.u());
            let scale = norm2(&zu).powi(2) + norm2(g.v()).powi(2);
            let tol = 50.0 * EPSILON * scale;
            let unscaled = [downdate_hyperbolic, downdate_mixed, downdate_mixed_alt];
            let mut outputs: Vec<GeneratorPair> = unscaled
                .iter()
                .map(|step| step(&g).unwrap().0)
                .collect();
            let sg = ScaledGeneratorPair::from_unscaled(&g);
            outputs.push(downdate_scaled_hyperbolic(&sg).unwrap().0.unscaled());
            outputs.push(downdate_scaled_mixed(&sg).unwrap().0.unscaled());
            for next in &outputs {
                let r = identity_residual(&g, next);
                prop_assert!(r <= tol, "residual {} > {}", r, tol);
                let k = next.k();
                prop_assert!(next.u()[..k - 1].iter().all(|&x| x == 0.0));
                prop_assert!(next.v()[..k].iter().all(|&x| x == 0.0));
            }
            let reference = &outputs[0];
            let size = norm2(reference.u()).max(norm2(reference.v())).max(f64::MIN_POSITIVE);
            for next in &outputs[1..] {
                for (a, b) in next.u().iter().zip(reference.u()) {
                    prop_assert!((a - b).abs() <= 1e-12 * size);
                }
                for (a, b) in next.v().iter().zip(reference.v()) {
                    prop_assert!((a - b).abs() <= 1e-12 * size);
                }
            }
        }
    }
}
