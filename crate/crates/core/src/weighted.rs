//! Weighted space `L_{2,r}`: norms under `e^{±r|ω|}` and closed-form
//! moments of the weight `e^{-r|ω|}`.
//!
//! Moments are always computed in closed form. Quadrature appears only in
//! tests, because Gram matrices built from these moments are ill-conditioned
//! and would amplify quadrature noise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{Cx, Scalar};
use crate::spectral::{panel_nodes, SpectralGrid};

/// Sign of the exponent in the weight `e^{sign·r|ω|}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSign {
    /// `e^{-r|ω|}`, the class norm and the approximation space.
    Decaying,
    /// `e^{+r|ω|}`, the companion weight of the error split.
    Growing,
}

impl WeightSign {
    pub fn as_f64(self) -> f64 {
        match self {
            WeightSign::Decaying => -1.0,
            WeightSign::Growing => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorm {
    pub r: f64,
    pub sign: WeightSign,
}

impl WeightedNorm {
    pub fn new(r: f64, sign: WeightSign) -> Result<Self> {
        check_rate(r)?;
        Ok(Self { r, sign })
    }

    pub fn decaying(r: f64) -> Result<Self> {
        Self::new(r, WeightSign::Decaying)
    }

    pub fn growing(r: f64) -> Result<Self> {
        Self::new(r, WeightSign::Growing)
    }

    pub fn weight(&self, omega: f64) -> f64 {
        (self.sign.as_f64() * self.r * omega.abs()).exp()
    }
}

pub(crate) fn check_rate(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "decay rate r must be positive and finite, got {r}"
        )))
    }
}

/// True when the outermost eighth of the grid (on either side) has a larger
/// envelope than the eighth next to it: the integrand is not decaying.
pub(crate) fn tail_is_growing(values: &[f64]) -> bool {
    let n = values.len();
    let block = (n / 16).max(1);
    if n < 4 * block {
        return false;
    }
    let envelope = |range: std::ops::Range<usize>| {
        values[range]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let peak = envelope(0..n);
    if peak == 0.0 {
        return false;
    }
    let left_outer = envelope(0..block);
    let left_inner = envelope(block..2 * block);
    let right_outer = envelope(n - block..n);
    let right_inner = envelope(n - 2 * block..n - block);
    let significant = |v: f64| v > 1e-14 * peak;
    (significant(left_outer) && left_outer >= left_inner)
        || (significant(right_outer) && right_outer >= right_inner)
}

/// `∫ e^{sign·r|ω|} |u(ω)|² dω` over the truncated grid.
pub fn weighted_norm_sq<U>(u: U, norm: &WeightedNorm, grid: &SpectralGrid) -> Result<f64>
where
    U: Fn(f64) -> Complex64,
{
    let values: Vec<f64> = grid
        .nodes
        .iter()
        .map(|&w| norm.weight(w) * u(w).norm_sqr())
        .collect();
    if values.iter().any(|v| !v.is_finite()) || tail_is_growing(&values) {
        return Err(Error::WeightDecayMismatch);
    }
    Ok(grid.integrate(&values))
}

/// Outcome of [`integrate_line`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LineIntegral {
    Converged(f64),
    Divergent,
}

/// `∫_ℝ f` for a non-negative integrand, walking outward in windows of width
/// `window` on both sides until the tail is negligible.
///
/// With `growth_check`, a window envelope that keeps rising for eight
/// consecutive windows and has left its running minimum by two decades is
/// reported as divergence. Running out of windows is also divergence.
pub(crate) fn integrate_line<F>(f: F, window: f64, max_windows: usize, growth_check: bool) -> LineIntegral
where
    F: Fn(f64) -> f64,
{
    const PANELS: usize = 8;
    const GROWTH_RUN: usize = 8;
    let mut total = 0.0;
    let mut quiet = 0;
    let mut run = 0;
    let mut prev_env = f64::INFINITY;
    let mut min_env = f64::INFINITY;
    for k in 0..max_windows {
        let a = k as f64 * window;
        let (nodes, weights) = panel_nodes(a, a + window, PANELS);
        let mut part = 0.0;
        let mut env = 0.0f64;
        for (&w, &q) in nodes.iter().zip(&weights) {
            let (right, left) = (f(w), f(-w));
            part += q * (right + left);
            env = env.max(right.abs()).max(left.abs());
        }
        if !part.is_finite() {
            return LineIntegral::Divergent;
        }
        total += part;
        min_env = min_env.min(env);
        run = if env > prev_env { run + 1 } else { 0 };
        if growth_check && run >= GROWTH_RUN && env > 1e2 * min_env {
            return LineIntegral::Divergent;
        }
        prev_env = env;
        if env == 0.0 || part.abs() <= 1e-17 * total.abs() {
            quiet += 1;
            if quiet >= 3 {
                return LineIntegral::Converged(total);
            }
        } else {
            quiet = 0;
        }
    }
    LineIntegral::Divergent
}

fn factorial<S: Scalar>(k: usize) -> S {
    (2..=k).fold(S::one(), |acc, j| acc * S::from_f64(j as f64))
}

/// `∫ |ω|^k e^{-r|ω|} dω = 2·k!/r^{k+1}` in the requested precision.
pub fn monomial_moment_in<S: Scalar>(k: usize, r: f64) -> S {
    let r = S::from_f64(r);
    let mut power = r;
    for _ in 0..k {
        power = power * r;
    }
    S::from_f64(2.0) * factorial::<S>(k) / power
}

/// `∫ ω^k e^{-r|ω|} dω`: zero for odd `k`.
pub fn signed_moment_in<S: Scalar>(k: usize, r: f64) -> S {
    if k % 2 == 1 {
        S::zero()
    } else {
        monomial_moment_in(k, r)
    }
}

/// `∫ ω^k e^{iωT} e^{-r|ω|} dω = k!·[(r−iT)^{-(k+1)} + (−1)^k (r+iT)^{-(k+1)}]`.
///
/// The two halves are conjugate-related, so the result is real for even `k`
/// and purely imaginary for odd `k`; that parity is kept exact.
pub fn exponential_moment_in<S: Scalar>(k: usize, r: f64, horizon: f64) -> Cx<S> {
    let base = Cx::new(S::from_f64(r), S::from_f64(-horizon)).inv();
    let half = base.powu(k as u32 + 1).scale(factorial::<S>(k));
    let two = S::from_f64(2.0);
    if k.is_multiple_of(2) {
        Cx::real(two * half.re)
    } else {
        Cx::new(S::zero(), two * half.im)
    }
}

/// `∫ |ω|^k e^{-r|ω|} dω = 2·k!/r^{k+1}`.
pub fn monomial_moment(k: usize, r: f64) -> Result<f64> {
    check_rate(r)?;
    Ok(monomial_moment_in::<f64>(k, r))
}

/// `∫ ω^k e^{-r|ω|} dω`.
pub fn signed_moment(k: usize, r: f64) -> Result<f64> {
    check_rate(r)?;
    Ok(signed_moment_in::<f64>(k, r))
}

/// `∫ ω^k e^{iωT} e^{-r|ω|} dω`.
pub fn exponential_moment(k: usize, r: f64, horizon: f64) -> Result<Complex64> {
    check_rate(r)?;
    if !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be finite, got {horizon}")));
    }
    Ok(exponential_moment_in::<f64>(k, r, horizon).to_c64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{adaptive_simpson_half_line, factorial as fact};
    use crate::precision::Dd;
    
    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn norm_examples() {
        let grid = SpectralGrid::for_decay(1.0).unwrap();
        let u = |w: f64| Complex64::new((-w.abs()).exp(), 0.0);
        let dec = WeightedNorm::decaying(2.0).unwrap();
        let v = weighted_norm_sq(u, &dec, &SpectralGrid::for_decay(2.0).unwrap()).unwrap();
        assert!(close(v, 0.5, 1e-12));
        let zero = weighted_norm_sq(|_| Complex64::new(0.0, 0.0), &dec, &grid).unwrap();
        assert_eq!(zero, 0.0);
        let grow = WeightedNorm::growing(1.0).unwrap();
        let v = weighted_norm_sq(u, &grow, &grid).unwrap();
        assert!(close(v, 2.0, 1e-12));
    }

    #[test]
    fn growing_weight_against_slow_decay_is_rejected() {
        let grid = SpectralGrid::new(60.0, 1024).unwrap();
        let grow = WeightedNorm::growing(1.0).unwrap();
        let slow = |w: f64| Complex64::new((-0.4 * w.abs()).exp(), 0.0);
        assert_eq!(
            weighted_norm_sq(slow, &grow, &grid),
            Err(Error::WeightDecayMismatch)
        );
    }

    #[test]
    fn moment_examples() {
        assert_eq!(monomial_moment(0, 2.0).unwrap(), 1.0);
        assert_eq!(signed_moment(1, 2.0).unwrap(), 0.0);
        assert_eq!(monomial_moment(2, 1.0).unwrap(), 4.0);
        assert!(monomial_moment(2, 0.0).is_err());

        let e = exponential_moment(0, 1.0, 0.0).unwrap();
        assert!(close(e.re, 2.0, 1e-15) && e.im == 0.0);
        let e = exponential_moment(0, 1.0, 1.0).unwrap();
        assert!(close(e.re, 1.0, 1e-15) && e.im == 0.0);
        let e = exponential_moment(1, 1.0, 1.0).unwrap();
        assert!(e.re == 0.0 && close(e.im, 1.0, 1e-15));
    }

    #[test]
    fn moments_match_quadrature() {
        for &r in &[0.5, 1.3, 4.0] {
            for k in [0usize, 1, 3, 6, 11, 17, 24] {
                let half = adaptive_simpson_half_line(
                    &|w: f64| w.powi(k as i32) * (-r * w).exp(),
                    0.0,
                    1e-14 * fact(k as u32) / r.powi(k as i32 + 1),
                );
                let expected = 2.0 * half;
                let got = monomial_moment(k, r).unwrap();
                assert!(close(got, expected, 1e-10), "k={k} r={r}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn exponential_moment_symmetries() {
        for k in 0..=24 {
            for &r in &[0.5, 2.0, 4.0] {
                let at_zero = exponential_moment(k, r, 0.0).unwrap();
                let signed = signed_moment(k, r).unwrap();
                assert!(close(at_zero.re, signed, 1e-14) || (signed == 0.0 && at_zero.re == 0.0));
                assert_eq!(at_zero.im, 0.0);
                let plus = exponential_moment(k, r, 0.7).unwrap();
                let minus = exponential_moment(k, r, -0.7).unwrap();
                assert_eq!(plus.conj(), minus);
            }
        }
    }

    #[test]
    fn extended_moments_agree_with_double() {
        for k in 0..=24 {
            let d = monomial_moment_in::<f64>(k, 2.0);
            let x = monomial_moment_in::<Dd>(k, 2.0).to_f64();
            assert!(close(x, d, 1e-14));
            let d = exponential_moment_in::<f64>(k, 2.0, 0.5).to_c64();
            let x = exponential_moment_in::<Dd>(k, 2.0, 0.5).to_c64();
            assert!((x - d).norm() <= 1e-13 * d.norm());
        }
    }

    #[test]
    fn tail_detector() {
        let decaying: Vec<f64> = (0..256).map(|k| (-(k as f64 - 128.0).abs()).exp()).collect();
        assert!(!tail_is_growing(&decaying));
        let growing: Vec<f64> = (0..256).map(|k| ((k as f64 - 128.0).abs() * 0.1).exp()).collect();
        assert!(tail_is_growing(&growing));
    }

    #[test]
    fn line_integral_detects_growth() {
        let v = integrate_line(|w: f64| (-w.abs()).exp(), 5.0, 100, true);
        match v {
            LineIntegral::Converged(v) => assert!((v - 2.0).abs() < 1e-13),
            LineIntegral::Divergent => panic!("expected convergence"),
        }
        let knee = |w: f64| (0.2 * w.abs() - 2.0 * (0.6 * w.abs()).sqrt()).exp();
        assert_eq!(integrate_line(knee, 5.0, 800, true), LineIntegral::Divergent);
        // a rising then falling bump is only transient growth
        let bump = |w: f64| (-(w.abs() - 60.0).powi(2) / 50.0).exp();
        assert!(matches!(integrate_line(bump, 5.0, 800, false), LineIntegral::Converged(_)));
    }
}
