//! Smooth compactly supported target kernels `h` on `[−T, θ]`.
//!
//! `T` is the anticausal reach (prediction horizon) and `θ` the causal tail,
//! so that `q(t) = h(t − T)` vanishes for `t < 0` and `t > T + θ`.
//!
//! All shapes are built from the standard bump `g(u) = exp(−1/(1−u²))`. Its
//! derivatives have the closed form
//!
//! ```text
//! g^{(k)}(u) = P_k(u) / (1−u²)^{2k} · g(u),
//! P_{k+1} = P_k′·(1−u²)² + P_k·[4k·u·(1−u²) − 2u],   P_0 = 1,
//! ```
//!
//! with integer coefficients. `P_k` cancels heavily in floating point, so it
//! is evaluated in double-double.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{Dd, Scalar};
use crate::spectral::{integrate, TransformTable};

/// Panels for the convolution integral of a custom prototype.
const CUSTOM_PANELS: usize = 64;

/// Highest derivative order supported by every kernel.
pub const D_MAX: usize = 16;

/// Integer coefficients of `P_0 ..= P_{D_MAX}`, lowest order first.
pub fn derivative_polynomials() -> &'static [Vec<i128>] {
    static TABLE: OnceLock<Vec<Vec<i128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = vec![vec![1i128]];
        for k in 0..D_MAX {
            let p = &table[k];
            let mut next = vec![0i128; p.len() + 3];
            let kk = k as i128;
            // P' (1 − 2u² + u⁴)
            for (j, &c) in p.iter().enumerate().skip(1) {
                let dc = c * j as i128;
                next[j - 1] += dc;
                next[j + 1] -= 2 * dc;
                next[j + 3] += dc;
            }
            // P · ((4k − 2)u − 4k u³)
            for (j, &c) in p.iter().enumerate() {
                next[j + 1] += (4 * kk - 2) * c;
                next[j + 3] -= 4 * kk * c;
            }
            while next.len() > 1 && *next.last().unwrap() == 0 {
                next.pop();
            }
            table.push(next);
        }
        table
    })
}

fn derivative_polynomials_dd() -> &'static [Vec<Dd>] {
    static TABLE: OnceLock<Vec<Vec<Dd>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        derivative_polynomials()
            .iter()
            .map(|p| p.iter().map(|&c| Dd::from_i128(c)).collect())
            .collect()
    })
}

/// `∫_{−1}^{1} exp(−1/(1−u²)) du`.
pub fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| integrate(|u| unit_bump_derivative(0, u), -1.0, 1.0, 512))
}

/// `g^{(k)}(u)` for the unnormalized unit bump; zero outside `(−1, 1)`.
/// `k ≤ D_MAX` is the caller's responsibility.
pub fn unit_bump_derivative(k: usize, u: f64) -> f64 {
    if !(u.abs() < 1.0) {
        return 0.0;
    }
    let s = (1.0 - u) * (1.0 + u);
    let exponent = -1.0 / s - 2.0 * k as f64 * s.ln();
    if exponent < -745.0 {
        return 0.0;
    }
    let envelope = exponent.exp();
    if k == 0 {
        return envelope;
    }
    let coeffs = &derivative_polynomials_dd()[k];
    let x = Dd::from(u);
    let p = coeffs
        .iter()
        .rev()
        .fold(Dd::from(0.0), |acc, &c| acc * x + c);
    p.to_f64() * envelope
}

/// `g^{(k)}(u)` for `k = 0..=kmax` in double-double.
///
/// Uses Taylor-series arithmetic instead of `P_k`: with
/// `φ(u) = −1/(1−u²) = −½[1/(1−u) + 1/(1+u)]` the Taylor coefficients of `φ`
/// at `u` are `φ_n = −½[(1−u)^{−(n+1)} + (−1)ⁿ(1+u)^{−(n+1)}]`, and those of
/// `g = e^φ` follow from `n g_n = Σ_{j=1}^{n} j φ_j g_{n−j}`. Near the support
/// edges every term has the same sign, so nothing cancels.
pub fn unit_bump_derivatives_dd(u: Dd, kmax: usize) -> Vec<Dd> {
    let one = Dd::new(1.0);
    let zero = Dd::new(0.0);
    if !(u.abs() < one) {
        return vec![zero; kmax + 1];
    }
    let (left, right) = (one / (one - u), one / (one + u));
    let g0 = (-(one / ((one - u) * (one + u)))).exp();
    if g0 == zero {
        return vec![zero; kmax + 1];
    }
    let half = Dd::new(0.5);
    let (mut lp, mut rp) = (left, right);
    let mut phi = vec![zero; kmax + 1];
    for (n, slot) in phi.iter_mut().enumerate().skip(1) {
        lp = lp * left;
        rp = rp * right;
        let r = if n % 2 == 0 { rp } else { -rp };
        *slot = -(half * (lp + r));
    }
    let mut g = vec![g0];
    for n in 1..=kmax {
        let acc = (1..=n).fold(zero, |acc, j| acc + Dd::new(j as f64) * phi[j] * g[n - j]);
        g.push(acc / Dd::new(n as f64));
    }
    let mut factorial = one;
    for (k, v) in g.iter_mut().enumerate().skip(1) {
        factorial = factorial * Dd::new(k as f64);
        *v = *v * factorial;
    }
    g
}

/// `g^{(k)}(u)` in double-double.
pub fn unit_bump_derivative_dd(k: usize, u: Dd) -> Dd {
    unit_bump_derivatives_dd(u, k)[k]
}

/// Unit-mass smoothing kernel `κ_ε(t) = ε⁻¹ κ₁(t/ε)` on `[−ε, ε]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierKernel {
    pub epsilon: f64,
}

impl MollifierKernel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mollifier width must be positive, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    pub fn derivative(&self, k: usize, t: f64) -> f64 {
        let e = self.epsilon;
        unit_bump_derivative(k, t / e) / (bump_mass() * e.powi(k as i32 + 1))
    }

    /// `∫_{−∞}^{x} κ_ε`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let e = self.epsilon;
        if x <= -e {
            0.0
        } else if x >= e {
            1.0
        } else {
            integrate(|s| self.value(s), -e, x, 16)
        }
    }
}

/// Function smoothed by [`mollify`].
#[derive(Clone)]
pub enum Prototype {
    /// Constant level on the clipped interval.
    Constant(f64),
    /// Arbitrary square-integrable function.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Prototype {
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Prototype::Custom(Arc::new(f))
    }

    fn eval(&self, s: f64) -> f64 {
        match self {
            Prototype::Constant(c) => *c,
            Prototype::Custom(f) => f(s),
        }
    }
}

impl fmt::Debug for Prototype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prototype::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            Prototype::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Shape {
    Bump,
    Mollified {
        prototype: Prototype,
        mollifier: MollifierKernel,
    },
}

/// Smooth kernel `h` with support `[−T, θ]`.
#[derive(Debug, Clone)]
pub struct TargetKernel {
    horizon: f64,
    theta: f64,
    shape: Shape,
    scale: f64,
}

fn check_support(horizon: f64, theta: f64) -> Result<()> {
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon T must be non-negative, got {horizon}"
        )));
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "causal tail theta must be non-negative, got {theta}"
        )));
    }
    if horizon + theta <= 0.0 {
        return Err(Error::InvalidArgument("support [-T, theta] is empty".into()));
    }
    Ok(())
}

/// Bump on `[−T, θ]` normalized to unit integral.
pub fn bump_kernel(horizon: f64, theta: f64) -> Result<TargetKernel> {
    check_support(horizon, theta)?;
    let half_width = 0.5 * (horizon + theta);
    Ok(TargetKernel {
        horizon,
        theta,
        shape: Shape::Bump,
        scale: 1.0 / (half_width * bump_mass()),
    })
}

/// `h_ε(t) = ∫ κ_ε(t − s) 𝕀_{[−T+ε, θ−ε]}(s) p(s) ds`.
pub fn mollify(prototype: Prototype, horizon: f64, theta: f64, epsilon: f64) -> Result<TargetKernel> {
    check_support(horizon, theta)?;
    let mollifier = MollifierKernel::new(epsilon)?;
    if epsilon >= 0.5 * (horizon + theta) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} must be below half the support length {}",
            0.5 * (horizon + theta)
        )));
    }
    Ok(TargetKernel {
        horizon,
        theta,
        shape: Shape::Mollified {
            prototype,
            mollifier,
        },
        scale: 1.0,
    })
}

impl TargetKernel {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Memory length `T + θ` of predictors built on this kernel.
    pub fn memory(&self) -> f64 {
        self.horizon + self.theta
    }

    /// Interior points of `(−T, θ)` where the derivatives stop being smooth
    /// at the working scale: the inner edges of the two mollifier bands.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Bump => Vec::new(),
            Shape::Mollified { mollifier, .. } => {
                let width = 2.0 * mollifier.epsilon;
                vec![-self.horizon + width, self.theta - width]
            }
        }
    }

    /// `(−T, θ)`.
    pub fn support(&self) -> (f64, f64) {
        (-self.horizon, self.theta)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative_unchecked(0, t)
    }

    /// Bump profile before normalization, `exp(−1/(1−u²))`.
    pub fn profile(&self, t: f64) -> f64 {
        match self.shape {
            Shape::Bump => unit_bump_derivative(0, self.to_unit(t)),
            Shape::Mollified { .. } => self.value(t),
        }
    }

    fn to_unit(&self, t: f64) -> f64 {
        (2.0 * t - (self.theta - self.horizon)) / (self.horizon + self.theta)
    }

    /// `h^{(k)}(t)`.
    pub fn derivative(&self, k: usize, t: f64) -> Result<f64> {
        if k > D_MAX {
            return Err(Error::DerivativeOrder {
                requested: k,
                d_max: D_MAX,
            });
        }
        Ok(self.derivative_unchecked(k, t))
    }

    pub(crate) fn derivative_unchecked(&self, k: usize, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(t > lo && t < hi) {
            return 0.0;
        }
        match &self.shape {
            Shape::Bump => {
                let half_width = 0.5 * (self.horizon + self.theta);
                self.scale * unit_bump_derivative(k, self.to_unit(t)) / half_width.powi(k as i32)
            }
            Shape::Mollified {
                prototype,
                mollifier,
            } => {
                let e = mollifier.epsilon;
                let (a, b) = (lo + e, hi - e);
                match prototype {
                    Prototype::Constant(level) => {
                        let v = if k == 0 {
                            mollifier.cumulative(t - a) - mollifier.cumulative(t - b)
                        } else {
                            mollifier.derivative(k - 1, t - a) - mollifier.derivative(k - 1, t - b)
                        };
                        self.scale * level * v
                    }
                    Prototype::Custom(_) => {
                        let from = a.max(t - e);
                        let to = b.min(t + e);
                        if from >= to {
                            return 0.0;
                        }
                        self.scale
                            * integrate(
                                |s| mollifier.derivative(k, t - s) * prototype.eval(s),
                                from,
                                to,
                                CUSTOM_PANELS,
                            )
                    }
                }
            }
        }
    }

    /// `h^{(k)}(t)` for `k = 0..=kmax` in double-double. The bump and the
    /// derivatives of a mollified constant are exact-form and evaluated end
    /// to end in extended precision; other cases are promoted from double.
    pub fn derivatives_dd(&self, kmax: usize, t: Dd) -> Vec<Dd> {
        let (lo, hi) = (Dd::new(-self.horizon), Dd::new(self.theta));
        if !(t > lo && t < hi) {
            return vec![Dd::new(0.0); kmax + 1];
        }
        match &self.shape {
            Shape::Bump => {
                let len = Dd::new(self.horizon) + Dd::new(self.theta);
                let u = (Dd::new(2.0) * t - (Dd::new(self.theta) - Dd::new(self.horizon))) / len;
                let inv_half = Dd::new(2.0) / len;
                let mut scale = Dd::new(self.scale);
                let mut out = unit_bump_derivatives_dd(u, kmax);
                for v in out.iter_mut() {
                    *v = *v * scale;
                    scale = scale * inv_half;
                }
                out
            }
            Shape::Mollified {
                prototype: Prototype::Constant(level),
                mollifier,
            } => {
                let e = Dd::new(mollifier.epsilon);
                let (a, b) = (lo + e, hi - e);
                let inv_e = Dd::new(1.0) / e;
                let left = unit_bump_derivatives_dd((t - a) * inv_e, kmax.saturating_sub(1));
                let right = unit_bump_derivatives_dd((t - b) * inv_e, kmax.saturating_sub(1));
                let mut scale = Dd::new(self.scale * level) / (Dd::new(bump_mass()) * e);
                let mut out = vec![Dd::new(self.derivative_unchecked(0, t.to_f64()))];
                for j in 0..kmax {
                    out.push(scale * (left[j] - right[j]));
                    scale = scale * inv_e;
                }
                out
            }
            Shape::Mollified { .. } => (0..=kmax)
                .map(|k| Dd::new(self.derivative_unchecked(k, t.to_f64())))
                .collect(),
        }
    }

    /// `q(t) = h(t − T)`, supported on `[0, T+θ]`.
    pub fn q(&self, t: f64) -> f64 {
        self.value(t - self.horizon)
    }

    pub fn q_derivative(&self, k: usize, t: f64) -> Result<f64> {
        self.derivative(k, t - self.horizon)
    }

    /// Table of `q` on quadrature nodes resolving `|ω| ≤ omega_max`.
    pub fn q_table(&self, omega_max: f64) -> Result<TransformTable> {
        TransformTable::new(|t| self.q(t), 0.0, self.memory(), omega_max)
    }

    /// `Q(z) = ∫_0^{T+θ} e^{−zt} h(t − T) dt`; entire in `z`.
    pub fn q_transform(&self, z: Complex64) -> Result<Complex64> {
        let scale = z.im.abs() + std::f64::consts::PI * z.re.abs();
        Ok(self.q_table(scale)?.laplace(z))
    }

    /// `H(iω) = ∫ e^{−iωt} h(t) dt`.
    pub fn fourier(&self, omega: f64) -> Result<Complex64> {
        let (lo, hi) = self.support();
        Ok(TransformTable::new(|t| self.value(t), lo, hi, omega)?.fourier(omega))
    }

    /// Serializable description, unavailable for custom prototypes.
    pub fn spec(&self) -> Option<KernelSpec> {
        match &self.shape {
            Shape::Bump => Some(KernelSpec {
                shape: KernelShape::Bump,
                horizon: self.horizon,
                theta: self.theta,
                epsilon: None,
                level: None,
            }),
            Shape::Mollified {
                prototype: Prototype::Constant(level),
                mollifier,
            } => Some(KernelSpec {
                shape: KernelShape::Mollified,
                horizon: self.horizon,
                theta: self.theta,
                epsilon: Some(mollifier.epsilon),
                level: Some(*level),
            }),
            Shape::Mollified { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelShape {
    Bump,
    /// Mollified constant (a smoothed box).
    Mollified,
}

/// JSON form: `{"shape": "bump", "T": 0.5, "theta": 0.1}` or
/// `{"shape": "mollified", "T": 0.5, "theta": 0.1, "epsilon": 0.05}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub shape: KernelShape,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
}

impl KernelSpec {
    pub fn build(&self) -> Result<TargetKernel> {
        match self.shape {
            KernelShape::Bump => bump_kernel(self.horizon, self.theta),
            KernelShape::Mollified => {
                let epsilon = self.epsilon.ok_or_else(|| {
                    Error::InvalidArgument("mollified kernel requires epsilon".into())
                })?;
                mollify(
                    Prototype::Constant(self.level.unwrap_or(1.0)),
                    self.horizon,
                    self.theta,
                    epsilon,
                )
            }
        }
    }
}
