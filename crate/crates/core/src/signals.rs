//! Analytic test signals with exact Fourier transforms, class membership
//! for exponentially weighted spectral norms, and chirp noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{Dd, Scalar};
use crate::spectral::{panel_nodes, SpectralGrid};
use crate::weighted::{check_rate, integrate_line, LineIntegral, WeightSign, WeightedNorm};

/// Anything that can be sampled in time.
///
/// Predictors only ever see a signal through this trait.
pub trait TimeSignal {
    fn eval(&self, t: f64) -> f64;

    /// Sample in double-double; defaults to the promoted double sample.
    fn eval_dd(&self, t: Dd) -> Dd {
        Dd::new(self.eval(t.to_f64()))
    }
}

impl<F: Fn(f64) -> f64> TimeSignal for F {
    fn eval(&self, t: f64) -> f64 {
        self(t)
    }
}

/// One weighted term of a [`Signal::Superposition`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    pub signal: Signal,
}

/// Analytic test process. JSON form: `{"kind": "poisson", "params": {"a": 1.5}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Signal {
    Zero,
    /// `x(t) = a / (π(a² + t²))`, `X(iω) = e^{−a|ω|}`.
    Poisson { a: f64 },
    /// `x(t) = exp(−t²/(2σ²))`, `X(iω) = σ√(2π) exp(−σ²ω²/2)`.
    Gaussian { sigma: f64 },
    /// `x(t) = cos(ω₀t) · a / (π(a² + t²))`.
    CosineModulatedPoisson { a: f64, omega0: f64 },
    /// `η(t) = A exp(−t²/(2w²)) cos(ω₀t + κt²)`: a Gaussian-windowed linear
    /// chirp concentrated near `±ω₀`.
    ChirpNoise {
        omega0: f64,
        rate: f64,
        width: f64,
        amplitude: f64,
    },
    Superposition { terms: Vec<Term> },
}

impl TimeSignal for Signal {
    fn eval(&self, t: f64) -> f64 {
        Signal::eval(self, t)
    }

    fn eval_dd(&self, t: Dd) -> Dd {
        let poisson = |a: f64| Dd::new(a) / (Dd::pi() * (Dd::new(a) * Dd::new(a) + t * t));
        let gaussian = |w: f64| (-(t * t) / Dd::new(2.0 * w * w)).exp();
        match self {
            Signal::Zero => Dd::new(0.0),
            Signal::Poisson { a } => poisson(*a),
            Signal::Gaussian { sigma } => gaussian(*sigma),
            Signal::CosineModulatedPoisson { a, omega0 } => (Dd::new(*omega0) * t).sin_cos().1 * poisson(*a),
            Signal::ChirpNoise {
                omega0,
                rate,
                width,
                amplitude,
            } => {
                let phase = Dd::new(*omega0) * t + Dd::new(*rate) * t * t;
                Dd::new(*amplitude) * gaussian(*width) * phase.sin_cos().1
            }
            Signal::Superposition { terms } => terms
                .iter()
                .fold(Dd::new(0.0), |acc, term| acc + Dd::new(term.weight) * term.signal.eval_dd(t)),
        }
    }
}

fn poisson_kernel(a: f64, t: f64) -> f64 {
    a / (PI * (a * a + t * t))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

pub fn poisson_signal(a: f64) -> Result<Signal> {
    positive("a", a)?;
    Ok(Signal::Poisson { a })
}

pub fn gaussian_signal(sigma: f64) -> Result<Signal> {
    positive("sigma", sigma)?;
    Ok(Signal::Gaussian { sigma })
}

pub fn cosine_modulated_poisson(a: f64, omega0: f64) -> Result<Signal> {
    positive("a", a)?;
    Ok(Signal::CosineModulatedPoisson { a, omega0 })
}

impl Signal {
    pub fn superposition(terms: Vec<(f64, Signal)>) -> Signal {
        Signal::Superposition {
            terms: terms
                .into_iter()
                .map(|(weight, signal)| Term { weight, signal })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Signal::Zero => Ok(()),
            Signal::Poisson { a } => positive("a", *a),
            Signal::Gaussian { sigma } => positive("sigma", *sigma),
            Signal::CosineModulatedPoisson { a, omega0 } => {
                positive("a", *a)?;
                if omega0.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("omega0 must be finite".into()))
                }
            }
            Signal::ChirpNoise {
                omega0,
                rate,
                width,
                amplitude,
            } => {
                positive("width", *width)?;
                if omega0.is_finite() && rate.is_finite() && amplitude.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("chirp parameters must be finite".into()))
                }
            }
            Signal::Superposition { terms } => terms.iter().try_for_each(|t| {
                if t.weight.is_finite() {
                    t.signal.validate()
                } else {
                    Err(Error::InvalidArgument("superposition weight must be finite".into()))
                }
            }),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Signal::Zero => 0.0,
            Signal::Poisson { a } => poisson_kernel(*a, t),
            Signal::Gaussian { sigma } => (-t * t / (2.0 * sigma * sigma)).exp(),
            Signal::CosineModulatedPoisson { a, omega0 } => {
                (omega0 * t).cos() * poisson_kernel(*a, t)
            }
            Signal::ChirpNoise {
                omega0,
                rate,
                width,
                amplitude,
            } => amplitude * (-t * t / (2.0 * width * width)).exp() * (omega0 * t + rate * t * t).cos(),
            Signal::Superposition { terms } => {
                terms.iter().map(|term| term.weight * term.signal.eval(t)).sum()
            }
        }
    }

    /// Exact `X(iω)`.
    pub fn spectrum(&self, omega: f64) -> Complex64 {
        match self {
            Signal::Zero => Complex64::new(0.0, 0.0),
            Signal::Poisson { a } => Complex64::new((-a * omega.abs()).exp(), 0.0),
            Signal::Gaussian { sigma } => Complex64::new(
                sigma * (2.0 * PI).sqrt() * (-0.5 * sigma * sigma * omega * omega).exp(),
                0.0,
            ),
            Signal::CosineModulatedPoisson { a, omega0 } => Complex64::new(
                0.5 * ((-a * (omega - omega0).abs()).exp() + (-a * (omega + omega0).abs()).exp()),
                0.0,
            ),
            Signal::ChirpNoise {
                omega0,
                rate,
                width,
                amplitude,
            } => {
                let b = Complex64::new(1.0 / (2.0 * width * width), -rate);
                let lobe = |b: Complex64, shift: f64| {
                    (Complex64::new(PI, 0.0) / b).sqrt() * (-(shift * shift) / (4.0 * b)).exp()
                };
                (lobe(b, omega - omega0) + lobe(b.conj(), omega + omega0)) * (0.5 * amplitude)
            }
            Signal::Superposition { terms } => terms
                .iter()
                .map(|term| term.signal.spectrum(omega) * term.weight)
                .sum(),
        }
    }

    /// Exponential decay rate `ρ` of the spectrum, `|X(iω)| ≲ e^{−ρ|ω|}`;
    /// infinite for super-exponential decay.
    pub fn spectral_decay_rate(&self) -> f64 {
        match self {
            Signal::Zero | Signal::Gaussian { .. } | Signal::ChirpNoise { .. } => f64::INFINITY,
            Signal::Poisson { a } | Signal::CosineModulatedPoisson { a, .. } => *a,
            Signal::Superposition { terms } => terms
                .iter()
                .filter(|t| t.weight != 0.0)
                .map(|t| t.signal.spectral_decay_rate())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Half-width `L` such that truncating to `[−L, L]` changes the Fourier
    /// transform at `omega` by at most `tol`.
    pub fn truncation_window(&self, omega: f64, tol: f64) -> f64 {
        // |∫_L^∞ e^{-iνt} f| ≤ 2 f(L)/|ν| for monotone f; both tails included
        let poisson_tail = |a: f64, nu: f64| {
            if nu > 1e-3 {
                (4.0 * a / (PI * nu * tol)).sqrt()
            } else {
                2.0 * a / (PI * tol)
            }
        };
        let gaussian_tail = |s: f64, scale: f64| s * (2.0 * (2.0 * s * scale / tol).max(2.0).ln()).sqrt() + s;
        match self {
            Signal::Zero => 1.0,
            Signal::Poisson { a } => poisson_tail(*a, omega.abs()).max(10.0 * a),
            Signal::CosineModulatedPoisson { a, omega0 } => {
                let nu = (omega - omega0).abs().min((omega + omega0).abs());
                poisson_tail(*a, nu).max(10.0 * a)
            }
            Signal::Gaussian { sigma } => gaussian_tail(*sigma, 1.0),
            Signal::ChirpNoise {
                width, amplitude, ..
            } => gaussian_tail(*width, amplitude.abs().max(1.0)),
            Signal::Superposition { terms } => terms
                .iter()
                .map(|t| {
                    let share = tol / (terms.len() as f64 * t.weight.abs().max(1e-300));
                    t.signal.truncation_window(omega, share)
                })
                .fold(1.0, f64::max),
        }
    }

    fn time_scale(&self) -> f64 {
        match self {
            Signal::Zero => 1.0,
            Signal::Poisson { a } | Signal::CosineModulatedPoisson { a, .. } => *a,
            Signal::Gaussian { sigma } => *sigma,
            Signal::ChirpNoise { width, .. } => *width,
            Signal::Superposition { terms } => terms
                .iter()
                .map(|t| t.signal.time_scale())
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn max_frequency(&self) -> f64 {
        match self {
            Signal::CosineModulatedPoisson { omega0, .. } => omega0.abs(),
            Signal::ChirpNoise { omega0, rate, .. } => omega0.abs() + rate.abs(),
            Signal::Superposition { terms } => terms
                .iter()
                .map(|t| t.signal.max_frequency())
                .fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    /// Fourier transform of the signal truncated to `[−half_width, half_width]`.
    pub fn fourier_truncated(&self, omega: f64, half_width: f64) -> Complex64 {
        let len = 2.0 * half_width;
        let density = (omega.abs() + self.max_frequency()) / PI + 4.0 / self.time_scale();
        let panels = ((len * density).ceil() as usize).max(32);
        let (nodes, weights) = panel_nodes(-half_width, half_width, panels);
        nodes
            .iter()
            .zip(&weights)
            .map(|(&t, &w)| {
                let (s, c) = (omega * t).sin_cos();
                Complex64::new(c, -s) * (w * self.eval(t))
            })
            .sum()
    }
}

/// Membership of a signal in the class defined by a weighted spectral norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub r: f64,
    pub sign: WeightSign,
    pub norm_sq: f64,
    /// `‖X(i·)‖`, `f64::INFINITY` when divergent.
    pub norm: f64,
    pub member: bool,
    /// `‖X(i·)‖ ≤ 1`.
    pub unit_ball: bool,
}

impl ClassReport {
    fn finite(r: f64, sign: WeightSign, norm_sq: f64) -> Self {
        let norm = norm_sq.sqrt();
        Self {
            r,
            sign,
            norm_sq,
            norm,
            member: true,
            unit_ball: norm <= 1.0,
        }
    }

    fn divergent(r: f64, sign: WeightSign) -> Self {
        Self {
            r,
            sign,
            norm_sq: f64::INFINITY,
            norm: f64::INFINITY,
            member: false,
            unit_ball: false,
        }
    }
}

/// `∫ e^{−r|ω|} |X(iω)|² dω` and the resulting class membership.
pub fn class_norm(x: &Signal, r: f64) -> Result<ClassReport> {
    class_norm_weighted(x, &WeightedNorm::decaying(r)?)
}

/// Class norm under either weight sign. Poisson signals use the closed form
/// `2/(r + 2a)` (decaying) or `2/(2a − r)` (growing, finite iff `2a > r`);
/// other signals are integrated outward with a tail-growth check.
pub fn class_norm_weighted(x: &Signal, norm: &WeightedNorm) -> Result<ClassReport> {
    check_rate(norm.r)?;
    x.validate()?;
    let r = norm.r;
    if let Signal::Poisson { a } = x {
        return Ok(match norm.sign {
            WeightSign::Decaying => ClassReport::finite(r, norm.sign, 2.0 / (r + 2.0 * a)),
            WeightSign::Growing if 2.0 * a > r => {
                ClassReport::finite(r, norm.sign, 2.0 / (2.0 * a - r))
            }
            WeightSign::Growing => ClassReport::divergent(r, norm.sign),
        });
    }
    let rate = x.spectral_decay_rate();
    let assured = norm.sign == WeightSign::Decaying || 2.0 * rate > r;
    let integrand = |w: f64| norm.weight(w) * x.spectrum(w).norm_sqr();
    Ok(match integrate_line(integrand, 5.0, 800, !assured) {
        LineIntegral::Converged(v) => ClassReport::finite(r, norm.sign, v),
        LineIntegral::Divergent => ClassReport::divergent(r, norm.sign),
    })
}

/// Norm index of the noise spectrum, `‖N(i·)‖_{L_p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum NoiseP {
    One,
    Two,
}

impl NoiseP {
    /// Dual index `q`: `∞` for `p = 1`, `2` for `p = 2`.
    pub fn dual_is_infinite(self) -> bool {
        matches!(self, NoiseP::One)
    }

    pub fn as_u8(self) -> u8 {
        match self {
            NoiseP::One => 1,
            NoiseP::Two => 2,
        }
    }
}

impl TryFrom<u8> for NoiseP {
    type Error = String;
    fn try_from(p: u8) -> std::result::Result<Self, String> {
        match p {
            1 => Ok(NoiseP::One),
            2 => Ok(NoiseP::Two),
            other => Err(format!("p must be 1 or 2, got {other}")),
        }
    }
}

impl From<NoiseP> for u8 {
    fn from(p: NoiseP) -> u8 {
        p.as_u8()
    }
}

impl std::fmt::Display for NoiseP {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Shape of the noise added by [`add_noise`]; amplitude is set by
/// normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpShape {
    pub omega0: f64,
    pub rate: f64,
    pub width: f64,
}

impl Default for ChirpShape {
    fn default() -> Self {
        Self {
            omega0: 40.0,
            rate: 0.5,
            width: 1.0,
        }
    }
}

/// `‖N(i·)‖_{L_p}` on the grid.
pub fn spectrum_lp_norm(signal: &Signal, p: NoiseP, grid: &SpectralGrid) -> f64 {
    match p {
        NoiseP::One => grid.integrate_fn(|w| signal.spectrum(w).norm()),
        NoiseP::Two => grid.integrate_fn(|w| signal.spectrum(w).norm_sqr()).sqrt(),
    }
}

/// Chirp noise scaled so that `‖N(i·)‖_{L_p} = ν` on `grid`.
pub fn noise_component(shape: ChirpShape, nu: f64, p: NoiseP, grid: &SpectralGrid) -> Result<Signal> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::InvalidArgument(format!("nu must be non-negative, got {nu}")));
    }
    let unit = Signal::ChirpNoise {
        omega0: shape.omega0,
        rate: shape.rate,
        width: shape.width,
        amplitude: 1.0,
    };
    unit.validate()?;
    let norm = spectrum_lp_norm(&unit, p, grid);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Unnormalizable);
    }
    Ok(Signal::ChirpNoise {
        omega0: shape.omega0,
        rate: shape.rate,
        width: shape.width,
        amplitude: nu / norm,
    })
}

/// `x = x₀ + η` with `‖N(i·)‖_{L_p} = ν` on the reference grid.
pub fn add_noise(x0: &Signal, shape: ChirpShape, nu: f64, p: NoiseP, grid: &SpectralGrid) -> Result<Signal> {
    let eta = noise_component(shape, nu, p, grid)?;
    Ok(Signal::superposition(vec![(1.0, x0.clone()), (1.0, eta)]))
}
