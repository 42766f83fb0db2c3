//! Polynomials `ψ_d(z)` approximating the periodic exponent `e^{iωT}` (as a
//! function of `ω`, evaluated at `z = iω`) in the space weighted by
//! `e^{-r|ω|}`.
//!
//! Two constructions share one entry point, [`build_psi`]:
//!
//! * [`Method::Taylor`] truncates the series of `e^{Tz}`; it converges in the
//!   weighted norm when `T < r`.
//! * [`Method::Projection`] is the orthogonal projection onto polynomials of
//!   degree `≤ d`, obtained by Gram–Schmidt over monomials with closed-form
//!   moments. It is optimal for every `(T, r)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{Cx, Dd, Precision, Scalar};
use crate::spectral::SpectralGrid;
use crate::weighted::{check_rate, exponential_moment_in, signed_moment_in};

/// Largest Taylor degree before `k!` overflows.
pub const TAYLOR_MAX_DEGREE: usize = 170;
/// Largest projection degree in double precision.
pub const DOUBLE_MAX_DEGREE: usize = 16;
/// Largest projection degree in extended precision.
pub const EXTENDED_MAX_DEGREE: usize = 40;

/// Imaginary parts below this fraction of a coefficient's modulus are
/// rounding residue and get zeroed.
const IMAG_RESIDUE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Taylor,
    Projection,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Taylor => "taylor",
            Method::Projection => "projection",
        })
    }
}

/// `ψ(z) = Σ a_k z^k`, complex coefficients, lowest order first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// `ψ(iω)`.
    pub fn eval_iw(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, a| m.max(a.im.abs()))
    }

    pub fn is_real(&self) -> bool {
        self.max_imag() == 0.0
    }

    /// Coefficients of the same polynomial as a function of real `ω`:
    /// `ψ(iω) = Σ b_k ω^k` with `b_k = a_k i^k`.
    pub fn omega_coeffs(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &a)| a * i_pow(k as i64))
            .collect()
    }
}

/// `i^k` for any integer `k`.
fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Summary of one approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub d: usize,
    pub alpha: f64,
    pub method: Method,
    pub r: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "horizon T must be finite and non-negative, got {horizon}"
        )))
    }
}

/// Truncated Taylor expansion of `e^{Tz}`: `a_k = T^k / k!`.
pub fn taylor_psi(horizon: f64, d: usize) -> Result<Polynomial> {
    check_horizon(horizon)?;
    if d > TAYLOR_MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            requested: d,
            limit: TAYLOR_MAX_DEGREE,
            what: "Taylor factorial range",
        });
    }
    let mut coeffs = Vec::with_capacity(d + 1);
    let mut term = 1.0;
    coeffs.push(Complex64::new(1.0, 0.0));
    for k in 1..=d {
        term *= horizon / k as f64;
        coeffs.push(Complex64::new(term, 0.0));
    }
    Polynomial::new(coeffs)
}

/// Bound `2T^d / r^{d-1}` on the Taylor approximation error.
pub fn taylor_alpha_bound(horizon: f64, r: f64, d: usize) -> f64 {
    2.0 * horizon.powi(d as i32) / r.powi(d as i32 - 1)
}

/// Orthonormal basis (coefficient vectors in `ω`, lowest order first) of
/// polynomials of degree `≤ d` under `⟨p, q⟩ = ∫ p q e^{-r|ω|} dω`.
///
/// Modified Gram–Schmidt with one re-orthogonalization pass, inner products
/// evaluated exactly from the moment sequence.
fn orthonormal_basis_in<S: Scalar>(d: usize, r: f64) -> Result<Vec<Vec<S>>> {
    let moments: Vec<S> = (0..=2 * d).map(|n| signed_moment_in::<S>(n, r)).collect();
    let inner = |p: &[S], q: &[S]| {
        let mut acc = S::zero();
        for (i, &pi) in p.iter().enumerate() {
            for (j, &qj) in q.iter().enumerate() {
                acc = acc + pi * qj * moments[i + j];
            }
        }
        acc
    };
    let floor = 64.0 * (d as f64 + 1.0) * S::epsilon();
    let mut basis: Vec<Vec<S>> = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let mut v = vec![S::zero(); k + 1];
        v[k] = S::one();
        for _pass in 0..2 {
            for b in &basis {
                let c = inner(&v, b);
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = *vi - c * bi;
                }
            }
        }
        let norm_sq = inner(&v, &v);
        let relative = norm_sq.to_f64() / moments[2 * k].to_f64();
        if !(relative > floor) || !relative.is_finite() {
            return Err(Error::SingularGram { degree: k });
        }
        let scale = S::one() / norm_sq.sqrt();
        v.iter_mut().for_each(|x| *x = *x * scale);
        basis.push(v);
    }
    Ok(basis)
}

fn check_projection_degree(d: usize, precision: Precision) -> Result<()> {
    let limit = match precision {
        Precision::Double => DOUBLE_MAX_DEGREE,
        Precision::Extended => EXTENDED_MAX_DEGREE,
    };
    if d > limit {
        return Err(Error::DegreeTooLarge {
            requested: d,
            limit,
            what: match precision {
                Precision::Double => "double-precision projection; use extended precision",
                Precision::Extended => "extended-precision projection",
            },
        });
    }
    Ok(())
}

fn round<S: Scalar>(basis: Vec<Vec<S>>) -> Vec<Vec<f64>> {
    basis
        .into_iter()
        .map(|p| p.into_iter().map(Scalar::to_f64).collect())
        .collect()
}

/// Orthonormal polynomial basis rounded to `f64`.
pub fn orthonormal_basis(d: usize, r: f64, precision: Precision) -> Result<Vec<Vec<f64>>> {
    check_rate(r)?;
    check_projection_degree(d, precision)?;
    Ok(match precision {
        Precision::Double => round(orthonormal_basis_in::<f64>(d, r)?),
        Precision::Extended => round(orthonormal_basis_in::<Dd>(d, r)?),
    })
}

fn gram_deviation_in<S: Scalar>(d: usize, r: f64) -> Result<f64> {
    let basis = orthonormal_basis_in::<S>(d, r)?;
    let moments: Vec<S> = (0..=2 * d).map(|n| signed_moment_in::<S>(n, r)).collect();
    let mut worst = 0.0f64;
    for (i, p) in basis.iter().enumerate() {
        for (j, q) in basis.iter().enumerate() {
            let mut acc = S::zero();
            for (a, &pa) in p.iter().enumerate() {
                for (b, &qb) in q.iter().enumerate() {
                    acc = acc + pa * qb * moments[a + b];
                }
            }
            let target = if i == j { S::one() } else { S::zero() };
            worst = worst.max((acc - target).abs().to_f64());
        }
    }
    Ok(worst)
}

/// `max |G − I|` for the Gram matrix of the constructed basis, computed in
/// the working precision.
pub fn gram_deviation(d: usize, r: f64, precision: Precision) -> Result<f64> {
    check_rate(r)?;
    check_projection_degree(d, precision)?;
    match precision {
        Precision::Double => gram_deviation_in::<f64>(d, r),
        Precision::Extended => gram_deviation_in::<Dd>(d, r),
    }
}

fn projection_in<S: Scalar>(horizon: f64, r: f64, d: usize) -> Result<Vec<Complex64>> {
    let basis = orthonormal_basis_in::<S>(d, r)?;
    let targets: Vec<Cx<S>> = (0..=d)
        .map(|m| exponential_moment_in::<S>(m, r, horizon))
        .collect();
    // ω-coefficients of the projection
    let mut omega_coeffs = vec![Cx::<S>::zero(); d + 1];
    for p in &basis {
        // ⟨e^{iωT}, p⟩ for real p
        let c = p
            .iter()
            .zip(&targets)
            .fold(Cx::<S>::zero(), |acc, (&pm, &e)| acc + e.scale(pm));
        for (b, &pm) in omega_coeffs.iter_mut().zip(p) {
            *b = *b + c.scale(pm);
        }
    }
    Ok(omega_coeffs
        .into_iter()
        .enumerate()
        .map(|(k, b)| {
            let a = b.to_c64() * i_pow(-(k as i64));
            if a.im.abs() <= IMAG_RESIDUE * a.norm() {
                Complex64::new(a.re, 0.0)
            } else {
                a
            }
        })
        .collect())
}

/// Orthogonal projection of `e^{iωT}` onto polynomials of degree `≤ d` in
/// the space weighted by `e^{-r|ω|}`, expressed in powers of `z = iω`.
pub fn projection_psi(horizon: f64, r: f64, d: usize, precision: Precision) -> Result<Polynomial> {
    check_horizon(horizon)?;
    check_rate(r)?;
    check_projection_degree(d, precision)?;
    if horizon == 0.0 {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        return Polynomial::new(coeffs);
    }
    let coeffs = match precision {
        Precision::Double => projection_in::<f64>(horizon, r, d)?,
        Precision::Extended => projection_in::<Dd>(horizon, r, d)?,
    };
    Polynomial::new(coeffs)
}

/// Construct `ψ_d` by the selected method.
pub fn build_psi(
    method: Method,
    horizon: f64,
    r: f64,
    d: usize,
    precision: Precision,
) -> Result<Polynomial> {
    match method {
        Method::Taylor => taylor_psi(horizon, d),
        Method::Projection => projection_psi(horizon, r, d, precision),
    }
}

/// `α = ∫ e^{-r|ω|} |ψ(iω) − e^{iωT}|² dω` by grid quadrature.
pub fn alpha_of(psi: &Polynomial, horizon: f64, r: f64, grid: &SpectralGrid) -> f64 {
    grid.integrate_fn(|w| {
        let diff = psi.eval_iw(w) - Complex64::new(0.0, w * horizon).exp();
        (-r * w.abs()).exp() * diff.norm_sqr()
    })
}

/// `α` expanded through moments and evaluated in double-double:
/// `M_0 − 2 Re Σ conj(b_k) E_k + Σ conj(b_j) b_k M_{j+k}` with `b` the
/// `ω`-coefficients of `ψ`.
pub fn alpha_closed_form(psi: &Polynomial, horizon: f64, r: f64) -> Result<f64> {
    check_rate(r)?;
    let b: Vec<Cx<Dd>> = psi.omega_coeffs().into_iter().map(Cx::from_c64).collect();
    let d = b.len() - 1;
    let moments: Vec<Dd> = (0..=2 * d).map(|n| signed_moment_in(n, r)).collect();
    let mut acc = moments[0];
    for (k, bk) in b.iter().enumerate() {
        let e = exponential_moment_in::<Dd>(k, r, horizon);
        acc = acc - Dd::from(2.0) * (bk.re * e.re + bk.im * e.im);
    }
    for (j, bj) in b.iter().enumerate() {
        for (k, bk) in b.iter().enumerate() {
            acc = acc + (bj.re * bk.re + bj.im * bk.im) * moments[j + k];
        }
    }
    Ok(acc.to_f64().max(0.0))
}

/// Build `ψ_d` and report its closed-form approximation error.
pub fn approximate(
    method: Method,
    horizon: f64,
    r: f64,
    d: usize,
    precision: Precision,
) -> Result<(Polynomial, ApproxReport)> {
    let psi = build_psi(method, horizon, r, d, precision)?;
    let alpha = alpha_closed_form(&psi, horizon, r)?;
    Ok((
        psi,
        ApproxReport {
            d,
            alpha,
            method,
            r,
            horizon,
        },
    ))
}
