//! Limited-memory predicting kernels `ĥ_d(t) = Σ a_k h⁽ᵏ⁾(t − T)`, the
//! anticausal target `y = h ∗ x`, causal predictions `ŷ_d = ĥ_d ∗ x`, and
//! the error and noise bounds.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{TargetKernel, D_MAX};
use crate::polynomials::{alpha_closed_form, Method, Polynomial};
use crate::signals::{NoiseP, Signal, TimeSignal};
use crate::precision::{Cx, Dd, Scalar};
use crate::spectral::{graded_nodes_dd, panel_nodes, SpectralGrid, TimeGrid, TransformTable};
use crate::weighted::{check_rate, integrate_line, LineIntegral};

/// Panels over the target support `[−T, θ]`.
pub const TARGET_PANELS: usize = 64;
/// Default absolute quadrature budget for predictions and targets.
pub const EPS_QUAD: f64 = 1e-10;

/// Quadrature over the memory window `[0, τ]`, graded toward both ends of
/// every smooth piece of the kernel, where the derivative lobes of `ĥ_d` sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagRule {
    pub levels: usize,
    pub per_level: usize,
}

impl LagRule {
    /// Default rule for a predictor of degree `d`. Converged to the
    /// double-double floor, which is below `1e-15` relative for `d ≤ 12`
    /// and rises to `~1e-12` at `d = 14` and `~1e-8` at `d = 16` as
    /// `∫|ĥ_d|` approaches `1e23`.
    pub fn for_degree(d: usize) -> Self {
        Self {
            levels: 10,
            per_level: 2 + d / 3,
        }
    }

    /// Same grading with twice the panels per level.
    pub fn refined(self) -> Self {
        Self {
            levels: self.levels,
            per_level: 2 * self.per_level,
        }
    }

    fn nodes(&self, h: &TargetKernel) -> (Vec<Dd>, Vec<Dd>) {
        let lag = |t: f64| Dd::new(t) + Dd::new(h.horizon());
        let mut cuts = vec![Dd::new(0.0)];
        cuts.extend(h.breakpoints().into_iter().map(lag));
        cuts.push(Dd::new(h.horizon()) + Dd::new(h.theta()));
        let (mut nodes, mut weights) = (Vec::new(), Vec::new());
        for pair in cuts.windows(2) {
            let (n, w) = graded_nodes_dd(pair[0], pair[1], self.levels, self.per_level.max(1));
            nodes.extend(n);
            weights.extend(w);
        }
        (nodes, weights)
    }
}

/// Assembled predictor. Immutable; `ĥ_d` is tabulated once on the lag rule.
///
/// For the bump, `ĥ_d` has narrow lobes near both ends of its support whose
/// height grows roughly like `(2d)!`; at `d = 10` they reach `~1e14` while
/// the kernel integrates to one. The tabulation, the lag rule and the
/// convolution sum are therefore carried out in double-double.
#[derive(Debug, Clone)]
pub struct PredictorKernel {
    h: TargetKernel,
    psi: Polynomial,
    d: usize,
    tau: f64,
    lags: Vec<Dd>,
    lag_weights: Vec<Cx<Dd>>,
    offsets: Vec<f64>,
    target_weights: Vec<f64>,
}

pub fn build_predictor(h: TargetKernel, psi: Polynomial) -> Result<PredictorKernel> {
    let d = psi.degree();
    build_predictor_with_rule(h, psi, LagRule::for_degree(d))
}

/// As [`build_predictor`] with an explicit lag rule, for budget checks.
pub fn build_predictor_with_rule(h: TargetKernel, psi: Polynomial, rule: LagRule) -> Result<PredictorKernel> {
    let d = psi.degree();
    if d > D_MAX {
        return Err(Error::DegreeTooLarge {
            requested: d,
            limit: D_MAX,
            what: "kernel derivatives",
        });
    }
    let tau = h.memory();
    let coeffs = dd_coeffs(&psi);
    let (lags, weights) = rule.nodes(&h);
    let mut lag_weights = Vec::with_capacity(lags.len());
    for (&u, &w) in lags.iter().zip(&weights) {
        let v = kernel_at_dd(&h, &coeffs, u);
        if !(v.re.to_f64().is_finite() && v.im.to_f64().is_finite()) {
            return Err(Error::NonFinite { at: u.to_f64() });
        }
        lag_weights.push(v.scale(w));
    }
    let (lo, hi) = h.support();
    let (offsets, weights) = panel_nodes(lo, hi, TARGET_PANELS);
    let target_weights = offsets
        .iter()
        .zip(&weights)
        .map(|(&v, &w)| w * h.value(v))
        .collect();
    Ok(PredictorKernel {
        h,
        psi,
        d,
        tau,
        lags,
        lag_weights,
        offsets,
        target_weights,
    })
}

fn dd_coeffs(psi: &Polynomial) -> Vec<Cx<Dd>> {
    psi.coeffs().iter().map(|&a| Cx::from_c64(a)).collect()
}

fn kernel_at_dd(h: &TargetKernel, coeffs: &[Cx<Dd>], t: Dd) -> Cx<Dd> {
    let derivs = h.derivatives_dd(coeffs.len() - 1, t - Dd::new(h.horizon()));
    coeffs
        .iter()
        .zip(derivs)
        .fold(Cx::zero(), |acc, (&a, v)| acc + a.scale(v))
}

impl PredictorKernel {
    pub fn kernel(&self) -> &TargetKernel {
        &self.h
    }

    pub fn psi(&self) -> &Polynomial {
        &self.psi
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Memory length `τ = T + θ`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Lags `u` at which [`predict`](Self::predict) samples `x(t − u)`; all
    /// lie strictly inside `(0, τ)`.
    pub fn lags(&self) -> Vec<f64> {
        self.lags.iter().map(|u| u.to_f64()).collect()
    }

    /// `ĥ_d(t)`, zero outside `[0, τ]`.
    pub fn value(&self, t: f64) -> Complex64 {
        self.value_dd(Dd::new(t)).to_c64()
    }

    /// `ĥ_d(t)` in double-double.
    pub fn value_dd(&self, t: Dd) -> Cx<Dd> {
        if t < Dd::new(0.0) || t > Dd::new(self.tau) {
            return Cx::zero();
        }
        kernel_at_dd(&self.h, &dd_coeffs(&self.psi), t)
    }

    /// `ψ_d(iω) Q(iω)`, the transfer function on the imaginary axis.
    pub fn transfer(&self, omega: f64) -> Result<Complex64> {
        let q = self.h.q_table(omega.abs())?.fourier(omega);
        Ok(self.psi.eval_iw(omega) * q)
    }

    /// `∫_0^τ e^{−iωt} ĥ_d(t) dt` from the time-domain kernel, in
    /// double-double on the given lag rule.
    pub fn time_domain_transform(&self, omega: f64, rule: LagRule) -> Complex64 {
        let coeffs = dd_coeffs(&self.psi);
        let (nodes, weights) = rule.nodes(&self.h);
        let w = Dd::new(omega);
        nodes
            .iter()
            .zip(&weights)
            .fold(Cx::<Dd>::zero(), |acc, (&t, &q)| {
                let (s, c) = (w * t).sin_cos();
                acc + kernel_at_dd(&self.h, &coeffs, t).scale(q) * Cx::new(c, -s)
            })
            .to_c64()
    }

    /// `ŷ_d(t) = Re ∫_0^τ ĥ_d(u) x(t − u) du`. Only `x(s)` with
    /// `t − τ < s < t` is read.
    pub fn predict<S: TimeSignal + ?Sized>(&self, x: &S, t: f64) -> f64 {
        let t = Dd::new(t);
        self.lags
            .iter()
            .zip(&self.lag_weights)
            .fold(Cx::<Dd>::zero(), |acc, (&u, &c)| acc + c.scale(x.eval_dd(t - u)))
            .re
            .to_f64()
    }

    /// `y(t) = ∫_{−T}^{θ} h(v) x(t − v) dv`.
    pub fn target<S: TimeSignal + ?Sized>(&self, x: &S, t: f64) -> f64 {
        self.offsets
            .iter()
            .zip(&self.target_weights)
            .map(|(&v, &w)| w * x.eval(t - v))
            .sum()
    }

    /// `sup_t |y(t) − ŷ_d(t)|` over the grid.
    pub fn sup_error<S: TimeSignal + ?Sized>(&self, x: &S, grid: &TimeGrid) -> f64 {
        grid.nodes
            .iter()
            .map(|&t| (self.target(x, t) - self.predict(x, t)).abs())
            .fold(0.0, f64::max)
    }
}

/// `y(t) = ∫_{t−θ}^{t+T} h(t − s) x(s) ds`.
pub fn target<S: TimeSignal + ?Sized>(h: &TargetKernel, x: &S, t: f64) -> f64 {
    let (lo, hi) = h.support();
    let (offsets, weights) = panel_nodes(lo, hi, TARGET_PANELS);
    offsets
        .iter()
        .zip(&weights)
        .map(|(&v, &w)| w * h.value(v) * x.eval(t - v))
        .sum()
}

pub fn predict<S: TimeSignal + ?Sized>(pk: &PredictorKernel, x: &S, t: f64) -> f64 {
    pk.predict(x, t)
}

/// Components of `(1/2π)√(α_d β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    pub alpha: f64,
    pub beta: f64,
    pub bound: f64,
}

/// `Q(iω)` from tables sized per frequency band, built on first use.
struct QBands<'a> {
    h: &'a TargetKernel,
    tables: Vec<OnceLock<Result<TransformTable>>>,
}

impl<'a> QBands<'a> {
    const BASE: f64 = 64.0;

    fn new(h: &'a TargetKernel) -> Self {
        Self {
            h,
            tables: (0..12).map(|_| OnceLock::new()).collect(),
        }
    }

    fn at(&self, omega: f64) -> Result<Complex64> {
        let w = omega.abs();
        let band = if w <= Self::BASE {
            0
        } else {
            ((w / Self::BASE).log2().ceil() as usize).min(self.tables.len() - 1)
        };
        let limit = Self::BASE * (1u64 << band) as f64;
        let table = self.tables[band].get_or_init(|| self.h.q_table(limit));
        Ok(table.as_ref().map_err(Clone::clone)?.fourier(omega))
    }
}

/// `β = ∫ e^{r|ω|} |Q(iω) X(iω)|² dω`.
///
/// Divergence is detected by a tail-growth check, which is skipped when the
/// spectral decay rate `ρ` of `x` already guarantees convergence (`2ρ > r`).
pub fn beta(h: &TargetKernel, x: &Signal, r: f64) -> Result<f64> {
    check_rate(r)?;
    x.validate()?;
    let bands = QBands::new(h);
    let failure: OnceLock<Error> = OnceLock::new();
    let integrand = |w: f64| {
        let x_w = x.spectrum(w);
        if x_w.norm_sqr() == 0.0 {
            return 0.0;
        }
        match bands.at(w) {
            Ok(q) => (r * w.abs()).exp() * (q * x_w).norm_sqr(),
            Err(e) => {
                let _ = failure.set(e);
                f64::NAN
            }
        }
    };
    let assured = 2.0 * x.spectral_decay_rate() > r;
    let outcome = integrate_line(integrand, 5.0, 800, !assured);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    match outcome {
        LineIntegral::Converged(v) => Ok(v),
        LineIntegral::Divergent => Err(Error::SignalOutsideClass(format!(
            "weighted energy of Q·X diverges under e^{{{r}|ω|}}; the signal is not in the class for r = {r}"
        ))),
    }
}

/// `(1/2π)√(α_d β)` with `α_d` in closed form.
pub fn error_bound_parts(pk: &PredictorKernel, x: &Signal, r: f64) -> Result<ErrorBound> {
    let alpha = alpha_closed_form(&pk.psi, pk.h.horizon(), r)?;
    let beta = beta(&pk.h, x, r)?;
    Ok(ErrorBound {
        alpha,
        beta,
        bound: (alpha * beta).sqrt() / (2.0 * PI),
    })
}

pub fn error_bound(pk: &PredictorKernel, x: &Signal, r: f64) -> Result<f64> {
    Ok(error_bound_parts(pk, x, r)?.bound)
}

/// `‖ψ_d Q‖_{L_q}` and `‖H‖_{L_q}` on the grid (`|H| = |Q|`).
pub fn transfer_norms(pk: &PredictorKernel, p: NoiseP, grid: &SpectralGrid) -> Result<(f64, f64)> {
    let table = pk.h.q_table(grid.omega_max)?;
    let (hat, plain): (Vec<f64>, Vec<f64>) = grid
        .nodes
        .iter()
        .map(|&w| {
            let q = table.fourier(w).norm();
            (pk.psi.eval_iw(w).norm() * q, q)
        })
        .unzip();
    let norm = |v: &[f64]| {
        if p.dual_is_infinite() {
            v.iter().copied().fold(0.0, f64::max)
        } else {
            let sq: Vec<f64> = v.iter().map(|a| a * a).collect();
            grid.integrate(&sq).sqrt()
        }
    };
    Ok((norm(&hat), norm(&plain)))
}

/// `(ν/2π)(‖Ĥ_d(i·)‖_{L_q} + ‖H(i·)‖_{L_q})` with `q` dual to `p`.
pub fn noise_bound(pk: &PredictorKernel, nu: f64, p: NoiseP, grid: &SpectralGrid) -> Result<f64> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::InvalidArgument(format!("nu must be non-negative, got {nu}")));
    }
    let (hat, plain) = transfer_norms(pk, p, grid)?;
    Ok(nu * (hat + plain) / (2.0 * PI))
}

/// Empirical and bounded error of a prediction from `x₀ + η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub nu: f64,
    pub p: NoiseP,
    /// `E_d`: sup error on the clean signal.
    pub base_error: f64,
    /// `E_{η,d}`: sup error on the noise alone.
    pub noise_error: f64,
    /// sup error on `x₀ + η`.
    pub total_error: f64,
    /// Noise bound per unit `ν`.
    pub bound_slope: f64,
    /// Clean-signal bound `ε`.
    pub epsilon: f64,
    /// `ε + ν · bound_slope`.
    pub bound_total: f64,
}

impl NoiseReport {
    pub fn noise_within_bound(&self, budget: f64) -> bool {
        self.noise_error <= self.nu * self.bound_slope + budget
    }

    pub fn total_within_bound(&self, budget: f64) -> bool {
        self.total_error <= self.bound_total + budget
    }
}

/// Noise intensity, norm index and the grid on which `ν` is measured.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSetting<'a> {
    pub nu: f64,
    pub p: NoiseP,
    pub grid: &'a SpectralGrid,
}

/// Sup errors on `x₀`, `η` and `x₀ + η` against the bounds, with `epsilon`
/// the clean-signal bound for `x₀`.
pub fn empirical_noise_error(
    pk: &PredictorKernel,
    x0: &Signal,
    eta: &Signal,
    tgrid: &TimeGrid,
    setting: NoiseSetting<'_>,
    epsilon: f64,
) -> Result<NoiseReport> {
    let bound_slope = noise_bound(pk, 1.0, setting.p, setting.grid)?;
    let noisy = Signal::superposition(vec![(1.0, x0.clone()), (1.0, eta.clone())]);
    Ok(NoiseReport {
        nu: setting.nu,
        p: setting.p,
        base_error: pk.sup_error(x0, tgrid),
        noise_error: pk.sup_error(eta, tgrid),
        total_error: pk.sup_error(&noisy, tgrid),
        bound_slope,
        epsilon,
        bound_total: epsilon + setting.nu * bound_slope,
    })
}

/// Target and prediction over a time grid with the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionResult {
    pub grid: TimeGrid,
    pub y: Vec<f64>,
    pub y_hat: Vec<f64>,
    pub sup_error: f64,
    pub bound: f64,
    pub alpha: f64,
    pub beta: f64,
    pub d: usize,
    pub method: Option<Method>,
}

/// Fields of the JSON summary written next to a prediction CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSummary {
    pub sup_error: f64,
    pub bound: f64,
    pub alpha: f64,
    pub beta: f64,
    pub d: usize,
    pub method: Option<Method>,
}

/// Scientific notation with 17 significant digits.
pub fn format_sci(v: f64) -> String {
    format!("{v:.16e}")
}

impl PredictionResult {
    /// Evaluates the target and prediction on each grid point (`y` and
    /// `y_hat` are computed from separate quadratures).
    pub fn compute(pk: &PredictorKernel, x: &Signal, grid: &TimeGrid, r: f64) -> Result<Self> {
        let parts = error_bound_parts(pk, x, r)?;
        let y: Vec<f64> = grid.nodes.iter().map(|&t| pk.target(x, t)).collect();
        let y_hat: Vec<f64> = grid.nodes.iter().map(|&t| pk.predict(x, t)).collect();
        Ok(Self::assemble(grid.clone(), y, y_hat, parts, pk.degree()))
    }

    pub fn assemble(grid: TimeGrid, y: Vec<f64>, y_hat: Vec<f64>, parts: ErrorBound, d: usize) -> Self {
        let sup_error = y
            .iter()
            .zip(&y_hat)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Self {
            grid,
            y,
            y_hat,
            sup_error,
            bound: parts.bound,
            alpha: parts.alpha,
            beta: parts.beta,
            d,
            method: None,
        }
    }

    pub fn summary(&self) -> PredictionSummary {
        PredictionSummary {
            sup_error: self.sup_error,
            bound: self.bound,
            alpha: self.alpha,
            beta: self.beta,
            d: self.d,
            method: self.method,
        }
    }

    /// CSV with header `t,y,y_hat,abs_err`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,y,y_hat,abs_err")?;
        for ((&t, &y), &y_hat) in self.grid.nodes.iter().zip(&self.y).zip(&self.y_hat) {
            writeln!(
                out,
                "{},{},{},{}",
                format_sci(t),
                format_sci(y),
                format_sci(y_hat),
                format_sci((y - y_hat).abs())
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::bump_kernel;
    use crate::polynomials::{projection_psi, taylor_psi};
    use crate::precision::Precision;
    use crate::signals::{poisson_signal, ChirpShape};
    use crate::oracle::adaptive_simpson;
    use std::cell::RefCell;

    fn canonical(d: usize) -> PredictorKernel {
        let h = bump_kernel(0.5, 0.1).unwrap();
        build_predictor(h, taylor_psi(0.5, d).unwrap()).unwrap()
    }

    #[test]
    fn support_and_delay() {
        let pk = canonical(6);
        assert_eq!(pk.value(-0.01), Complex64::new(0.0, 0.0));
        assert_eq!(pk.value(0.61), Complex64::new(0.0, 0.0));
        assert!((pk.tau() - 0.6).abs() < 1e-15);
        let h = bump_kernel(0.5, 0.1).unwrap();
        let pk0 = build_predictor(h.clone(), Polynomial::one()).unwrap();
        for &t in &[0.05, 0.3, 0.55] {
            assert!((pk0.value(t).re - h.value(t - 0.5)).abs() <= 1e-13 * h.value(t - 0.5));
        }
        // d = 0 predicts y(t − T)
        let x = poisson_signal(1.5).unwrap();
        for &t in &[-1.0, 0.0, 0.7] {
            let delayed = pk0.target(&x, t - 0.5);
            assert!((pk0.predict(&x, t) - delayed).abs() < 1e-13);
        }
        assert!(build_predictor(h, taylor_psi(0.5, D_MAX + 1).unwrap()).is_err());
    }

    #[test]
    fn zero_signal() {
        let pk = canonical(4);
        assert_eq!(pk.predict(&Signal::Zero, 0.3), 0.0);
        assert_eq!(pk.target(&Signal::Zero, 0.3), 0.0);
    }

    #[test]
    fn target_matches_adaptive_oracle() {
        let h = bump_kernel(0.5, 0.1).unwrap();
        let x = poisson_signal(1.5).unwrap();
        let oracle = adaptive_simpson(&|v| h.value(v) * x.eval(-v), -0.5, 0.1, 1e-13);
        assert!((target(&h, &x, 0.0) - oracle).abs() < 1e-9);
        assert!((canonical(3).target(&x, 0.0) - oracle).abs() < 1e-9);
    }

    #[test]
    fn transfer_identity() {
        let pk = canonical(10);
        for &w in &[0.0, 1.0, 3.0] {
            let td = pk.time_domain_transform(w, LagRule::for_degree(10).refined());
            let fd = pk.transfer(w).unwrap();
            assert!((td - fd).norm() <= 1e-8 * fd.norm(), "w={w}: {td} vs {fd}");
        }
    }

    #[test]
    fn predict_reads_only_the_past() {
        let pk = canonical(10);
        let seen = RefCell::new(Vec::new());
        let probe = |s: f64| {
            seen.borrow_mut().push(s);
            (-s * s).exp()
        };
        let t = 0.37;
        pk.predict(&probe, t);
        let seen = seen.into_inner();
        assert!(!seen.is_empty());
        assert!(seen.iter().all(|&s| s < t && s > t - pk.tau()));
    }

    #[test]
    fn bound_holds_and_shrinks() {
        let x = poisson_signal(1.5).unwrap();
        let grid = TimeGrid::new(-2.0, 2.0, 41).unwrap();
        let b6 = error_bound(&canonical(6), &x, 2.0).unwrap();
        let b8 = error_bound(&canonical(8), &x, 2.0).unwrap();
        assert!(b6 > 0.0 && b6.is_finite());
        assert!(b8 <= 0.5 * b6);
        let pk = canonical(10);
        let res = PredictionResult::compute(&pk, &x, &grid, 2.0).unwrap();
        assert!(res.sup_error <= res.bound * (1.0 + 1e-6) + 1e-8, "{} > {}", res.sup_error, res.bound);
    }

    #[test]
    fn degenerate_horizon_has_zero_bound() {
        let h = bump_kernel(0.0, 0.4).unwrap();
        let pk = build_predictor(h, Polynomial::one()).unwrap();
        assert_eq!(error_bound(&pk, &poisson_signal(1.5).unwrap(), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn beta_gate() {
        let h = bump_kernel(0.5, 0.1).unwrap();
        let b = beta(&h, &poisson_signal(1.5).unwrap(), 2.0).unwrap();
        assert!(b > 0.0 && b.is_finite());
        let err = beta(&h, &poisson_signal(0.9).unwrap(), 2.0);
        assert!(matches!(err, Err(Error::SignalOutsideClass(_))));
        // β ≤ sup|Q|² · ‖X‖² under the growing weight, sup|Q| = |Q(0)| = 1
        assert!(b <= 2.0 / (3.0 - 2.0) + 1e-12);
    }

    #[test]
    fn noise_bounds() {
        let grid = SpectralGrid::new(100.0, 4096).unwrap();
        let pk4 = canonical(4);
        let pk10 = canonical(10);
        for p in [NoiseP::One, NoiseP::Two] {
            assert_eq!(noise_bound(&pk4, 0.0, p, &grid).unwrap(), 0.0);
            let one = noise_bound(&pk4, 0.1, p, &grid).unwrap();
            assert_eq!(noise_bound(&pk4, 0.2, p, &grid).unwrap(), 2.0 * one);
            assert!(noise_bound(&pk10, 0.1, p, &grid).unwrap() > one);
        }
        let x0 = poisson_signal(1.5).unwrap();
        let tgrid = TimeGrid::new(-2.0, 2.0, 41).unwrap();
        let eps = error_bound(&pk10, &x0, 2.0).unwrap();
        let shape = ChirpShape::default();
        let eta = crate::signals::noise_component(shape, 0.1, NoiseP::Two, &grid).unwrap();
        let setting = NoiseSetting { nu: 0.1, p: NoiseP::Two, grid: &grid };
        let rep = empirical_noise_error(&pk10, &x0, &eta, &tgrid, setting, eps).unwrap();
        assert!(rep.noise_within_bound(1e-8) && rep.total_within_bound(1e-8), "{rep:?}");
        let eta2 = crate::signals::noise_component(shape, 0.2, NoiseP::Two, &grid).unwrap();
        let rep2 = empirical_noise_error(&pk10, &x0, &eta2, &tgrid, setting, eps).unwrap();
        assert!((rep2.noise_error - 2.0 * rep.noise_error).abs() <= 1e-12 * rep2.noise_error);
        let quiet = empirical_noise_error(&pk10, &x0, &Signal::Zero, &tgrid, setting, eps).unwrap();
        assert_eq!(quiet.noise_error, 0.0);
    }

    #[test]
    fn projection_predictor_beats_delay() {
        let x = poisson_signal(1.5).unwrap();
        let grid = TimeGrid::new(-2.0, 2.0, 41).unwrap();
        let h = bump_kernel(0.5, 0.1).unwrap();
        let e = |d| {
            let psi = projection_psi(0.5, 2.0, d, Precision::Double).unwrap();
            build_predictor(h.clone(), psi).unwrap().sup_error(&x, &grid)
        };
        assert!(e(10) < e(2) / 10.0);
    }

    #[test]
    fn csv_layout() {
        let x = poisson_signal(1.5).unwrap();
        let grid = TimeGrid::new(-1.0, 1.0, 3).unwrap();
        let res = PredictionResult::compute(&canonical(2), &x, &grid, 2.0).unwrap();
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,y,y_hat,abs_err");
        assert!(lines[1].starts_with("-1.0000000000000000e0,"));
        assert_eq!(format_sci(0.1), "1.0000000000000001e-1");
    }
}
