//! Quadrature rules, frequency/time grids, and Fourier/Laplace evaluation of
//! compactly supported functions.
//!
//! Sign convention throughout the crate: the forward transform is
//! `F(iω) = ∫ e^{-iωt} f(t) dt`; the inverse carries the `1/2π` factor.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::Dd;

/// Nodes per Gauss–Legendre panel.
pub const PANEL_DEGREE: usize = 16;

/// Minimum number of panels for any time-domain transform.
const MIN_PANELS: usize = 32;
/// Panels per unit support length, before the oscillation allowance.
const PANELS_PER_UNIT: f64 = 24.0;

/// Reference Gauss–Legendre nodes and weights on `[-1, 1]`, sorted ascending.
pub fn reference_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let degree = NonZeroUsize::new(PANEL_DEGREE).expect("nonzero degree");
        let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(degree)
            .into_node_weight_pairs()
            .into_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Symmetrize so mirrored panels produce mirrored nodes bit-for-bit.
        let n = pairs.len();
        for k in 0..n / 2 {
            let x = 0.5 * (pairs[n - 1 - k].0 - pairs[k].0);
            let w = 0.5 * (pairs[n - 1 - k].1 + pairs[k].1);
            pairs[k] = (-x, w);
            pairs[n - 1 - k] = (x, w);
        }
        pairs
    })
}

/// Composite Gauss–Legendre nodes and weights on `[a, b]` with `panels`
/// equal-width panels.
pub fn panel_nodes(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = reference_rule();
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * rule.len());
    let mut weights = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let lo = a + width * p as f64;
        let mid = lo + 0.5 * width;
        for &(x, w) in rule {
            nodes.push(mid + 0.5 * width * x);
            weights.push(0.5 * width * w);
        }
    }
    (nodes, weights)
}

fn legendre_dd(n: usize, x: Dd) -> (Dd, Dd) {
    let one = Dd::new(1.0);
    let (mut prev, mut cur) = (one, x);
    for k in 1..n {
        let kf = k as f64;
        let next = (Dd::new(2.0 * kf + 1.0) * x * cur - Dd::new(kf) * prev) / Dd::new(kf + 1.0);
        prev = cur;
        cur = next;
    }
    let deriv = Dd::new(n as f64) * (x * cur - prev) / (x * x - one);
    (cur, deriv)
}

/// [`reference_rule`] refined to double-double by Newton steps on `P_16`.
pub fn reference_rule_dd() -> &'static [(Dd, Dd)] {
    static RULE: OnceLock<Vec<(Dd, Dd)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = reference_rule();
        let n = rule.len();
        let mut pairs: Vec<(Dd, Dd)> = rule[n / 2..]
            .iter()
            .map(|&(x0, _)| {
                let mut x = Dd::new(x0);
                for _ in 0..3 {
                    let (p, dp) = legendre_dd(n, x);
                    x = x - p / dp;
                }
                let (_, dp) = legendre_dd(n, x);
                let w = Dd::new(2.0) / ((Dd::new(1.0) - x * x) * dp * dp);
                (x, w)
            })
            .collect();
        let mirrored: Vec<(Dd, Dd)> = pairs.iter().rev().map(|&(x, w)| (-x, w)).collect();
        pairs.splice(0..0, mirrored);
        pairs
    })
}

/// Double-double composite Gauss–Legendre nodes and weights on `[a, b]`.
pub fn panel_nodes_dd(a: Dd, b: Dd, panels: usize) -> (Vec<Dd>, Vec<Dd>) {
    let rule = reference_rule_dd();
    let panels = panels.max(1);
    let half = (b - a) / Dd::new(2.0 * panels as f64);
    let mut nodes = Vec::with_capacity(panels * rule.len());
    let mut weights = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let mid = a + half * Dd::new((2 * p + 1) as f64);
        for &(x, w) in rule {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    (nodes, weights)
}

/// Gauss–Legendre nodes on `[a, b]` graded geometrically toward both ends.
///
/// Each end carries `levels` intervals whose widths halve toward the
/// endpoint, starting from a quarter of the length, with `per_level` panels
/// in each; the middle half gets `2 · per_level` panels. Suited to integrands
/// with essential singularities at the endpoints, where uniform panels only
/// converge sub-exponentially.
pub fn graded_nodes_dd(a: Dd, b: Dd, levels: usize, per_level: usize) -> (Vec<Dd>, Vec<Dd>) {
    let len = b - a;
    let quarter = len / Dd::new(4.0);
    let mut cuts = vec![Dd::new(0.0)];
    for j in (0..levels).rev() {
        cuts.push(quarter / Dd::new(2f64.powi(j as i32)));
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut push = |lo: Dd, hi: Dd, panels: usize| {
        let (n, w) = panel_nodes_dd(lo, hi, panels);
        nodes.extend(n);
        weights.extend(w);
    };
    for pair in cuts.windows(2) {
        push(a + pair[0], a + pair[1], per_level);
    }
    push(a + quarter, b - quarter, 2 * per_level);
    for pair in cuts.windows(2).rev() {
        push(b - pair[1], b - pair[0], per_level);
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre integral of a real function.
pub fn integrate<F>(f: F, a: f64, b: f64, panels: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let (nodes, weights) = panel_nodes(a, b, panels);
    nodes.iter().zip(&weights).map(|(&t, &w)| w * f(t)).sum()
}

/// Composite Gauss–Legendre integral of a complex function.
pub fn integrate_complex<F>(f: F, a: f64, b: f64, panels: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let (nodes, weights) = panel_nodes(a, b, panels);
    nodes.iter().zip(&weights).map(|(&t, &w)| f(t) * w).sum()
}

/// Panel count for a transform over a support of length `len` resolving
/// frequencies up to `omega_max`.
pub fn panels_for(len: f64, omega_max: f64) -> usize {
    let oscillation = len * omega_max.abs() / PI;
    let base = len * PANELS_PER_UNIT;
    (MIN_PANELS as f64).max((base + oscillation).ceil()) as usize
}

fn check_support(a: f64, b: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() || b < a {
        return Err(Error::UnboundedSupport { a, b });
    }
    Ok(())
}

/// Symmetric truncated frequency grid with composite Gauss–Legendre weights.
///
/// The grid covers `[-omega_max, omega_max]` with `n_points / 16` panels of
/// equal width, half on each side of zero, so `ω = 0` is always a panel edge
/// (integrands involving `|ω|` are smooth on every panel).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub omega_max: f64,
    pub n_points: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Serializable description of a [`SpectralGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub omega_max: f64,
    pub n_points: usize,
}

impl SpectralGrid {
    /// `n_points` must be a positive multiple of 32 (an even number of
    /// 16-node panels).
    pub fn new(omega_max: f64, n_points: usize) -> Result<Self> {
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "omega_max must be positive and finite, got {omega_max}"
            )));
        }
        let block = 2 * PANEL_DEGREE;
        if n_points == 0 || !n_points.is_multiple_of(block) {
            return Err(Error::InvalidArgument(format!(
                "n_points must be a positive multiple of {block}, got {n_points}"
            )));
        }
        let half_panels = n_points / block;
        let (right_nodes, right_weights) = panel_nodes(0.0, omega_max, half_panels);
        let mut nodes: Vec<f64> = right_nodes.iter().rev().map(|w| -w).collect();
        nodes.extend_from_slice(&right_nodes);
        let mut weights: Vec<f64> = right_weights.iter().rev().copied().collect();
        weights.extend_from_slice(&right_weights);
        Ok(Self {
            omega_max,
            n_points,
            nodes,
            weights,
        })
    }

    pub fn from_spec(spec: GridSpec) -> Result<Self> {
        Self::new(spec.omega_max, spec.n_points)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            omega_max: self.omega_max,
            n_points: self.n_points,
        }
    }

    /// Default truncation for weight `e^{-r|ω|}`: `e^{-r·omega_max} < 1e-16`.
    pub fn for_decay(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
        }
        let omega_max = 16.0 * std::f64::consts::LN_10 / r + 1.0;
        Self::new(omega_max, 1024)
    }

    /// Truncation adequate for `∫ e^{-r|ω|} |p(ω)|² dω` with `deg p ≤ degree`:
    /// the envelope `ω^{2·degree} e^{-rω}` is below `1e-18` of its peak.
    pub fn for_polynomial(r: f64, degree: usize) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
        }
        let m = 2.0 * degree as f64;
        let log_env = |w: f64| if m == 0.0 { -r * w } else { m * w.ln() - r * w };
        let peak = if m == 0.0 { 0.0 } else { log_env(m / r) };
        let mut omega = (m / r).max(1.0);
        while log_env(omega) - peak > -18.0 * std::f64::consts::LN_10 {
            omega *= 1.1;
        }
        let panels_per_side = ((omega * r).ceil() as usize).max(64);
        Self::new(omega, 2 * PANEL_DEGREE * panels_per_side)
    }

    /// Quadrature of sampled values over the grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&w, &q)| q * f(w))
            .sum()
    }
}

/// Uniform time grid with `n_points` nodes on `[t_min, t_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
    pub nodes: Vec<f64>,
}

/// Serializable description of a [`TimeGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, n_points: usize) -> Result<Self> {
        if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
            return Err(Error::InvalidArgument(format!(
                "time grid needs finite t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidArgument(
                "time grid needs at least two points".into(),
            ));
        }
        let step = (t_max - t_min) / (n_points - 1) as f64;
        let nodes = (0..n_points).map(|k| t_min + step * k as f64).collect();
        Ok(Self {
            t_min,
            t_max,
            step,
            nodes,
        })
    }

    pub fn from_spec(spec: TimeGridSpec) -> Result<Self> {
        Self::new(spec.t_min, spec.t_max, spec.n_points)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A compactly supported function sampled once on composite Gauss–Legendre
/// nodes, ready for repeated Fourier/Laplace evaluation.
#[derive(Debug, Clone)]
pub struct TransformTable {
    nodes: Vec<f64>,
    /// quadrature weight × function value
    weighted: Vec<Complex64>,
}

impl TransformTable {
    /// Sample `f` on `[a, b]` with enough panels to resolve `|ω| ≤ omega_max`.
    pub fn new<F>(f: F, a: f64, b: f64, omega_max: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        Self::new_complex(|t| Complex64::new(f(t), 0.0), a, b, omega_max)
    }

    pub fn new_complex<F>(f: F, a: f64, b: f64, omega_max: f64) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        check_support(a, b)?;
        let panels = panels_for(b - a, omega_max);
        Self::with_panels(f, a, b, panels)
    }

    pub fn with_panels<F>(f: F, a: f64, b: f64, panels: usize) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        check_support(a, b)?;
        let (nodes, weights) = panel_nodes(a, b, panels);
        let mut weighted = Vec::with_capacity(nodes.len());
        for (&t, &w) in nodes.iter().zip(&weights) {
            let v = f(t);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { at: t });
            }
            weighted.push(v * w);
        }
        Ok(Self { nodes, weighted })
    }

    /// `∫ e^{-iωt} f(t) dt`.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&t, &v)| {
                let (s, c) = (omega * t).sin_cos();
                v * Complex64::new(c, -s)
            })
            .sum()
    }

    /// `∫ e^{-zt} f(t) dt`.
    pub fn laplace(&self, z: Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&t, &v)| v * (-z * t).exp())
            .sum()
    }
}

/// `F(iω_k) = ∫_a^b e^{-iω_k t} f(t) dt` on every grid node.
pub fn fourier_transform<F>(f: F, a: f64, b: f64, grid: &SpectralGrid) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> f64,
{
    let table = TransformTable::new(f, a, b, grid.omega_max)?;
    Ok(grid.nodes.iter().map(|&w| table.fourier(w)).collect())
}

/// Fourier transform at a single frequency.
pub fn fourier_at<F>(f: F, a: f64, b: f64, omega: f64) -> Result<Complex64>
where
    F: Fn(f64) -> f64,
{
    Ok(TransformTable::new(f, a, b, omega)?.fourier(omega))
}

/// `∫_0^b e^{-zt} f(t) dt` for a causal function supported on `[0, b]`.
pub fn laplace_transform<F>(f: F, b: f64, z: Complex64) -> Result<Complex64>
where
    F: Fn(f64) -> f64,
{
    check_support(0.0, b)?;
    // Growth of |e^{-zt}| over the support also needs resolving.
    let scale = z.im.abs() + PI * z.re.abs();
    let table = TransformTable::new(f, 0.0, b, scale)?;
    Ok(table.laplace(z))
}

/// Relative Parseval discrepancy `|‖f‖² − (1/2π)‖F‖²_grid| / ‖f‖²`.
pub fn parseval_check<F>(f: F, a: f64, b: f64, grid: &SpectralGrid) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_support(a, b)?;
    let table = TransformTable::new(&f, a, b, grid.omega_max)?;
    let panels = panels_for(b - a, 0.0);
    let energy_time = integrate(|t| f(t) * f(t), a, b, panels);
    if energy_time == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let energy_freq = grid.integrate_fn(|w| table.fourier(w).norm_sqr()) / (2.0 * PI);
    Ok((energy_time - energy_freq).abs() / energy_time)
}
