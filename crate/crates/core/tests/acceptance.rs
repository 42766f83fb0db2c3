//! Acceptance suite on the canonical configuration: T = 0.5, θ = 0.1, r = 2,
//! bump kernel, Poisson signal a = 1.5, 41-point time grid on [−2, 2].
//!
//! Runs without the libtest harness so that every criterion prints exactly
//! one PASS/FAIL line; the process fails if any criterion fails.

#[path = "common/oracle.rs"]
mod oracle;

use std::cell::RefCell;
use std::time::Instant;

use horizon::kernels::{bump_kernel, TargetKernel};
use horizon::polynomials::{
    alpha_closed_form, build_psi, taylor_alpha_bound, taylor_psi, Method,
};
use horizon::predictor::{
    build_predictor, empirical_noise_error, error_bound,
    noise_bound, LagRule, NoiseSetting, PredictionResult,
};
use horizon::signals::{class_norm, class_norm_weighted, noise_component, poisson_signal, ChirpShape};
use horizon::weighted::{exponential_moment, monomial_moment};
use horizon::{NoiseP, Precision, SpectralGrid, TimeGrid, WeightedNorm};
use num_complex::Complex64;
use horizon::precision::{Cx, Dd};
use horizon::spectral::graded_nodes_dd;
use oracle::{adaptive_simpson, adaptive_simpson_half_line, richardson_derivative};

const T: f64 = 0.5;
const THETA: f64 = 0.1;
const R: f64 = 2.0;
const A: f64 = 1.5;
const QUAD_BUDGET: f64 = 1e-8;

type Check = fn() -> Result<String, String>;

fn kernel() -> TargetKernel {
    bump_kernel(T, THETA).expect("canonical kernel")
}

fn tgrid() -> TimeGrid {
    TimeGrid::new(-2.0, 2.0, 41).expect("canonical grid")
}

fn psi(method: Method, d: usize) -> horizon::Polynomial {
    let precision = if d > 10 { Precision::Extended } else { Precision::Double };
    build_psi(method, T, R, d, precision).expect("psi")
}

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn taylor_alpha_bound_holds() -> Result<String, String> {
    for d in 2..=12 {
        let alpha = alpha_closed_form(&taylor_psi(T, d).unwrap(), T, R).unwrap();
        let bound = taylor_alpha_bound(T, R, d);
        ensure(alpha <= bound + 1e-12, format!("d={d}: alpha {alpha:e} > bound {bound:e}"))?;
    }
    let b10 = taylor_alpha_bound(T, R, 10);
    let formula = 2.0 * T.powi(10) / R.powi(9);
    ensure((b10 - formula).abs() <= 1e-20 && (b10 - 3.815e-6).abs() < 5e-10, format!("bound(10) = {b10:e}"))?;
    let a10 = alpha_closed_form(&taylor_psi(T, 10).unwrap(), T, R).unwrap();
    Ok(format!("alpha_10 = {a10:.3e} <= 2T^10/r^9 = {b10:.6e}"))
}

fn projection_optimal() -> Result<String, String> {
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for d in 0..=12 {
        let proj = alpha_closed_form(&psi(Method::Projection, d), T, R).unwrap();
        let taylor = alpha_closed_form(&taylor_psi(T, d).unwrap(), T, R).unwrap();
        ensure(proj <= taylor + 1e-12, format!("d={d}: projection {proj:e} > taylor {taylor:e}"))?;
        ensure(proj <= prev, format!("d={d}: projection alpha increased {prev:e} -> {proj:e}"))?;
        prev = proj;
        last = proj;
    }
    Ok(format!("d=0..12 monotone, alpha_12 = {last:.3e}"))
}

fn central_identity() -> Result<String, String> {
    let h = kernel();
    let freqs: Vec<f64> = (0..50).map(|j| -10.0 + 20.0 * (j as f64 + 0.5) / 50.0).collect();
    let mut worst = 0.0f64;
    for d in [0usize, 4, 10] {
        let p = taylor_psi(T, d).unwrap();
        let pk = build_predictor(h.clone(), p.clone()).unwrap();
        let rule = LagRule::for_degree(d).refined();
        for &w in &freqs {
            let big_h = h.fourier(w).unwrap();
            if big_h.norm() <= 1e-12 {
                continue;
            }
            let fd = Complex64::new(0.0, -w * T).exp() * p.eval_iw(w) * big_h;
            let td = pk.time_domain_transform(w, rule);
            let rel = (td - fd).norm() / fd.norm();
            worst = worst.max(rel);
            ensure(rel < 1e-8, format!("d={d} w={w}: relative error {rel:e}"))?;
        }
    }
    Ok(format!("worst relative error {worst:.2e} over 3x50 frequencies"))
}

fn error_bound_valid() -> Result<String, String> {
    let x = poisson_signal(A).unwrap();
    let grid = tgrid();
    let mut parts = Vec::new();
    for method in [Method::Taylor, Method::Projection] {
        for d in [2usize, 6, 10] {
            let pk = build_predictor(kernel(), psi(method, d)).unwrap();
            let res = PredictionResult::compute(&pk, &x, &grid, R).unwrap();
            ensure(
                res.sup_error <= res.bound + QUAD_BUDGET,
                format!("{method} d={d}: sup error {:e} > bound {:e}", res.sup_error, res.bound),
            )?;
            if method == Method::Taylor {
                parts.push(format!("d={d} {:.2e}<={:.2e}", res.sup_error, res.bound));
            }
        }
    }
    Ok(format!("taylor {}; projection also holds", parts.join(", ")))
}

fn convergence() -> Result<String, String> {
    let x = poisson_signal(A).unwrap();
    let grid = tgrid();
    let mut out = Vec::new();
    for method in [Method::Taylor, Method::Projection] {
        let err = |d| build_predictor(kernel(), psi(method, d)).unwrap().sup_error(&x, &grid);
        let (e2, e10) = (err(2), err(10));
        ensure(e10 * 10.0 <= e2, format!("{method}: e10 {e10:e} vs e2 {e2:e}"))?;
        out.push(format!("{method} e2/e10 = {:.1e}", e2 / e10));
    }
    Ok(out.join(", "))
}

fn noise_robustness() -> Result<String, String> {
    let x0 = poisson_signal(A).unwrap();
    let tg = tgrid();
    let grid = SpectralGrid::new(100.0, 4096).unwrap();
    let shape = ChirpShape::default();
    let mut slack = f64::INFINITY;
    for d in [4usize, 10] {
        let pk = build_predictor(kernel(), taylor_psi(T, d).unwrap()).unwrap();
        let eps = error_bound(&pk, &x0, R).unwrap();
        for p in [NoiseP::One, NoiseP::Two] {
            for nu in [0.0, 0.01, 0.1] {
                let eta = noise_component(shape, nu, p, &grid).unwrap();
                let setting = NoiseSetting { nu, p, grid: &grid };
                let rep = empirical_noise_error(&pk, &x0, &eta, &tg, setting, eps).unwrap();
                ensure(
                    rep.total_within_bound(QUAD_BUDGET),
                    format!("d={d} p={p} nu={nu}: total {:e} > bound {:e}", rep.total_error, rep.bound_total),
                )?;
                slack = slack.min(rep.bound_total - rep.total_error);
            }
        }
    }
    let b = |d| {
        let pk = build_predictor(kernel(), taylor_psi(T, d).unwrap()).unwrap();
        noise_bound(&pk, 0.1, NoiseP::Two, &grid).unwrap()
    };
    let (b4, b10) = (b(4), b(10));
    ensure(b10 > b4, format!("noise bound d=10 {b10:e} <= d=4 {b4:e}"))?;
    Ok(format!("min slack {slack:.2e}; nu=0.1 noise bound d=4 {b4:.3e} < d=10 {b10:.3e}"))
}

fn derivatives() -> Result<String, String> {
    let h = kernel();
    let mut worst = 0.0f64;
    for k in 1..=6 {
        let lower = |t: f64| h.derivative(k - 1, t).unwrap();
        for i in 0..20 {
            let t = -T + (T + THETA) * (i as f64 + 0.5) / 20.0;
            let exact = h.derivative(k, t).unwrap();
            let fd = richardson_derivative(&lower, t, 1e-3);
            let scale = exact.abs().max(1e-300);
            let rel = (fd - exact).abs() / scale;
            if exact.abs() > 1e-8 {
                worst = worst.max(rel);
                ensure(rel < 1e-5, format!("k={k} t={t}: {fd:e} vs {exact:e}"))?;
            }
        }
    }
    // Frequency side in double-double on a graded mesh: at small ω the
    // transform of h^{(k)} is a heavy cancellation down to ω^k H.
    let (nodes, weights) = graded_nodes_dd(Dd::new(-T), Dd::new(THETA), 10, 6);
    let samples: Vec<Vec<Dd>> = nodes.iter().map(|&t| h.derivatives_dd(6, t)).collect();
    let mut worst_fd = 0.0f64;
    for j in 0..20 {
        let w = 0.1 + 9.9 * j as f64 / 19.0;
        let mut acc = vec![Cx::<Dd>::zero(); 7];
        for ((&t, &wt), vals) in nodes.iter().zip(&weights).zip(&samples) {
            let (s, c) = (Dd::new(-w) * t).sin_cos();
            let phase = Cx::new(c, s);
            for (k, &v) in vals.iter().enumerate() {
                acc[k] = acc[k] + phase.scale(v * wt);
            }
        }
        let base = acc[0].to_c64();
        let lib = h.fourier(w).unwrap();
        let rel = (lib - base).norm() / base.norm();
        worst_fd = worst_fd.max(rel);
        ensure(rel < 1e-8, format!("w={w}: transform of h off by {rel:e}"))?;
        let iw = Cx::new(Dd::new(0.0), Dd::new(w));
        for (k, &hk) in acc.iter().enumerate().skip(1) {
            let lhs = (iw.powu(k as u32) * acc[0]).to_c64();
            let rel = (lhs - hk.to_c64()).norm() / lhs.norm();
            worst_fd = worst_fd.max(rel);
            ensure(rel < 1e-8, format!("k={k} w={w}: frequency mismatch {rel:e}"))?;
        }
    }
    Ok(format!("finite differences {worst:.1e}, frequency {worst_fd:.1e}"))
}

fn moments() -> Result<String, String> {
    // Integrands decay like e^{-rω}; [0, 80] leaves a tail below 1e-40 of
    // every moment up to k = 24.
    let mut worst = 0.0f64;
    let mut scale = 1.0 / R;
    for k in 0..=24usize {
        if k > 0 {
            scale *= k as f64 / R;
        }
        let kf = k as i32;
        let tol = 1e-14 * scale;
        let oracle = 2.0 * adaptive_simpson(&|w| w.powi(kf) * (-R * w).exp(), 0.0, 80.0, tol);
        let m = monomial_moment(k, R).unwrap();
        let rel = (m - oracle).abs() / oracle;
        worst = worst.max(rel);
        ensure(rel < 1e-10, format!("M_{k}: {m:e} vs {oracle:e}"))?;
        let oracle = if k % 2 == 0 {
            let c = adaptive_simpson(&|w| w.powi(kf) * (-R * w).exp() * (T * w).cos(), 0.0, 80.0, tol);
            Complex64::new(2.0 * c, 0.0)
        } else {
            let s = adaptive_simpson(&|w| w.powi(kf) * (-R * w).exp() * (T * w).sin(), 0.0, 80.0, tol);
            Complex64::new(0.0, 2.0 * s)
        };
        let e = exponential_moment(k, R, T).unwrap();
        let rel = (e - oracle).norm() / oracle.norm();
        worst = worst.max(rel);
        ensure(rel < 1e-10, format!("E_{k}: {e} vs {oracle}"))?;
    }
    Ok(format!("k=0..24, worst relative error {worst:.1e}"))
}

fn causality() -> Result<String, String> {
    let pk = build_predictor(kernel(), taylor_psi(T, 10).unwrap()).unwrap();
    ensure(pk.tau() == T + THETA, format!("memory {} != T+theta", pk.tau()))?;
    let lags = pk.lags();
    let (min_lag, max_lag) = lags.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &u| (a.min(u), b.max(u)));
    ensure(min_lag > 0.0 && max_lag < pk.tau(), format!("lags span [{min_lag}, {max_lag}]"))?;
    let mut future = 0usize;
    let mut total = 0usize;
    let mut earliest_gap = 0.0f64;
    for &t in &tgrid().nodes {
        let seen = RefCell::new(Vec::new());
        let probe = |s: f64| {
            seen.borrow_mut().push(s);
            1.0 / (1.0 + s * s)
        };
        pk.predict(&probe, t);
        let seen = seen.into_inner();
        total += seen.len();
        future += seen.iter().filter(|&&s| s > t).count();
        earliest_gap = earliest_gap.max(seen.iter().map(|&s| t - s).fold(0.0, f64::max));
    }
    ensure(future == 0, format!("{future} future accesses"))?;
    ensure(earliest_gap <= pk.tau(), format!("reached {earliest_gap} into the past"))?;
    Ok(format!("{total} accesses, 0 with s > t, window {}", pk.tau()))
}

fn class_gate() -> Result<String, String> {
    let rep = class_norm(&poisson_signal(A).unwrap(), R).unwrap();
    ensure((rep.norm_sq - 0.4).abs() <= 1e-10 && rep.member, format!("norm^2 = {}", rep.norm_sq))?;
    let quad = 2.0 * adaptive_simpson_half_line(&|w| (-R * w).exp() * (-2.0 * A * w).exp(), 0.0, 1e-15);
    ensure((quad - 0.4).abs() <= 1e-10, format!("quadrature cross-check {quad}"))?;
    let grow = WeightedNorm::growing(R).unwrap();
    let rep = class_norm_weighted(&poisson_signal(0.9).unwrap(), &grow).unwrap();
    ensure(!rep.member, "a=0.9 accepted under e^{+r|w|}".into())?;
    let beta = horizon::predictor::beta(&kernel(), &poisson_signal(0.9).unwrap(), R);
    ensure(beta.is_err(), "beta finite for a=0.9".into())?;
    let ok = horizon::predictor::beta(&kernel(), &poisson_signal(A).unwrap(), R).unwrap();
    Ok(format!("norm^2 = 0.4, beta(a=1.5) = {ok:.4e}, a=0.9 flagged"))
}

fn main() {
    let checks: [(&str, Check); 10] = [
        ("taylor alpha bound", taylor_alpha_bound_holds),
        ("projection optimality", projection_optimal),
        ("central identity", central_identity),
        ("error bound validity", error_bound_valid),
        ("weak predictability convergence", convergence),
        ("noise robustness", noise_robustness),
        ("derivative correctness", derivatives),
        ("moment layer", moments),
        ("causality and limited memory", causality),
        ("class gate", class_gate),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({ms} ms)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({ms} ms)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
