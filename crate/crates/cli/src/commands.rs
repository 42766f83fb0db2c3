//! The four experiment commands. Each writes its CSV (and, where relevant, a
//! JSON summary) into the output directory and reports the files written
//! plus any rows that broke their bound.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use horizon::polynomials::{alpha_closed_form, build_psi, taylor_alpha_bound};
use horizon::predictor::{
    build_predictor, empirical_noise_error, error_bound, format_sci, NoiseSetting, PredictionSummary,
};
use horizon::signals::{class_norm, noise_component, ChirpShape};
use horizon::{Method, PredictionResult, PredictorKernel, Signal, TimeGrid};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::{Failure, QUAD_BUDGET};

/// Files written by a command and the rows that violated a bound.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub violations: Vec<String>,
}

impl Outcome {
    /// `Err(Failure::BoundViolated)` when any row broke its bound.
    pub fn into_result(self) -> Result<Self> {
        if self.violations.is_empty() {
            Ok(self)
        } else {
            Err(Failure::BoundViolated(self.violations).into())
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let (path, mut out) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(path)
}

fn predictor(cfg: &ExperimentConfig, d: usize) -> Result<PredictorKernel> {
    let psi = build_psi(cfg.method, cfg.horizon, cfg.r, d, cfg.precision)?;
    Ok(build_predictor(cfg.kernel()?, psi)?)
}

/// Refuses signals whose class norm is not finite.
fn check_class(cfg: &ExperimentConfig) -> Result<f64> {
    let report = class_norm(&cfg.signal, cfg.r)?;
    if !report.member {
        return Err(Failure::Refused(format!(
            "signal has no finite class norm at r = {}",
            cfg.r
        ))
        .into());
    }
    Ok(report.norm_sq)
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaRow {
    pub d: usize,
    pub method: Method,
    pub alpha: f64,
    pub taylor_bound: Option<f64>,
}

/// `alpha_sweep.csv`: `d,method,alpha,taylor_bound`, one Taylor and one
/// projection row per degree. The bound column is empty unless `T < r`.
/// Projection α must not increase with `d`.
pub fn alpha_sweep(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rows = alpha_rows(cfg)?;
    let (path, mut out) = create(&cfg.output_dir, "alpha_sweep.csv")?;
    writeln!(out, "d,method,alpha,taylor_bound")?;
    for row in &rows {
        let bound = row.taylor_bound.map(format_sci).unwrap_or_default();
        writeln!(out, "{},{},{},{bound}", row.d, row.method, format_sci(row.alpha))?;
    }
    out.flush()?;
    let mut outcome = Outcome {
        files: vec![path],
        ..Outcome::default()
    };
    let projection: Vec<&AlphaRow> = rows.iter().filter(|r| r.method == Method::Projection).collect();
    for pair in projection.windows(2) {
        if pair[1].alpha > pair[0].alpha {
            outcome.violations.push(format!(
                "projection alpha rose from {:e} at d={} to {:e} at d={}",
                pair[0].alpha, pair[0].d, pair[1].alpha, pair[1].d
            ));
        }
    }
    Ok(outcome)
}

pub fn alpha_rows(cfg: &ExperimentConfig) -> Result<Vec<AlphaRow>> {
    let (horizon, r) = (cfg.horizon, cfg.r);
    let bound = |d: usize| (horizon < r).then(|| taylor_alpha_bound(horizon, r, d));
    let rows: Result<Vec<[AlphaRow; 2]>> = cfg
        .d_range
        .degrees()
        .into_par_iter()
        .map(|d| {
            let row = |method| -> Result<AlphaRow> {
                let psi = build_psi(method, horizon, r, d, cfg.precision)?;
                Ok(AlphaRow {
                    d,
                    method,
                    alpha: alpha_closed_form(&psi, horizon, r)?,
                    taylor_bound: bound(d),
                })
            };
            Ok([row(Method::Taylor)?, row(Method::Projection)?])
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub d: usize,
    pub sup_error: f64,
    pub bound: f64,
    pub alpha: f64,
    pub beta: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceSummary {
    pub command: &'static str,
    pub method: Method,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub theta: f64,
    pub r: f64,
    pub signal: Signal,
    pub class_norm_sq: f64,
    pub eps_target: f64,
    pub quadrature_budget: f64,
    pub smallest_d_within_eps: Option<usize>,
    pub rows: Vec<ConvergenceRow>,
    pub violations: Vec<String>,
}

/// `convergence.csv` (`d,sup_error,bound`) and `convergence.json`. Wall-clock
/// timings appear only in the JSON so the CSV stays byte-reproducible.
pub fn convergence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let norm_sq = check_class(cfg)?;
    let grid = cfg.time_grid()?;
    let rows: Result<Vec<ConvergenceRow>> = cfg
        .d_range
        .degrees()
        .into_par_iter()
        .map(|d| {
            let start = Instant::now();
            let pk = predictor(cfg, d)?;
            let res = PredictionResult::compute(&pk, &cfg.signal, &grid, cfg.r)?;
            Ok(ConvergenceRow {
                d,
                sup_error: res.sup_error,
                bound: res.bound,
                alpha: res.alpha,
                beta: res.beta,
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect();
    let rows = rows?;

    let (csv, mut out) = create(&cfg.output_dir, "convergence.csv")?;
    writeln!(out, "d,sup_error,bound")?;
    for row in &rows {
        writeln!(out, "{},{},{}", row.d, format_sci(row.sup_error), format_sci(row.bound))?;
    }
    out.flush()?;

    let violations: Vec<String> = rows
        .iter()
        .filter(|row| row.sup_error > row.bound + QUAD_BUDGET)
        .map(|row| format!("d={}: sup error {:e} > bound {:e}", row.d, row.sup_error, row.bound))
        .collect();
    let summary = ConvergenceSummary {
        command: "convergence",
        method: cfg.method,
        horizon: cfg.horizon,
        theta: cfg.theta,
        r: cfg.r,
        signal: cfg.signal.clone(),
        class_norm_sq: norm_sq,
        eps_target: cfg.eps_target,
        quadrature_budget: QUAD_BUDGET,
        smallest_d_within_eps: rows.iter().find(|row| row.sup_error <= cfg.eps_target).map(|row| row.d),
        rows,
        violations: violations.clone(),
    };
    let json = write_json(&cfg.output_dir, "convergence.json", &summary)?;
    Ok(Outcome {
        files: vec![csv, json],
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseRow {
    pub nu: f64,
    pub d: usize,
    pub empirical_total_error: f64,
    pub bound_total: f64,
}

/// `noise_sweep.csv`: `nu,d,empirical_total_error,bound_total`, ordered by
/// `nu` then `d`. The noise is the chirp of [`ChirpShape::default`] scaled to
/// `‖N‖_{L_p} = ν` on the configured spectral grid.
pub fn noise_sweep(cfg: &ExperimentConfig) -> Result<Outcome> {
    if cfg.nu_range.is_empty() {
        return Err(Failure::Config("key `nu_range`: noise-sweep needs at least one value".into()).into());
    }
    check_class(cfg)?;
    let tgrid = cfg.time_grid()?;
    let grid = cfg.spectral_grid()?;
    let degrees = cfg.d_range.degrees();
    let predictors: Result<Vec<(PredictorKernel, f64)>> = degrees
        .par_iter()
        .map(|&d| {
            let pk = predictor(cfg, d)?;
            let eps = error_bound(&pk, &cfg.signal, cfg.r)?;
            Ok((pk, eps))
        })
        .collect();
    let predictors = predictors?;
    let cells: Vec<(f64, usize)> = cfg
        .nu_range
        .iter()
        .flat_map(|&nu| (0..predictors.len()).map(move |i| (nu, i)))
        .collect();
    let rows: Result<Vec<NoiseRow>> = cells
        .into_par_iter()
        .map(|(nu, i)| {
            let (pk, eps) = &predictors[i];
            let eta = noise_component(ChirpShape::default(), nu, cfg.p, &grid)?;
            let setting = NoiseSetting { nu, p: cfg.p, grid: &grid };
            let rep = empirical_noise_error(pk, &cfg.signal, &eta, &tgrid, setting, *eps)?;
            Ok(NoiseRow {
                nu,
                d: pk.degree(),
                empirical_total_error: rep.total_error,
                bound_total: rep.bound_total,
            })
        })
        .collect();
    let rows = rows?;

    let (path, mut out) = create(&cfg.output_dir, "noise_sweep.csv")?;
    writeln!(out, "nu,d,empirical_total_error,bound_total")?;
    for row in &rows {
        writeln!(
            out,
            "{},{},{},{}",
            format_sci(row.nu),
            row.d,
            format_sci(row.empirical_total_error),
            format_sci(row.bound_total)
        )?;
    }
    out.flush()?;
    let violations = rows
        .iter()
        .filter(|row| row.empirical_total_error > row.bound_total + QUAD_BUDGET)
        .map(|row| {
            format!(
                "nu={} d={}: total error {:e} > bound {:e}",
                row.nu, row.d, row.empirical_total_error, row.bound_total
            )
        })
        .collect();
    Ok(Outcome {
        files: vec![path],
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictSummary {
    pub command: &'static str,
    #[serde(flatten)]
    pub result: PredictionSummary,
    pub quadrature_budget: f64,
    pub violations: Vec<String>,
}

/// `predict.csv` (`t,y,y_hat,abs_err`) and `predict.json` for the largest
/// degree of `d_range`, on the configured time grid or on `times` if given.
pub fn predict(cfg: &ExperimentConfig, times: Option<&[f64]>) -> Result<Outcome> {
    check_class(cfg)?;
    let grid = match times {
        Some([]) => {
            return Err(Failure::Config("`--at` needs at least one time".into()).into())
        }
        Some(ts) => TimeGrid {
            t_min: ts.iter().copied().fold(f64::INFINITY, f64::min),
            t_max: ts.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            step: f64::NAN,
            nodes: ts.to_vec(),
        },
        None => cfg.time_grid()?,
    };
    let pk = predictor(cfg, cfg.d_range.max)?;
    let parts = horizon::predictor::error_bound_parts(&pk, &cfg.signal, cfg.r)?;
    let pairs: Vec<(f64, f64)> = grid
        .nodes
        .par_iter()
        .map(|&t| (pk.target(&cfg.signal, t), pk.predict(&cfg.signal, t)))
        .collect();
    let (y, y_hat) = pairs.into_iter().unzip();
    let mut res = PredictionResult::assemble(grid, y, y_hat, parts, pk.degree());
    res.method = Some(cfg.method);

    let (csv, mut out) = create(&cfg.output_dir, "predict.csv")?;
    res.write_csv(&mut out)?;
    out.flush()?;
    let mut violations = Vec::new();
    if res.sup_error > res.bound + QUAD_BUDGET {
        violations.push(format!("sup error {:e} > bound {:e}", res.sup_error, res.bound));
    }
    let summary = PredictSummary {
        command: "predict",
        result: res.summary(),
        quadrature_budget: QUAD_BUDGET,
        violations: violations.clone(),
    };
    let json = write_json(&cfg.output_dir, "predict.json", &summary)?;
    Ok(Outcome {
        files: vec![csv, json],
        violations,
    })
}
