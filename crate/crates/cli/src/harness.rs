//! Seeded recovery sweeps, overlap metrics and plot data.
//!
//! A sweep writes two files into its output directory: the result table
//! named by the config (byte-identical across reruns) and
//! `<stem>.timing.csv` holding per-phase wall times keyed by row.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use planted_core::hypertrees::build_class_table;
use planted_core::models::{sample_pds, sample_sparse_tpca, NoiseMode, PdsParams, PriorSpec, TpcaParams};
use planted_core::recovery::{
    coloring_leaves, default_ell, default_trials, pairwise_sum, planted_size, preprocess_pds, preprocess_tpca,
    select_top, Coloring,
};

use crate::config::{ExperimentConfig, GridPoint, ModelKind};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "PLANTED_WORKERS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub row: usize,
    pub grid_index: usize,
    pub seed: u64,
    pub model: String,
    pub n: usize,
    pub r: usize,
    pub rho: f64,
    pub q0: f64,
    pub q1: f64,
    pub lambda: f64,
    pub snr: f64,
    pub eps: f64,
    pub ell: usize,
    pub k: usize,
    pub trials: usize,
    pub preprocess: bool,
    pub planted: usize,
    pub selected: usize,
    pub sym_diff: usize,
    pub normalized: f64,
    pub lambda_star: f64,
    pub status: String,
}

/// Wall time in seconds for each phase of one row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub row: usize,
    pub preprocess: f64,
    pub dp: f64,
    pub aggregate: f64,
}

/// `(|S_hat xor S|, |S_hat xor S| / (n rho))`.
pub fn overlap_metrics(s: &[usize], s_hat: &[usize], n: usize, rho: f64) -> (usize, f64) {
    let a: std::collections::BTreeSet<_> = s.iter().collect();
    let b: std::collections::BTreeSet<_> = s_hat.iter().collect();
    let sym = a.symmetric_difference(&b).count();
    (sym, sym as f64 / (n as f64 * rho))
}

pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

struct Job<'a> {
    row: usize,
    point: &'a GridPoint,
    seed: u64,
}

fn blank_row(cfg: &ExperimentConfig, job: &Job<'_>) -> ResultRow {
    let p = job.point;
    let (q1, lambda) = match cfg.model {
        ModelKind::Pds => {
            let params = PdsParams { n: p.n, r: p.r, rho: p.rho, q0: p.q0, q1: p.strength };
            (p.strength, params.lambda())
        }
        ModelKind::Stpca => (f64::NAN, p.strength),
    };
    ResultRow {
        row: job.row,
        grid_index: p.index,
        seed: job.seed,
        model: cfg.model.tag().into(),
        n: p.n,
        r: p.r,
        rho: p.rho,
        q0: if cfg.model == ModelKind::Pds { p.q0 } else { f64::NAN },
        q1,
        lambda,
        snr: p.snr,
        eps: cfg.recovery.eps,
        ell: 0,
        k: 0,
        trials: 0,
        preprocess: cfg.recovery.preprocess,
        planted: 0,
        selected: 0,
        sym_diff: 0,
        normalized: f64::NAN,
        lambda_star: f64::NAN,
        status: String::new(),
    }
}

fn run_row(cfg: &ExperimentConfig, job: &Job<'_>, row: &mut ResultRow, times: &mut PhaseTimes) -> Result<()> {
    let p = job.point;
    let eps = cfg.recovery.eps;
    let disabled = !cfg.recovery.preprocess;
    let clock = Instant::now();
    let (support, pre) = match cfg.model {
        ModelKind::Pds => {
            let params = PdsParams::new(p.n, p.r, p.rho, p.q0, p.strength)?;
            let (signal, h) = sample_pds(&params, job.seed)?;
            let pre = preprocess_pds(&h, &params, eps, job.seed, disabled)?;
            (signal.support(), pre)
        }
        ModelKind::Stpca => {
            let mode = if cfg.symmetrized_noise { NoiseMode::Symmetrized } else { NoiseMode::NoiseReduced };
            let params = TpcaParams::new(p.n, p.r, p.strength, PriorSpec::bernoulli(p.rho), mode)?;
            let (signal, t) = sample_sparse_tpca(&params, job.seed)?;
            let pre = preprocess_tpca(&t, &params, eps, job.seed, disabled)?;
            (signal.support(), pre)
        }
    };
    times.preprocess = clock.elapsed().as_secs_f64();
    row.lambda_star = pre.lambda_star;

    let clock = Instant::now();
    let ell = cfg.recovery.ell.unwrap_or_else(|| default_ell(eps, p.rho, p.r));
    let table = build_class_table(ell, p.r)?;
    let k = table.k();
    let t = cfg.recovery.trials.unwrap_or_else(|| default_trials(k, p.n));
    (row.ell, row.k, row.trials) = (ell, k, t);
    let mut leaves = Vec::with_capacity(t * table.len());
    for s in 0..t {
        let coloring = Coloring::random(p.n, k, job.seed, s as u64);
        leaves.extend(coloring_leaves(&pre.ytilde, &coloring, &table)?);
    }
    times.dp = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let z = pairwise_sum(&leaves, p.n);
    let m = planted_size(p.n, p.rho);
    let s_hat = select_top(&z, m);
    times.aggregate = clock.elapsed().as_secs_f64();

    let (sym, norm) = overlap_metrics(&support, &s_hat, p.n, p.rho);
    row.planted = support.len();
    row.selected = s_hat.len();
    row.sym_diff = sym;
    row.normalized = norm;
    row.status = "ok".into();
    Ok(())
}

/// Computes one row; failures are recorded in `status`.
pub fn compute_row(cfg: &ExperimentConfig, point: &GridPoint, seed: u64, row_index: usize) -> (ResultRow, PhaseTimes) {
    let job = Job { row: row_index, point, seed };
    let mut row = blank_row(cfg, &job);
    let mut times = PhaseTimes { row: row_index, ..Default::default() };
    if let Err(e) = run_row(cfg, &job, &mut row, &mut times) {
        row.status = format!("error: {e}");
    }
    (row, times)
}

pub fn timing_path(results: &Path) -> PathBuf {
    let stem = results.file_stem().map_or_else(|| "results".into(), |s| s.to_string_lossy().into_owned());
    results.with_file_name(format!("{stem}.timing.csv"))
}

/// Runs every `(grid point, seed)` row, appending each to
/// `<out_dir>/<config.output>` in `(grid index, seed)` order with one flush
/// per row.
pub fn run_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<ResultRow>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let results_path = out_dir.join(&cfg.output);
    let mut results = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(
        File::create(&results_path).with_context(|| format!("creating {}", results_path.display()))?,
    ));
    let mut timing = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(File::create(timing_path(&results_path))?));
    results.write_record(RESULT_COLUMNS)?;
    timing.write_record(["row", "preprocess", "dp", "aggregate"])?;
    results.flush()?;
    timing.flush()?;

    let grid = cfg.grid();
    let jobs: Vec<(usize, &GridPoint, u64)> = grid
        .iter()
        .flat_map(|p| cfg.seeds.iter().map(move |&s| (p, s)))
        .enumerate()
        .map(|(i, (p, s))| (i, p, s))
        .collect();
    let workers = worker_count().min(jobs.len()).max(1);
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(ResultRow, PhaseTimes)>();
    let mut rows = Vec::with_capacity(jobs.len());

    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let (jobs, next) = (&jobs, &next);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(row, point, seed)) = jobs.get(i) else { break };
                if tx.send(compute_row(cfg, point, seed, row)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        for (row, times) in rx {
            pending.insert(row.row, (row, times));
            while let Some((row, times)) = pending.remove(&rows.len()) {
                results.serialize(&row)?;
                results.flush()?;
                timing.serialize(times)?;
                timing.flush()?;
                rows.push(row);
            }
        }
        Ok(())
    })?;
    if rows.len() != jobs.len() {
        bail!("sweep finished with {} of {} rows", rows.len(), jobs.len());
    }
    Ok(rows)
}

const RESULT_COLUMNS: [&str; 22] = [
    "row",
    "grid_index",
    "seed",
    "model",
    "n",
    "r",
    "rho",
    "q0",
    "q1",
    "lambda",
    "snr",
    "eps",
    "ell",
    "k",
    "trials",
    "preprocess",
    "planted",
    "selected",
    "sym_diff",
    "normalized",
    "lambda_star",
    "status",
];

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    rdr.deserialize().map(|r| r.map_err(Into::into)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Threshold,
}

impl std::str::FromStr for PlotKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threshold" => Ok(PlotKind::Threshold),
            _ => Err(anyhow!("unknown plot kind `{s}`")),
        }
    }
}

/// One plotted point: mean normalized symmetric difference at an SNR.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub n: usize,
    pub r: usize,
    pub snr: f64,
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Threshold series: rows with status `ok`, grouped by `(n, r)` and sorted by SNR.
pub fn threshold_points(rows: &[ResultRow]) -> Vec<PlotPoint> {
    let mut groups: BTreeMap<(usize, usize, u64), Vec<f64>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.status == "ok") {
        groups
            .entry((row.n, row.r, row.snr.to_bits()))
            .or_default()
            .push(row.normalized);
    }
    let mut out: Vec<PlotPoint> = groups
        .into_iter()
        .map(|((n, r, snr), ys)| {
            let count = ys.len();
            let mean = ys.iter().sum::<f64>() / count as f64;
            let stderr = if count > 1 {
                let var = ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / (count - 1) as f64;
                (var / count as f64).sqrt()
            } else {
                0.0
            };
            PlotPoint { n, r, snr: f64::from_bits(snr), count, mean, stderr }
        })
        .collect();
    out.sort_by(|a, b| (a.n, a.r).cmp(&(b.n, b.r)).then(a.snr.total_cmp(&b.snr)));
    out
}

/// CSV text with columns `n,r,snr,count,mean,stderr`.
pub fn emit_plotdata(rows: &[ResultRow], kind: PlotKind) -> Result<String> {
    if rows.is_empty() {
        bail!("no rows to plot");
    }
    let points = match kind {
        PlotKind::Threshold => threshold_points(rows),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in &points {
        w.serialize(p)?;
    }
    if points.is_empty() {
        w.write_record(["n", "r", "snr", "count", "mean", "stderr"])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

pub fn write_plotdata(rows: &[ResultRow], kind: PlotKind, path: &Path) -> Result<()> {
    let text = emit_plotdata(rows, kind)?;
    let mut f = File::create(path)?;
    f.write_all(text.as_bytes())?;
    f.flush()?;
    Ok(())
}
