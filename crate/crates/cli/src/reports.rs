//! JSON documents emitted by the `recover`, `oracle` and `cumulant` commands.

use std::time::Instant;

use anyhow::{anyhow, bail, ensure, Result};
use serde_json::{json, Value};

use planted_core::cumulants::{bar_degrees, excess_delta, CumulantTable, Prior};
use planted_core::exact::{q_to_f64, Q, Surd};
use planted_core::hypertrees::build_class_table;
use planted_core::lowdeg::{
    build_certificate, build_moment_system, exact_corr, reduction_check, Graph, LowDegModel, Mode,
    MomentSystem, PairFamily, PdsExact, SparsePcaExact,
};
use planted_core::models::{Observation, PdsParams, PriorSpec, TpcaParams, NoiseMode};
use planted_core::recovery::{
    aggregate_scores, default_ell, planted_size, preprocess_pds, preprocess_tpca, select_top,
    RecoveryConfig,
};

/// Parses `a/b` or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Ok(v) = s.parse::<Q>() {
        return Ok(v);
    }
    let (int, frac) = s.split_once('.').ok_or_else(|| anyhow!("cannot parse `{s}` as a rational"))?;
    let neg = int.starts_with('-');
    let digits = format!("{}{}", int.trim_start_matches('-'), frac);
    let num: num_bigint::BigInt = digits.parse().map_err(|_| anyhow!("cannot parse `{s}` as a rational"))?;
    let den = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
    let v = Q::new(num, den);
    Ok(if neg { -v } else { v })
}

/// `rademacher`, `gaussian` or `bernoulli:<p>`.
pub fn parse_prior(s: &str) -> Result<Prior> {
    match s {
        "rademacher" => Ok(Prior::Rademacher),
        "gaussian" => Ok(Prior::Gaussian),
        _ => match s.strip_prefix("bernoulli:") {
            Some(p) => {
                let prior = Prior::Bernoulli(parse_rational(p)?);
                prior.validate()?;
                Ok(prior)
            }
            None => bail!("unknown prior `{s}`"),
        },
    }
}

/// Edge list with multiplicities, e.g. `0-1:2,1-2`.
pub fn parse_multigraph(s: &str) -> Result<Vec<(Vec<usize>, u8)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (e, m) = match p.trim().split_once(':') {
                Some((e, m)) => (e, m.parse::<u8>()?),
                None => (p.trim(), 1),
            };
            let mut verts: Vec<usize> = e.split('-').map(|v| v.parse()).collect::<std::result::Result<_, _>>()?;
            verts.sort_unstable();
            ensure!(m >= 1, "multiplicity must be >= 1");
            Ok((verts, m))
        })
        .collect()
}

fn surd_value(v: &Surd, mode: Mode) -> Value {
    match mode {
        Mode::Exact => json!({ "exact": v.to_string(), "approx": v.to_f64() }),
        Mode::Float => json!(v.to_f64()),
    }
}

fn q_value(v: &Q, mode: Mode) -> Value {
    match mode {
        Mode::Exact => json!({ "exact": v.to_string(), "approx": q_to_f64(v) }),
        Mode::Float => json!(q_to_f64(v)),
    }
}

fn graph_edges(sys: &MomentSystem, g: &Graph) -> Value {
    let u = &sys.sets.universe;
    Value::Array(
        g.0.iter()
            .map(|&(slot, mult)| json!({ "edge": u.edges[slot as usize], "mult": mult }))
            .collect(),
    )
}

/// `c`, `M`, `u`, `Corr`, `MMSE` and the bound tables of one moment system.
pub fn oracle_report(model: &LowDegModel, d: usize, mode: Mode) -> Result<Value> {
    let clock = Instant::now();
    let sys = build_moment_system(model, d, mode)?;
    let basis: Vec<Value> = (0..sys.len())
        .map(|i| {
            json!({
                "index": i,
                "edges": graph_edges(&sys, sys.graph(i)),
                "good": sys.sets.good(i),
            })
        })
        .collect();
    let c: Vec<Value> = sys.c.iter().map(|v| surd_value(v, mode)).collect();
    let mut m = Vec::new();
    for ((beta, gamma), entries) in sys.rows(PairFamily::Restricted)? {
        for (alpha, v) in entries {
            if !v.is_zero() {
                m.push(json!({ "beta": beta, "gamma": gamma, "alpha": alpha, "value": surd_value(&v, mode) }));
            }
        }
    }
    let cert = build_certificate(&sys)?;
    let u: Vec<Value> = cert
        .u
        .iter()
        .map(|(&(beta, gamma), v)| json!({ "beta": beta, "gamma": gamma, "value": surd_value(v, mode) }))
        .collect();
    let corr = exact_corr(&sys, mode)?;
    let ex2 = model.second_moment();
    let bound_sq = &cert.norm_sq / &ex2;
    let reduction = reduction_check(&sys)?;
    let holds = match &corr.corr_sq_exact {
        Some(c) => *c <= bound_sq,
        None => corr.corr_sq <= q_to_f64(&bound_sq) * (1.0 + 1e-9),
    };
    Ok(json!({
        "model": model_json(model),
        "degree": d,
        "mode": if mode == Mode::Exact { "exact" } else { "float" },
        "basis": basis,
        "c": c,
        "M": m,
        "u": u,
        "corr_sq": match &corr.corr_sq_exact { Some(v) => q_value(v, mode), None => json!(corr.corr_sq) },
        "corr": corr.corr(),
        "mmse": match &corr.mmse_exact { Some(v) => q_value(v, mode), None => json!(corr.mmse) },
        "gram_rank": corr.rank,
        "bounds": {
            "certificate_norm_sq": q_value(&cert.norm_sq, mode),
            "second_moment": q_value(&ex2, mode),
            "corr_sq_bound": q_value(&bound_sq, mode),
            "corr_within_bound": holds,
            "residual_zero": true,
            "reduction": { "non_good": reduction.non_good, "entries_checked": reduction.entries_checked },
        },
        "seconds": clock.elapsed().as_secs_f64(),
    }))
}

fn model_json(model: &LowDegModel) -> Value {
    match model {
        LowDegModel::Pds(PdsExact { n, r, rho, q0, q1 }) => json!({
            "kind": "pds", "n": n, "r": r, "rho": rho.to_string(), "q0": q0.to_string(), "q1": q1.to_string(),
        }),
        LowDegModel::SparsePca(SparsePcaExact { n, r, rho, lambda }) => json!({
            "kind": "stpca", "n": n, "r": r, "rho": rho.to_string(), "lambda": lambda.to_string(),
        }),
    }
}

/// `kappa_alpha`, `H(alpha)`, `delta(alpha bar)` and the envelope verdict.
pub fn cumulant_report(
    alpha: &[(Vec<usize>, u8)],
    n: Option<usize>,
    m: usize,
    prior: Prior,
    lambda: Q,
) -> Result<Value> {
    ensure!(!alpha.is_empty(), "alpha needs at least one edge");
    let r = alpha[0].0.len();
    ensure!(alpha.iter().all(|(e, _)| e.len() == r), "edges of alpha have different sizes");
    let max_v = alpha.iter().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0);
    let n = n.unwrap_or(max_v + 1).max(m).max(max_v + 1);
    let mut table = CumulantTable::new(n, r, m, prior.clone(), lambda.clone())?;
    let mut g = Graph::empty();
    for (e, mult) in alpha {
        let slot = table.universe.slot(e).ok_or_else(|| anyhow!("edge {e:?} is not an {r}-multiset on [{n}]"))?;
        g.add(slot, *mult);
    }
    let kappa = table.kappa(&g);
    let delta = excess_delta(&bar_degrees(&table.universe, &g, m));
    let good = table.is_good(&g);
    let complexity = table.complexity(&g)?;
    let envelope = if good {
        let row = table.envelope_check(&g);
        match row {
            Ok(row) => json!({
                "bound": q_value(&row.bound, Mode::Exact),
                "holds": row.holds,
            }),
            Err(e) => json!({ "holds": false, "error": e.to_string() }),
        }
    } else {
        json!({ "holds": kappa == Q::from_integer(0.into()), "note": "non-good graph: cumulant must vanish" })
    };
    Ok(json!({
        "alpha": alpha.iter().map(|(e, m)| json!({ "edge": e, "mult": m })).collect::<Vec<_>>(),
        "n": n,
        "r": r,
        "m": m,
        "prior": prior.name(),
        "lambda": lambda.to_string(),
        "good": good,
        "kappa": q_value(&kappa, Mode::Exact),
        "complexity": complexity.to_string(),
        "delta_bar": delta,
        "envelope": envelope,
    }))
}

/// Model parameters for `recover`.
pub enum RecoverModel {
    Pds(PdsParams),
    Stpca(TpcaParams),
}

pub struct RecoverArgs {
    pub eps: f64,
    pub ell: Option<usize>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub preprocess: bool,
}

/// Runs the recovery pipeline with per-phase timing.
pub fn recover_report(obs: &Observation, model: &RecoverModel, args: &RecoverArgs) -> Result<Value> {
    let mut config = RecoveryConfig::new(args.eps, args.seed);
    config.ell_override = args.ell;
    config.t_override = args.trials;
    config.disable_preprocessing = !args.preprocess;
    config.validate()?;
    let clock = Instant::now();
    let (pre, n, r, rho, echo) = match (obs, model) {
        (Observation::Hypergraph(h), RecoverModel::Pds(p)) => (
            preprocess_pds(h, p, args.eps, args.seed, !args.preprocess)?,
            p.n,
            p.r,
            p.rho,
            json!({ "model": "pds", "n": p.n, "r": p.r, "rho": p.rho, "q0": p.q0, "q1": p.q1 }),
        ),
        (Observation::Tensor(t), RecoverModel::Stpca(p)) => {
            let rho = p.prior.rho().ok_or_else(|| anyhow!("stpca recovery needs a Bernoulli prior"))?;
            (
                preprocess_tpca(t, p, args.eps, args.seed, !args.preprocess)?,
                p.n,
                p.r,
                rho,
                json!({ "model": "stpca", "n": p.n, "r": p.r, "rho": rho, "lambda": p.lambda,
                        "noise": if p.noise_mode == NoiseMode::Symmetrized { "symmetrized" } else { "reduced" } }),
            )
        }
        _ => bail!("observation kind does not match the model"),
    };
    let t_pre = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let ell = args.ell.unwrap_or_else(|| default_ell(args.eps, rho, r));
    let table = build_class_table(ell, r)?;
    let scores = aggregate_scores(&pre.ytilde, &config, &table)?;
    let t_score = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let s_hat = select_top(&scores.z, planted_size(n, rho));
    let t_sel = clock.elapsed().as_secs_f64();
    Ok(json!({
        "s_hat": s_hat,
        "z": scores.z,
        "lambda": pre.lambda,
        "lambda_star": pre.lambda_star,
        "preprocess_skipped": pre.skipped,
        "ell": scores.ell,
        "k": scores.k,
        "trials": scores.t,
        "classes": table.len(),
        "timing": { "preprocess": t_pre, "score": t_score, "select": t_sel },
        "config": {
            "params": echo,
            "eps": args.eps,
            "ell": args.ell,
            "trials": args.trials,
            "seed": args.seed,
            "preprocess": args.preprocess,
        },
    }))
}

pub fn pds_params(n: usize, r: usize, rho: f64, q0: f64, q1: f64) -> Result<RecoverModel> {
    Ok(RecoverModel::Pds(PdsParams::new(n, r, rho, q0, q1)?))
}

pub fn stpca_params(n: usize, r: usize, rho: f64, lambda: f64, symmetrized: bool) -> Result<RecoverModel> {
    let mode = if symmetrized { NoiseMode::Symmetrized } else { NoiseMode::NoiseReduced };
    Ok(RecoverModel::Stpca(TpcaParams::new(n, r, lambda, PriorSpec::bernoulli(rho), mode)?))
}
