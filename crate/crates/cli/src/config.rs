//! Sweep configuration: a flat key-value file with typed sections.
//!
//! ```text
//! # threshold sweep
//! [model]
//! kind = pds            # pds | stpca
//! r = 2
//! n = 60, 120
//! rho_exponent = 0.3    # rho = n^-0.3; or give `rho = ...`
//! q0 = 0.3
//! snr = 0.25, 0.5, 1, 2, 4   # or `q1 = ...` (pds) / `lambda = ...` (stpca)
//!
//! [recovery]
//! eps = 1
//! ell = 1               # or `auto`
//! trials = 12           # or `auto`
//! preprocess = false
//!
//! [run]
//! seeds = 0..20         # half-open range or comma list
//! output = results.csv
//! ```
//!
//! Every list key is a grid axis. Points are the Cartesian product in the
//! order `r, n, rho, q0, strength`, last axis fastest. `replicates = m`
//! stands in for `seeds = 0..m` when no seed list is given. An empty list
//! gives an empty grid.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pds,
    Stpca,
}

impl ModelKind {
    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Pds => "pds",
            ModelKind::Stpca => "stpca",
        }
    }
}

/// How the sparsity is specified on the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum RhoSpec {
    Values(Vec<f64>),
    /// `rho = n^-a`.
    Exponents(Vec<f64>),
}

/// The signal-strength axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Strength {
    Q1(Vec<f64>),
    Lambda(Vec<f64>),
    Snr(Vec<f64>),
}

impl Strength {
    fn values(&self) -> &[f64] {
        match self {
            Strength::Q1(v) | Strength::Lambda(v) | Strength::Snr(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoverySettings {
    pub eps: f64,
    pub ell: Option<usize>,
    pub trials: Option<usize>,
    pub preprocess: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub r: Vec<usize>,
    pub n: Vec<usize>,
    pub rho: RhoSpec,
    pub q0: Vec<f64>,
    pub strength: Strength,
    pub symmetrized_noise: bool,
    pub recovery: RecoverySettings,
    pub seeds: Vec<u64>,
    pub output: String,
}

/// One fully resolved grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub index: usize,
    pub r: usize,
    pub n: usize,
    pub rho: f64,
    pub q0: f64,
    /// q1 (pds) or lambda (stpca), resolved from the strength axis.
    pub strength: f64,
    pub snr: f64,
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            ensure!(!out.contains_key(&name), "line {}: duplicate section [{name}]", i + 1);
            out.insert(name.clone(), BTreeMap::new());
            current = Some(name);
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
        let section = current
            .as_ref()
            .ok_or_else(|| anyhow!("line {}: key outside any section", i + 1))?;
        let keys = out.get_mut(section).expect("section exists");
        let key = k.trim().to_string();
        ensure!(!keys.contains_key(&key), "line {}: duplicate key `{key}`", i + 1);
        keys.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| anyhow!("`{key}`: cannot parse `{}`: {e}", s.trim()))
        })
        .collect()
}

fn seed_list(v: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = v.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        ensure!(a < b, "empty seed range {a}..{b}");
        return Ok((a..b).collect());
    }
    list("seeds", v)
}

fn auto_or<T: std::str::FromStr>(key: &str, v: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if v == "auto" {
        return Ok(None);
    }
    v.parse::<T>()
        .map(Some)
        .map_err(|e| anyhow!("`{key}`: cannot parse `{v}`: {e}"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => bail!("`{key}` must be true or false, got `{v}`"),
    }
}

fn take(section: &mut BTreeMap<String, String>, key: &str) -> Option<String> {
    section.remove(key)
}

fn require(section: &mut BTreeMap<String, String>, name: &str, key: &str) -> Result<String> {
    take(section, key).ok_or_else(|| anyhow!("[{name}] is missing `{key}`"))
}

fn finish(section: BTreeMap<String, String>, name: &str) -> Result<()> {
    if let Some(k) = section.keys().next() {
        bail!("[{name}]: unknown key `{k}`");
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = parse_sections(text)?;
        let mut model = sections.remove("model").ok_or_else(|| anyhow!("missing [model]"))?;
        let mut rec = sections.remove("recovery").unwrap_or_default();
        let mut run = sections.remove("run").ok_or_else(|| anyhow!("missing [run]"))?;
        if let Some(name) = sections.keys().next() {
            bail!("unknown section [{name}]");
        }

        let kind = match require(&mut model, "model", "kind")?.as_str() {
            "pds" => ModelKind::Pds,
            "stpca" => ModelKind::Stpca,
            other => bail!("unknown model kind `{other}`"),
        };
        let r = list("r", &require(&mut model, "model", "r")?)?;
        let n = list("n", &require(&mut model, "model", "n")?)?;
        let rho = match (take(&mut model, "rho"), take(&mut model, "rho_exponent")) {
            (Some(v), None) => RhoSpec::Values(list("rho", &v)?),
            (None, Some(v)) => RhoSpec::Exponents(list("rho_exponent", &v)?),
            _ => bail!("[model] needs exactly one of `rho` and `rho_exponent`"),
        };
        let q0 = match (kind, take(&mut model, "q0")) {
            (ModelKind::Pds, Some(v)) => list("q0", &v)?,
            (ModelKind::Pds, None) => bail!("[model] is missing `q0`"),
            (ModelKind::Stpca, None) => vec![0.0],
            (ModelKind::Stpca, Some(_)) => bail!("`q0` is only meaningful for pds"),
        };
        let strength = match (take(&mut model, "q1"), take(&mut model, "lambda"), take(&mut model, "snr")) {
            (Some(v), None, None) if kind == ModelKind::Pds => Strength::Q1(list("q1", &v)?),
            (None, Some(v), None) if kind == ModelKind::Stpca => Strength::Lambda(list("lambda", &v)?),
            (None, None, Some(v)) => Strength::Snr(list("snr", &v)?),
            _ => bail!("[model] needs exactly one strength key: q1 (pds), lambda (stpca) or snr"),
        };
        let symmetrized_noise = match take(&mut model, "noise").as_deref() {
            None | Some("reduced") => false,
            Some("symmetrized") => true,
            Some(other) => bail!("unknown noise mode `{other}`"),
        };
        finish(model, "model")?;

        let recovery = RecoverySettings {
            eps: take(&mut rec, "eps").map(|v| v.parse()).transpose().context("`eps`")?.unwrap_or(1.0),
            ell: match take(&mut rec, "ell") {
                Some(v) => auto_or("ell", &v)?,
                None => None,
            },
            trials: match take(&mut rec, "trials") {
                Some(v) => auto_or("trials", &v)?,
                None => None,
            },
            preprocess: match take(&mut rec, "preprocess") {
                Some(v) => parse_bool("preprocess", &v)?,
                None => true,
            },
        };
        finish(rec, "recovery")?;
        ensure!(recovery.eps > 0.0, "`eps` must be > 0");
        ensure!(recovery.trials != Some(0), "`trials` must be >= 1");

        let seeds = match (take(&mut run, "seeds"), take(&mut run, "replicates")) {
            (Some(v), None) => seed_list(&v)?,
            (None, Some(m)) => (0..m.parse::<u64>().context("`replicates`")?).collect(),
            (None, None) => bail!("[run] needs `seeds` or `replicates`"),
            (Some(_), Some(_)) => bail!("[run] takes `seeds` or `replicates`, not both"),
        };
        ensure!(!seeds.is_empty(), "at least one seed is required");
        let output = take(&mut run, "output").unwrap_or_else(|| "results.csv".into());
        ensure!(
            !output.contains('/') && !output.contains('\\'),
            "`output` is a file name inside the output directory"
        );
        finish(run, "run")?;

        Ok(ExperimentConfig {
            model: kind,
            r,
            n,
            rho,
            q0,
            strength,
            symmetrized_noise,
            recovery,
            seeds,
            output,
        })
    }

    /// Resolved grid in output order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let rhos: &[f64] = match &self.rho {
            RhoSpec::Values(v) | RhoSpec::Exponents(v) => v,
        };
        let mut out = Vec::new();
        for &r in &self.r {
            for &n in &self.n {
                for &a in rhos {
                    let rho = match self.rho {
                        RhoSpec::Values(_) => a,
                        RhoSpec::Exponents(_) => (n as f64).powf(-a),
                    };
                    for &q0 in &self.q0 {
                        for &s in self.strength.values() {
                            let (strength, snr) = self.resolve(n, r, rho, q0, s);
                            out.push(GridPoint {
                                index: out.len(),
                                r,
                                n,
                                rho,
                                q0,
                                strength,
                                snr,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn resolve(&self, n: usize, r: usize, rho: f64, q0: f64, s: f64) -> (f64, f64) {
        use planted_core::models::{lambda_for_snr, PdsParams};
        match (&self.strength, self.model) {
            (Strength::Snr(_), ModelKind::Pds) => (PdsParams::q1_for_snr(n, r, rho, q0, s), s),
            (Strength::Snr(_), ModelKind::Stpca) => (lambda_for_snr(n, r, rho, s), s),
            (_, ModelKind::Pds) => {
                let p = PdsParams { n, r, rho, q0, q1: s };
                (s, p.snr().snr)
            }
            (_, ModelKind::Stpca) => (s, (s / lambda_for_snr(n, r, rho, 1.0)).powi(2)),
        }
    }
}
