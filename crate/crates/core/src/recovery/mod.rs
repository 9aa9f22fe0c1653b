//! Color-coded hypertree scoring: preprocessing, the vertex/edge dynamic
//! program, aggregation over colorings and classes, and top-`floor(n rho)`
//! selection. Also naive oracles and a pattern-count estimator.

mod aggregate;
mod dp;
mod naive;
mod patterns;
mod preprocess;

pub use aggregate::{
    colorful_aggregate, coloring_leaves, default_ell, default_trials, pairwise_sum, aggregate_scores,
    DEFAULT_K_BUDGET,
};
pub use dp::{color_coded_score, ScoreContext};
pub use naive::{full_tree_polynomial, naive_colorful_score, special_family_members};
pub use patterns::{is_strongly_balanced, pattern_automorphisms, pattern_count_estimator};
pub use preprocess::{preprocess_pds, preprocess_tpca, lambda_star, Preprocessed};

use alloc::format;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Sub};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hypertrees::build_class_table;
use crate::models::{Observation, PdsParams, SubsetTensor, TpcaParams};
use crate::rng::{derive_seed, stream, Substream};

/// Scalar type of the scoring recursion.
pub trait Weight:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_biguint(v: &BigUint) -> Self;

    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self = self.clone() + a.clone() * b.clone();
    }
}

impl Weight for f64 {
    fn from_biguint(v: &BigUint) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }

    #[inline]
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Weight for BigRational {
    fn from_biguint(v: &BigUint) -> Self {
        BigRational::from_integer(v.clone().into())
    }

    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

/// Vertex coloring `c: [n] -> [k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub k: usize,
    pub colors: Vec<usize>,
}

impl Coloring {
    pub fn new(k: usize, colors: Vec<usize>) -> Result<Self> {
        if let Some(&c) = colors.iter().find(|&&c| c >= k) {
            return Err(Error::Domain(format!("color {c} outside [0,{k})")));
        }
        Ok(Coloring { k, colors })
    }

    /// Uniform coloring for trial `trial`, reproducible from `seed`.
    pub fn random(n: usize, k: usize, seed: u64, trial: u64) -> Self {
        let mut s = Substream::new(derive_seed(seed, trial), stream::COLORING);
        let colors = (0..n).map(|v| s.item(v as u64).below(k as u64) as usize).collect();
        Coloring { k, colors }
    }

    /// The `index`-th coloring in base-`k` order (vertex 0 least significant).
    pub fn from_index(n: usize, k: usize, mut index: u128) -> Self {
        let colors = (0..n)
            .map(|_| {
                let c = (index % k as u128) as usize;
                index /= k as u128;
                c
            })
            .collect();
        Coloring { k, colors }
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    /// Coloring with vertex `sigma[v]` colored as `v` was.
    pub fn permuted(&self, sigma: &[usize]) -> Self {
        let mut colors = self.colors.clone();
        for (v, &c) in self.colors.iter().enumerate() {
            colors[sigma[v]] = c;
        }
        Coloring { k: self.k, colors }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryConfig {
    pub eps: f64,
    pub ell_override: Option<usize>,
    pub t_override: Option<usize>,
    pub seed: u64,
    pub disable_preprocessing: bool,
}

impl RecoveryConfig {
    pub fn new(eps: f64, seed: u64) -> Self {
        RecoveryConfig {
            eps,
            ell_override: None,
            t_override: None,
            seed,
            disable_preprocessing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::Param(format!("eps={} must be > 0", self.eps)));
        }
        if self.t_override == Some(0) {
            return Err(Error::Param("trial count must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector {
    pub z: Vec<f64>,
    pub ell: usize,
    pub k: usize,
    pub t: usize,
    pub lambda_star: f64,
    pub preprocess_skipped: bool,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelParams {
    Pds(PdsParams),
    Tpca(TpcaParams),
}

impl ModelParams {
    pub fn n(&self) -> usize {
        match self {
            ModelParams::Pds(p) => p.n,
            ModelParams::Tpca(p) => p.n,
        }
    }

    pub fn r(&self) -> usize {
        match self {
            ModelParams::Pds(p) => p.r,
            ModelParams::Tpca(p) => p.r,
        }
    }

    pub fn rho(&self) -> Result<f64> {
        match self {
            ModelParams::Pds(p) => Ok(p.rho),
            ModelParams::Tpca(p) => p
                .prior
                .rho()
                .ok_or_else(|| Error::Domain("recovery needs a Bernoulli prior".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryOutput {
    pub s_hat: Vec<usize>,
    pub scores: ScoreVector,
}

/// The `m` indices with the largest scores, ties broken toward larger
/// indices; returned sorted ascending.
pub fn select_top(z: &[f64], m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(b.cmp(&a)));
    let mut out: Vec<usize> = order.into_iter().take(m).collect();
    out.sort_unstable();
    out
}

/// `floor(n rho)` computed without floating drift at exact products.
pub fn planted_size(n: usize, rho: f64) -> usize {
    let x = n as f64 * rho;
    let f = libm::floor(x + 1e-9);
    if f < 0.0 {
        0
    } else {
        f as usize
    }
}

/// Full pipeline: preprocess, score with `t` colorings, select the top set.
pub fn recover(y: &Observation, params: &ModelParams, config: &RecoveryConfig) -> Result<RecoveryOutput> {
    config.validate()?;
    let rho = params.rho()?;
    let (n, r) = (params.n(), params.r());
    if y.n() != n || y.r() != r {
        return Err(Error::Domain("observation does not match parameters".into()));
    }
    let pre = match (y, params) {
        (Observation::Hypergraph(h), ModelParams::Pds(p)) => {
            preprocess_pds(h, p, config.eps, config.seed, config.disable_preprocessing)?
        }
        (Observation::Tensor(t), ModelParams::Tpca(p)) => {
            preprocess_tpca(t, p, config.eps, config.seed, config.disable_preprocessing)?
        }
        _ => return Err(Error::Domain("observation kind does not match model".into())),
    };
    let ell = config.ell_override.unwrap_or_else(|| default_ell(config.eps, rho, r));
    let table = build_class_table(ell, r)?;
    let mut scores = aggregate_scores(&pre.ytilde, config, &table)?;
    scores.lambda_star = pre.lambda_star;
    scores.preprocess_skipped = pre.skipped;
    let s_hat = select_top(&scores.z, planted_size(n, rho));
    Ok(RecoveryOutput { s_hat, scores })
}

/// Convenience for oracle tests: standardized tensor over `r`-subsets.
pub fn standardized_input(y: &Observation, q0: f64) -> SubsetTensor<f64> {
    match y {
        Observation::Hypergraph(h) => SubsetTensor::standardized(h, q0),
        Observation::Tensor(t) => SubsetTensor::distinct_entries(t),
    }
}
