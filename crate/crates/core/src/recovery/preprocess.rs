//! Signal-reduction preprocessing down to the threshold strength `lambda_star`.

use crate::combin::{factorial_u128, multiplicity_factorial};
use crate::error::{Error, Result};
use crate::models::{Hypergraph, NoiseMode, Observation, PdsParams, SubsetTensor, SymTensor, TpcaParams};
use crate::rng::{stream, Substream};

#[derive(Clone, Debug, PartialEq)]
pub struct Preprocessed {
    pub observation: Observation,
    pub ytilde: SubsetTensor<f64>,
    pub lambda: f64,
    pub lambda_star: f64,
    /// Keep probability / mixing weight actually used.
    pub p: f64,
    /// True when `lambda_star > lambda`, so the input passed through unchanged.
    pub skipped: bool,
}

/// `sqrt((r-2)! (1+eps) / (e n^{r-1} rho^{2r-2}))`.
pub fn lambda_star(n: usize, r: usize, rho: f64, eps: f64) -> f64 {
    let r1 = (r - 1) as f64;
    libm::sqrt(
        factorial_u128(r - 2) as f64 * (1.0 + eps)
            / (core::f64::consts::E * libm::pow(n as f64, r1) * libm::pow(rho, 2.0 * r1)),
    )
}

fn mixing(lambda: f64, target: f64, disabled: bool) -> (f64, f64, bool) {
    if disabled {
        return (lambda, 1.0, false);
    }
    let p = target / lambda;
    if !(p <= 1.0) {
        (lambda, 1.0, true)
    } else {
        (target, p, false)
    }
}

/// Keeps each `Y_e` with probability `p`, else redraws it from `Ber(q0)`,
/// then standardizes with `q0`.
pub fn preprocess_pds(
    y: &Hypergraph,
    params: &PdsParams,
    eps: f64,
    seed: u64,
    disabled: bool,
) -> Result<Preprocessed> {
    params.validate()?;
    if y.n() != params.n || y.r() != params.r {
        return Err(Error::Domain("hypergraph does not match parameters".into()));
    }
    let lambda = params.lambda();
    let (lambda_star, p, skipped) = mixing(lambda, lambda_star(params.n, params.r, params.rho, eps), disabled);
    let mut out = y.clone();
    if p < 1.0 {
        let mut s = Substream::new(seed, stream::PREPROCESS);
        for rank in 0..y.num_slots() {
            let mut item = s.item(rank as u64);
            if item.uniform() >= p {
                out.set_rank(rank, item.bernoulli(params.q0));
            }
        }
    }
    let ytilde = SubsetTensor::standardized(&out, params.q0);
    Ok(Preprocessed {
        observation: Observation::Hypergraph(out),
        ytilde,
        lambda,
        lambda_star,
        p,
        skipped,
    })
}

/// `Y_star = p Y + sqrt(1 - p^2) G` with `G` a fresh copy of the noise.
pub fn preprocess_tpca(
    y: &SymTensor,
    params: &TpcaParams,
    eps: f64,
    seed: u64,
    disabled: bool,
) -> Result<Preprocessed> {
    params.validate()?;
    let rho = params
        .prior
        .rho()
        .ok_or_else(|| Error::Domain("preprocessing needs a Bernoulli prior".into()))?;
    let (lambda_star, p, skipped) =
        mixing(params.lambda, lambda_star(params.n, params.r, rho, eps), disabled);
    let mut out = y.clone();
    if p < 1.0 {
        let mix = libm::sqrt(1.0 - p * p);
        let mut s = Substream::new(seed, stream::PREPROCESS_NOISE);
        for rank in 0..out.values.len() {
            let sd = match y.mode {
                NoiseMode::NoiseReduced => 1.0,
                NoiseMode::Symmetrized => {
                    libm::sqrt(multiplicity_factorial(&y.index().unrank(rank)) as f64)
                }
            };
            out.values[rank] = p * y.values[rank] + mix * sd * s.item(rank as u64).normal();
        }
    }
    let ytilde = SubsetTensor::distinct_entries(&out);
    Ok(Preprocessed {
        observation: Observation::Tensor(out),
        ytilde,
        lambda: params.lambda,
        lambda_star,
        p,
        skipped,
    })
}
