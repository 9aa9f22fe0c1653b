//! Low-degree correlation for tensor PCA with a general prior, exactly by
//! enumerating a finite prior and by Monte Carlo over the observation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{for_each_graph, CumulantTable};
use crate::error::{check_cap, Error, Result};
use crate::exact::{q_to_f64, qpow, Q};
use crate::lowdeg::certificate::{corr_from_gram, corr_from_gram_f64};
use crate::lowdeg::hermite::{gaussian_expect, poly_mul, shifted_hermite};
use crate::lowdeg::index::Graph;
use crate::rng::{derive_seed, stream, Substream};

fn basis(table: &CumulantTable, d: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for_each_graph(&table.universe, d, |g| out.push(g));
    out
}

/// `Corr^2_{<=D}` in the monic Hermite basis by exact expectation over
/// every `theta` in the prior's support.
pub fn exact_corr_enumerated(table: &CumulantTable, d: usize) -> Result<Q> {
    let atoms = table
        .prior
        .atoms()
        .ok_or_else(|| Error::Unsupported("exact enumeration needs a finite prior".into()))?;
    let u = &table.universe;
    let n = u.n;
    let configs = (atoms.len() as u128).pow(n as u32);
    check_cap("prior configurations", configs, 1 << 16)?;
    let graphs = basis(table, d);
    let ng = graphs.len();
    check_cap("cumulant Gram basis", ng as u128, 2000)?;
    let mut same: BTreeMap<(u8, u8, Q), Q> = BTreeMap::new();
    let mut c = vec![Q::zero(); ng];
    let mut gram = vec![vec![Q::zero(); ng]; ng];
    let mut ex2 = Q::zero();
    let mut idx = vec![0usize; n];
    for _ in 0..configs {
        let theta: Vec<&Q> = idx.iter().map(|&i| &atoms[i].0).collect();
        let p: Q = idx.iter().map(|&i| atoms[i].1.clone()).product();
        let x: Q = theta.iter().take(table.m).map(|&v| v.clone()).product();
        let xs: Vec<Q> = u
            .edges
            .iter()
            .map(|e| e.iter().fold(table.lambda.clone(), |acc, &v| acc * theta[v]))
            .collect();
        ex2 += &p * &x * &x;
        for (a, ga) in graphs.iter().enumerate() {
            let mono: Q = ga.0.iter().map(|&(s, m)| qpow(&xs[s as usize], m as i64)).product();
            c[a] += &p * &x * mono;
            for b in a..ng {
                let gb = &graphs[b];
                let mut slots: Vec<usize> = ga.0.iter().map(|&(s, _)| s as usize).collect();
                slots.extend(gb.0.iter().map(|&(s, _)| s as usize));
                slots.sort_unstable();
                slots.dedup();
                let mut v = p.clone();
                for s in slots {
                    let key = (ga.mult(s), gb.mult(s), xs[s].clone());
                    let f = same.entry(key).or_insert_with_key(|(i, j, xv)| {
                        gaussian_expect(&poly_mul(&shifted_hermite(*i as usize, xv), &shifted_hermite(*j as usize, xv)))
                    });
                    v *= &*f;
                }
                gram[a][b] += v;
            }
        }
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < atoms.len() {
                break;
            }
            *slot = 0;
        }
    }
    for a in 0..ng {
        for b in 0..a {
            gram[a][b] = gram[b][a].clone();
        }
    }
    let rep = corr_from_gram(&gram, &c, &ex2)?;
    Ok(rep.corr_sq_exact.unwrap_or_else(Q::zero))
}

/// Monte Carlo `Corr^2_{<=D}` from sampled Gram matrices.
#[derive(Clone, Debug)]
pub struct McCorr {
    pub samples: u64,
    pub batches: usize,
    /// Estimate from the pooled moments.
    pub estimate: f64,
    /// Standard error from the spread of the batch estimates.
    pub sigma: f64,
    pub batch_estimates: Vec<f64>,
}

fn monic_hermite(k: usize, y: f64) -> f64 {
    let (mut a, mut b) = (1.0, y);
    if k == 0 {
        return 1.0;
    }
    for j in 1..k {
        let next = y * b - j as f64 * a;
        a = b;
        b = next;
    }
    b
}

struct Moments {
    c: Vec<f64>,
    gram: Vec<f64>,
    ex2: f64,
    count: u64,
}

impl Moments {
    fn new(ng: usize) -> Self {
        Moments {
            c: vec![0.0; ng],
            gram: vec![0.0; ng * ng],
            ex2: 0.0,
            count: 0,
        }
    }

    fn corr(&self, ng: usize) -> Result<f64> {
        let t = self.count as f64;
        let gram: Vec<Vec<f64>> = (0..ng)
            .map(|i| (0..ng).map(|j| self.gram[i.min(j) * ng + i.max(j)] / t).collect())
            .collect();
        let c: Vec<f64> = self.c.iter().map(|v| v / t).collect();
        Ok(corr_from_gram_f64(&gram, &c, self.ex2 / t)?.corr_sq)
    }
}

/// Samples `theta` from the prior and `Y = X + Z`, accumulates
/// `E[x phi]`, `E[phi phi^T]` in the monic Hermite basis, and solves.
pub fn monte_carlo_corr(table: &CumulantTable, d: usize, samples: u64, batches: usize, seed: u64) -> Result<McCorr> {
    if batches < 2 || samples < batches as u64 {
        return Err(Error::Param("Monte Carlo needs at least two batches".into()));
    }
    let u = &table.universe;
    let n = u.n;
    let graphs = basis(table, d);
    let ng = graphs.len();
    check_cap("Monte Carlo Gram basis", ng as u128, 500)?;
    let lambda = q_to_f64(&table.lambda);
    let per = samples / batches as u64;
    let mut pooled = Moments::new(ng);
    let mut batch_estimates = Vec::with_capacity(batches);
    let mut phi = vec![0.0f64; ng];
    let mut theta = vec![0.0f64; n];
    let mut y = vec![0.0f64; u.len()];
    for b in 0..batches {
        let mut mom = Moments::new(ng);
        for t in 0..per {
            let trial = b as u64 * per + t;
            let mut s = Substream::new(derive_seed(seed, trial), stream::MONTE_CARLO);
            for (i, th) in theta.iter_mut().enumerate() {
                *th = table.prior.sample(&mut s.item(i as u64));
            }
            for (e, ye) in y.iter_mut().enumerate() {
                let x = u.edges[e].iter().fold(lambda, |acc, &v| acc * theta[v]);
                *ye = x + s.item((n + e) as u64).normal();
            }
            for (k, g) in graphs.iter().enumerate() {
                phi[k] = g.0.iter().map(|&(s, m)| monic_hermite(m as usize, y[s as usize])).product();
            }
            let x: f64 = theta.iter().take(table.m).product();
            mom.ex2 += x * x;
            for i in 0..ng {
                mom.c[i] += x * phi[i];
                let pi = phi[i];
                let row = &mut mom.gram[i * ng..(i + 1) * ng];
                for j in i..ng {
                    row[j] += pi * phi[j];
                }
            }
            mom.count += 1;
        }
        batch_estimates.push(mom.corr(ng)?);
        pooled.ex2 += mom.ex2;
        pooled.count += mom.count;
        for (a, v) in pooled.c.iter_mut().zip(&mom.c) {
            *a += v;
        }
        for (a, v) in pooled.gram.iter_mut().zip(&mom.gram) {
            *a += v;
        }
    }
    let estimate = pooled.corr(ng)?;
    let mean = batch_estimates.iter().sum::<f64>() / batches as f64;
    let var = batch_estimates.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (batches as f64 - 1.0);
    Ok(McCorr {
        samples: pooled.count,
        batches,
        estimate,
        sigma: libm::sqrt(var / batches as f64),
        batch_estimates,
    })
}

