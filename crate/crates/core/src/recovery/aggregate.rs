//! Sum of class scores over colorings, with a fixed pairwise reduction
//! tree keyed by `(trial, class)`.

use alloc::vec;
use alloc::vec::Vec;

use super::{Coloring, RecoveryConfig, ScoreContext, ScoreVector, Weight};
use crate::combin::factorial_u128;
use crate::error::Result;
use crate::hypertrees::{total_vertices, TreeClassTable};
use crate::models::SubsetTensor;

/// Largest vertex count `k` used when `ell` is not given.
pub const DEFAULT_K_BUDGET: usize = 13;

/// `min(ceil((4/eps) ln(1/rho)), largest ell with k <= DEFAULT_K_BUDGET)`.
pub fn default_ell(eps: f64, rho: f64, r: usize) -> usize {
    let theory = if rho >= 1.0 || rho <= 0.0 {
        0.0
    } else {
        libm::ceil(4.0 / eps * libm::log(1.0 / rho))
    };
    let mut budget = 0usize;
    while total_vertices(budget + 1, r) <= DEFAULT_K_BUDGET {
        budget += 1;
    }
    if theory.is_finite() && theory < budget as f64 {
        theory as usize
    } else {
        budget
    }
}

/// `ceil(k^k / k! * ln n)`, at least 1.
pub fn default_trials(k: usize, n: usize) -> usize {
    let ratio = libm::exp(k as f64 * libm::log(k as f64)) / factorial_u128(k) as f64;
    let t = libm::ceil(ratio * libm::log(n.max(2) as f64));
    if t.is_finite() && t >= 1.0 {
        t as usize
    } else {
        1
    }
}

/// `sum_H A_H / |Aut(H)|` for one coloring, summed in class order.
pub fn colorful_aggregate<W: Weight>(
    y: &SubsetTensor<W>,
    coloring: &Coloring,
    table: &TreeClassTable,
) -> Result<Vec<W>> {
    let mut ctx = ScoreContext::new(y, coloring)?;
    let mut z = vec![W::zero(); y.n()];
    for class in &table.classes {
        let aut = W::from_biguint(&class.aut);
        for (zi, a) in z.iter_mut().zip(ctx.score(&class.tree)?) {
            *zi = zi.clone() + a / aut.clone();
        }
    }
    Ok(z)
}

/// Per-class vectors `A_H / |Aut(H)|` for one coloring, in class order.
pub fn coloring_leaves(
    y: &SubsetTensor<f64>,
    coloring: &Coloring,
    table: &TreeClassTable,
) -> Result<Vec<Vec<f64>>> {
    let mut ctx = ScoreContext::new(y, coloring)?;
    table
        .classes
        .iter()
        .map(|class| {
            let aut = f64::from_biguint(&class.aut);
            Ok(ctx.score(&class.tree)?.into_iter().map(|a| a / aut).collect())
        })
        .collect()
}

/// Elementwise sum by recursive halving; the tree shape depends only on the count.
pub fn pairwise_sum(leaves: &[Vec<f64>], n: usize) -> Vec<f64> {
    match leaves.len() {
        0 => vec![0.0; n],
        1 => leaves[0].clone(),
        len => {
            let (a, b) = leaves.split_at(len / 2);
            let mut left = pairwise_sum(a, n);
            for (x, y) in left.iter_mut().zip(pairwise_sum(b, n)) {
                *x += y;
            }
            left
        }
    }
}

/// `z = sum_s sum_H A_H(s) / |Aut(H)|` with `t` colorings drawn from `config.seed`.
pub fn aggregate_scores(
    y: &SubsetTensor<f64>,
    config: &RecoveryConfig,
    table: &TreeClassTable,
) -> Result<ScoreVector> {
    let n = y.n();
    let k = table.k();
    let t = config.t_override.unwrap_or_else(|| default_trials(k, n));
    let mut leaves = Vec::with_capacity(t * table.len());
    for s in 0..t {
        let coloring = Coloring::random(n, k, config.seed, s as u64);
        leaves.extend(coloring_leaves(y, &coloring, table)?);
    }
    Ok(ScoreVector {
        z: pairwise_sum(&leaves, n),
        ell: table.ell,
        k,
        t,
        lambda_star: f64::NAN,
        preprocess_skipped: false,
        seed: config.seed,
    })
}
