//! Brute-force connected (multi-)hypergraph counts and the comparison
//! inequalities against hypertree counts.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::connected_cover;
use super::counts::tree_baseline;
use crate::combin::{big_binomial, big_factorial, big_pow, binomial, for_each_combination};
use crate::error::{check_cap, Error, Result};

pub const DEFAULT_SUBSET_CAP: u128 = 20_000_000;

/// Number of connected simple `r`-uniform hypergraphs on `[k]` with `ell` edges.
pub fn count_connected_hypergraphs(k: usize, ell: usize, r: usize) -> Result<BigUint> {
    if r < 2 || k < r {
        return Ok(BigUint::from(u32::from(k == 1 && ell == 0)));
    }
    let slots = binomial(k, r) as usize;
    if ell > slots {
        return Ok(BigUint::zero());
    }
    check_cap("edge subsets", binomial(slots, ell), DEFAULT_SUBSET_CAP)?;
    let edges: Vec<Vec<usize>> = {
        let mut v = Vec::new();
        for_each_combination(k, r, |e| v.push(e.to_vec()));
        v
    };
    let mut count = 0u64;
    let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(ell);
    for_each_combination(slots, ell, |pick| {
        chosen.clear();
        chosen.extend(pick.iter().map(|&i| edges[i].clone()));
        if connected_cover(k, &chosen) {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// Which non-simple edges a multi-hypergraph may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiEdgeKind {
    /// Repeated `r`-subsets plus the `k` constant loops `{v, ..., v}`.
    SelfLoopsOnly,
    /// Any `r`-multiset of `[k]`.
    AllMultisets,
}

/// Connected `r`-uniform multi-hypergraphs on `[k]` with `ell` edges.
pub fn connected_multi_count(k: usize, ell: usize, r: usize, kind: MultiEdgeKind) -> Result<BigUint> {
    let mut items: Vec<Vec<usize>> = Vec::new();
    match kind {
        MultiEdgeKind::SelfLoopsOnly => {
            for_each_combination(k, r, |e| items.push(e.to_vec()));
            items.extend((0..k).map(|v| vec![v; r]));
        }
        MultiEdgeKind::AllMultisets => {
            items = crate::combin::MultisetIndex::new(k, r).all();
        }
    }
    let pool = items.len();
    if pool == 0 {
        return Ok(BigUint::zero());
    }
    check_cap("multi-edge selections", binomial(pool + ell - 1, ell), DEFAULT_SUBSET_CAP)?;
    let mut count = 0u64;
    let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(ell);
    // multisets of size ell over the pool via combinations of pool + ell - 1
    for_each_combination(pool + ell - 1, ell, |pick| {
        chosen.clear();
        for (j, &p) in pick.iter().enumerate() {
            chosen.push(items[p - j].clone());
        }
        if connected_cover(k, &chosen) {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// `sum_{m = l_k}^{ell} N_{k,m} binom(ell + k - 1, ell - m)`.
pub fn multi_edge_bound(k: usize, ell: usize, r: usize) -> Result<BigUint> {
    let lk = (k - 1).div_ceil(r - 1);
    let mut total = BigUint::zero();
    for m in lk..=ell {
        total += count_connected_hypergraphs(k, m, r)? * big_binomial(ell + k - 1, ell - m);
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimpleToTreeRow {
    pub k: usize,
    pub ell: usize,
    pub delta: usize,
    pub q: usize,
    pub count: BigUint,
    /// `N_{k,ell} / N_k`.
    pub ratio: f64,
    /// Constant-free intermediate inequality, compared exactly.
    pub intermediate_holds: bool,
    /// Smallest constant for which the final inequality holds (0 if no constant is involved).
    pub smallest_c: f64,
    /// Constant used for the asserted form.
    pub proof_c: f64,
    pub bound_at_proof_c: f64,
    pub holds: bool,
}

fn envelope_base(k: usize, lk: usize, delta: usize, q: usize, r: usize, c: f64) -> f64 {
    let (kf, lkf) = (k as f64, lk as f64);
    let mut b = libm::pow(c * kf * lkf, q as f64);
    if delta > 0 {
        b *= libm::pow(c * kf * (1.0 + lkf / delta as f64), ((r - 1) * delta) as f64);
    }
    b
}

/// Per-`ell` comparison of `N_{k,ell}` against `N_k` for every feasible `ell`.
///
/// The asserted constant is `C_r = e r`: the exponent prefactor satisfies
/// `(r-1) ell / t <= r l_k`, and the excess terms need `e (r/(r-1)!)^{1/(r-1)} <= e r`.
pub fn simple_to_tree_report(k: usize, r: usize) -> Result<Vec<SimpleToTreeRow>> {
    if k < r {
        return Err(Error::Domain("need k >= r".into()));
    }
    let lk = (k - 1).div_ceil(r - 1);
    let q = (r - 1) * lk - (k - 1);
    let nk = tree_baseline(k, r);
    let proof_c = core::f64::consts::E * r as f64;
    let mut rows = Vec::new();
    for ell in lk..=binomial(k, r) as usize {
        let count = count_connected_hypergraphs(k, ell, r)?;
        let delta = ell - lk;
        let t = (r - 1) * ell + 1 - k;
        let inter = BigRational::new(
            (big_factorial(k - 1) * big_pow(k, ell - 1 + t) * big_binomial(ell * (r - 1), t)).into(),
            (big_factorial(ell) * num_traits::pow(big_factorial(r - 1), ell)).into(),
        );
        let exact = BigRational::from_integer(count.clone().into());
        let ratio = (&exact / &nk).to_f64().unwrap_or(f64::INFINITY);
        let expo = q + (r - 1) * delta;
        let smallest_c = if expo == 0 {
            0.0
        } else {
            libm::pow(ratio / envelope_base(k, lk, delta, q, r, 1.0), 1.0 / expo as f64)
        };
        let bound = envelope_base(k, lk, delta, q, r, proof_c);
        rows.push(SimpleToTreeRow {
            k,
            ell,
            delta,
            q,
            ratio,
            intermediate_holds: exact <= inter,
            smallest_c,
            proof_c,
            bound_at_proof_c: bound,
            holds: ratio <= bound * (1.0 + 1e-12),
            count,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_examples() {
        assert_eq!(count_connected_hypergraphs(3, 1, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(count_connected_hypergraphs(3, 3, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(count_connected_hypergraphs(4, 3, 2).unwrap(), BigUint::from(16u32));
        assert_eq!(count_connected_hypergraphs(4, 2, 2).unwrap(), BigUint::zero());
    }

    #[test]
    fn multi_bound_small() {
        for r in [2usize, 3] {
            for k in r..=5 {
                let lk = (k - 1).div_ceil(r - 1);
                for ell in lk..=lk + 2 {
                    let n = connected_multi_count(k, ell, r, MultiEdgeKind::SelfLoopsOnly).unwrap();
                    assert!(n <= multi_edge_bound(k, ell, r).unwrap(), "k={k} ell={ell} r={r}");
                }
            }
        }
    }

    #[test]
    fn general_multisets_exceed_the_loop_bound() {
        let n = connected_multi_count(3, 2, 3, MultiEdgeKind::AllMultisets).unwrap();
        assert!(n > multi_edge_bound(3, 2, 3).unwrap());
    }
}
