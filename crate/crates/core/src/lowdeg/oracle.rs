//! Independent expectations of `phi_alpha x`, `phi_alpha psi_{beta gamma}`
//! and `phi_alpha phi_alpha'` by enumeration over the signal and the
//! observation, without the closed forms.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::hermite::{gaussian_expect, hermite, poly_mul, shifted_hermite};
use super::index::{submasks, PairFamily};
use super::system::{LowDegModel, MomentSystem};
use crate::error::{check_cap, Error, Result};
use crate::exact::{qpow, Q, Surd};

/// Largest `2^(n + slots)` for the literal planted enumeration.
pub const LITERAL_CAP: u128 = 1 << 12;

/// Oracle values for `c`, the nonzero entries of `M` and the Gram matrix
/// in the rescaled basis.
#[derive(Clone, Debug)]
pub struct OracleTables {
    pub c: Vec<Surd>,
    pub m: BTreeMap<(usize, u32, usize), Surd>,
    pub gram: Vec<Vec<Q>>,
}

fn theta_weight(rho: &Q, mask: u32, ones: u32) -> Q {
    let total = mask.count_ones() as i64;
    let k = ones.count_ones() as i64;
    qpow(rho, k) * qpow(&(Q::one() - rho), total - k)
}

fn gamma_factor(rho: &Q, gamma: u32, theta: u32) -> Q {
    let inside = (gamma & theta).count_ones() as i64;
    let outside = (gamma & !theta).count_ones() as i64;
    qpow(&(Q::one() - rho), inside) * qpow(&(-rho.clone()), outside)
}

/// Literal sum over every `theta` in `{0,1}^n` and every observation in
/// `{0,1}^N` for the planted model.
pub fn pds_literal_oracle(sys: &MomentSystem, family: PairFamily) -> Result<OracleTables> {
    let LowDegModel::Pds(p) = &sys.model else {
        return Err(Error::Unsupported("literal oracle needs the planted model".into()));
    };
    let u = &sys.sets.universe;
    let n = u.n;
    let slots = u.len();
    check_cap("literal configurations", 1u128 << (n + slots), LITERAL_CAP)?;
    let pairs = sys.sets.pairs(family);
    let big_d = sys.sets.d;
    let ng = sys.len();
    let one = Q::one();
    let mut c_acc = vec![Q::zero(); ng];
    let mut gram = vec![vec![Q::zero(); ng]; ng];
    // Per (pair, alpha): accumulators by the number of edges of beta inside K_S.
    let mut m_acc: Vec<Vec<Vec<Q>>> = vec![vec![vec![Q::zero(); big_d + 1]; ng]; pairs.len()];
    for theta in 0u32..(1 << n) {
        let pt = theta_weight(&p.rho, (1 << n) - 1, theta);
        let planted: Vec<bool> = u.vmask.iter().map(|&m| m & !theta == 0).collect();
        for y in 0u64..(1 << slots) {
            let mut py = pt.clone();
            for (e, &pl) in planted.iter().enumerate() {
                let q = if pl { &p.q1 } else { &p.q0 };
                py *= if y >> e & 1 == 1 { q.clone() } else { &one - q };
            }
            let yv = |e: usize| if y >> e & 1 == 1 { one.clone() } else { Q::zero() };
            let phi: Vec<Q> = sys
                .sets
                .graphs
                .iter()
                .map(|g| {
                    g.0.iter()
                        .map(|&(s, _)| yv(s as usize) - &p.q0)
                        .fold(one.clone(), |a, b| a * b)
                })
                .collect();
            for a in 0..ng {
                let w = &py * &phi[a];
                if theta & 1 == 1 {
                    c_acc[a] += &w;
                }
                for b in a..ng {
                    gram[a][b] += &w * &phi[b];
                }
            }
            for (pi, &(b, gamma)) in pairs.iter().enumerate() {
                let beta = &sys.sets.graphs[b];
                let mut num = gamma_factor(&p.rho, gamma, theta);
                let mut inside = 0;
                for &(s, _) in &beta.0 {
                    let s = s as usize;
                    if planted[s] {
                        inside += 1;
                        num *= yv(s) - &p.q1;
                    } else {
                        num *= yv(s) - &p.q0;
                    }
                }
                let w = &py * &num;
                for a in 0..ng {
                    m_acc[pi][a][inside] += &w * &phi[a];
                }
            }
        }
    }
    for a in 0..ng {
        for b in 0..a {
            gram[a][b] = gram[b][a].clone();
        }
    }
    let s_inv = Surd::sqrt(&(&p.rho * (&one - &p.rho)))?.recip_monomial()?;
    let s0_inv = Surd::sqrt(&(&p.q0 * (&one - &p.q0)))?.recip_monomial()?;
    let s1_inv = Surd::sqrt(&(&p.q1 * (&one - &p.q1)))?.recip_monomial()?;
    let mut m = BTreeMap::new();
    for (pi, &(b, gamma)) in pairs.iter().enumerate() {
        let size = sys.sets.graphs[b].size();
        let base = s_inv.pow(gamma.count_ones() as usize);
        for a in 0..ng {
            let mut v = Surd::zero();
            for (j, acc) in m_acc[pi][a].iter().enumerate() {
                if acc.is_zero() {
                    continue;
                }
                let f = &(&s1_inv.pow(j) * &s0_inv.pow(size - j)) * &base;
                v.add_assign_ref(&f.scale(acc));
            }
            if !v.is_zero() {
                m.insert((b, gamma, a), v);
            }
        }
    }
    Ok(OracleTables {
        c: c_acc.into_iter().map(Surd::from_rational).collect(),
        m,
        gram,
    })
}

/// Per-edge conditional expectation for the planted model.
fn pds_edge(p_edge: &Q, q_center: &Q, psi_center: &Q, a: u8, b: u8) -> Q {
    let one = Q::one();
    let mut total = Q::zero();
    for (y, pr) in [(one.clone(), p_edge.clone()), (Q::zero(), &one - p_edge)] {
        let v = qpow(&(&y - q_center), a as i64) * qpow(&(&y - psi_center), b as i64);
        total += pr * v;
    }
    total
}

/// Planted-model oracle that enumerates `theta` and, given `theta`, each
/// observation entry separately using conditional independence.
pub fn pds_factored_oracle(sys: &MomentSystem, family: PairFamily) -> Result<OracleTables> {
    pds_factored(sys, &sys.sets.pairs(family))
}

fn pds_factored(sys: &MomentSystem, pairs: &[(usize, u32)]) -> Result<OracleTables> {
    let LowDegModel::Pds(p) = &sys.model else {
        return Err(Error::Unsupported("factored oracle needs the planted model".into()));
    };
    let u = &sys.sets.universe;
    let ng = sys.len();
    let one = Q::one();
    let s_inv = Surd::sqrt(&(&p.rho * (&one - &p.rho)))?.recip_monomial()?;
    let s0_inv = Surd::sqrt(&(&p.q0 * (&one - &p.q0)))?.recip_monomial()?;
    let s1_inv = Surd::sqrt(&(&p.q1 * (&one - &p.q1)))?.recip_monomial()?;
    let edge_prob = |s: usize, theta: u32| {
        if u.vmask[s] & !theta == 0 {
            &p.q1
        } else {
            &p.q0
        }
    };
    let mut c = Vec::with_capacity(ng);
    let mut gram = vec![vec![Q::zero(); ng]; ng];
    for a in 0..ng {
        let ga = &sys.sets.graphs[a];
        let mask = sys.sets.masks[a] | 1;
        let mut acc = Q::zero();
        for theta in submasks(mask) {
            if theta & 1 == 0 {
                continue;
            }
            let mut v = theta_weight(&p.rho, mask, theta);
            for &(s, m) in &ga.0 {
                v *= pds_edge(edge_prob(s as usize, theta), &p.q0, &p.q0, m, 0);
            }
            acc += v;
        }
        c.push(Surd::from_rational(acc));
        for b in a..ng {
            let gb = &sys.sets.graphs[b];
            let mask = sys.sets.masks[a] | sys.sets.masks[b];
            let union = ga.plus(gb);
            let mut acc = Q::zero();
            for theta in submasks(mask) {
                let mut v = theta_weight(&p.rho, mask, theta);
                for &(s, m) in &union.0 {
                    v *= pds_edge(edge_prob(s as usize, theta), &p.q0, &p.q0, m, 0);
                }
                acc += v;
            }
            gram[a][b] = acc.clone();
            gram[b][a] = acc;
        }
    }
    let mut m = BTreeMap::new();
    for &(b, gamma) in pairs {
        let gb = &sys.sets.graphs[b];
        for a in 0..ng {
            let ga = &sys.sets.graphs[a];
            let mask = sys.sets.masks[a] | sys.sets.masks[b] | gamma;
            let mut slots: Vec<usize> = ga.0.iter().map(|&(s, _)| s as usize).collect();
            slots.extend(gb.0.iter().map(|&(s, _)| s as usize));
            slots.sort_unstable();
            slots.dedup();
            let mut acc = vec![Q::zero(); gb.size() + 1];
            for theta in submasks(mask) {
                let mut v = theta_weight(&p.rho, mask, theta) * gamma_factor(&p.rho, gamma, theta);
                let mut inside = 0;
                for &s in &slots {
                    let planted = u.vmask[s] & !theta == 0;
                    let bm = gb.mult(s);
                    if planted {
                        inside += bm as usize;
                    }
                    let center = if planted { &p.q1 } else { &p.q0 };
                    v *= pds_edge(edge_prob(s, theta), &p.q0, center, ga.mult(s), bm);
                    if v.is_zero() {
                        break;
                    }
                }
                acc[inside] += v;
            }
            let mut v = Surd::zero();
            for (j, x) in acc.iter().enumerate() {
                if !x.is_zero() {
                    let f = &(&s1_inv.pow(j) * &s0_inv.pow(gb.size() - j))
                        * &s_inv.pow(gamma.count_ones() as usize);
                    v.add_assign_ref(&f.scale(x));
                }
            }
            if !v.is_zero() {
                m.insert((b, gamma, a), v);
            }
        }
    }
    Ok(OracleTables { c, m, gram })
}

/// Sparse PCA oracle: exact `theta` enumeration and Gaussian expectations
/// of monic Hermite products on each entry.
pub fn sparse_oracle(sys: &MomentSystem, family: PairFamily) -> Result<OracleTables> {
    sparse(sys, &sys.sets.pairs(family))
}

fn sparse(sys: &MomentSystem, pairs: &[(usize, u32)]) -> Result<OracleTables> {
    let LowDegModel::SparsePca(p) = &sys.model else {
        return Err(Error::Unsupported("sparse oracle needs the sparse PCA model".into()));
    };
    let u = &sys.sets.universe;
    let ng = sys.len();
    let one = Q::one();
    let maxdeg = sys.sets.d;
    // E[He_a(x + Z) He_b(Z)] and E[He_a(x + Z) He_b(x + Z)] for x in {0, lambda}.
    let xs = [Q::zero(), p.lambda.clone()];
    let mut cross = vec![vec![[Q::zero(), Q::zero()]; maxdeg + 1]; maxdeg + 1];
    let mut same = vec![vec![[Q::zero(), Q::zero()]; 2 * maxdeg + 1]; 2 * maxdeg + 1];
    for a in 0..=maxdeg {
        for b in 0..=maxdeg {
            for (k, x) in xs.iter().enumerate() {
                cross[a][b][k] = gaussian_expect(&poly_mul(&shifted_hermite(a, x), &hermite(b)));
                same[a][b][k] =
                    gaussian_expect(&poly_mul(&shifted_hermite(a, x), &shifted_hermite(b, x)));
            }
        }
    }
    let signal = |s: usize, theta: u32| usize::from(u.vmask[s] & !theta == 0);
    let mut c = Vec::with_capacity(ng);
    let mut gram = vec![vec![Q::zero(); ng]; ng];
    for a in 0..ng {
        let ga = &sys.sets.graphs[a];
        let mask = sys.sets.masks[a] | 1;
        let mut acc = Q::zero();
        for theta in submasks(mask) {
            if theta & 1 == 0 {
                continue;
            }
            let mut v = theta_weight(&p.rho, mask, theta);
            for &(s, m) in &ga.0 {
                v *= &same[m as usize][0][signal(s as usize, theta)];
            }
            acc += v;
        }
        let inv = Surd::sqrt(&Q::new(1.into(), (ga.factorial() as i64).into()))?;
        c.push(inv.scale(&acc));
        for b in a..ng {
            let gb = &sys.sets.graphs[b];
            let mask = sys.sets.masks[a] | sys.sets.masks[b];
            let mut slots: Vec<usize> = ga.0.iter().map(|&(s, _)| s as usize).collect();
            slots.extend(gb.0.iter().map(|&(s, _)| s as usize));
            slots.sort_unstable();
            slots.dedup();
            let mut acc = Q::zero();
            for theta in submasks(mask) {
                let mut v = theta_weight(&p.rho, mask, theta);
                for &s in &slots {
                    v *= &same[ga.mult(s) as usize][gb.mult(s) as usize][signal(s, theta)];
                    if v.is_zero() {
                        break;
                    }
                }
                acc += v;
            }
            gram[a][b] = acc.clone();
            gram[b][a] = acc;
        }
    }
    let s_inv = Surd::sqrt(&(&p.rho * (&one - &p.rho)))?.recip_monomial()?;
    let mut m = BTreeMap::new();
    for &(b, gamma) in pairs {
        let gb = &sys.sets.graphs[b];
        for a in 0..ng {
            let ga = &sys.sets.graphs[a];
            let mut slots: Vec<usize> = ga.0.iter().map(|&(s, _)| s as usize).collect();
            slots.extend(gb.0.iter().map(|&(s, _)| s as usize));
            slots.sort_unstable();
            slots.dedup();
            // A factor vanishing for both signal values kills the entry.
            if slots.iter().any(|&s| {
                let f = &cross[ga.mult(s) as usize][gb.mult(s) as usize];
                f[0].is_zero() && f[1].is_zero()
            }) {
                continue;
            }
            let mask = sys.sets.masks[a] | sys.sets.masks[b] | gamma;
            let mut acc = Q::zero();
            for theta in submasks(mask) {
                let mut v = theta_weight(&p.rho, mask, theta) * gamma_factor(&p.rho, gamma, theta);
                for &s in &slots {
                    v *= &cross[ga.mult(s) as usize][gb.mult(s) as usize][signal(s, theta)];
                    if v.is_zero() {
                        break;
                    }
                }
                acc += v;
            }
            if acc.is_zero() {
                continue;
            }
            let norm = Surd::sqrt(&Q::new(
                1.into(),
                ((ga.factorial() * gb.factorial()) as i64).into(),
            ))?;
            let v = (&norm * &s_inv.pow(gamma.count_ones() as usize)).scale(&acc);
            m.insert((b, gamma, a), v);
        }
    }
    Ok(OracleTables { c, m, gram })
}

/// Oracle appropriate for the model: literal for small planted instances,
/// factored planted otherwise, Gaussian for sparse PCA.
pub fn oracle_tables(sys: &MomentSystem, family: PairFamily) -> Result<OracleTables> {
    match &sys.model {
        LowDegModel::Pds(_) => {
            let u = &sys.sets.universe;
            if (1u128 << (u.n + u.len())) <= LITERAL_CAP {
                pds_literal_oracle(sys, family)
            } else {
                pds_factored_oracle(sys, family)
            }
        }
        LowDegModel::SparsePca(_) => sparse_oracle(sys, family),
    }
}

/// Oracle `c` and Gram matrix only, for sizes where the `M` table is
/// too large.
pub fn oracle_gram(sys: &MomentSystem) -> Result<OracleTables> {
    match &sys.model {
        LowDegModel::Pds(_) => pds_factored(sys, &[]),
        LowDegModel::SparsePca(_) => sparse(sys, &[]),
    }
}

/// Cells compared between the closed forms and an oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleComparison {
    pub c_checked: usize,
    pub m_checked: usize,
    pub m_nonzero: usize,
}

/// Compares every `c_alpha` and every `M` cell on `family` exactly.
pub fn compare_with_oracle(
    sys: &MomentSystem,
    oracle: &OracleTables,
    family: PairFamily,
) -> Result<OracleComparison> {
    for a in 0..sys.len() {
        if sys.c[a] != oracle.c[a] {
            return Err(Error::Consistency(format!(
                "c mismatch at graph {a}: closed form {} vs oracle {}",
                sys.c[a], oracle.c[a]
            )));
        }
    }
    let mut out = OracleComparison {
        c_checked: sys.len(),
        m_checked: 0,
        m_nonzero: 0,
    };
    let zero = Surd::zero();
    for (b, gamma) in sys.sets.pairs(family) {
        for a in 0..sys.len() {
            let closed = sys.entry(b, gamma, a)?;
            let want = oracle.m.get(&(b, gamma, a)).unwrap_or(&zero);
            if closed != *want {
                return Err(Error::Consistency(format!(
                    "M mismatch at ({b},{gamma:#b};{a}): closed form {closed} vs oracle {want}"
                )));
            }
            out.m_checked += 1;
            if !want.is_zero() {
                out.m_nonzero += 1;
            }
        }
    }
    Ok(out)
}
