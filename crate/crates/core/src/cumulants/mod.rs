//! Joint cumulants of the estimand `x = theta_1 ... theta_m` with the
//! signal entries `X_e = lambda prod_{i in e} theta_i` of tensor PCA
//! under a general prior.
//!
//! Graphs are labeled multi-hypergraphs over the `r`-multiset universe;
//! `alpha bar` is `alpha` plus the hyperedge on the first `m` vertices.

mod gram;
mod prior;

pub use gram::{exact_corr_enumerated, monte_carlo_corr, McCorr};
pub use prior::{MomentEnvelope, Prior};

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::combin::{binomial, MultisetIndex};
use crate::error::{check_cap, Error, Result};
use crate::exact::{q_to_f64, qi, qpow, Q};
use crate::lowdeg::index::{EdgeUniverse, Graph};

/// Largest number of graphs summed by the correlation bound.
pub const BOUND_CAP: u128 = 2_000_000;

/// Vertex degrees of `alpha`, counting repeated vertices in an edge.
pub fn degrees(u: &EdgeUniverse, alpha: &Graph) -> Vec<usize> {
    let mut deg = vec![0usize; u.n];
    for &(s, mult) in &alpha.0 {
        for &v in &u.edges[s as usize] {
            deg[v] += mult as usize;
        }
    }
    deg
}

/// Degrees of `alpha bar`.
pub fn bar_degrees(u: &EdgeUniverse, alpha: &Graph, m: usize) -> Vec<usize> {
    let mut deg = degrees(u, alpha);
    for d in deg.iter_mut().take(m) {
        *d += 1;
    }
    deg
}

/// `sum of deg(i)` over vertices of degree at least 3.
pub fn excess_delta(deg: &[usize]) -> usize {
    deg.iter().filter(|&&d| d >= 3).sum()
}

fn bar_connected(u: &EdgeUniverse, alpha: &Graph, m: usize) -> bool {
    let mut comps: Vec<u32> = Vec::new();
    let seeds = alpha
        .0
        .iter()
        .map(|&(s, _)| u.vmask[s as usize])
        .chain(core::iter::once(((1u64 << m) - 1) as u32));
    for mask in seeds {
        let mut merged = mask;
        comps.retain(|&c| {
            if c & merged != 0 {
                merged |= c;
                false
            } else {
                true
            }
        });
        comps.push(merged);
    }
    comps.len() == 1
}

/// Good: empty, or `alpha bar` connected with every degree at least 2.
pub fn is_good_general(u: &EdgeUniverse, alpha: &Graph, m: usize) -> bool {
    if alpha.is_empty() {
        return true;
    }
    let deg = bar_degrees(u, alpha, m);
    deg.iter().all(|&d| d == 0 || d >= 2) && bar_connected(u, alpha, m)
}

/// `r |alpha| - 2 |V(alpha)| + m`.
pub fn excess_edges(u: &EdgeUniverse, alpha: &Graph, m: usize) -> i64 {
    let v = alpha.vmask(u).count_ones() as i64;
    (u.r * alpha.size()) as i64 - 2 * v + m as i64
}

/// Memoized cumulants and complexities for one `(n, r, m, prior, lambda)`.
#[derive(Clone, Debug)]
pub struct CumulantTable {
    pub universe: EdgeUniverse,
    pub m: usize,
    pub prior: Prior,
    pub lambda: Q,
    kappa: BTreeMap<Graph, Q>,
    complexity: BTreeMap<Graph, u128>,
    moments: Vec<Q>,
}

impl CumulantTable {
    pub fn new(n: usize, r: usize, m: usize, prior: Prior, lambda: Q) -> Result<Self> {
        if m < 2 || m > n {
            return Err(Error::Param("estimand order m needs 2 <= m <= n".into()));
        }
        prior.validate()?;
        Ok(CumulantTable {
            universe: EdgeUniverse::new(n, r, true)?,
            m,
            prior,
            lambda,
            kappa: BTreeMap::new(),
            complexity: BTreeMap::new(),
            moments: Vec::new(),
        })
    }

    fn moment(&mut self, k: usize) -> Q {
        while self.moments.len() <= k {
            let next = self.prior.moment(self.moments.len());
            self.moments.push(next);
        }
        self.moments[k].clone()
    }

    fn product_moment(&mut self, deg: &[usize]) -> Q {
        let mut v = Q::one();
        for &d in deg {
            if d > 0 {
                v *= self.moment(d);
                if v.is_zero() {
                    break;
                }
            }
        }
        v
    }

    /// `E[X^beta]`.
    pub fn signal_moment(&mut self, beta: &Graph) -> Q {
        let deg = degrees(&self.universe, beta);
        qpow(&self.lambda, beta.size() as i64) * self.product_moment(&deg)
    }

    /// `E[x X^alpha]`.
    pub fn estimand_moment(&mut self, alpha: &Graph) -> Q {
        let deg = bar_degrees(&self.universe, alpha, self.m);
        qpow(&self.lambda, alpha.size() as i64) * self.product_moment(&deg)
    }

    /// `kappa_alpha` by the full recursion over every `beta < alpha`.
    pub fn kappa(&mut self, alpha: &Graph) -> Q {
        if let Some(v) = self.kappa.get(alpha) {
            return v.clone();
        }
        let mut v = self.estimand_moment(alpha);
        for beta in alpha.sub_multisets() {
            if beta == *alpha {
                continue;
            }
            let kb = self.kappa(&beta);
            if kb.is_zero() {
                continue;
            }
            let rest = alpha.minus(&beta);
            let em = self.signal_moment(&rest);
            v -= qi(alpha.binom(&beta) as i64) * em * kb;
        }
        self.kappa.insert(alpha.clone(), v.clone());
        v
    }

    pub fn is_good(&self, alpha: &Graph) -> bool {
        is_good_general(&self.universe, alpha, self.m)
    }

    /// `H(alpha) = sum over good beta < alpha of binom(alpha, beta) H(beta)`.
    pub fn complexity(&mut self, alpha: &Graph) -> Result<u128> {
        if alpha.is_empty() {
            return Ok(1);
        }
        if let Some(&v) = self.complexity.get(alpha) {
            return Ok(v);
        }
        check_cap("sub-multigraphs", alpha.0.iter().map(|&(_, m)| m as u128 + 1).product(), 1 << 20)?;
        let mut total: u128 = 0;
        for beta in alpha.sub_multisets() {
            if beta == *alpha || !self.is_good(&beta) {
                continue;
            }
            let h = self.complexity(&beta)?;
            total = (alpha.binom(&beta) as u128)
                .checked_mul(h)
                .and_then(|t| t.checked_add(total))
                .ok_or_else(|| Error::Numerical("complexity overflows u128".into()))?;
        }
        self.complexity.insert(alpha.clone(), total);
        Ok(total)
    }

    /// `H(alpha)` by expanding over subsets of the labeled edge list.
    pub fn complexity_direct(&self, alpha: &Graph) -> Result<u128> {
        let mut edges = Vec::new();
        for &(s, m) in &alpha.0 {
            for _ in 0..m {
                edges.push(s as usize);
            }
        }
        check_cap("labeled edge subsets", 1u128 << edges.len(), 1 << 16)?;
        Ok(self.direct_rec(&edges))
    }

    fn direct_rec(&self, edges: &[usize]) -> u128 {
        if edges.is_empty() {
            return 1;
        }
        let full = (1u32 << edges.len()) - 1;
        let mut total = 0;
        for mask in 0..full {
            let sub: Vec<usize> = (0..edges.len()).filter(|&i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
            let g = Graph::from_slots(&sub);
            if self.is_good(&g) {
                total += self.direct_rec(&sub);
            }
        }
        total
    }

    /// `|kappa| <= lambda^{|alpha|} M(delta(alpha bar)) H(alpha)` with the
    /// two sides.
    pub fn envelope_check(&mut self, alpha: &Graph) -> Result<EnvelopeRow> {
        if !self.is_good(alpha) {
            return Err(Error::Domain("envelope applies to good graphs".into()));
        }
        let deg = bar_degrees(&self.universe, alpha, self.m);
        let delta = excess_delta(&deg);
        let env = MomentEnvelope::new(&self.prior, delta);
        let h = self.complexity(alpha)?;
        let kappa = self.kappa(alpha);
        let rhs = qpow(&self.lambda.abs(), alpha.size() as i64) * env.get(delta)? * Q::from_integer(h.into());
        let row = EnvelopeRow {
            kappa: kappa.clone(),
            bound: rhs.clone(),
            delta_bar: delta,
            complexity: h,
            holds: kappa.abs() <= rhs,
        };
        if !row.holds {
            return Err(Error::Consistency(alloc::format!(
                "cumulant envelope violated: |{kappa}| > {rhs}"
            )));
        }
        Ok(row)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeRow {
    pub kappa: Q,
    pub bound: Q,
    pub delta_bar: usize,
    pub complexity: u128,
    pub holds: bool,
}

/// Every multiset of `1..=d` slots in the universe, fed to `f`.
pub fn for_each_graph(u: &EdgeUniverse, d: usize, mut f: impl FnMut(Graph)) {
    f(Graph::empty());
    for size in 1..=d {
        for pick in MultisetIndex::new(u.len(), size).all() {
            let mut g = Graph::empty();
            for s in pick {
                g.add(s, 1);
            }
            f(g);
        }
    }
}

/// `sum over |alpha| <= D of kappa_alpha^2 / alpha!`.
#[derive(Clone, Debug)]
pub struct CumulantBound {
    pub value: Q,
    pub contributing: usize,
    pub enumerated: u128,
}

impl CumulantBound {
    pub fn value_f64(&self) -> f64 {
        q_to_f64(&self.value)
    }
}

/// The correlation bound summed over good graphs; the rest vanish.
pub fn cumulant_corr_bound(table: &mut CumulantTable, d: usize) -> Result<CumulantBound> {
    let u = table.universe.clone();
    if u.n > 8 || d > 3 {
        return Err(Error::Size {
            what: "cumulant bound (n <= 8, D <= 3)",
            size: u.n.max(d) as u128,
            cap: 8,
        });
    }
    let slots = u.len();
    let enumerated: u128 = (0..=d).map(|k| binomial(slots + k - 1, k)).sum();
    check_cap("graphs in the cumulant bound", enumerated, BOUND_CAP)?;
    let mut good = Vec::new();
    for_each_graph(&u, d, |g| {
        if !g.is_empty() && is_good_general(&u, &g, table.m) {
            good.push(g);
        }
    });
    let k0 = table.kappa(&Graph::empty());
    let mut value = &k0 * &k0;
    let mut contributing = usize::from(!k0.is_zero());
    for g in &good {
        let k = table.kappa(g);
        if !k.is_zero() {
            contributing += 1;
            value += &k * &k / Q::from_integer((g.factorial() as i64).into());
        }
    }
    Ok(CumulantBound { value, contributing, enumerated })
}

/// Number of good graphs with `k` vertices and `l` edges, and the
/// vertex-choice times stars-and-bars count it cannot exceed.
pub fn good_count_check(table: &CumulantTable, d: usize) -> Result<Vec<(usize, usize, u128, u128)>> {
    let u = &table.universe;
    let m = table.m;
    let mut counts: BTreeMap<(usize, usize), u128> = BTreeMap::new();
    for_each_graph(u, d, |g| {
        if !g.is_empty() && is_good_general(u, &g, m) {
            *counts.entry((g.vmask(u).count_ones() as usize, g.size())).or_insert(0) += 1;
        }
    });
    let mut out = Vec::new();
    for ((k, l), c) in counts {
        let types = binomial(k + u.r - 1, u.r) as usize;
        let bound = binomial(u.n - m, k - m) * binomial(types + l - 1, l);
        if c > bound {
            return Err(Error::Consistency(alloc::format!(
                "good-graph count {c} exceeds {bound} at k={k}, l={l}"
            )));
        }
        out.push((k, l, c, bound));
    }
    Ok(out)
}

/// One point of the scaling probe, `lambda = c n^{-r/4} D^{-(r-2)/4}`.
#[derive(Clone, Debug)]
pub struct ScalingRow {
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    pub bound: f64,
    /// `bound n^{m/2}`.
    pub fitted_constant: f64,
}

/// Evaluates the correlation bound along the scaling curve; the rational
/// lambda is the nearest value with denominator 10^6.
pub fn scaling_probe(r: usize, m: usize, c: f64, prior: &Prior, grid: &[(usize, usize)]) -> Result<Vec<ScalingRow>> {
    let mut out = Vec::new();
    for &(n, d) in grid {
        let lam = c * libm::pow(n as f64, -(r as f64) / 4.0) * libm::pow(d as f64, -((r as f64) - 2.0) / 4.0);
        let lq = crate::exact::q((lam * 1e6).round() as i64, 1_000_000);
        let mut table = CumulantTable::new(n, r, m, prior.clone(), lq.clone())?;
        let b = cumulant_corr_bound(&mut table, d)?;
        let bound = b.value_f64();
        out.push(ScalingRow {
            n,
            d,
            lambda: q_to_f64(&lq),
            bound,
            fitted_constant: bound * libm::pow(n as f64, m as f64 / 2.0),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn single_edge_kappa_is_lambda() {
        let mut t = CumulantTable::new(4, 2, 2, Prior::Rademacher, q(1, 3)).unwrap();
        let e = Graph::from_slots(&[t.universe.slot(&[0, 1]).unwrap()]);
        assert!(t.is_good(&e));
        assert_eq!(t.kappa(&e), q(1, 3));
        assert_eq!(t.kappa(&Graph::empty()), Q::zero());
        assert_eq!(t.complexity(&e).unwrap(), 1);
    }

    #[test]
    fn pendant_vertex_is_not_good() {
        let t = CumulantTable::new(4, 2, 2, Prior::Gaussian, q(1, 2)).unwrap();
        let u = &t.universe;
        let g = Graph::from_slots(&[u.slot(&[0, 1]).unwrap(), u.slot(&[1, 2]).unwrap()]);
        assert!(!t.is_good(&g));
        assert!(t.is_good(&Graph::empty()));
    }

    #[test]
    fn excess_values() {
        assert_eq!(excess_delta(&[2, 2, 1]), 0);
        assert_eq!(excess_delta(&[3, 2, 0]), 3);
    }
}
