//! Closed-form moment systems `c_alpha = E[phi_alpha x]` and
//! `M_{beta gamma, alpha} = E[phi_alpha psi_{beta gamma}]` for the planted
//! dense subhypergraph and the noise-reduced sparse tensor PCA models.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::index::{submasks, EdgeUniverse, Graph, IndexSets, PairFamily};
use crate::error::{Error, Result};
use crate::exact::{qi, qpow, Q, Surd};

/// Planted dense subhypergraph with rational parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdsExact {
    pub n: usize,
    pub r: usize,
    pub rho: Q,
    pub q0: Q,
    pub q1: Q,
}

/// Noise-reduced sparse tensor PCA, `Y = lambda theta^{(r)} + Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePcaExact {
    pub n: usize,
    pub r: usize,
    pub rho: Q,
    pub lambda: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LowDegModel {
    Pds(PdsExact),
    SparsePca(SparsePcaExact),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

fn check_rho(rho: &Q) -> Result<()> {
    if !rho.is_positive() || *rho >= Q::one() {
        return Err(Error::Domain("rho must lie strictly between 0 and 1".into()));
    }
    Ok(())
}

impl LowDegModel {
    pub fn n(&self) -> usize {
        match self {
            LowDegModel::Pds(p) => p.n,
            LowDegModel::SparsePca(p) => p.n,
        }
    }

    pub fn r(&self) -> usize {
        match self {
            LowDegModel::Pds(p) => p.r,
            LowDegModel::SparsePca(p) => p.r,
        }
    }

    pub fn rho(&self) -> &Q {
        match self {
            LowDegModel::Pds(p) => &p.rho,
            LowDegModel::SparsePca(p) => &p.rho,
        }
    }

    pub fn is_multi(&self) -> bool {
        matches!(self, LowDegModel::SparsePca(_))
    }

    pub fn validate(&self) -> Result<()> {
        check_rho(self.rho())?;
        if let LowDegModel::Pds(p) = self {
            if !p.q0.is_positive() || p.q0 >= Q::one() {
                return Err(Error::Domain("q0 must lie strictly between 0 and 1".into()));
            }
            if p.q1 < p.q0 || p.q1 > Q::one() {
                return Err(Error::Domain("need q0 <= q1 <= 1".into()));
            }
            if p.q1.is_one() {
                return Err(Error::Domain(
                    "q1 = 1 makes the normalization sqrt(q1(1-q1)) vanish".into(),
                ));
            }
        }
        Ok(())
    }

    /// `E[x^2]` for the estimand `x = theta_1`.
    pub fn second_moment(&self) -> Q {
        self.rho().clone()
    }
}

struct PdsConsts {
    s_inv: Surd,
    sigma0: Surd,
    ratio: Surd,
    ratio_sq: Q,
    gap: Q,
}

/// Closed-form moment system over a labeled index set.
#[derive(Clone, Debug)]
pub struct MomentSystem {
    pub model: LowDegModel,
    pub sets: IndexSets,
    pub c: Vec<Surd>,
    pub mode: Mode,
    overrides: BTreeMap<(usize, u32, usize), Surd>,
}

/// Builds `c` over every graph with at most `d` edges.
pub fn build_moment_system(model: &LowDegModel, d: usize, mode: Mode) -> Result<MomentSystem> {
    model.validate()?;
    let universe = EdgeUniverse::new(model.n(), model.r(), model.is_multi())?;
    let sets = IndexSets::new(universe, d)?;
    let mut sys = MomentSystem {
        model: model.clone(),
        sets,
        c: Vec::new(),
        mode,
        overrides: BTreeMap::new(),
    };
    sys.c = (0..sys.sets.len()).map(|a| sys.c_closed(a)).collect::<Result<_>>()?;
    Ok(sys)
}

impl MomentSystem {
    fn pds_consts(&self, p: &PdsExact) -> Result<PdsConsts> {
        let one = Q::one();
        let s = Surd::sqrt(&(&p.rho * (&one - &p.rho)))?;
        let v0 = &p.q0 * (&one - &p.q0);
        let v1 = &p.q1 * (&one - &p.q1);
        let ratio_sq = &v1 / &v0;
        Ok(PdsConsts {
            s_inv: s.recip_monomial()?,
            sigma0: Surd::sqrt(&v0)?,
            ratio: Surd::sqrt(&ratio_sq)?,
            ratio_sq,
            gap: &p.q1 - &p.q0,
        })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn graph(&self, i: usize) -> &Graph {
        &self.sets.graphs[i]
    }

    fn c_closed(&self, a: usize) -> Result<Surd> {
        let g = &self.sets.graphs[a];
        let k = (self.sets.masks[a] | 1).count_ones() as i64;
        match &self.model {
            LowDegModel::Pds(p) => Ok(Surd::from_rational(
                qpow(&p.rho, k) * qpow(&(&p.q1 - &p.q0), g.size() as i64),
            )),
            LowDegModel::SparsePca(p) => {
                let inv = Surd::sqrt(&Q::new(1.into(), (g.factorial() as i64).into()))?;
                Ok(inv.scale(&(qpow(&p.lambda, g.size() as i64) * qpow(&p.rho, k))))
            }
        }
    }

    /// `M_{beta gamma, alpha}` from the closed form.
    pub fn entry(&self, beta: usize, gamma: u32, alpha: usize) -> Result<Surd> {
        let mut v = self.entry_closed(beta, gamma, alpha)?;
        if let Some(extra) = self.overrides.get(&(beta, gamma, alpha)) {
            v.add_assign_ref(extra);
        }
        Ok(v)
    }

    /// Adds `delta` to one entry of `M`, for mutation tests.
    pub fn perturb(&mut self, beta: usize, gamma: u32, alpha: usize, delta: Q) {
        self.overrides
            .entry((beta, gamma, alpha))
            .or_insert_with(Surd::zero)
            .add_assign_ref(&Surd::from_rational(delta));
    }

    fn entry_closed(&self, beta: usize, gamma: u32, alpha: usize) -> Result<Surd> {
        let a = &self.sets.graphs[alpha];
        let b = &self.sets.graphs[beta];
        if !b.leq(a) {
            return Ok(Surd::zero());
        }
        let u = &self.sets.universe;
        let diff = a.minus(b);
        let dm = diff.vmask(u);
        match &self.model {
            LowDegModel::SparsePca(p) => {
                if gamma & !dm != 0 {
                    return Ok(Surd::zero());
                }
                let one = Q::one();
                let g = gamma.count_ones() as i64;
                let rad = Q::new((b.factorial() as i64).into(), (a.factorial() as i64).into())
                    * qpow(&((&one - &p.rho) / &p.rho), g);
                let val = qi(a.binom(b) as i64)
                    * qpow(&p.lambda, diff.size() as i64)
                    * qpow(&p.rho, dm.count_ones() as i64);
                Ok(Surd::sqrt(&rad)?.scale(&val))
            }
            LowDegModel::Pds(p) => {
                let am = self.sets.masks[alpha];
                if gamma & !am != 0 {
                    return Ok(Surd::zero());
                }
                let k = self.pds_consts(p)?;
                let one = Q::one();
                let not_rho = &one - &p.rho;
                let mut acc = [Q::zero(), Q::zero()];
                let total = am.count_ones() as i64;
                for t in submasks(am) {
                    if dm & !t != 0 {
                        continue;
                    }
                    let ones = t.count_ones() as i64;
                    let mut w = qpow(&p.rho, ones) * qpow(&not_rho, total - ones);
                    let gi = (gamma & t).count_ones() as i64;
                    let go = (gamma & !t).count_ones() as i64;
                    w *= qpow(&not_rho, gi) * qpow(&(-&p.rho), go);
                    let j: usize = b
                        .0
                        .iter()
                        .filter(|&&(s, _)| u.vmask[s as usize] & !t == 0)
                        .map(|&(_, m)| m as usize)
                        .sum();
                    w *= qpow(&k.ratio_sq, (j / 2) as i64);
                    acc[j % 2] += w;
                }
                let theta_part = &Surd::from_rational(acc[0].clone())
                    + &k.ratio.scale(&acc[1]);
                let scale = qpow(&k.gap, diff.size() as i64);
                let out = &(&theta_part * &k.sigma0.pow(b.size()))
                    * &k.s_inv.pow(gamma.count_ones() as usize);
                Ok(out.scale(&scale))
            }
        }
    }

    /// Candidate `gamma` mask outside of which the column vanishes.
    fn gamma_support(&self, beta: &Graph, alpha: usize) -> u32 {
        match &self.model {
            LowDegModel::Pds(_) => self.sets.masks[alpha],
            LowDegModel::SparsePca(_) => {
                self.sets.graphs[alpha].minus(beta).vmask(&self.sets.universe)
            }
        }
    }

    /// Nonzero entries of column `alpha` restricted to `family`.
    pub fn column(&self, alpha: usize, family: PairFamily) -> Result<Vec<((usize, u32), Surd)>> {
        let n = self.sets.n();
        let mut out = Vec::new();
        for beta in self.sets.graphs[alpha].sub_multisets() {
            let b = self
                .sets
                .position(&beta)
                .ok_or_else(|| Error::Consistency("sub-multiset missing from the basis".into()))?;
            let bm = self.sets.masks[b];
            let support = match family {
                PairFamily::Restricted => self.gamma_support(&beta, alpha) & (bm | 1),
                PairFamily::Full => self.gamma_support(&beta, alpha),
            };
            for gamma in submasks(support) {
                if !family.allows(bm, gamma, n) {
                    continue;
                }
                let v = self.entry(b, gamma, alpha)?;
                if !v.is_zero() {
                    out.push(((b, gamma), v));
                }
            }
        }
        for &(b, g, a) in self.overrides.keys() {
            if a == alpha
                && family.allows(self.sets.masks[b], g, n)
                && !out.iter().any(|((x, y), _)| *x == b && *y == g)
            {
                let v = self.entry(b, g, a)?;
                if !v.is_zero() {
                    out.push(((b, g), v));
                }
            }
        }
        Ok(out)
    }

    /// Factor `sqrt(alpha!)` turning the Hermite basis into the monic one;
    /// one for the planted model.
    pub fn basis_scale(&self, alpha: usize) -> Result<Surd> {
        match &self.model {
            LowDegModel::Pds(_) => Ok(Surd::one()),
            LowDegModel::SparsePca(_) => {
                Surd::sqrt(&qi(self.sets.graphs[alpha].factorial() as i64))
            }
        }
    }

    /// `c` in the rescaled basis, which is rational.
    pub fn scaled_c(&self) -> Result<Vec<Q>> {
        (0..self.len())
            .map(|a| {
                let v = &self.c[a] * &self.basis_scale(a)?;
                v.to_rational()
                    .ok_or_else(|| Error::Consistency(format!("scaled c_{a} is irrational")))
            })
            .collect()
    }

    /// Gram matrix `sum_{(beta,gamma)} M M` in the rescaled basis.
    pub fn gram(&self, family: PairFamily) -> Result<Vec<Vec<Q>>> {
        let rows = self.rows(family)?;
        let n = self.len();
        let mut g = vec![vec![Surd::zero(); n]; n];
        for entries in rows.values() {
            for (i, (a, x)) in entries.iter().enumerate() {
                for (b, y) in &entries[i..] {
                    g[*a][*b].add_product(x, y);
                }
            }
        }
        let mut out = vec![vec![Q::zero(); n]; n];
        for a in 0..n {
            for b in a..n {
                let v = g[a][b].to_rational().ok_or_else(|| {
                    Error::Consistency(format!("Gram entry ({a},{b}) has odd radical powers"))
                })?;
                out[a][b] = v.clone();
                out[b][a] = v;
            }
        }
        Ok(out)
    }

    /// Same Gram matrix in floating point.
    pub fn gram_f64(&self, family: PairFamily) -> Result<Vec<Vec<f64>>> {
        let rows = self.rows(family)?;
        let n = self.len();
        let mut g = vec![vec![0.0f64; n]; n];
        for entries in rows.values() {
            let vals: Vec<(usize, f64)> = entries.iter().map(|(a, x)| (*a, x.to_f64())).collect();
            for (i, (a, x)) in vals.iter().enumerate() {
                for (b, y) in &vals[i..] {
                    g[*a][*b] += x * y;
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                g[a][b] = g[b][a];
            }
        }
        Ok(g)
    }

    /// Rows of `M` with columns multiplied by the basis scale.
    pub fn rows(&self, family: PairFamily) -> Result<BTreeMap<(usize, u32), Vec<(usize, Surd)>>> {
        let mut rows: BTreeMap<(usize, u32), Vec<(usize, Surd)>> = BTreeMap::new();
        for a in 0..self.len() {
            let scale = self.basis_scale(a)?;
            for (key, v) in self.column(a, family)? {
                rows.entry(key).or_default().push((a, &v * &scale));
            }
        }
        Ok(rows)
    }

    /// `(mu, alpha_star)` of the reduction to good graphs: the component of
    /// vertex 0 (or the empty graph) and `E[phi]` of the remainder.
    pub fn reduction_pair(&self, alpha: usize) -> Result<(Surd, usize)> {
        let u = &self.sets.universe;
        let g = &self.sets.graphs[alpha];
        let star = g
            .components(u)
            .into_iter()
            .find(|c| c.vmask(u) & 1 == 1)
            .unwrap_or_else(Graph::empty);
        let rest = g.minus(&star);
        let k = rest.vmask(u).count_ones() as i64;
        let mu = match &self.model {
            LowDegModel::Pds(p) => Surd::from_rational(
                qpow(&p.rho, k) * qpow(&(&p.q1 - &p.q0), rest.size() as i64),
            ),
            LowDegModel::SparsePca(p) => {
                Surd::sqrt(&Q::new(1.into(), (rest.factorial() as i64).into()))?
                    .scale(&(qpow(&p.lambda, rest.size() as i64) * qpow(&p.rho, k)))
            }
        };
        let idx = self
            .sets
            .position(&star)
            .ok_or_else(|| Error::Consistency("component missing from the basis".into()))?;
        Ok((mu, idx))
    }
}

/// Outcome of the reduction hypothesis check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub non_good: usize,
    pub entries_checked: usize,
}

/// Checks `c_alpha = mu c_star` and `M_{bg,alpha} = mu M_{bg,star}` on all
/// good pairs for every non-good `alpha`.
pub fn reduction_check(sys: &MomentSystem) -> Result<ReductionReport> {
    let pairs = sys.sets.good_pairs();
    let mut report = ReductionReport {
        non_good: 0,
        entries_checked: 0,
    };
    for a in 0..sys.len() {
        if sys.sets.good(a) {
            continue;
        }
        report.non_good += 1;
        let (mu, star) = sys.reduction_pair(a)?;
        if !(&sys.c[a] - &(&mu * &sys.c[star])).is_zero() {
            return Err(Error::Consistency(format!("c fails to factor at graph {a}")));
        }
        for &(b, g) in &pairs {
            let lhs = sys.entry(b, g, a)?;
            let rhs = &mu * &sys.entry(b, g, star)?;
            if !(&lhs - &rhs).is_zero() {
                return Err(Error::Consistency(format!(
                    "M fails to factor at graph {a}, pair ({b},{g:#b})"
                )));
            }
            report.entries_checked += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn pds(n: usize) -> LowDegModel {
        LowDegModel::Pds(PdsExact {
            n,
            r: 2,
            rho: q(1, 3),
            q0: q(1, 4),
            q1: q(1, 2),
        })
    }

    #[test]
    fn c_at_empty_graph_is_rho() {
        let s = build_moment_system(&pds(4), 2, Mode::Exact).unwrap();
        assert_eq!(s.c[0].to_rational(), Some(q(1, 3)));
        let sp = LowDegModel::SparsePca(SparsePcaExact {
            n: 3,
            r: 2,
            rho: q(1, 2),
            lambda: q(1, 3),
        });
        let s = build_moment_system(&sp, 2, Mode::Exact).unwrap();
        assert_eq!(s.c[0].to_rational(), Some(q(1, 2)));
        for a in 0..s.len() {
            assert_eq!(s.entry(a, 0, a).unwrap().to_rational(), Some(q(1, 1)));
        }
    }

    #[test]
    fn q1_one_rejected() {
        let m = LowDegModel::Pds(PdsExact {
            n: 4,
            r: 2,
            rho: q(1, 3),
            q0: q(1, 4),
            q1: q(1, 1),
        });
        assert!(matches!(
            build_moment_system(&m, 1, Mode::Exact),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pds_entry_vanishes_off_subgraphs() {
        let s = build_moment_system(&pds(4), 2, Mode::Exact).unwrap();
        for a in 0..s.len() {
            for b in 0..s.len() {
                if !s.graph(b).leq(s.graph(a)) {
                    for g in 0..16 {
                        assert!(s.entry(b, g, a).unwrap().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn reduction_holds_small() {
        let s = build_moment_system(&pds(4), 2, Mode::Exact).unwrap();
        let rep = reduction_check(&s).unwrap();
        assert!(rep.non_good > 0 && rep.entries_checked > 0);
    }
}
