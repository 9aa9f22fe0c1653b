//! The planted model restricted to the event that every small subgraph of
//! the planted hypergraph is sparse: `c~`, `M~`, the transfer terms
//! `H_{beta alpha}`, the recursion for `F` and the bound tables.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::index::{submasks, EdgeUniverse, Graph, IndexSets};
use super::system::PdsExact;
use crate::combin::{binomial, for_each_combination};
use crate::error::{check_cap, Error, Result};
use crate::exact::{q_to_f64, qi, qpow, Q, Surd};
use crate::models::PdsParams;
use crate::rng::{derive_seed, stream, Substream};

/// Largest number of edge subsets `event_check` will inspect.
pub const EVENT_SUBSET_CAP: u128 = 20_000_000;

/// Density threshold `tau = xi / a + delta`; a graph is sparse when
/// `|alpha| <= floor(tau |V(alpha)|)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventSpec {
    pub xi: Q,
    pub a: Q,
    pub b: Q,
    pub delta: Q,
}

impl EventSpec {
    pub fn new(xi: Q, a: Q, b: Q, delta: Q) -> Result<Self> {
        if !xi.is_positive() || !a.is_positive() || b < a || delta.is_negative() {
            return Err(Error::Param("event spec needs xi, a > 0, b >= a, delta >= 0".into()));
        }
        Ok(EventSpec { xi, a, b, delta })
    }

    /// Spec with the given density threshold.
    pub fn with_tau(tau: Q) -> Result<Self> {
        EventSpec::new(tau, Q::one(), qi(2), Q::zero())
    }

    pub fn tau(&self) -> Q {
        &self.xi / &self.a + &self.delta
    }

    /// `m_k = floor(tau k)`.
    pub fn m(&self, k: usize) -> usize {
        let v = self.tau() * qi(k as i64);
        v.numer()
            .div_floor(v.denom())
            .to_usize()
            .unwrap_or(usize::MAX)
    }

    pub fn is_sparse(&self, edges: usize, vertices: usize) -> bool {
        edges <= self.m(vertices)
    }
}

fn vertex_count(edges: &[Vec<usize>], pick: &[usize]) -> usize {
    let mut vs: Vec<usize> = pick.iter().flat_map(|&i| edges[i].iter().copied()).collect();
    vs.sort_unstable();
    vs.dedup();
    vs.len()
}

/// Whether every subgraph of `x` with at most `d` edges is sparse.
pub fn event_check(x: &[Vec<usize>], d: usize, spec: &EventSpec) -> Result<bool> {
    let e = x.len();
    let total: u128 = (1..=d.min(e)).map(|k| binomial(e, k)).sum();
    check_cap("event subsets", total, EVENT_SUBSET_CAP)?;
    for k in 1..=d.min(e) {
        let mut ok = true;
        for_each_combination(e, k, |pick| {
            if ok && !spec.is_sparse(k, vertex_count(x, pick)) {
                ok = false;
            }
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Planted-edge law given one `theta`.
#[derive(Clone, Debug)]
struct ThetaTable {
    theta: u32,
    weight: Q,
    /// Slots inside `K_S`, in increasing order.
    slots: Vec<usize>,
    /// `sum_x P(x) 1_E(x) [x contains S]` for every local subset `S`.
    superset: Vec<Q>,
}

impl ThetaTable {
    fn local(&self, g: &Graph) -> Option<u32> {
        let mut m = 0u32;
        for &(s, _) in &g.0 {
            let pos = self.slots.binary_search(&(s as usize)).ok()?;
            m |= 1 << pos;
        }
        Some(m)
    }
}

/// Exact conditional system for the planted model.
#[derive(Clone, Debug)]
pub struct ConditionalSystem {
    pub params: PdsExact,
    pub spec: EventSpec,
    pub d: usize,
    pub sets: IndexSets,
    pub c_tilde: Vec<Q>,
    /// Nonzero `M~` entries grouped by `(beta, alpha)`.
    pub m_tilde: BTreeMap<(usize, usize), Vec<(u32, Surd)>>,
    /// `H_{beta alpha}` for `beta` in `C_alpha`.
    pub h: BTreeMap<(usize, usize), Q>,
    /// `P(E | theta_{V(alpha) + 1} = 0)`.
    pub denom: Vec<Q>,
    pub f: Vec<Q>,
    pub kcal: Vec<Q>,
    pub complexity: Vec<u64>,
    pub components: Vec<usize>,
    tables: Vec<ThetaTable>,
}

/// Unions of components of `alpha` that contain vertex 0 exactly when
/// `alpha` does.
pub fn component_unions(sets: &IndexSets, alpha: usize) -> Vec<usize> {
    let u = &sets.universe;
    let g = &sets.graphs[alpha];
    let comps = g.components(u);
    let has0 = sets.masks[alpha] & 1 == 1;
    let mut out = Vec::new();
    for pick in 0u32..(1 << comps.len()) {
        let mut b = Graph::empty();
        for (i, c) in comps.iter().enumerate() {
            if pick >> i & 1 == 1 {
                b = b.plus(c);
            }
        }
        if (b.vmask(u) & 1 == 1) == has0 {
            if let Some(i) = sets.position(&b) {
                out.push(i);
            }
        }
    }
    out.sort_unstable();
    out
}

fn theta_weight(rho: &Q, n: usize, theta: u32) -> Q {
    let k = theta.count_ones() as i64;
    qpow(rho, k) * qpow(&(Q::one() - rho), n as i64 - k)
}

fn build_tables(p: &PdsExact, u: &EdgeUniverse, d: usize, spec: &EventSpec) -> Result<Vec<ThetaTable>> {
    let one = Q::one();
    let mut out = Vec::with_capacity(1 << p.n);
    for theta in 0u32..(1 << p.n) {
        let slots: Vec<usize> = (0..u.len()).filter(|&s| u.vmask[s] & !theta == 0).collect();
        let k = slots.len();
        check_cap("planted configurations", 1u128 << k, 1 << 20)?;
        let mut table = vec![Q::zero(); 1 << k];
        for x in 0u32..(1 << k) {
            let ones = x.count_ones() as i64;
            let edges: Vec<Vec<usize>> = (0..k)
                .filter(|&i| x >> i & 1 == 1)
                .map(|i| u.edges[slots[i]].clone())
                .collect();
            if event_check(&edges, d, spec)? {
                table[x as usize] = qpow(&p.q1, ones) * qpow(&(&one - &p.q1), k as i64 - ones);
            }
        }
        // Superset sums.
        for bit in 0..k {
            for x in 0..(1usize << k) {
                if x >> bit & 1 == 0 {
                    let hi = table[x | (1 << bit)].clone();
                    table[x] += hi;
                }
            }
        }
        out.push(ThetaTable {
            theta,
            weight: theta_weight(&p.rho, p.n, theta),
            slots,
            superset: table,
        });
    }
    Ok(out)
}

/// `E_theta[1_E prod_{A minus B}(x - q0) prod_{B minus A}(x - q1)
/// prod_{A and B}(x - q0)(x - q1)]` over planted configurations.
fn planted_moment(p: &PdsExact, t: &ThetaTable, a: u32, b: u32) -> Q {
    let one = Q::one();
    let both = a & b;
    let all = a | b;
    let mut total = Q::zero();
    for s in submasks(all) {
        let mut coef = t.superset[s as usize].clone();
        if coef.is_zero() {
            continue;
        }
        let mut bit = all;
        while bit != 0 {
            let i = bit.trailing_zeros();
            bit &= bit - 1;
            let in_s = s >> i & 1 == 1;
            let f = if both >> i & 1 == 1 {
                if in_s {
                    &one - &p.q0 - &p.q1
                } else {
                    &p.q0 * &p.q1
                }
            } else if in_s {
                one.clone()
            } else if a >> i & 1 == 1 {
                -p.q0.clone()
            } else {
                -p.q1.clone()
            };
            coef *= f;
        }
        total += coef;
    }
    total
}

/// Builds `c~`, `M~`, `H`, `F` and `K` by enumerating `theta` and the
/// planted-edge configurations; edges outside `K_S` are integrated in
/// closed form.
pub fn build_conditional_system(p: &PdsExact, d: usize, spec: &EventSpec) -> Result<ConditionalSystem> {
    if p.n > 6 || !(2..=3).contains(&p.r) || d > 3 {
        return Err(Error::Size {
            what: "conditional system (n <= 6, r in 2..=3, D <= 3)",
            size: p.n as u128,
            cap: 6,
        });
    }
    super::system::LowDegModel::Pds(p.clone()).validate()?;
    let universe = EdgeUniverse::new(p.n, p.r, false)?;
    let sets = IndexSets::new(universe, d)?;
    let u = &sets.universe;
    let tables = build_tables(p, u, d, spec)?;
    let one = Q::one();
    let ng = sets.len();

    // Per-theta cache of planted moments keyed by local masks.
    let mut cache: Vec<BTreeMap<(u32, u32), Q>> = vec![BTreeMap::new(); tables.len()];
    let mut moment = |ti: usize, a: u32, b: u32| -> Q {
        cache[ti]
            .entry((a, b))
            .or_insert_with(|| planted_moment(p, &tables[ti], a, b))
            .clone()
    };

    // c~.
    let mut c_tilde = vec![Q::zero(); ng];
    for (a, g) in sets.graphs.iter().enumerate() {
        for (ti, t) in tables.iter().enumerate() {
            if t.theta & 1 == 0 {
                continue;
            }
            if let Some(la) = t.local(g) {
                let v = moment(ti, la, 0);
                c_tilde[a] += &t.weight * v;
            }
        }
    }

    // M~ gathered by radical class: s^{-k} sigma0^{j0} sigma1^{-j1}.
    let s_inv = Surd::sqrt(&(&p.rho * (&one - &p.rho)))?.recip_monomial()?;
    let v0 = &p.q0 * (&one - &p.q0);
    let sigma0 = Surd::sqrt(&v0)?;
    let s1_inv = Surd::sqrt(&(&p.q1 * (&one - &p.q1)))?.recip_monomial()?;
    let mut m_tilde = BTreeMap::new();
    for (b, gb) in sets.graphs.iter().enumerate() {
        let gammas: Vec<u32> = submasks(sets.masks[b] | 1).collect();
        for (a, ga) in sets.graphs.iter().enumerate() {
            let mut acc: BTreeMap<(u32, usize, usize), Q> = BTreeMap::new();
            for (ti, t) in tables.iter().enumerate() {
                // Outside K_S the two graphs must agree edge by edge.
                let mut la = 0u32;
                let mut lb = 0u32;
                let mut outside_b = 0usize;
                let mut ok = true;
                let mut slots: Vec<usize> = ga.0.iter().map(|&(s, _)| s as usize).collect();
                slots.extend(gb.0.iter().map(|&(s, _)| s as usize));
                slots.sort_unstable();
                slots.dedup();
                for s in slots {
                    let (ia, ib) = (ga.mult(s) > 0, gb.mult(s) > 0);
                    match t.slots.binary_search(&s) {
                        Ok(pos) => {
                            if ia {
                                la |= 1 << pos;
                            }
                            if ib {
                                lb |= 1 << pos;
                            }
                        }
                        Err(_) => {
                            if ia != ib {
                                ok = false;
                                break;
                            }
                            outside_b += 1;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let mv = moment(ti, la, lb);
                if mv.is_zero() {
                    continue;
                }
                let base = &t.weight * mv;
                let inside_b = lb.count_ones() as usize;
                for &g in &gammas {
                    let gi = (g & t.theta).count_ones() as i64;
                    let go = (g & !t.theta).count_ones() as i64;
                    let f = qpow(&(&one - &p.rho), gi) * qpow(&(-p.rho.clone()), go);
                    *acc.entry((g, outside_b, inside_b)).or_insert_with(Q::zero) += &base * f;
                }
            }
            if acc.is_empty() {
                continue;
            }
            let mut per_gamma: BTreeMap<u32, Surd> = BTreeMap::new();
            for ((g, j0, j1), v) in acc {
                if v.is_zero() {
                    continue;
                }
                let rad = &(&s_inv.pow(g.count_ones() as usize) * &sigma0.pow(j0)) * &s1_inv.pow(j1);
                per_gamma
                    .entry(g)
                    .or_insert_with(Surd::zero)
                    .add_assign_ref(&rad.scale(&v));
            }
            let entries: Vec<(u32, Surd)> =
                per_gamma.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            if !entries.is_empty() {
                m_tilde.insert((b, a), entries);
            }
        }
    }

    // H_{beta alpha} from its definition.
    let mut h = BTreeMap::new();
    let mut unions = Vec::with_capacity(ng);
    for a in 0..ng {
        let cs = component_unions(&sets, a);
        for &b in &cs {
            let rest = sets.graphs[a].minus(&sets.graphs[b]);
            let rest_mask = rest.vmask(u);
            let zero_mask = sets.masks[b] | 1;
            let mut acc = Q::zero();
            for (ti, t) in tables.iter().enumerate() {
                if t.theta & zero_mask != 0 || rest_mask & !t.theta != 0 {
                    continue;
                }
                let lr = t
                    .local(&rest)
                    .ok_or_else(|| Error::Consistency("remainder outside K_S".into()))?;
                acc += &t.weight * moment(ti, lr, 0);
            }
            let cond = qpow(&(&one - &p.rho), zero_mask.count_ones() as i64);
            h.insert((b, a), acc / cond);
        }
        unions.push(cs);
    }
    let denom: Vec<Q> = (0..ng).map(|a| h[&(a, a)].clone()).collect();
    if let Some(a) = denom.iter().position(|v| !v.is_positive()) {
        return Err(Error::Consistency(format!("event has zero conditional probability at {a}")));
    }

    // F by increasing edge count; proper unions have fewer edges.
    let mut f = vec![Q::zero(); ng];
    for a in 0..ng {
        let mut v = c_tilde[a].clone();
        for &b in &unions[a] {
            if b != a {
                v -= &h[&(b, a)] * &f[b];
            }
        }
        f[a] = v / &denom[a];
    }
    let kcal: Vec<Q> = (0..ng)
        .map(|a| {
            let k = (sets.masks[a] | 1).count_ones() as i64;
            &f[a] * &f[a] / (qpow(&v0, sets.graphs[a].size() as i64) * qpow(&(&one - &p.rho), k))
        })
        .collect();
    let components: Vec<usize> = sets.graphs.iter().map(|g| g.component_count(u)).collect();
    let mut complexity = vec![0u64; ng];
    for a in 0..ng {
        complexity[a] = if components[a] <= 1 {
            2
        } else {
            2 + 2 * unions[a]
                .iter()
                .filter(|&&b| b != a)
                .map(|&b| complexity[b])
                .sum::<u64>()
        };
    }
    Ok(ConditionalSystem {
        params: p.clone(),
        spec: spec.clone(),
        d,
        sets,
        c_tilde,
        m_tilde,
        h,
        denom,
        f,
        kcal,
        complexity,
        components,
        tables,
    })
}

impl ConditionalSystem {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    fn odds(&self) -> Result<Surd> {
        let rho = &self.params.rho;
        Surd::sqrt(&(rho / (Q::one() - rho)))
    }

    /// `sum_gamma (-sqrt(rho/(1-rho)))^{|gamma|} M~_{beta gamma, alpha}`.
    pub fn gamma_sum(&self, beta: usize, alpha: usize) -> Result<Surd> {
        let odds = self.odds()?;
        let mut acc = Surd::zero();
        if let Some(entries) = self.m_tilde.get(&(beta, alpha)) {
            for (g, v) in entries {
                let k = g.count_ones() as usize;
                let mut w = &odds.pow(k) * v;
                if k % 2 == 1 {
                    w = -w;
                }
                acc.add_assign_ref(&w);
            }
        }
        Ok(acc)
    }

    /// Checks the key identity for every `(beta, alpha)`; returns the
    /// number of exact zeros off `C_alpha` and of matches on it.
    pub fn key_identity(&self) -> Result<(usize, usize)> {
        let sigma0 = Surd::sqrt(&(&self.params.q0 * (Q::one() - &self.params.q0)))?;
        let mut zeros = 0;
        let mut matches = 0;
        for a in 0..self.len() {
            for b in 0..self.len() {
                let lhs = self.gamma_sum(b, a)?;
                match self.h.get(&(b, a)) {
                    Some(hv) => {
                        let rhs = sigma0.pow(self.sets.graphs[b].size()).scale(hv);
                        if lhs != rhs {
                            return Err(Error::Consistency(format!(
                                "key identity fails on C_alpha at ({b},{a}): {lhs} vs {rhs}"
                            )));
                        }
                        matches += 1;
                    }
                    None => {
                        if !lhs.is_zero() {
                            return Err(Error::Consistency(format!(
                                "key identity fails off C_alpha at ({b},{a}): {lhs}"
                            )));
                        }
                        zeros += 1;
                    }
                }
            }
        }
        Ok((zeros, matches))
    }

    /// Certificate `u_{beta gamma}` over all pairs with `gamma` inside
    /// `V(beta)` plus vertex 0.
    pub fn certificate(&self) -> Result<BTreeMap<(usize, u32), Surd>> {
        let odds = self.odds()?;
        let v0 = &self.params.q0 * (Q::one() - &self.params.q0);
        let s_inv = Surd::sqrt(&v0)?.recip_monomial()?;
        let mut u = BTreeMap::new();
        for b in 0..self.len() {
            let base = s_inv.pow(self.sets.graphs[b].size()).scale(&self.f[b]);
            for g in submasks(self.sets.masks[b] | 1) {
                let k = g.count_ones() as usize;
                let mut v = &odds.pow(k) * &base;
                if k % 2 == 1 {
                    v = -v;
                }
                u.insert((b, g), v);
            }
        }
        Ok(u)
    }

    /// `M~^T u - c~` for the recursion certificate.
    pub fn residual(&self) -> Result<Vec<Surd>> {
        let u = self.certificate()?;
        let mut out: Vec<Surd> = self
            .c_tilde
            .iter()
            .map(|c| Surd::from_rational(-c.clone()))
            .collect();
        for (&(b, a), entries) in &self.m_tilde {
            for (g, m) in entries {
                if let Some(uv) = u.get(&(b, *g)) {
                    out[a].add_product(m, uv);
                }
            }
        }
        Ok(out)
    }

    /// `||u||^2` summed directly and through `K`.
    pub fn norm_sq(&self) -> Result<(Q, Q)> {
        let mut direct = Surd::zero();
        for v in self.certificate()?.values() {
            direct.add_product(v, v);
        }
        let direct = direct
            .to_rational()
            .ok_or_else(|| Error::Consistency("certificate norm is irrational".into()))?;
        Ok((direct, self.kcal.iter().sum()))
    }

    /// `F` evaluated by plain recursion without the table.
    pub fn f_recursive(&self, a: usize) -> Q {
        let mut v = self.c_tilde[a].clone();
        for b in component_unions(&self.sets, a) {
            if b != a {
                v -= &self.h[&(b, a)] * self.f_recursive(b);
            }
        }
        v / &self.denom[a]
    }

    /// Smallest denominator `P(E | theta_{V(alpha)+1} = 0)`.
    pub fn min_denominator(&self) -> Q {
        self.denom.iter().min().cloned().unwrap_or_else(Q::one)
    }

    /// `P(E^c | theta_1 = 1)` in exact arithmetic.
    pub fn event_failure_given_planted(&self) -> Q {
        let mut ok = Q::zero();
        for t in &self.tables {
            if t.theta & 1 == 1 {
                ok += &t.weight * &t.superset[0];
            }
        }
        Q::one() - ok / &self.params.rho
    }

    fn m_of(&self, a: usize) -> usize {
        self.spec.m(self.sets.masks[a].count_ones() as usize)
    }

    pub fn is_dense(&self, a: usize) -> bool {
        self.sets.graphs[a].size() > self.m_of(a)
    }

    /// `s_alpha = rho^{|V|} (2 q1)^{|alpha|}`.
    pub fn s_ref(&self, g: &Graph) -> Q {
        let k = g.vmask(&self.sets.universe).count_ones() as i64;
        qpow(&self.params.rho, k) * qpow(&(qi(2) * &self.params.q1), g.size() as i64)
    }

    /// `d_alpha = rho^{|V|} D^{m} q0^{|alpha|} (2 q1 / q0)^{m}`.
    pub fn d_ref(&self, g: &Graph) -> Q {
        let k = g.vmask(&self.sets.universe).count_ones() as usize;
        let m = self.spec.m(k) as i64;
        let p = &self.params;
        qpow(&p.rho, k as i64)
            * qpow(&qi(self.d as i64), m)
            * qpow(&p.q0, g.size() as i64)
            * qpow(&(qi(2) * &p.q1 / &p.q0), m)
    }
}

/// One row of the bounds table.
#[derive(Clone, Debug)]
pub struct BoundsRow {
    pub alpha: usize,
    pub edges: usize,
    pub vertices: usize,
    pub components: usize,
    pub dense: bool,
    pub c_tilde: Q,
    pub c_bound: Q,
    pub f: Q,
    pub f_bound: Q,
    pub complexity: u64,
    pub complexity_bound: u64,
    pub s: Q,
    pub d: Q,
    /// Largest `|H_{beta alpha}| / bound` over `beta` in `C_alpha`.
    pub h_worst_ratio: f64,
    pub holds: bool,
}

fn factorial_u64(w: usize) -> u64 {
    (1..=w as u64).product()
}

/// Compares `|c~|`, `|H|`, `|F|` and the complexity with their bounds on
/// every basis graph; errors on the first violation.
pub fn conditional_bounds_report(sys: &ConditionalSystem) -> Result<Vec<BoundsRow>> {
    let half = Q::new(BigInt::from(1), BigInt::from(2));
    if sys.min_denominator() < half {
        return Err(Error::Domain(
            "bounds on F assume every conditional event probability is at least 1/2".into(),
        ));
    }
    let u = &sys.sets.universe;
    let mut rows = Vec::with_capacity(sys.len());
    for a in 0..sys.len() {
        let g = &sys.sets.graphs[a];
        let dense = sys.is_dense(a);
        let rho_extra = if sys.sets.masks[a] & 1 == 1 {
            Q::one()
        } else {
            sys.params.rho.clone()
        };
        let s = sys.s_ref(g);
        let d = sys.d_ref(g);
        let reference = if dense { d.clone() } else { s.clone() };
        let c_bound = &rho_extra * &reference;
        let f_bound = qi(sys.complexity[a] as i64) * &c_bound;
        let w = sys.components[a];
        let complexity_bound = 2 * factorial_u64(w) * 3u64.pow(w as u32);
        let mut ok = sys.c_tilde[a].abs() <= c_bound
            && sys.f[a].abs() <= f_bound
            && sys.complexity[a] <= complexity_bound;
        if !dense && s > d {
            ok = false;
        }
        let mut worst = 0.0f64;
        for b in component_unions(&sys.sets, a) {
            let rest = g.minus(&sys.sets.graphs[b]);
            let bound = if dense { sys.d_ref(&rest) } else { sys.s_ref(&rest) };
            let hv = sys.h[&(b, a)].abs();
            if hv > bound {
                ok = false;
            }
            if bound.is_positive() {
                worst = worst.max(q_to_f64(&(hv / &bound)));
            }
        }
        let row = BoundsRow {
            alpha: a,
            edges: g.size(),
            vertices: sys.sets.masks[a].count_ones() as usize,
            components: w,
            dense,
            c_tilde: sys.c_tilde[a].clone(),
            c_bound,
            f: sys.f[a].clone(),
            f_bound,
            complexity: sys.complexity[a],
            complexity_bound,
            s,
            d,
            h_worst_ratio: worst,
            holds: ok,
        };
        if !row.holds {
            return Err(Error::Consistency(format!(
                "bound violated at graph {a} ({} edges, {} components, dense {dense}): {row:?}",
                row.edges,
                g.component_count(u)
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Monte Carlo estimate of `P(E^c | theta_1 = 1)`.
#[derive(Clone, Debug)]
pub struct EventEstimate {
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `n^{-a delta / 2} / 2` at the given parameters.
    pub ceiling: f64,
}

/// Samples `theta` with `theta_1 = 1`, the planted edges, and checks the
/// event on each trial.
pub fn event_probability_mc(
    params: &PdsParams,
    d: usize,
    spec: &EventSpec,
    trials: u64,
    seed: u64,
) -> Result<EventEstimate> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::Param("trials must be at least 1".into()));
    }
    let mut failures = 0u64;
    for trial in 0..trials {
        let s = derive_seed(seed, trial);
        let mut theta_rng = Substream::new(s, stream::THETA);
        let mut support = vec![0usize];
        for v in 1..params.n {
            if theta_rng.item(v as u64).bernoulli(params.rho) {
                support.push(v);
            }
        }
        let mut edge_rng = Substream::new(s, stream::EDGES);
        let index = crate::combin::SubsetIndex::new(params.n, params.r);
        let mut planted = Vec::new();
        for_each_combination(support.len(), params.r, |pick| {
            let e: Vec<usize> = pick.iter().map(|&i| support[i]).collect();
            let rank = index.rank_sorted(&e);
            if edge_rng.item(rank as u64).bernoulli(params.q1) {
                planted.push(e);
            }
        });
        if d > 0 && !event_check(&planted, d, spec)? {
            failures += 1;
        }
    }
    let t = trials as f64;
    let phat = failures as f64 / t;
    // Wilson score interval at 95%.
    let z = 1.959_963_984_540_054_f64;
    let den = 1.0 + z * z / t;
    let centre = (phat + z * z / (2.0 * t)) / den;
    let half = z * libm::sqrt(phat * (1.0 - phat) / t + z * z / (4.0 * t * t)) / den;
    let a = q_to_f64(&spec.a);
    let delta = q_to_f64(&spec.delta);
    Ok(EventEstimate {
        trials,
        failures,
        estimate: phat,
        ci_low: (centre - half).max(0.0),
        ci_high: (centre + half).min(1.0),
        ceiling: 0.5 * libm::pow(params.n as f64, -a * delta / 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn density_arithmetic() {
        let spec = EventSpec::with_tau(q(6, 5)).unwrap();
        assert_eq!(spec.m(3), 3);
        assert_eq!(spec.m(4), 4);
        let tri = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        assert!(event_check(&tri, 3, &spec).unwrap());
        let two = vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![1, 3], vec![2, 3]];
        assert!(!event_check(&two, 5, &spec).unwrap());
        assert!(event_check(&[], 3, &spec).unwrap());
        assert!(event_check(&[vec![0, 1]], 3, &spec).unwrap());
    }
}
