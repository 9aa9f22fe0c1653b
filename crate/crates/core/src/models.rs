//! Parameter bundles, samplers, noise symmetrization and SNR formulas for
//! the planted dense subhypergraph and (sparse) tensor PCA models.
//!
//! Vertices are 0-based; the distinguished vertex of the estimand is 0.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::E;

use num_bigint::BigUint;
use num_traits::One;

use crate::combin::{
    factorial_u128, for_each_combination, for_each_permutation, multiplicity_factorial,
    MultisetIndex, SubsetIndex,
};
use crate::error::{Error, Result};
use crate::exact::{q_from_f64, qi, Q};
use crate::rng::{stream, Substream};

/// Planted dense subhypergraph parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct PdsParams {
    pub n: usize,
    pub r: usize,
    pub rho: f64,
    pub q0: f64,
    pub q1: f64,
}

/// Both SNR quantities for the planted dense subhypergraph model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdsSnr {
    /// `e/(r-2)! (n rho^2)^{r-1} lambda^2`.
    pub snr: f64,
    /// The same divided by `(1-rho)^{r-1}`.
    pub threshold: f64,
}

impl PdsParams {
    pub fn new(n: usize, r: usize, rho: f64, q0: f64, q1: f64) -> Result<Self> {
        let p = PdsParams { n, r, rho, q0, q1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::Param(format!("uniformity r={} must be >= 2", self.r)));
        }
        if self.n < self.r {
            return Err(Error::Param(format!("n={} must be >= r={}", self.n, self.r)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Param(format!("rho={} outside [0,1]", self.rho)));
        }
        if !(self.q0 > 0.0 && self.q0 < 1.0) {
            return Err(Error::Param(format!("q0={} outside (0,1)", self.q0)));
        }
        if !(self.q1 >= self.q0 && self.q1 <= 1.0) {
            return Err(Error::Param(format!("q1={} outside [q0,1]", self.q1)));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        (self.q1 - self.q0) / libm::sqrt(self.q0 * (1.0 - self.q0))
    }

    pub fn snr(&self) -> PdsSnr {
        let r1 = (self.r - 1) as f64;
        let lam = self.lambda();
        let snr = E / factorial_u128(self.r - 2) as f64
            * libm::pow(self.n as f64 * self.rho * self.rho, r1)
            * lam
            * lam;
        PdsSnr {
            snr,
            threshold: snr / libm::pow(1.0 - self.rho, r1),
        }
    }

    /// `q1` that realizes a target SNR at fixed `(n, r, rho, q0)`.
    pub fn q1_for_snr(n: usize, r: usize, rho: f64, q0: f64, snr: f64) -> f64 {
        let lam = lambda_for_snr(n, r, rho, snr);
        q0 + lam * libm::sqrt(q0 * (1.0 - q0))
    }
}

/// `lambda` with `e n^{r-1} rho^{2r-2} lambda^2 / (r-2)! = snr`.
pub fn lambda_for_snr(n: usize, r: usize, rho: f64, snr: f64) -> f64 {
    let r1 = (r - 1) as f64;
    let base = E * libm::pow(n as f64, r1) * libm::pow(rho, 2.0 * r1)
        / factorial_u128(r - 2) as f64;
    libm::sqrt(snr / base)
}

/// Sparse PCA threshold quantity of the asymmetric model, where the
/// symmetric signal is `sqrt(r!) lambda`.
pub fn asymmetric_threshold(n: usize, r: usize, rho: f64, lambda: f64) -> f64 {
    let r1 = (r - 1) as f64;
    E * (r * (r - 1)) as f64
        * libm::pow(n as f64, r1)
        * libm::pow(rho, 2.0 * r1)
        * lambda
        * lambda
}

/// Prior on the entries of `theta`.
#[derive(Clone, Debug, PartialEq)]
pub enum PriorKind {
    Bernoulli(f64),
    Rademacher,
    StandardGaussian,
    /// Moment tables `E[pi^t]` and `E[|pi|^t]` for `t = 0, 1, ...`.
    Custom {
        moments: Vec<Q>,
        abs_moments: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PriorSpec {
    pub kind: PriorKind,
}

impl PriorSpec {
    pub fn bernoulli(rho: f64) -> Self {
        PriorSpec {
            kind: PriorKind::Bernoulli(rho),
        }
    }

    pub fn rademacher() -> Self {
        PriorSpec {
            kind: PriorKind::Rademacher,
        }
    }

    pub fn gaussian() -> Self {
        PriorSpec {
            kind: PriorKind::StandardGaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            PriorKind::Bernoulli(rho) if !(0.0..=1.0).contains(rho) => {
                Err(Error::Param(format!("bernoulli rho={rho} outside [0,1]")))
            }
            PriorKind::Custom { moments, .. } if moments.first().map_or(true, |m| !m.is_one()) => {
                Err(Error::Param("custom prior must have moment(0) = 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self.kind {
            PriorKind::Bernoulli(rho) => Some(rho),
            _ => None,
        }
    }

    /// Exact `E[pi^t]`.
    pub fn moment(&self, t: usize) -> Result<Q> {
        match &self.kind {
            PriorKind::Bernoulli(rho) => Ok(if t == 0 { Q::one() } else { q_from_f64(*rho) }),
            PriorKind::Rademacher => Ok(qi(if t % 2 == 0 { 1 } else { 0 })),
            PriorKind::StandardGaussian => Ok(if t % 2 == 1 {
                qi(0)
            } else {
                Q::from_integer(double_factorial(t.saturating_sub(1)).into())
            }),
            PriorKind::Custom { moments, .. } => moments
                .get(t)
                .cloned()
                .ok_or_else(|| Error::Domain(format!("custom prior lacks moment {t}"))),
        }
    }

    /// `E[|pi|^t]`.
    pub fn abs_moment(&self, t: usize) -> Result<f64> {
        match &self.kind {
            PriorKind::Bernoulli(rho) => Ok(if t == 0 { 1.0 } else { *rho }),
            PriorKind::Rademacher => Ok(1.0),
            PriorKind::StandardGaussian => {
                let df = double_factorial(t.saturating_sub(1)) as f64;
                if t % 2 == 0 {
                    Ok(df)
                } else {
                    Ok(df * libm::sqrt(2.0 / core::f64::consts::PI))
                }
            }
            PriorKind::Custom { abs_moments, .. } => abs_moments
                .get(t)
                .copied()
                .ok_or_else(|| Error::Domain(format!("custom prior lacks abs moment {t}"))),
        }
    }

    /// Moment envelope `max_{s <= t} E[|pi|^s]`.
    pub fn envelope(&self, t: usize) -> Result<f64> {
        let mut best: f64 = 0.0;
        for s in 0..=t {
            best = best.max(self.abs_moment(s)?);
        }
        Ok(best)
    }

    fn sample(&self, item: &mut crate::rng::ItemRng<'_>) -> Result<f64> {
        match &self.kind {
            PriorKind::Bernoulli(rho) => Ok(if item.bernoulli(*rho) { 1.0 } else { 0.0 }),
            PriorKind::Rademacher => Ok(if item.next_u64() >> 63 == 1 { 1.0 } else { -1.0 }),
            PriorKind::StandardGaussian => Ok(item.normal()),
            PriorKind::Custom { .. } => {
                Err(Error::Unsupported("custom prior has no sampler".into()))
            }
        }
    }
}

pub fn double_factorial(n: usize) -> u128 {
    let mut acc = 1u128;
    let mut k = n;
    while k > 1 {
        acc *= k as u128;
        k -= 2;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseMode {
    /// Independent `N(0,1)` per multiset.
    NoiseReduced,
    /// Permutation-averaged noise `W^sy`.
    Symmetrized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TpcaParams {
    pub n: usize,
    pub r: usize,
    pub lambda: f64,
    pub prior: PriorSpec,
    pub noise_mode: NoiseMode,
}

impl TpcaParams {
    pub fn new(
        n: usize,
        r: usize,
        lambda: f64,
        prior: PriorSpec,
        noise_mode: NoiseMode,
    ) -> Result<Self> {
        let p = TpcaParams {
            n,
            r,
            lambda,
            prior,
            noise_mode,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 2 || self.n < self.r {
            return Err(Error::Param(format!("need 2 <= r <= n, got r={} n={}", self.r, self.n)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Param(format!("lambda={} must be >= 0", self.lambda)));
        }
        self.prior.validate()
    }

    /// `e n^{r-1} rho^{2r-2} lambda^2 / (r-2)!` (requires a Bernoulli prior).
    pub fn snr(&self) -> Result<f64> {
        let rho = self
            .prior
            .rho()
            .ok_or_else(|| Error::Domain("SNR is defined for the Bernoulli prior".into()))?;
        let r1 = (self.r - 1) as f64;
        Ok(E * libm::pow(self.n as f64, r1) * libm::pow(rho, 2.0 * r1) * self.lambda
            * self.lambda
            / factorial_u128(self.r - 2) as f64)
    }
}

/// Planted signal `theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    pub theta: Vec<f64>,
}

impl Signal {
    /// `{i : theta_i = 1}`.
    pub fn support(&self) -> Vec<usize> {
        self.theta
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == 1.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Simple `r`-uniform hypergraph stored as one bit per `r`-subset in colex order.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypergraph {
    index: SubsetIndex,
    bits: Vec<u64>,
}

impl Hypergraph {
    pub fn empty(n: usize, r: usize) -> Self {
        let index = SubsetIndex::new(n, r);
        let words = (index.len() + 63) / 64;
        Hypergraph {
            index,
            bits: vec![0; words],
        }
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn r(&self) -> usize {
        self.index.r()
    }

    pub fn index(&self) -> &SubsetIndex {
        &self.index
    }

    pub fn num_slots(&self) -> usize {
        self.index.len()
    }

    #[inline]
    pub fn get_rank(&self, rank: usize) -> bool {
        self.bits[rank / 64] >> (rank % 64) & 1 == 1
    }

    #[inline]
    pub fn set_rank(&mut self, rank: usize, value: bool) {
        let mask = 1u64 << (rank % 64);
        if value {
            self.bits[rank / 64] |= mask;
        } else {
            self.bits[rank / 64] &= !mask;
        }
    }

    pub fn has_edge(&self, e: &[usize]) -> bool {
        self.get_rank(self.index.rank(e))
    }

    pub fn set_edge(&mut self, e: &[usize], value: bool) {
        let rank = self.index.rank(e);
        self.set_rank(rank, value);
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Present edges as sorted vertex lists, in colex order.
    pub fn edges(&self) -> Vec<Vec<usize>> {
        (0..self.num_slots())
            .filter(|&i| self.get_rank(i))
            .map(|i| self.index.unrank(i))
            .collect()
    }
}

/// Symmetric order-`r` tensor stored once per multiset.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    index: MultisetIndex,
    pub mode: NoiseMode,
    pub values: Vec<f64>,
}

impl SymTensor {
    pub fn zeros(n: usize, r: usize, mode: NoiseMode) -> Self {
        let index = MultisetIndex::new(n, r);
        let len = index.len();
        SymTensor {
            index,
            mode,
            values: vec![0.0; len],
        }
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn r(&self) -> usize {
        self.index.r()
    }

    pub fn index(&self) -> &MultisetIndex {
        &self.index
    }

    /// Entry at any index tuple (order irrelevant).
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.index.rank(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let rank = self.index.rank(idx);
        self.values[rank] = v;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Observation {
    Hypergraph(Hypergraph),
    Tensor(SymTensor),
}

impl Observation {
    pub fn n(&self) -> usize {
        match self {
            Observation::Hypergraph(h) => h.n(),
            Observation::Tensor(t) => t.n(),
        }
    }

    pub fn r(&self) -> usize {
        match self {
            Observation::Hypergraph(h) => h.r(),
            Observation::Tensor(t) => t.r(),
        }
    }
}

/// Dense values over the distinct-index `r`-subsets; the input of the
/// scoring dynamic program.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetTensor<W> {
    index: SubsetIndex,
    pub values: Vec<W>,
}

impl<W: Clone> SubsetTensor<W> {
    pub fn from_fn(n: usize, r: usize, mut f: impl FnMut(&[usize]) -> W) -> Self {
        let index = SubsetIndex::new(n, r);
        let values = (0..index.len()).map(|i| f(&index.unrank(i))).collect();
        SubsetTensor { index, values }
    }

    pub fn filled(n: usize, r: usize, v: W) -> Self {
        let index = SubsetIndex::new(n, r);
        let values = vec![v; index.len()];
        SubsetTensor { index, values }
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn r(&self) -> usize {
        self.index.r()
    }

    pub fn index(&self) -> &SubsetIndex {
        &self.index
    }

    #[inline]
    pub fn get_sorted(&self, sorted: &[usize]) -> &W {
        &self.values[self.index.rank_sorted(sorted)]
    }

    pub fn get(&self, idx: &[usize]) -> &W {
        &self.values[self.index.rank(idx)]
    }

    /// Relabels vertices: the output at `sigma(e)` equals the input at `e`.
    pub fn permuted(&self, sigma: &[usize]) -> Self {
        let mut values = self.values.clone();
        for (rank, v) in self.values.iter().enumerate() {
            let e = self.index.unrank(rank);
            let img: Vec<usize> = e.iter().map(|&x| sigma[x]).collect();
            values[self.index.rank(&img)] = v.clone();
        }
        SubsetTensor {
            index: self.index.clone(),
            values,
        }
    }
}

impl SubsetTensor<f64> {
    /// `(Y - q0)/sqrt(q0(1-q0))` on every `r`-subset.
    pub fn standardized(h: &Hypergraph, q0: f64) -> Self {
        let s = libm::sqrt(q0 * (1.0 - q0));
        let one = (1.0 - q0) / s;
        let zero = -q0 / s;
        let values = (0..h.num_slots())
            .map(|i| if h.get_rank(i) { one } else { zero })
            .collect();
        SubsetTensor {
            index: h.index().clone(),
            values,
        }
    }

    /// Distinct-index entries of a symmetric tensor.
    pub fn distinct_entries(t: &SymTensor) -> Self {
        let index = SubsetIndex::new(t.n(), t.r());
        let values = (0..index.len()).map(|i| t.get(&index.unrank(i))).collect();
        SubsetTensor { index, values }
    }
}

fn sample_theta(n: usize, prior: &PriorSpec, seed: u64) -> Result<Signal> {
    let mut s = Substream::new(seed, stream::THETA);
    let theta = (0..n)
        .map(|i| prior.sample(&mut s.item(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Signal { theta })
}

/// Samples `(theta, Y)` from the planted dense subhypergraph model.
pub fn sample_pds(params: &PdsParams, seed: u64) -> Result<(Signal, Hypergraph)> {
    params.validate()?;
    let signal = sample_theta(params.n, &PriorSpec::bernoulli(params.rho), seed)?;
    let mut h = Hypergraph::empty(params.n, params.r);
    let mut edges = Substream::new(seed, stream::EDGES);
    let index = h.index().clone();
    for_each_combination(params.n, params.r, |e| {
        let planted = e.iter().all(|&v| signal.theta[v] == 1.0);
        let p = if planted { params.q1 } else { params.q0 };
        let rank = index.rank_sorted(e);
        if edges.item(rank as u64).bernoulli(p) {
            h.set_rank(rank, true);
        }
    });
    Ok((signal, h))
}

fn sample_tensor(params: &TpcaParams, signal: &Signal, seed: u64) -> SymTensor {
    let mut t = SymTensor::zeros(params.n, params.r, params.noise_mode);
    let mut noise = Substream::new(seed, stream::NOISE);
    let index = t.index().clone();
    for rank in 0..index.len() {
        let e = index.unrank(rank);
        let signal_part: f64 = params.lambda * e.iter().map(|&v| signal.theta[v]).product::<f64>();
        let sd = match params.noise_mode {
            NoiseMode::NoiseReduced => 1.0,
            NoiseMode::Symmetrized => libm::sqrt(multiplicity_factorial(&e) as f64),
        };
        t.values[rank] = signal_part + sd * noise.item(rank as u64).normal();
    }
    t
}

/// Samples sparse tensor PCA with a Bernoulli prior.
pub fn sample_sparse_tpca(params: &TpcaParams, seed: u64) -> Result<(Signal, SymTensor)> {
    params.validate()?;
    if !matches!(params.prior.kind, PriorKind::Bernoulli(_)) {
        return Err(Error::Param("sparse tensor PCA requires a Bernoulli prior".into()));
    }
    sample_general_tpca(params, seed)
}

/// Samples tensor PCA with any samplable prior.
pub fn sample_general_tpca(params: &TpcaParams, seed: u64) -> Result<(Signal, SymTensor)> {
    params.validate()?;
    let signal = sample_theta(params.n, &params.prior, seed)?;
    let t = sample_tensor(params, &signal, seed);
    Ok((signal, t))
}

/// Raw asymmetric `n^r` Gaussian tensor in row-major order.
pub fn sample_raw_gaussian(n: usize, r: usize, seed: u64, stream_tag: u64) -> Vec<f64> {
    let total = n.pow(r as u32);
    let mut s = Substream::new(seed, stream_tag);
    (0..total).map(|i| s.item(i as u64).normal()).collect()
}

/// `(1/sqrt(r!)) sum_pi W_{i_pi(1) ... i_pi(r)}`, stored per multiset.
pub fn symmetrize(n: usize, r: usize, raw: &[f64]) -> Result<SymTensor> {
    if raw.len() != n.pow(r as u32) {
        return Err(Error::Domain(format!("expected {} entries", n.pow(r as u32))));
    }
    let mut t = SymTensor::zeros(n, r, NoiseMode::Symmetrized);
    let scale = 1.0 / libm::sqrt(factorial_u128(r) as f64);
    for rank in 0..t.values.len() {
        let e = t.index().unrank(rank);
        let mut acc = 0.0;
        for_each_permutation(&e, |p| {
            let flat = p.iter().fold(0usize, |a, &v| a * n + v);
            acc += raw[flat];
        });
        t.values[rank] = acc * scale;
    }
    Ok(t)
}

/// Multi-hypergraph: a multiset of `r`-multisets over `[n]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiHypergraph {
    edges: BTreeMap<Vec<usize>, u32>,
}

impl MultiHypergraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(edges: &[(Vec<usize>, u32)]) -> Self {
        let mut g = Self::new();
        for (e, m) in edges {
            g.add_edge(e, *m);
        }
        g
    }

    pub fn simple(edges: &[Vec<usize>]) -> Self {
        let mut g = Self::new();
        for e in edges {
            g.add_edge(e, 1);
        }
        g
    }

    pub fn add_edge(&mut self, e: &[usize], mult: u32) {
        if mult == 0 {
            return;
        }
        let mut key = e.to_vec();
        key.sort_unstable();
        *self.edges.entry(key).or_insert(0) += mult;
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Vec<usize>, u32)> {
        self.edges.iter().map(|(e, m)| (e, *m))
    }

    pub fn distinct_edges(&self) -> usize {
        self.edges.len()
    }

    /// `|alpha|` with multiplicity.
    pub fn size(&self) -> usize {
        self.edges.values().map(|&m| m as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_simple(&self) -> bool {
        self.edges
            .iter()
            .all(|(e, &m)| m == 1 && e.windows(2).all(|w| w[0] < w[1]))
    }

    /// Non-isolated vertices, sorted.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.edges.keys().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// `prod_e alpha_e!`.
    pub fn factorial(&self) -> BigUint {
        self.edges
            .values()
            .map(|&m| crate::combin::big_factorial(m as usize))
            .product()
    }

    /// Degree counting multiplicity of vertices inside edges.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|(e, &m)| e.iter().filter(|&&x| x == v).count() * m as usize)
            .sum()
    }

    /// Connected components as vertex sets (empty graph has none).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let verts = self.vertices();
        let mut parent: BTreeMap<usize, usize> = verts.iter().map(|&v| (v, v)).collect();
        fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let mut root = x;
            while p[&root] != root {
                root = p[&root];
            }
            let mut cur = x;
            while p[&cur] != root {
                let next = p[&cur];
                p.insert(cur, root);
                cur = next;
            }
            root
        }
        for e in self.edges.keys() {
            for w in e.windows(2) {
                let a = find(&mut parent, w[0]);
                let b = find(&mut parent, w[1]);
                if a != b {
                    parent.insert(a, b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in &verts {
            let root = find(&mut parent, v);
            groups.entry(root).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Sub-multigraph on the edges touching `verts`.
    pub fn restrict(&self, verts: &[usize]) -> MultiHypergraph {
        MultiHypergraph {
            edges: self
                .edges
                .iter()
                .filter(|(e, _)| e.iter().any(|v| verts.contains(v)))
                .map(|(e, &m)| (e.clone(), m))
                .collect(),
        }
    }

    /// Every `beta <= alpha`, in a fixed order (including empty and `alpha`).
    pub fn sub_multisets(&self) -> Vec<MultiHypergraph> {
        let items: Vec<(&Vec<usize>, u32)> = self.edges.iter().map(|(e, &m)| (e, m)).collect();
        let mut out = vec![MultiHypergraph::new()];
        for (e, m) in items {
            let mut next = Vec::with_capacity(out.len() * (m as usize + 1));
            for g in &out {
                for k in 0..=m {
                    let mut h = g.clone();
                    h.add_edge(e, k);
                    next.push(h);
                }
            }
            out = next;
        }
        out
    }

    pub fn multiplicity(&self, e: &[usize]) -> u32 {
        let mut key = e.to_vec();
        key.sort_unstable();
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn contains(&self, other: &MultiHypergraph) -> bool {
        other.edges.iter().all(|(e, &m)| self.edges.get(e).copied().unwrap_or(0) >= m)
    }

    /// `alpha - beta` for `beta <= alpha`.
    pub fn minus(&self, other: &MultiHypergraph) -> MultiHypergraph {
        let mut out = self.clone();
        for (e, &m) in &other.edges {
            if let Some(x) = out.edges.get_mut(e) {
                *x = x.saturating_sub(m);
                if *x == 0 {
                    out.edges.remove(e);
                }
            }
        }
        out
    }

    pub fn plus(&self, other: &MultiHypergraph) -> MultiHypergraph {
        let mut out = self.clone();
        for (e, &m) in &other.edges {
            out.add_edge(e, m);
        }
        out
    }

    /// `prod_e binom(alpha_e, beta_e)`.
    pub fn binom(&self, beta: &MultiHypergraph) -> BigUint {
        beta.edges
            .iter()
            .map(|(e, &m)| {
                crate::combin::big_binomial(self.edges.get(e).copied().unwrap_or(0) as usize, m as usize)
            })
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_examples() {
        let p = PdsParams::new(100, 2, 0.2, 0.5, 0.6).unwrap();
        let s = p.snr();
        assert!((s.snr - E * 4.0 * 0.04).abs() < 1e-12);
        let z = PdsParams::new(100, 3, 0.2, 0.5, 0.5).unwrap();
        assert_eq!(z.snr().snr, 0.0);
        // substitution identity for the asymmetric threshold
        let (n, r, rho, lam) = (50, 3, 0.3, 0.01);
        let t = TpcaParams::new(n, r, libm::sqrt(6.0) * lam, PriorSpec::bernoulli(rho), NoiseMode::Symmetrized)
            .unwrap();
        assert!((t.snr().unwrap() - asymmetric_threshold(n, r, rho, lam)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_pds() {
        let p = PdsParams::new(6, 3, 1.0, 0.5, 1.0).unwrap();
        let (s, h) = sample_pds(&PdsParams { q0: 0.999, ..p.clone() }, 3).unwrap();
        assert!(s.theta.iter().all(|&t| t == 1.0));
        assert_eq!(h.edge_count(), 20);
        let p0 = PdsParams::new(6, 2, 0.0, 0.3, 0.9).unwrap();
        let (s0, _) = sample_pds(&p0, 3).unwrap();
        assert!(s0.support().is_empty());
    }

    #[test]
    fn symmetrize_small() {
        let t = symmetrize(2, 2, &[0.0, 1.0, 2.0, 0.0]).unwrap();
        assert!((t.get(&[0, 1]) - 3.0 / libm::sqrt(2.0)).abs() < 1e-15);
        let zero = symmetrize(3, 3, &vec![0.0; 27]).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn multihypergraph_basics() {
        let g = MultiHypergraph::from_edges(&[(vec![0, 1], 2), (vec![1, 2], 1), (vec![4, 5], 1)]);
        assert_eq!(g.size(), 4);
        assert_eq!(g.vertices(), vec![0, 1, 2, 4, 5]);
        assert_eq!(g.factorial(), BigUint::from(2u32));
        assert_eq!(g.components().len(), 2);
        assert_eq!(g.degree(1), 3);
        assert_eq!(g.sub_multisets().len(), 3 * 2 * 2);
        let b = MultiHypergraph::from_edges(&[(vec![0, 1], 1)]);
        assert_eq!(g.binom(&b), BigUint::from(2u32));
    }
}
