//! Labeled index sets: the basis graphs with at most `D` edges and the
//! pairs `(beta, gamma)` of the orthonormal family.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::combin::{binomial, MultisetIndex, SubsetIndex};
use crate::error::{check_cap, Error, Result};

/// Largest basis accepted by the exact builders.
pub const INDEX_CAP: usize = 50_000;

/// Edge slots of the observation, simple `r`-subsets or `r`-multisets.
#[derive(Clone, Debug)]
pub struct EdgeUniverse {
    pub n: usize,
    pub r: usize,
    pub multi: bool,
    pub edges: Vec<Vec<usize>>,
    pub vmask: Vec<u32>,
}

impl EdgeUniverse {
    pub fn new(n: usize, r: usize, multi: bool) -> Result<Self> {
        if r < 2 || n < 1 || n > 31 || (!multi && n < r) {
            return Err(Error::Param("edge universe needs r >= 2 and 1 <= n <= 31".into()));
        }
        let edges = if multi {
            MultisetIndex::new(n, r).all()
        } else {
            SubsetIndex::new(n, r).all()
        };
        if edges.len() > u16::MAX as usize {
            return Err(Error::Size {
                what: "edge slots",
                size: edges.len() as u128,
                cap: u16::MAX as u128,
            });
        }
        let vmask = edges
            .iter()
            .map(|e| e.iter().fold(0u32, |m, &v| m | (1 << v)))
            .collect();
        Ok(EdgeUniverse {
            n,
            r,
            multi,
            edges,
            vmask,
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Slot of an edge given by its vertices.
    pub fn slot(&self, e: &[usize]) -> Option<usize> {
        let mut s = e.to_vec();
        s.sort_unstable();
        self.edges.iter().position(|x| *x == s)
    }
}

/// Labeled (multi-)hypergraph as sorted `(slot, multiplicity)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph(pub Vec<(u16, u8)>);

impl Graph {
    pub fn empty() -> Self {
        Graph(Vec::new())
    }

    pub fn from_slots(slots: &[usize]) -> Self {
        let mut g = Graph::empty();
        for &s in slots {
            g.add(s, 1);
        }
        g
    }

    pub fn add(&mut self, slot: usize, mult: u8) {
        let s = slot as u16;
        match self.0.binary_search_by(|(x, _)| x.cmp(&s)) {
            Ok(i) => self.0[i].1 += mult,
            Err(i) => self.0.insert(i, (s, mult)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of edges counted with multiplicity.
    pub fn size(&self) -> usize {
        self.0.iter().map(|&(_, m)| m as usize).sum()
    }

    pub fn is_simple(&self) -> bool {
        self.0.iter().all(|&(_, m)| m == 1)
    }

    pub fn mult(&self, slot: usize) -> u8 {
        let s = slot as u16;
        self.0
            .binary_search_by(|(x, _)| x.cmp(&s))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn vmask(&self, u: &EdgeUniverse) -> u32 {
        self.0
            .iter()
            .fold(0u32, |m, &(s, _)| m | u.vmask[s as usize])
    }

    /// `prod_e alpha_e!`.
    pub fn factorial(&self) -> u64 {
        self.0
            .iter()
            .map(|&(_, m)| (1..=m as u64).product::<u64>())
            .product()
    }

    /// `prod_e binom(alpha_e, beta_e)`.
    pub fn binom(&self, beta: &Graph) -> u64 {
        beta.0
            .iter()
            .map(|&(s, b)| binomial(self.mult(s as usize) as usize, b as usize) as u64)
            .product()
    }

    pub fn leq(&self, other: &Graph) -> bool {
        self.0.iter().all(|&(s, m)| other.mult(s as usize) >= m)
    }

    pub fn minus(&self, beta: &Graph) -> Graph {
        let mut out = Vec::new();
        for &(s, m) in &self.0 {
            let left = m - beta.mult(s as usize).min(m);
            if left > 0 {
                out.push((s, left));
            }
        }
        Graph(out)
    }

    pub fn plus(&self, other: &Graph) -> Graph {
        let mut g = self.clone();
        for &(s, m) in &other.0 {
            g.add(s as usize, m);
        }
        g
    }

    /// All `beta <= self`, the empty graph first and `self` last.
    pub fn sub_multisets(&self) -> Vec<Graph> {
        let mut out = vec![Graph::empty()];
        for &(s, m) in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (m as usize + 1));
            for g in &out {
                for k in 0..=m {
                    let mut h = g.clone();
                    if k > 0 {
                        h.0.push((s, k));
                    }
                    next.push(h);
                }
            }
            out = next;
        }
        out.sort_by_key(|g| g.size());
        out
    }

    /// Connected components as graphs, ordered by their smallest slot.
    pub fn components(&self, u: &EdgeUniverse) -> Vec<Graph> {
        let mut comps: Vec<(u32, Graph)> = Vec::new();
        for &(s, m) in &self.0 {
            let vm = u.vmask[s as usize];
            let mut merged = Graph(vec![(s, m)]);
            let mut mask = vm;
            let mut keep = Vec::new();
            for (cm, cg) in comps.drain(..) {
                if cm & mask != 0 {
                    mask |= cm;
                    merged = merged.plus(&cg);
                } else {
                    keep.push((cm, cg));
                }
            }
            keep.push((mask, merged));
            comps = keep;
        }
        comps.sort_by(|a, b| a.1 .0[0].0.cmp(&b.1 .0[0].0));
        comps.into_iter().map(|(_, g)| g).collect()
    }

    pub fn component_count(&self, u: &EdgeUniverse) -> usize {
        self.components(u).len()
    }

    pub fn is_connected(&self, u: &EdgeUniverse) -> bool {
        self.component_count(u) <= 1
    }

    /// Empty, or connected and touching vertex 0.
    pub fn is_good(&self, u: &EdgeUniverse) -> bool {
        self.is_empty() || (self.vmask(u) & 1 == 1 && self.is_connected(u))
    }
}

/// Which `gamma` accompany each `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairFamily {
    /// `gamma` a subset of `V(beta)` plus vertex 0.
    Restricted,
    /// `gamma` any subset of the vertex set.
    Full,
}

impl PairFamily {
    pub fn allows(&self, beta_mask: u32, gamma: u32, n: usize) -> bool {
        match self {
            PairFamily::Restricted => gamma & !(beta_mask | 1) == 0,
            PairFamily::Full => gamma >> n == 0,
        }
    }
}

/// The basis index set with lookup by graph.
#[derive(Clone, Debug)]
pub struct IndexSets {
    pub universe: EdgeUniverse,
    pub d: usize,
    pub graphs: Vec<Graph>,
    pub masks: Vec<u32>,
    lookup: BTreeMap<Graph, usize>,
}

/// Number of graphs with at most `d` edges over `slots` edge slots.
pub fn basis_size(slots: usize, d: usize, multi: bool) -> u128 {
    (0..=d)
        .map(|k| {
            if multi {
                binomial(slots + k - 1, k)
            } else {
                binomial(slots, k)
            }
        })
        .sum()
}

impl IndexSets {
    pub fn new(universe: EdgeUniverse, d: usize) -> Result<Self> {
        Self::with_cap(universe, d, INDEX_CAP)
    }

    pub fn with_cap(universe: EdgeUniverse, d: usize, cap: usize) -> Result<Self> {
        let total = if universe.is_empty() {
            1
        } else {
            basis_size(universe.len(), d, universe.multi)
        };
        check_cap("basis graphs", total, cap as u128)?;
        let mut graphs = Vec::with_capacity(total as usize);
        let mut cur = Graph::empty();
        fn rec(
            u: &EdgeUniverse,
            start: usize,
            left: usize,
            cur: &mut Graph,
            out: &mut Vec<Graph>,
        ) {
            out.push(cur.clone());
            if left == 0 {
                return;
            }
            for s in start..u.len() {
                cur.add(s, 1);
                let next = if u.multi { s } else { s + 1 };
                rec(u, next, left - 1, cur, out);
                let pos = cur.0.iter().position(|&(x, _)| x as usize == s).unwrap();
                if cur.0[pos].1 == 1 {
                    cur.0.remove(pos);
                } else {
                    cur.0[pos].1 -= 1;
                }
            }
        }
        rec(&universe, 0, d, &mut cur, &mut graphs);
        graphs.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
        let lookup = graphs.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let masks = graphs.iter().map(|g| g.vmask(&universe)).collect();
        Ok(IndexSets {
            universe,
            d,
            graphs,
            masks,
            lookup,
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn n(&self) -> usize {
        self.universe.n
    }

    pub fn position(&self, g: &Graph) -> Option<usize> {
        self.lookup.get(g).copied()
    }

    pub fn good(&self, i: usize) -> bool {
        self.graphs[i].is_good(&self.universe)
    }

    /// Every pair of the family, ordered by `beta` then `gamma`.
    pub fn pairs(&self, family: PairFamily) -> Vec<(usize, u32)> {
        let n = self.n();
        let mut out = Vec::new();
        for (b, &bm) in self.masks.iter().enumerate() {
            for gamma in 0u32..(1u32 << n) {
                if family.allows(bm, gamma, n) {
                    out.push((b, gamma));
                }
            }
        }
        out
    }

    /// Good pairs: `beta` good and `gamma` within `V(beta)` plus vertex 0.
    pub fn good_pairs(&self) -> Vec<(usize, u32)> {
        self.pairs(PairFamily::Restricted)
            .into_iter()
            .filter(|&(b, _)| self.good(b))
            .collect()
    }
}

/// Iterates the subsets of `mask`, the empty set included.
pub fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_counts() {
        let u = EdgeUniverse::new(4, 2, false).unwrap();
        let s = IndexSets::new(u, 2).unwrap();
        assert_eq!(s.len(), 1 + 6 + 15);
        let u = EdgeUniverse::new(3, 2, true).unwrap();
        let s = IndexSets::new(u, 2).unwrap();
        assert_eq!(s.len(), 1 + 6 + 21);
        assert!(s.graphs[0].is_empty());
    }

    #[test]
    fn components_and_goodness() {
        let u = EdgeUniverse::new(5, 2, false).unwrap();
        let e01 = u.slot(&[0, 1]).unwrap();
        let e12 = u.slot(&[1, 2]).unwrap();
        let e34 = u.slot(&[3, 4]).unwrap();
        let g = Graph::from_slots(&[e01, e12, e34]);
        assert_eq!(g.component_count(&u), 2);
        assert!(!g.is_good(&u));
        assert!(Graph::from_slots(&[e01, e12]).is_good(&u));
        assert!(!Graph::from_slots(&[e34]).is_good(&u));
        assert!(Graph::empty().is_good(&u));
    }

    #[test]
    fn sub_multisets_count() {
        let mut g = Graph::empty();
        g.add(0, 2);
        g.add(3, 1);
        let subs = g.sub_multisets();
        assert_eq!(subs.len(), 6);
        assert!(subs.iter().all(|b| b.leq(&g)));
        assert_eq!(g.binom(&Graph(vec![(0, 1)])), 2);
    }

    #[test]
    fn submask_iteration() {
        let v: Vec<u32> = submasks(0b101).collect();
        assert_eq!(v, vec![0b101, 0b100, 0b001, 0]);
    }
}
