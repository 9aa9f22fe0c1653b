//! The vertex/edge recursion over the incidence tree.
//!
//! Tables are indexed by `(vertex, color mask)` with masks restricted to the
//! popcount of the subtree. Node tables are memoized by subtree key, so one
//! context serves every class for a fixed coloring.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Coloring, Weight};
use crate::combin::{for_each_combination, for_each_permutation};
use crate::error::{Error, Result};
use crate::hypertrees::{incidence_tree, IncidenceTree, NodeKind, RootedHypertree};
use crate::models::SubsetTensor;

pub const MAX_COLORS: usize = 24;

struct MaskIndex {
    by_pop: Vec<Vec<u32>>,
    pos: Vec<u32>,
}

impl MaskIndex {
    fn new(k: usize) -> Self {
        let mut by_pop = vec![Vec::new(); k + 1];
        let mut pos = vec![0u32; 1 << k];
        for m in 0..(1u32 << k) {
            let p = m.count_ones() as usize;
            pos[m as usize] = by_pop[p].len() as u32;
            by_pop[p].push(m);
        }
        MaskIndex { by_pop, pos }
    }
}

struct Table<W> {
    width: usize,
    dense: Vec<W>,
    /// Per vertex, nonzero `(mask, value)` pairs.
    sparse: Vec<Vec<(u32, W)>>,
}

impl<W: Weight> Table<W> {
    fn from_dense(n: usize, width: usize, dense: Vec<W>, masks: &[u32]) -> Self {
        let sparse = (0..n)
            .map(|i| {
                dense[i * width..(i + 1) * width]
                    .iter()
                    .zip(masks)
                    .filter(|(v, _)| !v.is_zero())
                    .map(|(v, &m)| (m, v.clone()))
                    .collect()
            })
            .collect();
        Table { width, dense, sparse }
    }
}

/// Scoring state for one coloring.
pub struct ScoreContext<'a, W> {
    y: &'a SubsetTensor<W>,
    colors: Vec<u32>,
    k: usize,
    masks: MaskIndex,
    memo: BTreeMap<Vec<u8>, Table<W>>,
    tuples: Vec<Vec<usize>>,
    perms: Vec<Vec<usize>>,
}

impl<'a, W: Weight> ScoreContext<'a, W> {
    pub fn new(y: &'a SubsetTensor<W>, coloring: &Coloring) -> Result<Self> {
        let (n, r, k) = (y.n(), y.r(), coloring.k);
        if coloring.n() != n {
            return Err(Error::Domain(format!("coloring covers {} vertices, tensor {n}", coloring.n())));
        }
        if k > MAX_COLORS {
            return Err(Error::Size {
                what: "color count",
                size: k as u128,
                cap: MAX_COLORS as u128,
            });
        }
        let mut tuples = Vec::new();
        for_each_combination(n, r - 1, |t| tuples.push(t.to_vec()));
        let mut perms = Vec::new();
        let ids: Vec<usize> = (0..r - 1).collect();
        for_each_permutation(&ids, |p| perms.push(p.to_vec()));
        Ok(ScoreContext {
            y,
            colors: coloring.colors.iter().map(|&c| c as u32).collect(),
            k,
            masks: MaskIndex::new(k),
            memo: BTreeMap::new(),
            tuples,
            perms,
        })
    }

    /// `(A_root(i, [k]))_i` for a hypertree on `k` vertices rooted at its root.
    pub fn score(&mut self, h: &RootedHypertree) -> Result<Vec<W>> {
        if h.k != self.k {
            return Err(Error::Domain(format!("tree has {} vertices but {} colors", h.k, self.k)));
        }
        if h.r != self.y.r() {
            return Err(Error::Domain("tree and tensor uniformity differ".into()));
        }
        let tree = incidence_tree(h)?;
        for a in tree.postorder() {
            if !self.memo.contains_key(&tree.nodes[a].key) {
                let table = self.compute(&tree, a);
                self.memo.insert(tree.nodes[a].key.clone(), table);
            }
        }
        let root = &self.memo[tree.root_key()];
        debug_assert_eq!(root.width, 1);
        Ok(root.dense.clone())
    }

    fn compute(&self, tree: &IncidenceTree, a: usize) -> Table<W> {
        let node = &tree.nodes[a];
        let size = node.vtx.len();
        match node.kind {
            NodeKind::Vertex(_) => self.vertex_table(tree, a, size),
            NodeKind::Edge(_) => self.edge_table(tree, a, size),
        }
    }

    fn vertex_table(&self, tree: &IncidenceTree, a: usize, size: usize) -> Table<W> {
        let n = self.y.n();
        let out_masks = &self.masks.by_pop[size];
        let width = out_masks.len();
        let mut dense = vec![W::zero(); n * width];
        let children = &tree.nodes[a].children;
        if children.is_empty() {
            for i in 0..n {
                let m = 1u32 << self.colors[i];
                dense[i * width + self.masks.pos[m as usize] as usize] = W::one();
            }
            return Table::from_dense(n, width, dense, out_masks);
        }
        let child_tables: Vec<(&Table<W>, usize)> = children
            .iter()
            .map(|&c| (&self.memo[&tree.nodes[c].key], tree.nodes[c].vtx.len()))
            .collect();
        for i in 0..n {
            let ci = 1u32 << self.colors[i];
            // h_0 = 1 at the empty mask
            let mut pop = 0usize;
            let mut h: Vec<W> = vec![W::one()];
            for &(b, sz) in &child_tables {
                let next_pop = pop + sz;
                let next_masks = &self.masks.by_pop[next_pop];
                let mut next = vec![W::zero(); next_masks.len()];
                let brow = &b.dense[i * b.width..(i + 1) * b.width];
                if pop == 0 {
                    next.clone_from_slice(brow);
                } else if h.iter().any(|v| !v.is_zero()) {
                    for (slot, &q) in next.iter_mut().zip(next_masks) {
                        if q & ci != 0 {
                            continue;
                        }
                        let mut acc = W::zero();
                        let mut sub = q;
                        loop {
                            if sub.count_ones() as usize == pop {
                                let hv = &h[self.masks.pos[sub as usize] as usize];
                                if !hv.is_zero() {
                                    let bv = &brow[self.masks.pos[(q ^ sub) as usize] as usize];
                                    if !bv.is_zero() {
                                        acc.add_mul(hv, bv);
                                    }
                                }
                            }
                            if sub == 0 {
                                break;
                            }
                            sub = (sub - 1) & q;
                        }
                        *slot = acc;
                    }
                }
                h = next;
                pop = next_pop;
            }
            let row = &mut dense[i * width..(i + 1) * width];
            for (hv, &q) in h.into_iter().zip(&self.masks.by_pop[pop]) {
                if q & ci == 0 && !hv.is_zero() {
                    row[self.masks.pos[(q | ci) as usize] as usize] = hv;
                }
            }
        }
        Table::from_dense(n, width, dense, out_masks)
    }

    fn edge_table(&self, tree: &IncidenceTree, a: usize, size: usize) -> Table<W> {
        if let Some(leaf) = tree.nodes[a].children.iter().position(|&c| tree.nodes[c].vtx.len() == 1) {
            return self.edge_table_with_leaf(tree, a, size, leaf);
        }
        let n = self.y.n();
        let r = self.y.r();
        let out_masks = &self.masks.by_pop[size];
        let width = out_masks.len();
        let mut dense = vec![W::zero(); n * width];
        let children: Vec<&Table<W>> = tree.nodes[a]
            .children
            .iter()
            .map(|&c| &self.memo[&tree.nodes[c].key])
            .collect();
        let mut edge = vec![0usize; r];
        let mut assigned = vec![0usize; r - 1];
        for i in 0..n {
            let ci = 1u32 << self.colors[i];
            let row = &mut dense[i * width..(i + 1) * width];
            for ys in &self.tuples {
                if ys.contains(&i) {
                    continue;
                }
                merge_sorted(i, ys, &mut edge);
                let w = self.y.get_sorted(&edge);
                if w.is_zero() {
                    continue;
                }
                for p in &self.perms {
                    for (j, &pj) in p.iter().enumerate() {
                        assigned[j] = ys[pj];
                    }
                    accumulate(&children, &assigned, 0, ci, w.clone(), row, &self.masks.pos);
                }
            }
        }
        Table::from_dense(n, width, dense, out_masks)
    }

    /// Edge table with one leaf child placed last: its vertex is summed
    /// into per-color buckets before the mask products are expanded.
    fn edge_table_with_leaf(&self, tree: &IncidenceTree, a: usize, size: usize, leaf: usize) -> Table<W> {
        let n = self.y.n();
        let r = self.y.r();
        let out_masks = &self.masks.by_pop[size];
        let width = out_masks.len();
        let mut dense = vec![W::zero(); n * width];
        let children: Vec<&Table<W>> = tree.nodes[a]
            .children
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != leaf)
            .map(|(_, &c)| &self.memo[&tree.nodes[c].key])
            .collect();
        let mut prefixes: Vec<Vec<usize>> = Vec::new();
        let ids: Vec<usize> = (0..r - 2).collect();
        for_each_combination(n, r - 2, |t| {
            for_each_permutation(&ids, |p| prefixes.push(p.iter().map(|&j| t[j]).collect()));
        });
        let mut edge = vec![0usize; r];
        let mut bucket = vec![W::zero(); self.k];
        for i in 0..n {
            let ci = 1u32 << self.colors[i];
            let row = &mut dense[i * width..(i + 1) * width];
            for pre in &prefixes {
                if pre.contains(&i) {
                    continue;
                }
                bucket.iter_mut().for_each(|b| *b = W::zero());
                let mut any = false;
                for y in 0..n {
                    if y == i || pre.contains(&y) {
                        continue;
                    }
                    edge[0] = i;
                    edge[1..r - 1].copy_from_slice(pre);
                    edge[r - 1] = y;
                    edge.sort_unstable();
                    let w = self.y.get_sorted(&edge);
                    if w.is_zero() {
                        continue;
                    }
                    let c = self.colors[y] as usize;
                    bucket[c] = bucket[c].clone() + w.clone();
                    any = true;
                }
                if any {
                    accumulate_into_buckets(&children, pre, 0, ci, W::one(), &bucket, row, &self.masks.pos);
                }
            }
        }
        Table::from_dense(n, width, dense, out_masks)
    }
}

/// Like [`accumulate`], closing with one leaf whose color is read from `bucket`.
#[allow(clippy::too_many_arguments)]
fn accumulate_into_buckets<W: Weight>(
    children: &[&Table<W>],
    assigned: &[usize],
    mask: u32,
    forbid: u32,
    value: W,
    bucket: &[W],
    row: &mut [W],
    pos: &[u32],
) {
    match children.split_first() {
        None => {
            let used = mask | forbid;
            for (c, b) in bucket.iter().enumerate() {
                if used & (1 << c) == 0 && !b.is_zero() {
                    row[pos[(mask | 1 << c) as usize] as usize].add_mul(&value, b);
                }
            }
        }
        Some((first, rest)) => {
            for (m, v) in &first.sparse[assigned[0]] {
                if m & (mask | forbid) != 0 {
                    continue;
                }
                let next = value.clone() * v.clone();
                accumulate_into_buckets(rest, &assigned[1..], mask | m, forbid, next, bucket, row, pos);
            }
        }
    }
}

fn merge_sorted(i: usize, ys: &[usize], out: &mut [usize]) {
    let mut placed = false;
    let mut o = 0;
    for &y in ys {
        if !placed && i < y {
            out[o] = i;
            o += 1;
            placed = true;
        }
        out[o] = y;
        o += 1;
    }
    if !placed {
        out[o] = i;
    }
}

/// Expands the product of child tables over pairwise-disjoint masks.
fn accumulate<W: Weight>(
    children: &[&Table<W>],
    assigned: &[usize],
    mask: u32,
    forbid: u32,
    value: W,
    row: &mut [W],
    pos: &[u32],
) {
    match children.split_first() {
        None => row[pos[mask as usize] as usize].add_mul(&value, &W::one()),
        Some((first, rest)) => {
            for (m, v) in &first.sparse[assigned[0]] {
                if m & (mask | forbid) != 0 {
                    continue;
                }
                accumulate(rest, &assigned[1..], mask | m, forbid, value.clone() * v.clone(), row, pos);
            }
        }
    }
}

/// One-shot score of a single tree under a coloring.
pub fn color_coded_score<W: Weight>(
    y: &SubsetTensor<W>,
    coloring: &Coloring,
    h: &RootedHypertree,
) -> Result<Vec<W>> {
    ScoreContext::new(y, coloring)?.score(h)
}
