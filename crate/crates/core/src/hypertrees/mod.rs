//! Rooted `r`-uniform hypertrees, their incidence trees, canonical keys
//! and automorphism counts, plus enumeration and counting helpers.

mod bounds;
mod classes;
mod counts;
mod enumerate;

pub use bounds::{
    connected_multi_count, count_connected_hypergraphs, multi_edge_bound, simple_to_tree_report,
    MultiEdgeKind, SimpleToTreeRow,
};
pub use classes::total_vertices;
pub use classes::{
    build_class_table, build_class_table_capped, in_special_family, special_family_count, TreeClass,
    TreeClassTable,
};
pub use counts::{count_hypertrees, count_rooted_forests};
pub use enumerate::{
    brute_force_forest_count, default_enum_cap, enumerate_labeled_hypertrees, enumerate_labeled_hypertrees_capped,
    enumerate_rooted_forests, for_each_rooted_hypertree, RootedForest,
};

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use crate::combin::big_factorial;
use crate::error::{Error, Result};

/// A hypertree on `[k]`, optionally rooted. Edges are sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootedHypertree {
    pub r: usize,
    pub k: usize,
    pub root: Option<usize>,
    pub edges: Vec<Vec<usize>>,
}

impl RootedHypertree {
    pub fn new(r: usize, k: usize, root: Option<usize>, mut edges: Vec<Vec<usize>>) -> Result<Self> {
        for e in edges.iter_mut() {
            e.sort_unstable();
        }
        edges.sort();
        let t = RootedHypertree { r, k, root, edges };
        if !t.is_hypertree() {
            return Err(Error::Domain(format!("not an {r}-uniform hypertree on {k} vertices")));
        }
        Ok(t)
    }

    pub fn rooted(&self, root: usize) -> Self {
        RootedHypertree {
            root: Some(root),
            ..self.clone()
        }
    }

    pub fn root_or_zero(&self) -> usize {
        self.root.unwrap_or(0)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    /// Connected, `|E| = (k-1)/(r-1)`, every edge an `r`-subset of `[k]`.
    pub fn is_hypertree(&self) -> bool {
        let (k, r) = (self.k, self.r);
        if r < 2 || k == 0 || (k - 1) % (r - 1) != 0 || self.edges.len() != (k - 1) / (r - 1) {
            return false;
        }
        let well_formed = self
            .edges
            .iter()
            .all(|e| e.len() == r && e.windows(2).all(|w| w[0] < w[1]) && e[r - 1] < k);
        if !well_formed || self.edges.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        if let Some(root) = self.root {
            if root >= k {
                return false;
            }
        }
        connected_cover(k, &self.edges)
    }

    /// Image under the vertex map `v -> map[v]` on a `len(map)`-sized ground set.
    pub fn relabeled(&self, map: &[usize], new_k: usize) -> RootedHypertree {
        let mut edges: Vec<Vec<usize>> = self
            .edges
            .iter()
            .map(|e| {
                let mut f: Vec<usize> = e.iter().map(|&v| map[v]).collect();
                f.sort_unstable();
                f
            })
            .collect();
        edges.sort();
        RootedHypertree {
            r: self.r,
            k: new_k,
            root: self.root.map(|v| map[v]),
            edges,
        }
    }
}

/// Every vertex of `[k]` lies in one connected piece of `edges`.
pub(crate) fn connected_cover(k: usize, edges: &[Vec<usize>]) -> bool {
    if k == 0 {
        return true;
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (j, e) in edges.iter().enumerate() {
        for &v in e {
            incident[v].push(j);
        }
    }
    let mut seen = vec![false; k];
    let mut used = vec![false; edges.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &j in &incident[v] {
            if used[j] {
                continue;
            }
            used[j] = true;
            for &w in &edges[j] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Vertex(usize),
    Edge(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceNode {
    pub kind: NodeKind,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Vertex labels below this node; an edge-node excludes its parent.
    pub vtx: Vec<usize>,
    /// Canonical encoding of the subtree rooted here.
    pub key: Vec<u8>,
}

/// Bipartite vertex-node / edge-node tree of a rooted hypertree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceTree {
    pub nodes: Vec<IncidenceNode>,
    pub root: usize,
}

impl IncidenceTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node ids such that children precede parents.
    pub fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((a, done)) = stack.pop() {
            if done {
                order.push(a);
            } else {
                stack.push((a, true));
                for &c in self.nodes[a].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    pub fn root_key(&self) -> &[u8] {
        &self.nodes[self.root].key
    }
}

pub fn incidence_tree(h: &RootedHypertree) -> Result<IncidenceTree> {
    if !h.is_hypertree() {
        return Err(Error::Domain("input is not a hypertree".into()));
    }
    let root = h.root_or_zero();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); h.k];
    for (j, e) in h.edges.iter().enumerate() {
        for &v in e {
            incident[v].push(j);
        }
    }
    let mut nodes: Vec<IncidenceNode> = Vec::with_capacity(h.k + h.edges.len());
    let mut edge_done = vec![false; h.edges.len()];
    let new_node = |kind, parent| IncidenceNode {
        kind,
        parent,
        children: Vec::new(),
        vtx: Vec::new(),
        key: Vec::new(),
    };
    nodes.push(new_node(NodeKind::Vertex(root), None));
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        match nodes[a].kind {
            NodeKind::Vertex(v) => {
                for &j in &incident[v] {
                    if edge_done[j] {
                        continue;
                    }
                    edge_done[j] = true;
                    let id = nodes.len();
                    nodes.push(new_node(NodeKind::Edge(j), Some(a)));
                    nodes[a].children.push(id);
                    queue.push_back(id);
                }
            }
            NodeKind::Edge(j) => {
                let parent_v = match nodes[nodes[a].parent.unwrap_or(0)].kind {
                    NodeKind::Vertex(v) => v,
                    NodeKind::Edge(_) => unreachable!(),
                };
                for &w in &h.edges[j] {
                    if w == parent_v {
                        continue;
                    }
                    let id = nodes.len();
                    nodes.push(new_node(NodeKind::Vertex(w), Some(a)));
                    nodes[a].children.push(id);
                    queue.push_back(id);
                }
            }
        }
    }
    let mut t = IncidenceTree { nodes, root: 0 };
    for a in t.postorder() {
        let mut children = core::mem::take(&mut t.nodes[a].children);
        children.sort_by(|&x, &y| {
            t.nodes[x]
                .key
                .cmp(&t.nodes[y].key)
                .then_with(|| t.nodes[x].vtx.cmp(&t.nodes[y].vtx))
        });
        let (open, close) = match t.nodes[a].kind {
            NodeKind::Vertex(_) => (b'(', b')'),
            NodeKind::Edge(_) => (b'[', b']'),
        };
        let mut key = vec![open];
        let mut vtx = match t.nodes[a].kind {
            NodeKind::Vertex(v) => vec![v],
            NodeKind::Edge(_) => Vec::new(),
        };
        for &c in &children {
            key.extend_from_slice(&t.nodes[c].key);
            vtx.extend_from_slice(&t.nodes[c].vtx);
        }
        key.push(close);
        vtx.sort_unstable();
        let node = &mut t.nodes[a];
        node.children = children;
        node.key = key;
        node.vtx = vtx;
    }
    Ok(t)
}

/// Equal keys iff the rooted hypertrees are root-preserving isomorphic.
pub fn canonical_key(h: &RootedHypertree) -> Result<Vec<u8>> {
    Ok(incidence_tree(h)?.nodes[0].key.clone())
}

/// Root-preserving automorphism count: product over nodes of the factorials
/// of repeated child keys.
pub fn automorphism_count(t: &IncidenceTree) -> BigUint {
    let mut acc = BigUint::one();
    for node in &t.nodes {
        let mut run = 1usize;
        for w in node.children.windows(2) {
            if t.nodes[w[0]].key == t.nodes[w[1]].key {
                run += 1;
            } else {
                acc *= big_factorial(run);
                run = 1;
            }
        }
        acc *= big_factorial(run);
    }
    acc
}

/// Builds a labeled representative from a canonical key. Vertices are
/// numbered in preorder with the root as 0.
pub fn tree_from_key(key: &[u8], r: usize) -> Result<RootedHypertree> {
    struct Parser<'a> {
        key: &'a [u8],
        pos: usize,
        next_vertex: usize,
        edges: Vec<Vec<usize>>,
    }
    impl Parser<'_> {
        fn vertex(&mut self) -> Result<usize> {
            if self.key.get(self.pos) != Some(&b'(') {
                return Err(Error::Domain("malformed key: expected '('".into()));
            }
            self.pos += 1;
            let v = self.next_vertex;
            self.next_vertex += 1;
            while self.key.get(self.pos) == Some(&b'[') {
                self.pos += 1;
                let mut e = vec![v];
                while self.key.get(self.pos) == Some(&b'(') {
                    e.push(self.vertex()?);
                }
                if self.key.get(self.pos) != Some(&b']') {
                    return Err(Error::Domain("malformed key: expected ']'".into()));
                }
                self.pos += 1;
                self.edges.push(e);
            }
            if self.key.get(self.pos) != Some(&b')') {
                return Err(Error::Domain("malformed key: expected ')'".into()));
            }
            self.pos += 1;
            Ok(v)
        }
    }
    let mut p = Parser {
        key,
        pos: 0,
        next_vertex: 0,
        edges: Vec::new(),
    };
    p.vertex()?;
    if p.pos != key.len() {
        return Err(Error::Domain("trailing bytes in key".into()));
    }
    let k = p.next_vertex;
    RootedHypertree::new(r, k, Some(0), p.edges)
}

/// Brute-force count of root-preserving vertex bijections preserving the edge set.
pub fn brute_force_automorphisms(h: &RootedHypertree) -> u64 {
    let root = h.root_or_zero();
    let others: Vec<usize> = (0..h.k).filter(|&v| v != root).collect();
    let mut count = 0u64;
    crate::combin::for_each_permutation(&others, |img| {
        let mut map = vec![0usize; h.k];
        map[root] = root;
        for (src, &dst) in others.iter().zip(img) {
            map[*src] = dst;
        }
        if h.relabeled(&map, h.k).edges == h.edges {
            count += 1;
        }
    });
    count
}

/// Brute-force isomorphism invariant: the smallest relabeled edge list over
/// all root-preserving bijections onto `[k]` sending the root to 0.
pub fn brute_force_canonical_form(h: &RootedHypertree) -> Vec<Vec<usize>> {
    let root = h.root_or_zero();
    let others: Vec<usize> = (0..h.k).filter(|&v| v != root).collect();
    let targets: Vec<usize> = (1..h.k).collect();
    let mut best: Option<Vec<Vec<usize>>> = None;
    crate::combin::for_each_permutation(&targets, |img| {
        let mut map = vec![0usize; h.k];
        for (src, &dst) in others.iter().zip(img) {
            map[*src] = dst;
        }
        let cand = h.relabeled(&map, h.k).edges;
        if best.as_ref().map_or(true, |b| cand < *b) {
            best = Some(cand);
        }
    });
    best.unwrap_or_default()
}
