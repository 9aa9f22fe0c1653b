//! Strongly balanced patterns and per-vertex copy counts.

use alloc::vec;
use alloc::vec::Vec;

use crate::combin::for_each_permutation;
use crate::error::{check_cap, Error, Result};
use crate::models::{Hypergraph, MultiHypergraph};

pub const PATTERN_EDGE_CAP: usize = 20;
pub const EMBEDDING_BUDGET: u128 = 2_000_000_000;

/// `|beta| / (|V(beta)| - 1) <= |alpha| / (|V(alpha)| - 1)` for every nonempty `beta <= alpha`.
pub fn is_strongly_balanced(alpha: &MultiHypergraph) -> Result<bool> {
    if alpha.is_empty() || !alpha.is_simple() {
        return Err(Error::Domain("pattern must be simple and nonempty".into()));
    }
    let edges: Vec<&Vec<usize>> = alpha.edges().map(|(e, _)| e).collect();
    check_cap("pattern edge count", edges.len() as u128, PATTERN_EDGE_CAP as u128)?;
    let (ea, va) = (edges.len() as u128, alpha.vertices().len() as u128 - 1);
    for mask in 1u32..(1 << edges.len()) {
        let mut verts: Vec<usize> = Vec::new();
        for (j, e) in edges.iter().enumerate() {
            if mask >> j & 1 == 1 {
                verts.extend_from_slice(e);
            }
        }
        verts.sort_unstable();
        verts.dedup();
        let eb = mask.count_ones() as u128;
        if eb * va > ea * (verts.len() as u128 - 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Vertex bijections of `V(alpha)` preserving the edge multiset.
pub fn pattern_automorphisms(alpha: &MultiHypergraph) -> u64 {
    let verts = alpha.vertices();
    let mut count = 0u64;
    for_each_permutation(&verts, |img| {
        let mut g = MultiHypergraph::new();
        for (e, m) in alpha.edges() {
            let f: Vec<usize> = e
                .iter()
                .map(|v| img[verts.binary_search(v).unwrap_or(0)])
                .collect();
            g.add_edge(&f, m);
        }
        if &g == alpha {
            count += 1;
        }
    });
    count
}

/// For each vertex `i`, the number of copies of `pattern` present in `y` that contain `i`.
pub fn pattern_count_estimator(y: &Hypergraph, pattern: &MultiHypergraph) -> Result<Vec<f64>> {
    if !is_strongly_balanced(pattern)? {
        return Err(Error::Domain("pattern is not strongly balanced".into()));
    }
    if pattern.edges().any(|(e, _)| e.len() != y.r()) {
        return Err(Error::Domain("pattern uniformity differs from observation".into()));
    }
    let verts = pattern.vertices();
    let n = y.n();
    let v = verts.len();
    let budget = (n as u128).saturating_pow(v as u32);
    check_cap("pattern embeddings", budget, EMBEDDING_BUDGET)?;
    // position of each pattern vertex; an edge is checked once its last vertex is placed
    let local: Vec<Vec<usize>> = pattern
        .edges()
        .map(|(e, _)| e.iter().map(|x| verts.binary_search(x).unwrap_or(0)).collect())
        .collect();
    let mut check_at: Vec<Vec<usize>> = vec![Vec::new(); v];
    for (j, e) in local.iter().enumerate() {
        let last = *e.iter().max().unwrap_or(&0);
        check_at[last].push(j);
    }
    let mut counts = vec![0u64; n];
    let mut phi = vec![0usize; v];
    let mut used = vec![false; n];
    let mut scratch = vec![0usize; y.r()];
    fn rec(
        depth: usize,
        y: &Hypergraph,
        local: &[Vec<usize>],
        check_at: &[Vec<usize>],
        phi: &mut [usize],
        used: &mut [bool],
        counts: &mut [u64],
        scratch: &mut [usize],
    ) {
        if depth == phi.len() {
            for &x in phi.iter() {
                counts[x] += 1;
            }
            return;
        }
        for x in 0..y.n() {
            if used[x] {
                continue;
            }
            phi[depth] = x;
            let ok = check_at[depth].iter().all(|&j| {
                for (s, &p) in scratch.iter_mut().zip(&local[j]) {
                    *s = phi[p];
                }
                y.has_edge(scratch)
            });
            if ok {
                used[x] = true;
                rec(depth + 1, y, local, check_at, phi, used, counts, scratch);
                used[x] = false;
            }
        }
    }
    rec(0, y, &local, &check_at, &mut phi, &mut used, &mut counts, &mut scratch);
    let aut = pattern_automorphisms(pattern) as f64;
    Ok(counts.into_iter().map(|c| c as f64 / aut).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balance_examples() {
        let edge = MultiHypergraph::simple(&[vec![0, 1]]);
        assert!(is_strongly_balanced(&edge).unwrap());
        let tri = MultiHypergraph::simple(&[vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert!(is_strongly_balanced(&tri).unwrap());
        let pend = MultiHypergraph::simple(&[vec![0, 1], vec![1, 2], vec![0, 2], vec![2, 3]]);
        assert!(!is_strongly_balanced(&pend).unwrap());
        assert_eq!(pattern_automorphisms(&tri), 6);
    }

    #[test]
    fn degree_counts_on_complete_graph() {
        let n = 6;
        let mut y = Hypergraph::empty(n, 2);
        for rank in 0..y.num_slots() {
            y.set_rank(rank, true);
        }
        let z = pattern_count_estimator(&y, &MultiHypergraph::simple(&[vec![0, 1]])).unwrap();
        assert!(z.iter().all(|&c| c == (n - 1) as f64));
        let empty = Hypergraph::empty(n, 2);
        let z0 = pattern_count_estimator(&empty, &MultiHypergraph::simple(&[vec![0, 1]])).unwrap();
        assert!(z0.iter().all(|&c| c == 0.0));
    }
}
