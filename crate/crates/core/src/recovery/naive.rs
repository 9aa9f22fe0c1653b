//! Direct embedding sums used as oracles for the dynamic program.

use alloc::vec;
use alloc::vec::Vec;

use super::{Coloring, Weight};
use crate::combin::for_each_combination;
use crate::error::{check_cap, Error, Result};
use crate::hypertrees::{
    for_each_rooted_hypertree, in_special_family, incidence_tree, NodeKind, RootedHypertree,
};
use crate::hypertrees::total_vertices;
use crate::models::SubsetTensor;

pub const NAIVE_CAP: usize = 14;

/// `sum over injective phi with phi(root) = i and c injective on the image`
/// of `prod_e Y[phi(e)]`.
pub fn naive_colorful_score<W: Weight>(
    y: &SubsetTensor<W>,
    coloring: &Coloring,
    h: &RootedHypertree,
    i: usize,
) -> Result<W> {
    let n = y.n();
    check_cap("naive embedding vertex count", n as u128, NAIVE_CAP as u128)?;
    if coloring.n() != n || i >= n {
        return Err(Error::Domain("coloring or root index does not match tensor".into()));
    }
    let tree = incidence_tree(h)?;
    // edges in breadth-first order as (parent label, child labels)
    let mut steps: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut queue = vec![tree.root];
    let mut head = 0;
    while head < queue.len() {
        let a = queue[head];
        head += 1;
        if let NodeKind::Edge(_) = tree.nodes[a].kind {
            let parent = match tree.nodes[tree.nodes[a].parent.unwrap_or(0)].kind {
                NodeKind::Vertex(v) => v,
                NodeKind::Edge(_) => unreachable!(),
            };
            let kids = tree.nodes[a]
                .children
                .iter()
                .map(|&c| match tree.nodes[c].kind {
                    NodeKind::Vertex(v) => v,
                    NodeKind::Edge(_) => unreachable!(),
                })
                .collect();
            steps.push((parent, kids));
        }
        queue.extend_from_slice(&tree.nodes[a].children);
    }
    let mut phi = vec![usize::MAX; h.k];
    phi[h.root_or_zero()] = i;
    let mut used_v = vec![false; n];
    let mut used_c = vec![false; coloring.k];
    used_v[i] = true;
    used_c[coloring.colors[i]] = true;
    let mut total = W::zero();
    embed(y, coloring, &steps, 0, 0, &mut phi, &mut used_v, &mut used_c, W::one(), &mut total);
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn embed<W: Weight>(
    y: &SubsetTensor<W>,
    coloring: &Coloring,
    steps: &[(usize, Vec<usize>)],
    step: usize,
    child: usize,
    phi: &mut [usize],
    used_v: &mut [bool],
    used_c: &mut [bool],
    acc: W,
    total: &mut W,
) {
    if step == steps.len() {
        *total = total.clone() + acc;
        return;
    }
    let (parent, kids) = &steps[step];
    if child == kids.len() {
        let mut e: Vec<usize> = core::iter::once(phi[*parent]).chain(kids.iter().map(|&v| phi[v])).collect();
        e.sort_unstable();
        let w = y.get_sorted(&e);
        if w.is_zero() {
            return;
        }
        let next = acc * w.clone();
        embed(y, coloring, steps, step + 1, 0, phi, used_v, used_c, next, total);
        return;
    }
    for x in 0..y.n() {
        let c = coloring.colors[x];
        if used_v[x] || used_c[c] {
            continue;
        }
        used_v[x] = true;
        used_c[c] = true;
        phi[kids[child]] = x;
        embed(y, coloring, steps, step, child + 1, phi, used_v, used_c, acc.clone(), total);
        used_v[x] = false;
        used_c[c] = false;
    }
    phi[kids[child]] = usize::MAX;
}

/// Labeled members of the two-branch family on `[k]`, rooted at 0.
pub fn special_family_members(ell: usize, r: usize) -> Result<Vec<RootedHypertree>> {
    let k = total_vertices(ell, r);
    let mut out = Vec::new();
    for_each_rooted_hypertree(k, r, 0, NAIVE_CAP, |edges| {
        let mut edges = edges.to_vec();
        edges.sort();
        let t = RootedHypertree {
            r,
            k,
            root: Some(0),
            edges,
        };
        if in_special_family(&t, ell) {
            out.push(t);
        }
    })?;
    Ok(out)
}

/// `sum_{alpha in family rooted at i} prod_{e in alpha} Y_e`, by enumeration.
pub fn full_tree_polynomial<W: Weight>(y: &SubsetTensor<W>, ell: usize, i: usize) -> Result<W> {
    let (n, r) = (y.n(), y.r());
    check_cap("full tree polynomial vertex count", n as u128, 12)?;
    let k = total_vertices(ell, r);
    if n < k {
        return Ok(W::zero());
    }
    let members = special_family_members(ell, r)?;
    let others: Vec<usize> = (0..n).filter(|&v| v != i).collect();
    let mut total = W::zero();
    let mut map = vec![0usize; k];
    map[0] = i;
    for_each_combination(others.len(), k - 1, |pick| {
        for (j, &p) in pick.iter().enumerate() {
            map[j + 1] = others[p];
        }
        for t in &members {
            let mut term = W::one();
            for e in &t.edges {
                let mut img: Vec<usize> = e.iter().map(|&v| map[v]).collect();
                img.sort_unstable();
                term = term * y.get_sorted(&img).clone();
                if term.is_zero() {
                    break;
                }
            }
            total = total.clone() + term;
        }
    });
    Ok(total)
}
