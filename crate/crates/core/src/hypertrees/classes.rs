//! Isomorphism classes of the two-branch family: a root of degree two whose
//! edges each carry one rooted subtree with `ell` edges.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use super::{automorphism_count, connected_cover, incidence_tree, tree_from_key};
use super::{counts::count_rooted_forests, RootedHypertree};
use crate::combin::{big_factorial, factorial_u128};
use crate::error::{check_cap, Error, Result};

pub const DEFAULT_CLASS_CAP: u128 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeClass {
    pub tree: RootedHypertree,
    pub aut: BigUint,
    pub key: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeClassTable {
    pub ell: usize,
    pub r: usize,
    pub classes: Vec<TreeClass>,
}

impl TreeClassTable {
    /// Vertex count `(r-1)(2 ell + 2) + 1` of every member.
    pub fn k(&self) -> usize {
        total_vertices(self.ell, self.r)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Members on `[k]` with root 0: `sum_H (k-1)!/|Aut(H)|`.
    pub fn labeled_count(&self) -> BigUint {
        let bij = big_factorial(self.k() - 1);
        self.classes.iter().map(|c| &bij / &c.aut).sum()
    }
}

pub fn total_vertices(ell: usize, r: usize) -> usize {
    (r - 1) * (2 * ell + 2) + 1
}

fn weighted_multisets(
    weights: &[usize],
    count: Option<usize>,
    target: usize,
    cap: u128,
) -> Result<Vec<Vec<usize>>> {
    fn rec(
        weights: &[usize],
        count: Option<usize>,
        start: usize,
        left: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: u128,
    ) -> Result<()> {
        let full = count.map_or(false, |c| chosen.len() == c);
        if left == 0 && count.map_or(true, |c| chosen.len() == c) {
            out.push(chosen.clone());
            check_cap("hypertree shape count", out.len() as u128, cap)?;
        }
        if full {
            return Ok(());
        }
        for i in start..weights.len() {
            let w = weights[i];
            if w > left || (count.is_none() && w == 0) {
                continue;
            }
            chosen.push(i);
            rec(weights, count, i, left - w, chosen, out, cap)?;
            chosen.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(weights, count, 0, target, &mut Vec::new(), &mut out, cap)?;
    Ok(out)
}

fn wrap(open: u8, close: u8, mut parts: Vec<&[u8]>) -> Vec<u8> {
    parts.sort();
    let mut key = vec![open];
    for p in parts {
        key.extend_from_slice(p);
    }
    key.push(close);
    key
}

/// Keys of rooted `r`-uniform hypertree classes with exactly `m` edges, for `m <= ell`.
fn rooted_shapes(ell: usize, r: usize, cap: u128) -> Result<Vec<Vec<Vec<u8>>>> {
    let mut vshapes: Vec<Vec<Vec<u8>>> = vec![vec![b"()".to_vec()]];
    let mut eshapes: Vec<(Vec<u8>, usize)> = Vec::new();
    for m in 1..=ell {
        let pool: Vec<(&Vec<u8>, usize)> = vshapes
            .iter()
            .enumerate()
            .flat_map(|(sz, keys)| keys.iter().map(move |k| (k, sz)))
            .collect();
        let weights: Vec<usize> = pool.iter().map(|p| p.1).collect();
        let mut fresh: Vec<Vec<u8>> = weighted_multisets(&weights, Some(r - 1), m - 1, cap)?
            .into_iter()
            .map(|pick| wrap(b'[', b']', pick.iter().map(|&i| pool[i].0.as_slice()).collect()))
            .collect();
        fresh.sort();
        eshapes.extend(fresh.into_iter().map(|k| (k, m)));

        let weights: Vec<usize> = eshapes.iter().map(|e| e.1).collect();
        let mut next: Vec<Vec<u8>> = weighted_multisets(&weights, None, m, cap)?
            .into_iter()
            .map(|pick| wrap(b'(', b')', pick.iter().map(|&i| eshapes[i].0.as_slice()).collect()))
            .collect();
        next.sort();
        next.dedup();
        vshapes.push(next);
    }
    Ok(vshapes)
}

pub fn build_class_table(ell: usize, r: usize) -> Result<TreeClassTable> {
    build_class_table_capped(ell, r, DEFAULT_CLASS_CAP)
}

/// One representative per root-preserving isomorphism class, with `|Aut|`.
pub fn build_class_table_capped(ell: usize, r: usize, cap: u128) -> Result<TreeClassTable> {
    if r < 2 {
        return Err(Error::Param("uniformity must be >= 2".into()));
    }
    let shapes = rooted_shapes(ell, r, cap)?;
    let side = &shapes[ell];
    let pairs = side.len() as u128 * (side.len() as u128 + 1) / 2;
    check_cap("hypertree class count", pairs, cap)?;
    let leaf: &[u8] = b"()";
    let root_edge = |sub: &[u8]| {
        let mut parts = vec![sub];
        parts.extend(core::iter::repeat(leaf).take(r - 2));
        wrap(b'[', b']', parts)
    };
    let mut classes = Vec::with_capacity(pairs as usize);
    for a in 0..side.len() {
        let ea = root_edge(&side[a]);
        for b in a..side.len() {
            let eb = root_edge(&side[b]);
            let key = wrap(b'(', b')', vec![ea.as_slice(), eb.as_slice()]);
            let tree = tree_from_key(&key, r)?;
            let inc = incidence_tree(&tree)?;
            if inc.root_key() != key.as_slice() {
                return Err(Error::Consistency("class key is not canonical".into()));
            }
            classes.push(TreeClass {
                aut: automorphism_count(&inc),
                tree,
                key,
            });
        }
    }
    classes.sort_by(|x, y| x.key.cmp(&y.key));
    Ok(TreeClassTable { ell, r, classes })
}

/// Direct membership test for the two-branch family, rooted at `h.root`.
///
/// For `ell = 0` the branches are single vertices and every non-root vertex
/// of the root edges is a leaf.
pub fn in_special_family(h: &RootedHypertree, ell: usize) -> bool {
    let r = h.r;
    let root = h.root_or_zero();
    if h.k != total_vertices(ell, r) || !h.is_hypertree() {
        return false;
    }
    let root_edges: Vec<&Vec<usize>> = h.edges.iter().filter(|e| e.contains(&root)).collect();
    if root_edges.len() != 2 {
        return false;
    }
    let mut removed = vec![false; h.k];
    removed[root] = true;
    let mut attach = Vec::new();
    for e in &root_edges {
        let heavy: Vec<usize> = e.iter().copied().filter(|&v| v != root && h.degree(v) >= 2).collect();
        if ell == 0 {
            if !heavy.is_empty() {
                return false;
            }
            continue;
        }
        if heavy.len() != 1 {
            return false;
        }
        attach.push(heavy[0]);
        for &v in e.iter() {
            if v != root && v != heavy[0] {
                removed[v] = true;
            }
        }
    }
    if ell == 0 {
        return true;
    }
    let rest: Vec<&Vec<usize>> = h.edges.iter().filter(|e| !e.contains(&root)).collect();
    if rest.iter().any(|e| e.iter().any(|&v| removed[v])) {
        return false;
    }
    for &a in &attach {
        let mut comp = vec![a];
        let mut grew = true;
        while grew {
            grew = false;
            for e in &rest {
                if e.iter().any(|v| comp.contains(v)) && e.iter().any(|v| !comp.contains(v)) {
                    let fresh: Vec<usize> = e.iter().copied().filter(|v| !comp.contains(v)).collect();
                    comp.extend(fresh);
                    grew = true;
                }
            }
        }
        comp.sort_unstable();
        let sub: Vec<Vec<usize>> = rest
            .iter()
            .filter(|e| e.iter().all(|v| comp.contains(v)))
            .map(|e| e.iter().map(|v| comp.binary_search(v).unwrap_or(0)).collect())
            .collect();
        if sub.len() != ell || comp.len() != (r - 1) * ell + 1 || !connected_cover(comp.len(), &sub) {
            return false;
        }
    }
    true
}

/// Closed-form size of the family on `[n]` with root fixed:
/// `(n-1)!/(n-2k-2r+3)! * (R_{k,1}/k!)^2 / (2 (r-2)!^2)` with `k = (r-1) ell + 1`.
///
/// Exact whenever `ell >= 1` or `r = 2`; at `ell = 0` with `r >= 3` the
/// designated-vertex choice overcounts by `(r-1)^2`.
pub fn special_family_count(n: usize, ell: usize, r: usize) -> Result<BigRational> {
    let k = (r - 1) * ell + 1;
    let used = 2 * k + 2 * r - 3;
    if n < used {
        return Ok(BigRational::zero());
    }
    let falling = big_factorial(n - 1) / big_factorial(n - used);
    let rk = BigRational::new(count_rooted_forests(k, 1, r)?.into(), big_factorial(k).into());
    let den = 2 * factorial_u128(r - 2) * factorial_u128(r - 2);
    Ok(BigRational::from_integer(falling.into()) * &rk * &rk / BigRational::from_integer(den.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        let t = build_class_table(1, 2).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.classes[0].aut, BigUint::from(2u32));
        assert_eq!(t.classes[0].tree.k, 5);
        let t0 = build_class_table(0, 2).unwrap();
        assert_eq!(t0.len(), 1);
        assert_eq!(t0.classes[0].aut, BigUint::from(2u32));
        let t03 = build_class_table(0, 3).unwrap();
        assert_eq!(t03.classes[0].aut, BigUint::from(8u32));
        assert_eq!(build_class_table(2, 2).unwrap().len(), 3);
    }

    #[test]
    fn members_pass_membership() {
        for (ell, r) in [(0, 2), (1, 2), (2, 2), (3, 2), (0, 3), (1, 3), (2, 3), (1, 4)] {
            let t = build_class_table(ell, r).unwrap();
            for c in &t.classes {
                assert!(in_special_family(&c.tree, ell), "ell={ell} r={r}");
            }
        }
    }

    #[test]
    fn formula_overcount_at_ell_zero() {
        let t = build_class_table(0, 3).unwrap();
        let exact = BigRational::from_integer(t.labeled_count().into());
        assert_eq!(special_family_count(5, 0, 3).unwrap(), exact * BigRational::from_integer(4.into()));
    }
}
