//! Exhaustive generation of labeled hypertrees and rooted hyperforests.
//!
//! Generation is breadth-first from the roots: each queued vertex picks its
//! set of child edges among unused vertices, blocks ordered by smallest
//! element, so every forest is produced exactly once.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::RootedHypertree;
use crate::error::{Error, Result};

/// Labeled forest on `[k]` whose components are rooted at `roots`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedForest {
    pub r: usize,
    pub k: usize,
    pub roots: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
}

pub fn default_enum_cap(r: usize) -> usize {
    if r == 2 {
        9
    } else {
        7
    }
}

struct Gen<'a, F: FnMut(&[Vec<usize>])> {
    k: usize,
    r: usize,
    used: u64,
    queue: Vec<usize>,
    edges: Vec<Vec<usize>>,
    emit: &'a mut F,
}

impl<F: FnMut(&[Vec<usize>])> Gen<'_, F> {
    fn full(&self) -> u64 {
        if self.k == 64 {
            u64::MAX
        } else {
            (1u64 << self.k) - 1
        }
    }

    fn process(&mut self, head: usize) {
        if head == self.queue.len() {
            if self.used == self.full() {
                (self.emit)(&self.edges);
            }
            return;
        }
        let v = self.queue[head];
        self.blocks(head, v, 0);
    }

    /// Chooses further child blocks of `v` whose smallest element is `>= lo`.
    fn blocks(&mut self, head: usize, v: usize, lo: usize) {
        self.process(head + 1);
        for a in lo..self.k {
            if self.used >> a & 1 == 1 {
                continue;
            }
            let rest: Vec<usize> = (a + 1..self.k).filter(|&x| self.used >> x & 1 == 0).collect();
            let need = self.r - 2;
            if rest.len() < need {
                continue;
            }
            let mut pick = Vec::with_capacity(need);
            self.choose_rest(head, v, a, &rest, 0, need, &mut pick);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn choose_rest(
        &mut self,
        head: usize,
        v: usize,
        a: usize,
        rest: &[usize],
        from: usize,
        need: usize,
        pick: &mut Vec<usize>,
    ) {
        if pick.len() == need {
            let mut block = vec![a];
            block.extend_from_slice(pick);
            let mut edge = block.clone();
            edge.push(v);
            edge.sort_unstable();
            for &b in &block {
                self.used |= 1 << b;
                self.queue.push(b);
            }
            self.edges.push(edge);
            self.blocks(head, v, a + 1);
            self.edges.pop();
            for &b in &block {
                self.used &= !(1 << b);
                self.queue.pop();
            }
            return;
        }
        for idx in from..rest.len() {
            if rest.len() - idx < need - pick.len() {
                break;
            }
            pick.push(rest[idx]);
            self.choose_rest(head, v, a, rest, idx + 1, need, pick);
            pick.pop();
        }
    }
}

fn generate(k: usize, r: usize, roots: &[usize], mut emit: impl FnMut(&[Vec<usize>])) {
    let mut used = 0u64;
    for &v in roots {
        used |= 1 << v;
    }
    let mut g = Gen {
        k,
        r,
        used,
        queue: roots.to_vec(),
        edges: Vec::new(),
        emit: &mut emit,
    };
    g.process(0);
}

fn check_enum_args(k: usize, r: usize, cap: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::Param(format!("uniformity r={r} must be >= 2")));
    }
    if k > cap || k > 63 {
        return Err(Error::Size {
            what: "labeled hypertree enumeration vertex count",
            size: k as u128,
            cap: cap.min(63) as u128,
        });
    }
    Ok(())
}

/// Calls `f` with the edge list of every hypertree on `[k]` rooted at `root`.
pub fn for_each_rooted_hypertree(
    k: usize,
    r: usize,
    root: usize,
    cap: usize,
    f: impl FnMut(&[Vec<usize>]),
) -> Result<()> {
    check_enum_args(k, r, cap)?;
    if k == 0 || (k - 1) % (r - 1) != 0 {
        return Ok(());
    }
    generate(k, r, &[root], f);
    Ok(())
}

pub fn enumerate_labeled_hypertrees(k: usize, r: usize) -> Result<Vec<RootedHypertree>> {
    enumerate_labeled_hypertrees_capped(k, r, default_enum_cap(r))
}

/// All labeled hypertrees on `[k]` (root unset); empty if `k` is infeasible.
pub fn enumerate_labeled_hypertrees_capped(
    k: usize,
    r: usize,
    cap: usize,
) -> Result<Vec<RootedHypertree>> {
    let mut out = Vec::new();
    for_each_rooted_hypertree(k, r, 0, cap, |edges| {
        let mut edges = edges.to_vec();
        edges.sort();
        out.push(RootedHypertree {
            r,
            k,
            root: None,
            edges,
        });
    })?;
    Ok(out)
}

/// All labeled forests on `[k]` made of `t` rooted hypertrees.
pub fn enumerate_rooted_forests(k: usize, t: usize, r: usize, cap: usize) -> Result<Vec<RootedForest>> {
    check_enum_args(k, r, cap)?;
    let mut out = Vec::new();
    if t == 0 || t > k || (k - t) % (r - 1) != 0 {
        return Ok(out);
    }
    crate::combin::for_each_combination(k, t, |roots| {
        generate(k, r, roots, |edges| {
            let mut edges = edges.to_vec();
            edges.sort();
            out.push(RootedForest {
                r,
                k,
                roots: roots.to_vec(),
                edges,
            });
        });
    });
    Ok(out)
}

/// Hyperforest count by exhaustive edge-subset search: every `l`-subset of
/// `r`-subsets of `[k]` with exactly `t` components, weighted by the number
/// of root choices (the product of component sizes).
pub fn brute_force_forest_count(k: usize, t: usize, r: usize, cap: u128) -> Result<num_bigint::BigUint> {
    use num_bigint::BigUint;
    if r < 2 || t == 0 || t > k || (k - t) % (r - 1) != 0 {
        return Ok(BigUint::from(0u32));
    }
    let l = (k - t) / (r - 1);
    let slots = crate::combin::SubsetIndex::new(k, r).all();
    crate::error::check_cap(
        "forest edge subsets",
        crate::combin::binomial(slots.len(), l),
        cap,
    )?;
    let mut total = BigUint::from(0u32);
    crate::combin::for_each_combination(slots.len(), l, |pick| {
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        let mut merges = 0;
        for &j in pick {
            let e = &slots[j];
            let a = find(&mut parent, e[0]);
            for &v in &e[1..] {
                let b = find(&mut parent, v);
                if b != a {
                    parent[b] = a;
                    merges += 1;
                }
            }
        }
        if merges != l * (r - 1) {
            return;
        }
        let mut size = vec![0u64; k];
        for v in 0..k {
            let root = find(&mut parent, v);
            size[root] += 1;
        }
        let prod: BigUint = size.iter().filter(|&&s| s > 0).map(|&s| BigUint::from(s)).product();
        total += prod;
    });
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    #[test]
    fn small_counts() {
        for r in 2..5 {
            assert_eq!(enumerate_labeled_hypertrees(r, r).unwrap().len(), 1);
        }
        assert_eq!(enumerate_labeled_hypertrees(3, 2).unwrap().len(), 3);
        assert_eq!(enumerate_labeled_hypertrees(4, 2).unwrap().len(), 16);
        assert_eq!(enumerate_labeled_hypertrees(5, 2).unwrap().len(), 125);
        assert_eq!(enumerate_labeled_hypertrees(5, 3).unwrap().len(), 15);
        assert!(enumerate_labeled_hypertrees(4, 3).unwrap().is_empty());
        assert!(enumerate_labeled_hypertrees(10, 2).is_err());
    }

    #[test]
    fn outputs_are_distinct_hypertrees() {
        let all = enumerate_labeled_hypertrees(7, 3).unwrap();
        let set: BTreeSet<_> = all.iter().map(|t| t.edges.clone()).collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|t| t.is_hypertree()));
    }

    #[test]
    fn rooted_forests_small() {
        assert_eq!(enumerate_rooted_forests(3, 1, 2, 9).unwrap().len(), 9);
        assert_eq!(enumerate_rooted_forests(3, 3, 3, 9).unwrap().len(), 1);
        assert_eq!(enumerate_rooted_forests(3, 1, 3, 9).unwrap().len(), 3);
    }
}
