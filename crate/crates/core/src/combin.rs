//! Binomials, factorials and colexicographic ranking of subsets and multisets.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::One;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn big_binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= (n - i) as u64;
        acc /= (i + 1) as u64;
    }
    acc
}

pub fn big_factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i as u64;
    }
    acc
}

pub fn factorial_u128(n: usize) -> u128 {
    (2..=n as u128).product()
}

pub fn big_pow(base: usize, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base as u64), exp)
}

/// Pascal table for colex ranks of `r`-subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetIndex {
    n: usize,
    r: usize,
    table: Vec<Vec<usize>>,
}

impl SubsetIndex {
    pub fn new(n: usize, r: usize) -> Self {
        let mut table = vec![vec![0usize; r + 2]; n + r + 1];
        for (v, row) in table.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = binomial(v, j) as usize;
            }
        }
        SubsetIndex { n, r, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of `r`-subsets.
    pub fn len(&self) -> usize {
        self.table[self.n][self.r]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Colex rank of a strictly increasing tuple.
    #[inline]
    pub fn rank_sorted(&self, sorted: &[usize]) -> usize {
        debug_assert_eq!(sorted.len(), self.r);
        let mut acc = 0;
        for (j, &v) in sorted.iter().enumerate() {
            acc += self.table[v][j + 1];
        }
        acc
    }

    /// Colex rank of distinct indices in any order.
    pub fn rank(&self, idx: &[usize]) -> usize {
        let mut buf: Vec<usize> = idx.to_vec();
        buf.sort_unstable();
        self.rank_sorted(&buf)
    }

    pub fn unrank(&self, mut rank: usize) -> Vec<usize> {
        let mut out = vec![0; self.r];
        for j in (1..=self.r).rev() {
            let mut v = j - 1;
            while self.table[v + 1][j] <= rank {
                v += 1;
            }
            rank -= self.table[v][j];
            out[j - 1] = v;
        }
        out
    }

    /// All subsets in colex order.
    pub fn all(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|i| self.unrank(i)).collect()
    }
}

/// Colex ranks of `r`-multisets of `[n]` through the shift `v_j + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisetIndex {
    inner: SubsetIndex,
}

impl MultisetIndex {
    pub fn new(n: usize, r: usize) -> Self {
        MultisetIndex {
            inner: SubsetIndex::new(n + r - 1, r),
        }
    }

    pub fn n(&self) -> usize {
        self.inner.n + 1 - self.inner.r
    }

    pub fn r(&self) -> usize {
        self.inner.r
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn rank(&self, idx: &[usize]) -> usize {
        let mut buf: Vec<usize> = idx.to_vec();
        buf.sort_unstable();
        for (j, v) in buf.iter_mut().enumerate() {
            *v += j;
        }
        self.inner.rank_sorted(&buf)
    }

    pub fn unrank(&self, rank: usize) -> Vec<usize> {
        let mut v = self.inner.unrank(rank);
        for (j, x) in v.iter_mut().enumerate() {
            *x -= j;
        }
        v
    }

    pub fn all(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|i| self.unrank(i)).collect()
    }
}

/// Calls `f` on every `k`-subset of `0..n` as an increasing slice.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Calls `f` on every permutation of `items` (Heap's algorithm).
pub fn for_each_permutation<T: Clone>(items: &[T], mut f: impl FnMut(&[T])) {
    let mut a: Vec<T> = items.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Multiplicity-pattern factor `prod m_i!` of a sorted multiset.
pub fn multiplicity_factorial(sorted: &[usize]) -> u128 {
    let mut acc = 1u128;
    let mut run = 0usize;
    for i in 0..sorted.len() {
        if i > 0 && sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            run = 1;
        }
        acc *= run as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_rank_roundtrip() {
        let idx = SubsetIndex::new(7, 3);
        assert_eq!(idx.len(), 35);
        for rank in 0..idx.len() {
            let s = idx.unrank(rank);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(idx.rank_sorted(&s), rank);
        }
    }

    #[test]
    fn multiset_rank_roundtrip() {
        let idx = MultisetIndex::new(4, 3);
        assert_eq!(idx.len(), 20);
        for rank in 0..idx.len() {
            let s = idx.unrank(rank);
            assert!(s.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(idx.rank(&s), rank);
        }
    }

    #[test]
    fn combinations_and_permutations() {
        let mut count = 0;
        for_each_combination(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        let mut perms = 0;
        for_each_permutation(&[1, 2, 3, 4], |_| perms += 1);
        assert_eq!(perms, 24);
        let mut empty = 0;
        for_each_combination(3, 0, |s| {
            assert!(s.is_empty());
            empty += 1
        });
        assert_eq!(empty, 1);
    }

    #[test]
    fn multiplicity_factor() {
        assert_eq!(multiplicity_factorial(&[0, 0, 1]), 2);
        assert_eq!(multiplicity_factorial(&[2, 2, 2]), 6);
        assert_eq!(multiplicity_factorial(&[0, 1, 2]), 1);
    }
}
