//! Monic probabilists' Hermite polynomials with exact coefficients and
//! Gaussian expectations of polynomials.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::exact::{qi, Q};

/// Polynomial coefficients, lowest degree first.
pub type Poly = Vec<Q>;

pub fn poly_mul(a: &[Q], b: &[Q]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `He_k(x + z)` as a polynomial in `z`, from `He_{k+1} = (x+z) He_k - k He_{k-1}`.
pub fn shifted_hermite(k: usize, x: &Q) -> Poly {
    let mut prev: Poly = vec![qi(1)];
    if k == 0 {
        return prev;
    }
    let mut cur: Poly = vec![x.clone(), qi(1)];
    for j in 1..k {
        let mut next = vec![Q::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i] += c * x;
            next[i + 1] += c;
        }
        let jq = qi(j as i64);
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c * &jq;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `He_k(z)`.
pub fn hermite(k: usize) -> Poly {
    shifted_hermite(k, &Q::zero())
}

/// `E[Z^k]` for a standard Gaussian.
pub fn gaussian_moment(k: usize) -> Q {
    if k % 2 == 1 {
        return Q::zero();
    }
    let mut acc: i64 = 1;
    let mut j = k as i64 - 1;
    while j > 1 {
        acc *= j;
        j -= 2;
    }
    qi(acc)
}

/// `E[p(Z)]` for a standard Gaussian `Z`.
pub fn gaussian_expect(p: &[Q]) -> Q {
    p.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| c * gaussian_moment(k))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn low_degree_hermite() {
        assert_eq!(hermite(2), vec![qi(-1), qi(0), qi(1)]);
        assert_eq!(hermite(3), vec![qi(0), qi(-3), qi(0), qi(1)]);
    }

    #[test]
    fn orthogonality() {
        for a in 0..5 {
            for b in 0..5 {
                let v = gaussian_expect(&poly_mul(&hermite(a), &hermite(b)));
                let expect = if a == b {
                    (1..=a as i64).product::<i64>()
                } else {
                    0
                };
                assert_eq!(v, qi(expect), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn shifted_mean_is_power() {
        let x = q(2, 3);
        for k in 0..6 {
            let v = gaussian_expect(&shifted_hermite(k, &x));
            assert_eq!(v, num_traits::pow(x.clone(), k));
        }
    }
}
