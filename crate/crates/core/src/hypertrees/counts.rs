//! Closed-form counts of labeled rooted hyperforests and hypertrees.

use alloc::format;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::combin::{big_factorial, big_pow};
use crate::error::{Error, Result};

/// `R_{k,t} = k!/(t-1)! * k^{l-1} / (l! (r-1)!^l)` with `l = (k-t)/(r-1)`.
pub fn count_rooted_forests(k: usize, t: usize, r: usize) -> Result<BigUint> {
    if r < 2 || t == 0 || t > k || (k - t) % (r - 1) != 0 {
        return Err(Error::Domain(format!("no {r}-uniform forest on {k} vertices with {t} trees")));
    }
    let l = (k - t) / (r - 1);
    let num = big_factorial(k) * big_pow(k, l);
    let den = big_factorial(t - 1) * big_factorial(l) * num_traits::pow(big_factorial(r - 1), l) * BigUint::from(k);
    let (q, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::Consistency(format!("R_(k={k},t={t}) is not an integer")));
    }
    Ok(q)
}

/// `N_k = (k-1)! k^{l-1} / (l! (r-1)!^l)` with `l = (k-1)/(r-1)`.
pub fn count_hypertrees(k: usize, r: usize) -> Result<BigUint> {
    if r < 2 || k == 0 || (k - 1) % (r - 1) != 0 {
        return Err(Error::Domain(format!("no {r}-uniform hypertree on {k} vertices")));
    }
    let l = (k - 1) / (r - 1);
    let num = big_factorial(k - 1) * big_pow(k, l);
    let den = big_factorial(l) * num_traits::pow(big_factorial(r - 1), l) * BigUint::from(k);
    let (q, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::Consistency(format!("N_(k={k}) is not an integer")));
    }
    Ok(q)
}

/// `N_k` as a rational for any `k >= 1`, using `l_k = ceil((k-1)/(r-1))`.
pub(crate) fn tree_baseline(k: usize, r: usize) -> num_rational::BigRational {
    let l = (k - 1).div_ceil(r - 1);
    let num = big_factorial(k - 1) * big_pow(k, l);
    let den = big_factorial(l) * num_traits::pow(big_factorial(r - 1), l) * BigUint::from(k);
    num_rational::BigRational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn examples() {
        assert_eq!(count_rooted_forests(3, 1, 2).unwrap(), BigUint::from(9u32));
        assert_eq!(count_rooted_forests(3, 3, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(count_rooted_forests(3, 1, 3).unwrap(), BigUint::from(3u32));
        assert_eq!(count_hypertrees(4, 2).unwrap(), BigUint::from(16u32));
        for r in 2..6 {
            assert_eq!(count_hypertrees(r, r).unwrap(), BigUint::from(1u32));
        }
        assert_eq!(count_hypertrees(5, 3).unwrap(), BigUint::from(15u32));
        assert!(count_rooted_forests(4, 1, 3).is_err());
    }

    #[test]
    fn cayley_and_rooting() {
        for k in 1..12usize {
            let nk = count_hypertrees(k, 2).unwrap();
            let cayley = if k == 1 { BigUint::one() } else { big_pow(k, k - 2) };
            assert_eq!(nk, cayley);
            assert_eq!(count_rooted_forests(k, 1, 2).unwrap(), nk * BigUint::from(k));
        }
    }
}
