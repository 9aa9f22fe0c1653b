use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Solution of `G x = c` by exact elimination.
#[derive(Clone, Debug)]
pub struct RationalSolve {
    /// A solution with free variables set to zero.
    pub x: Vec<BigRational>,
    pub rank: usize,
}

/// Solves `G x = c` by Gauss-Jordan elimination over the rationals.
///
/// For symmetric `G` and `c` in the range of `G`, `c^T x = c^T G^+ c` for
/// every solution `x`. Fails with a consistency error when `c` is not in
/// the range.
pub fn solve_gauss(g: &[Vec<BigRational>], c: &[BigRational]) -> Result<RationalSolve> {
    let n = g.len();
    if c.len() != n || g.iter().any(|row| row.len() != n) {
        return Err(Error::Domain("matrix and vector sizes disagree".into()));
    }
    let mut a: Vec<Vec<BigRational>> = g
        .iter()
        .zip(c)
        .map(|(row, ci)| {
            let mut r = row.clone();
            r.push(ci.clone());
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        // Prefer the pivot with the shortest representation.
        let mut best: Option<(usize, u64)> = None;
        for (r, line) in a.iter().enumerate().skip(row) {
            let v = &line[col];
            if !v.is_zero() {
                let size = v.numer().bits() + v.denom().bits();
                if best.map_or(true, |(_, s)| size < s) {
                    best = Some((r, size));
                }
            }
        }
        let Some((p, _)) = best else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row][col..].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[row].clone();
        for (r, line) in a.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let factor = line[col].clone();
            for (j, pv) in pivot_row.iter().enumerate().skip(col) {
                if !pv.is_zero() {
                    line[j] -= &factor * pv;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let rank = pivots.len();
    for line in a.iter().skip(rank) {
        if !line[n].is_zero() {
            return Err(Error::Consistency(
                "right-hand side is not in the range of the matrix".into(),
            ));
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for &(r, col) in &pivots {
        x[col] = a[r][n].clone();
    }
    Ok(RationalSolve { x, rank })
}


/// Below this size the direct elimination is used.
const GAUSS_CUTOFF: usize = 24;

/// Solves `G x = c` for a square rational matrix with rank detection.
///
/// Small systems use [`solve_gauss`]. Larger ones take a pivot set from
/// elimination modulo a few primes, solve the principal subsystem modulo
/// many primes, reconstruct the rationals and verify `G x = c` exactly.
/// The principal subsystem on the pivot columns is nonsingular for
/// positive semidefinite `G`; otherwise this falls back to elimination.
pub fn solve_symmetric(g: &[Vec<BigRational>], c: &[BigRational]) -> Result<RationalSolve> {
    let n = g.len();
    if c.len() != n || g.iter().any(|row| row.len() != n) {
        return Err(Error::Domain("matrix and vector sizes disagree".into()));
    }
    if n <= GAUSS_CUTOFF {
        return solve_gauss(g, c);
    }
    let mut lcm = BigInt::one();
    for v in g.iter().flatten().chain(c) {
        lcm = lcm.lcm(v.denom());
    }
    let scale = |v: &BigRational| v.numer() * (&lcm / v.denom());
    let a: Vec<Vec<BigInt>> = g.iter().map(|row| row.iter().map(scale).collect()).collect();
    let b: Vec<BigInt> = c.iter().map(scale).collect();

    let mut primes = PrimeStream::new();
    // Pivot columns: bad primes can only lower the rank, and at full rank
    // an inconsistent reduction is conclusive.
    let mut best: Option<(Vec<usize>, bool)> = None;
    for _ in 0..3 {
        let p = primes.next_prime();
        let (piv, consistent) = pivot_columns(&reduce_matrix(&a, p), &reduce_vec(&b, p), p);
        if best.as_ref().map_or(true, |(bp, _)| piv.len() > bp.len()) {
            best = Some((piv, consistent));
        }
    }
    let (piv, consistent) = best.unwrap_or_default();
    if !consistent {
        return Err(Error::Consistency("right-hand side is not in the range of the matrix".into()));
    }
    let k = piv.len();
    if k == 0 {
        return if b.iter().all(Zero::is_zero) {
            Ok(RationalSolve { x: vec![BigRational::zero(); n], rank: 0 })
        } else {
            Err(Error::Consistency("right-hand side is not in the range of the matrix".into()))
        };
    }
    let sub: Vec<Vec<BigInt>> = piv.iter().map(|&i| piv.iter().map(|&j| a[i][j].clone()).collect()).collect();
    let rhs: Vec<BigInt> = piv.iter().map(|&i| b[i].clone()).collect();

    let mut modulus = BigInt::one();
    let mut residues = vec![BigInt::zero(); k];
    let mut used = 0usize;
    let mut next_try = 4usize;
    let mut singular_hits = 0usize;
    loop {
        let p = primes.next_prime();
        let Some(xp) = solve_mod(&reduce_matrix(&sub, p), &reduce_vec(&rhs, p), p) else {
            singular_hits += 1;
            if singular_hits > 8 {
                return solve_gauss(g, c);
            }
            continue;
        };
        crt_extend(&mut residues, &mut modulus, &xp, p);
        used += 1;
        if used < next_try {
            continue;
        }
        next_try *= 2;
        let Some(xs) = reconstruct(&residues, &modulus) else { continue };
        let mut x = vec![BigRational::zero(); n];
        for (&i, v) in piv.iter().zip(xs) {
            x[i] = v;
        }
        if verify(&a, &b, &x) {
            return Ok(RationalSolve { x, rank: k });
        }
        if used > 1 << 14 {
            break;
        }
    }
    // Pivots from the modular pass are wrong only if c is outside the
    // range or G is not semidefinite; the direct method decides.
    solve_gauss(g, c)
}

struct PrimeStream {
    next: u64,
}

impl PrimeStream {
    fn new() -> Self {
        PrimeStream { next: (1 << 31) - 1 }
    }

    fn next_prime(&mut self) -> u64 {
        loop {
            let v = self.next;
            self.next -= 2;
            if is_prime_u32(v) {
                return v;
            }
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for `v < 2^32`.
fn is_prime_u32(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13] {
        if v % sp == 0 {
            return v == sp;
        }
    }
    let mut d = v - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        let mut x = pow_mod(a, d, v);
        if x == 1 || x == v - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % v;
            if x == v - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn to_mod(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap_or(0)
}

fn reduce_matrix(a: &[Vec<BigInt>], p: u64) -> Vec<Vec<u64>> {
    a.iter().map(|row| reduce_vec(row, p)).collect()
}

fn reduce_vec(v: &[BigInt], p: u64) -> Vec<u64> {
    v.iter().map(|x| to_mod(x, p)).collect()
}

/// Pivot columns of `a` mod `p` and whether `b` lies in the column span.
fn pivot_columns(a: &[Vec<u64>], b: &[u64], p: u64) -> (Vec<usize>, bool) {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let mut piv = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(r) = (row..n).find(|&r| m[r][col] != 0) else { continue };
        m.swap(row, r);
        eliminate(&mut m, row, col, p, false);
        piv.push(col);
        row += 1;
    }
    let consistent = m[row..].iter().all(|line| line[n] == 0);
    (piv, consistent)
}

/// Scales the pivot row and clears `col` below it, or everywhere when
/// `full` is set.
fn eliminate(m: &mut [Vec<u64>], row: usize, col: usize, p: u64, full: bool) {
    let inv = pow_mod(m[row][col], p - 2, p);
    for v in m[row][col..].iter_mut() {
        *v = *v * inv % p;
    }
    let (head, tail) = m.split_at_mut(row);
    let (pivot, rest) = tail.split_first_mut().expect("pivot row");
    let others = rest.iter_mut().chain(if full { head.iter_mut() } else { [].iter_mut() });
    for line in others {
        let f = line[col];
        if f == 0 {
            continue;
        }
        let nf = p - f;
        for (v, &pv) in line[col..].iter_mut().zip(&pivot[col..]) {
            *v = (*v + nf * pv) % p;
        }
    }
}

/// Solution of a square system mod `p`, or `None` when it is singular.
fn solve_mod(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let r = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(col, r);
        eliminate(&mut m, col, col, p, true);
    }
    Some(m.iter().map(|line| line[n]).collect())
}

fn crt_extend(residues: &mut [BigInt], modulus: &mut BigInt, xp: &[u64], p: u64) {
    let pb = BigInt::from(p);
    let inv = pow_mod(to_mod(modulus, p), p - 2, p);
    for (r, &x) in residues.iter_mut().zip(xp) {
        let cur = to_mod(r, p);
        let t = (x + p - cur) % p * inv % p;
        *r += &*modulus * BigInt::from(t);
    }
    *modulus *= pb;
}

/// Rational `n/d` congruent to `u` with `|n|, d <= sqrt(m/2)`.
fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let qv = &r0 / &r1;
        let r2 = &r0 - &qv * &r1;
        let t2 = &t0 - &qv * &t1;
        r0 = core::mem::replace(&mut r1, r2);
        t0 = core::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

fn reconstruct(residues: &[BigInt], modulus: &BigInt) -> Option<Vec<BigRational>> {
    residues.iter().map(|r| rational_reconstruct(r, modulus)).collect()
}

fn verify(a: &[Vec<BigInt>], b: &[BigInt], x: &[BigRational]) -> bool {
    let mut den = BigInt::one();
    for v in x {
        den = den.lcm(v.denom());
    }
    let xi: Vec<BigInt> = x.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    a.iter().zip(b).all(|(row, bi)| {
        let mut acc = BigInt::zero();
        for (aij, xj) in row.iter().zip(&xi) {
            if !xj.is_zero() && !aij.is_zero() {
                acc += aij * xj;
            }
        }
        acc == bi * &den
    })
}
