use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Element of `Q(sqrt(p_1), sqrt(p_2), ...)` written as `sum_i c_i sqrt(d_i)`
/// with distinct squarefree radicands `d_i`.
///
/// The representation is canonical, so equality and the zero test are exact.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Surd {
    terms: Vec<(u64, BigRational)>,
}

fn squarefree_split(mut m: u64) -> core::result::Result<(u64, u64), Error> {
    // m = s^2 * f with f squarefree; returns (s, f).
    if m == 0 {
        return Ok((0, 1));
    }
    let mut s = 1u64;
    let mut f = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if p > 10_000_000 {
            return Err(Error::Domain("radicand too large to factor".into()));
        }
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            f *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    f = f.checked_mul(m).ok_or_else(|| Error::Domain("radicand overflow".into()))?;
    Ok((s, f))
}

impl Surd {
    pub fn zero() -> Self {
        Surd { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Surd::from_rational(BigRational::one())
    }

    pub fn from_rational(c: BigRational) -> Self {
        if c.is_zero() {
            Surd::zero()
        } else {
            Surd {
                terms: alloc::vec![(1, c)],
            }
        }
    }

    pub fn from_int(v: i64) -> Self {
        Surd::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `sqrt(v)` for a non-negative rational whose numerator times
    /// denominator fits in 64 bits.
    pub fn sqrt(v: &BigRational) -> Result<Surd> {
        if v.is_negative() {
            return Err(Error::Domain("square root of a negative rational".into()));
        }
        if v.is_zero() {
            return Ok(Surd::zero());
        }
        let num = v
            .numer()
            .to_u64()
            .ok_or_else(|| Error::Domain("numerator too large for sqrt".into()))?;
        let den = v
            .denom()
            .to_u64()
            .ok_or_else(|| Error::Domain("denominator too large for sqrt".into()))?;
        let prod = num
            .checked_mul(den)
            .ok_or_else(|| Error::Domain("radicand overflow".into()))?;
        let (s, f) = squarefree_split(prod)?;
        let coeff = BigRational::new(BigInt::from(s), BigInt::from(den));
        Ok(Surd {
            terms: alloc::vec![(f, coeff)],
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(u64, BigRational)] {
        &self.terms
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(1, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(d, c)| super::q_to_f64(c) * libm::sqrt(*d as f64))
            .sum()
    }

    pub fn scale(&self, c: &BigRational) -> Surd {
        if c.is_zero() {
            return Surd::zero();
        }
        Surd {
            terms: self.terms.iter().map(|(d, x)| (*d, x * c)).collect(),
        }
    }

    /// Square of the value as an element of the field.
    pub fn square(&self) -> Surd {
        self * self
    }

    pub fn pow(&self, e: usize) -> Surd {
        let mut acc = Surd::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a single-term element.
    pub fn recip_monomial(&self) -> Result<Surd> {
        match self.terms.as_slice() {
            [(d, c)] => {
                let inv = (c * BigRational::from_integer(BigInt::from(*d))).recip();
                Ok(Surd {
                    terms: alloc::vec![(*d, inv)],
                })
            }
            [] => Err(Error::Domain("inverse of zero".into())),
            _ => Err(Error::Unsupported("inverse of a multi-term surd".into())),
        }
    }

    /// Sign of the real value; exact for up to two terms, float otherwise.
    pub fn signum(&self) -> i32 {
        match self.terms.as_slice() {
            [] => 0,
            [(_, c)] => {
                if c.is_positive() {
                    1
                } else {
                    -1
                }
            }
            [(d1, c1), (d2, c2)] => {
                // c1 sqrt(d1) + c2 sqrt(d2): compare squares when signs differ.
                let s1 = c1.is_positive();
                let s2 = c2.is_positive();
                if s1 == s2 {
                    return if s1 { 1 } else { -1 };
                }
                let a = c1 * c1 * BigRational::from_integer(BigInt::from(*d1));
                let b = c2 * c2 * BigRational::from_integer(BigInt::from(*d2));
                match a.cmp(&b) {
                    Ordering::Greater => {
                        if s1 {
                            1
                        } else {
                            -1
                        }
                    }
                    Ordering::Less => {
                        if s2 {
                            1
                        } else {
                            -1
                        }
                    }
                    Ordering::Equal => 0,
                }
            }
            _ => {
                let v = self.to_f64();
                if v > 0.0 {
                    1
                } else if v < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Surd {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    fn push_term(terms: &mut Vec<(u64, BigRational)>, d: u64, c: BigRational) {
        match terms.binary_search_by(|(x, _)| x.cmp(&d)) {
            Ok(pos) => {
                let sum = &terms[pos].1 + &c;
                if sum.is_zero() {
                    terms.remove(pos);
                } else {
                    terms[pos].1 = sum;
                }
            }
            Err(pos) => {
                if !c.is_zero() {
                    terms.insert(pos, (d, c));
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Surd) {
        for (d, c) in &other.terms {
            Surd::push_term(&mut self.terms, *d, c.clone());
        }
    }

    /// `self += a * b`.
    pub fn add_product(&mut self, a: &Surd, b: &Surd) {
        for (d1, c1) in &a.terms {
            for (d2, c2) in &b.terms {
                let (d, g) = mul_radicands(*d1, *d2);
                let mut c = c1 * c2;
                if g != 1 {
                    c *= BigRational::from_integer(BigInt::from(g));
                }
                Surd::push_term(&mut self.terms, d, c);
            }
        }
    }
}

fn mul_radicands(a: u64, b: u64) -> (u64, u64) {
    if a == 1 {
        return (b, 1);
    }
    if b == 1 {
        return (a, 1);
    }
    let g = a.gcd(&b);
    let d = (a / g)
        .checked_mul(b / g)
        .expect("surd radicand overflow");
    (d, g)
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *d == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*sqrt({d})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Add<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, rhs: Surd) -> Surd {
        self.add_assign_ref(&rhs);
        self
    }
}

impl<'a> Sub<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        out.add_assign_ref(&-rhs);
        out
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        &self * &rhs
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            terms: self.terms.iter().map(|(d, c)| (*d, -c.clone())).collect(),
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl From<BigRational> for Surd {
    fn from(v: BigRational) -> Self {
        Surd::from_rational(v)
    }
}

impl From<BigUint> for Surd {
    fn from(v: BigUint) -> Self {
        Surd::from_rational(BigRational::from_integer(BigInt::from(v)))
    }
}
