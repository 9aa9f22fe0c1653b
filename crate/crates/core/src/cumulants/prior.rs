//! Coordinate priors with exact moments.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{q, q_to_f64, qi, qpow, Q};
use crate::rng::ItemRng;

/// Lower bound for `sqrt(2 / pi)`.
const SQRT_2_OVER_PI_LOW: (i64, i64) = (7_978_845_608, 10_000_000_000);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prior {
    Rademacher,
    Gaussian,
    /// `1` with probability `p`, else `0`.
    Bernoulli(Q),
    /// Finite atoms `(value, probability)`.
    Discrete(Vec<(Q, Q)>),
}

impl Prior {
    pub fn name(&self) -> String {
        match self {
            Prior::Rademacher => "rademacher".into(),
            Prior::Gaussian => "gaussian".into(),
            Prior::Bernoulli(p) => format!("bernoulli({p})"),
            Prior::Discrete(a) => format!("discrete({} atoms)", a.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Prior::Bernoulli(p) if p.is_negative() || *p > Q::one() => {
                Err(Error::Param("bernoulli parameter outside [0, 1]".into()))
            }
            Prior::Discrete(atoms) => {
                let total: Q = atoms.iter().map(|(_, p)| p.clone()).sum();
                if atoms.is_empty() || atoms.iter().any(|(_, p)| p.is_negative()) || !total.is_one() {
                    return Err(Error::Param("discrete prior needs probabilities summing to 1".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `E[pi^k]`.
    pub fn moment(&self, k: usize) -> Q {
        match self {
            Prior::Rademacher => {
                if k % 2 == 0 {
                    Q::one()
                } else {
                    Q::zero()
                }
            }
            Prior::Gaussian => {
                if k % 2 == 1 {
                    Q::zero()
                } else {
                    qi(double_factorial(k as i64 - 1))
                }
            }
            Prior::Bernoulli(p) => {
                if k == 0 {
                    Q::one()
                } else {
                    p.clone()
                }
            }
            Prior::Discrete(atoms) => atoms.iter().map(|(v, p)| qpow(v, k as i64) * p).sum(),
        }
    }

    /// Mean zero and unit variance.
    pub fn is_standardized(&self) -> bool {
        self.moment(1).is_zero() && self.moment(2).is_one()
    }

    /// `E[|pi|^s]`, exact except for odd Gaussian moments, where a
    /// rational lower bound is returned.
    pub fn abs_moment_lower(&self, s: usize) -> Q {
        match self {
            Prior::Rademacher => Q::one(),
            Prior::Gaussian => {
                if s % 2 == 0 {
                    self.moment(s)
                } else {
                    let h = (s - 1) / 2;
                    let fact: i64 = (1..=h as i64).product();
                    q(SQRT_2_OVER_PI_LOW.0, SQRT_2_OVER_PI_LOW.1) * qpow(&qi(2), h as i64) * qi(fact)
                }
            }
            Prior::Bernoulli(p) => {
                if s == 0 {
                    Q::one()
                } else {
                    p.clone()
                }
            }
            Prior::Discrete(atoms) => atoms.iter().map(|(v, p)| qpow(&v.abs(), s as i64) * p).sum(),
        }
    }

    pub fn abs_moment_f64(&self, s: usize) -> f64 {
        match self {
            Prior::Gaussian if s % 2 == 1 => {
                let h = (s - 1) / 2;
                let fact: f64 = (1..=h).map(|v| v as f64).product();
                libm::sqrt(2.0 / core::f64::consts::PI) * libm::pow(2.0, h as f64) * fact
            }
            _ => q_to_f64(&self.abs_moment_lower(s)),
        }
    }

    /// One draw; Gaussian uses two words, the rest one.
    pub fn sample(&self, rng: &mut ItemRng<'_>) -> f64 {
        match self {
            Prior::Rademacher => {
                if rng.bernoulli(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            Prior::Gaussian => rng.normal(),
            Prior::Bernoulli(p) => f64::from(u8::from(rng.bernoulli(q_to_f64(p)))),
            Prior::Discrete(atoms) => {
                let u = rng.uniform();
                let mut acc = 0.0;
                for (v, p) in atoms {
                    acc += q_to_f64(p);
                    if u < acc {
                        return q_to_f64(v);
                    }
                }
                atoms.last().map_or(0.0, |(v, _)| q_to_f64(v))
            }
        }
    }

    /// Finite support with probabilities, for exact enumeration.
    pub fn atoms(&self) -> Option<Vec<(Q, Q)>> {
        match self {
            Prior::Rademacher => Some(alloc::vec![(qi(-1), q(1, 2)), (qi(1), q(1, 2))]),
            Prior::Gaussian => None,
            Prior::Bernoulli(p) => Some(alloc::vec![(qi(0), Q::one() - p), (qi(1), p.clone())]),
            Prior::Discrete(a) => Some(a.clone()),
        }
    }
}

fn double_factorial(k: i64) -> i64 {
    let mut acc = 1;
    let mut j = k;
    while j > 1 {
        acc *= j;
        j -= 2;
    }
    acc
}

/// `M(t) = max_{s <= t} E[|pi|^s]`, tabulated up to `tmax`.
#[derive(Clone, Debug)]
pub struct MomentEnvelope {
    pub values: Vec<Q>,
}

impl MomentEnvelope {
    pub fn new(prior: &Prior, tmax: usize) -> Self {
        let mut values = Vec::with_capacity(tmax + 1);
        let mut best = Q::zero();
        for s in 0..=tmax {
            let v = prior.abs_moment_lower(s);
            if v > best {
                best = v;
            }
            values.push(best.clone());
        }
        MomentEnvelope { values }
    }

    pub fn get(&self, t: usize) -> Result<&Q> {
        self.values
            .get(t)
            .ok_or_else(|| Error::Domain(format!("moment envelope tabulated only to {}", self.values.len() - 1)))
    }
}
