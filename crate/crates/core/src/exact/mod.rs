//! Exact arithmetic: rationals, a multiquadratic surd field and rational
//! Gaussian elimination.

mod linalg;
mod surd;

pub use linalg::{solve_symmetric, RationalSolve};
pub use surd::Surd;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    BigRational::from_integer(BigInt::from(v))
}

pub fn q_from_big(v: num_bigint::BigUint) -> Q {
    BigRational::from_integer(BigInt::from(v))
}

pub fn qpow(base: &Q, exp: i64) -> Q {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

pub fn q_to_f64(v: &Q) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    match (v.numer().to_f64(), v.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 => a / b,
        _ => {
            // Scale down very long numerators and denominators.
            let nb = v.numer().bits() as i64;
            let db = v.denom().bits() as i64;
            let shift_n = (nb - 900).max(0);
            let shift_d = (db - 900).max(0);
            let a = (v.numer().abs() >> shift_n as usize).to_f64().unwrap_or(f64::MAX);
            let b = (v.denom() >> shift_d as usize).to_f64().unwrap_or(f64::MAX);
            let mag = a / b * libm::pow(2.0, (shift_n - shift_d) as f64);
            if v.is_negative() {
                -mag
            } else {
                mag
            }
        }
    }
}

/// Exact rational from a double (every finite double is a dyadic rational).
pub fn q_from_f64(x: f64) -> Q {
    BigRational::from_float(x).unwrap_or_else(Q::zero)
}

pub fn q_one() -> Q {
    Q::one()
}
