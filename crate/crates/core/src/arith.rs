//! Coefficient contexts and exact p-adic helpers on integers and rationals.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Where matrix entries live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientContext {
    Integers,
    /// Arithmetic modulo `p^r`.
    Residue { p: u64, r: u32 },
    /// Exact rationals, certified modulo `p^precision`.
    ValuedRationals { p: u64, precision: u32 },
}

impl CoefficientContext {
    pub fn residue(p: u64, r: u32) -> Result<Self> {
        check_odd_prime(p)?;
        if r == 0 {
            return Err(Error::InvalidContext("residue level must be positive".into()));
        }
        modulus(p, r)?;
        Ok(CoefficientContext::Residue { p, r })
    }

    pub fn valued(p: u64, precision: u32) -> Result<Self> {
        check_odd_prime(p)?;
        if precision == 0 {
            return Err(Error::InvalidContext("precision must be positive".into()));
        }
        Ok(CoefficientContext::ValuedRationals { p, precision })
    }

    pub fn prime(&self) -> Option<u64> {
        match *self {
            CoefficientContext::Integers => None,
            CoefficientContext::Residue { p, .. } => Some(p),
            CoefficientContext::ValuedRationals { p, .. } => Some(p),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

/// `p^r` as a machine integer, refusing anything that would overflow products.
pub fn modulus(p: u64, r: u32) -> Result<u64> {
    let m = p
        .checked_pow(r)
        .ok_or_else(|| Error::InvalidContext(format!("{p}^{r} overflows")))?;
    if m > u32::MAX as u64 {
        return Err(Error::InvalidContext(format!("{p}^{r} is too large for residue arithmetic")));
    }
    Ok(m)
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn val_int(x: &BigInt, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn val_rat(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(val_int(x.numer(), p).unwrap() - val_int(x.denom(), p).unwrap())
}

/// True when the rational has no `p` in its denominator.
pub fn is_p_integral(x: &BigRational, p: u64) -> bool {
    match val_rat(x, p) {
        None => true,
        Some(v) => v >= 0,
    }
}

pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

pub fn reduce_int(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// Image of a p-integral rational in `Z/p^r`; denominators prime to `p` are inverted.
pub fn reduce_rat(x: &BigRational, p: u64, r: u32) -> Result<u64> {
    let m = modulus(p, r)?;
    if !is_p_integral(x, p) {
        return Err(Error::NotInParahoric);
    }
    let n = reduce_int(x.numer(), m);
    let d = reduce_int(x.denom(), m);
    let di = inv_mod(d, m).ok_or(Error::NotInParahoric)?;
    Ok(((n as u128 * di as u128) % m as u128) as u64)
}

/// Canonical representative of `x` modulo `p^e Z_(p)`: an element of `Z[1/p]` of the
/// form `p^v * k` with `0 <= k < p^(e-v)`, or zero when `v(x) >= e`.
pub fn canonical_mod(x: &BigRational, p: u64, e: i64) -> BigRational {
    let v = match val_rat(x, p) {
        None => return BigRational::zero(),
        Some(v) => v,
    };
    if v >= e {
        return BigRational::zero();
    }
    let pv = pow_rat(p, v);
    let unit = x / &pv;
    let k = (e - v) as u32;
    let m = BigInt::from(p).pow(k);
    let n = unit.numer().mod_floor(&m);
    let d = unit.denom().mod_floor(&m);
    let di = d.extended_gcd(&m).x.mod_floor(&m);
    let rep = (n * di).mod_floor(&m);
    BigRational::from_integer(rep) * pv
}

pub fn pow_rat(p: u64, v: i64) -> BigRational {
    let base = BigInt::from(p).pow(v.unsigned_abs() as u32);
    if v >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Balanced lift of a residue to a signed integer in `(-m/2, m/2]`.
pub fn lift_balanced(x: u64, m: u64) -> i64 {
    if x > m / 2 {
        x as i64 - m as i64
    } else {
        x as i64
    }
}

pub fn abs_rat(x: &BigRational) -> BigRational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(val_rat(&rat_frac(18, 5), 3), Some(2));
        assert_eq!(val_rat(&rat_frac(5, 27), 3), Some(-3));
        assert_eq!(val_rat(&rat(0), 3), None);
    }

    #[test]
    fn reduction_inverts_units() {
        assert_eq!(reduce_rat(&rat_frac(1, 2), 3, 2).unwrap(), 5);
        assert!(reduce_rat(&rat_frac(1, 3), 3, 2).is_err());
    }

    #[test]
    fn canonical_mod_is_idempotent_and_congruent() {
        for (n, d) in [(7, 1), (-7, 2), (1, 9), (-5, 27), (81, 4)] {
            let x = rat_frac(n, d);
            let c = canonical_mod(&x, 3, 2);
            assert_eq!(canonical_mod(&c, 3, 2), c);
            let diff = &x - &c;
            assert!(diff.is_zero() || val_rat(&diff, 3).unwrap() >= 2);
        }
    }

    #[test]
    fn primes() {
        assert!(check_odd_prime(3).is_ok());
        assert!(check_odd_prime(2).is_err());
        assert!(check_odd_prime(9).is_err());
    }
}
