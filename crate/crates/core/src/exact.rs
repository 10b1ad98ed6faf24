//! Exact rational scalars and the integer sequences the socle formulas consume.
//!
//! Everything numeric in this crate is a [`Scalar`]: an arbitrary-precision
//! rational kept in lowest terms with a positive denominator. Bernoulli numbers
//! and factorials are memoized behind locks so they can be shared by
//! concurrent verification tasks.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        // BigRational::new reduces and moves the sign to the numerator.
        Scalar(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Scalar(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Multiplicative inverse. Panics on zero, like integer division.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Scalar(self.0.recip())
    }

    pub fn pow(&self, exp: i32) -> Self {
        Scalar(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar::from_integer(n)
    }
}

macro_rules! from_prim {
    ($($t:ty),*) => {$(
        impl From<$t> for Scalar {
            fn from(n: $t) -> Self {
                Scalar::from_integer(BigInt::from(n))
            }
        }
    )*};
}
from_prim!(i32, i64, u32, u64, usize);

macro_rules! binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl $assign_tr<Scalar> for Scalar {
            fn $assign(&mut self, rhs: Scalar) {
                self.0.$assign(rhs.0);
            }
        }
        impl<'a> $assign_tr<&'a Scalar> for Scalar {
            fn $assign(&mut self, rhs: &'a Scalar) {
                self.0.$assign(&rhs.0);
            }
        }
    };
}
binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(&self.0 / &rhs.0)
    }
}

impl<'a> Div<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(self.0 / &rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

/// Always `num/den`, including `n/1` for integers.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Accepts `num/den` (any nonzero denominator, normalized on read) or a bare integer.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseScalar(s.to_string());
        let s_trim = s.trim();
        match s_trim.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::new(n, d))
            }
            None => {
                let n: BigInt = s_trim.parse().map_err(|_| bad())?;
                Ok(Scalar::from_integer(n))
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

static BERNOULLI: RwLock<Vec<Scalar>> = RwLock::new(Vec::new());
static FACTORIAL: RwLock<Vec<BigInt>> = RwLock::new(Vec::new());

/// Bernoulli number `B_k` with `B_1 = -1/2`.
///
/// Filled from `sum_{j=0}^{k} C(k+1, j) B_j = 0`; the cache grows to the
/// largest index requested.
pub fn bernoulli(k: usize) -> Scalar {
    if let Some(b) = BERNOULLI.read().unwrap().get(k) {
        return b.clone();
    }
    let mut cache = BERNOULLI.write().unwrap();
    if cache.is_empty() {
        cache.push(Scalar::one());
    }
    while cache.len() <= k {
        let n = cache.len();
        if n > 1 && n % 2 == 1 {
            cache.push(Scalar::zero());
            continue;
        }
        let mut acc = Scalar::zero();
        for (j, b) in cache.iter().enumerate() {
            if !b.is_zero() {
                acc += Scalar::from(binomial_int(n + 1, j)) * b;
            }
        }
        let b_n = -acc / Scalar::from(n + 1);
        cache.push(b_n);
    }
    cache[k].clone()
}

/// `n!` as an integer, memoized.
pub fn factorial_int(n: usize) -> BigInt {
    if let Some(f) = FACTORIAL.read().unwrap().get(n) {
        return f.clone();
    }
    let mut cache = FACTORIAL.write().unwrap();
    if cache.is_empty() {
        cache.push(BigInt::one());
    }
    while cache.len() <= n {
        let next = cache.last().unwrap() * BigInt::from(cache.len());
        cache.push(next);
    }
    cache[n].clone()
}

fn binomial_int(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial_int(n) / (factorial_int(k) * factorial_int(n - k))
}

pub fn factorial(n: i64) -> Result<Scalar> {
    let n = usize::try_from(n).map_err(|_| Error::NegativeArgument { op: "factorial", value: n })?;
    Ok(Scalar::from(factorial_int(n)))
}

pub fn binomial(n: i64, k: i64) -> Result<Scalar> {
    if n < 0 {
        return Err(Error::NegativeArgument { op: "binomial", value: n });
    }
    if k < 0 || k > n {
        return Err(Error::BinomialRange { n, k });
    }
    Ok(Scalar::from(binomial_int(n as usize, k as usize)))
}

/// `m!!` for odd `m >= -1`, with `(-1)!! = 1`.
pub fn double_factorial_odd(m: i64) -> Result<Scalar> {
    if m < -1 || m.is_even() {
        return Err(Error::DoubleFactorialDomain(m));
    }
    let mut acc = BigInt::one();
    let mut k = m;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    Ok(Scalar::from(acc))
}

/// `(2n)!! = 2^n n!`.
pub fn double_factorial_even(n: usize) -> Scalar {
    Scalar::from(factorial_int(n) << n)
}

/// `sigma_e(n) = sum_{d | n} d^e`.
pub fn divisor_power_sum(n: u64, exponent: u32) -> BigInt {
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += num_traits::pow(BigInt::from(d), exponent as usize);
            let e = n / d;
            if e != d {
                acc += num_traits::pow(BigInt::from(e), exponent as usize);
            }
        }
        d += 1;
    }
    acc
}

/// `(-1)^k` as a scalar.
pub fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d)
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(12), q(-691, 2730));
    }

    #[test]
    fn bernoulli_odd_vanish_and_even_signs() {
        for k in (3..40).step_by(2) {
            assert!(bernoulli(k).is_zero(), "B_{k}");
        }
        for g in 1..=12usize {
            let b = bernoulli(2 * g);
            assert_eq!(b.is_negative(), g % 2 == 0, "sign of B_{}", 2 * g);
        }
    }

    #[test]
    fn bernoulli_matches_defining_recurrence() {
        // Independent check straight from the recurrence, no cache.
        for k in 1..=20usize {
            let total: Scalar = (0..=k)
                .map(|j| Scalar::from(binomial_int(k + 1, j)) * bernoulli(j))
                .sum();
            assert!(total.is_zero(), "recurrence fails at k = {k}");
        }
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0).unwrap(), q(1, 1));
        assert_eq!(factorial(6).unwrap(), q(720, 1));
        assert_eq!(binomial(5, 2).unwrap(), q(10, 1));
        assert!(factorial(-1).is_err());
        assert!(binomial(-2, 1).is_err());
        assert!(binomial(3, 4).is_err());
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial_odd(-1).unwrap(), q(1, 1));
        assert_eq!(double_factorial_odd(5).unwrap(), q(15, 1));
        assert_eq!(double_factorial_odd(9).unwrap(), q(945, 1));
        assert!(double_factorial_odd(4).is_err());
        assert!(double_factorial_odd(-3).is_err());
        for n in 0..=20i64 {
            let lhs = double_factorial_odd(2 * n + 1).unwrap()
                * Scalar::from(BigInt::one() << n as usize)
                * factorial(n).unwrap();
            assert_eq!(lhs, factorial(2 * n + 1).unwrap());
        }
        assert_eq!(double_factorial_even(3), q(48, 1));
    }

    #[test]
    fn divisor_sums() {
        let brute = |n: u64, e: u32| -> BigInt {
            (1..=n).filter(|d| n % d == 0).map(|d| num_traits::pow(BigInt::from(d), e as usize)).sum()
        };
        for n in 1..60 {
            for e in 0..6 {
                assert_eq!(divisor_power_sum(n, e), brute(n, e));
            }
        }
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(q(-691, 2730).to_string(), "-691/2730");
        assert_eq!(q(4, 2).to_string(), "2/1");
        assert_eq!("5".parse::<Scalar>().unwrap(), q(5, 1));
        assert_eq!("-6/4".parse::<Scalar>().unwrap(), q(-3, 2));
        assert_eq!("3/-6".parse::<Scalar>().unwrap(), q(-1, 2));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
        let json = serde_json::to_string(&q(1, 24)).unwrap();
        assert_eq!(json, "\"1/24\"");
        assert_eq!(serde_json::from_str::<Scalar>(&json).unwrap(), q(1, 24));
    }

    #[test]
    fn concurrent_cache_readers() {
        let handles: Vec<_> = (0..8)
            .map(|i| std::thread::spawn(move || bernoulli(30 + 2 * i)))
            .collect();
        for (i, h) in handles.into_iter().enumerate() {
            assert_eq!(h.join().unwrap(), bernoulli(30 + 2 * i));
        }
    }
}
