//! Truncated q-expansions with exact coefficients, the Eisenstein series and
//! the derivation `q d/dq`.
//!
//! A [`QSeries`] stores the coefficients of `q^0..=q^order`. Binary operations
//! between series of different orders truncate to the smaller order.
//!
//! Some series coming out of [`crate::elliptic`] carry a q^0 coefficient that
//! is only a placeholder for a divergent regularized constant. Those have
//! `constant_known == false`; sums and scalings propagate the flag, products
//! refuse to run, and [`QSeries::coeff`] panics when asked for the constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{bernoulli, divisor_power_sum, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries", into = "RawSeries")]
pub struct QSeries {
    coeffs: Vec<Scalar>,
    constant_known: bool,
}

#[derive(Serialize, Deserialize)]
struct RawSeries {
    order: usize,
    coeffs: Vec<Scalar>,
    constant_known: bool,
}

impl TryFrom<RawSeries> for QSeries {
    type Error = String;

    fn try_from(raw: RawSeries) -> std::result::Result<Self, String> {
        if raw.coeffs.len() != raw.order + 1 {
            return Err(format!(
                "order {} needs {} coefficients, got {}",
                raw.order,
                raw.order + 1,
                raw.coeffs.len()
            ));
        }
        Ok(QSeries { coeffs: raw.coeffs, constant_known: raw.constant_known })
    }
}

impl From<QSeries> for RawSeries {
    fn from(s: QSeries) -> Self {
        RawSeries { order: s.order(), coeffs: s.coeffs, constant_known: s.constant_known }
    }
}

impl QSeries {
    /// Series with coefficients `coeffs[0] + coeffs[1] q + ...`; the order is `len - 1`.
    pub fn from_coeffs(coeffs: Vec<Scalar>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the q^0 coefficient");
        QSeries { coeffs, constant_known: true }
    }

    pub fn zero(order: usize) -> Self {
        QSeries::from_coeffs(vec![Scalar::zero(); order + 1])
    }

    pub fn constant(c: Scalar, order: usize) -> Self {
        let mut s = QSeries::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        QSeries::constant(Scalar::one(), order)
    }

    /// `c q^power`, or zero if `power > order`.
    pub fn monomial(c: Scalar, power: usize, order: usize) -> Self {
        let mut s = QSeries::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// Marks the q^0 coefficient as an unknown placeholder (it is zeroed).
    pub fn with_unknown_constant(mut self) -> Self {
        self.coeffs[0] = Scalar::zero();
        self.constant_known = false;
        self
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn constant_known(&self) -> bool {
        self.constant_known
    }

    /// Coefficient of `q^n`. Panics if `n > order` or if `n == 0` and the
    /// constant is a placeholder.
    pub fn coeff(&self, n: usize) -> &Scalar {
        assert!(
            n != 0 || self.constant_known,
            "q^0 coefficient of this series is a regularization placeholder"
        );
        &self.coeffs[n]
    }

    pub fn try_coeff(&self, n: usize) -> Result<&Scalar> {
        if n == 0 && !self.constant_known {
            return Err(Error::UnknownConstant("try_coeff"));
        }
        Ok(&self.coeffs[n])
    }

    /// Raw coefficient vector, including a possible placeholder at index 0.
    pub fn raw_coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        QSeries { coeffs: self.coeffs[..=order].to_vec(), constant_known: self.constant_known }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(n, c)| (n == 0 && !self.constant_known) || c.is_zero())
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect();
        QSeries { coeffs, constant_known: self.constant_known && other.constant_known }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|n| &self.coeffs[n] - &other.coeffs[n]).collect();
        QSeries { coeffs, constant_known: self.constant_known && other.constant_known }
    }

    pub fn scale(&self, c: &Scalar) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            constant_known: self.constant_known,
        }
    }

    /// Cauchy product truncated at the smaller order. Every output coefficient
    /// depends on both constants, so a placeholder constant is an error.
    pub fn mul(&self, other: &QSeries) -> Result<QSeries> {
        if !self.constant_known || !other.constant_known {
            return Err(Error::UnknownConstant("mul"));
        }
        let order = self.order().min(other.order());
        let mut coeffs = vec![Scalar::zero(); order + 1];
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=order - i].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Ok(QSeries { coeffs, constant_known: true })
    }

    /// `q d/dq`: multiplies the q^n coefficient by n. The result always has a
    /// known (zero) constant.
    pub fn q_d_q(&self) -> QSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| if n == 0 { Scalar::zero() } else { c * Scalar::from(n) })
            .collect();
        QSeries { coeffs, constant_known: true }
    }

    pub fn q_d_q_pow(&self, times: usize) -> QSeries {
        let mut s = self.clone();
        for _ in 0..times {
            s = s.q_d_q();
        }
        s
    }

    /// First power `n >= from` (up to the common order) where the two series
    /// differ. Placeholder constants are never compared.
    pub fn first_difference_from(&self, other: &QSeries, from: usize) -> Option<usize> {
        let order = self.order().min(other.order());
        (from..=order).find(|&n| {
            if n == 0 && !(self.constant_known && other.constant_known) {
                return false;
            }
            self.coeffs[n] != other.coeffs[n]
        })
    }

    pub fn first_difference(&self, other: &QSeries) -> Option<usize> {
        self.first_difference_from(other, 0)
    }
}

impl std::fmt::Display for QSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if n == 0 && !self.constant_known {
                write!(f, "(?)")?;
                first = false;
                continue;
            }
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})q")?,
                _ => write!(f, "({c})q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

/// Exponent put on the divisors in the non-constant coefficients of `G_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivisorExponent {
    /// `sigma_{k-1}(n)`: consistent with weight `k` and the Weierstrass expansion.
    KMinusOne,
    /// `sigma_k(n)`: the alternative exponent; kept to show it breaks the identity.
    K,
}

/// `G_k(q) = -B_k/(2k) + sum_{n=1}^{order} sigma_{k-1}(n) q^n` for even `k >= 2`.
pub fn eisenstein(k: i64, order: usize) -> Result<QSeries> {
    eisenstein_with(k, order, DivisorExponent::KMinusOne)
}

pub fn eisenstein_with(k: i64, order: usize, exponent: DivisorExponent) -> Result<QSeries> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::EisensteinWeight(k));
    }
    let e = match exponent {
        DivisorExponent::KMinusOne => k - 1,
        DivisorExponent::K => k,
    } as u32;
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(-bernoulli(k as usize) / Scalar::from(2 * k));
    for n in 1..=order as u64 {
        coeffs.push(Scalar::from(divisor_power_sum(n, e)));
    }
    Ok(QSeries::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(v: &[i64]) -> QSeries {
        QSeries::from_coeffs(v.iter().map(|&x| Scalar::from(x)).collect())
    }

    fn frac(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d)
    }

    #[test]
    fn ring_operations() {
        assert_eq!(s(&[1, 1, 0]).mul(&s(&[1, -1, 0])).unwrap(), s(&[1, 0, -1]));
        assert_eq!(s(&[0, 1]).add(&s(&[0, 1])), s(&[0, 2]));
        let g2 = eisenstein(2, 2).unwrap();
        let doubled = g2.scale(&Scalar::from(2));
        assert_eq!(doubled.raw_coeffs(), &[frac(-1, 12), frac(2, 1), frac(6, 1)]);
        // truncation to the smaller order
        assert_eq!(s(&[1, 2, 3]).add(&s(&[1, 1])), s(&[2, 3]));
    }

    #[test]
    fn eisenstein_examples() {
        let g2 = eisenstein(2, 4).unwrap();
        assert_eq!(g2.raw_coeffs()[0], frac(-1, 24));
        assert_eq!(&g2.raw_coeffs()[1..], &s(&[1, 3, 4, 7]).raw_coeffs()[..]);
        let g4 = eisenstein(4, 3).unwrap();
        assert_eq!(g4.raw_coeffs(), &[frac(1, 240), frac(1, 1), frac(9, 1), frac(28, 1)]);
        let g6 = eisenstein(6, 1).unwrap();
        assert_eq!(g6.raw_coeffs(), &[frac(-1, 504), frac(1, 1)]);
        assert!(eisenstein(3, 4).is_err());
        assert!(eisenstein(0, 4).is_err());
    }

    #[test]
    fn eisenstein_truncation_is_consistent() {
        for k in [2, 4, 6, 8, 10] {
            let long = eisenstein(k, 30).unwrap();
            for n in 0..30 {
                assert_eq!(long.truncate(n), eisenstein(k, n).unwrap());
            }
        }
    }

    #[test]
    fn q_d_q_examples() {
        let c = s(&[5, 7, 11]);
        assert_eq!(c.q_d_q(), s(&[0, 7, 22]));
        assert_eq!(eisenstein(2, 3).unwrap().q_d_q(), s(&[0, 1, 6, 12]));
        assert!(QSeries::constant(frac(3, 2), 5).q_d_q().is_zero());
    }

    #[test]
    fn unknown_constant_is_guarded() {
        let u = s(&[9, 1, 2]).with_unknown_constant();
        assert!(!u.constant_known());
        assert!(u.try_coeff(0).is_err());
        assert_eq!(u.try_coeff(1).unwrap(), &frac(1, 1));
        assert!(u.mul(&s(&[1, 0, 0])).is_err());
        assert!(!u.add(&s(&[1, 1, 1])).constant_known());
        assert!(!u.scale(&frac(2, 1)).constant_known());
        assert!(u.q_d_q().constant_known());
        assert_eq!(u.first_difference(&s(&[4, 1, 2])), None);
    }

    #[test]
    #[should_panic(expected = "placeholder")]
    fn reading_unknown_constant_panics() {
        let u = s(&[0, 1]).with_unknown_constant();
        let _ = u.coeff(0);
    }

    #[test]
    fn json_shape() {
        let js = serde_json::to_value(s(&[1, 0, -2])).unwrap();
        assert_eq!(js, serde_json::json!({"order": 2, "coeffs": ["1/1", "0/1", "-2/1"], "constant_known": true}));
        let bad = serde_json::json!({"order": 3, "coeffs": ["1"], "constant_known": true});
        assert!(serde_json::from_value::<QSeries>(bad).is_err());
    }

    fn arb_series(order: usize) -> impl Strategy<Value = QSeries> {
        prop::collection::vec((-9i64..10, 1i64..5), order + 1).prop_map(|v| {
            QSeries::from_coeffs(v.into_iter().map(|(n, d)| Scalar::new(n, d)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn q_d_q_is_a_derivation(f in arb_series(16), g in arb_series(16)) {
            let lhs = f.mul(&g).unwrap().q_d_q();
            let rhs = f.q_d_q().mul(&g).unwrap().add(&f.mul(&g.q_d_q()).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mul_commutative_associative(f in arb_series(10), g in arb_series(10), h in arb_series(10)) {
            prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
            prop_assert_eq!(
                f.mul(&g).unwrap().mul(&h).unwrap(),
                f.mul(&g.mul(&h).unwrap()).unwrap()
            );
        }

        #[test]
        fn json_round_trip(f in arb_series(6)) {
            let text = serde_json::to_string(&f).unwrap();
            prop_assert_eq!(serde_json::from_str::<QSeries>(&text).unwrap(), f);
        }
    }
}
