//! Integrals of double ramification cycles against `lambda_g` and psi powers.
//!
//! Two evaluators for `int DR_g(-a1-a2, a1, a2) lambda_g psi_1^g` are kept
//! deliberately separate: [`dr3_closed`] sums the closed formula, and
//! [`dr3_recursive`] runs the genus recursion. They share nothing beyond
//! [`Scalar`] arithmetic.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use serde::Serialize;

use crate::exact::{double_factorial_even, double_factorial_odd, factorial, Scalar};

/// Genus and the two free multiplicities; the third is `-a1 - a2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DrQuery {
    pub g: u32,
    pub a1: i64,
    pub a2: i64,
}

impl DrQuery {
    pub fn new(g: u32, a1: i64, a2: i64) -> Self {
        DrQuery { g, a1, a2 }
    }
}

/// `sum_{j=0}^g (2j-1)!! / ((2g+1)!! (2j)!!) (a1+a2)^{2j} (a1^2 - a1 a2 + a2^2)^{g-j} / 12^g`.
pub fn dr3_closed(q: DrQuery) -> Scalar {
    let g = q.g as i64;
    let sum = Scalar::from(q.a1 + q.a2);
    let quad = Scalar::from(q.a1 * q.a1 - q.a1 * q.a2 + q.a2 * q.a2);
    let denom = double_factorial_odd(2 * g + 1).unwrap() * Scalar::from(12).pow(g as i32);
    let mut total = Scalar::zero();
    for j in 0..=g {
        let num = double_factorial_odd(2 * j - 1).unwrap();
        let term = num / double_factorial_even(j as usize)
            * sum.pow(2 * j as i32)
            * quad.pow((g - j) as i32);
        total += term;
    }
    total / denom
}

type RecursionKey = (u32, BigInt, BigInt);

static RECURSION_MEMO: OnceLock<Mutex<HashMap<RecursionKey, Scalar>>> = OnceLock::new();

/// `I_0 = 1`, `(2g+1) I_g = (a1+a2)^{2g} / (24^g g!) + (a1^2 - a1 a2 + a2^2)/12 * I_{g-1}`.
///
/// Memoized on `(g, (a1+a2)^2, a1^2 - a1 a2 + a2^2)`, the only data the
/// recursion sees.
pub fn dr3_recursive(q: DrQuery) -> Scalar {
    let s = BigInt::from(q.a1 + q.a2);
    let square = &s * &s;
    let quad = BigInt::from(q.a1 * q.a1 - q.a1 * q.a2 + q.a2 * q.a2);
    recursive_step(q.g, &square, &quad)
}

fn recursive_step(g: u32, square: &BigInt, quad: &BigInt) -> Scalar {
    if g == 0 {
        return Scalar::one();
    }
    let key = (g, square.clone(), quad.clone());
    let memo = RECURSION_MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = memo.lock().unwrap().get(&key) {
        return v.clone();
    }
    let prev = recursive_step(g - 1, square, quad);
    let lead = Scalar::from(num_traits::pow(square.clone(), g as usize))
        / (Scalar::from(24).pow(g as i32) * factorial(g as i64).unwrap());
    let value = (lead + Scalar::new(quad.clone(), 12) * prev) / Scalar::from(2 * g as i64 + 1);
    memo.lock().unwrap().insert(key, value.clone());
    value
}

/// `int DR_g(-b, b) lambda_g psi_1^{g-1} = b^{2g} / (24^g g!)`.
pub fn dr2(g: u32, b: i64) -> Scalar {
    Scalar::from(b).pow(2 * g as i32) / (Scalar::from(24).pow(g as i32) * factorial(g as i64).unwrap())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BsszCheck {
    pub query: DrQuery,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl BsszCheck {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Checks
/// `(a1+a2)(2g+1) I_g = (a1+a2) dr2(g, a1+a2) + 2 I_{g-1} (a1 dr2(1, a1) + a2 dr2(1, a2))`
/// with `I` from [`dr3_closed`]. Only meaningful for `g >= 1`, `a1, a2 > 0`;
/// returns `None` outside that range.
pub fn dr3_bssz_check(g: u32, a1: i64, a2: i64) -> Option<BsszCheck> {
    if g < 1 || a1 <= 0 || a2 <= 0 {
        return None;
    }
    let s = Scalar::from(a1 + a2);
    let lhs = &s * Scalar::from(2 * g as i64 + 1) * dr3_closed(DrQuery::new(g, a1, a2));
    let genus_one = Scalar::from(a1) * dr2(1, a1) + Scalar::from(a2) * dr2(1, a2);
    let rhs = &s * dr2(g, a1 + a2)
        + Scalar::from(2) * dr3_closed(DrQuery::new(g - 1, a1, a2)) * genus_one;
    Some(BsszCheck { query: DrQuery::new(g, a1, a2), lhs, rhs })
}

/// `int DR_g(0, 1, -1) lambda_g psi_1^g = 1 / ((2g+1)!! 4^g)`, via the closed formula.
pub fn dr_standard(g: u32) -> Scalar {
    dr3_closed(DrQuery::new(g, 1, -1))
}

/// `int DR_genus(0, 1, -1) lambda_genus psi_1^power`: zero unless `power == genus`.
pub fn dr_standard_psi(genus: u32, power: u32) -> Scalar {
    if genus == power {
        dr_standard(genus)
    } else {
        Scalar::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frac(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d)
    }

    #[test]
    fn closed_examples() {
        assert_eq!(dr3_closed(DrQuery::new(0, 7, -3)), frac(1, 1));
        assert_eq!(dr3_closed(DrQuery::new(1, 1, -1)), frac(1, 12));
        assert_eq!(dr3_closed(DrQuery::new(1, 1, 1)), frac(1, 12));
        assert_eq!(dr3_closed(DrQuery::new(2, 1, -1)), frac(1, 240));
    }

    #[test]
    fn recursive_examples() {
        assert_eq!(dr3_recursive(DrQuery::new(1, 1, 1)), frac(1, 12));
        assert_eq!(dr3_recursive(DrQuery::new(0, 3, 9)), frac(1, 1));
        let q = DrQuery::new(3, 2, 5);
        assert_eq!(dr3_recursive(q), dr3_closed(q));
    }

    #[test]
    fn two_point_values() {
        assert_eq!(dr2(1, 1), frac(1, 24));
        assert_eq!(dr2(0, 5), frac(1, 1));
        assert_eq!(dr2(2, 2), frac(1, 72));
    }

    #[test]
    fn bssz_examples() {
        let c = dr3_bssz_check(1, 1, 1).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (frac(1, 2), frac(1, 2)));
        assert!(dr3_bssz_check(2, 1, 2).unwrap().passed());
        assert!(dr3_bssz_check(3, 4, 1).unwrap().passed());
        assert!(dr3_bssz_check(2, -1, 2).is_none());
        assert!(dr3_bssz_check(0, 1, 2).is_none());
    }

    #[test]
    fn standard_values() {
        assert_eq!(dr_standard(0), frac(1, 1));
        assert_eq!(dr_standard(1), frac(1, 12));
        assert_eq!(dr_standard(2), frac(1, 240));
        for g in 0..=12u32 {
            let norm = double_factorial_odd(2 * g as i64 + 1).unwrap() * Scalar::from(4).pow(g as i32);
            assert!((dr_standard(g) * norm).is_one(), "g = {g}");
        }
        assert!(dr_standard_psi(2, 1).is_zero());
        assert_eq!(dr_standard_psi(2, 2), frac(1, 240));
    }

    #[test]
    fn evaluators_agree_on_grid() {
        for g in 0..=8 {
            for a1 in -5..=5 {
                for a2 in -5..=5 {
                    let q = DrQuery::new(g, a1, a2);
                    assert_eq!(dr3_closed(q), dr3_recursive(q), "{q:?}");
                }
            }
        }
    }

    #[test]
    fn bssz_on_grid() {
        for g in 1..=6 {
            for a1 in 1..=4 {
                for a2 in 1..=4 {
                    assert!(dr3_bssz_check(g, a1, a2).unwrap().passed());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn homogeneous_of_degree_2g(g in 0u32..6, a1 in -6i64..7, a2 in -6i64..7, t in -4i64..5) {
            let base = dr3_closed(DrQuery::new(g, a1, a2));
            let scaled = dr3_closed(DrQuery::new(g, t * a1, t * a2));
            prop_assert_eq!(scaled, base * Scalar::from(t).pow(2 * g as i32));
        }

        #[test]
        fn symmetric(g in 0u32..6, a1 in -8i64..9, a2 in -8i64..9) {
            let v = dr3_closed(DrQuery::new(g, a1, a2));
            prop_assert_eq!(&v, &dr3_closed(DrQuery::new(g, a2, a1)));
            prop_assert_eq!(&v, &dr3_closed(DrQuery::new(g, -a1, -a2)));
        }
    }
}
