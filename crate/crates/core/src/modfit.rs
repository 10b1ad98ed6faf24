//! Polynomials in `G2, G4, G6` and recognition of truncated q-series as such.
//!
//! The ring of quasimodular forms is graded by weight, `wt(G_k) = k`. A
//! truncated series is recognized by solving for the coefficients of every
//! monomial of weight at most `max_weight` and checking that the surplus
//! coefficient rows agree.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Scalar;
use crate::linalg::{IncrementalSolver, RowStatus};
use crate::qseries::{eisenstein, QSeries};

/// Surplus rows required before a fit counts as verified.
pub const DEFAULT_MARGIN: usize = 5;

/// `G2^g2 * G4^g4 * G6^g6`.
///
/// Ordered by weight, then lexicographically descending in the exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub g2: u32,
    pub g4: u32,
    pub g6: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { g2: 0, g4: 0, g6: 0 };

    pub fn new(g2: u32, g4: u32, g6: u32) -> Self {
        Monomial { g2, g4, g6 }
    }

    pub fn weight(&self) -> u32 {
        2 * self.g2 + 4 * self.g4 + 6 * self.g6
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| (other.g2, other.g4, other.g6).cmp(&(self.g2, self.g4, self.g6)))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("G2", self.g2), ("G4", self.g4), ("G6", self.g6)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Every monomial of weight `<= max_weight`, in [`Monomial`] order.
pub fn basis(max_weight: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for c in 0..=max_weight / 6 {
        for b in 0..=(max_weight - 6 * c) / 4 {
            for a in 0..=(max_weight - 6 * c - 4 * b) / 2 {
                out.push(Monomial::new(a, b, c));
            }
        }
    }
    out.sort();
    out
}

/// A polynomial in `G2, G4, G6` with exact coefficients. Zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<TermJson>", into = "Vec<TermJson>")]
pub struct QuasimodularPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: [u32; 3],
    coeff: Scalar,
}

impl From<Vec<TermJson>> for QuasimodularPoly {
    fn from(terms: Vec<TermJson>) -> Self {
        let mut p = QuasimodularPoly::zero();
        for t in terms {
            p.add_term(Monomial::new(t.exp[0], t.exp[1], t.exp[2]), t.coeff);
        }
        p
    }
}

impl From<QuasimodularPoly> for Vec<TermJson> {
    fn from(p: QuasimodularPoly) -> Self {
        p.terms
            .into_iter()
            .map(|(m, coeff)| TermJson { exp: [m.g2, m.g4, m.g6], coeff })
            .collect()
    }
}

impl QuasimodularPoly {
    pub fn zero() -> Self {
        QuasimodularPoly { terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = QuasimodularPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = QuasimodularPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        let entry = self.terms.entry(m).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::weight).max()
    }

    pub fn add(&self, other: &QuasimodularPoly) -> QuasimodularPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> QuasimodularPoly {
        QuasimodularPoly::from_terms(self.terms.iter().map(|(m, x)| (*m, x * c)))
    }

    /// The terms of exactly the given weight.
    pub fn graded_part(&self, weight: u32) -> QuasimodularPoly {
        QuasimodularPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight() == weight)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Substitutes the Eisenstein series and expands to `q^order`.
    pub fn evaluate(&self, order: usize) -> QSeries {
        let mut gens = Generators::new(order);
        let mut out = QSeries::zero(order);
        for (m, c) in &self.terms {
            out = out.add(&gens.monomial(*m).scale(c));
        }
        out
    }
}

impl std::fmt::Display for QuasimodularPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cached powers of `G2, G4, G6` at a fixed order.
struct Generators {
    order: usize,
    powers: [Vec<QSeries>; 3],
}

impl Generators {
    fn new(order: usize) -> Self {
        let start = |k| vec![QSeries::one(order), eisenstein(k, order).expect("even weight")];
        Generators { order, powers: [start(2), start(4), start(6)] }
    }

    fn power(&mut self, which: usize, e: u32) -> QSeries {
        let e = e as usize;
        while self.powers[which].len() <= e {
            let next = self.powers[which]
                .last()
                .unwrap()
                .mul(&self.powers[which][1])
                .expect("generators have known constants");
            self.powers[which].push(next);
        }
        self.powers[which][e].clone()
    }

    fn monomial(&mut self, m: Monomial) -> QSeries {
        let a = self.power(0, m.g2);
        let b = self.power(1, m.g4);
        let c = self.power(2, m.g6);
        let out = a.mul(&b).and_then(|ab| ab.mul(&c)).expect("known constants");
        debug_assert_eq!(out.order(), self.order);
        out
    }
}

/// A successful recognition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fit {
    pub poly: QuasimodularPoly,
    /// Number of q-coefficients that entered the linear system.
    pub rows: usize,
    pub unknowns: usize,
    /// Consistent rows beyond those needed to pin the solution.
    pub surplus: usize,
    /// True when the q^0 row and the weight-0 unknown were left out. The
    /// weight-0 coefficient of `poly` is then zero by convention and carries
    /// no information.
    pub free_constant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inconsistency {
    /// First q-power whose equation contradicts the earlier ones.
    pub q_power: usize,
    pub max_weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FitOutcome {
    Fitted(Fit),
    Inconsistent(Inconsistency),
}

impl FitOutcome {
    pub fn fitted(self) -> Option<Fit> {
        match self {
            FitOutcome::Fitted(f) => Some(f),
            FitOutcome::Inconsistent(_) => None,
        }
    }
}

pub fn fit(s: &QSeries, max_weight: u32, free_constant: bool) -> Result<FitOutcome> {
    fit_with_margin(s, max_weight, free_constant, DEFAULT_MARGIN)
}

/// Solves for the quasimodular polynomial of weight `<= max_weight` whose
/// expansion matches `s`.
///
/// With `free_constant` the q^0 coefficient of `s` is ignored and so is the
/// constant monomial, which only affects that coefficient. A zero margin is
/// treated as one: a fit with no surplus row verifies nothing.
pub fn fit_with_margin(
    s: &QSeries,
    max_weight: u32,
    free_constant: bool,
    margin: usize,
) -> Result<FitOutcome> {
    if max_weight % 2 != 0 {
        return Err(Error::OddWeight(max_weight as i64));
    }
    if !s.constant_known() && !free_constant {
        return Err(Error::UnknownConstant("fit without free_constant"));
    }
    let margin = margin.max(1);
    let monomials: Vec<Monomial> = basis(max_weight)
        .into_iter()
        .filter(|m| !(free_constant && *m == Monomial::ONE))
        .collect();
    let unknowns = monomials.len();
    let first_row = usize::from(free_constant);
    let rows = s.order() + 1 - first_row;
    if rows < unknowns + margin {
        return Err(Error::Underdetermined { rows, unknowns, margin });
    }

    let mut gens = Generators::new(s.order());
    let columns: Vec<QSeries> = monomials.iter().map(|m| gens.monomial(*m)).collect();
    let mut solver = IncrementalSolver::new(unknowns);
    for n in first_row..=s.order() {
        let row = columns.iter().map(|c| c.coeff(n).clone()).collect();
        if solver.push(row, s.coeff(n).clone()) == RowStatus::Inconsistent {
            return Ok(FitOutcome::Inconsistent(Inconsistency { q_power: n, max_weight }));
        }
    }
    let surplus = rows - solver.rank();
    let Some(solution) = solver.solution() else {
        return Err(Error::Underdetermined { rows, unknowns, margin });
    };
    if surplus < margin {
        return Err(Error::Underdetermined { rows, unknowns, margin });
    }
    let poly = QuasimodularPoly::from_terms(monomials.into_iter().zip(solution));
    Ok(FitOutcome::Fitted(Fit { poly, rows, unknowns, surplus, free_constant }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(a: u32, b: u32, c: u32) -> Monomial {
        Monomial::new(a, b, c)
    }

    #[test]
    fn basis_examples() {
        assert_eq!(basis(0), vec![m(0, 0, 0)]);
        assert_eq!(basis(2), vec![m(0, 0, 0), m(1, 0, 0)]);
        assert_eq!(basis(4), vec![m(0, 0, 0), m(1, 0, 0), m(2, 0, 0), m(0, 1, 0)]);
        assert_eq!(
            basis(6),
            vec![m(0, 0, 0), m(1, 0, 0), m(2, 0, 0), m(0, 1, 0), m(3, 0, 0), m(1, 1, 0), m(0, 0, 1)]
        );
    }

    #[test]
    fn basis_size_counts_partitions() {
        // partitions of v into parts {2,4,6}, brute force over all triples
        for w in (0..=30u32).step_by(2) {
            let mut count = 0;
            for v in (0..=w).step_by(2) {
                for a in 0..=v {
                    for b in 0..=v {
                        for c in 0..=v {
                            if 2 * a + 4 * b + 6 * c == v {
                                count += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(basis(w).len(), count, "weight {w}");
        }
    }

    #[test]
    fn evaluate_examples() {
        let g2 = QuasimodularPoly::monomial(m(1, 0, 0), Scalar::one()).evaluate(2);
        assert_eq!(g2, eisenstein(2, 2).unwrap());
        assert!(QuasimodularPoly::zero().evaluate(5).is_zero());
        let g4 = QuasimodularPoly::monomial(m(0, 1, 0), Scalar::one()).evaluate(1);
        assert_eq!(g4, eisenstein(4, 1).unwrap());
    }

    #[test]
    fn ramanujan_identity_for_g2() {
        // q dG2/dq = -2 G2^2 + 5/6 G4; hand check: q^1: -2*(-1/12) + 5/6 = 1, q^2: -3/2 + 15/2 = 6
        let target = eisenstein(2, 12).unwrap().q_d_q();
        let fit = fit(&target, 4, false).unwrap().fitted().unwrap();
        let expected = QuasimodularPoly::from_terms([
            (m(2, 0, 0), Scalar::from(-2)),
            (m(0, 1, 0), Scalar::new(5, 6)),
        ]);
        assert_eq!(fit.poly, expected);
        assert!(fit.surplus >= DEFAULT_MARGIN);
    }

    #[test]
    fn generator_recognizes_itself() {
        let fit = fit(&eisenstein(6, 12).unwrap(), 6, false).unwrap().fitted().unwrap();
        assert_eq!(fit.poly, QuasimodularPoly::monomial(m(0, 0, 1), Scalar::one()));
    }

    #[test]
    fn non_quasimodular_series_is_reported() {
        let s = QSeries::from_coeffs(
            [1, 1].into_iter().map(Scalar::from).chain(std::iter::repeat(Scalar::zero()).take(11)).collect(),
        );
        assert_eq!(s.order(), 12);
        match fit(&s, 4, false).unwrap() {
            FitOutcome::Inconsistent(rep) => assert!(rep.q_power >= 4 && rep.q_power <= 12),
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn too_short_series_is_an_error() {
        let s = eisenstein(4, 7).unwrap();
        assert!(matches!(fit(&s, 4, false), Err(Error::Underdetermined { .. })));
        assert!(matches!(fit(&s, 3, false), Err(Error::OddWeight(3))));
        let u = eisenstein(4, 20).unwrap().with_unknown_constant();
        assert!(matches!(fit(&u, 4, false), Err(Error::UnknownConstant(_))));
    }

    #[test]
    fn free_constant_ignores_q0() {
        let target = eisenstein(4, 20).unwrap().with_unknown_constant();
        let fit = fit(&target, 4, true).unwrap().fitted().unwrap();
        assert_eq!(fit.poly, QuasimodularPoly::monomial(m(0, 1, 0), Scalar::one()));
        assert!(fit.free_constant);
    }

    #[test]
    fn graded_part_examples() {
        let p = QuasimodularPoly::from_terms([(m(2, 0, 0), Scalar::from(-2)), (m(0, 1, 0), Scalar::new(5, 6))]);
        assert_eq!(p.graded_part(4), p);
        let q = QuasimodularPoly::from_terms([(m(0, 0, 0), Scalar::one()), (m(1, 0, 0), Scalar::one())]);
        assert_eq!(q.graded_part(0), QuasimodularPoly::monomial(Monomial::ONE, Scalar::one()));
        assert!(QuasimodularPoly::monomial(m(1, 0, 0), Scalar::one()).graded_part(4).is_zero());
    }

    #[test]
    fn json_shape() {
        let p = QuasimodularPoly::from_terms([(m(2, 0, 0), Scalar::from(-2)), (m(0, 1, 0), Scalar::new(5, 6))]);
        let js = serde_json::to_value(&p).unwrap();
        assert_eq!(
            js,
            serde_json::json!([{"exp": [2, 0, 0], "coeff": "-2/1"}, {"exp": [0, 1, 0], "coeff": "5/6"}])
        );
        assert_eq!(serde_json::from_value::<QuasimodularPoly>(js).unwrap(), p);
    }

    fn arb_poly(max_weight: u32) -> impl Strategy<Value = QuasimodularPoly> {
        let b = basis(max_weight);
        let n = b.len();
        prop::collection::vec((-6i64..7, 1i64..4), n).prop_map(move |cs| {
            QuasimodularPoly::from_terms(b.iter().copied().zip(cs.into_iter().map(|(x, d)| Scalar::new(x, d))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn fit_inverts_evaluate(p in arb_poly(8)) {
            let s = p.evaluate(25);
            let fitted = fit(&s, 8, false).unwrap().fitted().unwrap();
            prop_assert_eq!(&fitted.poly, &p);
            // stable under raising the order
            let again = fit(&p.evaluate(30), 8, false).unwrap().fitted().unwrap();
            prop_assert_eq!(again.poly, fitted.poly);
        }

        #[test]
        fn graded_parts_sum_back(p in arb_poly(10)) {
            let total = (0..=10).step_by(2).fold(QuasimodularPoly::zero(), |acc, w| acc.add(&p.graded_part(w)));
            prop_assert_eq!(total, p);
        }

        #[test]
        fn evaluate_is_linear(p in arb_poly(6), r in arb_poly(6)) {
            prop_assert_eq!(p.add(&r).evaluate(10), p.evaluate(10).add(&r.evaluate(10)));
        }
    }
}
