//! Laurent expansions in `w = 2 pi i z` with q-series coefficients, the
//! propagator sum `sum_{a != 0} a p^a / (1 - q^a)` with `p = e^w`, the shifted
//! Weierstrass function, and the q-series attached to oriented necklaces.
//!
//! Working in `w` keeps every coefficient rational.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{bernoulli, factorial, factorial_int, Scalar};
use crate::modfit::{self, Fit, FitOutcome, QuasimodularPoly};
use crate::qseries::{eisenstein, eisenstein_with, DivisorExponent, QSeries};

/// `sum_{e=min_exp}^{max_exp} c_e(q) w^e`, all `c_e` truncated at the same q-order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentQW {
    min_exp: i64,
    coeffs: Vec<QSeries>,
}

impl LaurentQW {
    /// Zero expansion on the window `w^{-pole_order} .. w^{w_order}`.
    pub fn zero(pole_order: usize, w_order: i64, q_order: usize) -> Self {
        let min_exp = -(pole_order as i64);
        assert!(w_order >= min_exp, "empty w-window");
        let len = (w_order - min_exp + 1) as usize;
        LaurentQW { min_exp, coeffs: vec![QSeries::zero(q_order); len] }
    }

    pub fn pole_order(&self) -> usize {
        (-self.min_exp).max(0) as usize
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn w_order(&self) -> i64 {
        self.min_exp + self.coeffs.len() as i64 - 1
    }

    pub fn q_order(&self) -> usize {
        self.coeffs[0].order()
    }

    /// Coefficient of `w^e`, or `None` outside the window.
    pub fn coeff(&self, e: i64) -> Option<&QSeries> {
        let idx = e - self.min_exp;
        if idx < 0 {
            return None;
        }
        self.coeffs.get(idx as usize)
    }

    fn coeff_mut(&mut self, e: i64) -> &mut QSeries {
        let idx = (e - self.min_exp) as usize;
        &mut self.coeffs[idx]
    }

    /// Terms with negative w-exponent.
    pub fn principal_part(&self) -> Vec<(i64, &QSeries)> {
        (self.min_exp..0).filter_map(|e| self.coeff(e).map(|c| (e, c))).collect()
    }

    /// Drops the principal part.
    pub fn regular_part(&self) -> LaurentQW {
        if self.min_exp >= 0 {
            return self.clone();
        }
        let skip = (-self.min_exp) as usize;
        LaurentQW { min_exp: 0, coeffs: self.coeffs[skip..].to_vec() }
    }

    /// `d/dw`. The window shifts down by one.
    pub fn derivative_w(&self) -> LaurentQW {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&Scalar::from(self.min_exp + i as i64)))
            .collect();
        LaurentQW { min_exp: self.min_exp - 1, coeffs }
    }

    pub fn q_d_q(&self) -> LaurentQW {
        LaurentQW { min_exp: self.min_exp, coeffs: self.coeffs.iter().map(QSeries::q_d_q).collect() }
    }

    /// Limit at `w = 0` after removing the principal part.
    pub fn regularized_value_at_zero(&self) -> Option<QSeries> {
        self.coeff(0).cloned()
    }

    /// First `(q_power, w_power)` where the two expansions differ on their
    /// common window, scanning q-powers outermost.
    pub fn first_mismatch(&self, other: &LaurentQW) -> Option<(usize, i64)> {
        let lo = self.min_exp.max(other.min_exp);
        let hi = self.w_order().min(other.w_order());
        let q_order = self.q_order().min(other.q_order());
        for n in 0..=q_order {
            for e in lo..=hi {
                let (a, b) = (self.coeff(e).unwrap(), other.coeff(e).unwrap());
                if a.raw_coeffs()[n] != b.raw_coeffs()[n] {
                    return Some((n, e));
                }
            }
        }
        None
    }
}

/// Expansion of the propagator `sum_{a != 0} a p^a / (1 - q^a)`, `p = e^w`,
/// taken in the region `|q| < |p| < 1`.
///
/// The q^0 part is `sum_{a >= 1} a p^a = e^w / (e^w - 1)^2`, whose Laurent
/// coefficients are `-(n-1) B_n / n!` at `w^{n-2}`. For `n >= 1` the q^n part is
/// the finite sum `sum_{a | n} a (e^{aw} + e^{-aw})`.
pub fn propagator_expansion(q_order: usize, pole_order: usize, w_order: i64) -> Result<LaurentQW> {
    if pole_order < 2 {
        return Err(Error::Window(format!("pole order {pole_order} cannot hold the w^-2 pole")));
    }
    let mut out = LaurentQW::zero(pole_order, w_order, q_order);
    for e in -2..=w_order {
        let n = (e + 2) as usize;
        let c = -Scalar::from(n as i64 - 1) * bernoulli(n) / Scalar::from(factorial_int(n));
        set(out.coeff_mut(e), 0, c);
    }
    for n in 1..=q_order as u64 {
        for a in (1..=n).filter(|a| n % a == 0) {
            // a (e^{aw} + e^{-aw}) = sum_{e even} 2 a^{e+1} w^e / e!
            for e in (0..=w_order).step_by(2) {
                let term = Scalar::from(2) * Scalar::from(a).pow(e as i32 + 1) / factorial(e).unwrap();
                add(out.coeff_mut(e), n as usize, term);
            }
        }
    }
    Ok(out)
}

/// `w^{-2} + 2 sum_{l >= 0} G_{2l+2}(q) w^{2l} / (2l)!` on the window `w^{-2}..w^{w_order}`.
pub fn weierstrass_expansion(q_order: usize, w_order: i64) -> Result<LaurentQW> {
    weierstrass_expansion_with(q_order, w_order, DivisorExponent::KMinusOne)
}

pub fn weierstrass_expansion_with(
    q_order: usize,
    w_order: i64,
    exponent: DivisorExponent,
) -> Result<LaurentQW> {
    let mut out = LaurentQW::zero(2, w_order, q_order);
    set(out.coeff_mut(-2), 0, Scalar::one());
    for e in (0..=w_order).step_by(2) {
        let g = eisenstein_with(e + 2, q_order, exponent)?;
        *out.coeff_mut(e) = g.scale(&(Scalar::from(2) / factorial(e)?));
    }
    Ok(out)
}

fn set(s: &mut QSeries, n: usize, c: Scalar) {
    let mut coeffs = s.raw_coeffs().to_vec();
    coeffs[n] = c;
    *s = QSeries::from_coeffs(coeffs);
}

fn add(s: &mut QSeries, n: usize, c: Scalar) {
    let mut coeffs = s.raw_coeffs().to_vec();
    coeffs[n] += c;
    *s = QSeries::from_coeffs(coeffs);
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropagatorCheck {
    pub q_order: usize,
    pub w_order: i64,
    /// `(q_power, w_power)` of the first disagreement.
    pub mismatch: Option<(usize, i64)>,
}

impl PropagatorCheck {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares the propagator with the shifted Weierstrass expansion on the
/// window `q^0..q^{q_order}`, `w^{-2}..w^{w_order}`.
pub fn check_propagator_identity(q_order: usize, w_order: i64) -> Result<PropagatorCheck> {
    check_propagator_identity_with(q_order, w_order, DivisorExponent::KMinusOne)
}

pub fn check_propagator_identity_with(
    q_order: usize,
    w_order: i64,
    exponent: DivisorExponent,
) -> Result<PropagatorCheck> {
    let lhs = propagator_expansion(q_order, 2, w_order)?;
    let rhs = weierstrass_expansion_with(q_order, w_order, exponent)?;
    Ok(PropagatorCheck { q_order, w_order, mismatch: lhs.first_mismatch(&rhs) })
}

/// The q-series `sum_{a != 0} a^{2g-2} (a/(1-q^a))^{j+} (-a/(1-q^{-a}))^{j-}` of one
/// oriented necklace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NecklaceSeries {
    pub g: u32,
    pub j_plus: u32,
    pub j_minus: u32,
    /// The constant is a placeholder exactly when `j_minus == 0`.
    pub series: QSeries,
}

impl NecklaceSeries {
    pub fn m(&self) -> u32 {
        self.j_plus + self.j_minus
    }
}

/// Exact coefficients of the necklace sum up to `q^q_order`.
///
/// With `m = j+ + j-` and `s = 2g - 2 + m`, each summand equals
/// `a^s q^{a j-} / (1 - q^a)^m`; folding `a -> -a` gives
/// `sum_{b >= 1} b^s (q^{b j-} + q^{b j+}) / (1 - q^b)^m`. The coefficient of
/// `q^n` collects, over divisors `b | n`, the binomial weights
/// `C(t - j + m - 1, m - 1)` with `t = n / b` and `j` in `{j-, j+}`.
///
/// For `j- = 0` the `b`-sum of the constant terms diverges, so the constant is
/// left as a placeholder; every `q^n`, `n >= 1`, is still a finite sum.
pub fn necklace_coefficient_series(g: u32, j_plus: u32, j_minus: u32, q_order: usize) -> Result<NecklaceSeries> {
    if g < 1 {
        return Err(Error::InvalidQuery(format!("necklace genus must be >= 1, got {g}")));
    }
    if j_plus < 1 {
        return Err(Error::InvalidQuery("j_plus must be >= 1".into()));
    }
    let m = (j_plus + j_minus) as usize;
    let s = 2 * g as usize - 2 + m;
    let binom = |top: usize| {
        Scalar::from(factorial_int(top) / (factorial_int(m - 1) * factorial_int(top + 1 - m)))
    };
    let mut coeffs = vec![Scalar::zero(); q_order + 1];
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        for b in (1..=n).filter(|b| n % b == 0) {
            let t = n / b;
            let mut weight = Scalar::zero();
            for j in [j_minus as usize, j_plus as usize] {
                if t >= j {
                    weight += binom(t - j + m - 1);
                }
            }
            if !weight.is_zero() {
                *c += Scalar::from(b).pow(s as i32) * weight;
            }
        }
    }
    let mut series = QSeries::from_coeffs(coeffs);
    if j_minus == 0 {
        series = series.with_unknown_constant();
    }
    Ok(NecklaceSeries { g, j_plus, j_minus, series })
}

/// `(2/(m-1)!) (q d/dq)^{m-1} G_{2g}`.
pub fn top_weight_target(g: u32, m: u32, q_order: usize) -> Result<QSeries> {
    let g2g = eisenstein(2 * g as i64, q_order)?;
    let c = Scalar::from(2) / factorial(m as i64 - 1)?;
    Ok(g2g.q_d_q_pow(m as usize - 1).scale(&c))
}

/// `(1/(m-1)!) (q d/dq)^{m-1} lim_{w -> 0} (d/dw)^{2g-2}` of the propagator,
/// with the principal part removed before the limit.
pub fn propagator_top_weight_limit(g: u32, m: u32, q_order: usize) -> Result<QSeries> {
    let order = 2 * g as i64 - 2;
    let mut expansion = propagator_expansion(q_order, 2, order)?;
    for _ in 0..order {
        expansion = expansion.derivative_w();
    }
    let value = expansion
        .regular_part()
        .regularized_value_at_zero()
        .expect("window reaches w^0");
    let c = Scalar::one() / factorial(m as i64 - 1)?;
    Ok(value.q_d_q_pow(m as usize - 1).scale(&c))
}

/// Smallest q-order at which [`top_weight_check`] has the default fit margin.
pub fn min_q_order_for_top_weight(g: u32, m: u32) -> usize {
    modfit::basis(2 * g + 2 * m - 2).len() + modfit::DEFAULT_MARGIN
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopWeightReport {
    pub g: u32,
    pub j_plus: u32,
    pub j_minus: u32,
    pub q_order: usize,
    pub weight: u32,
    pub fit: FitOutcome,
    /// Part of the fitted polynomial at the top weight.
    pub top_part: Option<QuasimodularPoly>,
    /// Everything of strictly lower weight (weight 0 is meaningless in free-constant mode).
    pub lower_part: Option<QuasimodularPoly>,
    /// First q-power where the top part disagrees with the target.
    pub mismatch: Option<usize>,
}

impl TopWeightReport {
    pub fn passed(&self) -> bool {
        matches!(self.fit, FitOutcome::Fitted(_)) && self.mismatch.is_none()
    }

    pub fn fitted(&self) -> Option<&Fit> {
        match &self.fit {
            FitOutcome::Fitted(f) => Some(f),
            FitOutcome::Inconsistent(_) => None,
        }
    }
}

/// Recognizes the necklace series as a quasimodular form of weight at most
/// `2g - 2 + 2m` and compares its top-weight part with
/// `(2/(m-1)!) (q d/dq)^{m-1} G_{2g}`.
pub fn top_weight_check(g: u32, j_plus: u32, j_minus: u32, q_order: usize) -> Result<TopWeightReport> {
    let necklace = necklace_coefficient_series(g, j_plus, j_minus, q_order)?;
    let m = necklace.m();
    let weight = 2 * g + 2 * m - 2;
    let outcome = modfit::fit(&necklace.series, weight, j_minus == 0)?;
    let mut report = TopWeightReport {
        g,
        j_plus,
        j_minus,
        q_order,
        weight,
        fit: outcome.clone(),
        top_part: None,
        lower_part: None,
        mismatch: None,
    };
    if let FitOutcome::Fitted(fit) = outcome {
        let top = fit.poly.graded_part(weight);
        let lower = fit.poly.add(&top.scale(&-Scalar::one()));
        let target = top_weight_target(g, m, q_order)?;
        report.mismatch = top.evaluate(q_order).first_difference(&target);
        report.top_part = Some(top);
        report.lower_part = Some(lower);
    }
    Ok(report)
}

/// `2 (B_{2g}/(4g) + G_{2g})`: the one-loop factor, whose constant vanishes.
pub fn loop_coefficient(g: u32, q_order: usize) -> Result<QSeries> {
    if g < 1 {
        return Err(Error::InvalidQuery(format!("loop genus must be >= 1, got {g}")));
    }
    let k = 2 * g as i64;
    let shift = bernoulli(k as usize) / Scalar::from(2 * k);
    let g2g = eisenstein(k, q_order)?;
    Ok(g2g.add(&QSeries::constant(shift, q_order)).scale(&Scalar::from(2)))
}
