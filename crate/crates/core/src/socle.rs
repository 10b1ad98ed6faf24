//! Socle intersection numbers `int lambda_g lambda_{g-1} prod psi_i^{d_i}`.
//!
//! Two independent evaluations are provided. [`faber`] is the closed formula
//! with Bernoulli numbers and double factorials. The necklace path
//! ([`necklace_socle`] together with the string-equation driver in
//! [`socle_compute`]) sums DR-cycle integrals over oriented necklace graphs
//! ("wheels") and never touches the closed formula.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use itertools::Itertools;
use rand::Rng;
use serde::Serialize;

use crate::drcycle::{dr_standard, dr_standard_psi};
use crate::error::{Error, Result};
use crate::exact::{bernoulli, double_factorial_odd, factorial, factorial_int, sign, Scalar};

/// Genus and psi exponents of one socle integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SocleQuery {
    pub g: u32,
    pub d: Vec<u32>,
}

impl SocleQuery {
    /// Checks `g >= 1`, `n >= 1` and `sum d_i = g - 2 + n`.
    pub fn new(g: u32, d: Vec<u32>) -> Result<Self> {
        if g < 1 {
            return Err(Error::InvalidQuery(format!("genus must be >= 1, got {g}")));
        }
        if d.is_empty() {
            return Err(Error::InvalidQuery("at least one marked point is needed".into()));
        }
        let sum: i64 = d.iter().map(|&x| x as i64).sum();
        let expected = g as i64 - 2 + d.len() as i64;
        if sum != expected {
            return Err(Error::Dimension { sum, expected });
        }
        Ok(SocleQuery { g, d })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    fn key(&self) -> (u32, Vec<u32>) {
        let mut d = self.d.clone();
        d.sort_unstable();
        (self.g, d)
    }
}

impl std::fmt::Display for SocleQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "g={} d=[{}]", self.g, self.d.iter().join(","))
    }
}

/// `(-1)^{g-1} B_{2g} (2g-3+n)! / (2^{2g-1} (2g)!) * prod 1/(2d_i - 1)!!`.
pub fn faber(q: &SocleQuery) -> Scalar {
    let g = q.g as i64;
    let n = q.n() as i64;
    let head = sign(g - 1) * bernoulli(2 * q.g as usize) * factorial(2 * g - 3 + n).unwrap()
        / (Scalar::from(2).pow(2 * g as i32 - 1) * factorial(2 * g).unwrap());
    q.d.iter()
        .fold(head, |acc, &di| acc / double_factorial_odd(2 * di as i64 - 1).unwrap())
}

/// An oriented necklace: vertex `i` carries leaf `i`, the cyclic order starts
/// at vertex 1, and `genera[i - 1]` is the genus of vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Wheel {
    pub cycle: Vec<usize>,
    pub genera: Vec<u32>,
}

impl Wheel {
    pub fn m(&self) -> usize {
        self.cycle.len()
    }

    /// `(j+, j-)`: edges whose smaller-to-larger index direction agrees,
    /// respectively disagrees, with the cyclic orientation. A single loop
    /// counts as one agreeing edge.
    pub fn orientation_counts(&self) -> (u32, u32) {
        if self.m() == 1 {
            return (1, 0);
        }
        let m = self.m();
        let agree = (0..m).filter(|&i| self.cycle[i] < self.cycle[(i + 1) % m]).count() as u32;
        (agree, m as u32 - agree)
    }
}

/// Ordered ways of writing `total` as a sum of `parts` non-negative integers.
pub fn compositions(total: u32, parts: usize) -> impl Iterator<Item = Vec<u32>> {
    // stars and bars: choose the positions of parts-1 bars among total+parts-1 slots
    let slots = total as usize + parts.saturating_sub(1);
    let bars = parts.saturating_sub(1);
    (0..slots).combinations(bars).filter(move |_| parts > 0).map(move |bar_pos| {
        let mut out = Vec::with_capacity(parts);
        let mut prev = 0usize;
        for (k, &b) in bar_pos.iter().enumerate() {
            out.push((b - prev - usize::from(k > 0)) as u32);
            prev = b;
        }
        let last_start = if bars == 0 { 0 } else { prev + 1 };
        out.push((slots - last_start) as u32);
        out
    })
}

/// Streams all `(m-1)!` cyclic orders (vertex 1 first) times all genus
/// assignments summing to `total_genus`.
pub fn wheels(m: usize, total_genus: u32) -> impl Iterator<Item = Wheel> {
    assert!(m >= 1, "a wheel has at least one vertex");
    (2..=m)
        .permutations(m - 1)
        .flat_map(move |tail| {
            let mut cycle = vec![1];
            cycle.extend(tail);
            compositions(total_genus, m).map(move |genera| Wheel { cycle: cycle.clone(), genera })
        })
}

pub fn wheels_enumerate(m: usize, total_genus: u32) -> Vec<Wheel> {
    wheels(m, total_genus).collect()
}

fn check_necklace_exponents(g: u32, d: &[u32]) -> Result<()> {
    if g < 1 || d.is_empty() || d.contains(&0) {
        return Err(Error::InvalidQuery(format!(
            "necklace exponents must be >= 1 with g >= 1, got g={g} d={d:?}"
        )));
    }
    let sum: i64 = d.iter().map(|&x| x as i64 - 1).sum();
    if sum != g as i64 - 1 {
        return Err(Error::InvalidQuery(format!(
            "necklace exponents need sum (d_i - 1) = g - 1 = {}, got {sum}",
            g as i64 - 1
        )));
    }
    Ok(())
}

/// `1/(m-1)! sum_{wheels, genera} prod_i int DR_{g(v_i)}(0,1,-1) lambda psi^{d_i - 1}`,
/// summed literally over every wheel. Terms whose vertex genus differs from
/// `d_i - 1` vanish for dimension reasons.
pub fn necklace_lhs(g: u32, d: &[u32]) -> Result<Scalar> {
    check_necklace_exponents(g, d)?;
    let m = d.len();
    let mut total = Scalar::zero();
    for wheel in wheels(m, g - 1) {
        let mut term = Scalar::one();
        for (genus, &di) in wheel.genera.iter().zip(d) {
            term *= dr_standard_psi(*genus, di - 1);
            if term.is_zero() {
                break;
            }
        }
        total += term;
    }
    Ok(total / Scalar::from(factorial_int(m - 1)))
}

/// `prod_i int DR_{d_i - 1}(0,1,-1) lambda psi^{d_i - 1}`: the wheel sum after
/// the genus assignment has been forced.
pub fn necklace_product(d: &[u32]) -> Scalar {
    d.iter().map(|&di| dr_standard(di - 1)).product()
}

/// `(-1)^{g-1} B_{2g} (2g-2+m)! / (2 (2g)!)`.
fn relation_normalization(g: u32, m: usize) -> Scalar {
    let g = g as i64;
    sign(g - 1) * bernoulli(2 * g as usize) * factorial(2 * g - 2 + m as i64).unwrap()
        / (Scalar::from(2) * factorial(2 * g).unwrap())
}

/// Socle number of a query with exactly one zero exponent and every other
/// exponent positive, computed from the wheel sum.
pub fn necklace_socle(q: &SocleQuery) -> Result<Scalar> {
    let zeros = q.d.iter().filter(|&&x| x == 0).count();
    if zeros != 1 || q.n() < 2 {
        return Err(Error::InvalidQuery(format!("necklace_socle needs exactly one zero exponent: {q}")));
    }
    let positive: Vec<u32> = q.d.iter().copied().filter(|&x| x > 0).collect();
    Ok(relation_normalization(q.g, positive.len()) * necklace_lhs(q.g, &positive)?)
}

/// Removes the last zero exponent and returns one reduced query per remaining
/// positive exponent (in index order), with that exponent lowered by one.
pub fn string_apply(q: &SocleQuery) -> Result<Vec<SocleQuery>> {
    let Some(zero) = q.d.iter().rposition(|&x| x == 0) else {
        return Err(Error::NoStringReduction(q.to_string()));
    };
    string_apply_at(q, zero)
}

/// Like [`string_apply`], removing the zero at `zero_index`.
pub fn string_apply_at(q: &SocleQuery, zero_index: usize) -> Result<Vec<SocleQuery>> {
    if q.n() < 2 || q.d.get(zero_index) != Some(&0) || q.d.iter().all(|&x| x == 0) {
        return Err(Error::NoStringReduction(q.to_string()));
    }
    let mut rest = q.d.clone();
    rest.remove(zero_index);
    let out = (0..rest.len())
        .filter(|&j| rest[j] > 0)
        .map(|j| {
            let mut d = rest.clone();
            d[j] -= 1;
            SocleQuery { g: q.g, d }
        })
        .collect();
    Ok(out)
}

static NECKLACE_MEMO: OnceLock<Mutex<HashMap<(u32, Vec<u32>), Scalar>>> = OnceLock::new();

/// Socle number by the necklace path only.
///
/// * exactly one zero: [`necklace_socle`];
/// * two or more zeros: string equation on the last zero;
/// * no zeros (or `n = 1`): raise the first largest exponent by one and append
///   a zero; that canonical query reduces to the input plus other queries of
///   the same degree and strictly larger `sum d_i^2`, which are subtracted.
pub fn necklace_path(q: &SocleQuery) -> Result<Scalar> {
    let key = q.key();
    let memo = NECKLACE_MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = memo.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let zeros = q.d.iter().filter(|&&x| x == 0).count();
    let value = if q.n() >= 2 && zeros == 1 {
        necklace_socle(q)?
    } else if q.n() >= 2 && zeros >= 2 {
        let mut acc = Scalar::zero();
        for r in string_apply(q)? {
            acc += necklace_path(&r)?;
        }
        acc
    } else {
        let (j, _) = q.d.iter().enumerate().rev().max_by_key(|(_, &x)| x).unwrap();
        let mut lifted = q.d.clone();
        lifted[j] += 1;
        lifted.push(0);
        let lifted = SocleQuery::new(q.g, lifted)?;
        let mut acc = necklace_socle(&lifted)?;
        for (i, r) in string_apply(&lifted)?.into_iter().enumerate() {
            if i != j {
                acc -= necklace_path(&r)?;
            }
        }
        acc
    };
    memo.lock().unwrap().insert(key, value.clone());
    Ok(value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Faber,
    Necklace,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SocleValue {
    pub query: SocleQuery,
    pub faber: Option<Scalar>,
    pub necklace: Option<Scalar>,
}

impl SocleValue {
    /// `Some(equal?)` when both were computed.
    pub fn agree(&self) -> Option<bool> {
        match (&self.faber, &self.necklace) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        }
    }

    pub fn value(&self) -> &Scalar {
        self.faber.as_ref().or(self.necklace.as_ref()).expect("at least one method ran")
    }
}

pub fn socle_compute(q: &SocleQuery, method: Method) -> Result<SocleValue> {
    let faber_value = matches!(method, Method::Faber | Method::Both).then(|| faber(q));
    let necklace_value = match method {
        Method::Necklace | Method::Both => Some(necklace_path(q)?),
        Method::Faber => None,
    };
    Ok(SocleValue { query: q.clone(), faber: faber_value, necklace: necklace_value })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StringCheck {
    /// The query carrying the zero that gets removed.
    pub query: SocleQuery,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl StringCheck {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// String-equation consistency of [`faber`].
///
/// If `d` with a zero appended is a valid query, checks
/// `faber(d, 0) = sum faber(string_apply(d, 0))`. If instead `d` itself is
/// valid, does the same for every lift `(d + e_j, 0)`. The two cases are
/// exclusive since their degrees differ by one.
pub fn verify_string_consistency(g: u32, d: &[u32]) -> Result<Vec<StringCheck>> {
    let mut appended = d.to_vec();
    appended.push(0);
    let targets: Vec<SocleQuery> = match SocleQuery::new(g, appended) {
        Ok(q) => vec![q],
        Err(Error::Dimension { .. }) => {
            SocleQuery::new(g, d.to_vec())?;
            (0..d.len())
                .map(|j| {
                    let mut lifted = d.to_vec();
                    lifted[j] += 1;
                    lifted.push(0);
                    SocleQuery::new(g, lifted)
                })
                .collect::<Result<_>>()?
        }
        Err(e) => return Err(e),
    };
    targets
        .into_iter()
        .map(|q| {
            let rhs = string_apply(&q)?.iter().map(faber).sum();
            Ok(StringCheck { lhs: faber(&q), rhs, query: q })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub g: u32,
    pub d: Vec<u32>,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl RelationCheck {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The necklace relation paired with `prod psi_i^{d_i - 1}`: the wheel sum on
/// the left, and on the right the normalization
/// `2 (2g)! / ((-1)^{g-1} B_{2g} (2g-2+m)!)` times `sum_i faber(d - e_i)`.
pub fn relation_integral_check(g: u32, d: &[u32]) -> Result<RelationCheck> {
    check_necklace_exponents(g, d)?;
    let lhs = necklace_lhs(g, d)?;
    let mut sum = Scalar::zero();
    for i in 0..d.len() {
        let mut di = d.to_vec();
        di[i] -= 1;
        sum += faber(&SocleQuery::new(g, di)?);
    }
    let rhs = relation_normalization(g, d.len()).recip() * sum;
    Ok(RelationCheck { g, d: d.to_vec(), lhs, rhs })
}

/// Every valid query of genus `g` with `n` points, exponents in index order.
pub fn all_queries(g: u32, n: usize) -> Vec<SocleQuery> {
    let total = g as i64 - 2 + n as i64;
    if g < 1 || n < 1 || total < 0 {
        return Vec::new();
    }
    compositions(total as u32, n).map(|d| SocleQuery { g, d }).collect()
}

/// Every exponent vector of length `m` with entries `>= 1` and `sum (d_i - 1) = g - 1`.
pub fn all_necklace_exponents(g: u32, m: usize) -> Vec<Vec<u32>> {
    compositions(g - 1, m).map(|c| c.into_iter().map(|x| x + 1).collect()).collect()
}

/// A uniformly drawn genus and point count, then a random composition.
pub fn sample_query<R: Rng>(rng: &mut R, g_max: u32, n_max: usize) -> SocleQuery {
    loop {
        let g = rng.gen_range(1..=g_max);
        let n = rng.gen_range(1..=n_max);
        let total = g as i64 - 2 + n as i64;
        if total < 0 {
            continue;
        }
        let mut d = vec![0u32; n];
        for _ in 0..total {
            d[rng.gen_range(0..n)] += 1;
        }
        return SocleQuery { g, d };
    }
}
