//! Named verification suites with structured, serializable results.
//!
//! Every check carries a stable id, so reports can be diffed and assembled
//! in any order. Checks inside a suite run in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::drcycle::{dr3_bssz_check, dr3_closed, dr3_recursive, dr_standard, DrQuery};
use crate::elliptic::{check_propagator_identity, check_propagator_identity_with, min_q_order_for_top_weight, top_weight_check};
use crate::exact::{double_factorial_odd, Scalar};
use crate::qseries::DivisorExponent;
use crate::socle::{
    all_necklace_exponents, all_queries, faber, necklace_lhs, necklace_path, necklace_product,
    relation_integral_check, sample_query, verify_string_consistency,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub check: String,
    pub params: Value,
    pub status: Status,
    pub witness: Option<Value>,
}

impl CheckResult {
    fn new(id: String, check: &str, params: Value, witness: Option<Value>) -> Self {
        let status = if witness.is_none() { Status::Pass } else { Status::Fail };
        CheckResult { id, check: check.to_string(), params, status, witness }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Dr,
    String,
    Relation,
    Propagator,
    Topweight,
    Socle,
    Wheels,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 7] =
        [Suite::Dr, Suite::String, Suite::Relation, Suite::Propagator, Suite::Topweight, Suite::Socle, Suite::Wheels];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Dr => "dr",
            Suite::String => "string",
            Suite::Relation => "relation",
            Suite::Propagator => "propagator",
            Suite::Topweight => "topweight",
            Suite::Socle => "socle",
            Suite::Wheels => "wheels",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub q_order: usize,
    pub w_order: i64,
    pub g_max: u32,
    pub n_max: usize,
    pub seed: u64,
    /// Random queries for the socle agreement check.
    pub samples: usize,
    /// Restrict the top-weight suite to one genus.
    pub topweight_g: Option<u32>,
    /// Restrict the top-weight suite to one necklace size.
    pub topweight_m: Option<u32>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            q_order: 20,
            w_order: 8,
            g_max: 6,
            n_max: 6,
            seed: 0,
            samples: 100,
            topweight_g: None,
            topweight_m: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub config: SuiteConfig,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> SuiteReport {
    let checks = match suite {
        Suite::All => Suite::PARTS.iter().flat_map(|s| run_part(*s, config)).collect(),
        s => run_part(s, config),
    };
    SuiteReport { suite: suite.name().to_string(), checks, config: config.clone() }
}

fn run_part(suite: Suite, config: &SuiteConfig) -> Vec<CheckResult> {
    match suite {
        Suite::Dr => dr_checks(config),
        Suite::String => string_checks(config),
        Suite::Relation => relation_checks(config),
        Suite::Propagator => propagator_checks(config),
        Suite::Topweight => topweight_checks(config),
        Suite::Socle => socle_checks(config),
        Suite::Wheels => wheel_checks(config),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

fn pair(lhs: &Scalar, rhs: &Scalar) -> Value {
    json!({"lhs": lhs, "rhs": rhs})
}

fn dr_checks(config: &SuiteConfig) -> Vec<CheckResult> {
    let genera: Vec<u32> = (1..=config.g_max).collect();
    let mut out: Vec<CheckResult> = genera
        .par_iter()
        .map(|&g| {
            let witness = (-5..=5i64)
                .flat_map(|a1| (-5..=5i64).map(move |a2| DrQuery::new(g, a1, a2)))
                .find_map(|q| {
                    let (c, r) = (dr3_closed(q), dr3_recursive(q));
                    (c != r).then(|| json!({"a1": q.a1, "a2": q.a2, "closed": c, "recursive": r}))
                });
            CheckResult::new(format!("dr.oracle.g{g}"), "dr3_closed_vs_recursive", json!({"g": g, "a_max": 5}), witness)
        })
        .collect();
    out.extend(genera.par_iter().map(|&g| {
        let witness = (1..=4i64)
            .flat_map(|a1| (1..=4i64).map(move |a2| (a1, a2)))
            .filter_map(|(a1, a2)| dr3_bssz_check(g, a1, a2))
            .find(|c| !c.passed())
            .map(|c| json!({"a1": c.query.a1, "a2": c.query.a2, "lhs": c.lhs, "rhs": c.rhs}));
        CheckResult::new(format!("dr.bssz.g{g}"), "dr3_bssz", json!({"g": g, "a_max": 4}), witness)
    }).collect::<Vec<_>>());
    out.extend((0..=config.g_max).map(|g| {
        let norm = dr_standard(g)
            * double_factorial_odd(2 * g as i64 + 1).unwrap()
            * Scalar::from(4).pow(g as i32);
        let witness = (!norm.is_one()).then(|| json!({"normalized": norm}));
        CheckResult::new(format!("dr.standard.g{g}"), "dr_standard", json!({"g": g}), witness)
    }));
    out
}

fn string_checks(config: &SuiteConfig) -> Vec<CheckResult> {
    let cases: Vec<(u32, usize)> =
        (1..=config.g_max).flat_map(|g| (1..config.n_max).map(move |n| (g, n))).collect();
    cases
        .par_iter()
        .map(|&(g, n)| {
            // d such that d + [0] is valid, and d valid on its own (lifted)
            let mut witness = None;
            let appended = all_queries(g, n + 1)
                .into_iter()
                .filter(|q| q.d[n] == 0)
                .map(|q| q.d[..n].to_vec());
            let plain = all_queries(g, n).into_iter().map(|q| q.d);
            for d in appended.chain(plain) {
                match verify_string_consistency(g, &d) {
                    Ok(checks) => {
                        if let Some(c) = checks.into_iter().find(|c| !c.passed()) {
                            witness = Some(json!({"query": c.query, "lhs": c.lhs, "rhs": c.rhs}));
                        }
                    }
                    Err(e) => witness = Some(json!({"d": d, "error": e.to_string()})),
                }
                if witness.is_some() {
                    break;
                }
            }
            CheckResult::new(format!("string.g{g}.n{n}"), "string_consistency", json!({"g": g, "n": n}), witness)
        })
        .collect()
}

fn relation_checks(config: &SuiteConfig) -> Vec<CheckResult> {
    let cases: Vec<(u32, usize)> = (1..=config.g_max.min(5)).flat_map(|g| (1..=4).map(move |m| (g, m))).collect();
    cases
        .par_iter()
        .map(|&(g, m)| {
            let witness = all_necklace_exponents(g, m).into_iter().find_map(|d| match relation_integral_check(g, &d) {
                Ok(c) if c.passed() => None,
                Ok(c) => Some(json!({"d": d, "lhs": c.lhs, "rhs": c.rhs})),
                Err(e) => Some(json!({"d": d, "error": e.to_string()})),
            });
            CheckResult::new(format!("relation.g{g}.m{m}"), "relation_integral", json!({"g": g, "m": m}), witness)
        })
        .collect()
}

fn propagator_checks(config: &SuiteConfig) -> Vec<CheckResult> {
    let params = json!({"q_order": config.q_order, "w_order": config.w_order});
    let identity = match check_propagator_identity(config.q_order, config.w_order) {
        Ok(c) => c.mismatch.map(|(q, w)| json!({"q_power": q, "w_power": w})),
        Err(e) => Some(json!({"error": e.to_string()})),
    };
    // the sigma_k convention must be caught
    let printed = match check_propagator_identity_with(config.q_order, config.w_order, DivisorExponent::K) {
        Ok(c) if c.mismatch.is_some() => None,
        Ok(_) => Some(json!({"error": "sigma_k Eisenstein convention unexpectedly matched"})),
        Err(e) => Some(json!({"error": e.to_string()})),
    };
    vec![
        CheckResult::new("propagator.identity".into(), "propagator_identity", params.clone(), identity),
        CheckResult::new("propagator.sigma_k_rejected".into(), "propagator_identity_sigma_k", params, printed),
    ]
}

/// `(g, j+, j-)` for every genus and necklace size in range, all orientation splits.
pub fn topweight_cases(config: &SuiteConfig) -> Vec<(u32, u32, u32)> {
    let genera: Vec<u32> = config.topweight_g.map_or_else(|| (1..=3).collect(), |g| vec![g]);
    let sizes: Vec<u32> = config.topweight_m.map_or_else(|| (1..=4).collect(), |m| vec![m]);
    let mut cases = Vec::new();
    for &g in &genera {
        for &m in &sizes {
            for j_minus in 0..m {
                cases.push((g, m - j_minus, j_minus));
            }
        }
    }
    cases
}

fn topweight_checks(config: &SuiteConfig) -> Vec<CheckResult> {
    topweight_cases(config)
        .par_iter()
        .map(|&(g, j_plus, j_minus)| {
            let q_order = config.q_order.max(min_q_order_for_top_weight(g, j_plus + j_minus));
            let params = json!({"g": g, "j_plus": j_plus, "j_minus": j_minus, "q_order": q_order});
            let witness = match top_weight_check(g, j_plus, j_minus, q_order) {
                Ok(r) if r.passed() => None,
                Ok(r) => Some(json!({"fit": r.fit, "mismatch_q_power": r.mismatch})),
                Err(e) => Some(json!({"error": e.to_string()})),
            };
            CheckResult::new(format!("topweight.g{g}.jp{j_plus}.jm{j_minus}"), "top_weight", params, witness)
        })
        .collect()
}

fn socle_checks(config: &SuiteConfig) -> Vec<CheckResult> {
    let cases: Vec<(u32, usize)> =
        (1..=config.g_max).flat_map(|g| (1..=config.n_max).map(move |n| (g, n))).collect();
    let mut out: Vec<CheckResult> = cases
        .par_iter()
        .map(|&(g, n)| {
            let witness = all_queries(g, n).into_iter().find_map(|q| match necklace_path(&q) {
                Ok(v) if v == faber(&q) => None,
                Ok(v) => Some(json!({"d": q.d, "faber": faber(&q), "necklace": v})),
                Err(e) => Some(json!({"d": q.d, "error": e.to_string()})),
            });
            CheckResult::new(format!("socle.g{g}.n{n}"), "faber_vs_necklace", json!({"g": g, "n": n}), witness)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samples: Vec<_> = (0..config.samples).map(|_| sample_query(&mut rng, config.g_max, config.n_max)).collect();
    let witness = samples.iter().find_map(|q| match necklace_path(q) {
        Ok(v) if v == faber(q) => None,
        Ok(v) => Some(json!({"query": q, "faber": faber(q), "necklace": v})),
        Err(e) => Some(json!({"query": q, "error": e.to_string()})),
    });
    out.push(CheckResult::new(
        "socle.random".into(),
        "faber_vs_necklace_sampled",
        json!({"samples": config.samples, "seed": config.seed}),
        witness,
    ));
    out
}

/// Sampled `(g, d)` with all `d_i >= 1` and `sum (d_i - 1) = g - 1`, `m <= 5`.
pub fn sample_necklace_exponents(seed: u64, count: usize, g_max: u32) -> Vec<(u32, Vec<u32>)> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let g = rng.gen_range(1..=g_max);
            let m = rng.gen_range(1..=5usize);
            let mut d = vec![1u32; m];
            for _ in 0..g - 1 {
                d[rng.gen_range(0..m)] += 1;
            }
            (g, d)
        })
        .collect()
}

fn wheel_checks(config: &SuiteConfig) -> Vec<CheckResult> {
    sample_necklace_exponents(config.seed, 20, config.g_max)
        .par_iter()
        .enumerate()
        .map(|(i, (g, d))| {
            let witness = match necklace_lhs(*g, d) {
                Ok(v) if v == necklace_product(d) => None,
                Ok(v) => Some(pair(&v, &necklace_product(d))),
                Err(e) => Some(json!({"error": e.to_string()})),
            };
            CheckResult::new(format!("wheels.collapse.{i}"), "wheel_collapse", json!({"g": g, "d": d}), witness)
        })
        .collect()
}
