//! `faber`: socle numbers, verification suites and golden tables.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a mathematical
//! disagreement was found.

mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use partitions::partitions_desc;
use serde_json::json;
use socle::drcycle::{dr3_closed, DrQuery};
use socle::qseries::eisenstein;
use socle::socle::socle_compute;
use socle::verify::{run_suite, Suite, SuiteConfig};
use socle::{Method, SocleQuery};

use output::{Format, Table};

const EXIT_USAGE: u8 = 1;
const EXIT_DISAGREE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "faber", version, about = "Exact socle intersection numbers and necklace-relation checks")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "FABER_FORMAT", default_value = "markdown")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one socle number.
    Socle {
        #[arg(long)]
        g: u32,
        /// Comma-separated psi exponents, e.g. `2,0`.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        d: Vec<u32>,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        run: RunArgs,
        /// Restrict the top-weight suite to this genus.
        #[arg(long)]
        g: Option<u32>,
        /// Restrict the top-weight suite to this necklace size.
        #[arg(long)]
        m: Option<u32>,
    },
    /// Emit a golden table.
    Table {
        #[command(subcommand)]
        kind: TableKind,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, env = "FABER_Q_ORDER", default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    q_order: u64,
    #[arg(long, env = "FABER_W_ORDER", default_value_t = 8, value_parser = clap::value_parser!(i64).range(1..))]
    w_order: i64,
    #[arg(long, env = "FABER_G_MAX", default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    g_max: u32,
    #[arg(long, env = "FABER_N_MAX", default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    n_max: u64,
    #[arg(long, env = "FABER_SEED", default_value_t = 0)]
    seed: u64,
    /// Random queries in the socle agreement check.
    #[arg(long, env = "FABER_SAMPLES", default_value_t = 100)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum TableKind {
    /// Socle numbers by both methods, one row per exponent multiset.
    Socle {
        #[arg(long, env = "FABER_G_MAX", default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        g_max: u32,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
    },
    /// DR-cycle integrals `int DR_g(-a1-a2, a1, a2) lambda_g psi_1^g`.
    Dr {
        #[arg(long, env = "FABER_G_MAX", default_value_t = 4)]
        g_max: u32,
        #[arg(long, default_value_t = 3)]
        a_max: i64,
    },
    /// Eisenstein series coefficients.
    Eisenstein {
        #[arg(long, value_delimiter = ',', default_value = "2,4,6")]
        k: Vec<i64>,
        #[arg(long, env = "FABER_Q_ORDER", default_value_t = 10)]
        order: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Faber,
    Necklace,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Faber => Method::Faber,
            MethodArg::Necklace => Method::Necklace,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Dr,
    String,
    Relation,
    Propagator,
    Topweight,
    Socle,
    Wheels,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Dr => Suite::Dr,
            SuiteArg::String => Suite::String,
            SuiteArg::Relation => Suite::Relation,
            SuiteArg::Propagator => Suite::Propagator,
            SuiteArg::Topweight => Suite::Topweight,
            SuiteArg::Socle => Suite::Socle,
            SuiteArg::Wheels => Suite::Wheels,
            SuiteArg::All => Suite::All,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Socle { g, d, method } => cmd_socle(g, d, method.into(), cli.format),
        Command::Verify { suite, run, g, m } => {
            let config = SuiteConfig {
                q_order: run.q_order as usize,
                w_order: run.w_order,
                g_max: run.g_max,
                n_max: run.n_max as usize,
                seed: run.seed,
                samples: run.samples,
                topweight_g: g,
                topweight_m: m,
            };
            Ok(cmd_verify(suite.into(), &config, cli.format))
        }
        Command::Table { kind } => cmd_table(kind, cli.format),
    }
}

fn cmd_socle(g: u32, d: Vec<u32>, method: Method, format: Format) -> Result<ExitCode, String> {
    let query = SocleQuery::new(g, d).map_err(|e| match e {
        socle::Error::Dimension { sum, expected } => {
            format!("dimension constraint sum d_i = g - 2 + n fails: sum d_i = {sum}, g - 2 + n = {expected}")
        }
        other => other.to_string(),
    })?;
    let result = socle_compute(&query, method).map_err(|e| e.to_string())?;
    let opt = |v: &Option<socle::Scalar>| v.as_ref().map(ToString::to_string).unwrap_or_default();
    match format {
        Format::Json => {
            let js = json!({
                "g": query.g,
                "d": query.d,
                "method": method,
                "value": result.value(),
                "faber": result.faber,
                "necklace": result.necklace,
                "equal": result.agree(),
            });
            println!("{}", serde_json::to_string_pretty(&js).expect("serializable"));
        }
        _ => {
            let mut t = Table::new(&["g", "d", "faber", "necklace", "equal"]);
            t.push(vec![
                g.to_string(),
                join(&query.d),
                opt(&result.faber),
                opt(&result.necklace),
                result.agree().map(|b| b.to_string()).unwrap_or_default(),
            ]);
            print!("{}", t.render(format));
        }
    }
    Ok(if result.agree() == Some(false) { ExitCode::from(EXIT_DISAGREE) } else { ExitCode::SUCCESS })
}

fn cmd_verify(suite: Suite, config: &SuiteConfig, format: Format) -> ExitCode {
    let report = run_suite(suite, config);
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("serializable")),
        _ => {
            let mut t = Table::new(&["id", "status", "witness"]);
            for c in &report.checks {
                let status = if c.passed() { "pass" } else { "fail" };
                let witness = c.witness.as_ref().map(ToString::to_string).unwrap_or_default();
                t.push(vec![c.id.clone(), status.into(), witness]);
            }
            print!("{}", t.render(format));
            let passed = report.checks.iter().filter(|c| c.passed()).count();
            eprintln!("{}: {passed}/{} checks passed", report.suite, report.checks.len());
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_DISAGREE)
    }
}

fn cmd_table(kind: TableKind, format: Format) -> Result<ExitCode, String> {
    let mut disagreement = false;
    let table = match kind {
        TableKind::Socle { g_max, n_max } => {
            let mut t = Table::new(&["g", "d", "faber", "necklace", "equal"]);
            for g in 1..=g_max {
                for n in 1..=n_max as usize {
                    let total = g as i64 - 2 + n as i64;
                    if total < 0 {
                        continue;
                    }
                    for d in partitions_desc(total as u32, n) {
                        let q = SocleQuery::new(g, d).map_err(|e| e.to_string())?;
                        let r = socle_compute(&q, Method::Both).map_err(|e| e.to_string())?;
                        let equal = r.agree().unwrap_or(false);
                        disagreement |= !equal;
                        t.push(vec![
                            g.to_string(),
                            join(&q.d),
                            r.faber.unwrap().to_string(),
                            r.necklace.unwrap().to_string(),
                            equal.to_string(),
                        ]);
                    }
                }
            }
            t
        }
        TableKind::Dr { g_max, a_max } => {
            let mut t = Table::new(&["g", "a1", "a2", "value"]);
            for g in 0..=g_max {
                for a1 in -a_max..=a_max {
                    for a2 in -a_max..=a_max {
                        let v = dr3_closed(DrQuery::new(g, a1, a2));
                        t.push(vec![g.to_string(), a1.to_string(), a2.to_string(), v.to_string()]);
                    }
                }
            }
            t
        }
        TableKind::Eisenstein { k, order } => {
            let mut t = Table::new(&["k", "n", "coeff"]);
            for weight in k {
                let s = eisenstein(weight, order).map_err(|e| e.to_string())?;
                for (n, c) in s.raw_coeffs().iter().enumerate() {
                    t.push(vec![weight.to_string(), n.to_string(), c.to_string()]);
                }
            }
            t
        }
    };
    print!("{}", table.render(format));
    Ok(if disagreement { ExitCode::from(EXIT_DISAGREE) } else { ExitCode::SUCCESS })
}

fn join(d: &[u32]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

mod partitions {
    /// Non-increasing sequences of `parts` non-negative integers summing to `total`.
    pub fn partitions_desc(total: u32, parts: usize) -> Vec<Vec<u32>> {
        fn go(rest: u32, parts: usize, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if parts == 0 {
                if rest == 0 {
                    out.push(prefix.clone());
                }
                return;
            }
            for x in (0..=cap.min(rest)).rev() {
                prefix.push(x);
                go(rest - x, parts - 1, x, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        go(total, parts, total, &mut Vec::new(), &mut out);
        out
    }

    #[cfg(test)]
    mod tests {
        #[test]
        fn partitions() {
            assert_eq!(super::partitions_desc(3, 2), vec![vec![3, 0], vec![2, 1]]);
            assert_eq!(super::partitions_desc(0, 3), vec![vec![0, 0, 0]]);
            assert_eq!(super::partitions_desc(4, 3).len(), 4);
        }
    }
}
