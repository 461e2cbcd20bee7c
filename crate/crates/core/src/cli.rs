//! Command-line front end for the `pg` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::chaser::{chase, check_chain_bounds};
use crate::cosets::{todd_coxeter, DEFAULT_MAX_COSETS};
use crate::error::{Error, Result};
use crate::gradient::{estimate_from_lattice, finite_p_gradient, finite_rank_gradient, DEFAULT_ORDER_BOUND};
use crate::lattice::{enumerate, LatticeConfig, DEFAULT_MAX_DEPTH, DEFAULT_NODE_BUDGET};
use crate::quotient::{certify, check_power_relator_bound, quotient_by_power, CheckStatus};
use crate::rational::Rational;
use crate::schreier::{dp, SchreierData};
use crate::verify::run_suite;
use crate::words::Presentation;

#[derive(Debug, Parser)]
#[command(name = "pg", version, about = "p-gradients of finitely presented groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Prime p.
    #[arg(short = 'p', long = "prime", global = true, default_value_t = 2)]
    pub p: u64,
    /// Lattice depth: subgroups of index up to p^depth.
    #[arg(short = 'k', long, global = true)]
    pub depth: Option<usize>,
    /// Coset limit for direct enumerations.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COSETS)]
    pub max_cosets: usize,
    /// Upper bound on lattice nodes.
    #[arg(long, global = true, env = "PG_NODE_BUDGET", default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: usize,
    /// Worker threads for lattice expansion; defaults to available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Plain text instead of JSON.
    #[arg(long, global = true)]
    pub human: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of the mod-p abelianization.
    Dp { input: PathBuf },
    /// Enumerate the lattice of normal subgroups of p-power index.
    Enum {
        input: PathBuf,
        /// Write `level ordinal key dp` lines to this file.
        #[arg(long)]
        dump_lattice: Option<PathBuf>,
    },
    /// Truncated p-gradient estimate.
    Gradient { input: PathBuf },
    /// Exact p-gradient of a finite group.
    Finite { input: PathBuf },
    /// Exact rank gradient of a finite group.
    RankGradient {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER_BOUND)]
        order_bound: usize,
    },
    /// Add the relator x^(p^e) and compare estimates against the certified bound.
    Quotient {
        input: PathBuf,
        #[arg(long)]
        word: String,
        /// Exponent e in x^(p^e).
        #[arg(short = 'e', long, default_value_t = 1)]
        exponent: u32,
    },
    /// Subgroup presentation of the subgroup generated by the given words.
    Schreier {
        input: PathBuf,
        #[arg(long = "subgroup", required = true)]
        subgroup: Vec<String>,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Budgeted descent from a free group towards a target value.
    Chase {
        #[arg(long)]
        alpha: Rational,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

const DEFAULT_DEPTH: usize = 3;

#[derive(Serialize)]
struct ExactValue {
    value: Rational,
    exact: bool,
}

impl Cli {
    fn config(&self) -> Result<LatticeConfig> {
        if self.node_budget == 0 {
            return Err(Error::InvalidArgument("--node-budget must be positive".into()));
        }
        if self.max_cosets == 0 {
            return Err(Error::InvalidArgument("--max-cosets must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("--threads must be positive".into()));
        }
        Ok(LatticeConfig {
            node_budget: self.node_budget,
            threads: self.threads,
        })
    }

    fn depth(&self) -> usize {
        self.depth.unwrap_or(DEFAULT_DEPTH)
    }
}

fn load(path: &Path) -> Result<Arc<Presentation>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    Ok(Arc::new(Presentation::parse(&text)?))
}

fn emit(out: &mut dyn Write, human: bool, value: &impl Serialize, text: impl FnOnce() -> String) -> Result<()> {
    let s = if human {
        text()
    } else {
        serde_json::to_string(value).expect("serializable")
    };
    writeln!(out, "{s}").map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))
}

/// Parses `args`, runs the command, and returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let config = cli.config()?;
    let p = crate::fp::check_prime(cli.p)?;
    let human = cli.human;
    match &cli.command {
        Command::Dp { input } => {
            let pres = load(input)?;
            let d = dp(&pres, p)?;
            emit(out, human, &json!({ "p": p, "dp": d }), || format!("d_{p} = {d}"))?;
        }
        Command::Enum { input, dump_lattice } => {
            let lattice = enumerate(load(input)?, p, cli.depth(), config)?;
            if let Some(path) = dump_lattice {
                std::fs::write(path, lattice.dump())
                    .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
            }
            let sizes = lattice.level_sizes();
            let v = json!({
                "p": p,
                "depth": lattice.depth,
                "levels": sizes,
                "nodes": lattice.n_nodes(),
                "saturated": lattice.saturated,
                "truncated": lattice.truncated,
            });
            emit(out, human, &v, || {
                format!(
                    "levels {:?}, {} nodes{}{}",
                    sizes,
                    lattice.n_nodes(),
                    if lattice.saturated { ", saturated" } else { "" },
                    if lattice.truncated { ", truncated" } else { "" }
                )
            })?;
        }
        Command::Gradient { input } => {
            let lattice = enumerate(load(input)?, p, cli.depth(), config)?;
            let r = estimate_from_lattice(&lattice).record();
            emit(out, human, &r, || {
                format!(
                    "estimate {} at depth {} (witness index {}){}{}",
                    r.value,
                    r.depth,
                    r.witness_index,
                    if r.exact { ", exact" } else { "" },
                    if r.truncated { ", truncated" } else { "" }
                )
            })?;
        }
        Command::Finite { input } => {
            let depth = cli.depth.unwrap_or(DEFAULT_MAX_DEPTH);
            let value = finite_p_gradient(load(input)?, p, depth, config)?;
            emit(
                out,
                human,
                &ExactValue {
                    value: value.clone(),
                    exact: true,
                },
                || format!("{value} (exact)"),
            )?;
        }
        Command::RankGradient { input, order_bound } => {
            let value = finite_rank_gradient(load(input)?, *order_bound)?;
            emit(
                out,
                human,
                &ExactValue {
                    value: value.clone(),
                    exact: true,
                },
                || format!("{value} (exact)"),
            )?;
        }
        Command::Quotient { input, word, exponent } => {
            let pres = load(input)?;
            let x = pres.parse_word(word)?;
            let e = (p as u64)
                .checked_pow(*exponent)
                .ok_or_else(|| Error::InvalidArgument("p^e overflows".into()))?;
            let depth = cli.depth();
            let q = Arc::new(quotient_by_power(&pres, &x, e)?);
            let est = estimate_from_lattice(&enumerate(q.clone(), p, depth, config)?).record();
            let cert = certify(pres.clone(), p, depth, config)?;
            let report = check_power_relator_bound(pres, &x, p, *exponent, depth, &cert, config)?;
            let v = json!({ "presentation": q.to_string(), "estimate": est, "check": report });
            emit(out, human, &v, || {
                format!(
                    "{q}estimate {} at depth {depth}\ncertified {} - 1/{e} = {}: {:?}",
                    est.value, cert.value, report.bound, report.status
                )
            })?;
            if report.status == CheckStatus::Fail {
                return Err(Error::Integrity(format!("estimate below bound {}", report.bound)));
            }
        }
        Command::Schreier { input, subgroup } => {
            let pres = load(input)?;
            let gens = subgroup
                .iter()
                .map(|w| pres.parse_word(w))
                .collect::<Result<Vec<_>>>()?;
            let table = todd_coxeter(pres, &gens, cli.max_cosets)?;
            let sd = SchreierData::new(&table);
            let sub = sd.subgroup_presentation();
            let d = sd.dp(p)?;
            let v = json!({
                "index": table.n_cosets(),
                "schreier_generators": sd.n_sgens(),
                "dp": d,
                "presentation": sub.to_string(),
            });
            emit(out, human, &v, || {
                format!(
                    "index {}, {} Schreier generators, d_{p} = {d}\n{}",
                    table.n_cosets(),
                    sd.n_sgens(),
                    sub
                )
                .trim_end()
                .to_string()
            })?;
        }
        Command::Verify { suite } => {
            let lines = run_suite(suite, config)?;
            let count = |s| lines.iter().filter(|l| l.status == s).count();
            let w = |out: &mut dyn Write, s: String| {
                writeln!(out, "{s}").map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))
            };
            for l in &lines {
                w(out, l.to_string())?;
            }
            let (pass, skip, fail) = (
                count(CheckStatus::Pass),
                count(CheckStatus::Skip),
                count(CheckStatus::Fail),
            );
            w(out, format!("summary: {pass} passed, {skip} skipped, {fail} failed"))?;
            if fail > 0 {
                return Ok(3);
            }
        }
        Command::Chase { alpha, steps, seed } => {
            let depth = cli.depth.unwrap_or(2);
            let t = chase(alpha, p, depth, *steps, *seed, config)?;
            let chain = check_chain_bounds(&t);
            let v = json!({ "trajectory": t, "chain": chain });
            emit(out, human, &v, || {
                let mut s = format!("{}\n", t.header);
                for (i, st) in t.ledger.steps.iter().enumerate() {
                    s += &format!(
                        "step {}: x = {}, k = {}, spent {}, lower {} <= estimate {}\n",
                        i + 1,
                        st.x,
                        st.k,
                        st.spent,
                        st.certified_lower,
                        st.estimate
                    );
                }
                s += &format!("{}\nstop: {}", t.last().to_string().trim_end(), t.stop_reason);
                s
            })?;
            if !chain.holds || !t.ledger.invariants_hold() {
                return Err(Error::Integrity("ledger invariants violated".into()));
            }
        }
    }
    Ok(0)
}
