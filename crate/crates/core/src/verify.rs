//! Verification suites. Each check yields one line
//! `PASS|SKIP|FAIL <check-id> <instance> <details>`.

use std::fmt;
use std::sync::Arc;

use crate::chaser::{chase, check_chain_bounds};
use crate::corpus::{self, Group};
use crate::cosets::CosetTable;
use crate::error::{Error, Result};
use crate::gradient::{estimate_from_lattice, finite_p_gradient, finite_rank_gradient, DEFAULT_ORDER_BOUND};
use crate::lattice::{enumerate, LatticeConfig, DEFAULT_MAX_DEPTH};
use crate::quotient::{
    certify, certify_free, check_power_relator_bound, quotient_by_power, subgroup_image_presentation, CheckStatus,
};
use crate::rational::Rational;
use crate::schreier::{dp, SchreierData};
use crate::words::Presentation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckLine {
    pub status: CheckStatus,
    pub id: &'static str,
    pub instance: String,
    pub details: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Skip => "SKIP",
            CheckStatus::Fail => "FAIL",
        };
        write!(f, "{status} {} {} {}", self.id, self.instance, self.details)
    }
}

fn line(ok: bool, id: &'static str, instance: impl Into<String>, details: impl Into<String>) -> CheckLine {
    CheckLine {
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        id,
        instance: instance.into(),
        details: details.into(),
    }
}

/// Runs `f`, turning an error into a failing line.
fn guarded(id: &'static str, instance: String, f: impl FnOnce() -> Result<CheckLine>) -> CheckLine {
    f().unwrap_or_else(|e| line(false, id, instance, format!("error: {e}")))
}

pub const SUITES: &[&str] = &[
    "free-exactness",
    "schreier",
    "finite-p-gradient",
    "finite-rank-gradient",
    "multiplicativity",
    "power-quotient",
    "torsion-relator",
    "chaser",
];

pub fn run_suite(name: &str, config: LatticeConfig) -> Result<Vec<CheckLine>> {
    match name {
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, config)?);
            }
            Ok(out)
        }
        "free-exactness" => Ok(free_exactness(config)),
        "schreier" => Ok(schreier(config)),
        "finite-p-gradient" => Ok(finite_p(config)),
        "finite-rank-gradient" => Ok(finite_rank()),
        "multiplicativity" => Ok(multiplicativity(config)),
        "power-quotient" => Ok(power_quotient(config)),
        "torsion-relator" => Ok(torsion_relator(config)),
        "chaser" => Ok(chaser(config)),
        other => Err(Error::InvalidArgument(format!(
            "unknown suite `{other}`; expected all or one of {}",
            SUITES.join(", ")
        ))),
    }
}

fn group(name: &str) -> &'static Group {
    corpus::get(name).expect("corpus group")
}

/// Every node of a free group satisfies `d_p(H) - 1 = (d_p(G) - 1)[G:H]`,
/// and the estimate is `rank - 1` at each depth.
fn free_exactness(config: LatticeConfig) -> Vec<CheckLine> {
    const ID: &str = "free-exactness";
    let mut out = Vec::new();
    for name in ["f2", "f3"] {
        for p in [2, 3] {
            let instance = format!("{name}/p={p}/depth=3");
            out.push(guarded(ID, instance.clone(), || {
                let pres = group(name).presentation();
                let rank = pres.n_generators() as i64;
                let lattice = enumerate(pres, p, 3, config)?;
                let bad = lattice
                    .nodes()
                    .filter(|n| n.dp as i64 - 1 != (rank - 1) * n.index() as i64)
                    .count();
                let est = estimate_from_lattice(&lattice);
                let ok = bad == 0 && est.value == Rational::integer(rank - 1) && !lattice.truncated;
                let sizes: Vec<String> = lattice.level_sizes().iter().map(usize::to_string).collect();
                Ok(line(
                    ok,
                    ID,
                    instance,
                    format!("levels=[{}] violations={bad} estimate={}", sizes.join(","), est.value),
                ))
            }));
        }
    }
    out
}

/// Schreier generator count, and `d_p` of each node computed from the
/// subgroup presentation, the relator matrix, and the action data.
fn schreier(config: LatticeConfig) -> Vec<CheckLine> {
    const ID: &str = "schreier";
    let mut out = Vec::new();
    let cases = [
        ("f2", 2, 2),
        ("a2", 2, 2),
        ("f2xz2", 2, 2),
        ("bs12", 2, 3),
        ("s4", 2, 3),
        ("q8", 2, 3),
        ("z3xz3", 3, 2),
    ];
    for (name, p, depth) in cases {
        let instance = format!("{name}/p={p}/depth={depth}");
        out.push(guarded(ID, instance.clone(), || {
            let pres = group(name).presentation();
            let r = pres.n_generators();
            let lattice = enumerate(pres, p, depth, config)?;
            let mut bad = 0;
            for node in lattice.nodes() {
                let sd = SchreierData::new(&node.table);
                let n = node.index();
                let via_pres = dp(&sd.subgroup_presentation(), p)?;
                let data = sd.mod_p_data(p)?;
                if sd.n_sgens() != n * r - (n - 1) || via_pres != node.dp || data.dim != node.dp {
                    bad += 1;
                }
            }
            Ok(line(
                bad == 0,
                ID,
                instance,
                format!("nodes={} violations={bad}", lattice.n_nodes()),
            ))
        }));
    }
    out
}

/// `-1/|G_p|` for cyclic groups, flagged exact.
fn finite_p(config: LatticeConfig) -> Vec<CheckLine> {
    const ID: &str = "finite-p-gradient";
    [
        ("z4", 2, Rational::new(-1, 4)),
        ("z6", 2, Rational::new(-1, 2)),
        ("z3", 2, Rational::integer(-1)),
        ("z8", 2, Rational::new(-1, 8)),
    ]
    .into_iter()
    .map(|(name, p, expected)| {
        let instance = format!("{name}/p={p}");
        guarded(ID, instance.clone(), || {
            let pres = group(name).presentation();
            let value = finite_p_gradient(pres.clone(), p, DEFAULT_MAX_DEPTH, config)?;
            let est = estimate_from_lattice(&enumerate(pres, p, DEFAULT_MAX_DEPTH, config)?);
            let ok = value == expected && est.exact && est.value == value;
            Ok(line(
                ok,
                ID,
                instance,
                format!("value={value} expected={expected} exact={}", est.exact),
            ))
        })
    })
    .collect()
}

/// Minimum over all subgroups of `(d(H) - 1)/[G:H]` equals `-1/|G|`.
fn finite_rank() -> Vec<CheckLine> {
    const ID: &str = "finite-rank-gradient";
    corpus::FINITE
        .iter()
        .map(|g| {
            let instance = g.name.to_string();
            guarded(ID, instance.clone(), || {
                let order = g.order.expect("finite") as i64;
                let value = finite_rank_gradient(g.presentation(), DEFAULT_ORDER_BOUND)?;
                let expected = Rational::new(-1, order);
                Ok(line(
                    value == expected,
                    ID,
                    instance,
                    format!("value={value} order={order}"),
                ))
            })
        })
        .collect()
}

/// For finite `G` and every node `H`: the exact `p`-gradient of `G` equals
/// that of `H` divided by `[G:H]`.
fn multiplicativity(config: LatticeConfig) -> Vec<CheckLine> {
    const ID: &str = "multiplicativity";
    let mut out = Vec::new();
    for g in corpus::FINITE {
        for p in [2, 3] {
            let instance = format!("{}/p={p}", g.name);
            out.push(guarded(ID, instance.clone(), || {
                let pres = g.presentation();
                let value = finite_p_gradient(pres.clone(), p, DEFAULT_MAX_DEPTH, config)?;
                let lattice = enumerate(pres, p, DEFAULT_MAX_DEPTH, config)?;
                let mut bad = 0;
                for node in lattice.nodes() {
                    let h = Arc::new(SchreierData::new(&node.table).subgroup_presentation());
                    let inner = finite_p_gradient(h, p, DEFAULT_MAX_DEPTH, config)?;
                    if &inner / &Rational::integer(node.index() as i64) != value {
                        bad += 1;
                    }
                }
                Ok(line(
                    bad == 0,
                    ID,
                    instance,
                    format!("value={value} nodes={} violations={bad}", lattice.n_nodes()),
                ))
            }));
        }
    }
    out
}

/// Words used as `x` in the power-quotient checks.
pub const POWER_QUOTIENT_WORDS: &[&str] = &["a", "b", "a b", "a b^-1", "a^2 b", "a b a", "[a,b]"];

/// For every node `H` and word `x`: `|T|·m = [G:H]`, the `d_p` drop is at
/// most `[G:H]/m`, and `d_p(π(H))` agrees with the quotient's own table.
fn power_quotient(config: LatticeConfig) -> Vec<CheckLine> {
    const ID: &str = "power-quotient";
    let mut out = Vec::new();
    for name in ["f2", "a2"] {
        let p = 2;
        let depth = 2;
        for text in POWER_QUOTIENT_WORDS {
            let instance = format!("{name}/p={p}/depth={depth}/x={}", text.replace(' ', ""));
            out.push(guarded(ID, instance.clone(), || {
                let pres = group(name).presentation();
                let x = pres.parse_word(text)?;
                let lattice = enumerate(pres.clone(), p, depth, config)?;
                let mut bad = Vec::new();
                for (i, node) in lattice.nodes().enumerate() {
                    let (pi, r) = subgroup_image_presentation(&node.table, &x, p)?;
                    let quotient = Arc::new(quotient_by_power(&pres, &x, r.m as u64)?);
                    let same_action = image_table(&node.table, quotient)?;
                    let consistent = dp(&pi, p)? == SchreierData::new(&same_action).dp(p)?;
                    if !(r.transversal_count_holds() && r.dp_bound_holds() && r.q_bound_holds() && consistent) {
                        bad.push(i.to_string());
                    }
                }
                Ok(line(
                    bad.is_empty(),
                    ID,
                    instance,
                    format!("pairs={} violations=[{}]", lattice.n_nodes(), bad.join(",")),
                ))
            }));
        }
    }
    out
}

/// The table of `H` read as a table over the quotient presentation.
fn image_table(table: &CosetTable, quotient: Arc<Presentation>) -> Result<CosetTable> {
    let perms: Vec<Vec<u32>> = (0..table.n_generators() as u32)
        .map(|g| (0..table.n_cosets() as u32).map(|c| table.act(c, g, false)).collect())
        .collect();
    CosetTable::from_permutations(quotient, &perms, 0)
}

/// Adding `x^(p^k)` lowers an exact `p`-gradient by at most `1/p^k`.
fn torsion_relator(config: LatticeConfig) -> Vec<CheckLine> {
    const ID: &str = "torsion-relator";
    let mut out = Vec::new();
    let cases: [(&str, &str, u32, &[usize]); 5] = [
        ("f2", "a", 1, &[1, 2, 3]),
        ("f3", "a", 2, &[1, 2, 3]),
        ("f2", "a", 0, &[0]),
        ("f2", "a b", 1, &[2]),
        ("a2", "b", 1, &[2]),
    ];
    for (name, text, k, depths) in cases {
        for &depth in depths {
            let p = 2;
            let instance = format!("{name}/x={}/p={p}/k={k}/depth={depth}", text.replace(' ', ""));
            out.push(guarded(ID, instance.clone(), || {
                let pres = group(name).presentation();
                let x = pres.parse_word(text)?;
                let cert = match certify_free(&pres) {
                    Ok(c) => c,
                    Err(_) => certify(pres.clone(), p, 1, config)?,
                };
                let r = check_power_relator_bound(pres, &x, p, k, depth, &cert, config)?;
                let details = match &r.estimate {
                    Some(est) => format!(
                        "certified={} bound={} estimate={est} gap={}",
                        cert.value,
                        r.bound,
                        r.gap.clone().expect("set with estimate")
                    ),
                    None => format!(
                        "certified={} bound={} {}",
                        cert.value,
                        r.bound,
                        r.reason.clone().unwrap_or_default()
                    ),
                };
                Ok(CheckLine {
                    status: r.status,
                    id: ID,
                    instance,
                    details,
                })
            }));
        }
    }
    out
}

/// Ledger invariants of chaser runs.
fn chaser(config: LatticeConfig) -> Vec<CheckLine> {
    const ID: &str = "chaser";
    [
        (Rational::new(3, 4), 2usize),
        (Rational::new(1, 2), 2),
        (Rational::integer(1), 2),
    ]
    .into_iter()
    .map(|(alpha, depth)| {
        let instance = format!("alpha={alpha}/p=2/depth={depth}");
        guarded(ID, instance.clone(), || {
            let t = chase(&alpha, 2, depth, 10, 0, config)?;
            let limit = check_chain_bounds(&t);
            let last_est = t.estimates.last().expect("nonempty");
            let ok = t.ledger.invariants_hold() && limit.holds && t.ledger.certified_lower() >= alpha;
            Ok(line(
                ok,
                ID,
                instance,
                format!(
                    "steps={} spent={} certified_lower={} estimate={last_est}",
                    t.ledger.steps.len(),
                    t.ledger.spent,
                    t.ledger.certified_lower()
                ),
            ))
        })
    })
    .collect()
}
