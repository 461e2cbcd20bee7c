//! Budgeted descent from a free group towards a target `p`-gradient.
//!
//! Starting from `F` of rank `⌈α⌉ + 1`, each step adds a relator `x^(p^k)`
//! for a word `x` whose image in some finite `p`-quotient has order larger
//! than `p^k`. Each step lowers the exact `p`-gradient by at most `1/p^k`,
//! so the running lower bound `rank - 1 - spent` stays at least `α` while
//! the depth-truncated estimates, which are upper bounds, move down.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gradient::estimate;
use crate::lattice::{enumerate, LatticeConfig};
use crate::quotient::{order_witness, quotient_by_power};
use crate::rational::Rational;
use crate::words::{Presentation, Word};

/// Longest candidate word tried when looking for an order witness.
pub const MAX_WORD_LENGTH: usize = 4;
/// Largest `k` considered for a single step.
const MAX_K: u32 = 30;

const REPORT_HEADER: &str = "finite-depth replay: steps add p-power relators under an exact budget; \
the limit group and the residually-p replacement have no finite counterpart and are not computed";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerStep {
    pub x: String,
    pub k: u32,
    pub spent: Rational,
    pub certified_lower: Rational,
    pub estimate: Rational,
    pub witness_order: usize,
    pub witness_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BudgetLedger {
    pub alpha: Rational,
    pub initial: Rational,
    pub spent: Rational,
    pub steps: Vec<LedgerStep>,
}

impl BudgetLedger {
    /// `spent ≤ initial - α` and every step's lower bound is at most its
    /// estimate.
    pub fn invariants_hold(&self) -> bool {
        let cap = &self.initial - &self.alpha;
        self.spent <= cap
            && self
                .steps
                .iter()
                .all(|s| s.spent <= cap && s.certified_lower <= s.estimate)
    }

    pub fn certified_lower(&self) -> Rational {
        &self.initial - &self.spent
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub header: &'static str,
    pub p: u32,
    pub depth: usize,
    #[serde(serialize_with = "serialize_presentations")]
    pub presentations: Vec<Presentation>,
    /// Depth-`depth` estimate of each presentation.
    pub estimates: Vec<Rational>,
    pub ledger: BudgetLedger,
    pub stop_reason: String,
}

fn serialize_presentations<S: serde::Serializer>(ps: &[Presentation], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|p| p.to_string()))
}

impl Trajectory {
    pub fn last(&self) -> &Presentation {
        self.presentations.last().expect("nonempty")
    }
}

/// Freely reduced words of each length up to `max_len`, one of each
/// inverse pair (the lexicographically smaller letter sequence), shuffled
/// within each length by `rng`.
pub fn candidate_words(n_gens: usize, max_len: usize, rng: &mut ChaCha8Rng) -> Vec<Word> {
    let letters = 2 * n_gens as u32;
    let inverse_seq = |seq: &[u32]| -> Vec<u32> { seq.iter().rev().map(|&l| l ^ 1).collect() };
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 1..=max_len {
        let mut next = Vec::new();
        for seq in &layer {
            for l in 0..letters {
                if seq.last().is_some_and(|&last| last == l ^ 1) {
                    continue;
                }
                let mut s = seq.clone();
                s.push(l);
                next.push(s);
            }
        }
        let mut keep: Vec<&Vec<u32>> = next.iter().filter(|s| **s <= inverse_seq(s)).collect();
        keep.shuffle(rng);
        out.extend(
            keep.into_iter()
                .map(|s| Word::from_letters(s.iter().map(|&l| (l / 2, l % 2 == 1)))),
        );
        layer = next;
    }
    out
}

/// Runs at most `max_steps` steps towards `alpha` at prime `p`, with
/// estimates taken at `depth`.
pub fn chase(
    alpha: &Rational,
    p: u32,
    depth: usize,
    max_steps: usize,
    seed: u64,
    config: LatticeConfig,
) -> Result<Trajectory> {
    if !alpha.is_positive() {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    let ceil: usize = alpha
        .ceil()
        .try_into()
        .map_err(|_| Error::InvalidArgument("alpha too large".into()))?;
    let rank = ceil + 1;
    let initial = Rational::integer(ceil as i64);
    let cap = &initial - alpha;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = Presentation::free(rank);
    let first_estimate = estimate(Arc::new(first.clone()), p, depth, config)?.value;
    let mut traj = Trajectory {
        header: REPORT_HEADER,
        p,
        depth,
        presentations: vec![first],
        estimates: vec![first_estimate],
        ledger: BudgetLedger {
            alpha: alpha.clone(),
            initial,
            spent: Rational::zero(),
            steps: Vec::new(),
        },
        stop_reason: String::new(),
    };
    loop {
        if traj.ledger.steps.len() >= max_steps {
            traj.stop_reason = format!("step limit {max_steps} reached");
            break;
        }
        let remaining = &cap - &traj.ledger.spent;
        let Some(k) = (0..=MAX_K).find(|&k| Rational::inverse_power(p, k) <= remaining) else {
            traj.stop_reason = if remaining.is_zero() {
                "budget exhausted".into()
            } else {
                format!("remaining budget {remaining} below 1/{p}^{MAX_K}")
            };
            break;
        };
        let pk = (p as usize).pow(k);
        let current = Arc::new(traj.last().clone());
        let witness_depth = depth.max(k as usize + 1);
        let lattice = enumerate(current.clone(), p, witness_depth, config)?;
        let words = candidate_words(current.n_generators(), MAX_WORD_LENGTH, &mut rng);
        let found = words.into_iter().find_map(|x| {
            let (node, order) = order_witness(&lattice, &x)?;
            (order > pk).then(|| (x, node.index(), order))
        });
        let Some((x, witness_index, witness_order)) = found else {
            traj.stop_reason = format!(
                "no word of length at most {MAX_WORD_LENGTH} has order above {pk} within depth {witness_depth}"
            );
            break;
        };
        let next = quotient_by_power(&current, &x, pk as u64)?;
        let est = estimate(Arc::new(next.clone()), p, depth, config)?.value;
        let ledger = &mut traj.ledger;
        ledger.spent = &ledger.spent + &Rational::inverse_power(p, k);
        let certified_lower = ledger.certified_lower();
        if certified_lower > est || ledger.spent > cap {
            return Err(Error::Integrity(format!(
                "step {}: lower bound {certified_lower} exceeds estimate {est}",
                ledger.steps.len()
            )));
        }
        ledger.steps.push(LedgerStep {
            x: current.format_word(&x),
            k,
            spent: ledger.spent.clone(),
            certified_lower,
            estimate: est.clone(),
            witness_order,
            witness_index,
        });
        traj.presentations.push(next);
        traj.estimates.push(est);
    }
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitReport {
    pub holds: bool,
    pub checks: Vec<String>,
}

/// Checks along the chain `G_0 ↠ G_1 ↠ …`: lower bounds never increase,
/// each group's lower bound is at most its estimate, and no estimate falls
/// below the final lower bound.
pub fn check_chain_bounds(traj: &Trajectory) -> LimitReport {
    let ledger = &traj.ledger;
    let lowers: Vec<Rational> = std::iter::once(ledger.initial.clone())
        .chain(ledger.steps.iter().map(|s| s.certified_lower.clone()))
        .collect();
    let last_lower = lowers.last().expect("nonempty").clone();
    let mut holds = true;
    let mut checks = Vec::new();
    for (i, (lower, est)) in lowers.iter().zip(&traj.estimates).enumerate() {
        let ok = lower <= est && *est >= last_lower && (i == 0 || *lower <= lowers[i - 1]);
        holds &= ok;
        checks.push(format!(
            "{} G_{i}: lower {lower} <= estimate {est}",
            if ok { "ok" } else { "violated" }
        ));
    }
    LimitReport { holds, checks }
}
