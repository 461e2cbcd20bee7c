//! Breadth-first enumeration of the normal subgroups of `p`-power index.
//!
//! Every such subgroup sits at the bottom of a chain `G = H_0 > H_1 > …`
//! of normal subgroups with successive indices `p`, so level `k+1` is
//! obtained from level `k` by cutting each node along the `G`-invariant
//! hyperplanes of its mod-`p` abelianization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::cosets::{CosetTable, StandardizedKey};
use crate::error::{Error, Result};
use crate::fp::{check_prime, count_invariant_hyperplanes, invariant_hyperplanes};
use crate::schreier::{ModPAbelianization, SchreierData};
use crate::words::Presentation;

pub const DEFAULT_NODE_BUDGET: usize = 50_000;
pub const DEFAULT_MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeConfig {
    /// Upper bound on the total number of nodes kept.
    pub node_budget: usize,
    /// Worker threads for level expansion; `None` uses rayon's default.
    pub threads: Option<usize>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            node_budget: DEFAULT_NODE_BUDGET,
            threads: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LatticeNode {
    pub table: CosetTable,
    pub level: usize,
    pub dp: usize,
    pub parent_keys: BTreeSet<StandardizedKey>,
}

impl LatticeNode {
    pub fn key(&self) -> &StandardizedKey {
        self.table.key()
    }

    /// `[G:H]`.
    pub fn index(&self) -> usize {
        self.table.n_cosets()
    }
}

#[derive(Debug, Clone)]
pub struct Lattice {
    pub p: u32,
    pub depth: usize,
    /// Nonempty levels in order, each sorted by key.
    pub levels: Vec<Vec<LatticeNode>>,
    /// Some level at or below `depth + 1` has no nodes: the lattice is
    /// complete.
    pub saturated: bool,
    /// The node budget cut the enumeration short.
    pub truncated: bool,
}

impl Lattice {
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &LatticeNode> {
        self.levels.iter().flatten()
    }

    pub fn n_nodes(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn root(&self) -> &LatticeNode {
        &self.levels[0][0]
    }

    pub fn find(&self, key: &StandardizedKey) -> Option<&LatticeNode> {
        self.nodes().find(|n| n.key() == key)
    }

    /// One line per node: `level ordinal key-hash dp`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (level, nodes) in self.levels.iter().enumerate() {
            for (i, n) in nodes.iter().enumerate() {
                let _ = writeln!(s, "{level} {i} {} {}", n.key().hex(), n.dp);
            }
        }
        s
    }
}

/// Tables of the index-`p` subgroups of `table`'s subgroup that are normal
/// in `G`, one per invariant hyperplane, sorted by key.
pub fn children(table: &CosetTable, p: u32) -> Result<Vec<CosetTable>> {
    let sd = SchreierData::new(table);
    let data = sd.mod_p_data(p)?;
    children_with(&sd, &data)
}

fn children_with(sd: &SchreierData<'_>, data: &ModPAbelianization) -> Result<Vec<CosetTable>> {
    let mut out = invariant_hyperplanes(data.dim, data.p, &data.action)?
        .iter()
        .map(|lambda| sd.descend(data, lambda))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.key().cmp(b.key()));
    Ok(out)
}

fn dp_of(table: &CosetTable, p: u32) -> Result<usize> {
    SchreierData::new(table).dp(p)
}

fn run_in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// All normal subgroups of index `p^k`, `k ≤ depth`, deduplicated by key.
pub fn enumerate(pres: Arc<Presentation>, p: u32, depth: usize, config: LatticeConfig) -> Result<Lattice> {
    let p = check_prime(p as u64)?;
    if config.node_budget == 0 {
        return Err(Error::InvalidArgument("node budget must be positive".into()));
    }
    run_in_pool(config.threads, || enumerate_inner(pres, p, depth, config.node_budget))?
}

fn enumerate_inner(pres: Arc<Presentation>, p: u32, depth: usize, budget: usize) -> Result<Lattice> {
    let root_table = CosetTable::whole_group(pres);
    let root = LatticeNode {
        dp: dp_of(&root_table, p)?,
        table: root_table,
        level: 0,
        parent_keys: BTreeSet::new(),
    };
    let mut lattice = Lattice {
        p,
        depth,
        levels: vec![vec![root]],
        saturated: false,
        truncated: false,
    };
    let mut total = 1usize;
    for level in 1..=depth {
        let parents = lattice.levels.last().expect("nonempty");
        if parents.iter().all(|n| n.dp == 0) {
            lattice.saturated = true;
            return Ok(lattice);
        }
        let remaining = budget - total;
        let data = parents
            .par_iter()
            .map(|n| SchreierData::new(&n.table).mod_p_data(p))
            .collect::<Result<Vec<_>>>()?;
        // children of a single parent are distinct subgroups
        for d in &data {
            let count = count_invariant_hyperplanes(d.dim, p, &d.action)?;
            if count.is_none_or(|c| c > remaining as u64) {
                lattice.truncated = true;
                return Ok(lattice);
            }
        }
        let expanded: Vec<(StandardizedKey, Vec<CosetTable>)> = parents
            .par_iter()
            .zip(&data)
            .map(|(n, d)| Ok((n.key().clone(), children_with(&SchreierData::new(&n.table), d)?)))
            .collect::<Result<_>>()?;
        let mut merged: BTreeMap<StandardizedKey, (CosetTable, BTreeSet<StandardizedKey>)> = BTreeMap::new();
        for (parent, kids) in expanded {
            for t in kids {
                merged
                    .entry(t.key().clone())
                    .or_insert_with(|| (t, BTreeSet::new()))
                    .1
                    .insert(parent.clone());
            }
        }
        let mut entries: Vec<(CosetTable, BTreeSet<StandardizedKey>)> = merged.into_values().collect();
        if entries.len() > remaining {
            entries.truncate(remaining);
            lattice.truncated = true;
        }
        let nodes = entries
            .into_par_iter()
            .map(|(table, parent_keys)| {
                Ok(LatticeNode {
                    dp: dp_of(&table, p)?,
                    table,
                    level,
                    parent_keys,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        total += nodes.len();
        lattice.levels.push(nodes);
        if lattice.truncated {
            return Ok(lattice);
        }
    }
    // a nonzero mod-p abelianization always has an invariant hyperplane,
    // so level depth+1 is empty exactly when every frontier dp vanishes
    lattice.saturated = lattice.levels.last().expect("nonempty").iter().all(|n| n.dp == 0);
    Ok(lattice)
}
