//! Truncated `p`-gradient estimates and exact values for finite groups.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::cosets::{todd_coxeter, CosetTable, StandardizedKey};
use crate::error::{Error, Result};
use crate::fp::{invariant_hyperplanes, Functional};
use crate::lattice::{enumerate, Lattice, LatticeConfig};
use crate::rational::Rational;
use crate::schreier::{dp, SchreierData};
use crate::words::Presentation;

/// Default bound on `|G|` for [`finite_rank_gradient`].
pub const DEFAULT_ORDER_BOUND: usize = 200;

/// Minimum of `(d_p(H) - 1)/[G:H]` over an enumerated lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientEstimate {
    pub value: Rational,
    pub p: u32,
    pub witness: StandardizedKey,
    pub witness_level: usize,
    pub depth: usize,
    /// The lattice saturated, so the value is the exact `p`-gradient.
    pub exact: bool,
    pub truncated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientRecord {
    pub value: Rational,
    pub depth: usize,
    pub exact: bool,
    pub truncated: bool,
    pub witness_index: String,
    pub witness_key_hash: String,
}

impl GradientEstimate {
    pub fn record(&self) -> GradientRecord {
        GradientRecord {
            value: self.value.clone(),
            depth: self.depth,
            exact: self.exact,
            truncated: self.truncated,
            witness_index: format!("{}^{}", self.p, self.witness_level),
            witness_key_hash: self.witness.hex(),
        }
    }
}

fn quotient_value(dp: usize, index: usize) -> Rational {
    Rational::new(dp as i64 - 1, index as i64)
}

/// Reads the estimate off a built lattice. Nodes are visited by level and
/// then key, so the first minimum has the smallest index and key.
pub fn estimate_from_lattice(lattice: &Lattice) -> GradientEstimate {
    let mut best: Option<(Rational, &crate::lattice::LatticeNode)> = None;
    for node in lattice.nodes() {
        let q = quotient_value(node.dp, node.index());
        if best.as_ref().is_none_or(|(b, _)| q < *b) {
            best = Some((q, node));
        }
    }
    let (value, node) = best.expect("lattice has a root");
    GradientEstimate {
        value,
        p: lattice.p,
        witness: node.key().clone(),
        witness_level: node.level,
        depth: lattice.depth,
        exact: lattice.saturated,
        truncated: lattice.truncated,
    }
}

pub fn estimate(pres: Arc<Presentation>, p: u32, depth: usize, config: LatticeConfig) -> Result<GradientEstimate> {
    Ok(estimate_from_lattice(&enumerate(pres, p, depth, config)?))
}

/// One step of a descending chain of normal subgroups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainStep {
    /// Cut the current subgroup along this functional on its `V`.
    Functional(Functional),
    /// Cut along the least invariant functional of the current `V`.
    FirstInvariant,
}

/// Tables of `G = H_0 > H_1 > …` obtained by following `path`.
pub fn descend_chain(pres: Arc<Presentation>, p: u32, path: &[ChainStep]) -> Result<Vec<CosetTable>> {
    let mut chain = vec![CosetTable::whole_group(pres)];
    for (step, s) in path.iter().enumerate() {
        let current = chain.last().expect("nonempty");
        let sd = SchreierData::new(current);
        let data = sd.mod_p_data(p)?;
        let lambda = match s {
            ChainStep::Functional(l) => {
                if l.p() != data.p || l.dim() != data.dim {
                    return Err(Error::DimensionMismatch(format!(
                        "step {step}: functional of length {} on a space of dimension {}",
                        l.dim(),
                        data.dim
                    )));
                }
                if !data.action.iter().all(|a| l.kernel_stable_under(a)) {
                    return Err(Error::NonInvariantFunctional { step });
                }
                l.clone()
            }
            ChainStep::FirstInvariant => invariant_hyperplanes(data.dim, data.p, &data.action)?
                .into_iter()
                .next()
                .ok_or_else(|| Error::InvalidArgument(format!("step {step}: no index-p subgroup below")))?,
        };
        let next = sd.descend(&data, &lambda)?;
        chain.push(next);
    }
    Ok(chain)
}

/// Minimum of `(d_p(H_i) - 1)/[G:H_i]` along the chain starting at `G`.
pub fn relative_estimate(pres: Arc<Presentation>, p: u32, path: &[ChainStep]) -> Result<Rational> {
    let chain = descend_chain(pres, p, path)?;
    chain
        .iter()
        .map(|t| Ok(quotient_value(SchreierData::new(t).dp(p)?, t.n_cosets())))
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().min().expect("nonempty chain"))
}

/// The same minimum over lattice nodes given by key.
pub fn relative_estimate_nodes(lattice: &Lattice, keys: &[StandardizedKey]) -> Result<Rational> {
    let mut best = quotient_value(lattice.root().dp, 1);
    for k in keys {
        let node = lattice
            .find(k)
            .ok_or_else(|| Error::InvalidArgument(format!("no lattice node with key {}", k.hex())))?;
        best = best.min(quotient_value(node.dp, node.index()));
    }
    Ok(best)
}

/// Exact `p`-gradient of a group whose `p`-quotient tower is finite:
/// `-1/|G_p|`, read off the unique deepest lattice node.
///
/// Presentations with at most `d_p²/4` relators are rejected up front: a
/// nontrivial finite `p`-group needs more than `d²/4` relations
/// (Golod–Shafarevich).
pub fn finite_p_gradient(pres: Arc<Presentation>, p: u32, max_depth: usize, config: LatticeConfig) -> Result<Rational> {
    let d = dp(&pres, p)?;
    let r = pres.normalized().0.relators().len();
    if d > 0 && 4 * r <= d * d {
        return Err(Error::CannotCertify(format!(
            "p-quotient tower is infinite: {r} relators with d_{p} = {d}"
        )));
    }
    let lattice = enumerate(pres, p, max_depth, config)?;
    if !lattice.saturated {
        let why = if lattice.truncated {
            "node budget exhausted"
        } else {
            "depth limit reached"
        };
        return Err(Error::CannotCertify(format!(
            "lattice not saturated within depth {max_depth}: {why}"
        )));
    }
    let bottom = lattice.levels.last().expect("nonempty");
    if bottom.len() != 1 {
        return Err(Error::Integrity(format!(
            "{} minimal nodes in a saturated lattice",
            bottom.len()
        )));
    }
    let value = Rational::new(-1, bottom[0].index() as i64);
    let est = estimate_from_lattice(&lattice);
    if est.value != value || !est.exact {
        return Err(Error::Integrity(format!(
            "saturated estimate {} differs from {value}",
            est.value
        )));
    }
    Ok(value)
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Multiplication table of a finite group given by its regular coset
/// table: element `i` is the coset of `rep(i)`.
pub struct FiniteGroup {
    n: usize,
    mult: Vec<u32>,
}

impl FiniteGroup {
    pub fn from_regular_table(t: &CosetTable) -> Self {
        let n = t.n_cosets();
        let mut mult = vec![0u32; n * n];
        // i·j follows j's tree path from i
        for j in 0..n as u32 {
            for i in 0..n as u32 {
                mult[i as usize * n + j as usize] = match t.tree_edge(j) {
                    None => i,
                    Some((parent, col)) => t.image(mult[i as usize * n + parent as usize], col),
                };
            }
        }
        FiniteGroup { n, mult }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mult[a as usize * self.n + b as usize]
    }

    fn closure(&self, gens: &[u32]) -> Bits {
        let mut set = Bits::new(self.n);
        set.set(0);
        let mut queue = vec![0u32];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !set.get(y as usize) {
                    set.set(y as usize);
                    queue.push(y);
                }
            }
        }
        set
    }

    /// Every subgroup, as element bitsets, in discovery order.
    fn subgroups(&self) -> Vec<(Bits, Vec<u32>)> {
        let trivial = self.closure(&[]);
        let mut seen: HashSet<Bits> = HashSet::from([trivial.clone()]);
        let mut out = vec![(trivial, Vec::new())];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in 0..self.n as u32 {
                if out[i].0.get(g as usize) {
                    continue;
                }
                let mut gens = out[i].1.clone();
                gens.push(g);
                let s = self.closure(&gens);
                if seen.insert(s.clone()) {
                    out.push((s, gens));
                    queue.push_back(out.len() - 1);
                }
            }
        }
        out
    }

    /// Least `d ≤ 3` such that `d` elements generate the subgroup.
    fn min_generators(&self, sub: &Bits) -> Result<usize> {
        let size = sub.count();
        if size == 1 {
            return Ok(0);
        }
        let elems: Vec<u32> = (0..self.n as u32).filter(|&x| sub.get(x as usize)).collect();
        let generates = |gens: &[u32]| self.closure(gens).count() == size;
        if elems.iter().any(|&x| generates(&[x])) {
            return Ok(1);
        }
        for (i, &x) in elems.iter().enumerate() {
            for &y in &elems[i + 1..] {
                if generates(&[x, y]) {
                    return Ok(2);
                }
            }
        }
        for (i, &x) in elems.iter().enumerate() {
            for (j, &y) in elems.iter().enumerate().skip(i + 1) {
                for &z in &elems[j + 1..] {
                    if generates(&[x, y, z]) {
                        return Ok(3);
                    }
                }
            }
        }
        Err(Error::GeneratorSearchExhausted(format!(
            "subgroup of order {size} needs more than 3 generators"
        )))
    }
}

/// Minimum of `(d(H) - 1)/[G:H]` over all subgroups of a finite group.
pub fn finite_rank_gradient(pres: Arc<Presentation>, order_bound: usize) -> Result<Rational> {
    let max_cosets = (order_bound.saturating_mul(64)).max(1 << 16);
    let t = todd_coxeter(pres, &[], max_cosets)?;
    if t.n_cosets() > order_bound {
        return Err(Error::GroupTooLarge(format!(
            "order {} exceeds bound {order_bound}",
            t.n_cosets()
        )));
    }
    let g = FiniteGroup::from_regular_table(&t);
    let mut best: Option<Rational> = None;
    for (sub, _) in g.subgroups() {
        let d = g.min_generators(&sub)?;
        let q = Rational::new(d as i64 - 1, (g.order() / sub.count()) as i64);
        if best.as_ref().is_none_or(|b| q < *b) {
            best = Some(q);
        }
    }
    Ok(best.expect("trivial subgroup always present"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosets::DEFAULT_MAX_COSETS;

    fn pres(text: &str) -> Arc<Presentation> {
        Arc::new(Presentation::parse(text).unwrap())
    }

    fn est(text: &str, p: u32, depth: usize) -> GradientEstimate {
        estimate(pres(text), p, depth, LatticeConfig::default()).unwrap()
    }

    #[test]
    fn estimate_examples() {
        let f2 = Arc::new(Presentation::free(2));
        for depth in 0..=3 {
            let e = estimate(f2.clone(), 2, depth, LatticeConfig::default()).unwrap();
            assert_eq!(e.value, Rational::integer(1));
            assert_eq!(e.witness_level, 0);
            assert!(!e.exact);
        }
        for depth in 2..=4 {
            let e = est("gens: a\nrel: a^4", 2, depth);
            assert_eq!(e.value, Rational::new(-1, 4));
            assert!(e.exact);
        }
        for depth in 1..=3 {
            assert_eq!(est("gens: a b\nrel: a^2", 2, depth).value, Rational::new(1, 2));
            assert_eq!(
                est("gens: x y z\nrel: z^2\nrel: [x,z]\nrel: [y,z]", 2, depth).value,
                Rational::new(1, 2)
            );
        }
        assert_eq!(est("gens: a b\nrel: a^2", 2, 0).value, Rational::integer(1));
    }

    #[test]
    fn estimate_is_monotone_in_depth() {
        for text in [
            "gens: a b\nrel: a^4",
            "gens: a b\nrel: [a,b]\nrel: a^8",
            "gens: a b\nrel: a^2 b^2",
        ] {
            let values: Vec<Rational> = (0..=3).map(|k| est(text, 2, k).value).collect();
            assert!(values.windows(2).all(|w| w[1] <= w[0]), "{text}: {values:?}");
        }
    }

    #[test]
    fn record_json() {
        let e = est("gens: a b", 2, 3);
        let json = serde_json::to_string(&e.record()).unwrap();
        assert!(json.starts_with(r#"{"value":"1/1","depth":3,"exact":false,"truncated":false,"witness_index":"2^0""#));
    }

    #[test]
    fn relative_estimate_examples() {
        let f2 = Arc::new(Presentation::free(2));
        assert_eq!(relative_estimate(f2.clone(), 2, &[]).unwrap(), Rational::integer(1));
        let first = Functional::new(2, vec![1, 0]).unwrap();
        let path = [
            ChainStep::Functional(first),
            ChainStep::FirstInvariant,
            ChainStep::FirstInvariant,
        ];
        let chain = descend_chain(f2.clone(), 2, &path).unwrap();
        assert_eq!(
            chain.iter().map(CosetTable::n_cosets).collect::<Vec<_>>(),
            vec![1, 2, 4, 8]
        );
        for t in &chain {
            let dp = SchreierData::new(t).dp(2).unwrap();
            assert_eq!(Rational::new(dp as i64 - 1, t.n_cosets() as i64), Rational::integer(1));
        }
        assert_eq!(relative_estimate(f2, 2, &path).unwrap(), Rational::integer(1));

        let g = pres("gens: a b\nrel: a^4");
        let path = vec![ChainStep::FirstInvariant; 3];
        let rel = relative_estimate(g.clone(), 2, &path).unwrap();
        assert!(rel >= estimate(g, 2, 3, LatticeConfig::default()).unwrap().value);
    }

    #[test]
    fn non_invariant_functional_is_rejected() {
        // V of ker(a -> 1, b -> 0) in F2 has dimension 3 and conjugation by a
        // moves some hyperplanes
        let f2 = Arc::new(Presentation::free(2));
        let root = CosetTable::whole_group(f2.clone());
        let sd = SchreierData::new(&root);
        let d = sd.mod_p_data(2).unwrap();
        let h = sd.descend(&d, &Functional::new(2, vec![1, 0]).unwrap()).unwrap();
        let hd = SchreierData::new(&h).mod_p_data(2).unwrap();
        let all = crate::fp::hyperplanes(3, 2);
        let bad = all
            .into_iter()
            .find(|l| !hd.action.iter().all(|a| l.kernel_stable_under(a)))
            .expect("some hyperplane is not invariant");
        let path = [
            ChainStep::Functional(Functional::new(2, vec![1, 0]).unwrap()),
            ChainStep::Functional(bad),
        ];
        assert_eq!(
            relative_estimate(f2, 2, &path),
            Err(Error::NonInvariantFunctional { step: 1 })
        );
    }

    #[test]
    fn finite_p_gradient_examples() {
        let run = |text: &str, p| finite_p_gradient(pres(text), p, 8, LatticeConfig::default());
        assert_eq!(run("gens: a\nrel: a^4", 2).unwrap(), Rational::new(-1, 4));
        assert_eq!(run("gens: a\nrel: a^6", 2).unwrap(), Rational::new(-1, 2));
        assert_eq!(run("gens: a\nrel: a^3", 2).unwrap(), Rational::integer(-1));
        assert!(matches!(run("gens: a", 2), Err(Error::CannotCertify(_))));
        assert!(matches!(run("gens: a b", 2), Err(Error::CannotCertify(_))));
        assert_eq!(
            run("gens: a b\nrel: a^2\nrel: b^2\nrel: [a,b]", 2).unwrap(),
            Rational::new(-1, 4)
        );
        // Z/2 x Z passes the relator count test but never saturates
        let z2xz = finite_p_gradient(pres("gens: a b\nrel: a^2\nrel: [a,b]"), 2, 4, LatticeConfig::default());
        assert!(matches!(z2xz, Err(Error::CannotCertify(_))));
    }

    /// Group order by enumeration, as an independent check of -1/|G|.
    fn order(text: &str) -> usize {
        todd_coxeter(pres(text), &[], DEFAULT_MAX_COSETS).unwrap().n_cosets()
    }

    #[test]
    fn finite_rank_gradient_examples() {
        for (text, n) in [
            ("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^2", 6),
            ("gens: a\nrel: a^4", 4),
            ("gens: a\nrel: a", 1),
            ("gens: a b\nrel: a^2\nrel: b^2\nrel: [a,b]", 4),
        ] {
            assert_eq!(order(text), n);
            assert_eq!(
                finite_rank_gradient(pres(text), DEFAULT_ORDER_BOUND).unwrap(),
                Rational::new(-1, n as i64)
            );
        }
        assert!(matches!(
            finite_rank_gradient(pres("gens: a\nrel: a^300"), DEFAULT_ORDER_BOUND),
            Err(Error::GroupTooLarge(_))
        ));
        // (Z/2)^4 has a subgroup needing four generators
        let e16 = "gens: a b c d\nrel: a^2\nrel: b^2\nrel: c^2\nrel: d^2\nrel: [a,b]\nrel: [a,c]\nrel: [a,d]\nrel: [b,c]\nrel: [b,d]\nrel: [c,d]";
        assert!(matches!(
            finite_rank_gradient(pres(e16), 200),
            Err(Error::GeneratorSearchExhausted(_))
        ));
    }

    #[test]
    fn subgroup_counts_match_known_lattices() {
        // S3 has 6 subgroups, Q8 has 6, Z/2 x Z/4 has 8
        for (text, count) in [
            ("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^2", 6),
            ("gens: a b\nrel: a^4\nrel: a^2 b^-2\nrel: b^-1 a b a", 6),
            ("gens: a b\nrel: a^2\nrel: b^4\nrel: [a,b]", 8),
        ] {
            let t = todd_coxeter(pres(text), &[], 1000).unwrap();
            assert_eq!(FiniteGroup::from_regular_table(&t).subgroups().len(), count, "{text}");
        }
    }

    #[test]
    fn multiplication_table_is_a_group() {
        let t = todd_coxeter(pres("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^4"), &[], 1000).unwrap();
        let g = FiniteGroup::from_regular_table(&t);
        let n = g.order() as u32;
        for a in 0..n {
            assert_eq!(g.mul(0, a), a);
            assert_eq!(g.mul(a, 0), a);
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }
}
