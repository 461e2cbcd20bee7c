//! Quotients by powers of a word: the image of a normal subgroup in
//! `G/<<x^m>>`, certified exact `p`-gradients, and the check that adding a
//! relator `x^(p^k)` lowers the `p`-gradient by at most `1/p^k`.

use std::sync::Arc;

use serde::Serialize;

use crate::cosets::{todd_coxeter, CosetTable};
use crate::error::{Error, Result};
use crate::gradient::{estimate, finite_p_gradient};
use crate::lattice::{enumerate, Lattice, LatticeConfig, LatticeNode};
use crate::rational::Rational;
use crate::schreier::{dp, SchreierData};
use crate::words::{Presentation, Word};

/// Coset limit for deciding that a presentation defines a finite group
/// before certifying it through its `p`-quotient tower.
const FINITENESS_PROBE_COSETS: usize = 1 << 12;

/// `P` with the relator `x^e` added.
pub fn quotient_by_power(pres: &Presentation, x: &Word, e: u64) -> Result<Presentation> {
    if x.is_identity() {
        return Err(Error::DegenerateQuotient("quotient by a power of the identity".into()));
    }
    if e == 0 {
        return Err(Error::InvalidArgument("exponent must be positive".into()));
    }
    if x.letter_len().saturating_mul(e as u128) > i64::MAX as u128 {
        return Err(Error::InvalidArgument("relator too long".into()));
    }
    pres.with_relator(x.power(e as i64))
}

/// Quantities attached to the image `π(H)` of a normal subgroup `H` in
/// `G/<<x^m>>`, `m` the order of `xH` in `G/H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub x: String,
    pub m: usize,
    pub index: usize,
    pub transversal: Vec<String>,
    pub added_relator_count: usize,
    pub dp_before: usize,
    pub dp_after: usize,
    /// `d_p(H)/[G:H]`.
    pub q_before: Rational,
    /// `d_p(π(H))/[G:H]`.
    pub q_after: Rational,
}

impl QuotientReport {
    /// `|T|·m = [G:H]`.
    pub fn transversal_count_holds(&self) -> bool {
        self.transversal.len() * self.m == self.index && self.added_relator_count == self.transversal.len()
    }

    /// `d_p(π(H)) ≥ d_p(H) - [G:H]/m`.
    pub fn dp_bound_holds(&self) -> bool {
        self.dp_after as i64 >= self.dp_before as i64 - (self.index / self.m) as i64
    }

    /// `q(π(H)) ≥ q(H) - 1/m`.
    pub fn q_bound_holds(&self) -> bool {
        self.q_after >= &self.q_before - &Rational::new(1, self.m as i64)
    }
}

/// Presentation of `π(H)`: the Schreier presentation of `H` plus the
/// rewrites of `t·x^m·t^-1` for `t` in a transversal of `<x>H` in `G`.
pub fn subgroup_image_presentation(table: &CosetTable, x: &Word, p: u32) -> Result<(Presentation, QuotientReport)> {
    let pres = table.presentation();
    let (m, transversal) = table.orbit_transversal(x)?;
    let sd = SchreierData::new(table);
    let xm = x.power(m as i64);
    let extra = transversal
        .iter()
        .map(|t| sd.rewrite(&xm.conjugate_by(t)))
        .collect::<Result<Vec<_>>>()?;
    let before = sd.subgroup_presentation();
    let after = sd.presentation_with(extra);
    let index = table.n_cosets();
    let dp_before = dp(&before, p)?;
    let dp_after = dp(&after, p)?;
    let report = QuotientReport {
        x: pres.format_word(x),
        m,
        index,
        transversal: transversal.iter().map(|t| pres.format_word(t)).collect(),
        added_relator_count: transversal.len(),
        dp_before,
        dp_after,
        q_before: Rational::new(dp_before as i64, index as i64),
        q_after: Rational::new(dp_after as i64, index as i64),
    };
    Ok((after, report))
}

/// How an exact `p`-gradient was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    /// Free group of the given rank: the value is `rank - 1`.
    Free { rank: usize },
    /// Finite `p`-quotient tower: the value is `-1/|G_p|`.
    FiniteSaturated { p_quotient_order: usize },
    /// A normal subgroup of the given index with its own certificate; the
    /// value is the subgroup's divided by the index.
    SubgroupDerived { index: usize, inner: Box<Provenance> },
}

/// An exact `p`-gradient together with its certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifiedValue {
    pub value: Rational,
    pub provenance: Provenance,
}

/// Certificate for a presentation without relators.
pub fn certify_free(pres: &Presentation) -> Result<CertifiedValue> {
    let (clean, _) = pres.normalized();
    if !clean.relators().is_empty() {
        return Err(Error::CannotCertify("presentation has relators".into()));
    }
    let rank = clean.n_generators();
    Ok(CertifiedValue {
        value: Rational::integer(rank as i64 - 1),
        provenance: Provenance::Free { rank },
    })
}

/// Certificate for a finite group: its `p`-quotient tower saturates.
pub fn certify_finite(
    pres: Arc<Presentation>,
    p: u32,
    max_depth: usize,
    config: LatticeConfig,
) -> Result<CertifiedValue> {
    todd_coxeter(pres.clone(), &[], FINITENESS_PROBE_COSETS)
        .map_err(|_| Error::CannotCertify("group not shown finite".into()))?;
    let value = finite_p_gradient(pres, p, max_depth, config)?;
    let order = value
        .denom()
        .try_into()
        .map_err(|_| Error::GroupTooLarge("p-quotient order".into()))?;
    Ok(CertifiedValue {
        value,
        provenance: Provenance::FiniteSaturated {
            p_quotient_order: order,
        },
    })
}

fn certify_direct(pres: Arc<Presentation>, p: u32, max_depth: usize, config: LatticeConfig) -> Result<CertifiedValue> {
    certify_free(&pres).or_else(|_| certify_finite(pres, p, max_depth, config))
}

/// Certificate through the first lattice node (by level, then key) whose
/// Schreier presentation is free or finite.
pub fn certify_via_subgroup(lattice: &Lattice, max_depth: usize, config: LatticeConfig) -> Result<CertifiedValue> {
    for node in lattice.nodes().filter(|n| n.level > 0) {
        let h = Arc::new(SchreierData::new(&node.table).subgroup_presentation());
        if let Ok(inner) = certify_direct(h, lattice.p, max_depth, config) {
            return Ok(CertifiedValue {
                value: &inner.value / &Rational::integer(node.index() as i64),
                provenance: Provenance::SubgroupDerived {
                    index: node.index(),
                    inner: Box::new(inner.provenance),
                },
            });
        }
    }
    Err(Error::CannotCertify(format!(
        "no certified subgroup within depth {}",
        lattice.depth
    )))
}

/// Tries a free certificate, then a finite one, then one derived from a
/// subgroup in the lattice of depth `depth`.
pub fn certify(pres: Arc<Presentation>, p: u32, depth: usize, config: LatticeConfig) -> Result<CertifiedValue> {
    const INNER_DEPTH: usize = 8;
    if let Ok(c) = certify_direct(pres.clone(), p, INNER_DEPTH, config) {
        return Ok(c);
    }
    let lattice = enumerate(pres, p, depth, config)?;
    certify_via_subgroup(&lattice, INNER_DEPTH, config)
}

/// Lattice node maximizing the order of `xH`, deepest first among equal
/// orders, then least key.
pub fn order_witness<'a>(lattice: &'a Lattice, x: &Word) -> Option<(&'a LatticeNode, usize)> {
    let mut best: Option<(&LatticeNode, usize)> = None;
    for node in lattice.nodes() {
        let order = node.table.order_of(x);
        let better = match best {
            None => true,
            Some((b, o)) => (order, node.level) > (o, b.level),
        };
        if better {
            best = Some((node, order));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Skip,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerRelatorReport {
    pub status: CheckStatus,
    pub x: String,
    pub k: u32,
    pub depth: usize,
    pub certified: CertifiedValue,
    pub bound: Rational,
    pub estimate: Option<Rational>,
    pub gap: Option<Rational>,
    pub witness_order: usize,
    pub witness_index: usize,
    pub reason: Option<String>,
}

/// Checks `estimate(G/<<x^(p^k)>>, depth) ≥ RG_p(G) - 1/p^k` once a
/// lattice node shows `xH` of order at least `p^k`; skips otherwise.
pub fn check_power_relator_bound(
    pres: Arc<Presentation>,
    x: &Word,
    p: u32,
    k: u32,
    depth: usize,
    certified: &CertifiedValue,
    config: LatticeConfig,
) -> Result<PowerRelatorReport> {
    let pk = (p as u64)
        .checked_pow(k)
        .ok_or_else(|| Error::InvalidArgument("p^k overflows".into()))?;
    let bound = &certified.value - &Rational::inverse_power(p, k);
    let lattice = enumerate(pres.clone(), p, depth, config)?;
    let (node, order) = order_witness(&lattice, x).expect("root exists");
    let mut report = PowerRelatorReport {
        status: CheckStatus::Skip,
        x: pres.format_word(x),
        k,
        depth,
        certified: certified.clone(),
        bound: bound.clone(),
        estimate: None,
        gap: None,
        witness_order: order,
        witness_index: node.index(),
        reason: None,
    };
    if (order as u64) < pk {
        report.reason = Some(format!("no node within depth {depth} shows order at least {pk}"));
        return Ok(report);
    }
    let quotient = Arc::new(quotient_by_power(&pres, x, pk)?);
    let est = estimate(quotient, p, depth, config)?;
    report.gap = Some(&est.value - &bound);
    report.status = if est.value >= bound {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    report.estimate = Some(est.value);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(text: &str) -> Arc<Presentation> {
        Arc::new(Presentation::parse(text).unwrap())
    }

    fn a() -> Word {
        Word::gen(0)
    }

    #[test]
    fn quotient_by_power_examples() {
        let f2 = Presentation::free(2);
        assert_eq!(
            quotient_by_power(&f2, &a(), 2).unwrap().to_string(),
            "gens: a b\nrel: a^2\n"
        );
        let z4 = pres("gens: a\nrel: a^4");
        assert_eq!(
            quotient_by_power(&z4, &a(), 2).unwrap().to_string(),
            "gens: a\nrel: a^4\nrel: a^2\n"
        );
        assert_eq!(quotient_by_power(&f2, &a(), 1).unwrap().relators(), &[a()]);
        assert!(matches!(
            quotient_by_power(&f2, &Word::identity(), 2),
            Err(Error::DegenerateQuotient(_))
        ));
    }

    fn v4_kernel(g: Arc<Presentation>) -> CosetTable {
        let lattice = enumerate(g, 2, 2, LatticeConfig::default()).unwrap();
        // the unique level-2 node with quotient Z/2 x Z/2 contains a^2 and b^2
        lattice.levels[2]
            .iter()
            .find(|n| {
                n.table.contains(&Word::gen_pow(0, 2))
                    && n.table.contains(&Word::gen_pow(1, 2))
                    && n.table.contains(&Word::commutator(&a(), &Word::gen(1)))
            })
            .unwrap()
            .table
            .clone()
    }

    #[test]
    fn image_presentation_examples() {
        let f2 = Arc::new(Presentation::free(2));
        let h = v4_kernel(f2);
        let (pi, r) = subgroup_image_presentation(&h, &a(), 2).unwrap();
        assert_eq!((r.m, r.index, r.transversal.len(), r.added_relator_count), (2, 4, 2, 2));
        assert_eq!(r.dp_before, 5);
        assert!(r.dp_after >= 3);
        assert!(r.transversal_count_holds() && r.dp_bound_holds() && r.q_bound_holds());
        // pi(H) is torsion-free of index 4 in Z/2 * Z, whose Euler
        // characteristic is -1/2, so it is free of rank 1 + 4/2 = 3
        assert_eq!((pi.n_generators(), pi.relators().len()), (3, 0));
        assert_eq!(r.dp_after, 3);

        // x in H: one conjugate per coset
        let (_, r) = subgroup_image_presentation(&h, &Word::gen_pow(1, 2), 2).unwrap();
        assert_eq!((r.m, r.transversal.len()), (1, 4));
        assert!(r.transversal_count_holds() && r.dp_bound_holds());
    }

    #[test]
    fn image_presentation_matches_quotient_lattice() {
        // the image of H in G/<<x^m>> has the same mod-p abelianization as
        // the corresponding node of the quotient's lattice
        let f2 = Arc::new(Presentation::free(2));
        let lattice = enumerate(f2.clone(), 2, 2, LatticeConfig::default()).unwrap();
        for node in lattice.nodes() {
            for x in [a(), Word::gen(1), a().multiply(&Word::gen(1))] {
                let (pi, r) = subgroup_image_presentation(&node.table, &x, 2).unwrap();
                let quotient = Arc::new(quotient_by_power(&f2, &x, r.m as u64).unwrap());
                let images: Vec<Vec<u32>> = (0..2)
                    .map(|g| (0..node.index() as u32).map(|c| node.table.act(c, g, false)).collect())
                    .collect();
                let t = CosetTable::from_permutations(quotient, &images, 0).unwrap();
                assert_eq!(dp(&pi, 2).unwrap(), SchreierData::new(&t).dp(2).unwrap());
            }
        }
    }

    #[test]
    fn certificates() {
        let c = certify(Arc::new(Presentation::free(3)), 2, 2, LatticeConfig::default()).unwrap();
        assert_eq!(c.value, Rational::integer(2));
        assert_eq!(c.provenance, Provenance::Free { rank: 3 });

        let c = certify(pres("gens: a\nrel: a^12"), 2, 2, LatticeConfig::default()).unwrap();
        assert_eq!(c.value, Rational::new(-1, 4));
        assert_eq!(c.provenance, Provenance::FiniteSaturated { p_quotient_order: 4 });

        let c = certify(pres("gens: a b\nrel: a^2"), 2, 1, LatticeConfig::default()).unwrap();
        assert_eq!(c.value, Rational::new(1, 2));
        assert!(matches!(c.provenance, Provenance::SubgroupDerived { index: 2, .. }));

        let c = certify(
            pres("gens: x y z\nrel: z^2\nrel: [x,z]\nrel: [y,z]"),
            2,
            1,
            LatticeConfig::default(),
        )
        .unwrap();
        assert_eq!(c.value, Rational::new(1, 2));

        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains(r#""kind":"subgroup-derived""#));
    }

    #[test]
    fn check_power_relator_bound_examples() {
        let cfg = LatticeConfig::default();
        let f2 = Arc::new(Presentation::free(2));
        let cert = certify_free(&f2).unwrap();
        let r = check_power_relator_bound(f2.clone(), &a(), 2, 1, 2, &cert, cfg).unwrap();
        assert_eq!(r.status, CheckStatus::Pass);
        assert_eq!(r.bound, Rational::new(1, 2));
        assert_eq!(r.estimate, Some(Rational::new(1, 2)));

        let f3 = Arc::new(Presentation::free(3));
        let cert = certify_free(&f3).unwrap();
        let r = check_power_relator_bound(f3, &a(), 2, 2, 2, &cert, cfg).unwrap();
        assert_eq!(r.status, CheckStatus::Pass);
        assert_eq!(r.bound, Rational::new(7, 4));
        assert!(r.estimate.unwrap() >= Rational::new(7, 4));

        // k = 0: quotient by a itself
        let r = check_power_relator_bound(f2.clone(), &a(), 2, 0, 0, &certify_free(&f2).unwrap(), cfg).unwrap();
        assert_eq!(r.status, CheckStatus::Pass);
        assert_eq!(r.bound, Rational::zero());
        assert_eq!(r.estimate, Some(Rational::zero()));

        // depth too small to see the order of a
        let r = check_power_relator_bound(f2.clone(), &a(), 2, 2, 1, &certify_free(&f2).unwrap(), cfg).unwrap();
        assert_eq!(r.status, CheckStatus::Skip);
    }

    #[test]
    fn order_witness_prefers_larger_order_then_depth() {
        let f2 = Arc::new(Presentation::free(2));
        let lattice = enumerate(f2, 2, 2, LatticeConfig::default()).unwrap();
        let (node, order) = order_witness(&lattice, &a()).unwrap();
        assert_eq!(order, 4);
        assert_eq!(node.level, 2);
    }
}
