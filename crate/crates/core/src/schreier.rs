//! Reidemeister–Schreier rewriting and the mod-p abelianization of a
//! subgroup together with the conjugation action of `G` on it.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::cosets::CosetTable;
use crate::error::{Error, Result};
use crate::fp::{check_prime, FpMatrix, Functional};
use crate::words::{Presentation, Word};

const TRIVIAL: u32 = u32::MAX;

/// Schreier generators of the subgroup of a coset table. The generator of
/// `(c, g)` is `rep(c)·g·rep(c·g)^-1`; ids follow `(coset, generator)` order.
#[derive(Debug, Clone)]
pub struct SchreierData<'a> {
    table: &'a CosetTable,
    sgen: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl<'a> SchreierData<'a> {
    pub fn new(table: &'a CosetTable) -> Self {
        let r = table.n_generators();
        let mut sgen = vec![TRIVIAL; table.n_cosets() * r];
        let mut edges = Vec::new();
        for c in 0..table.n_cosets() as u32 {
            for g in 0..r as u32 {
                let d = table.act(c, g, false);
                let tree_edge = table.tree_edge(d) == Some((c, 2 * g as usize))
                    || table.tree_edge(c) == Some((d, 2 * g as usize + 1));
                if !tree_edge {
                    sgen[c as usize * r + g as usize] = edges.len() as u32;
                    edges.push((c, g));
                }
            }
        }
        SchreierData { table, sgen, edges }
    }

    pub fn table(&self) -> &'a CosetTable {
        self.table
    }

    pub fn n_sgens(&self) -> usize {
        self.edges.len()
    }

    /// Id of the Schreier generator of `(coset, gen)`, `None` on tree edges.
    pub fn sgen_index(&self, coset: u32, gen: u32) -> Option<usize> {
        let id = self.sgen[coset as usize * self.table.n_generators() + gen as usize];
        (id != TRIVIAL).then_some(id as usize)
    }

    /// The `(coset, generator)` pair of a Schreier generator.
    pub fn sgen_edge(&self, id: usize) -> (u32, u32) {
        self.edges[id]
    }

    /// The Schreier generator as a word in the generators of `G`.
    pub fn sgen_word(&self, id: usize) -> Word {
        let (c, g) = self.edges[id];
        let d = self.table.act(c, g, false);
        self.table
            .rep(c)
            .multiply(&Word::gen(g))
            .multiply(&self.table.rep(d).invert())
    }

    /// One letter step: next coset and the signed Schreier generator passed.
    #[inline]
    fn step(&self, c: u32, g: u32, inverse: bool) -> (u32, Option<(usize, bool)>) {
        if inverse {
            let d = self.table.act(c, g, true);
            (d, self.sgen_index(d, g).map(|s| (s, true)))
        } else {
            (self.table.act(c, g, false), self.sgen_index(c, g).map(|s| (s, false)))
        }
    }

    /// Steps of one syllable; returns the end coset and the visited
    /// Schreier generators, plus the number of full cycle repetitions to
    /// apply to the first `cycle_len` steps when the run is long.
    fn syllable_path(&self, c: u32, g: u32, exp: i64) -> (u32, Vec<(usize, bool)>, u64, usize) {
        let inverse = exp < 0;
        let k = exp.unsigned_abs();
        let n = self.table.n_cosets() as u64;
        let mut path = Vec::new();
        if k <= n {
            let mut cur = c;
            for _ in 0..k {
                let (next, s) = self.step(cur, g, inverse);
                path.extend(s);
                cur = next;
            }
            return (cur, path, 0, 0);
        }
        let mut cur = c;
        let mut len = 0u64;
        loop {
            let (next, s) = self.step(cur, g, inverse);
            path.extend(s);
            cur = next;
            len += 1;
            if cur == c {
                break;
            }
        }
        let cycle_len = path.len();
        let reps = k / len;
        for _ in 0..k % len {
            let (next, s) = self.step(cur, g, inverse);
            path.extend(s);
            cur = next;
        }
        (cur, path, reps, cycle_len)
    }

    /// Rewrites `w` read from `start` as a word in Schreier generators and
    /// returns it with the end coset.
    pub fn rewrite_from(&self, start: u32, w: &Word) -> (Word, u32) {
        let mut out = Word::identity();
        let mut c = start;
        for syl in w.syllables() {
            let (end, path, reps, cycle_len) = self.syllable_path(c, syl.gen, syl.exp);
            let to_word = |steps: &[(usize, bool)]| Word::from_letters(steps.iter().map(|&(s, inv)| (s as u32, inv)));
            if cycle_len > 0 || reps > 0 {
                let cycle = to_word(&path[..cycle_len]);
                let exp = i64::try_from(reps).expect("exponent fits");
                out = out.multiply(&cycle.power(exp)).multiply(&to_word(&path[cycle_len..]));
            } else {
                out = out.multiply(&to_word(&path));
            }
            c = end;
        }
        (out, c)
    }

    /// Reidemeister rewriting of an element of `H`.
    pub fn rewrite(&self, w: &Word) -> Result<Word> {
        match self.rewrite_from(0, w) {
            (word, 0) => Ok(word),
            _ => Err(Error::NotInSubgroup),
        }
    }

    /// Abelianized rewrite mod `p` from `start`: exponent sums of the
    /// Schreier generators, and the end coset.
    pub fn rewrite_abelian_from(&self, start: u32, w: &Word, p: u32) -> (Vec<u32>, u32) {
        let mut v = vec![0u32; self.n_sgens()];
        let mut c = start;
        let add = |v: &mut Vec<u32>, steps: &[(usize, bool)], times: u64| {
            let t = (times % p as u64) as u32;
            for &(s, inv) in steps {
                let delta = if inv { p - t } else { t } % p;
                v[s] = (v[s] + delta) % p;
            }
        };
        for syl in w.syllables() {
            let (end, path, reps, cycle_len) = self.syllable_path(c, syl.gen, syl.exp);
            if reps > 0 {
                add(&mut v, &path[..cycle_len], reps);
                add(&mut v, &path[cycle_len..], 1);
            } else {
                add(&mut v, &path, 1);
            }
            c = end;
        }
        (v, c)
    }

    /// Rewrites of `rep(c)·r·rep(c)^-1` for each relator `r` and coset `c`.
    pub fn rewritten_relators(&self) -> Vec<Word> {
        let (clean, _) = self.table.presentation().normalized();
        let mut relators = Vec::new();
        for r in clean.relators() {
            for c in 0..self.table.n_cosets() as u32 {
                let (w, end) = self.rewrite_from(c, r);
                debug_assert_eq!(end, c);
                relators.push(w);
            }
        }
        relators
    }

    /// Presentation of `H` on its Schreier generators `s1, s2, …`, with
    /// generators eliminated as in [`eliminate_generators`].
    pub fn subgroup_presentation(&self) -> Presentation {
        self.presentation_with(Vec::new())
    }

    /// As [`Self::subgroup_presentation`], with extra relators given as
    /// words in the Schreier generators.
    pub fn presentation_with(&self, extra: Vec<Word>) -> Presentation {
        let mut relators = self.rewritten_relators();
        relators.extend(extra);
        eliminate_generators(self.n_sgens(), relators)
    }
    /// Mod-`p` abelianization of `H` and the action of `G` on it. The
    /// table must belong to a normal subgroup.
    pub fn mod_p_data(&self, p: u32) -> Result<ModPAbelianization> {
        let p = check_prime(p as u64)?;
        let m = self.n_sgens();
        let (clean, _) = self.table.presentation().normalized();
        let mut rows = Vec::new();
        for r in clean.relators() {
            for c in 0..self.table.n_cosets() as u32 {
                rows.push(self.rewrite_abelian_from(c, r, p).0);
            }
        }
        let relator_matrix = FpMatrix::from_residue_rows(p, m, rows);
        let (rref, pivots) = relator_matrix.rref();
        let mut is_pivot = vec![None; m];
        for (row, &col) in pivots.iter().enumerate() {
            is_pivot[col] = Some(row);
        }
        let basis: Vec<usize> = (0..m).filter(|&j| is_pivot[j].is_none()).collect();
        let dim = basis.len();
        let coords: Vec<Vec<u32>> = (0..m)
            .map(|j| match is_pivot[j] {
                None => {
                    let mut v = vec![0; dim];
                    v[basis.binary_search(&j).expect("basis column")] = 1;
                    v
                }
                Some(row) => basis.iter().map(|&b| (p - rref.get(row, b)) % p).collect(),
            })
            .collect();
        let mut data = ModPAbelianization {
            p,
            dim,
            basis,
            coords,
            relator_matrix,
            action: Vec::new(),
        };
        let words: Vec<Word> = data.basis.iter().map(|&j| self.sgen_word(j)).collect();
        for g in 0..self.table.n_generators() as u32 {
            let start = self.table.act(0, g, false);
            let rows: Vec<Vec<u32>> = words
                .iter()
                .map(|w| {
                    let (v, end) = self.rewrite_abelian_from(start, w, p);
                    if end != start {
                        return Err(Error::NotNormal("conjugate leaves the subgroup".into()));
                    }
                    Ok(data.project(&v))
                })
                .collect::<Result<_>>()?;
            data.action.push(FpMatrix::from_residue_rows(p, dim, rows));
        }
        Ok(data)
    }

    /// `d_p(H)` without the action matrices.
    pub fn dp(&self, p: u32) -> Result<usize> {
        let p = check_prime(p as u64)?;
        let (clean, _) = self.table.presentation().normalized();
        let mut rows = Vec::new();
        for r in clean.relators() {
            for c in 0..self.table.n_cosets() as u32 {
                rows.push(self.rewrite_abelian_from(c, r, p).0);
            }
        }
        let rank = FpMatrix::from_residue_rows(p, self.n_sgens(), rows).rank();
        Ok(self.n_sgens() - rank)
    }

    /// Value of a functional on each Schreier edge, for
    /// [`CosetTable::descend`]: `edge_values[c * r + g]`.
    pub fn edge_values(&self, data: &ModPAbelianization, lambda: &Functional) -> Vec<u32> {
        let per_sgen: Vec<u32> = data.coords.iter().map(|v| lambda.eval(v)).collect();
        self.sgen
            .iter()
            .map(|&s| if s == TRIVIAL { 0 } else { per_sgen[s as usize] })
            .collect()
    }

    /// The index-`p` subgroup of `H` cut out by an invariant functional.
    pub fn descend(&self, data: &ModPAbelianization, lambda: &Functional) -> Result<CosetTable> {
        if lambda.dim() != data.dim || lambda.p() != data.p {
            return Err(Error::DimensionMismatch(format!(
                "functional of length {} over F_{} on a space of dimension {} over F_{}",
                lambda.dim(),
                lambda.p(),
                data.dim,
                data.p
            )));
        }
        let values = self.edge_values(data, lambda);
        let r = self.table.n_generators();
        self.table.descend(data.p, |c, g| values[c as usize * r + g as usize])
    }
}

/// Total relator length above which no further substitution is made.
const ELIMINATION_LETTER_LIMIT: u128 = 1 << 20;

/// Builds a presentation on generators `s1 … sn`, repeatedly eliminating a
/// generator that occurs exactly once, with exponent ±1, in some relator:
/// that relator is solved for it and the solution substituted elsewhere.
/// Shortest relators are used first; the rest are renumbered.
pub fn eliminate_generators(n: usize, relators: Vec<Word>) -> Presentation {
    let mut alive = vec![true; n];
    let mut rels: Vec<Word> = relators
        .iter()
        .map(Word::relator_canonical)
        .filter(|w| !w.is_identity())
        .collect();
    loop {
        let mut best: Option<(u128, usize, u32)> = None;
        for (i, r) in rels.iter().enumerate() {
            let mut seen: Vec<(u32, usize, i64)> = Vec::new();
            for syl in r.syllables() {
                match seen.iter_mut().find(|(g, _, _)| *g == syl.gen) {
                    Some(entry) => entry.1 += 1,
                    None => seen.push((syl.gen, 1, syl.exp)),
                }
            }
            for &(g, count, exp) in &seen {
                if count == 1 && exp.abs() == 1 {
                    let cand = (r.letter_len(), i, g);
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
        }
        let Some((_, i, g)) = best else { break };
        let r = &rels[i];
        let pos = r.syllables().iter().position(|s| s.gen == g).expect("occurs");
        let syl = r.syllables();
        let u = Word::reduce(syl[..pos].iter().map(|s| (s.gen, s.exp)));
        let v = Word::reduce(syl[pos + 1..].iter().map(|s| (s.gen, s.exp)));
        // u·g^e·v = 1, so g^e = u^-1·v^-1
        let mut value = u.invert().multiply(&v.invert());
        if syl[pos].exp < 0 {
            value = value.invert();
        }
        let substituted: Vec<Word> = rels
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| {
                w.syllables().iter().fold(Word::identity(), |acc, s| {
                    if s.gen == g {
                        acc.multiply(&value.power(s.exp))
                    } else {
                        acc.multiply(&Word::gen_pow(s.gen, s.exp))
                    }
                })
            })
            .collect();
        if substituted.iter().map(Word::letter_len).sum::<u128>() > ELIMINATION_LETTER_LIMIT {
            break;
        }
        alive[g as usize] = false;
        rels = substituted
            .iter()
            .map(Word::relator_canonical)
            .filter(|w| !w.is_identity())
            .collect();
    }
    let mut new_id = vec![u32::MAX; n];
    let mut names = Vec::new();
    for (i, &a) in alive.iter().enumerate() {
        if a {
            new_id[i] = names.len() as u32;
            names.push(format!("s{}", names.len() + 1));
        }
    }
    let relators = rels
        .iter()
        .map(|w| Word::reduce(w.syllables().iter().map(|s| (new_id[s.gen as usize], s.exp))))
        .collect();
    let pres = Presentation::new(names, relators).expect("renumbered generators are valid");
    pres.normalized().0
}

/// `V = H/[H,H]H^p` as a quotient of the free `F_p`-module on the Schreier
/// generators, with the conjugation action `v ↦ v·A_g` of each generator of
/// `G` (`A_g` sends `h` to `g·h·g^-1`).
#[derive(Debug, Clone)]
pub struct ModPAbelianization {
    pub p: u32,
    pub dim: usize,
    /// Schreier generators whose images form the basis of `V`.
    pub basis: Vec<usize>,
    /// Coordinates in `V` of every Schreier generator.
    pub coords: Vec<Vec<u32>>,
    pub relator_matrix: FpMatrix,
    pub action: Vec<FpMatrix>,
}

impl ModPAbelianization {
    /// Image in `V` of an exponent-sum vector over the Schreier generators.
    pub fn project(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let mut out = vec![0u64; self.dim];
        for (j, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &c) in out.iter_mut().zip(&self.coords[j]) {
                *o = (*o + x as u64 * c as u64) % p;
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }
}

/// `d_p` of a presentation: generators minus the `F_p`-rank of the
/// exponent-sum matrix of the relators.
pub fn dp(pres: &Presentation, p: u32) -> Result<usize> {
    let p = check_prime(p as u64)?;
    let r = pres.n_generators();
    let rows: Vec<Vec<u32>> = pres
        .relators()
        .iter()
        .map(|w| {
            let mut sums = vec![BigInt::zero(); r];
            for s in w.syllables() {
                sums[s.gen as usize] += s.exp;
            }
            let pb = BigInt::from(p);
            sums.iter()
                .map(|x| {
                    let m = ((x % &pb) + &pb) % &pb;
                    m.to_u32().expect("residue below p")
                })
                .collect()
        })
        .collect();
    Ok(r - FpMatrix::from_residue_rows(p, r, rows).rank())
}
