//! Coset tables of finite-index subgroups.
//!
//! Column `2g` holds the action of generator `g`, column `2g + 1` that of
//! `g^-1`. Coset 0 is the subgroup itself. Every table handed out by this
//! module is complete and standardized, and carries the spanning tree of
//! its standardization scan, so coset representatives are prefix-closed.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{Presentation, Word};

const UNDEF: u32 = u32::MAX;

/// Default upper bound on live cosets during enumeration.
pub const DEFAULT_MAX_COSETS: usize = 1 << 20;

/// Canonical byte serialization of a standardized table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StandardizedKey(Vec<u8>);

impl StandardizedKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Stable 64-bit FNV-1a digest, for human-readable reports.
    pub fn hash64(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &b in &self.0 {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }

    pub fn hex(&self) -> String {
        format!("{:016x}", self.hash64())
    }
}

#[derive(Debug, Clone)]
pub struct CosetTable {
    pres: Arc<Presentation>,
    n: usize,
    cols: usize,
    table: Vec<u32>,
    /// `(parent, column)` of the spanning tree; entry 0 is unused.
    tree: Vec<(u32, u32)>,
    key: StandardizedKey,
}

impl PartialEq for CosetTable {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.pres == other.pres
    }
}

impl Eq for CosetTable {}

impl CosetTable {
    /// The one-coset table of `G` itself.
    pub fn whole_group(pres: Arc<Presentation>) -> Self {
        let cols = 2 * pres.n_generators();
        Self::standardized_from_raw(pres, 1, cols, vec![0; cols])
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn n_cosets(&self) -> usize {
        self.n
    }

    pub fn n_generators(&self) -> usize {
        self.cols / 2
    }

    pub fn key(&self) -> &StandardizedKey {
        &self.key
    }

    /// Image of `coset` under column `col`.
    #[inline]
    pub fn image(&self, coset: u32, col: usize) -> u32 {
        self.table[coset as usize * self.cols + col]
    }

    /// Image of `coset` under `gen` (or its inverse).
    #[inline]
    pub fn act(&self, coset: u32, gen: u32, inverse: bool) -> u32 {
        self.image(coset, 2 * gen as usize + inverse as usize)
    }

    /// Spanning-tree parent of a coset and the column leading to it.
    pub fn tree_edge(&self, coset: u32) -> Option<(u32, usize)> {
        (coset != 0).then(|| {
            let (p, c) = self.tree[coset as usize];
            (p, c as usize)
        })
    }

    /// Prefix-closed representative of `coset`.
    pub fn rep(&self, coset: u32) -> Word {
        let mut letters = Vec::new();
        let mut c = coset;
        while let Some((parent, col)) = self.tree_edge(c) {
            letters.push(((col / 2) as u32, col % 2 == 1));
            c = parent;
        }
        letters.reverse();
        Word::from_letters(letters)
    }

    pub fn reps(&self) -> Vec<Word> {
        (0..self.n as u32).map(|c| self.rep(c)).collect()
    }

    /// Image of `start` under `gen^exp`; long runs are reduced modulo the
    /// cycle length through `start`.
    pub fn trace_syllable(&self, start: u32, gen: u32, exp: i64) -> u32 {
        let col = 2 * gen as usize + (exp < 0) as usize;
        let mut k = exp.unsigned_abs();
        if k > self.n as u64 {
            let mut len = 1u64;
            let mut c = self.image(start, col);
            while c != start {
                c = self.image(c, col);
                len += 1;
            }
            k %= len;
        }
        let mut c = start;
        for _ in 0..k {
            c = self.image(c, col);
        }
        c
    }

    /// Image of `start` under right multiplication by `w`.
    pub fn trace(&self, w: &Word, start: u32) -> u32 {
        w.syllables()
            .iter()
            .fold(start, |c, s| self.trace_syllable(c, s.gen, s.exp))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.trace(w, 0) == 0
    }

    /// Order of `xH` in the action on cosets: least `m > 0` with `x^m`
    /// fixing coset 0.
    pub fn order_of(&self, x: &Word) -> usize {
        let mut c = self.trace(x, 0);
        let mut m = 1;
        while c != 0 {
            c = self.trace(x, c);
            m += 1;
        }
        m
    }

    /// Checks completeness, inverse columns, relator closure and the
    /// representatives.
    pub fn validate(&self) -> Result<()> {
        if self.table.len() != self.n * self.cols || self.cols != 2 * self.pres.n_generators() {
            return Err(Error::Integrity("table shape mismatch".into()));
        }
        for c in 0..self.n as u32 {
            for col in 0..self.cols {
                let d = self.image(c, col);
                if d as usize >= self.n {
                    return Err(Error::Integrity(format!("entry ({c},{col}) undefined or out of range")));
                }
                if self.image(d, col ^ 1) != c {
                    return Err(Error::Integrity(format!(
                        "columns {col} and {} not inverse at coset {c}",
                        col ^ 1
                    )));
                }
            }
        }
        for (i, r) in self.pres.relators().iter().enumerate() {
            for c in 0..self.n as u32 {
                if self.trace(r, c) != c {
                    return Err(Error::Integrity(format!("relator {i} moves coset {c}")));
                }
            }
        }
        for c in 0..self.n as u32 {
            if self.trace(&self.rep(c), 0) != c {
                return Err(Error::Integrity(format!(
                    "representative of coset {c} does not trace to it"
                )));
            }
        }
        Ok(())
    }

    /// Builds the canonical table from a complete raw table.
    fn standardized_from_raw(pres: Arc<Presentation>, n: usize, cols: usize, raw: Vec<u32>) -> Self {
        let mut new_of_old = vec![UNDEF; n];
        let mut order = Vec::with_capacity(n);
        let mut tree = vec![(0u32, UNDEF); n];
        new_of_old[0] = 0;
        order.push(0u32);
        let mut i = 0;
        while i < order.len() {
            let old = order[i] as usize;
            for col in 0..cols {
                let img = raw[old * cols + col] as usize;
                if new_of_old[img] == UNDEF {
                    new_of_old[img] = order.len() as u32;
                    tree[order.len()] = (i as u32, col as u32);
                    order.push(img as u32);
                }
            }
            i += 1;
        }
        debug_assert_eq!(order.len(), n, "raw table not transitive");
        let mut table = Vec::with_capacity(n * cols);
        for &old in &order {
            for col in 0..cols {
                table.push(new_of_old[raw[old as usize * cols + col] as usize]);
            }
        }
        let mut bytes = Vec::with_capacity(8 + 4 * table.len());
        bytes.extend_from_slice(&(n as u32).to_le_bytes());
        bytes.extend_from_slice(&(cols as u32).to_le_bytes());
        for &x in &table {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        CosetTable {
            pres,
            n,
            cols,
            table,
            tree,
            key: StandardizedKey(bytes),
        }
    }

    /// Canonical renumbering: cosets in order of first appearance scanning
    /// rows in increasing order and columns `g1, g1^-1, g2, …`.
    pub fn standardize(&self) -> (CosetTable, StandardizedKey) {
        let t = Self::standardized_from_raw(self.pres.clone(), self.n, self.cols, self.table.clone());
        let key = t.key.clone();
        (t, key)
    }

    /// Reinterprets the same action for another presentation on the same
    /// generators (for instance after adding relators the action respects).
    pub fn with_presentation(&self, pres: Arc<Presentation>) -> Result<CosetTable> {
        if pres.n_generators() != self.n_generators() {
            return Err(Error::InvalidArgument("generator count differs".into()));
        }
        let t = CosetTable { pres, ..self.clone() };
        t.validate()?;
        Ok(t)
    }

    /// Table of the stabilizer of `base` in a permutation action of `G`.
    /// `perms[g]` lists the images of the points under generator `g`.
    pub fn from_permutations(pres: Arc<Presentation>, perms: &[Vec<u32>], base: u32) -> Result<CosetTable> {
        let r = pres.n_generators();
        if perms.len() != r {
            return Err(Error::InvalidArgument(format!(
                "expected {r} permutations, got {}",
                perms.len()
            )));
        }
        let npts = perms.first().map_or(base as usize + 1, |p| p.len());
        let mut inverses = Vec::with_capacity(r);
        for p in perms {
            if p.len() != npts {
                return Err(Error::InvalidArgument("permutations of different degrees".into()));
            }
            let mut inv = vec![UNDEF; npts];
            for (i, &x) in p.iter().enumerate() {
                if x as usize >= npts || inv[x as usize] != UNDEF {
                    return Err(Error::InvalidArgument("not a permutation".into()));
                }
                inv[x as usize] = i as u32;
            }
            inverses.push(inv);
        }
        if base as usize >= npts {
            return Err(Error::InvalidArgument("base point out of range".into()));
        }
        let mut index = vec![UNDEF; npts];
        let mut orbit = vec![base];
        index[base as usize] = 0;
        let mut i = 0;
        while i < orbit.len() {
            let pt = orbit[i] as usize;
            for g in 0..r {
                for img in [perms[g][pt], inverses[g][pt]] {
                    if index[img as usize] == UNDEF {
                        index[img as usize] = orbit.len() as u32;
                        orbit.push(img);
                    }
                }
            }
            i += 1;
        }
        let cols = 2 * r;
        let mut raw = Vec::with_capacity(orbit.len() * cols);
        for &pt in &orbit {
            for g in 0..r {
                raw.push(index[perms[g][pt as usize] as usize]);
                raw.push(index[inverses[g][pt as usize] as usize]);
            }
        }
        let t = Self::standardized_from_raw(pres, orbit.len(), cols, raw);
        t.validate()
            .map_err(|_| Error::InvalidArgument("permutations do not satisfy the relators".into()))?;
        Ok(t)
    }

    /// Table of the kernel of `G → Sym(n)` given by generator images: the
    /// action of `G` on the image group by right multiplication.
    pub fn kernel_table(pres: Arc<Presentation>, perms: &[Vec<u32>], max_order: usize) -> Result<CosetTable> {
        let degree = perms.first().map_or(0, |p| p.len());
        let identity: Vec<u32> = (0..degree as u32).collect();
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut elems = vec![identity.clone()];
        index.insert(identity, 0);
        let mut actions: Vec<Vec<u32>> = vec![Vec::new(); perms.len()];
        let mut i = 0;
        while i < elems.len() {
            for (g, p) in perms.iter().enumerate() {
                // (x·y)[k] = y[x[k]]: apply x first
                let prod: Vec<u32> = elems[i].iter().map(|&k| p[k as usize]).collect();
                let id = match index.get(&prod) {
                    Some(&id) => id,
                    None => {
                        if elems.len() >= max_order {
                            return Err(Error::GroupTooLarge(format!(
                                "image group exceeds {max_order} elements"
                            )));
                        }
                        let id = elems.len() as u32;
                        index.insert(prod.clone(), id);
                        elems.push(prod);
                        id
                    }
                };
                actions[g].push(id);
            }
            i += 1;
        }
        Self::from_permutations(pres, &actions, 0)
    }

    /// True when every conjugate `g^-1 s g` of every Schreier generator `s`
    /// by every generator `g` of `G` fixes coset 0.
    pub fn is_normal(&self) -> bool {
        let r = self.n_generators() as u32;
        let reps = self.reps();
        let mut sgens = Vec::new();
        for c in 0..self.n as u32 {
            for h in 0..r {
                let d = self.act(c, h, false);
                let s = reps[c as usize]
                    .multiply(&Word::gen(h))
                    .multiply(&reps[d as usize].invert());
                if !s.is_identity() {
                    sgens.push(s);
                }
            }
        }
        (0..r).all(|g| {
            let gw = Word::gen(g);
            sgens.iter().all(|s| self.contains(&s.conjugate_by(&gw.invert())))
        })
    }

    /// Order `m` of `xH` in `G/H` and representatives of the `<x>`-orbits
    /// on cosets (one per orbit, least coset first). Requires `H` normal.
    pub fn orbit_transversal(&self, x: &Word) -> Result<(usize, Vec<Word>)> {
        if !self.is_normal() {
            return Err(Error::NotNormal("orbit transversal needs a normal subgroup".into()));
        }
        let m = self.order_of(x);
        let mut seen = vec![false; self.n];
        let mut transversal = Vec::new();
        for c in 0..self.n as u32 {
            if seen[c as usize] {
                continue;
            }
            let mut size = 0;
            let mut d = c;
            loop {
                seen[d as usize] = true;
                size += 1;
                d = self.trace(x, d);
                if d == c {
                    break;
                }
            }
            if size != m {
                return Err(Error::NotNormal(format!(
                    "orbit of coset {c} has size {size}, expected {m}"
                )));
            }
            transversal.push(self.rep(c));
        }
        debug_assert_eq!(transversal.len() * m, self.n);
        Ok((m, transversal))
    }

    /// Table of the index-`p` subgroup `H' ≤ H` whose cosets are pairs
    /// `(c, v)`, `v ∈ F_p`, with `(c, v)·g = (c·g, v + edge_value(c, g))`.
    /// `edge_value(c, g)` is the value in `F_p` of the Schreier element
    /// `rep(c)·g·rep(c·g)^-1` under a homomorphism `H → F_p`.
    pub fn descend<F>(&self, p: u32, edge_value: F) -> Result<CosetTable>
    where
        F: Fn(u32, u32) -> u32,
    {
        let n = self.n;
        let cols = self.cols;
        let pu = p as usize;
        let mut raw = vec![UNDEF; n * pu * cols];
        for c in 0..n as u32 {
            for g in 0..self.n_generators() as u32 {
                let d = self.act(c, g, false);
                let val = edge_value(c, g) % p;
                for v in 0..p {
                    let src = c as usize * pu + v as usize;
                    let dst = d as usize * pu + ((v + val) % p) as usize;
                    raw[src * cols + 2 * g as usize] = dst as u32;
                    raw[dst * cols + 2 * g as usize + 1] = src as u32;
                }
            }
        }
        let t = Self::standardized_from_raw(self.pres.clone(), n * pu, cols, raw);
        t.validate()
            .map_err(|e| Error::Integrity(format!("descended table inconsistent: {e}")))?;
        Ok(t)
    }

    /// Debug dump: one line per coset, tab-separated images in column order.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for c in 0..self.n as u32 {
            let line: Vec<String> = (0..self.cols).map(|col| self.image(c, col).to_string()).collect();
            let _ = writeln!(s, "{}", line.join("\t"));
        }
        s
    }
}

struct Enumerator {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    max_live: usize,
    max_rows: usize,
}

impl Enumerator {
    fn rows(&self) -> usize {
        self.parent.len()
    }

    fn get(&self, c: u32, col: usize) -> u32 {
        self.table[c as usize * self.cols + col]
    }

    fn put(&mut self, c: u32, col: usize, v: u32) {
        self.table[c as usize * self.cols + col] = v;
    }

    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn new_coset(&mut self) -> Result<u32> {
        if self.live >= self.max_live || self.rows() >= self.max_rows {
            return Err(Error::NotClosed {
                max_cosets: self.max_live,
            });
        }
        let c = self.rows() as u32;
        self.parent.push(c);
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.live += 1;
        Ok(c)
    }

    fn define(&mut self, c: u32, col: usize) -> Result<()> {
        let d = self.new_coset()?;
        self.put(c, col, d);
        self.put(d, col ^ 1, c);
        Ok(())
    }

    fn find(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != r {
            let next = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32, queue: &mut Vec<u32>) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi as usize] = lo;
            self.live -= 1;
            queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for col in 0..self.cols {
                let f = self.get(e, col);
                if f == UNDEF {
                    continue;
                }
                self.put(f, col ^ 1, UNDEF);
                let e1 = self.find(e);
                let f1 = self.find(f);
                let e1x = self.get(e1, col);
                if e1x != UNDEF {
                    self.merge(f1, e1x, &mut queue);
                } else {
                    let f1x = self.get(f1, col ^ 1);
                    if f1x != UNDEF {
                        self.merge(e1, f1x, &mut queue);
                    } else {
                        self.put(e1, col, f1);
                        self.put(f1, col ^ 1, e1);
                    }
                }
            }
        }
    }

    fn scan_and_fill(&mut self, start: u32, word: &[usize]) -> Result<()> {
        if word.is_empty() {
            return Ok(());
        }
        let mut f = start;
        let mut b = start;
        let mut i: isize = 0;
        let mut j: isize = word.len() as isize - 1;
        loop {
            while i <= j && self.get(f, word[i as usize]) != UNDEF {
                f = self.get(f, word[i as usize]);
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.get(b, word[j as usize] ^ 1) != UNDEF {
                b = self.get(b, word[j as usize] ^ 1);
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            } else if i == j {
                self.put(f, word[i as usize], b);
                self.put(b, word[i as usize] ^ 1, f);
                return Ok(());
            } else {
                self.define(f, word[i as usize])?;
            }
        }
    }
}

/// Upper bound on the letters of all relators fed to the enumerator.
const MAX_ENUMERATION_LETTERS: u128 = 1 << 24;

fn letter_columns(w: &Word) -> Vec<usize> {
    w.letters().map(|(g, inv)| 2 * g as usize + inv as usize).collect()
}

/// Coset enumeration (HLT order: cosets processed in creation order, every
/// relator scanned and filled from each live coset, then its row closed by
/// new definitions). Deterministic; fails with [`Error::NotClosed`] once
/// more than `max_cosets` cosets are alive.
pub fn todd_coxeter(pres: Arc<Presentation>, subgroup_gens: &[Word], max_cosets: usize) -> Result<CosetTable> {
    if max_cosets == 0 {
        return Err(Error::InvalidArgument("max_cosets must be positive".into()));
    }
    let r = pres.n_generators();
    for w in subgroup_gens {
        if w.max_gen().is_some_and(|g| g as usize >= r) {
            return Err(Error::InvalidArgument(
                "subgroup generator uses a foreign generator".into(),
            ));
        }
    }
    let total: u128 = pres.relators().iter().chain(subgroup_gens).map(Word::letter_len).sum();
    if total > MAX_ENUMERATION_LETTERS {
        return Err(Error::GroupTooLarge("relators too long for coset enumeration".into()));
    }
    let (clean, _) = pres.normalized();
    let rels: Vec<Vec<usize>> = clean.relators().iter().map(letter_columns).collect();
    let cols = 2 * r;
    let mut e = Enumerator {
        cols,
        table: Vec::new(),
        parent: Vec::new(),
        live: 0,
        max_live: max_cosets,
        max_rows: max_cosets.saturating_mul(16),
    };
    e.new_coset()?;
    for w in subgroup_gens {
        let letters = letter_columns(w);
        e.scan_and_fill(0, &letters)?;
    }
    let mut c = 0u32;
    while (c as usize) < e.rows() {
        if e.alive(c) {
            for rel in &rels {
                e.scan_and_fill(c, rel)?;
                if !e.alive(c) {
                    break;
                }
            }
            if e.alive(c) {
                for col in 0..cols {
                    if e.get(c, col) == UNDEF {
                        e.define(c, col)?;
                    }
                }
            }
        }
        c += 1;
    }
    let live: Vec<u32> = (0..e.rows() as u32).filter(|&c| e.alive(c)).collect();
    let mut new_of_old = vec![UNDEF; e.rows()];
    for (i, &c) in live.iter().enumerate() {
        new_of_old[c as usize] = i as u32;
    }
    let mut raw = Vec::with_capacity(live.len() * cols);
    for &c in &live {
        for col in 0..cols {
            let d = e.get(c, col);
            if d == UNDEF {
                return Err(Error::Integrity("enumeration ended with an undefined entry".into()));
            }
            let d = e.find(d);
            raw.push(new_of_old[d as usize]);
        }
    }
    let t = CosetTable::standardized_from_raw(pres, live.len(), cols, raw);
    t.validate()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn pres(text: &str) -> Arc<Presentation> {
        Arc::new(Presentation::parse(text).unwrap())
    }

    fn f2() -> Arc<Presentation> {
        Arc::new(Presentation::free(2))
    }

    /// Kernel table of F_r → (Z/p)^d given by exponent-sum images, built
    /// from the regular representation of the target.
    fn elementary_kernel(pres: Arc<Presentation>, p: u32, images: &[Vec<u32>]) -> CosetTable {
        let d = images[0].len();
        let size = (p as usize).pow(d as u32);
        let encode = |v: &[u32]| v.iter().fold(0usize, |acc, &x| acc * p as usize + x as usize);
        let decode = |mut k: usize| {
            let mut v = vec![0u32; d];
            for i in (0..d).rev() {
                v[i] = (k % p as usize) as u32;
                k /= p as usize;
            }
            v
        };
        let perms: Vec<Vec<u32>> = images
            .iter()
            .map(|img| {
                (0..size)
                    .map(|k| {
                        let v = decode(k);
                        let w: Vec<u32> = v.iter().zip(img).map(|(a, b)| (a + b) % p).collect();
                        encode(&w) as u32
                    })
                    .collect()
            })
            .collect();
        CosetTable::kernel_table(pres, &perms, 1 << 16).unwrap()
    }

    #[test]
    fn trace_examples() {
        let t = elementary_kernel(f2(), 2, &[vec![1], vec![0]]);
        assert_eq!(t.n_cosets(), 2);
        assert_eq!(t.trace(&Word::identity(), 1), 1);
        assert_eq!(t.trace(&Word::gen(0), 0), 1);
        assert_eq!(t.trace(&Word::gen_pow(0, 2), 0), 0);
        assert_eq!(t.trace(&Word::gen_pow(0, (1 << 40) + 1), 0), 1);
        assert_eq!(t.trace(&Word::gen_pow(1, -7), 1), 1);
    }

    #[test]
    fn todd_coxeter_examples() {
        assert_eq!(todd_coxeter(pres("gens: a\nrel: a^4"), &[], 100).unwrap().n_cosets(), 4);
        let s3 = todd_coxeter(pres("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^2"), &[], 100).unwrap();
        // oracle: closure of a = (1 2), b = (1 2 3) inside Sym(3)
        let a = [1usize, 0, 2];
        let b = [1usize, 2, 0];
        let mut seen: HashSet<[usize; 3]> = HashSet::new();
        let mut stack = vec![[0usize, 1, 2]];
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                for g in [a, b] {
                    stack.push([g[x[0]], g[x[1]], g[x[2]]]);
                }
            }
        }
        assert_eq!(s3.n_cosets(), seen.len());
        assert_eq!(s3.n_cosets(), 6);
        let err = todd_coxeter(f2(), &[], 1000).unwrap_err();
        assert_eq!(err, Error::NotClosed { max_cosets: 1000 });
    }

    #[test]
    fn todd_coxeter_more_groups() {
        let cases = [
            ("gens: a\nrel: a", 1),
            ("gens: a b\nrel: a^4\nrel: b^2\nrel: (a b)^2", 8),
            ("gens: a b\nrel: a^4\nrel: a^2 b^-2\nrel: b^-1 a b a", 8),
            ("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^3", 12),
            ("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^4", 24),
            ("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^5", 60),
            (
                "gens: a b c\nrel: a^2\nrel: b^3\nrel: (a b)^2\nrel: c^2\nrel: [a,c]\nrel: [b,c]",
                12,
            ),
            ("gens: a b\nrel: b^-1 a b a^-2\nrel: a^7\nrel: b^3", 21),
        ];
        for (text, order) in cases {
            let t = todd_coxeter(pres(text), &[], 10_000).unwrap();
            assert_eq!(t.n_cosets(), order, "{text}");
            assert!(t.is_normal());
        }
        // index of a subgroup
        let t = todd_coxeter(pres("gens: a\nrel: a^6"), &[Word::gen_pow(0, 2)], 100).unwrap();
        assert_eq!(t.n_cosets(), 2);
        let t = todd_coxeter(
            pres("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^2"),
            &[Word::gen(0)],
            100,
        )
        .unwrap();
        assert_eq!(t.n_cosets(), 3);
        assert!(!t.is_normal());
    }

    #[test]
    fn big_exponent_relators_enumerate() {
        let t = todd_coxeter(pres("gens: a\nrel: a^1024\nrel: a^96"), &[], 2000).unwrap();
        assert_eq!(t.n_cosets(), 32);
    }

    #[test]
    fn standardize_is_idempotent() {
        let t = todd_coxeter(pres("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^2"), &[], 100).unwrap();
        let (s, k) = t.standardize();
        let (s2, k2) = s.standardize();
        assert_eq!(k, k2);
        assert_eq!(&k, t.key());
        assert_eq!(s.dump(), s2.dump());
        assert_eq!(s.dump(), t.dump());
    }

    #[test]
    fn same_kernel_from_different_epimorphisms() {
        let g = f2();
        let t1 = elementary_kernel(g.clone(), 2, &[vec![1, 0], vec![0, 1]]);
        let t2 = elementary_kernel(g.clone(), 2, &[vec![0, 1], vec![1, 1]]);
        assert_eq!(t1.key(), t2.key());
        // membership oracle: w is in the kernel iff both exponent sums are even
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let len = rng.gen_range(0..10);
            let w = Word::reduce((0..len).map(|_| (rng.gen_range(0..2u32), rng.gen_range(-3i64..=3))));
            let sums: Vec<i64> = (0..2u32)
                .map(|g| w.syllables().iter().filter(|s| s.gen == g).map(|s| s.exp).sum())
                .collect();
            let expected = sums.iter().all(|s| s % 2 == 0);
            assert_eq!(t1.contains(&w), expected);
            assert_eq!(t2.contains(&w), expected);
        }
    }

    #[test]
    fn index_two_subgroups_of_f2_have_distinct_keys() {
        let g = f2();
        let mut keys = HashSet::new();
        for img in [[1u32, 0], [0, 1], [1, 1]] {
            let t = elementary_kernel(g.clone(), 2, &[vec![img[0]], vec![img[1]]]);
            assert!(t.is_normal());
            keys.insert(t.key().clone());
        }
        assert_eq!(keys.len(), 3);
    }

    #[test]
    fn normality_examples() {
        let g = f2();
        // F2 acting on {0,1,2} through a = (0 1), b = (0 1 2): point stabilizer
        let stab = CosetTable::from_permutations(g.clone(), &[vec![1, 0, 2], vec![1, 2, 0]], 0).unwrap();
        assert_eq!(stab.n_cosets(), 3);
        assert!(!stab.is_normal());
        let kern = CosetTable::kernel_table(g.clone(), &[vec![1, 0, 2], vec![1, 2, 0]], 100).unwrap();
        assert_eq!(kern.n_cosets(), 6);
        assert!(kern.is_normal());
        assert!(CosetTable::whole_group(g).is_normal());
    }

    #[test]
    fn permutations_must_satisfy_relators() {
        let z2 = pres("gens: a\nrel: a^2");
        assert!(CosetTable::from_permutations(z2, &[vec![1, 2, 0]], 0).is_err());
    }

    #[test]
    fn orbit_transversal_examples() {
        let g = f2();
        let v4 = elementary_kernel(g.clone(), 2, &[vec![1, 0], vec![0, 1]]);
        let (m, t) = v4.orbit_transversal(&Word::gen(0)).unwrap();
        assert_eq!((m, t.len()), (2, 2));
        // x in H: m = 1, every coset its own orbit
        let (m, t) = v4.orbit_transversal(&Word::gen_pow(1, 2)).unwrap();
        assert_eq!((m, t.len()), (1, 4));
        assert_eq!(t, v4.reps());

        let z4 = pres("gens: a\nrel: a^4");
        let h = todd_coxeter(z4, &[Word::gen_pow(0, 2)], 10).unwrap();
        let (m, t) = h.orbit_transversal(&Word::gen(0)).unwrap();
        assert_eq!((m, t.len()), (2, 1));

        let stab = CosetTable::from_permutations(g, &[vec![1, 0, 2], vec![1, 2, 0]], 0).unwrap();
        assert!(matches!(
            stab.orbit_transversal(&Word::gen(0)),
            Err(Error::NotNormal(_))
        ));
    }

    #[test]
    fn descend_examples() {
        let z4 = pres("gens: a\nrel: a^4");
        let root = CosetTable::whole_group(z4.clone());
        // the Schreier element of (0, a) is a itself, sent to 1
        let h = root.descend(2, |_, _| 1).unwrap();
        assert_eq!(h.n_cosets(), 2);
        assert_eq!(
            h.key(),
            todd_coxeter(z4.clone(), &[Word::gen_pow(0, 2)], 10).unwrap().key()
        );
        // below <a^2>: edge (1, a) carries a^2, the tree edge carries nothing
        let t = h.descend(2, |c, _| if c == 1 { 1 } else { 0 }).unwrap();
        assert_eq!(t.n_cosets(), 4);
        assert_eq!(t.key(), todd_coxeter(z4, &[], 10).unwrap().key());

        let g = f2();
        let root = CosetTable::whole_group(g.clone());
        let h = root.descend(2, |_, gen| if gen == 0 { 1 } else { 0 }).unwrap();
        let tc = todd_coxeter(
            g,
            &[
                Word::gen_pow(0, 2),
                Word::gen(1),
                Word::gen(1).conjugate_by(&Word::gen(0)),
            ],
            100,
        )
        .unwrap();
        assert_eq!(h.key(), tc.key());
        assert!(h.is_normal());
    }

    #[test]
    fn descend_rejects_inconsistent_values() {
        let z4 = pres("gens: a\nrel: a^4");
        let h = CosetTable::whole_group(z4).descend(2, |_, _| 1).unwrap();
        // values 1, 0 around the a-cycle sum to 2 along a^4, nonzero mod 3
        let err = h.descend(3, |c, _| if c == 0 { 1 } else { 0 }).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
    }

    #[test]
    fn dump_format() {
        let t = todd_coxeter(pres("gens: a\nrel: a^3"), &[], 10).unwrap();
        assert_eq!(t.dump(), "1\t2\n2\t0\n0\t1\n");
    }

    fn word_strategy(r: u32) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..r, -3i64..=3), 0..10).prop_map(Word::reduce)
    }

    proptest! {
        #[test]
        fn trace_of_w_then_inverse_is_identity(w in word_strategy(2), c in 0u32..24) {
            let t = todd_coxeter(pres("gens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^4"), &[], 100).unwrap();
            let c = c % t.n_cosets() as u32;
            prop_assert_eq!(t.trace(&w.multiply(&w.invert()), c), c);
            prop_assert_eq!(t.trace(&w.invert(), t.trace(&w, c)), c);
        }

        #[test]
        fn kernel_tables_are_normal_and_canonical(
            a in prop::collection::vec(0u32..3, 2), b in prop::collection::vec(0u32..3, 2)
        ) {
            prop_assume!(a.iter().chain(&b).any(|&x| x != 0));
            let t = elementary_kernel(f2(), 3, &[a, b]);
            t.validate().unwrap();
            prop_assert!(t.is_normal());
            let (s, k) = t.standardize();
            prop_assert_eq!(&k, t.key());
            prop_assert_eq!(s.reps(), t.reps());
        }
    }
}
