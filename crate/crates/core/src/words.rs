//! Free-group words in run-length (syllable) form and finite presentations.
//!
//! A [`Word`] is always freely reduced: adjacent syllables carry distinct
//! generators and no exponent is zero. Exponents are kept as `i64`, so a
//! relator like `a^1073741824` costs one syllable.
//!
//! Presentations have a small line-oriented text format:
//!
//! ```text
//! # the symmetric group on three letters
//! gens: a b
//! rel: a^2
//! rel: b^3
//! rel: (a b)^2
//! ```
//!
//! Word grammar: `word := term+`, `term := atom | atom '^' int`,
//! `atom := name | '(' word ')' | '[' word ',' word ']' | '1'`. Commutators
//! expand as `[u,v] = u^-1 v^-1 u v`.

use std::fmt;

use crate::error::{Error, Result};

/// One run `gen^exp` of a word; `exp` is never zero inside a [`Word`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Syllable {
    pub gen: u32,
    pub exp: i64,
}

/// A freely reduced word in syllable form. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    syl: Vec<Syllable>,
}

impl Word {
    pub fn identity() -> Self {
        Word { syl: Vec::new() }
    }

    /// The single generator `gen`.
    pub fn gen(gen: u32) -> Self {
        Word::gen_pow(gen, 1)
    }

    pub fn gen_pow(gen: u32, exp: i64) -> Self {
        Word::reduce([(gen, exp)])
    }

    /// Freely reduces an arbitrary list of `(generator, exponent)` runs.
    pub fn reduce<I>(raw: I) -> Self
    where
        I: IntoIterator<Item = (u32, i64)>,
    {
        let mut out: Vec<Syllable> = Vec::new();
        for (gen, exp) in raw {
            push_syllable(&mut out, gen, exp);
        }
        Word { syl: out }
    }

    /// Builds a word from single letters `(generator, inverted)`.
    pub fn from_letters<I>(letters: I) -> Self
    where
        I: IntoIterator<Item = (u32, bool)>,
    {
        Word::reduce(letters.into_iter().map(|(g, inv)| (g, if inv { -1 } else { 1 })))
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syl
    }

    pub fn is_identity(&self) -> bool {
        self.syl.is_empty()
    }

    /// Number of letters (sum of absolute exponents).
    pub fn letter_len(&self) -> u128 {
        self.syl.iter().map(|s| s.exp.unsigned_abs() as u128).sum()
    }

    /// Largest generator index used, if any.
    pub fn max_gen(&self) -> Option<u32> {
        self.syl.iter().map(|s| s.gen).max()
    }

    /// Iterates over single letters `(generator, inverted)`.
    pub fn letters(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.syl
            .iter()
            .flat_map(|s| std::iter::repeat_n((s.gen, s.exp < 0), s.exp.unsigned_abs() as usize))
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut out = self.syl.clone();
        for s in &other.syl {
            push_syllable(&mut out, s.gen, s.exp);
        }
        Word { syl: out }
    }

    pub fn invert(&self) -> Word {
        Word {
            syl: self
                .syl
                .iter()
                .rev()
                .map(|s| Syllable {
                    gen: s.gen,
                    exp: -s.exp,
                })
                .collect(),
        }
    }

    /// `self^n`, computed through the cyclic reduction `v w v^-1` so that
    /// powers of a single syllable stay a single syllable.
    pub fn power(&self, n: i64) -> Word {
        if n == 0 || self.is_identity() {
            return Word::identity();
        }
        if n < 0 {
            return self.invert().power(n.checked_neg().expect("exponent overflow"));
        }
        let (conj, core) = self.cyclic_decomposition();
        let core_pow = if core.syl.len() == 1 {
            let s = core.syl[0];
            Word::gen_pow(s.gen, s.exp.checked_mul(n).expect("exponent overflow"))
        } else {
            let mut syl = Vec::with_capacity(core.syl.len() * n as usize);
            for _ in 0..n {
                for s in &core.syl {
                    push_syllable(&mut syl, s.gen, s.exp);
                }
            }
            Word { syl }
        };
        conj.multiply(&core_pow).multiply(&conj.invert())
    }

    /// `[u, v] = u^-1 v^-1 u v`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.invert().multiply(&v.invert()).multiply(u).multiply(v)
    }

    /// `c · self · c^-1`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.multiply(self).multiply(&c.invert())
    }

    /// Splits the word as `conj · core · conj^-1` with `core` cyclically
    /// reduced (first and last syllables on different generators, or a
    /// single syllable).
    pub fn cyclic_decomposition(&self) -> (Word, Word) {
        let syl = &self.syl;
        let (mut lo, mut hi) = (0usize, syl.len());
        while hi - lo >= 2 && syl[lo].gen == syl[hi - 1].gen && syl[lo].exp == -syl[hi - 1].exp {
            lo += 1;
            hi -= 1;
        }
        let mut conj = Word {
            syl: syl[..lo].to_vec(),
        };
        if hi - lo >= 2 && syl[lo].gen == syl[hi - 1].gen {
            // g^e1 M g^e2 = g^-e2 (g^(e1+e2) M) g^e2
            let g = syl[lo].gen;
            let (e1, e2) = (syl[lo].exp, syl[hi - 1].exp);
            push_syllable(&mut conj.syl, g, -e2);
            let mut core = vec![Syllable { gen: g, exp: e1 + e2 }];
            core.extend_from_slice(&syl[lo + 1..hi - 1]);
            return (conj, Word { syl: core });
        }
        (
            conj,
            Word {
                syl: syl[lo..hi].to_vec(),
            },
        )
    }

    /// Canonical representative of the normal closure data of a relator:
    /// the least cyclic rotation of the cyclically reduced word or its
    /// inverse. Two relators with equal forms define the same quotient.
    pub fn relator_canonical(&self) -> Word {
        let (_, core) = self.cyclic_decomposition();
        if core.syl.len() <= 1 {
            return match core.syl.first() {
                None => Word::identity(),
                Some(s) => Word::gen_pow(s.gen, s.exp.abs()),
            };
        }
        let inv = core.invert();
        let mut best: Option<Vec<Syllable>> = None;
        for base in [&core.syl, &inv.syl] {
            let n = base.len();
            for r in 0..n {
                let cand: Vec<Syllable> = base[r..].iter().chain(base[..r].iter()).copied().collect();
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        Word {
            syl: best.unwrap_or_default(),
        }
    }

    /// Display adapter using generator names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

fn push_syllable(out: &mut Vec<Syllable>, gen: u32, exp: i64) {
    if exp == 0 {
        return;
    }
    match out.last_mut() {
        Some(top) if top.gen == gen => {
            top.exp = top.exp.checked_add(exp).expect("exponent overflow");
            if top.exp == 0 {
                out.pop();
            }
        }
        _ => out.push(Syllable { gen, exp }),
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return f.write_str("1");
        }
        for (i, s) in self.word.syl.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let name = self.names.get(s.gen as usize).map(String::as_str).unwrap_or("?");
            if s.exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{}", s.exp)?;
            }
        }
        Ok(())
    }
}

/// A finite presentation `<generators | relators>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if !is_identifier(g) {
                return Err(Error::InvalidPresentation(format!(
                    "generator name `{g}` is not an ASCII identifier"
                )));
            }
            if generators[..i].contains(g) {
                return Err(Error::InvalidPresentation(format!("duplicate generator `{g}`")));
            }
        }
        for r in &relators {
            if let Some(m) = r.max_gen() {
                if m as usize >= generators.len() {
                    return Err(Error::InvalidPresentation(format!(
                        "relator uses generator index {m} but only {} generators exist",
                        generators.len()
                    )));
                }
            }
        }
        Ok(Presentation { generators, relators })
    }

    /// Free group of the given rank on `a, b, c, …` (or `x0, x1, …` beyond 26).
    pub fn free(rank: usize) -> Self {
        let generators = (0..rank)
            .map(|i| {
                if rank <= 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("x{i}")
                }
            })
            .collect();
        Presentation {
            generators,
            relators: Vec::new(),
        }
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<u32> {
        self.generators.iter().position(|g| g == name).map(|i| i as u32)
    }

    /// Returns a copy with `relator` appended.
    pub fn with_relator(&self, relator: Word) -> Result<Self> {
        let mut relators = self.relators.clone();
        relators.push(relator);
        Presentation::new(self.generators.clone(), relators)
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.display(&self.generators).to_string()
    }

    /// Parses a single word over this presentation's generators.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let tokens = tokenize(text, 1, 1)?;
        let mut p = WordParser {
            tokens: &tokens,
            pos: 0,
            gens: &self.generators,
            line: 1,
            end_col: text.len() + 1,
        };
        let w = p.word()?;
        p.expect_end()?;
        Ok(w)
    }

    /// Drops identity relators and relators whose canonical cyclic form
    /// repeats an earlier one. Returns the cleaned presentation and the
    /// indices of the relators that were flagged as duplicates.
    pub fn normalized(&self) -> (Presentation, Vec<usize>) {
        let mut seen = std::collections::BTreeSet::new();
        let mut relators = Vec::new();
        let mut duplicates = Vec::new();
        for (i, r) in self.relators.iter().enumerate() {
            let canon = r.relator_canonical();
            if canon.is_identity() {
                continue;
            }
            if seen.insert(canon) {
                relators.push(r.clone());
            } else {
                duplicates.push(i);
            }
        }
        (
            Presentation {
                generators: self.generators.clone(),
                relators,
            },
            duplicates,
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut generators: Option<Vec<String>> = None;
        let mut relators = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(i) => &raw_line[..i],
                None => raw_line,
            };
            let trimmed = line.trim_start();
            if trimmed.trim().is_empty() {
                continue;
            }
            let offset = line.len() - trimmed.len();
            if let Some(rest) = trimmed.strip_prefix("gens:") {
                if generators.is_some() {
                    return Err(Error::Syntax {
                        line: line_no,
                        col: offset + 1,
                        msg: "second `gens:` line".into(),
                    });
                }
                let mut gens = Vec::new();
                let mut col = offset + 6;
                for piece in rest.split(|c: char| c.is_whitespace()) {
                    if !piece.is_empty() {
                        if !is_identifier(piece) || gens.iter().any(|g: &String| g == piece) {
                            return Err(Error::Syntax {
                                line: line_no,
                                col,
                                msg: format!("bad or repeated generator name `{piece}`"),
                            });
                        }
                        gens.push(piece.to_string());
                    }
                    col += piece.len() + 1;
                }
                generators = Some(gens);
            } else if let Some(rest) = trimmed.strip_prefix("rel:") {
                let Some(gens) = generators.as_ref() else {
                    return Err(Error::Syntax {
                        line: line_no,
                        col: offset + 1,
                        msg: "`rel:` before `gens:`".into(),
                    });
                };
                let start_col = offset + 5;
                let tokens = tokenize(rest, line_no, start_col)?;
                let mut p = WordParser {
                    tokens: &tokens,
                    pos: 0,
                    gens,
                    line: line_no,
                    end_col: start_col + rest.len(),
                };
                let w = p.word()?;
                p.expect_end()?;
                relators.push(w);
            } else {
                return Err(Error::Syntax {
                    line: line_no,
                    col: offset + 1,
                    msg: "expected `gens:` or `rel:`".into(),
                });
            }
        }
        let generators = generators.ok_or(Error::Syntax {
            line: 1,
            col: 1,
            msg: "missing `gens:` line".into(),
        })?;
        Presentation::new(generators, relators)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens:")?;
        for g in &self.generators {
            write!(f, " {g}")?;
        }
        writeln!(f)?;
        for r in &self.relators {
            writeln!(f, "rel: {}", r.display(&self.generators))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Caret,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
}

fn tokenize(text: &str, line: usize, start_col: usize) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = start_col + i;
        match c {
            _ if c.is_whitespace() => i += 1,
            '^' => {
                out.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            '[' => {
                out.push((Tok::LBrack, col));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBrack, col));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, col));
                i += 1;
            }
            '-' | '+' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let s = &text[start..i];
                let v: i64 = s.parse().map_err(|_| Error::Syntax {
                    line,
                    col,
                    msg: format!("bad integer `{s}`"),
                })?;
                out.push((Tok::Int(v), col));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), col));
            }
            _ => {
                return Err(Error::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(out)
}

struct WordParser<'a> {
    tokens: &'a [(Tok, usize)],
    pos: usize,
    gens: &'a [String],
    line: usize,
    end_col: usize,
}

/// Parsed words stay below this many letters, so no exponent overflows.
const MAX_LETTERS: u128 = i64::MAX as u128;

impl WordParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: self.line,
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {tok:?}"))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = Word::identity();
        let mut terms = 0;
        while matches!(
            self.peek(),
            Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::LBrack) | Some(Tok::Int(_))
        ) {
            let t = self.term()?;
            if w.letter_len() + t.letter_len() > MAX_LETTERS {
                return self.err("word too long");
            }
            w = w.multiply(&t);
            terms += 1;
        }
        if terms == 0 {
            return self.err("expected a word");
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<Word> {
        let atom = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Int(n)) if *n != 0 => {
                    let n = *n;
                    if atom.letter_len() * n.unsigned_abs() as u128 > MAX_LETTERS {
                        return self.err("exponent too large");
                    }
                    self.pos += 1;
                    Ok(atom.power(n))
                }
                _ => self.err("expected a nonzero integer exponent"),
            }
        } else {
            Ok(atom)
        }
    }

    fn atom(&mut self) -> Result<Word> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match self.gens.iter().position(|g| *g == name) {
                    Some(i) => Ok(Word::gen(i as u32)),
                    None => Err(Error::UnknownGenerator {
                        name,
                        line: self.line,
                        col,
                    }),
                }
            }
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(Tok::RParen)?;
                Ok(w)
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let u = self.word()?;
                self.expect(Tok::Comma)?;
                let v = self.word()?;
                self.expect(Tok::RBrack)?;
                Ok(Word::commutator(&u, &v))
            }
            _ => self.err("expected a generator, `1`, `(` or `[`"),
        }
    }
}
