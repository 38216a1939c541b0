//! Group presentations used to label graph structures.
//!
//! Letters are indices into an [`Alphabet`]: generators appear in declaration
//! order, each followed immediately by its inverse (`a, A, b, B, ...`).
//! Coxeter generators are involutions and carry no separate inverse letter.
//! Opaque alphabets have no group semantics at all.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Letter = u16;
pub type Word = Vec<Letter>;

/// A numeric entry given either as a JSON number or as a string such as
/// `"3/4"` or `"-0.25"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64> {
        match self {
            Scalar::Number(x) => Ok(*x),
            Scalar::Text(s) => parse_rational(s),
        }
    }
}

fn parse_rational(s: &str) -> Result<f64> {
    let bad = || Error::Malformed(format!("cannot parse '{s}' as a rational or decimal"));
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        }
        None => t.parse().map_err(|_| bad()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixGenerator {
    pub name: String,
    /// Row-major `[a, b, c, d]`.
    pub matrix: [Scalar; 4],
}

/// The `"group"` object of an automaton document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Free {
        generators: Vec<String>,
    },
    Raag {
        generators: Vec<String>,
        #[serde(default)]
        commuting: Vec<[String; 2]>,
    },
    Racg {
        generators: Vec<String>,
        #[serde(default)]
        commuting: Vec<[String; 2]>,
    },
    /// Free words over generators with given 2×2 matrix images.
    Matrix {
        generators: Vec<MatrixGenerator>,
    },
    Opaque {
        letters: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Free,
    Artin,
    Coxeter,
    Matrix,
    Opaque,
}

#[derive(Debug, Clone)]
pub struct Alphabet {
    names: Vec<String>,
    generator: Vec<usize>,
    inverse: Vec<Option<Letter>>,
    lookup: HashMap<String, Letter>,
}

impl Alphabet {
    fn build(names: Vec<String>, generator: Vec<usize>, inverse: Vec<Option<Letter>>) -> Result<Self> {
        let mut lookup = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if lookup.insert(n.clone(), i as Letter).is_some() {
                return Err(Error::Malformed(format!("duplicate letter '{n}'")));
            }
        }
        Ok(Alphabet {
            names,
            generator,
            inverse,
            lookup,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, x: Letter) -> &str {
        &self.names[x as usize]
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.lookup.get(name).copied()
    }

    pub fn inverse(&self, x: Letter) -> Option<Letter> {
        self.inverse[x as usize]
    }

    pub fn generator(&self, x: Letter) -> usize {
        self.generator[x as usize]
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.names.len() as Letter
    }
}

fn check_generator_name(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::Malformed(format!(
            "generator name '{name}' must be lowercase ASCII (its inverse is the uppercased name)"
        )))
    }
}

/// Inverse letter name for a generator: `a` -> `A`.
pub fn inverse_name(generator: &str) -> String {
    generator.to_ascii_uppercase()
}

/// A group with its alphabet and, where available, a solution to the word
/// problem (free reduction, or commutation normal forms for right-angled
/// Artin and Coxeter groups).
#[derive(Debug, Clone)]
pub struct Group {
    spec: GroupSpec,
    kind: GroupKind,
    alphabet: Alphabet,
    generator_names: Vec<String>,
    /// Bitmask per generator of the *other* generators it commutes with.
    commute: Vec<u64>,
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        match &spec {
            GroupSpec::Free { generators } => {
                let g = generators.clone();
                Self::with_inverses(spec.clone(), GroupKind::Free, g, &[])
            }
            GroupSpec::Matrix { generators } => {
                let g = generators.iter().map(|m| m.name.clone()).collect();
                for m in generators {
                    for s in &m.matrix {
                        s.value()?;
                    }
                }
                Self::with_inverses(spec.clone(), GroupKind::Matrix, g, &[])
            }
            GroupSpec::Raag {
                generators,
                commuting,
            } => {
                let g = generators.clone();
                let c = commuting.clone();
                Self::with_inverses(spec.clone(), GroupKind::Artin, g, &c)
            }
            GroupSpec::Racg {
                generators,
                commuting,
            } => {
                if generators.is_empty() {
                    return Err(Error::InvalidInput("empty generator set".into()));
                }
                for g in generators {
                    check_generator_name(g)?;
                }
                let n = generators.len();
                let alphabet = Alphabet::build(
                    generators.clone(),
                    (0..n).collect(),
                    (0..n).map(|i| Some(i as Letter)).collect(),
                )?;
                let commute = commute_masks(generators, commuting)?;
                Ok(Group {
                    spec: spec.clone(),
                    kind: GroupKind::Coxeter,
                    alphabet,
                    generator_names: generators.clone(),
                    commute,
                })
            }
            GroupSpec::Opaque { letters } => {
                let n = letters.len();
                let alphabet =
                    Alphabet::build(letters.clone(), (0..n).collect(), vec![None; n])?;
                Ok(Group {
                    spec: spec.clone(),
                    kind: GroupKind::Opaque,
                    alphabet,
                    generator_names: letters.clone(),
                    commute: vec![0; n],
                })
            }
        }
    }

    fn with_inverses(
        spec: GroupSpec,
        kind: GroupKind,
        generators: Vec<String>,
        commuting: &[[String; 2]],
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput("empty generator set".into()));
        }
        let mut names = Vec::with_capacity(2 * generators.len());
        let mut gen_of = Vec::new();
        let mut inverse = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            check_generator_name(g)?;
            names.push(g.clone());
            names.push(inverse_name(g));
            gen_of.extend([i, i]);
            inverse.push(Some((2 * i + 1) as Letter));
            inverse.push(Some((2 * i) as Letter));
        }
        let commute = commute_masks(&generators, commuting)?;
        Ok(Group {
            spec,
            kind,
            alphabet: Alphabet::build(names, gen_of, inverse)?,
            generator_names: generators,
            commute,
        })
    }

    /// Free group on `a, b, c, ...`.
    pub fn free(rank: usize) -> Result<Self> {
        Self::new(GroupSpec::Free {
            generators: default_generator_names(rank)?,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    /// Whether `x` and `y` are letters of distinct, commuting generators.
    pub fn commutes(&self, x: Letter, y: Letter) -> bool {
        let gx = self.alphabet.generator(x);
        let gy = self.alphabet.generator(y);
        self.commute[gx] >> gy & 1 == 1
    }

    pub fn generators_commute(&self, g: usize, h: usize) -> bool {
        self.commute[g] >> h & 1 == 1
    }

    pub fn has_word_problem(&self) -> bool {
        self.kind != GroupKind::Opaque
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        s.split_whitespace()
            .map(|tok| {
                self.alphabet.letter(tok).ok_or_else(|| Error::UnknownLabel {
                    label: tok.to_string(),
                    context: format!("word '{s}'"),
                })
            })
            .collect()
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        let mut out = String::new();
        for (i, &x) in w.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.alphabet.name(x));
        }
        out
    }

    pub fn inverse_word(&self, w: &[Letter]) -> Result<Word> {
        w.iter()
            .rev()
            .map(|&x| {
                self.alphabet
                    .inverse(x)
                    .ok_or_else(|| Error::InvalidInput("opaque letters have no inverses".into()))
            })
            .collect()
    }

    fn require_word_problem(&self) -> Result<()> {
        if self.has_word_problem() {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "opaque group: no word problem available".into(),
            ))
        }
    }

    /// Geodesic normal form: the freely reduced word for free and matrix
    /// groups, the shortlex-least geodesic for right-angled groups.
    pub fn reduce(&self, w: &[Letter]) -> Result<Word> {
        self.require_word_problem()?;
        Ok(match self.kind {
            GroupKind::Free | GroupKind::Matrix => self.free_reduce(w),
            _ => {
                let r = self.cancel(w);
                self.lex_order(&r)
            }
        })
    }

    pub fn word_length(&self, w: &[Letter]) -> Result<usize> {
        Ok(match self.kind {
            GroupKind::Free | GroupKind::Matrix => self.free_reduce(w).len(),
            _ => {
                self.require_word_problem()?;
                self.cancel(w).len()
            }
        })
    }

    /// Word distance `|x⁻¹ y|`.
    pub fn distance(&self, x: &[Letter], y: &[Letter]) -> Result<usize> {
        let mut w = self.inverse_word(x)?;
        w.extend_from_slice(y);
        self.word_length(&w)
    }

    pub fn concat(&self, parts: &[&[Letter]]) -> Word {
        parts.iter().flat_map(|p| p.iter().copied()).collect()
    }

    fn free_reduce(&self, w: &[Letter]) -> Word {
        let mut out: Word = Vec::with_capacity(w.len());
        for &x in w {
            match out.last() {
                Some(&y) if self.alphabet.inverse(y) == Some(x) => {
                    out.pop();
                }
                _ => out.push(x),
            }
        }
        out
    }

    /// Left-to-right cancellation in a right-angled group; the result is a
    /// geodesic word for the same element (not yet in shortlex order).
    fn cancel(&self, w: &[Letter]) -> Word {
        let mut out: Word = Vec::with_capacity(w.len());
        for &z in w {
            let gz = self.alphabet.generator(z);
            let zi = self.alphabet.inverse(z);
            let mut cancel_at = None;
            for j in (0..out.len()).rev() {
                let x = out[j];
                let gx = self.alphabet.generator(x);
                if gx == gz {
                    if Some(x) == zi {
                        cancel_at = Some(j);
                    }
                    break;
                }
                if !self.generators_commute(gx, gz) {
                    break;
                }
            }
            match cancel_at {
                Some(j) => {
                    out.remove(j);
                }
                None => out.push(z),
            }
        }
        out
    }

    /// Lexicographically least word in the commutation class of `w`.
    fn lex_order(&self, w: &[Letter]) -> Word {
        let mut rest: Vec<Letter> = w.to_vec();
        let mut out = Vec::with_capacity(w.len());
        while !rest.is_empty() {
            let mut seen: u64 = 0;
            let mut best: Option<usize> = None;
            for (i, &x) in rest.iter().enumerate() {
                let g = self.alphabet.generator(x);
                let available = seen & !self.commute[g] == 0;
                if available && best.is_none_or(|b| x < rest[b]) {
                    best = Some(i);
                }
                seen |= 1 << g;
            }
            let i = best.expect("first letter is always available");
            out.push(rest.remove(i));
        }
        out
    }

    /// Reduced form of a cyclic conjugate of minimal length.
    pub fn cyclic_reduce(&self, w: &[Letter]) -> Result<Word> {
        self.require_word_problem()?;
        let mut r = self.reduce(w)?;
        match self.kind {
            GroupKind::Free | GroupKind::Matrix => {
                let (mut i, mut j) = (0, r.len());
                while j >= i + 2 && self.alphabet.inverse(r[i]) == Some(r[j - 1]) {
                    i += 1;
                    j -= 1;
                }
                Ok(r[i..j].to_vec())
            }
            _ => loop {
                match self.conjugating_pair(&r) {
                    Some((i, j)) => {
                        r.remove(j);
                        r.remove(i);
                        r = self.lex_order(&r);
                    }
                    None => return Ok(r),
                }
            },
        }
    }

    /// Positions `i < j` such that `r[i]` can be shuffled to the front and
    /// `r[j] = r[i]⁻¹` to the back.
    fn conjugating_pair(&self, r: &[Letter]) -> Option<(usize, usize)> {
        let n = r.len();
        let mut first = vec![false; n];
        let mut seen: u64 = 0;
        for (i, &x) in r.iter().enumerate() {
            let g = self.alphabet.generator(x);
            first[i] = seen & !self.commute[g] == 0;
            seen |= 1 << g;
        }
        let mut seen: u64 = 0;
        let mut last = vec![false; n];
        for j in (0..n).rev() {
            let g = self.alphabet.generator(r[j]);
            last[j] = seen & !self.commute[g] == 0;
            seen |= 1 << g;
        }
        for i in 0..n {
            if !first[i] {
                continue;
            }
            let inv = self.alphabet.inverse(r[i]);
            for j in (i + 1..n).rev() {
                if last[j] && Some(r[j]) == inv {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

fn commute_masks(generators: &[String], commuting: &[[String; 2]]) -> Result<Vec<u64>> {
    if generators.len() > 64 {
        return Err(Error::InvalidInput(
            "at most 64 generators are supported".into(),
        ));
    }
    let index: HashMap<&str, usize> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| (g.as_str(), i))
        .collect();
    let mut masks = vec![0u64; generators.len()];
    for [x, y] in commuting {
        let lookup = |s: &String| {
            index.get(s.as_str()).copied().ok_or_else(|| Error::UnknownLabel {
                label: s.clone(),
                context: "commutation graph".into(),
            })
        };
        let (i, j) = (lookup(x)?, lookup(y)?);
        if i == j {
            return Err(Error::Malformed(format!(
                "commutation graph has a self-adjacency at '{x}'"
            )));
        }
        masks[i] |= 1 << j;
        masks[j] |= 1 << i;
    }
    Ok(masks)
}

/// `a, b, c, ...` for small ranks, `g1, g2, ...` beyond 26.
pub fn default_generator_names(rank: usize) -> Result<Vec<String>> {
    if rank == 0 {
        return Err(Error::InvalidInput("rank must be positive".into()));
    }
    Ok((0..rank)
        .map(|i| {
            if rank <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("g{}", i + 1)
            }
        })
        .collect())
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupKind::Free => "free",
            GroupKind::Artin => "raag",
            GroupKind::Coxeter => "racg",
            GroupKind::Matrix => "matrix",
            GroupKind::Opaque => "opaque",
        };
        f.write_str(s)
    }
}
