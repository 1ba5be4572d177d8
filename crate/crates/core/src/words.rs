//! Reduced words in a free group and automorphisms given by image tables.
//!
//! Generators are numbered from zero. The textual syntax uses one ASCII
//! letter per generator: `a` is generator 0, `b` is generator 1, and so on;
//! an uppercase letter is the inverse of its lowercase generator. The empty
//! string is the identity.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest alphabet the text syntax can express.
pub const MAX_TEXT_RANK: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter `{0}` is not an ASCII letter")]
    BadCharacter(char),
    #[error("generator index {index} outside alphabet of rank {rank}")]
    OutOfAlphabet { index: usize, rank: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("rank must be between 1 and {MAX_TEXT_RANK}, got {0}")]
    BadRank(usize),
}

/// A generator or its inverse.
///
/// Ordered by generator first, with the positive letter before its inverse,
/// so `a < A < b < B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: u16,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(generator: usize, inverse: bool) -> Letter {
        Letter { generator: generator as u16, inverse }
    }

    pub const fn positive(generator: usize) -> Letter {
        Letter::new(generator, false)
    }

    pub fn index(self) -> usize {
        self.generator as usize
    }

    pub fn inv(self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }

    pub fn from_char(c: char) -> Result<Letter, WordError> {
        match c {
            'a'..='z' => Ok(Letter::new(c as usize - 'a' as usize, false)),
            'A'..='Z' => Ok(Letter::new(c as usize - 'A' as usize, true)),
            _ => Err(WordError::BadCharacter(c)),
        }
    }

    pub fn to_char(self) -> Option<char> {
        if self.index() >= MAX_TEXT_RANK {
            return None;
        }
        let base = if self.inverse { b'A' } else { b'a' };
        Some((base + self.generator as u8) as char)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_char() {
            Some(c) => write!(f, "{c}"),
            // Internal symbol alphabets may exceed the text syntax.
            None if self.inverse => write!(f, "[{}]^-1", self.generator),
            None => write!(f, "[{}]", self.generator),
        }
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Word {
        Word(vec![Letter::positive(index)])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|&last| last.cancels(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Parses the letter syntax without an alphabet bound.
    pub fn parse(s: &str) -> Result<Word, WordError> {
        let letters = s.trim().chars().map(Letter::from_char).collect::<Result<Vec<_>, _>>()?;
        Ok(Word::from_letters(letters))
    }

    /// Parses and checks every letter against an alphabet of size `rank`.
    pub fn parse_in(s: &str, rank: usize) -> Result<Word, WordError> {
        let w = Word::parse(s)?;
        w.check_alphabet(rank)?;
        Ok(w)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, exponent: i64) -> Word {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..exponent.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// One more than the largest generator index used, or 0 for the identity.
    pub fn min_rank(&self) -> usize {
        self.0.iter().map(|l| l.index() + 1).max().unwrap_or(0)
    }

    pub fn check_alphabet(&self, rank: usize) -> Result<(), WordError> {
        match self.0.iter().find(|l| l.index() >= rank) {
            Some(l) => Err(WordError::OutOfAlphabet { index: l.index(), rank }),
            None => Ok(()),
        }
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Word, WordError> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Reduces a raw letter sequence over an alphabet of size `rank`.
pub fn free_reduce(letters: &[Letter], rank: usize) -> Result<Word, WordError> {
    if let Some(l) = letters.iter().find(|l| l.index() >= rank) {
        return Err(WordError::OutOfAlphabet { index: l.index(), rank });
    }
    Ok(Word::from_letters(letters.iter().copied()))
}

/// Joins words with commas, the list syntax used by every text format here.
pub fn format_word_list(words: &[Word]) -> String {
    words.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
}

/// Parses a comma separated word list; blank input is the empty list.
pub fn parse_word_list(s: &str) -> Result<Vec<Word>, WordError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(Word::parse).collect()
}

/// A homomorphism out of a free group, given by the images of its generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Substitution {
    images: Vec<Word>,
}

impl Substitution {
    pub fn new(images: Vec<Word>) -> Substitution {
        Substitution { images }
    }

    pub fn identity(rank: usize) -> Substitution {
        Substitution { images: (0..rank).map(Word::generator).collect() }
    }

    pub fn source_rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        w.check_alphabet(self.images.len())?;
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        for &l in w.letters() {
            let img = &self.images[l.index()];
            if l.inverse {
                push_reduced(&mut out, img.letters().iter().rev().map(|x| x.inv()));
            } else {
                push_reduced(&mut out, img.letters().iter().copied());
            }
        }
        Ok(Word(out))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &Substitution) -> Result<Substitution, WordError> {
        let images = other.images.iter().map(|w| self.apply(w)).collect::<Result<_, _>>()?;
        Ok(Substitution { images })
    }
}

fn push_reduced(out: &mut Vec<Letter>, letters: impl Iterator<Item = Letter>) {
    for l in letters {
        if out.last().is_some_and(|&last| last.cancels(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
}

/// Which composite failed to reduce to a generator in [`Automorphism::check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseDefect {
    pub generator: usize,
    /// `true` when `ψ(ψ⁻¹(g))` failed, `false` when `ψ⁻¹(ψ(g))` failed.
    pub forward_after_inverse: bool,
    pub got: Word,
}

impl fmt::Display for InverseDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = Letter::positive(self.generator);
        if self.forward_after_inverse {
            write!(f, "psi(psi_inv({g})) reduces to `{}`, expected `{g}`", self.got)
        } else {
            write!(f, "psi_inv(psi({g})) reduces to `{}`, expected `{g}`", self.got)
        }
    }
}

/// An automorphism of a free group of finite rank together with a claimed
/// inverse. Use [`Automorphism::verify`] before trusting the inverse table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    forward: Substitution,
    backward: Substitution,
}

impl Automorphism {
    /// Builds the tables, checking ranks and alphabets but not inverseness.
    pub fn new(images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Automorphism, WordError> {
        let rank = images.len();
        if inverse_images.len() != rank {
            return Err(WordError::RankMismatch(rank, inverse_images.len()));
        }
        if rank == 0 || rank > MAX_TEXT_RANK {
            return Err(WordError::BadRank(rank));
        }
        for w in images.iter().chain(inverse_images.iter()) {
            w.check_alphabet(rank)?;
        }
        Ok(Automorphism {
            forward: Substitution::new(images),
            backward: Substitution::new(inverse_images),
        })
    }

    /// Parses both tables from the letter syntax.
    pub fn parse(images: &[&str], inverse_images: &[&str]) -> Result<Automorphism, WordError> {
        let f = images.iter().map(|s| Word::parse(s)).collect::<Result<Vec<_>, _>>()?;
        let b = inverse_images.iter().map(|s| Word::parse(s)).collect::<Result<Vec<_>, _>>()?;
        Automorphism::new(f, b)
    }

    pub fn identity(rank: usize) -> Automorphism {
        Automorphism { forward: Substitution::identity(rank), backward: Substitution::identity(rank) }
    }

    pub fn rank(&self) -> usize {
        self.forward.source_rank()
    }

    pub fn images(&self) -> &[Word] {
        self.forward.images()
    }

    pub fn inverse_images(&self) -> &[Word] {
        self.backward.images()
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism { forward: self.backward.clone(), backward: self.forward.clone() }
    }

    /// `ψ^exponent(w)`; negative exponents use the inverse table.
    pub fn apply(&self, w: &Word, exponent: i64) -> Result<Word, WordError> {
        w.check_alphabet(self.rank())?;
        let table = if exponent < 0 { &self.backward } else { &self.forward };
        let mut out = w.clone();
        for _ in 0..exponent.unsigned_abs() {
            out = table.apply(&out)?;
        }
        Ok(out)
    }

    pub fn apply_all(&self, words: &[Word], exponent: i64) -> Result<Vec<Word>, WordError> {
        words.iter().map(|w| self.apply(w, exponent)).collect()
    }

    /// Returns the first generator on which a composite of the two tables is
    /// not the identity.
    pub fn check(&self) -> Result<(), InverseDefect> {
        for g in 0..self.rank() {
            let gw = Word::generator(g);
            let back = self.forward.apply(self.backward.image(g)).expect("alphabet checked");
            if back != gw {
                return Err(InverseDefect { generator: g, forward_after_inverse: true, got: back });
            }
            let fwd = self.backward.apply(self.forward.image(g)).expect("alphabet checked");
            if fwd != gw {
                return Err(InverseDefect { generator: g, forward_after_inverse: false, got: fwd });
            }
        }
        Ok(())
    }

    pub fn verify(&self) -> bool {
        self.check().is_ok()
    }

    /// `self ∘ other`, so `other` acts first. Inverse tables compose in the
    /// opposite order.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism, WordError> {
        if self.rank() != other.rank() {
            return Err(WordError::RankMismatch(self.rank(), other.rank()));
        }
        Ok(Automorphism {
            forward: self.forward.after(&other.forward)?,
            backward: other.backward.after(&self.backward)?,
        })
    }

    pub fn power(&self, exponent: i64) -> Automorphism {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut out = Automorphism::identity(self.rank());
        for _ in 0..exponent.unsigned_abs() {
            out = base.compose(&out).expect("equal ranks");
        }
        out
    }

    pub fn forward(&self) -> &Substitution {
        &self.forward
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images()
            .iter()
            .enumerate()
            .map(|(g, w)| format!("{}->{}", Letter::positive(g), w))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Convenience for tests and examples: parse or panic.
pub fn w(s: &str) -> Word {
    Word::parse(s).unwrap_or_else(|e| panic!("bad word {s:?}: {e}"))
}
