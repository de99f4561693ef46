//! Free-group words over named generator alphabets.
//!
//! Words are stored as run-length syllables `(generator, exponent)` and are
//! always kept freely reduced: adjacent syllables name distinct generators and
//! no exponent is zero. The empty syllable list is the identity.
//!
//! Engines that work letter by letter (coset enumeration, rewriting,
//! derivation replay) use [`Letter`] codes: generator `g` is `2g`, its inverse
//! is `2g + 1`. That numbering is also the shortlex letter order, so
//! `a < a^-1 < b < b^-1 < ...`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// A single letter: a generator or its formal inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u32) << 1 | inverse as u32)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Column index in a table with one column per letter.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Freely reduce a letter sequence (stack based, canonical).
pub fn reduce_letters(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Inverse of a letter sequence.
pub fn invert_letters(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

/// A freely reduced element of a free group.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    syllables: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(g: usize) -> Self {
        Word { syllables: vec![(g, 1)] }
    }

    pub fn power_of(g: usize, exponent: i64) -> Self {
        Word::from_syllables([(g, exponent)])
    }

    /// Builds a word from raw syllables, merging and cancelling as needed.
    pub fn from_syllables(raw: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut syllables: Vec<(usize, i64)> = Vec::new();
        for (g, e) in raw {
            if e == 0 {
                continue;
            }
            match syllables.last_mut() {
                Some(top) if top.0 == g => {
                    top.1 += e;
                    if top.1 == 0 {
                        syllables.pop();
                    }
                }
                _ => syllables.push((g, e)),
            }
        }
        Word { syllables }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word::from_syllables(letters.into_iter().map(|l| (l.generator(), if l.is_inverse() { -1 } else { 1 })))
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters in the expanded word.
    pub fn letter_len(&self) -> usize {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.letter_len());
        for &(g, e) in &self.syllables {
            let l = Letter::new(g, e < 0);
            out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        out
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.syllables.iter().map(|&(g, _)| g).max()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        Word::from_syllables(self.syllables.iter().chain(other.syllables.iter()).copied())
    }

    pub fn invert(&self) -> Word {
        Word { syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }

    /// `self^k`; negative powers invert.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }

    /// Exponent sum of each generator, indexed by generator.
    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut sums = vec![0; generators];
        for &(g, e) in &self.syllables {
            sums[g] += e;
        }
        sums
    }

    /// Splits `self = conjugator * core * conjugator^-1` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut s = self.syllables.clone();
        let mut conj: Vec<(usize, i64)> = Vec::new();
        loop {
            if s.len() < 2 {
                break;
            }
            let (fg, fe) = s[0];
            let (lg, le) = s[s.len() - 1];
            if fg != lg || fe.signum() == le.signum() {
                break;
            }
            // opposite signs: peel off the common part
            let common = fe.abs().min(le.abs()) * fe.signum();
            conj.push((fg, common));
            s[0].1 -= common;
            let last = s.len() - 1;
            s[last].1 += common;
            if s[last].1 == 0 {
                s.pop();
            }
            if s[0].1 == 0 {
                s.remove(0);
            }
        }
        (Word::from_syllables(s), Word::from_syllables(conj))
    }

    /// True when first and last letters are not mutually inverse.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.syllables.first(), self.syllables.last()) {
            (Some(&(fg, fe)), Some(&(lg, le))) if self.syllables.len() > 1 => !(fg == lg && fe.signum() != le.signum()),
            _ => true,
        }
    }

    /// Replaces each generator `g` by `images[g]`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::identity();
        for &(g, e) in &self.syllables {
            out = out.multiply(&images[g].pow(e));
        }
        out
    }
}

/// `u * w * u^-1`, freely reduced.
pub fn conjugate(u: &Word, w: &Word) -> Word {
    u.multiply(w).multiply(&u.invert())
}

/// `u * v * u^-1 * v^-1`.
pub fn commutator(u: &Word, v: &Word) -> Word {
    u.multiply(v).multiply(&u.invert()).multiply(&v.invert())
}

/// Shortlex order on letter expansions: shorter first, then lexicographic
/// with generators in alphabet order, each generator before its inverse.
pub fn shortlex_compare(u: &Word, v: &Word) -> Ordering {
    u.letter_len().cmp(&v.letter_len()).then_with(|| u.letters().cmp(&v.letters()))
}

/// Shortlex on raw letter slices.
pub fn shortlex_letters(u: &[Letter], v: &[Letter]) -> Ordering {
    u.len().cmp(&v.len()).then_with(|| u.cmp(v))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("duplicate generator name {0:?}")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {position}: {kind}")]
pub struct WordParseError {
    pub position: usize,
    pub kind: WordParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordParseErrorKind {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("malformed exponent")]
    MalformedExponent,
    #[error("expected a generator name")]
    ExpectedName,
    #[error("empty word")]
    Empty,
}

/// Checks the generator-name grammar `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// One entry of an alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSymbol {
    pub name: String,
    pub index: usize,
}

/// Ordered list of named generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, AlphabetError> {
        let mut out = Alphabet { names: Vec::new(), lookup: HashMap::new() };
        for n in names {
            let n: String = n.into();
            if !is_valid_name(&n) {
                return Err(AlphabetError::InvalidName(n));
            }
            if out.lookup.contains_key(&n) {
                return Err(AlphabetError::Duplicate(n));
            }
            out.lookup.insert(n.clone(), out.names.len());
            out.names.push(n);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = GeneratorSymbol> + '_ {
        self.names.iter().enumerate().map(|(index, name)| GeneratorSymbol { name: name.clone(), index })
    }

    /// True when every generator used by `w` belongs to this alphabet.
    pub fn contains_word(&self, w: &Word) -> bool {
        w.max_generator().is_none_or(|g| g < self.len())
    }

    pub fn word(&self, text: &str) -> Result<Word, WordParseError> {
        parse_word(text, self)
    }

    pub fn format(&self, w: &Word) -> String {
        format_word(w, self)
    }
}

/// Parses `word := "1" | term (("*" | ws) term)*`,
/// `term := name ("^" signed-integer)?`.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word, WordParseError> {
    let trimmed = text.trim();
    if trimmed == "1" {
        return Ok(Word::identity());
    }
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut raw = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(WordParseError { position: pos, kind: WordParseErrorKind::Empty });
    }
    loop {
        // name
        let start = pos;
        if pos >= bytes.len() || !bytes[pos].is_ascii_alphabetic() {
            return Err(WordParseError { position: pos, kind: WordParseErrorKind::ExpectedName });
        }
        while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
            pos += 1;
        }
        let name = &text[start..pos];
        let g = alphabet.index_of(name).ok_or_else(|| WordParseError {
            position: start,
            kind: WordParseErrorKind::UnknownGenerator(name.to_string()),
        })?;
        let mut exponent = 1i64;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            let estart = pos;
            if pos < bytes.len() && (bytes[pos] == b'-' || bytes[pos] == b'+') {
                pos += 1;
            }
            let dstart = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if dstart == pos {
                return Err(WordParseError { position: estart, kind: WordParseErrorKind::MalformedExponent });
            }
            exponent = text[estart..pos]
                .parse()
                .map_err(|_| WordParseError { position: estart, kind: WordParseErrorKind::MalformedExponent })?;
        }
        raw.push((g, exponent));
        // separator
        let before = pos;
        skip_ws(&mut pos);
        if pos == bytes.len() {
            break;
        }
        if bytes[pos] == b'*' {
            pos += 1;
            skip_ws(&mut pos);
        } else if pos == before {
            return Err(WordParseError { position: pos, kind: WordParseErrorKind::ExpectedName });
        }
    }
    Ok(Word::from_syllables(raw))
}

/// Prints `*`-separated terms, omitting `^1`; the identity prints as `1`.
pub fn format_word(w: &Word, alphabet: &Alphabet) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    let terms: Vec<String> = w
        .syllables()
        .iter()
        .map(|&(g, e)| if e == 1 { alphabet.name(g).to_string() } else { format!("{}^{}", alphabet.name(g), e) })
        .collect();
    terms.join("*")
}

/// Displays a word with a borrowed alphabet.
pub struct DisplayWord<'a>(pub &'a Word, pub &'a Alphabet);

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(self.0, self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn parse_examples() {
        let rho = Alphabet::new(["rho1", "rho2"]).unwrap();
        assert_eq!(parse_word("rho1^2 * rho2^-2", &rho).unwrap().syllables(), &[(0, 2), (1, -2)]);
        assert_eq!(parse_word("a * a^-1 * b", &ab()).unwrap().syllables(), &[(1, 1)]);
        assert!(parse_word("1", &ab()).unwrap().is_identity());
        assert_eq!(parse_word("a b a", &ab()).unwrap().syllables(), &[(0, 1), (1, 1), (0, 1)]);
    }

    #[test]
    fn parse_errors_report_position() {
        let err = parse_word("a * c", &ab()).unwrap_err();
        assert_eq!(err.position, 4);
        assert!(matches!(err.kind, WordParseErrorKind::UnknownGenerator(_)));
        let err = parse_word("a^x", &ab()).unwrap_err();
        assert_eq!(err.kind, WordParseErrorKind::MalformedExponent);
        assert_eq!(err.position, 2);
        assert!(parse_word("a**b", &ab()).is_err());
        assert!(parse_word("", &ab()).is_err());
        assert!(parse_word("a^", &ab()).is_err());
    }

    #[test]
    fn print_round_trip() {
        let w = Word::from_syllables([(0, 2), (1, -1), (0, 1)]);
        let s = format_word(&w, &ab());
        assert_eq!(s, "a^2*b^-1*a");
        assert_eq!(parse_word(&s, &ab()).unwrap(), w);
        assert_eq!(format_word(&Word::identity(), &ab()), "1");
    }

    #[test]
    fn multiply_examples() {
        let a = Word::generator(0);
        assert!(a.multiply(&a.invert()).is_identity());
        assert_eq!(Word::power_of(0, 2).multiply(&Word::power_of(0, 3)), Word::power_of(0, 5));
    }

    #[test]
    fn invert_examples() {
        assert!(Word::identity().invert().is_identity());
        let w = Word::from_syllables([(0, 2), (1, -1)]);
        assert_eq!(w.invert().syllables(), &[(1, 1), (0, -2)]);
    }

    #[test]
    fn conjugate_examples() {
        let w = Word::generator(1);
        assert_eq!(conjugate(&Word::identity(), &w), w);
        assert_eq!(conjugate(&Word::generator(0), &w).syllables(), &[(0, 1), (1, 1), (0, -1)]);
        let a2 = Word::power_of(0, 2);
        assert_eq!(conjugate(&Word::generator(0), &a2), a2);
    }

    #[test]
    fn cyclic_reduce_examples() {
        let alpha = ab();
        let w = parse_word("a b a^-1", &alpha).unwrap();
        let (core, conj) = w.cyclic_reduce();
        assert_eq!(core, Word::generator(1));
        assert_eq!(conj, Word::generator(0));

        let w = parse_word("a b", &alpha).unwrap();
        assert_eq!(w.cyclic_reduce(), (w.clone(), Word::identity()));

        let w = parse_word("a^2 b a^-2", &alpha).unwrap();
        assert_eq!(w.cyclic_reduce(), (Word::generator(1), Word::power_of(0, 2)));

        // partial peel: a^3 b a^-1 = a (a^2 b) a^-1
        let w = parse_word("a^3 b a^-1", &alpha).unwrap();
        let (core, conj) = w.cyclic_reduce();
        assert_eq!(core, parse_word("a^2 b", &alpha).unwrap());
        assert_eq!(conjugate(&conj, &core), w);
        assert!(core.is_cyclically_reduced());
    }

    #[test]
    fn shortlex_examples() {
        let alpha = ab();
        let w = |s| parse_word(s, &alpha).unwrap();
        assert_eq!(shortlex_compare(&Word::identity(), &w("a")), Ordering::Less);
        assert_eq!(shortlex_compare(&w("a b"), &w("b a")), Ordering::Less);
        assert_eq!(shortlex_compare(&w("a^2"), &w("a b")), Ordering::Less);
        assert_eq!(shortlex_compare(&w("a"), &w("a^-1")), Ordering::Less);
    }

    #[test]
    fn alphabet_rejects_bad_names() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["1a"]).is_err());
        assert!(Alphabet::new(["B1_2", "rho3"]).is_ok());
    }
}
