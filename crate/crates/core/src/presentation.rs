//! Finitely presented groups, homomorphisms between them, and abelianization.

use std::fmt;

use thiserror::Error;

use crate::snf::{smith_normal_form, IntMatrix, SnfError};
use crate::word::{format_word, parse_word, Alphabet, AlphabetError, Word, WordParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("word uses a generator outside the alphabet of {0}")]
    ForeignWord(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing {0} line")]
    Missing(&'static str),
    #[error("line {line}: {source}")]
    Word { line: usize, source: WordParseError },
}

/// A group given by generators and relators.
///
/// Relators are stored freely and cyclically reduced, non-identity, and
/// without exact duplicates. A relation `u = v` is ingested as `u * v^-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    name: String,
    alphabet: Alphabet,
    relators: Vec<Word>,
}

fn normalize_relator(w: &Word) -> Option<Word> {
    let (core, _) = w.cyclic_reduce();
    (!core.is_identity()).then_some(core)
}

impl Presentation {
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        relators: impl IntoIterator<Item = Word>,
    ) -> Result<Self, PresentationError> {
        let name = name.into();
        let mut p = Presentation { name, alphabet, relators: Vec::new() };
        for r in relators {
            p.push_relator(&r)?;
        }
        Ok(p)
    }

    /// Convenience constructor from generator names and relation strings
    /// (`"u"` or `"u = v"`).
    pub fn from_strings(name: &str, gens: &[&str], relations: &[&str]) -> Result<Self, PresentationError> {
        let alphabet = Alphabet::new(gens.iter().copied())?;
        let mut rels = Vec::new();
        for (i, r) in relations.iter().enumerate() {
            rels.push(parse_relation(r, &alphabet).map_err(|source| PresentationError::Word { line: i + 1, source })?);
        }
        Presentation::new(name, alphabet, rels)
    }

    fn push_relator(&mut self, r: &Word) -> Result<(), PresentationError> {
        if !self.alphabet.contains_word(r) {
            return Err(PresentationError::ForeignWord(self.name.clone()));
        }
        if let Some(core) = normalize_relator(r) {
            if !self.relators.contains(&core) {
                self.relators.push(core);
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn word(&self, text: &str) -> Result<Word, WordParseError> {
        parse_word(text, &self.alphabet)
    }

    pub fn format(&self, w: &Word) -> String {
        format_word(w, &self.alphabet)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Adds `extra` to the relators: the quotient by their normal closure.
    pub fn quotient(&self, extra: &[Word]) -> Result<Presentation, PresentationError> {
        let mut p = self.clone();
        for w in extra {
            p.push_relator(w)?;
        }
        if !extra.is_empty() {
            let added: Vec<String> = extra.iter().map(|w| self.format(w)).collect();
            p.name = format!("{}/<{}>", self.name, added.join(","));
        }
        Ok(p)
    }

    /// Relator exponent-sum matrix: one row per relator, one column per
    /// generator.
    pub fn relation_matrix(&self) -> Vec<Vec<i64>> {
        self.relators.iter().map(|r| r.exponent_sums(self.generator_count())).collect()
    }

    pub fn abelianization(&self) -> Result<AbelianInvariants, SnfError> {
        let m = IntMatrix::from_rows(&self.relation_matrix(), self.generator_count())?;
        let form = smith_normal_form(&m)?;
        Ok(AbelianInvariants::from_diagonal(&form.diagonal))
    }

    /// Parses the line-oriented presentation format:
    ///
    /// ```text
    /// # comment
    /// group Q8
    /// gens rho1 rho2
    /// rel rho1^2 = rho2^2
    /// rel rho1^4
    /// ```
    pub fn parse(text: &str) -> Result<Presentation, PresentationError> {
        let mut name: Option<String> = None;
        let mut alphabet: Option<Alphabet> = None;
        let mut relators = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (keyword, rest) = match line.split_once(char::is_whitespace) {
                Some((k, r)) => (k, r.trim()),
                None => (line, ""),
            };
            let syntax = |message: &str| PresentationError::Syntax { line: line_no, message: message.to_string() };
            match keyword {
                "group" => {
                    if name.is_some() {
                        return Err(syntax("duplicate group header"));
                    }
                    if rest.is_empty() {
                        return Err(syntax("group header needs a name"));
                    }
                    name = Some(rest.to_string());
                }
                "gens" => {
                    if alphabet.is_some() {
                        return Err(syntax("duplicate gens line"));
                    }
                    let names: Vec<&str> = rest.split_whitespace().collect();
                    if names.is_empty() {
                        return Err(syntax("gens line needs at least one generator"));
                    }
                    alphabet = Some(Alphabet::new(names).map_err(|e| syntax(&e.to_string()))?);
                }
                "rel" => {
                    let a = alphabet.as_ref().ok_or_else(|| syntax("rel before gens"))?;
                    let w =
                        parse_relation(rest, a).map_err(|source| PresentationError::Word { line: line_no, source })?;
                    relators.push(w);
                }
                other => return Err(syntax(&format!("unknown keyword {other:?}"))),
            }
        }
        let alphabet = alphabet.ok_or(PresentationError::Missing("gens"))?;
        let name = name.ok_or(PresentationError::Missing("group"))?;
        Presentation::new(name, alphabet, relators)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("group {}\ngens {}\n", self.name, self.alphabet.names().join(" "));
        for r in &self.relators {
            out.push_str("rel ");
            out.push_str(&self.format(r));
            out.push('\n');
        }
        out
    }
}

/// Parses `u` or `u = v` into the relator `u * v^-1`.
pub fn parse_relation(text: &str, alphabet: &Alphabet) -> Result<Word, WordParseError> {
    match text.split_once('=') {
        Some((lhs, rhs)) => {
            let u = parse_word(lhs, alphabet)?;
            let v = parse_word(rhs, alphabet).map_err(|mut e| {
                e.position += lhs.len() + 1;
                e
            })?;
            Ok(u.multiply(&v.invert()))
        }
        None => parse_word(text, alphabet),
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.format(r)).collect();
        write!(f, "{} = <{} | {}>", self.name, self.alphabet.names().join(", "), rels.join(", "))
    }
}

/// Free rank plus torsion coefficients `d1 | d2 | ...`, all `>= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl AbelianInvariants {
    /// From a Smith diagonal with one entry per generator.
    pub fn from_diagonal(diagonal: &[i64]) -> Self {
        AbelianInvariants {
            rank: diagonal.iter().filter(|&&d| d == 0).count(),
            torsion: diagonal.iter().copied().filter(|&d| d > 1).collect(),
        }
    }

    /// Group order when finite (rank 0).
    pub fn order(&self) -> Option<i64> {
        (self.rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Three-valued answer from a word-problem oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    Undecided,
}

/// Decides (possibly partially) whether a word is trivial in some group.
pub trait WordOracle {
    fn is_identity(&self, w: &Word) -> Decision;

    fn equal(&self, u: &Word, v: &Word) -> Decision {
        self.is_identity(&u.multiply(&v.invert()))
    }
}

/// The free group: a word is trivial iff it reduces to the empty word.
pub struct FreeGroupOracle;

impl WordOracle for FreeGroupOracle {
    fn is_identity(&self, w: &Word) -> Decision {
        if w.is_identity() {
            Decision::Yes
        } else {
            Decision::No
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("expected {expected} generator images, got {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("image of generator {0} is not a word over the target alphabet")]
    ForeignImage(usize),
    #[error("word is not over the source alphabet")]
    ForeignWord,
    #[error("homomorphism has not been verified")]
    Unverified,
    #[error("composition mismatch: target of the first map is not the source of the second")]
    Mismatch,
}

/// A generator-image map between presentations. Only [`hom_check`] sets
/// `verified`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    source: Presentation,
    target: Presentation,
    images: Vec<Word>,
    verified: bool,
}

impl GroupHom {
    pub fn new(source: Presentation, target: Presentation, images: Vec<Word>) -> Result<Self, HomError> {
        if images.len() != source.generator_count() {
            return Err(HomError::ImageCount { expected: source.generator_count(), found: images.len() });
        }
        if let Some(i) = images.iter().position(|w| !target.alphabet().contains_word(w)) {
            return Err(HomError::ForeignImage(i));
        }
        Ok(GroupHom { source, target, images, verified: false })
    }

    pub fn identity(p: &Presentation) -> Self {
        let images = (0..p.generator_count()).map(Word::generator).collect();
        GroupHom { source: p.clone(), target: p.clone(), images, verified: false }
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &Presentation {
        &self.target
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Substitution without the verification requirement.
    pub fn map_word(&self, w: &Word) -> Result<Word, HomError> {
        if !self.source.alphabet().contains_word(w) {
            return Err(HomError::ForeignWord);
        }
        Ok(w.substitute(&self.images))
    }

    /// Applies a verified homomorphism.
    pub fn apply(&self, w: &Word) -> Result<Word, HomError> {
        if !self.verified {
            return Err(HomError::Unverified);
        }
        self.map_word(w)
    }

    /// `next ∘ self` as an unverified generator-image map.
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom, HomError> {
        if self.target != next.source {
            return Err(HomError::Mismatch);
        }
        let images = self.images.iter().map(|w| w.substitute(&next.images)).collect();
        GroupHom::new(self.source.clone(), next.target.clone(), images)
    }
}

/// Outcome of [`hom_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomCheck {
    Verified(Box<GroupHom>),
    /// The image of source relator `relator` is not trivial in the target.
    Failed {
        relator: usize,
        image: Word,
    },
    /// The oracle could not decide the image of relator `relator`.
    Undecided {
        relator: usize,
        image: Word,
    },
}

impl HomCheck {
    pub fn verified(self) -> Option<GroupHom> {
        match self {
            HomCheck::Verified(h) => Some(*h),
            _ => None,
        }
    }
}

/// Checks that every source relator maps to the identity of the target,
/// as judged by `oracle`.
pub fn hom_check(h: &GroupHom, oracle: &dyn WordOracle) -> HomCheck {
    let mut undecided = None;
    for (i, r) in h.source.relators().iter().enumerate() {
        let image = r.substitute(&h.images);
        match oracle.is_identity(&image) {
            Decision::Yes => {}
            Decision::No => return HomCheck::Failed { relator: i, image },
            Decision::Undecided => {
                if undecided.is_none() {
                    undecided = Some((i, image));
                }
            }
        }
    }
    match undecided {
        Some((relator, image)) => HomCheck::Undecided { relator, image },
        None => {
            let mut v = h.clone();
            v.verified = true;
            HomCheck::Verified(Box::new(v))
        }
    }
}
