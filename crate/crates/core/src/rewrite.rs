//! Knuth–Bendix completion for group presentations and derivation
//! certificates.
//!
//! Completion runs on the letter alphabet with formal inverses under the
//! shortlex order of [`crate::word::shortlex_letters`]. The free-reduction
//! rules `x x^-1 -> 1` are seeded into every system.
//!
//! A [`DerivationChain`] certifies `w0 = wm` modulo the relators: each step
//! inserts one cyclic rotation of a relator (or of its inverse) at a letter
//! position and freely reduces. Deleting a relator is an insertion of its
//! inverse next to it.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::presentation::{parse_relation, Decision, Presentation, PresentationError, WordOracle};
use crate::word::{invert_letters, reduce_letters, shortlex_letters, Letter, Word, WordParseError};

pub const DEFAULT_MAX_RULES: usize = 500;
pub const DEFAULT_MAX_LEN: usize = 30;
pub const DEFAULT_MAX_NODES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Vec<Letter>,
    pub rhs: Vec<Letter>,
}

/// A length-reducing-or-equal, shortlex-decreasing string rewriting system.
#[derive(Debug, Clone)]
pub struct RewriteSystem {
    generators: usize,
    rules: Vec<Rule>,
    alive: Vec<bool>,
    by_last: Vec<Vec<usize>>,
    live: usize,
    confluent: bool,
}

impl RewriteSystem {
    fn empty(generators: usize) -> Self {
        RewriteSystem {
            generators,
            rules: Vec::new(),
            alive: Vec::new(),
            by_last: vec![Vec::new(); 2 * generators],
            live: 0,
            confluent: false,
        }
    }

    pub fn is_confluent(&self) -> bool {
        self.confluent
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Live rules in creation order.
    pub fn rules(&self) -> impl Iterator<Item = &Rule> + '_ {
        self.rules.iter().zip(&self.alive).filter(|(_, &a)| a).map(|(r, _)| r)
    }

    pub fn rule_count(&self) -> usize {
        self.live
    }

    fn push_rule(&mut self, lhs: Vec<Letter>, rhs: Vec<Letter>) -> usize {
        let idx = self.rules.len();
        self.by_last[lhs.last().unwrap().index()].push(idx);
        self.rules.push(Rule { lhs, rhs });
        self.alive.push(true);
        self.live += 1;
        idx
    }

    /// Index of a live rule whose lhs is a suffix of `word`.
    fn suffix_match(&self, word: &[Letter]) -> Option<usize> {
        let last = word.last()?;
        self.by_last[last.index()].iter().copied().find(|&ri| self.alive[ri] && word.ends_with(&self.rules[ri].lhs))
    }

    pub fn reduce(&self, letters: &[Letter]) -> Vec<Letter> {
        let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
        let mut input: Vec<Letter> = letters.iter().rev().copied().collect();
        while let Some(l) = input.pop() {
            out.push(l);
            if let Some(ri) = self.suffix_match(&out) {
                let rule = &self.rules[ri];
                out.truncate(out.len() - rule.lhs.len());
                input.extend(rule.rhs.iter().rev());
            }
        }
        out
    }

    fn is_irreducible_extension(&self, word: &[Letter]) -> bool {
        self.suffix_match(word).is_none()
    }

    /// All irreducible words of letter length at most `max_len`.
    pub fn normal_forms_up_to(&self, max_len: usize) -> Vec<Vec<Letter>> {
        let mut all = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for x in 0..2 * self.generators {
                    let mut ext = w.clone();
                    ext.push(Letter(x as u32));
                    if self.is_irreducible_extension(&ext) {
                        next.push(ext);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        all
    }

    /// Number of irreducible words if that set is finite and at most `cap`.
    pub fn count_normal_forms(&self, cap: usize) -> Option<usize> {
        let mut total = 1usize;
        let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
        while !layer.is_empty() {
            let mut next = Vec::new();
            for w in &layer {
                for x in 0..2 * self.generators {
                    let mut ext = w.clone();
                    ext.push(Letter(x as u32));
                    if self.is_irreducible_extension(&ext) {
                        next.push(ext);
                        total += 1;
                        if total > cap {
                            return None;
                        }
                    }
                }
            }
            layer = next;
        }
        Some(total)
    }
}

/// Rewrites `w` to a fixpoint of the rules.
pub fn normal_form(rs: &RewriteSystem, w: &Word) -> Word {
    Word::from_letters(rs.reduce(&w.letters()))
}

impl WordOracle for RewriteSystem {
    fn is_identity(&self, w: &Word) -> Decision {
        if self.reduce(&w.letters()).is_empty() {
            Decision::Yes
        } else if self.confluent {
            Decision::No
        } else {
            Decision::Undecided
        }
    }
}

struct Completion {
    rs: RewriteSystem,
    pending: Vec<(Vec<Letter>, Vec<Letter>)>,
    max_len: usize,
    max_rules: usize,
    truncated: bool,
    exhausted: bool,
}

impl Completion {
    fn drain(&mut self) {
        while let Some((u, v)) = self.pending.pop() {
            if self.exhausted {
                self.pending.clear();
                return;
            }
            self.add_equation(u, v);
        }
    }

    fn add_equation(&mut self, u: Vec<Letter>, v: Vec<Letter>) {
        let u = self.rs.reduce(&u);
        let v = self.rs.reduce(&v);
        if u == v {
            return;
        }
        let (lhs, rhs) = if shortlex_letters(&u, &v).is_gt() { (u, v) } else { (v, u) };
        if lhs.len() > self.max_len {
            self.truncated = true;
            return;
        }
        if self.rs.live >= self.max_rules {
            self.exhausted = true;
            return;
        }
        let new = self.rs.push_rule(lhs, rhs);
        // inter-reduce the older rules against the new one
        for i in 0..new {
            if !self.rs.alive[i] {
                continue;
            }
            let contains = contains_subword(&self.rs.rules[i].lhs, &self.rs.rules[new].lhs);
            if contains {
                self.rs.alive[i] = false;
                self.rs.live -= 1;
                let old = self.rs.rules[i].clone();
                self.pending.push((old.lhs, old.rhs));
            } else {
                let reduced = self.rs.reduce(&self.rs.rules[i].rhs);
                self.rs.rules[i].rhs = reduced;
            }
        }
    }

    fn overlaps(&mut self, a: usize, b: usize) {
        let la = self.rs.rules[a].lhs.len();
        let lb = self.rs.rules[b].lhs.len();
        for k in 1..la.min(lb) {
            if !(self.rs.alive[a] && self.rs.alive[b]) {
                return;
            }
            let ra = &self.rs.rules[a];
            let rb = &self.rs.rules[b];
            if ra.lhs[la - k..] != rb.lhs[..k] {
                continue;
            }
            let mut left = ra.rhs.clone();
            left.extend_from_slice(&rb.lhs[k..]);
            let mut right = ra.lhs[..la - k].to_vec();
            right.extend_from_slice(&rb.rhs);
            self.pending.push((left, right));
            self.drain();
        }
    }
}

fn contains_subword(haystack: &[Letter], needle: &[Letter]) -> bool {
    needle.len() <= haystack.len() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// Knuth–Bendix completion of the presentation's relators.
///
/// Returns a confluent system when completion finishes within `max_rules`
/// live rules and with every rule's lhs at most `max_len` letters; otherwise
/// a sound but incomplete system with `confluent == false`.
pub fn knuth_bendix(p: &Presentation, max_rules: usize, max_len: usize) -> RewriteSystem {
    let n = p.generator_count();
    let mut c = Completion {
        rs: RewriteSystem::empty(n),
        pending: Vec::new(),
        max_len: max_len.max(2),
        max_rules: max_rules.max(2 * n),
        truncated: false,
        exhausted: false,
    };
    for x in 0..2 * n {
        let l = Letter(x as u32);
        c.rs.push_rule(vec![l, l.inverse()], Vec::new());
    }
    for r in p.relators() {
        c.pending.push((r.letters(), Vec::new()));
        c.drain();
    }
    let mut i = 0;
    while i < c.rs.rules.len() && !c.exhausted {
        if c.rs.alive[i] {
            for j in 0..=i {
                if c.rs.alive[i] && c.rs.alive[j] {
                    c.overlaps(i, j);
                    if i != j {
                        c.overlaps(j, i);
                    }
                }
            }
        }
        i += 1;
    }
    let mut rs = c.rs;
    rs.confluent = !c.exhausted && !c.truncated;
    rs
}

/// One insertion move in a derivation chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DerivationStep {
    pub relator: usize,
    /// Left rotation, in letters, applied to the relator before inversion.
    pub rotation: usize,
    /// `1` inserts the rotated relator, `-1` its inverse.
    pub direction: i8,
    /// Letter position in the current word.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("derivation chain has no words")]
    Empty,
    #[error("chain has {words} words but {steps} steps")]
    Shape { words: usize, steps: usize },
    #[error("step {step}: relator index {relator} out of range")]
    RelatorOutOfRange { step: usize, relator: usize },
    #[error("step {step}: rotation {rotation} out of range")]
    RotationOutOfRange { step: usize, rotation: usize },
    #[error("step {step}: position {position} out of range")]
    PositionOutOfRange { step: usize, position: usize },
    #[error("step {step}: direction must be 1 or -1")]
    BadDirection { step: usize },
}

/// Words `w0..wm` joined by insertion steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationChain {
    presentation: Presentation,
    words: Vec<Word>,
    steps: Vec<DerivationStep>,
}

/// Outcome of [`check_derivation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainReport {
    Valid,
    /// Replaying step `step` on word `step` does not give word `step + 1`.
    Invalid {
        step: usize,
        expected: Word,
        found: Word,
    },
}

impl ChainReport {
    pub fn is_valid(&self) -> bool {
        matches!(self, ChainReport::Valid)
    }
}

fn relator_variant(relator: &[Letter], rotation: usize, direction: i8) -> Vec<Letter> {
    let mut rotated = relator[rotation..].to_vec();
    rotated.extend_from_slice(&relator[..rotation]);
    if direction < 0 {
        invert_letters(&rotated)
    } else {
        rotated
    }
}

fn insert_reduce(word: &[Letter], position: usize, piece: &[Letter]) -> Vec<Letter> {
    reduce_letters(word[..position].iter().chain(piece).chain(&word[position..]).copied())
}

impl DerivationChain {
    pub fn new(presentation: Presentation, words: Vec<Word>, steps: Vec<DerivationStep>) -> Self {
        DerivationChain { presentation, words, steps }
    }

    /// Builds a chain by replaying `steps` from `start`.
    pub fn replay(presentation: Presentation, start: Word, steps: Vec<DerivationStep>) -> Result<Self, ChainError> {
        let mut words = vec![start];
        for (i, s) in steps.iter().enumerate() {
            let next = apply_step(&presentation, words.last().unwrap(), s, i)?;
            words.push(next);
        }
        Ok(DerivationChain { presentation, words, steps })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn steps(&self) -> &[DerivationStep] {
        &self.steps
    }

    pub fn first(&self) -> Option<&Word> {
        self.words.first()
    }

    pub fn last(&self) -> Option<&Word> {
        self.words.last()
    }

    /// Serializes as an inline presentation followed by `start` and `step`
    /// lines: `step <relator> <rotation> <direction> <position> : <word>`.
    pub fn to_text(&self) -> String {
        let mut out = self.presentation.to_text();
        if let Some(w0) = self.words.first() {
            out.push_str(&format!("start {}\n", self.presentation.format(w0)));
        }
        for (s, w) in self.steps.iter().zip(self.words.iter().skip(1)) {
            out.push_str(&format!(
                "step {} {} {} {} : {}\n",
                s.relator,
                s.rotation,
                s.direction,
                s.position,
                self.presentation.format(w)
            ));
        }
        out
    }

    /// Parses the chain format. Presentation lines (`group`, `gens`, `rel`)
    /// may appear inline; any other leading directive is passed to
    /// `resolve`, which may supply the presentation instead (for example
    /// `atlas rp2 3`).
    pub fn parse(
        text: &str,
        resolve: &dyn Fn(&str) -> Option<Result<Presentation, String>>,
    ) -> Result<DerivationChain, ChainParseError> {
        let mut pres_lines = String::new();
        let mut presentation: Option<Presentation> = None;
        let mut start: Option<(usize, String)> = None;
        let mut steps: Vec<(usize, DerivationStep, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let keyword = line.split_whitespace().next().unwrap();
            let rest = line[keyword.len()..].trim();
            match keyword {
                "group" | "gens" | "rel" => {
                    pres_lines.push_str(line);
                    pres_lines.push('\n');
                }
                "start" => start = Some((line_no, rest.to_string())),
                "step" => {
                    let (nums, word) = rest
                        .split_once(':')
                        .ok_or_else(|| ChainParseError::syntax(line_no, "step needs ': <word>'"))?;
                    let fields: Vec<&str> = nums.split_whitespace().collect();
                    if fields.len() != 4 {
                        return Err(ChainParseError::syntax(line_no, "step needs four integers"));
                    }
                    let bad = |_| ChainParseError::syntax(line_no, "malformed step integer");
                    let step = DerivationStep {
                        relator: fields[0].parse().map_err(bad)?,
                        rotation: fields[1].parse().map_err(bad)?,
                        direction: fields[2].parse().map_err(bad)?,
                        position: fields[3].parse().map_err(bad)?,
                    };
                    steps.push((line_no, step, word.trim().to_string()));
                }
                _ => match resolve(line) {
                    Some(Ok(p)) => presentation = Some(p),
                    Some(Err(message)) => return Err(ChainParseError::Syntax { line: line_no, message }),
                    None => return Err(ChainParseError::syntax(line_no, &format!("unknown keyword {keyword:?}"))),
                },
            }
        }
        let presentation = match (presentation, pres_lines.is_empty()) {
            (Some(p), true) => p,
            (None, false) => Presentation::parse(&pres_lines)?,
            (Some(_), false) => return Err(ChainParseError::syntax(0, "both inline and resolved presentations")),
            (None, true) => return Err(ChainParseError::syntax(0, "no presentation")),
        };
        let (start_line, start_text) = start.ok_or_else(|| ChainParseError::syntax(0, "missing start line"))?;
        let word = |line: usize, text: &str| {
            parse_relation(text, presentation.alphabet()).map_err(|source| ChainParseError::Word { line, source })
        };
        let mut words = vec![word(start_line, &start_text)?];
        let mut parsed_steps = Vec::new();
        for (line, step, text) in steps {
            words.push(word(line, &text)?);
            parsed_steps.push(step);
        }
        Ok(DerivationChain { presentation, words, steps: parsed_steps })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Word { line: usize, source: WordParseError },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

impl ChainParseError {
    fn syntax(line: usize, message: &str) -> Self {
        ChainParseError::Syntax { line, message: message.to_string() }
    }
}

fn apply_step(p: &Presentation, w: &Word, s: &DerivationStep, index: usize) -> Result<Word, ChainError> {
    let relator =
        p.relators().get(s.relator).ok_or(ChainError::RelatorOutOfRange { step: index, relator: s.relator })?.letters();
    if s.rotation >= relator.len() {
        return Err(ChainError::RotationOutOfRange { step: index, rotation: s.rotation });
    }
    if s.direction != 1 && s.direction != -1 {
        return Err(ChainError::BadDirection { step: index });
    }
    let letters = w.letters();
    if s.position > letters.len() {
        return Err(ChainError::PositionOutOfRange { step: index, position: s.position });
    }
    let piece = relator_variant(&relator, s.rotation, s.direction);
    Ok(Word::from_letters(insert_reduce(&letters, s.position, &piece)))
}

/// Replays every step of `c`.
pub fn check_derivation(c: &DerivationChain) -> Result<ChainReport, ChainError> {
    if c.words.is_empty() {
        return Err(ChainError::Empty);
    }
    if c.words.len() != c.steps.len() + 1 {
        return Err(ChainError::Shape { words: c.words.len(), steps: c.steps.len() });
    }
    for (i, s) in c.steps.iter().enumerate() {
        let found = apply_step(&c.presentation, &c.words[i], s, i)?;
        if found != c.words[i + 1] {
            return Ok(ChainReport::Invalid { step: i, expected: c.words[i + 1].clone(), found });
        }
    }
    Ok(ChainReport::Valid)
}

/// Every distinct (rotation, direction) variant of every relator.
fn relator_moves(p: &Presentation) -> Vec<(DerivationStep, Vec<Letter>)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (ri, r) in p.relators().iter().enumerate() {
        let letters = r.letters();
        for dir in [1i8, -1] {
            for rot in 0..letters.len() {
                let piece = relator_variant(&letters, rot, dir);
                if seen.insert(piece.clone()) {
                    let step = DerivationStep { relator: ri, rotation: rot, direction: dir, position: 0 };
                    out.push((step, piece));
                }
            }
        }
    }
    out
}

/// A visited word and, except at the root, its parent and the step taken.
type SearchNode = (Vec<Letter>, Option<(usize, DerivationStep)>);

struct SearchTree {
    nodes: Vec<SearchNode>,
    index: HashMap<Vec<Letter>, usize>,
    frontier: VecDeque<usize>,
}

impl SearchTree {
    fn new(root: Vec<Letter>) -> Self {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        SearchTree { nodes: vec![(root, None)], index, frontier: VecDeque::from([0]) }
    }

    /// Node path from the root to `id`, as (words, steps).
    fn path(&self, mut id: usize) -> (Vec<Vec<Letter>>, Vec<DerivationStep>) {
        let mut words = vec![self.nodes[id].0.clone()];
        let mut steps = Vec::new();
        while let Some((parent, step)) = self.nodes[id].1 {
            steps.push(step);
            words.push(self.nodes[parent].0.clone());
            id = parent;
        }
        words.reverse();
        steps.reverse();
        (words, steps)
    }
}

/// A single insertion step turning `from` into `to`, if one exists.
fn find_step(moves: &[(DerivationStep, Vec<Letter>)], from: &[Letter], to: &[Letter]) -> Option<DerivationStep> {
    for (step, piece) in moves {
        if to.len() + piece.len() < from.len() || from.len() + piece.len() < to.len() {
            continue;
        }
        for pos in 0..=from.len() {
            if insert_reduce(from, pos, piece) == to {
                return Some(DerivationStep { position: pos, ..*step });
            }
        }
    }
    None
}

/// Bounded search for a derivation chain from `u` to `v`.
///
/// Explores relator insertions (every relator, rotation, direction and
/// position) breadth-first from both ends, discarding words longer than
/// `max_word_len`. Returns `None` when the budget of `max_nodes` visited
/// words runs out; that is inconclusive, not a proof of inequality. Any
/// returned chain passes [`check_derivation`].
pub fn search_equality(
    p: &Presentation,
    u: &Word,
    v: &Word,
    max_word_len: usize,
    max_nodes: usize,
) -> Option<DerivationChain> {
    if u == v {
        return Some(DerivationChain::new(p.clone(), vec![u.clone()], Vec::new()));
    }
    let moves = relator_moves(p);
    let mut trees = [SearchTree::new(u.letters()), SearchTree::new(v.letters())];
    let mut visited = 2usize;
    while visited < max_nodes {
        // expand the tree with the smaller frontier, one node at a time
        let side = if trees[0].frontier.is_empty() {
            1
        } else if trees[1].frontier.is_empty() || trees[0].frontier.len() <= trees[1].frontier.len() {
            0
        } else {
            1
        };
        let id = trees[side].frontier.pop_front()?;
        let word = trees[side].nodes[id].0.clone();
        for (step, piece) in &moves {
            for pos in 0..=word.len() {
                let next = insert_reduce(&word, pos, piece);
                if next.len() > max_word_len || trees[side].index.contains_key(&next) {
                    continue;
                }
                let tree = &mut trees[side];
                let nid = tree.nodes.len();
                tree.nodes.push((next.clone(), Some((id, DerivationStep { position: pos, ..*step }))));
                tree.index.insert(next.clone(), nid);
                tree.frontier.push_back(nid);
                visited += 1;
                if let Some(&other) = trees[1 - side].index.get(&next) {
                    let (fwd_id, bwd_id) = if side == 0 { (nid, other) } else { (other, nid) };
                    if let Some(chain) = join(p, &moves, &trees[0], fwd_id, &trees[1], bwd_id) {
                        return Some(chain);
                    }
                }
                if visited >= max_nodes {
                    return None;
                }
            }
        }
    }
    None
}

fn join(
    p: &Presentation,
    moves: &[(DerivationStep, Vec<Letter>)],
    fwd: &SearchTree,
    fwd_id: usize,
    bwd: &SearchTree,
    bwd_id: usize,
) -> Option<DerivationChain> {
    let (mut words, mut steps) = fwd.path(fwd_id);
    let (bwords, _) = bwd.path(bwd_id);
    // walk the backward path from the meeting word back to v
    for k in (0..bwords.len() - 1).rev() {
        let step = find_step(moves, &bwords[k + 1], &bwords[k])?;
        steps.push(step);
        words.push(bwords[k].clone());
    }
    let chain = DerivationChain::new(p.clone(), words.into_iter().map(Word::from_letters).collect(), steps);
    debug_assert!(matches!(check_derivation(&chain), Ok(ChainReport::Valid)));
    Some(chain)
}

impl fmt::Display for DerivationChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.words.iter().enumerate() {
            if i == 0 {
                writeln!(f, "  {}", self.presentation.format(w))?;
            } else {
                let s = self.steps[i - 1];
                writeln!(
                    f,
                    "= {}    [r{} rot {} dir {:+} at {}]",
                    self.presentation.format(w),
                    s.relator,
                    s.rotation,
                    s.direction,
                    s.position
                )?;
            }
        }
        Ok(())
    }
}
