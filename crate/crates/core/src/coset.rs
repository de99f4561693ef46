//! Todd–Coxeter coset enumeration (relator-scanning, HLT order).
//!
//! Cosets are numbered from 0; coset 0 is the subgroup itself. Columns are
//! indexed by [`Letter::index`], so a generator and its inverse occupy
//! adjacent columns.

use std::collections::VecDeque;

use thiserror::Error;

use crate::presentation::{Decision, Presentation, WordOracle};
use crate::word::{Letter, Word};

pub const DEFAULT_MAX_COSETS: usize = 100_000;
pub const DEFAULT_CENTER_CAP: usize = 10_000;

/// Total allocated rows may exceed the live budget by this factor before the
/// enumeration gives up; coincidences free rows that are never reused.
const ALLOCATION_FACTOR: usize = 16;

const UNDEF: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("presentation has no generators")]
    EmptyAlphabet,
    #[error("max_cosets must be at least 1")]
    ZeroBudget,
    #[error("coset table is incomplete (budget exceeded)")]
    Incomplete,
    #[error("query needs the trivial subgroup")]
    NontrivialSubgroup,
    #[error("group order {order} exceeds the element cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("word is not over the presentation alphabet")]
    ForeignWord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationStatus {
    Complete,
    BudgetExceeded,
}

/// A (possibly partial) coset table.
#[derive(Debug, Clone)]
pub struct CosetTable {
    presentation: Presentation,
    subgroup: Vec<Word>,
    rows: Vec<Vec<Option<usize>>>,
    status: EnumerationStatus,
}

struct Enumerator {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    max_live: usize,
    max_alloc: usize,
    queue: VecDeque<u32>,
}

struct Budget;

impl Enumerator {
    fn new(cols: usize, max_live: usize) -> Self {
        Enumerator {
            cols,
            table: vec![UNDEF; cols],
            parent: vec![0],
            live: 1,
            max_live,
            max_alloc: max_live.saturating_mul(ALLOCATION_FACTOR),
            queue: VecDeque::new(),
        }
    }

    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.cols + x]
    }

    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.cols + x] = d;
    }

    fn allocated(&self) -> usize {
        self.parent.len()
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> Result<(), Budget> {
        if self.live >= self.max_live || self.allocated() >= self.max_alloc {
            return Err(Budget);
        }
        let d = self.allocated() as u32;
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.live += 1;
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = c;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (keep, kill) = if a < b { (a, b) } else { (b, a) };
        self.parent[kill as usize] = keep;
        self.live -= 1;
        self.queue.push_back(kill);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(e) = self.queue.pop_front() {
            for x in 0..self.cols {
                let d = self.get(e, x);
                if d == UNDEF {
                    continue;
                }
                self.set(d, x ^ 1, UNDEF);
                let e1 = self.rep(e);
                let d1 = self.rep(d);
                let ex = self.get(e1, x);
                if ex != UNDEF {
                    self.merge(d1, ex);
                } else {
                    let dx = self.get(d1, x ^ 1);
                    if dx != UNDEF {
                        self.merge(e1, dx);
                    } else {
                        self.set(e1, x, d1);
                        self.set(d1, x ^ 1, e1);
                    }
                }
            }
        }
    }

    /// Scans `word` from coset `c`, defining new cosets to complete it.
    fn scan_and_fill(&mut self, c: u32, word: &[usize]) -> Result<(), Budget> {
        if word.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = word.len() - 1;
        loop {
            while i <= j && self.get(f, word[i]) != UNDEF {
                f = self.get(f, word[i]);
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.get(b, word[j] ^ 1) != UNDEF {
                b = self.get(b, word[j] ^ 1);
                if j == 0 {
                    // whole word scanned backwards
                    self.coincidence(f, b);
                    return Ok(());
                }
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                self.set(f, word[i], b);
                self.set(b, word[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, word[i])?;
        }
    }
}

fn columns(w: &Word) -> Vec<usize> {
    w.letters().into_iter().map(Letter::index).collect()
}

/// Runs coset enumeration of `subgroup` in the group of `p`.
pub fn todd_coxeter(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Result<CosetTable, CosetError> {
    if p.generator_count() == 0 {
        return Err(CosetError::EmptyAlphabet);
    }
    if max_cosets == 0 {
        return Err(CosetError::ZeroBudget);
    }
    if subgroup.iter().any(|w| !p.alphabet().contains_word(w)) {
        return Err(CosetError::ForeignWord);
    }
    let cols = 2 * p.generator_count();
    let relators: Vec<Vec<usize>> = p.relators().iter().map(columns).collect();
    let mut e = Enumerator::new(cols, max_cosets);

    let run = |e: &mut Enumerator| -> Result<(), Budget> {
        for w in subgroup {
            e.scan_and_fill(0, &columns(w))?;
        }
        let mut c = 0u32;
        while (c as usize) < e.allocated() {
            if e.is_live(c) {
                for r in &relators {
                    e.scan_and_fill(c, r)?;
                    if !e.is_live(c) {
                        break;
                    }
                }
                if e.is_live(c) {
                    for x in 0..cols {
                        if e.get(c, x) == UNDEF {
                            e.define(c, x)?;
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(())
    };
    let status = match run(&mut e) {
        Ok(()) => EnumerationStatus::Complete,
        Err(Budget) => EnumerationStatus::BudgetExceeded,
    };

    // compact live cosets, preserving order (coset 0 stays first)
    let mut renumber = vec![usize::MAX; e.allocated()];
    let mut next = 0;
    for (c, slot) in renumber.iter_mut().enumerate() {
        if e.is_live(c as u32) {
            *slot = next;
            next += 1;
        }
    }
    let mut rows = Vec::with_capacity(next);
    for c in 0..e.allocated() as u32 {
        if !e.is_live(c) {
            continue;
        }
        let row = (0..cols)
            .map(|x| {
                let d = e.get(c, x);
                (d != UNDEF).then(|| renumber[e.rep(d) as usize])
            })
            .collect();
        rows.push(row);
    }
    Ok(CosetTable { presentation: p.clone(), subgroup: subgroup.to_vec(), rows, status })
}

impl CosetTable {
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn subgroup(&self) -> &[Word] {
        &self.subgroup
    }

    pub fn status(&self) -> EnumerationStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == EnumerationStatus::Complete
    }

    /// Live coset count; the subgroup index when complete.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn entry(&self, coset: usize, letter: Letter) -> Option<usize> {
        self.rows[coset][letter.index()]
    }

    fn require_complete(&self) -> Result<(), CosetError> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(CosetError::Incomplete)
        }
    }

    fn require_regular(&self) -> Result<(), CosetError> {
        self.require_complete()?;
        if self.subgroup.iter().all(Word::is_identity) {
            Ok(())
        } else {
            Err(CosetError::NontrivialSubgroup)
        }
    }

    /// Image of `coset` under `w`, or `None` if an entry is undefined.
    pub fn act(&self, coset: usize, w: &Word) -> Option<usize> {
        w.letters().into_iter().try_fold(coset, |c, l| self.rows[c][l.index()])
    }

    pub fn group_order(&self) -> Result<usize, CosetError> {
        self.require_regular()?;
        Ok(self.len())
    }

    /// One permutation (as an image list) per generator.
    pub fn perm_rep(&self) -> Result<Vec<Vec<usize>>, CosetError> {
        self.require_complete()?;
        Ok((0..self.presentation.generator_count())
            .map(|g| self.rows.iter().map(|row| row[Letter::new(g, false).index()].unwrap()).collect())
            .collect())
    }

    pub fn word_equal_finite(&self, u: &Word, v: &Word) -> Result<bool, CosetError> {
        self.require_regular()?;
        self.check_word(u)?;
        self.check_word(v)?;
        Ok(self.act(0, &u.multiply(&v.invert())) == Some(0))
    }

    pub fn is_central_finite(&self, w: &Word) -> Result<bool, CosetError> {
        self.require_regular()?;
        self.check_word(w)?;
        for g in 0..self.presentation.generator_count() {
            let g = Word::generator(g);
            if !self.word_equal_finite(&w.multiply(&g), &g.multiply(w))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// One representative word per coset, from a breadth-first spanning tree
    /// over the letter columns in order.
    pub fn coset_representatives(&self) -> Result<Vec<Word>, CosetError> {
        self.require_complete()?;
        let mut reps: Vec<Option<Word>> = vec![None; self.len()];
        reps[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            let base = reps[c].clone().unwrap();
            for x in 0..self.rows[c].len() {
                let d = self.rows[c][x].unwrap();
                if reps[d].is_none() {
                    reps[d] = Some(base.multiply(&Word::from_letters([Letter(x as u32)])));
                    queue.push_back(d);
                }
            }
        }
        Ok(reps.into_iter().map(Option::unwrap).collect())
    }

    pub fn center_order_finite(&self, cap: usize) -> Result<usize, CosetError> {
        self.require_regular()?;
        if self.len() > cap {
            return Err(CosetError::CapExceeded { order: self.len(), cap });
        }
        let mut count = 0;
        for w in self.coset_representatives()? {
            if self.is_central_finite(&w)? {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Checks permutation consistency and relator closure on a complete
    /// table.
    pub fn verify(&self) -> bool {
        if !self.is_complete() {
            return false;
        }
        for (c, row) in self.rows.iter().enumerate() {
            for (x, d) in row.iter().enumerate() {
                match d {
                    Some(d) if self.rows[*d][x ^ 1] == Some(c) => {}
                    _ => return false,
                }
            }
            for r in self.presentation.relators() {
                if self.act(c, r) != Some(c) {
                    return false;
                }
            }
        }
        self.subgroup.iter().all(|h| self.act(0, h) == Some(0))
    }

    fn check_word(&self, w: &Word) -> Result<(), CosetError> {
        if self.presentation.alphabet().contains_word(w) {
            Ok(())
        } else {
            Err(CosetError::ForeignWord)
        }
    }
}

impl WordOracle for CosetTable {
    fn is_identity(&self, w: &Word) -> Decision {
        match self.word_equal_finite(w, &Word::identity()) {
            Ok(true) => Decision::Yes,
            Ok(false) => Decision::No,
            Err(_) => Decision::Undecided,
        }
    }
}
