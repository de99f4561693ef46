//! Presentations and distinguished elements for closed surfaces and the pure
//! braid groups of the projective plane.
//!
//! Surfaces are indexed by genus for orientable ones and by crosscap count
//! for nonorientable ones, so the projective plane is `N1` and the Klein
//! bottle is `N2`. The aliases `sphere`, `torus`, `rp2` and `klein` are
//! accepted wherever a surface is parsed and are printed next to the
//! canonical label.
//!
//! The pure braid group `P_n(RP2)` has generators `B_ij` (`i < j`) and
//! `rho_k`; generator names are `B12`, `B13`, ... and `rho1`, `rho2`, ...
//! (with an underscore, `B1_10`, once `n >= 10`).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::presentation::{GroupHom, Presentation};
use crate::word::{Alphabet, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("strand count must be at least 1 (got {0})")]
    InvalidStrands(usize),
    #[error("generator index out of range: {0}")]
    InvalidIndex(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
}

/// A closed surface: orientable of genus `g >= 0`, or nonorientable with
/// `k >= 1` crosscaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurfaceKind {
    orientable: bool,
    genus: u32,
}

impl SurfaceKind {
    pub const SPHERE: SurfaceKind = SurfaceKind { orientable: true, genus: 0 };
    pub const TORUS: SurfaceKind = SurfaceKind { orientable: true, genus: 1 };
    pub const PROJECTIVE_PLANE: SurfaceKind = SurfaceKind { orientable: false, genus: 1 };
    pub const KLEIN_BOTTLE: SurfaceKind = SurfaceKind { orientable: false, genus: 2 };

    pub fn new(orientable: bool, genus: u32) -> Result<Self, AtlasError> {
        if !orientable && genus == 0 {
            return Err(AtlasError::InvalidSurface("nonorientable genus must be at least 1".into()));
        }
        Ok(SurfaceKind { orientable, genus })
    }

    pub fn orientable(genus: u32) -> Self {
        SurfaceKind { orientable: true, genus }
    }

    pub fn nonorientable(crosscaps: u32) -> Result<Self, AtlasError> {
        SurfaceKind::new(false, crosscaps)
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// `2 - 2g` or `2 - k`.
    pub fn euler_characteristic(&self) -> i64 {
        if self.orientable {
            2 - 2 * self.genus as i64
        } else {
            2 - self.genus as i64
        }
    }

    /// Canonical label, `S<g>` or `N<k>`.
    pub fn label(&self) -> String {
        format!("{}{}", if self.orientable { "S" } else { "N" }, self.genus)
    }

    pub fn alias(&self) -> Option<&'static str> {
        match (self.orientable, self.genus) {
            (true, 0) => Some("sphere"),
            (true, 1) => Some("torus"),
            (false, 1) => Some("rp2"),
            (false, 2) => Some("klein"),
            _ => None,
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alias() {
            Some(a) => write!(f, "{} ({a})", self.label()),
            None => f.write_str(&self.label()),
        }
    }
}

impl FromStr for SurfaceKind {
    type Err = AtlasError;

    /// Accepts `sphere`, `torus`, `t2`, `rp2`, `klein`, `S<g>`, `N<k>`,
    /// `orientable:<g>` and `nonorientable:<k>`. `S2` is the genus 2
    /// surface, not the sphere.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AtlasError::InvalidSurface(s.to_string());
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "sphere" => return Ok(SurfaceKind::SPHERE),
            "torus" | "t2" => return Ok(SurfaceKind::TORUS),
            "rp2" | "projective-plane" => return Ok(SurfaceKind::PROJECTIVE_PLANE),
            "klein" => return Ok(SurfaceKind::KLEIN_BOTTLE),
            _ => {}
        }
        let (orientable, digits) = if let Some(rest) = lower.strip_prefix("orientable:") {
            (true, rest)
        } else if let Some(rest) = lower.strip_prefix("nonorientable:") {
            (false, rest)
        } else if let Some(rest) = s.strip_prefix('S') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('N') {
            (false, rest)
        } else {
            return Err(bad());
        };
        let genus: u32 = digits.parse().map_err(|_| bad())?;
        SurfaceKind::new(orientable, genus)
    }
}

fn check_strands(n: usize) -> Result<(), AtlasError> {
    if n < 1 {
        Err(AtlasError::InvalidStrands(n))
    } else {
        Ok(())
    }
}

/// Generator layout of `P_n(RP2)`: all `B_ij` in lexicographic order, then
/// `rho_1..rho_n`.
#[derive(Debug, Clone, Copy)]
struct Rp2Layout {
    n: usize,
}

impl Rp2Layout {
    fn b_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i < j && j <= self.n);
        // pairs (a, b) with a < i come first
        let before: usize = (1..i).map(|a| self.n - a).sum();
        before + (j - i - 1)
    }

    fn rho_index(&self, k: usize) -> usize {
        self.n * (self.n - 1) / 2 + k - 1
    }

    fn b(&self, i: usize, j: usize) -> Word {
        Word::generator(self.b_index(i, j))
    }

    fn rho(&self, k: usize) -> Word {
        Word::generator(self.rho_index(k))
    }

    fn names(&self) -> Vec<String> {
        let sep = if self.n >= 10 { "_" } else { "" };
        let mut names = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                names.push(format!("B{i}{sep}{j}"));
            }
        }
        names.extend((1..=self.n).map(|k| format!("rho{k}")));
        names
    }
}

fn product(words: impl IntoIterator<Item = Word>) -> Word {
    words.into_iter().fold(Word::identity(), |acc, w| acc.multiply(&w))
}

fn inv(w: Word) -> Word {
    w.invert()
}

/// Name given to atlas presentations of `P_n(RP2)`.
pub fn rp2_name(n: usize) -> String {
    format!("P{n}(RP2)")
}

/// The presentation of `P_n(RP2)` with generators `B_ij`, `rho_k` and the
/// four relation families (a)–(d).
///
/// Relators are emitted family by family, (a) through (d), each in
/// lexicographic order of its index tuple: `(r, s, i, j)` for (a), `(i, j)`
/// for (b), `i` for (c), `(i, j, k)` for (d). Only the index patterns listed
/// for family (a) produce relators.
pub fn pure_braid_rp2(n: usize) -> Result<Presentation, AtlasError> {
    check_strands(n)?;
    let l = Rp2Layout { n };
    let alphabet = Alphabet::new(l.names()).expect("generated names are valid");
    let mut relators = Vec::new();
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();

    // (a) B_rs B_ij B_rs^-1 = rhs
    for &(r, s) in &pairs {
        for &(i, j) in &pairs {
            let rhs = if i < r && s < j {
                Some(l.b(i, j))
            } else if r < i && i == s && s < j {
                Some(product([inv(l.b(i, j)), inv(l.b(r, j)), l.b(i, j), l.b(r, j), l.b(i, j)]))
            } else if i == r && r < s && s < j {
                Some(product([inv(l.b(s, j)), l.b(i, j), l.b(s, j)]))
            } else if r < i && i < s && s < j {
                Some(product([
                    inv(l.b(s, j)),
                    inv(l.b(r, j)),
                    l.b(s, j),
                    l.b(r, j),
                    l.b(i, j),
                    inv(l.b(r, j)),
                    inv(l.b(s, j)),
                    l.b(r, j),
                    l.b(s, j),
                ]))
            } else {
                None
            };
            if let Some(rhs) = rhs {
                let lhs = product([l.b(r, s), l.b(i, j), inv(l.b(r, s))]);
                relators.push(lhs.multiply(&rhs.invert()));
            }
        }
    }
    // (b) rho_i rho_j rho_i^-1 = rho_j^-1 B_ij^-1 rho_j^2
    for &(i, j) in &pairs {
        let lhs = product([l.rho(i), l.rho(j), inv(l.rho(i))]);
        let rhs = product([inv(l.rho(j)), inv(l.b(i, j)), l.rho(j).pow(2)]);
        relators.push(lhs.multiply(&rhs.invert()));
    }
    // (c) rho_i^2 = B_1i ... B_{i-1,i} B_{i,i+1} ... B_in
    for i in 1..=n {
        let rhs = product((1..i).map(|a| l.b(a, i)).chain((i + 1..=n).map(|b| l.b(i, b))));
        relators.push(l.rho(i).pow(2).multiply(&rhs.invert()));
    }
    // (d) rho_k B_ij rho_k^-1 for k != j
    for &(i, j) in &pairs {
        for k in 1..=n {
            if k == j {
                continue;
            }
            let rhs = if j < k || k < i {
                l.b(i, j)
            } else if k == i {
                product([inv(l.rho(j)), inv(l.b(i, j)), l.rho(j)])
            } else {
                product([
                    inv(l.rho(j)),
                    inv(l.b(k, j)),
                    l.rho(j),
                    inv(l.b(k, j)),
                    l.b(i, j),
                    l.b(k, j),
                    inv(l.rho(j)),
                    l.b(k, j),
                    l.rho(j),
                ])
            };
            let lhs = product([l.rho(k), l.b(i, j), inv(l.rho(k))]);
            relators.push(lhs.multiply(&rhs.invert()));
        }
    }
    Ok(Presentation::new(rp2_name(n), alphabet, relators).expect("relators use the generated alphabet"))
}

/// If `p` is exactly the atlas presentation of `P_n(RP2)`, returns `n`.
pub fn recognize_rp2(p: &Presentation) -> Option<usize> {
    let n: usize = p.name().strip_prefix('P')?.strip_suffix("(RP2)")?.parse().ok()?;
    (n >= 1 && pure_braid_rp2(n).ok()? == *p).then_some(n)
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<(), AtlasError> {
    check_strands(n)?;
    if 1 <= i && i < j && j <= n {
        Ok(())
    } else {
        Err(AtlasError::InvalidIndex(format!("need 1 <= i < j <= n, got i={i}, j={j}, n={n}")))
    }
}

/// `B_ij` expressed in the `rho` generators: `rho_j rho_i^-1 rho_j^-1 rho_i`.
pub fn b_ij_as_rho(n: usize, i: usize, j: usize) -> Result<Word, AtlasError> {
    check_pair(n, i, j)?;
    let l = Rp2Layout { n };
    Ok(product([l.rho(j), inv(l.rho(i)), inv(l.rho(j)), l.rho(i)]))
}

/// The generator `B_ij` of `P_n(RP2)`.
pub fn b_generator(n: usize, i: usize, j: usize) -> Result<Word, AtlasError> {
    check_pair(n, i, j)?;
    Ok(Rp2Layout { n }.b(i, j))
}

/// The generator `rho_k` of `P_n(RP2)`.
pub fn rho_generator(n: usize, k: usize) -> Result<Word, AtlasError> {
    check_strands(n)?;
    if !(1..=n).contains(&k) {
        return Err(AtlasError::InvalidIndex(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    Ok(Rp2Layout { n }.rho(k))
}

/// The two expressions of a factor of the central element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauForm {
    /// `B_{i,i+1} ... B_{i,n}`
    B,
    /// `B_{i-1,i}^-1 ... B_{1,i}^-1 rho_i^2`
    Rho,
}

/// Factor `tau_{n,i}` of the central element, in the requested form. The two
/// forms are equal in the group but differ as free words.
pub fn tau_component(n: usize, i: usize, form: TauForm) -> Result<Word, AtlasError> {
    check_strands(n)?;
    if !(1..=n).contains(&i) {
        return Err(AtlasError::InvalidIndex(format!("need 1 <= i <= n, got i={i}, n={n}")));
    }
    let l = Rp2Layout { n };
    Ok(match form {
        TauForm::B => product((i + 1..=n).map(|b| l.b(i, b))),
        TauForm::Rho => product((1..i).rev().map(|a| inv(l.b(a, i)))).multiply(&l.rho(i).pow(2)),
    })
}

/// `tau_n = tau_{n,1} ... tau_{n,n}` with B-form factors.
pub fn tau_n(n: usize) -> Result<Word, AtlasError> {
    tau_n_with(n, TauForm::B)
}

pub fn tau_n_with(n: usize, form: TauForm) -> Result<Word, AtlasError> {
    check_strands(n)?;
    (1..=n).try_fold(Word::identity(), |acc, i| Ok(acc.multiply(&tau_component(n, i, form)?)))
}

/// `<rho1, ..., rhok | rho1^2 ... rhok^2>`, the fundamental group of `N_k`.
pub fn pi1_nonorientable(k: usize) -> Result<Presentation, AtlasError> {
    if k < 1 {
        return Err(AtlasError::InvalidSurface("nonorientable genus must be at least 1".into()));
    }
    let alphabet = Alphabet::new((1..=k).map(|j| format!("rho{j}"))).expect("valid names");
    let relator = Word::from_syllables((0..k).map(|g| (g, 2)));
    Ok(Presentation::new(format!("pi1(N{k})"), alphabet, [relator]).expect("valid relator"))
}

/// `<x, y | x^2 = y^2>`, the Klein bottle group.
pub fn klein_presentation() -> Presentation {
    Presentation::from_strings("pi1(klein)", &["x", "y"], &["x^2 = y^2"]).expect("static presentation")
}

/// `<a, b | a b a^-1 b^-1>`, the torus group.
pub fn torus_presentation() -> Presentation {
    Presentation::from_strings("pi1(torus)", &["a", "b"], &["a b a^-1 b^-1"]).expect("static presentation")
}

/// `<rho1, rho2 | rho1^2 = rho2^2, rho1^4, rho1 rho2 rho1^-1 = rho2^-1>`.
pub fn quaternion_presentation() -> Presentation {
    Presentation::from_strings("Q8", &["rho1", "rho2"], &["rho1^2 = rho2^2", "rho1^4", "rho1 rho2 rho1^-1 = rho2^-1"])
        .expect("static presentation")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterKind {
    Trivial,
    FreeAbelianRank2,
    CyclicGenerated,
    FiniteAsStated,
}

impl CenterKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CenterKind::Trivial => "trivial",
            CenterKind::FreeAbelianRank2 => "free-abelian-rank-2",
            CenterKind::CyclicGenerated => "cyclic-generated",
            CenterKind::FiniteAsStated => "finite-as-stated",
        }
    }
}

/// The center of `P_n(M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterDescription {
    pub kind: CenterKind,
    /// Generator words over the matching atlas presentation, when one exists.
    pub generators: Vec<Word>,
    /// Names of generators that have no word realization here.
    pub symbolic_generators: Vec<String>,
    pub structure: String,
}

/// Center of the pure braid group `P_n(surface)`.
///
/// Word generators are over `pure_braid_rp2(n)` for the projective plane and
/// over `torus_presentation()` for the torus at `n = 1`. The sphere entry for
/// `n >= 3` is recorded as the stated structure `Z_2^2`.
pub fn center_table(surface: SurfaceKind, n: usize) -> Result<CenterDescription, AtlasError> {
    check_strands(n)?;
    let trivial = || CenterDescription {
        kind: CenterKind::Trivial,
        generators: vec![],
        symbolic_generators: vec![],
        structure: "1".into(),
    };
    Ok(match (surface.is_orientable(), surface.genus()) {
        (true, 0) if n <= 2 => trivial(),
        (true, 0) => CenterDescription {
            kind: CenterKind::FiniteAsStated,
            generators: vec![],
            symbolic_generators: vec![],
            structure: "Z_2^2".into(),
        },
        (true, 1) => CenterDescription {
            kind: CenterKind::FreeAbelianRank2,
            generators: if n == 1 { vec![Word::generator(0), Word::generator(1)] } else { vec![] },
            symbolic_generators: vec!["a~".into(), "b~".into()],
            structure: "<a~, b~ | a~ b~ = b~ a~>".into(),
        },
        (true, _) => trivial(),
        (false, 1) if n == 1 => CenterDescription {
            kind: CenterKind::CyclicGenerated,
            generators: vec![Word::generator(0)],
            symbolic_generators: vec![],
            structure: "Z_2 (whole group)".into(),
        },
        (false, 1) => CenterDescription {
            kind: CenterKind::CyclicGenerated,
            generators: vec![tau_n(n)?],
            symbolic_generators: vec![],
            structure: format!("<tau_{n}>"),
        },
        (false, _) => trivial(),
    })
}

/// The strand-forgetting map `P_n(RP2) -> P_m(RP2)` keeping strands
/// `1..=m`: generators with every index `<= m` map to themselves, all others
/// to the identity. Returned unverified.
pub fn forget_strands_hom(n: usize, m: usize) -> Result<GroupHom, AtlasError> {
    check_strands(m)?;
    if m >= n {
        return Err(AtlasError::InvalidIndex(format!("need 1 <= m < n, got m={m}, n={n}")));
    }
    let source = pure_braid_rp2(n)?;
    let target = pure_braid_rp2(m)?;
    let (ls, lt) = (Rp2Layout { n }, Rp2Layout { n: m });
    let mut images = vec![Word::identity(); source.generator_count()];
    for i in 1..=m {
        for j in i + 1..=m {
            images[ls.b_index(i, j)] = lt.b(i, j);
        }
        images[ls.rho_index(i)] = lt.rho(i);
    }
    Ok(GroupHom::new(source, target, images).expect("images over target alphabet"))
}
