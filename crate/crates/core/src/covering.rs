//! Free finite group actions on closed surfaces.
//!
//! If a group of order `l` acts freely on a closed surface `M`, then
//! `l * chi(M/G) = chi(M)`. This module enumerates the quotient surfaces
//! allowed by that count, checks necessary conditions for `l`-sheeted
//! coverings, and describes the kernel of the map from the equivariant
//! (pure) mapping class group with `n` marked orbits to the one with none.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::atlas::{
    klein_presentation, pure_braid_rp2, quaternion_presentation, tau_n, torus_presentation, AtlasError, SurfaceKind,
};
use crate::coset::{todd_coxeter, DEFAULT_MAX_COSETS};
use crate::presentation::{hom_check, GroupHom, HomCheck, Presentation, PresentationError};
use crate::word::{commutator, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoveringError {
    #[error("group order must be at least 1")]
    InvalidOrder,
    #[error("strand count must be at least 1")]
    InvalidStrands,
    #[error("torus parameters (q, r) are required when the quotient is the torus")]
    MissingTorusParams,
    #[error("torus parameters are only meaningful when the quotient is the torus")]
    UnexpectedTorusParams,
    #[error("torus parameters must be positive")]
    InvalidTorusParams,
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

pub fn euler_char(s: SurfaceKind) -> i64 {
    s.euler_characteristic()
}

/// Exact quotient `num / den` if it is an integer.
fn exact_div(num: i64, den: i64) -> Option<i64> {
    (num % den == 0).then(|| num / den)
}

/// Quotient surfaces `M/G` for a free action of a group of order `l`.
///
/// For orientable `M = S_g` the candidates are `S_{(g-1)/l+1}` and
/// `N_{2(g-1)/l+2}`; for nonorientable `M = N_k` they are
/// `S_{(k-2)/(2l)+1}` and `N_{(k-2)/l+2}`, each kept only when the genus is
/// an integer in range. With `strict_orientability`, candidates that cannot
/// be covered by `M` are dropped: an orientable base under a nonorientable
/// `M`, and a nonorientable base under an orientable `M` with `l` odd (such
/// a cover factors through the orientation double cover).
pub fn quotient_candidates(
    m: SurfaceKind,
    l: u64,
    strict_orientability: bool,
) -> Result<Vec<SurfaceKind>, CoveringError> {
    if l < 1 {
        return Err(CoveringError::InvalidOrder);
    }
    let l = l as i64;
    let g = m.genus() as i64;
    let (s_genus, n_genus) = if m.is_orientable() {
        (exact_div(g - 1, l).map(|x| x + 1), exact_div(2 * (g - 1), l).map(|x| x + 2))
    } else {
        (exact_div(g - 2, 2 * l).map(|x| x + 1), exact_div(g - 2, l).map(|x| x + 2))
    };
    let mut out = Vec::new();
    if let Some(s) = s_genus.filter(|&s| s >= 0) {
        out.push(SurfaceKind::orientable(s as u32));
    }
    if let Some(k) = n_genus.filter(|&k| k >= 1) {
        out.push(SurfaceKind::nonorientable(k as u32)?);
    }
    out.retain(|c| l * euler_char(*c) == euler_char(m));
    if strict_orientability {
        out.retain(|c| {
            let orientable_base_bad = c.is_orientable() && !m.is_orientable();
            let odd_lift_bad = !c.is_orientable() && m.is_orientable() && l % 2 == 1;
            !orientable_base_bad && !odd_lift_bad
        });
    }
    Ok(out)
}

/// Abelian groups `Z/q + Z/r` of order `l` with `q | r`.
pub fn torus_action_forms(l: u64) -> Result<Vec<(u64, u64)>, CoveringError> {
    if l < 1 {
        return Err(CoveringError::InvalidOrder);
    }
    Ok((1..=l)
        .take_while(|q| q * q <= l)
        .filter(|&q| l.is_multiple_of(q) && (l / q).is_multiple_of(q))
        .map(|q| (q, l / q))
        .collect())
}

/// A verified homomorphism from the cover's fundamental group onto a finite
/// group in which the image of a commutator is nontrivial.
#[derive(Debug, Clone)]
pub struct NonAbelianWitness {
    pub hom: GroupHom,
    pub commutator: Word,
    pub commutator_image: Word,
    pub target_order: usize,
}

/// Why a covering is ruled out.
#[derive(Debug, Clone)]
pub enum Certificate {
    EulerCharacteristic { cover: i64, base: i64, sheets: u64 },
    OrientationLift,
    NonAbelianQuotient(Box<NonAbelianWitness>),
}

impl Certificate {
    pub fn name(&self) -> &'static str {
        match self {
            Certificate::EulerCharacteristic { .. } => "euler-characteristic",
            Certificate::OrientationLift => "orientation-lift",
            Certificate::NonAbelianQuotient(_) => "non-abelian-quotient",
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::EulerCharacteristic { cover, base, sheets } => {
                write!(f, "euler-characteristic: {sheets} * {base} != {cover}")
            }
            Certificate::OrientationLift => {
                f.write_str("orientation-lift: a cover of an orientable surface is orientable")
            }
            Certificate::NonAbelianQuotient(w) => {
                let src = w.hom.source();
                write!(
                    f,
                    "non-abelian-quotient: {} maps onto a group of order {} where [{}] is nontrivial, but the base group is abelian",
                    src.name(),
                    w.target_order,
                    src.format(&w.commutator)
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum CoverDecision {
    Impossible(Certificate),
    NotExcluded,
}

impl CoverDecision {
    pub fn is_impossible(&self) -> bool {
        matches!(self, CoverDecision::Impossible(_))
    }
}

/// Surfaces whose fundamental group is abelian.
fn has_abelian_pi1(s: SurfaceKind) -> bool {
    matches!((s.is_orientable(), s.genus()), (true, 0) | (true, 1) | (false, 1))
}

/// Klein bottle group onto the quaternion group, `x -> rho1`, `y -> rho2`.
pub fn klein_quaternion_witness() -> Option<NonAbelianWitness> {
    let klein = klein_presentation();
    let q8 = quaternion_presentation();
    let table = todd_coxeter(&q8, &[], DEFAULT_MAX_COSETS).ok()?;
    let hom = GroupHom::new(klein.clone(), q8, vec![Word::generator(0), Word::generator(1)]).ok()?;
    let hom = match hom_check(&hom, &table) {
        HomCheck::Verified(h) => *h,
        _ => return None,
    };
    let comm = commutator(&Word::generator(0), &Word::generator(1));
    let image = hom.apply(&comm).ok()?;
    if table.word_equal_finite(&image, &Word::identity()).ok()? {
        return None;
    }
    Some(NonAbelianWitness { hom, commutator: comm, commutator_image: image, target_order: table.group_order().ok()? })
}

/// Necessary conditions for an `l`-sheeted covering `cover -> base`.
///
/// Never asserts that a covering exists.
pub fn can_cover(cover: SurfaceKind, base: SurfaceKind, l: u64) -> Result<CoverDecision, CoveringError> {
    if l < 1 {
        return Err(CoveringError::InvalidOrder);
    }
    if l as i64 * euler_char(base) != euler_char(cover) {
        return Ok(CoverDecision::Impossible(Certificate::EulerCharacteristic {
            cover: euler_char(cover),
            base: euler_char(base),
            sheets: l,
        }));
    }
    // a subgroup of an abelian group is abelian
    if has_abelian_pi1(base) && cover == SurfaceKind::KLEIN_BOTTLE {
        if let Some(w) = klein_quaternion_witness() {
            return Ok(CoverDecision::Impossible(Certificate::NonAbelianQuotient(Box::new(w))));
        }
    }
    if base.is_orientable() && !cover.is_orientable() {
        return Ok(CoverDecision::Impossible(Certificate::OrientationLift));
    }
    Ok(CoverDecision::NotExcluded)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelCase {
    /// The whole braid group of the quotient.
    Full,
    /// The braid group modulo the center of the pure braid group.
    ModCenter,
    /// The braid group modulo `<a~^q, b~^r>`.
    ModLattice,
}

impl KernelCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelCase::Full => "full",
            KernelCase::ModCenter => "mod-center",
            KernelCase::ModLattice => "mod-lattice",
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelDescription {
    pub case: KernelCase,
    pub quotient: SurfaceKind,
    pub n: usize,
    pub pure: bool,
    pub torus_params: Option<(u64, u64)>,
    pub presentation: Option<Presentation>,
    pub symbolic: String,
}

impl KernelDescription {
    /// JSON object `{case, base: {surface, orientable, genus, n, pure}, q, r,
    /// presentation_file?}`; `q` and `r` are null outside the torus case.
    pub fn to_json(&self, presentation_file: Option<&str>) -> Value {
        let mut v = json!({
            "case": self.case.as_str(),
            "base": {
                "surface": self.quotient.label(),
                "orientable": self.quotient.is_orientable(),
                "genus": self.quotient.genus(),
                "n": self.n,
                "pure": self.pure,
            },
            "q": self.torus_params.map(|p| p.0),
            "r": self.torus_params.map(|p| p.1),
        });
        if let Some(path) = presentation_file {
            v["presentation_file"] = Value::String(path.to_string());
        }
        v
    }
}

/// Kernel of the forgetful map on equivariant mapping class groups for a
/// free action with quotient surface `quotient`.
///
/// * `S_g` (`g >= 2`), `N_k` (`k >= 2`): the braid group itself.
/// * sphere, projective plane: the braid group modulo the center of the
///   *pure* braid group, for the full braid group too.
/// * torus: the braid group modulo `<a~^q, b~^r>`.
///
/// An explicit presentation is attached for the projective plane (pure, any
/// `n`; full only at `n = 1`, where both groups coincide) and for the torus
/// at `n = 1`.
pub fn kernel_description(
    quotient: SurfaceKind,
    n: usize,
    pure: bool,
    torus_params: Option<(u64, u64)>,
) -> Result<KernelDescription, CoveringError> {
    if n < 1 {
        return Err(CoveringError::InvalidStrands);
    }
    let is_torus = quotient == SurfaceKind::TORUS;
    match (is_torus, torus_params) {
        (true, None) => return Err(CoveringError::MissingTorusParams),
        (false, Some(_)) => return Err(CoveringError::UnexpectedTorusParams),
        (true, Some((q, r))) if q == 0 || r == 0 => return Err(CoveringError::InvalidTorusParams),
        _ => {}
    }
    let label = quotient.label();
    let braid = if pure { format!("P{n}({label})") } else { format!("B{n}({label})") };
    let pure_center = format!("Z(P{n}({label}))");
    let (case, presentation, symbolic) = match (quotient.is_orientable(), quotient.genus()) {
        (true, 1) => {
            let (q, r) = torus_params.unwrap();
            let pres = if n == 1 {
                let t = torus_presentation();
                Some(t.quotient(&[Word::power_of(0, q as i64), Word::power_of(1, r as i64)])?)
            } else {
                None
            };
            (KernelCase::ModLattice, pres, format!("{braid}/<a~^{q}, b~^{r}>"))
        }
        (true, 0) => {
            let symbolic = if n <= 2 {
                format!("{braid}/{pure_center} = {braid} (trivial center)")
            } else {
                format!("{braid}/{pure_center}")
            };
            (KernelCase::ModCenter, None, symbolic)
        }
        (false, 1) => {
            let pres = if n == 1 {
                // the center is the whole group Z/2
                Some(pure_braid_rp2(1)?.quotient(&[Word::generator(0)])?)
            } else if pure {
                Some(pure_braid_rp2(n)?.quotient(&[tau_n(n)?])?)
            } else {
                None
            };
            (KernelCase::ModCenter, pres, format!("{braid}/{pure_center}"))
        }
        _ => (KernelCase::Full, None, braid),
    };
    Ok(KernelDescription { case, quotient, n, pure, torus_params, presentation, symbolic })
}
