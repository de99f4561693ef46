//! Computational group theory for surface pure braid groups.
//!
//! Builds the pure braid group presentations of the projective plane, the
//! fundamental groups of closed surfaces, central elements and
//! strand-forgetting homomorphisms, and checks identities among them with
//! coset enumeration, Knuth–Bendix rewriting, derivation certificates and
//! Smith normal form. The [`covering`] module does Euler-characteristic
//! bookkeeping for free finite group actions on closed surfaces and
//! describes the kernels of the induced maps on equivariant mapping class
//! groups.

pub mod atlas;
pub mod cli;
pub mod coset;
pub mod covering;
pub mod presentation;
pub mod rewrite;
pub mod snf;
pub mod word;

pub use coset::{todd_coxeter, CosetTable};
pub use presentation::{hom_check, AbelianInvariants, GroupHom, HomCheck, Presentation};
pub use rewrite::{check_derivation, knuth_bendix, search_equality, DerivationChain, RewriteSystem};
pub use word::{Alphabet, Word};
