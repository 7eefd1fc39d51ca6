//! Affine structures on ringed spaces.
//!
//! The crate computes with the building blocks of affine structures at desk
//! scale: exact arithmetic for small commutative rings and number fields,
//! prime spectra as finite topological spaces, pseudogroups of affine
//! transformations closed under inverses, identities, localization-induced
//! maps and composites, affine atlases with their validation and
//! compatibility predicates, basis sheaves and scheme extensions, canonical
//! pseudogroups and associate schemes, and the quotient-gluing machinery that
//! compares spaces and schemes through their whole sets of affine structures.
//!
//! Everything is exact: finite rings work on canonical residue coordinates,
//! number fields on vectors of big rationals. All values are immutable after
//! construction and every operation is a pure function of its inputs.

pub mod atlas;
pub mod canonical;
pub mod error;
pub mod gluing;
pub mod pseudogroup;
pub mod ring;
pub mod sheaf;
pub mod spectrum;
pub mod topology;

pub use error::{AtlasError, GlueError, HomError, PseudoError, RingError, SheafError};
pub use ring::{Ideal, Ring, RingCtor, RingElement, RingHom, RingId, RingIso, RingPresentation};
pub use topology::{Homeo, PointId, TopSpace};
