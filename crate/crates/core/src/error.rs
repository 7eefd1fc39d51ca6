//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by ring construction and ring-level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("malformed presentation `{id}`: {reason}")]
    MalformedPresentation { id: String, reason: String },
    #[error("ring `{id}` has {size} elements, above the representable cap of {cap}")]
    SizeLimitExceeded { id: String, size: usize, cap: usize },
    #[error("modulus of `{id}` is reducible over F_{p}: {witness}")]
    ReducibleModulus { id: String, p: u64, witness: String },
    #[error("cannot localize at the zero element of `{ring}`")]
    ZeroElement { ring: String },
    #[error("ring `{id}` has {size} elements, above the exhaustive-search cap of {cap}")]
    TooLarge { id: String, size: usize, cap: usize },
    #[error("element does not belong to ring `{ring}`: {coords}")]
    ForeignElement { ring: String, coords: String },
    #[error("unknown ring id `{id}`")]
    UnknownRing { id: String },
}

/// Errors raised when a candidate map fails to be a homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("not additive: maps {a} + {b} inconsistently (expected {expected}, got {got})")]
    NotAdditive {
        a: String,
        b: String,
        expected: String,
        got: String,
    },
    #[error("not multiplicative: maps {a} * {b} inconsistently (expected {expected}, got {got})")]
    NotMultiplicative {
        a: String,
        b: String,
        expected: String,
        got: String,
    },
    #[error("unit not preserved: 1 maps to {got}")]
    UnitNotPreserved { got: String },
    #[error("map is not defined on generator {generator}")]
    MissingGeneratorImage { generator: String },
    #[error("map is not injective: {a} and {b} share the image {image}")]
    NotInjective { a: String, b: String, image: String },
    #[error("map is not surjective: {missing} has no preimage")]
    NotSurjective { missing: String },
    #[error("rings live in different arithmetic regimes: {domain} vs {codomain}")]
    RegimeMismatch { domain: String, codomain: String },
    #[error("minimal polynomial not annihilated: f(image) = {value}")]
    MinPolyNotAnnihilated { value: String },
    #[error("inverse does not invert: {witness}")]
    InverseMismatch { witness: String },
}

/// Errors raised by topology- and spectrum-level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("space with {size} points exceeds the brute-force cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("not a homeomorphism: {reason}")]
    NotHomeomorphism { reason: String },
    #[error("point `{point}` is not in the space")]
    UnknownPoint { point: String },
}

/// Errors raised by pseudogroup closure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PseudoError {
    #[error("closure escapes the universe: {reason}")]
    UniverseEscape { reason: String },
    #[error("generator rejected: {reason}")]
    InvalidGenerator { reason: String },
}

/// Errors raised by atlas-level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("atlases live on different spaces")]
    SpaceMismatch,
    #[error("structure handles carry different pseudogroups")]
    GammaMismatch,
    #[error("chart enumeration cap exceeded: {reason}")]
    TooLarge { reason: String },
    #[error("invalid atlas: {reason}")]
    InvalidAtlas { reason: String },
}

/// Errors raised by sheaf construction and scheme comparison.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("structure is not admissible: {0}")]
    NotAdmissible(crate::sheaf::ConflictReport),
    #[error("schemes are not extensions of the same structure")]
    NotExtensionsOfSameStructure,
    #[error("base atlas invalid: {reason}")]
    InvalidBase { reason: String },
    #[error("universe escape while building sections: {reason}")]
    UniverseEscape { reason: String },
    #[error("scheme too large for exhaustive construction: {reason}")]
    TooLarge { reason: String },
    #[error("no isomorphism between sections found: {reason}")]
    SectionIsoMissing { reason: String },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
}

/// Errors raised by the gluing and relation machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlueError {
    #[error("quotient with {size} classes exceeds the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("induced map misses the point `{point}`")]
    NotSurjective { point: String },
    #[error("induced map is not injective: classes of {a} and {b} collide at {image}")]
    NotInjective { a: String, b: String, image: String },
    #[error("induced map is not open: witness open {witness}")]
    NotOpen { witness: String },
    #[error("relation mismatch: {a} and {b} are identified on one side only")]
    NotWellDefined { a: String, b: String },
    #[error("induced bijection is not a homeomorphism: {reason}")]
    NotHomeomorphism { reason: String },
    #[error("structure sets are stamped with different universes")]
    UniverseMismatch,
    #[error("missing deck witness for {domain} vs {codomain}")]
    MissingDeckWitness { domain: String, codomain: String },
    #[error("transported relations disagree at {witness}")]
    RelationMismatch { witness: String },
    #[error("spaces differ: {reason}")]
    SpaceMismatch { reason: String },
    #[error("matched charts do not cover {space}: point `{point}` missing")]
    CoverageGap { space: String, point: String },
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Ring(#[from] RingError),
}
