use thiserror::Error;

/// Every failure the engine can report.
///
/// Variants carry the names of the first offending cells in canonical order,
/// so that error messages are reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("object `{0}` has no identity")]
    MissingIdentity(String),
    #[error("identity `{morphism}` is not an endomorphism of `{object}`")]
    BadIdentity { object: String, morphism: String },
    #[error("composite `{g}` after `{f}` is missing")]
    CompositionGap { g: String, f: String },
    #[error("composite given for non-composable pair `{g}` after `{f}`")]
    NotComposable { g: String, f: String },
    #[error("conflicting composites for `{g}` after `{f}`")]
    ConflictingComposite { g: String, f: String },
    #[error("composite `{g}` after `{f}` has the wrong endpoints")]
    EndpointMismatch { g: String, f: String },
    #[error("identity law fails at `{g}` after `{f}`")]
    IdentityLaw { g: String, f: String },
    #[error("associativity fails at ({h}, {g}, {f})")]
    NonAssociative { h: String, g: String, f: String },
    #[error("no limit: {0}")]
    NoLimit(String),
    #[error("size cap {cap} exceeded while building {what}")]
    SizeCap { what: String, cap: usize },
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("invalid natural transformation: {0}")]
    InvalidTransformation(String),
    #[error("not closed: {0}")]
    NotClosed(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no right adjoint: the comma category over `{0}` has no terminal object")]
    NoAdjoint(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("pentagon fails at {0}")]
    PentagonFailure(String),
    #[error("triangle fails at {0}")]
    TriangleFailure(String),
    #[error("coherence cell is not invertible: {0}")]
    NonInvertibleCoherence(String),
    #[error("coherence fails: {0}")]
    CoherenceFailure(String),
    #[error("no certified pullback for {0}")]
    MissingCertificate(String),
    #[error("mediating morphism is not unique: {0}")]
    NonUniqueMediator(String),
    #[error("morphism does not lie over the given base morphism: {0}")]
    NotOverF(String),
    #[error("base change fails: {0}")]
    BaseChangeFails(String),
    #[error("missing finite products: {0}")]
    NoProducts(String),
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
