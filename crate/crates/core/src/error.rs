use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` has an empty precondition")]
    EmptyPreset(String),
    #[error("transition `{0}` has an empty postcondition")]
    EmptyPostset(String),
    #[error("marking mentions place index {0} which is not part of the net")]
    InvalidMarking(u32),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("exploration exceeded the state limit of {0}")]
    StateLimit(usize),
    #[error("cannot compose nets: place `{0}` occurs in more than one component")]
    OverlappingPlaces(String),
    #[error("node {0} does not belong to the branching process")]
    UnknownNode(String),
    #[error("place `{0}` is not an environment place")]
    NotEnvironmentPlace(String),
    #[error("no p-cut with all places typed exists inside the prefix for `{0}`; unfold deeper")]
    PrefixTooShallow(String),
    #[error("mcut for `{0}` is not unique inside the prefix")]
    AmbiguousMcut(String),
    #[error("game is not synthesizable: {0}")]
    InvalidGame(String),
    #[error("game is not realizable")]
    Unrealizable,
    #[error("strategy net is not safe: place `{0}` holds {1} tokens")]
    UnsafeStrategy(String, u32),
    #[error("net is not concurrency preserving: transition `{0}`")]
    NotConcurrencyPreserving(String),
    #[error("cannot decompose into slices: {0}")]
    Decomposition(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("{0}")]
    Other(String),
}
