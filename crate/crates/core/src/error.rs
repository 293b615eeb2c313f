use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("boundary set is empty")]
    EmptyBoundary,
    #[error("boundary must be a single vertex, found {0}")]
    NonSingletonBoundary(usize),
    #[error("bond configuration has {got} entries, graph has {expected} edges")]
    BondLength { expected: usize, got: usize },
    #[error("graph is not a tree")]
    NonTree,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("detailed balance violated at ({a}, {b}): {lhs} != {rhs}")]
    DetailedBalance { a: usize, b: usize, lhs: f64, rhs: f64 },
    #[error("transition kernel row {row} sums to {sum}")]
    NonStochastic { row: usize, sum: f64 },
    #[error("table is not an involution: {0}")]
    NotInvolution(String),
    #[error("reflection axiom violated: {0}")]
    ReflectionAxiom(String),
    #[error("state space too large: {count} configurations exceeds limit {limit}")]
    StateSpaceOverflow { count: f64, limit: f64 },
    #[error("incompatible models: {0}")]
    Incompatible(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("configuration has zero density: {0}")]
    ZeroDensity(String),
    #[error("sampler failure: {0}")]
    Sampler(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
