use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed group descriptor: {0}")]
    MalformedSpec(String),

    #[error("rewriting system, line {line}: {message}")]
    RewritingParse { line: usize, message: String },

    #[error("rule {index} ({rule}) is not shortlex-oriented")]
    NotShortlexOriented { index: usize, rule: String },

    #[error("payload kind mismatch: {0}")]
    PayloadMismatch(String),

    #[error("relation check failed: {0}")]
    RelationCheck(String),

    #[error("{op} is not supported for {kind} models")]
    Unsupported { op: &'static str, kind: String },

    #[error("rewriting system is not confluent ({0} critical pairs do not join)")]
    NonConfluent(usize),

    #[error("ball of radius {radius} exceeds the cap of {cap} elements")]
    ResourceCap { radius: usize, cap: usize },

    #[error("exact computation needs {work} operations, budget is {budget}; use sampled mode")]
    BudgetExceeded { work: u128, budget: u128 },

    #[error("operation requires a finite group")]
    InfiniteModel,

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("equation reduces to the empty word")]
    VacuousEquation,

    #[error("tuple has {got} entries, the system has arity {need}")]
    Arity { got: usize, need: usize },

    #[error("element {0} is not certified to have infinite order")]
    NotInfiniteOrder(String),

    #[error("need at least {need} data points, got {got}")]
    TooFewPoints { got: usize, need: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
