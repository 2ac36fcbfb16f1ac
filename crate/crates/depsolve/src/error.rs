use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed dependency: {0}")]
    Malformed(String),
    #[error("duplicate relation `{0}`")]
    DuplicateRelation(String),
    #[error("attribute `{0}` declared more than once")]
    DuplicateAttribute(String),
    #[error("expected only functional dependencies and independence atoms")]
    NotFdIa,
    #[error("expected only inclusion dependencies and independence atoms")]
    NotIndIa,
    #[error("expected unary functional and inclusion dependencies")]
    NotUnary,
    #[error("expected a single relation schema")]
    NotUniRelational,
    #[error("unsupported query: {0}")]
    UnsupportedQuery(String),
    #[error("{0} attributes exceed the enumeration limit of {1}")]
    TooManyAttributes(usize, usize),
    #[error("product of {0} rows exceeds the cap of {1}")]
    CombinatorialBlowup(usize, usize),
    #[error("budget exhausted after {0} steps")]
    BudgetExceeded(usize),
    #[error("premises do not match rule {0}")]
    SchemaMismatch(String),
    #[error("no complete engine for {0}")]
    UnsupportedClass(String),
    #[error("relation `{0}` is empty")]
    EmptyRelation(String),
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow { row: usize, found: usize, expected: usize },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
