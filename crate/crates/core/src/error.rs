use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("enumeration budget exceeded: {needed} > cap {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("invalid preorder: {0}")]
    InvalidPreorder(String),

    #[error("unsupported group for this family: {0}")]
    UnsupportedGroup(String),

    #[error("{group} is not a member of {family}")]
    NotMember { group: String, family: String },

    #[error("{0} has no essentially finite filtration")]
    NoEssentiallyFiniteFiltration(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("undecidable within cap {cap}: {what}")]
    UndecidableAtCap { what: String, cap: u64 },

    #[error("unsupported space term: {0}")]
    UnsupportedTerm(String),

    #[error("{sub} is not downward closed in {ambient}")]
    NotDownwardClosed { sub: String, ambient: String },

    #[error("missing metadata: {0}")]
    NeedsMetadata(String),

    #[error("operands belong to different families")]
    CrossFamily,

    #[error("not a certified prime: {0}")]
    NotCertifiedPrime(String),

    #[error("classification violation: {0}")]
    ClassificationViolation(String),

    #[error("inconsistent action data: {0}")]
    InconsistentAction(String),

    #[error("naturality violation: {0}")]
    NaturalityViolation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse_at(input: &str, offset: usize, message: impl Into<String>) -> Self {
        let before = &input[..offset.min(input.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
