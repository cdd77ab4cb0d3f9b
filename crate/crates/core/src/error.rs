use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not 0 or a prime greater than 3")]
    BadCharacteristic(u64),
    #[error("field of order {p}^{k} is too large for table arithmetic")]
    FieldTooLarge { p: u32, k: u32 },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial {0} is reducible")]
    Reducible(String),
    #[error("elements belong to different algebras")]
    ParentMismatch,
    #[error("element is not a unit in factor {factor}")]
    NotAUnit { factor: usize },
    #[error("operation needs rank {expected}, algebra has rank {found}")]
    WrongRank { expected: usize, found: usize },
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("malformed description: {0}")]
    Malformed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TcaError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("N_E(e) and N_K(nu) differ")]
    NormMismatch,
    #[error("unsupported base: {0}")]
    UnsupportedBase(String),
    #[error("composition axiom violated: {0}")]
    AxiomViolation(String),
    #[error("algebras are not comparable: {0}")]
    InvariantMismatch(String),
    #[error("element is not in the embedding set X_(a,C)")]
    NotInXSet,
    #[error("enumeration of {0} elements exceeds the configured limit")]
    TooLarge(u128),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Tca(#[from] TcaError),
    #[error("cube is not reduced (needs a = 1 and e = 0)")]
    NotReduced,
    #[error("cube data is degenerate: b^2 + 4N(f) = 0")]
    Degenerate,
    #[error("matrices have different determinants")]
    DetMismatch,
    #[error("no vector with nonzero discriminant found within the search bound")]
    SearchExhausted,
    #[error("rank cannot be decided for this cube over this base")]
    Undecided,
    #[error("the group action needs the split algebra E = F^3")]
    NeedsSplit,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArthurError {
    #[error("supplied function is not a class function: {0}")]
    NotAClassFunction(String),
    #[error("inputs do not fit the case: {0}")]
    CaseMismatch(String),
}

/// Catalog validation failure with a JSON-pointer-like location.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("schema error at {location}: {message}")]
pub struct SchemaError {
    pub location: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            location: location.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("no translation word for {0}")]
    WordMissing(String),
    #[error("eigenvalue {0} is not a root of unity times a power of q")]
    UndecodableEigenvalue(String),
    #[error("family {family} is not available for case {case}")]
    FamilyUnavailable { family: String, case: String },
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
    #[error("matrix is singular")]
    Singular,
}
