use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator column {0} is zero")]
    ZeroGenerator(usize),

    #[error("the generated cone is not pointed")]
    NotPointed,

    #[error("no generators given")]
    NoGenerators,

    #[error("face count exceeds the budget of {budget}")]
    FaceBudgetExceeded { budget: usize },

    #[error("window of {points} lattice points exceeds the point budget of {budget}")]
    WindowTooLarge { points: String, budget: u64 },

    #[error("no strictly positive functional bounds the sign-constrained columns")]
    UnboundedSearch,

    #[error("{0} is not in the semigroup")]
    NotInSemigroup(String),

    #[error("face {0} has no Hilbert basis elements (apex)")]
    EmptyFaceBasis(String),

    #[error("not an antichain: face {sub:?} is contained in face {sup:?}")]
    NotAnAntichain { sub: Vec<usize>, sup: Vec<usize> },

    #[error("ray set {0:?} is not a face of the cone")]
    UnknownFace(Vec<usize>),

    #[error("face {0:?} is almost saturated; a nowhere witness needs a nowhere saturated face")]
    NotNowhereSaturated(Vec<usize>),

    #[error("no fundamental hole gives an all-hole coset inside the window for face {0:?}")]
    NoWitnessInWindow(Vec<usize>),

    #[error("construction verification failed: {0}")]
    VerificationFailed(String),

    #[error("cells must differ")]
    SameCell,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
