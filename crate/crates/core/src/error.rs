use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("support [{a}, {b}] is not a finite interval")]
    UnboundedSupport { a: f64, b: f64 },

    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },

    #[error("relative measure undefined for the zero function")]
    ZeroFunction,

    #[error("weight/decay mismatch: weighted integrand does not decay on the grid")]
    WeightDecayMismatch,

    #[error("degree {requested} exceeds the limit {limit} ({what})")]
    DegreeTooLarge {
        requested: usize,
        limit: usize,
        what: &'static str,
    },

    #[error("Gram matrix numerically singular at degree {degree}: increase precision or lower d")]
    SingularGram { degree: usize },

    #[error("derivative order {requested} exceeds d_max = {d_max}")]
    DerivativeOrder { requested: usize, d_max: usize },

    #[error("signal outside class: {0}")]
    SignalOutsideClass(String),

    #[error("noise component has zero spectrum and cannot be normalized")]
    Unnormalizable,
}

pub type Result<T> = std::result::Result<T, Error>;
