use thiserror::Error;

use crate::multipoly::Monomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("modulus {modulus:?} is not irreducible over GF({p})")]
    Reducible { p: u32, modulus: Vec<u32> },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("basis is not linearly independent over the prime field")]
    DependentBasis,
    #[error("field of size {0} is too large for this operation")]
    FieldTooLarge(u64),
    #[error("operands live in different fields")]
    MismatchedField,
    #[error("operands have different contexts: {0}")]
    MismatchedContext(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("no field embedding from GF({from}) into GF({to})")]
    NoEmbedding { from: u64, to: u64 },
    #[error("input system contains a constant polynomial (generator {0})")]
    ConstantInInput(usize),
    #[error("no generator has degree <= {0}; Macaulay matrix is empty")]
    DegreeTooSmall(u32),
    #[error("polynomial of degree {deg} does not fit in degree {d}")]
    DegreeExceedsD { deg: u32, d: u32 },
    #[error("no Groebner basis inside W_d for d <= {d_max}; {} basis elements missing", missing.len())]
    NotReachedByDmax { d_max: u32, missing: Vec<Monomial> },
    #[error("membership clause failed: {0}")]
    MembershipFailed(String),
    #[error("polynomial set is empty or contains a constant")]
    EmptyOrConstant,
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
