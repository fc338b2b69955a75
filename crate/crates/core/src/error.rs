use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("algebra has no blocks")]
    EmptyBlocks,
    #[error("block {index} has dimension 0")]
    ZeroDimension { index: usize },
    #[error("block {index} has weight {weight} < 1")]
    WeightBelowOne { index: usize, weight: f64 },
    #[error("weighted dimension sum {sum} does not match delta^2 = {expected}")]
    TraceMismatch { sum: f64, expected: f64 },
    #[error("delta must be positive and finite, got {0}")]
    BadDelta(f64),
    #[error("operands belong to different algebras ({left} vs {right})")]
    AlgebraMismatch { left: String, right: String },
    #[error("block shapes do not match algebra {algebra}: {detail}")]
    ShapeMismatch { algebra: String, detail: String },
    #[error("element contains non-finite entries")]
    NonFinite,
    #[error("p must be positive, got {0}")]
    NonPositiveP(f64),
    #[error("element is not self-adjoint (deviation {0:e})")]
    NotSelfAdjoint(f64),
    #[error("element is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("element is zero")]
    ZeroElement,
    #[error("order {0} is within 1e-6 of 1; use the limit formula")]
    PTooCloseToOne(f64),
    #[error("group order must be at least 2, got {0}")]
    BadOrder(usize),
    #[error("invalid irrep table: {0}")]
    InvalidIrrepTable(String),
    #[error("delta {0} is below sqrt(2)")]
    DeltaTooSmall(f64),
    #[error("delta {0} is outside [sqrt(2), 2]")]
    DeltaOutOfRange(f64),
    #[error("subset is not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("operation requires a {expected} model, got {actual}")]
    WrongModelKind { expected: &'static str, actual: String },
    #[error("lambda {lambda} is not coprime to {n}")]
    LambdaNotCoprime { lambda: i64, n: usize },
    #[error("group element index {index} out of range for order {order}")]
    BadGroupElement { index: usize, order: usize },
    #[error("p = {0} outside the admissible range")]
    POutOfRange(f64),
    #[error("order p/2 or q/2 is within 1e-6 of 1 (p = {p}, q = {q})")]
    DegenerateOrder { p: f64, q: f64 },
    #[error("element must satisfy ||x||_2 = 1, got {0}")]
    NotNormalized(f64),
    #[error("(1/p, 1/q) = ({inv_p}, {inv_q}) lies outside 1/p + 1/q >= 1")]
    OutOfRegion { inv_p: f64, inv_q: f64 },
    #[error("||x||_inf = {0} exceeds 1")]
    NormTooLarge(f64),
    #[error("grid must lie entirely inside (0,1) or inside (1,inf)")]
    GridStraddlesOne,
    #[error("reference element is not a biprojection")]
    NotABiprojection,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}
