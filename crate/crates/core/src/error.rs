use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero inverse")]
    ZeroInverse,
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("beyond precision: j = {j} exceeds N = {n}")]
    BeyondPrecision { j: u32, n: u32 },
    #[error("domain: {0}")]
    Domain(String),
    #[error("EXP divergence: argument valuation {0} outside the convergence disc")]
    ExpDivergence(i64),
    #[error("unsupported parameters: {0}")]
    Parameters(String),
    #[error("tail: {0}")]
    Tail(String),
    #[error("not L_q: {0}")]
    NotLq(String),
    #[error("grid incomplete: no value at index {0}")]
    GridIncomplete(u64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("index: l = {l} exceeds m = {m}")]
    Index { l: u32, m: u32 },
    #[error("no contraction on ball {0}")]
    NoContraction(String),
    #[error("decay: {0}")]
    Decay(String),
    #[error("no limit at precision: {0}")]
    NoLimit(String),
    #[error("path not C1 at precision: {0}")]
    NotC1(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
