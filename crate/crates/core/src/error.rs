use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(&'static str),
    #[error("symbol with negative powers evaluated at zero")]
    ZeroArgument,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("root finder did not converge within {0} iterations")]
    RootsNotConverged(usize),
    #[error("roots nearly coincide (separation {0:e})")]
    NearDoubleRoot(f64),
    #[error("point lies on the symbol curve or region boundary")]
    Boundary,
    #[error("stieltjes transform requires a non-real argument")]
    RealArgument,
    #[error("size guard exceeded: {what} = {got}, limit {limit}")]
    SizeGuard {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("eigenvalue iteration did not converge")]
    EigenNotConverged,
    #[error("empty input")]
    Empty,
}
