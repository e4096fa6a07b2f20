use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("point {point} is not inside the {domain}")]
    OutsideDomain { domain: String, point: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("coordinate z{index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("conj() applied to a non-constant subexpression at position {pos}")]
    ConjNonConstant { pos: usize },
    #[error("singularity in `{expr}`")]
    Singularity { expr: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("estimation engine: {0}")]
    Engine(String),
    #[error("not a self-map: image of {witness} is {image}")]
    NotSelfMap { witness: String, image: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
