use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("size mismatch: {0}")]
    Mismatch(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("invalid metric table: {0}")]
    InvalidMetric(String),
    #[error("matrix is not unitary: max deviation {0} exceeds tolerance")]
    NotUnitary(f64),
    #[error("matrix is singular modulo {0}")]
    Singular(u64),
    #[error("no Folner set: {0}")]
    NoFolnerSet(String),
    #[error("subgroup membership violated: {0}")]
    Membership(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("config error: {0}")]
    Config(String),
}
