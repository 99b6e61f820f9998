use thiserror::Error;

/// Errors produced by the simulation and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("layout error: {0}")]
    Layout(String),

    #[error("degenerate post-selection: success probability {0:e} is below threshold")]
    DegeneratePostSelection(f64),

    #[error("degenerate post-selection for logical input {input}: success probability {probability:e}")]
    DegenerateRow { input: String, probability: f64 },

    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: String, right: String },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: duplicate record for basis {basis}, input {input}")]
    DuplicateRecord {
        line: usize,
        basis: String,
        input: String,
    },

    #[error("basis {basis} is missing input {input}")]
    MissingRecord { basis: String, input: String },

    #[error("basis {0} not present in count set")]
    MissingBasis(String),

    #[error("input {input} of basis {basis} has zero total counts after subtraction")]
    ZeroTotal { basis: String, input: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("fit error: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
