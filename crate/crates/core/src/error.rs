use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the planning toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel matrix factorization failed after {attempts} jitter attempts")]
    Factorization { attempts: u32 },

    #[error("no feasible primitive paths from pose ({x:.3}, {y:.3}, {heading:.3})")]
    NoFeasiblePrimitives { x: f64, y: f64, heading: f64 },

    #[error("location ({x}, {y}) lies outside the field extent")]
    OutOfExtent { x: f64, y: f64 },

    #[error("grid file {}: line {line}: {message}", path.display())]
    GridParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("downsample factor {factor} does not divide grid {width}x{height}")]
    NonDivisible {
        factor: usize,
        width: usize,
        height: usize,
    },

    #[error("selection reached a child with no visits")]
    UnvisitedChild,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
