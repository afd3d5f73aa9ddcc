//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// A model assumption is violated (dimension ratios, orthogonality,
    /// positive definiteness, missing spike classification).
    Constraint(String),
    /// An argument is out of range or shapes are inconsistent.
    Argument(String),
    /// The requested evaluation point lies outside the domain of the map
    /// (sub-threshold spike, zero spectral height, z in {0, 1}).
    Domain(String),
    /// A matrix is numerically rank deficient or singular.
    RankDeficient(String),
    /// The spectral parameter collides with an eigenvalue of the null matrix.
    Pole {
        z: f64,
        nearest: f64,
    },
    /// A delimited input file could not be parsed.
    CsvLoad {
        path: String,
        row: Option<usize>,
        message: String,
    },
    Io(std::io::Error),
    /// Too many replicates of a campaign failed.
    Campaign(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for violated model constraints,
    /// 3 for an exceeded campaign failure budget, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Constraint(_) => 2,
            Error::Campaign(_) => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Constraint(msg) => write!(f, "constraint violation: {msg}"),
            Error::Argument(msg) => write!(f, "argument error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::RankDeficient(msg) => write!(f, "numerical rank error: {msg}"),
            Error::Pole { z, nearest } => write!(
                f,
                "pole error: z = {z} collides with the null spectrum (nearest eigenvalue {nearest})"
            ),
            Error::CsvLoad { path, row, message } => match row {
                Some(r) => write!(f, "load error in {path}, row {r}: {message}"),
                None => write!(f, "load error in {path}: {message}"),
            },
            Error::Io(err) => write!(f, "io error: {err}"),
            Error::Campaign(msg) => write!(f, "campaign failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}
