use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

/// Broad failure class, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
    Config,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("duplicate rank {rank} in {country} {season}")]
    DuplicateRank {
        country: String,
        season: i32,
        rank: u32,
    },
    #[error("ranks in {country} {season} are not a permutation of 1..{n}")]
    RankPermutation { country: String, season: i32, n: usize },
    #[error("inconsistent games played in {country} {season}: team {team} played {found}, expected {expected}")]
    GamesPlayed {
        country: String,
        season: i32,
        team: String,
        expected: u32,
        found: u32,
    },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("log-domain error: {variable} = {value} is not positive for {country} {season}")]
    LogDomain {
        country: String,
        season: i32,
        variable: String,
        value: f64,
    },
    #[error("season gap in {country}: expected {expected}, found {found}")]
    SeasonGap {
        country: String,
        expected: i32,
        found: i32,
    },
    #[error("{what} = {value} out of range ({detail})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        detail: String,
    },
    #[error("insufficient overlap: {0}")]
    InsufficientOverlap(String),
    #[error("index pairing error: {0}")]
    Pairing(String),
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("series too short: need more than {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("singular design: linearly dependent columns [{}]", .columns.join(", "))]
    SingularDesign { columns: Vec<String> },
    #[error("cross-equation covariance is not positive definite and could not be repaired")]
    CovarianceNotPd,
    #[error("no error-correction term: |A(1)| = {0:e} is below 1e-8")]
    NoErrorCorrection(f64),
    #[error("argument order: best value {best} exceeds worst value {worst}")]
    ArgumentOrder { best: f64, worst: f64 },
    #[error("nothing to test: {0}")]
    NothingToTest(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Degenerate(_)
            | Error::SingularDesign { .. }
            | Error::CovarianceNotPd
            | Error::NoErrorCorrection(_)
            | Error::InsufficientOverlap(_) => ErrorKind::Numerical,
            Error::Config(_) => ErrorKind::Config,
            _ => ErrorKind::Input,
        }
    }
}
