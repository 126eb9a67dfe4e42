//! Synthetic data: league tables from a strength model and attendance
//! panels from a known error-correction process.

pub mod dgp;
pub mod league;

pub use dgp::{simulate_dgp, DgpParams, DgpPanel};
pub use league::{simulate_league, LeagueParams};

/// Country coverage of the historical dataset: (code, first season, last
/// season).
pub const TABLE1_COVERAGE: [(&str, i32, i32); 8] = [
    ("BEL", 1966, 2008),
    ("ENG", 1959, 2008),
    ("FRA", 1959, 2008),
    ("GER", 1963, 2008),
    ("GRE", 1959, 2008),
    ("ITA", 1959, 2008),
    ("NOR", 1963, 2008),
    ("SWE", 1959, 2008),
];
