//! File formats, reports and the `uoh` command line on top of `uoh-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod parallel;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
