//! Competitive-balance indices for football league tables and the
//! attendance-demand econometrics built on them.
//!
//! The crate is `no_std` (with `alloc`): file formats, parallel execution
//! and the command line live in the companion `uoh` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod econometrics;
pub mod error;
pub mod indices;
pub mod league;
pub mod linalg;
pub mod panel;
pub mod replicate;
pub mod sim;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
