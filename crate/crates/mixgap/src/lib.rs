//! Command-line front end for `mixgap-core`: file formats, reports and the
//! acceptance battery.

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod io;
pub mod report;
