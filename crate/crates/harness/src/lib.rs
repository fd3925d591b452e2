//! Verification campaigns, report formats and the `qp-henon` command line
//! built on the `qp-henon` core crate.

pub mod campaign;
pub mod cli;
pub mod report;
pub mod verifier;
