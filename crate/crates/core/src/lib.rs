//! Vulnerability data-flow graphs built from SAST taint paths, and the
//! graph metrics used to rank files for remediation.

pub mod cli;
pub mod error;
pub mod export;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod prioritize;
pub mod structure;

pub use error::{Error, Result};
