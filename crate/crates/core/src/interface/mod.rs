//! Facades over the engine: the `policy-lab` command line and the JSON/HTTP
//! service. Both share the same loading and engine paths, so identical
//! inputs produce identical cells.

pub mod cli;
pub mod service;
