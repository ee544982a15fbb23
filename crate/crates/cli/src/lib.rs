//! Pipelines behind the `critorbit` command line: curve construction,
//! monodromy, escape-region atlas, transition matrices and kneading.

pub mod commands;
pub mod config;
