//! The `semviz` command-line tool and HTTP service.

pub mod build;
pub mod commands;
pub mod server;

pub use commands::{run, run_query, Cli, Command, QueryOp, Request};
pub use server::router;
