//! Library surface of the command-line front end: the region-expression
//! parser and AST, run configuration, operator persistence, the command
//! implementations, and the tooling verification check. The `regionops`
//! binary is a thin argument-parsing wrapper over [`commands`].

pub mod ast;
pub mod commands;
pub mod config;
pub mod errors;
pub mod opio;
pub mod parser;
pub mod toolcheck;
