//! Model checking for alternating-time logic with BDI-restricted strategies.

pub mod assignment;
pub mod bundled;
pub mod error;
pub mod checker;
pub mod cli;
pub mod expr;
pub mod extension;
pub mod formula;
pub mod ids;
pub mod lexer;
pub mod model_file;
pub mod oracle;
pub mod parser;
pub mod random;
pub mod stateset;
pub mod structure;

pub use error::{Error, Result};
