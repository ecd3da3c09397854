//! Realisability of choreographies under asynchronous communication models.

pub mod automata;
pub mod checkers;
pub mod complement;
pub mod error;
pub mod global;
pub mod models;
pub mod msc;
pub mod oracle;
mod par;
mod semantics;
pub mod traces;

pub use error::{Error, Result};
pub use par::is_parallel;
