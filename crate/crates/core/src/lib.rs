//! Meta-evaluation toolkit for length-controllable machine translation.

pub mod corpus;
pub mod error;
pub mod lexical;
pub mod meta_eval;
pub mod ratings;
pub mod report;
pub mod seed;
pub mod significance;
pub mod task;

pub use error::{Error, Result};
pub use task::{LengthRatio, Task};
