pub mod closed_form;
pub mod eigensolver;
pub mod engine;
pub mod error;
pub mod jet;
pub mod oracle;
pub mod potential;
pub mod problems;

pub use error::{Error, Result};
pub use jet::Jet;
pub use potential::{parse_potential, PotentialExpression};
pub use problems::Problem;
