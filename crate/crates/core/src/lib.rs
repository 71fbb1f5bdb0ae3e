pub mod acceptance;
pub mod adversarial;
pub mod cli;
pub mod diffop;
pub mod ensemble;
pub mod error;
pub mod function;
pub mod grid;
pub mod integral;
pub mod linalg;
pub mod norms;
pub mod report;
pub mod special;
pub mod stability;
pub mod spectral;

pub use error::{Error, Result};
pub use function::FunctionRep;
pub use grid::{Interval, QuadGrid};
