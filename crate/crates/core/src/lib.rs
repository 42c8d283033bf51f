pub mod amaj;
pub mod approxlp;
pub mod boolfn;
pub mod cli;
pub mod compose;
pub mod error;
pub mod learner;
pub mod lp;
pub mod polynomial;
pub mod querysim;
pub mod rational;

pub use error::{Error, Result};
