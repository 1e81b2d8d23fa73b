pub mod arith;
pub mod boxspace;
pub mod cayley;
pub mod census;
pub mod coarse;
pub mod error;
pub mod f2poly;
pub mod groups;
pub mod report;
pub mod wreath;

pub use error::{Error, Result};
