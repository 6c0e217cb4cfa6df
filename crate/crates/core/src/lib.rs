pub mod asymptotics;
pub mod bounds;
pub mod cli;
pub mod constants;
pub mod error;
pub mod geometry;
pub mod spectrum;

pub use error::{Error, Result};
