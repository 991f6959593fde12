pub mod audit;
pub mod cli;
pub mod container;
pub mod error;
pub mod instances;
pub mod montecarlo;
pub mod ratio;
pub mod regularity;
pub mod sets;

pub use error::{Error, Result};
