pub mod augmented;
pub mod corona;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod group;
pub mod half;
pub mod horoball;
pub mod limits;
pub mod rips;

pub use error::{Error, Result};
pub use half::HalfInt;
pub use limits::Limits;
