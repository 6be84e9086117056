pub mod convex;
pub mod equilibrium;
pub mod error;
pub mod mapping;
pub mod oracle;
pub mod schedule;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
