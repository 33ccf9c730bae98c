pub mod calculus;
pub mod duality;
pub mod error;
pub mod frames;
pub mod groups;
pub mod homotopy;
pub mod linalg;
pub use error::{Error, Result};
