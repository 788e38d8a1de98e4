pub mod bounds;
pub mod descent;
pub mod engine;
pub mod error;
pub mod fields;
pub mod hfe;
pub mod io;
pub mod lastfall;
pub mod linalg;
pub mod multipoly;
pub mod unipoly;

pub use error::{Error, Result};
