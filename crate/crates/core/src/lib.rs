pub mod antider;
pub mod char_expect;
pub mod charfun;
pub mod error;
pub mod evolution;
pub mod functional;
pub mod grid;
pub mod measure;
pub mod padic;
pub mod runner;
pub mod sde;

pub use error::{Error, Result};
