pub mod cf;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod runner;
pub mod thue;

pub use error::{Error, Result};
