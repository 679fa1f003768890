pub mod algebra;
pub mod error;
pub mod global_series;
pub mod local_field;
pub mod local_zeta;
pub mod oracles;
pub mod report;
pub mod serde_rat;
pub mod waldspurger;

pub use error::{Error, Result};
