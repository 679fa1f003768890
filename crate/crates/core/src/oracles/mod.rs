//! Independent ground truth: orbit census over F_q, adaptive p-adic
//! integration of the local zeta integral, and symmetric-matrix volumes.

pub mod census;
pub mod padic;
pub mod symvol;

pub use census::{classify_orbit, orbit_census, orbit_sizes, CensusResult, Mat2, OrbitClass};
pub use padic::{padic_oracle_ze, padic_oracle_ze_with, OracleConfig, OracleEstimate, OracleMode};
pub use symvol::{sym_volume_census, sym_volume_closed};
