//! Exact arithmetic over ℚ, ℚ[λ] and ratios of Laurent polynomials.

pub mod lambda;
pub mod laurent;
pub mod rat;
pub mod ratfunc;

pub use lambda::LambdaPoly;
pub use laurent::{Laurent, TLaurent};
pub use rat::Rat;
pub use ratfunc::{RatFunc, TRatFunc, TruncatedSeries};
