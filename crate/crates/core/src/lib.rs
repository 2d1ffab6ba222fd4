//! Wright function W_{λ,μ}(z) and the scaled functions W^±_{λ,ν}(x) with
//! ν = a·x: a high-precision series oracle plus large-x saddle-point
//! expansions.

pub mod coeffs;
pub mod error;
pub mod expansions;
pub mod oracle;
pub mod params;
pub mod saddles;
pub mod scalar;

pub use error::{Result, WrightError};
pub use params::{validate, EvalResult, ScaledArgs, Sign, WrightParams};
pub use scalar::BigReal;
