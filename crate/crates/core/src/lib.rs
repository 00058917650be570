//! Exact and numerical tools for direct sums of scaled Riemann-Liouville operators.

pub mod error;
pub mod gridfn;
pub mod jordan;
pub mod lattices;
pub mod cyclic;
pub mod operators;
pub mod powerfn;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
pub use powerfn::{PowerFn, PowerTerm};
pub use rational::{Q, C64};
pub use report::{Certificate, Check};
