//! Hook-restricted standard Young tableaux sums, recurrence guessing and
//! power-law asymptotics.

pub mod asymptotics;
pub mod cache;
pub mod constant;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod recurrence;
pub mod reference;
pub mod reproduce;
pub mod sequence;
pub mod shapes;

pub use error::{Error, Result};
