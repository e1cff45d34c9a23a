//! Fine-to-coarse Hawkes price model, sampling clocks and the estimators used
//! to trace the Epps effect across calendar, event and volume time.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clocks;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod fourier;
pub mod hawkes;
pub mod ingest;
pub mod market;
pub mod numeric;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
