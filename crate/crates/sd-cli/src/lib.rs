//! Command-line front end: JSON presentations in, JSON reports and exit
//! codes out. The mathematical content lives in `sd-core`; this crate only
//! parses, dispatches, and serializes.

pub mod commands;
pub mod criteria;
pub mod formats;
