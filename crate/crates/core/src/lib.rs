//! Random k-XORSAT laboratory.

pub mod certify;
pub mod error;
pub mod gf2;
pub mod instance;
pub mod interval;
pub mod lab;
pub mod peel;
pub mod rng;
pub mod thresholds;

pub use error::{Error, Result};
