//! Dilithium (round 3) signatures with a speculative batch-signing engine.

pub mod batch;
pub mod bench;
pub mod codec;
pub mod error;
pub mod keccak;
pub mod params;
pub mod ring;
pub mod round;
pub mod sample;
pub mod scheme;

pub use error::*;
pub use params::{Params, SecurityLevel};
