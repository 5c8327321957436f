//! Partitioned BCH codes for memories with stuck-at defects and random errors.
//!
//! The crate covers the whole pipeline: GF(2)/GF(2^m) algebra, BCH and
//! partitioned-BCH construction, two-step defect masking, bounded-distance
//! decoding, the stuck-at channel, analytical failure bounds, Monte Carlo
//! estimation, and redundancy allocation between masking and correction.

pub mod alloc;
pub mod bch;
pub mod bound;
pub mod channel;
pub mod codec;
pub mod error;
pub mod field;
pub mod gf2;
pub mod poly;
pub mod sim;

pub use error::{Error, Result};
