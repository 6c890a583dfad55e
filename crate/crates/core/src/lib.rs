//! Functional-decode-forward coding for multi-way relay channels over finite
//! fields, with exact rate-region computation.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: arithmetic in GF(ℓ^z);
//! * [`prob`]: noise distributions, entropy and seeded random streams;
//! * [`code`]: random linear codes and maximum-likelihood decoding;
//! * [`sim`]: the channel, rate splitting, and Monte-Carlo trials of the
//!   functional-decode-forward scheme and the complete-decode-forward baseline;
//! * [`regions`]: cut-set bound, capacity region and the binary two-user regions;
//! * [`export`]: CSV writers;
//! * [`selfcheck`]: exhaustive arithmetic and ensemble checks.

pub mod code;
pub mod export;
pub mod field;
pub mod prob;
pub mod regions;
pub mod selfcheck;
pub mod sim;
