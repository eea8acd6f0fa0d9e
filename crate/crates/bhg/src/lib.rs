//! Construction, sampling, verification and measurement of `B_h[g]` integer
//! sequences: sets of positive integers in which every `n` has at most `g`
//! representations as a nondecreasing sum of `h` elements.
//!
//! The crate provides:
//!
//! * [`varbase`]: the variable-base numeral system whose bases grow doubly
//!   exponentially, with reproducible arbitrary-precision floors;
//! * [`digitsets`]: per-base `B_h[1]` digit sets (greedy and Bose–Chowla
//!   finite-field constructions) with exhaustive verification;
//! * [`explicit`]: the explicit `B_h[g]` sequence built from windowed digit
//!   expansions, its representation bound `(h!)^(lh)`, and the density
//!   diagnostic chain;
//! * [`randmodel`]: the random model `S(alpha, m)` (each `x >= m` kept
//!   independently with probability `x^-alpha`) with exact expectation
//!   oracles;
//! * [`repcount`]: exact representation counting `r_{h,A}(n)`, bulk
//!   profiles, and `B_h[g]` verification;
//! * [`packing`]: disjoint representations `r*_{h,A}(n)`, bad elements, and
//!   the prune step that turns "few bad elements" into an actual `B_h[g]`
//!   truncation;
//! * [`analysis`]: counting functions, density-exponent fits, parameter
//!   maps, and the end-to-end random-prune-measure pipeline.

pub mod analysis;
pub mod bigfloat;
pub mod digitsets;
pub mod error;
pub mod explicit;
pub mod packing;
pub mod randmodel;
pub mod repcount;
pub mod sequence;
pub mod util;
pub mod varbase;

pub use error::{Error, Result};
