//! Single-server retrieval of several messages at once with individual privacy and
//! side information.
//!
//! * [`ff`]: prime-field arithmetic, Vandermonde solving, rank and row-space queries.
//! * [`gpcip`]: the partition-and-code protocol (query, answer, recovery, rate).
//! * [`audit`]: exact enumeration of the query distribution and the privacy,
//!   decodability and support checks built on it.
//! * [`motherset`]: digraphs, mother vertex-sets and the D-graph scans.
//! * [`goodrel`]: set relations, the good-relation conditions and minimum covers.

pub mod audit;
pub mod error;
pub mod exact;
pub mod ff;
pub mod goodrel;
pub mod gpcip;
pub mod motherset;
pub mod rng;

pub use error::{Error, Result};
