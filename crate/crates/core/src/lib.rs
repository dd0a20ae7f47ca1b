//! Reduction toolkit for discrete graphical models.
//!
//! The crate connects three families of constructions and keeps every step
//! checkable against exact brute-force oracles at small scale:
//!
//! - partition-function-preserving lifts of a model across graph-minor
//!   operations ([`lift`]),
//! - encodings of MAX 2-CSP decision and #2-CSP counting problems as
//!   partition-function problems ([`csp`]),
//! - constructive minor embeddings: planar graphs into grids and grids into
//!   arbitrary host graphs ([`embed`]).
//!
//! All correctness-critical arithmetic runs on arbitrary-precision
//! non-negative rationals ([`num::ExactNumber`]); a double-precision path
//! exists for benchmarking only.

pub mod graph;
pub mod num;

pub mod model;

pub mod lift;

pub mod csp;

pub mod embed;

pub mod random;
