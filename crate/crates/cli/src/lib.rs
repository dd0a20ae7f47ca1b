//! Pipeline driver and benchmark harness behind the `gridlift` binary.

pub mod bench;
pub mod pipeline;
