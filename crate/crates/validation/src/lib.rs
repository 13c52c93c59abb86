//! Holds the `acceptance` test target only.
//!
//! It is a separate package so that `cargo test --workspace` runs it after
//! every other test binary.
