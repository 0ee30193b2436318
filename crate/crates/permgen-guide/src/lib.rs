//! Runs every Rust snippet in the book as a doctest.
//!
//! mdbook renders the chapters under `book/` but cannot *test* examples that
//! use dependencies, so each chapter is also included here as module
//! documentation: `cargo test --doc -p permgen-guide` compiles and runs all
//! fenced Rust blocks. One module per chapter, so a failing test names the
//! chapter it came from.
//!
//! This crate exports nothing and is never published.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/permutations.md")]
pub mod permutations {}

#[doc = include_str!("../../../book/src/constructions.md")]
pub mod constructions {}

#[doc = include_str!("../../../book/src/stabilizer-chains.md")]
pub mod stabilizer_chains {}

#[doc = include_str!("../../../book/src/chief-series.md")]
pub mod chief_series {}

#[doc = include_str!("../../../book/src/solving.md")]
pub mod solving {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
