//! Minimum-size generating sets for finite permutation groups.
//!
//! The crate computes `d(G)`, the least number of elements generating a
//! permutation group `G`, together with an explicit generating set of that
//! size. The core pipeline:
//!
//! 1. build a stabilizer chain for `G` ([`bsgs`]),
//! 2. refine a chain of normal subgroups into a chief series ([`structure`]),
//! 3. lift generators of the top quotient down the series, keeping the
//!    generating set as small as possible at each step ([`mingen`]).
//!
//! Certified mode proves both that the returned set generates and that no
//! smaller set does; heuristic mode trades the minimality certificate for
//! speed on huge chief factors. Randomness only ever speeds things up — every
//! "generates" claim is confirmed deterministically before being returned.
//!
//! # Conventions
//!
//! Permutations act on the right and compose left-to-right: `x^(ab) =
//! (x^a)^b`, so [`Perm::compose`]`(a, b)` maps `x` to `b(a(x))`. Points are
//! 1-based in all textual input and output (cycle notation, the DSL, the
//! CLI) and 0-based in the API.
//!
//! # Entry points
//!
//! * [`constructions::build`] — build groups from a small expression
//!   language (`direct_power(alt(5), 19)`, `wreath(cyclic(3), sym(2))`).
//! * [`mingen::min_generating_set`] — the main computation.
//! * [`report::SolveReport`] — the machine-readable result record emitted
//!   by the command-line tool.
//! * [`oracle`] — independent brute-force reference implementations used to
//!   cross-check everything on small groups.

pub mod bsgs;
pub mod constructions;
pub mod fp;
pub mod group;
pub mod mingen;
pub mod oracle;
pub mod perm;
pub mod report;
pub mod structure;

pub use group::Group;
pub use perm::Perm;

use num_bigint::BigUint;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A permutation's degree does not match the expected degree.
    #[error("degree mismatch: got {0}, expected {1}")]
    DegreeMismatch(usize, usize),
    /// Generator list invalid (not bijections, wrong length, …).
    #[error("bad generators: {0}")]
    BadGenerators(String),
    /// An element expected inside a group was not a member.
    #[error("element lies outside the group")]
    SeedNotInGroup,
    /// A layer handed to the elementary-abelian machinery is not elementary
    /// abelian modulo the subgroup below it.
    #[error("layer is not elementary abelian")]
    LayerNotElementaryAbelian,
    /// A purported normal subgroup is not normal.
    #[error("layer is not normal")]
    LayerNotNormal,
    /// Chief-series refinement could not certify minimality of a factor
    /// within its search limits.
    #[error("refinement failed: {0}")]
    RefinementFailed(String),
    /// Index out of range (factor index, orbit index, …).
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    /// Certified search would need to sweep more cosets than the cap allows.
    #[error("exhaustive sweep of {0} tuples exceeds cap {1}")]
    ExhaustiveCapExceeded(BigUint, BigUint),
    /// Some other configured limit was exceeded.
    #[error("limit exceeded: {0}")]
    CapExceeded(String),
    /// A randomized search did not succeed within its attempt budget.
    #[error("not found within {0} attempts")]
    NotFoundWithin(usize),
    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    /// Group-construction expression is malformed (byte offset + message).
    #[error("spec syntax error at byte {0}: {1}")]
    SpecSyntax(usize, String),
    /// A group file could not be read.
    #[error("cannot read group file {0}: {1}")]
    FileRead(String, String),
}
