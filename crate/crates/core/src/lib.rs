//! Exact construction of a set `B` of size `O(n)` whose sumset `B + B`
//! contains a convex sequence of size `Ω(n²)`, with independent checks.
//!
//! All values are integers at the common denominator `D = 1000·n³`
//! (see [`model`]), so every comparison is exact.

pub mod cli;
pub mod construction;
pub mod model;
pub mod oracle;
pub mod splice;
pub mod verify;

pub use construction::{build_basis, build_block, gap, x_value, y_value, Basis, Block, Witness};
pub use model::{make_params, parse_rational, Params, ScaledInt};
pub use oracle::{lcs_dp, lcs_exhaustive, sumset, SortedSums};
pub use splice::{assemble, find_nesting, splice_at, Chain, ConvexSeq, SplicePoint};
pub use verify::{audit_bounds, check_witnesses, diff_popularity, is_convex, measure};
