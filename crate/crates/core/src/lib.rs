//! Rényi-entropy bounds for distributions with a bounded ratio between their
//! largest and smallest masses, and their use in source clustering,
//! guessing and variable-length coding.
//!
//! All internal computation is in nats; [`LogBase`] converts at the boundary.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregate;
pub mod campbell;
pub mod error;
pub mod extremal;
pub mod figures;
pub mod guess;
pub mod optimize;
pub mod pmf;
pub mod renyi;
mod types;

pub use aggregate::{
    entropy_range, exhaustive_extrema, huffman_aggregate, max_entropy_envelope, min_entropy_aggregate, strategies,
    strategy, Aggregation, AggregationStrategy, EntropyRange, HuffmanTrace,
};
pub use campbell::{
    build_prefix_code, campbell_bounds, campbell_lengths, clustering_cumulant_bounds, scaled_cumulant,
    tunstall_rate_bound, CodeSpec,
};
pub use error::{Error, Result};
pub use extremal::{
    asymptotic_entropy_gap, entropy_gap, extremal_pmf, ratio_class_majorant, ratio_two_gap, BetaWindow, ExtremalProfile,
};
pub use guess::{clustering_gain_bounds, exact_guessing_moment, guessing_moment_bounds, GuessBoundReport};
pub use pmf::{majorizes, MassRatioClass, Pmf};
pub use renyi::{renyi_divergence, renyi_entropy, LogBase, Order};
