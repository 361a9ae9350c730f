//! Evaluation of the stit language on the unraveling of a structure.
//!
//! An index is a moment plus a history through it. Histories are lassos;
//! the moment only contributes its last state, since truth at an index of
//! the unraveling depends on that state and on the continuation.
//!
//! Historical necessity and group agency quantify over the continuations
//! of the moment. A quantified formula that looks `d` steps ahead is
//! decided by enumerating every profile sequence of length `d` (each one
//! completed canonically); a quantified formula with an unbounded look-ahead
//! is rejected. Strategic ability is decided over memoryless strategies on
//! the graph they induce.

mod eval;
mod lasso;

pub use eval::{
    check_moment_determined, eval_sx, history_depth, holds_strategically, QuotientStrategy, SxError, SxEvaluator,
    SxIndex, PREFIX_LIMIT,
};
pub use lasso::{
    extreme_lassos, lasso_pool, lasso_suffix, pool_estimate, prefix_count, profile_prefixes, random_lasso,
    sample_lassos, LassoError, LassoHistory, PoolBounds, EXHAUSTIVE_POOL_LIMIT,
};
