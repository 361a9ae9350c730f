//! Model checking for alternating-time temporal logic over concurrent game
//! structures, together with the stit-theoretic unraveling of a structure,
//! evaluation of the stit language on it, and the harness that checks the
//! two sides against each other.
//!
//! Module map:
//! - [`formula`]: both languages, parsing, printing, translation, schemata
//! - [`cgs`]: concurrent game structures, their JSON format, random models
//! - [`atl_mc`]: fixpoint model checker and a brute-force strategy oracle
//! - [`unravel`]: the branching-time frame of a structure and its checks
//! - [`stit`]: lasso histories and stit-language evaluation
//! - [`bridge`]: correspondence, axiom sweep and the proof checker

pub mod atl_mc;
pub mod bridge;
pub mod cgs;
pub mod formula;
pub mod stit;
pub mod strategy;
pub mod unravel;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::cgs::{load_cgs, Cgs};

    pub const TOY1: &str = include_str!("../../../fixtures/toy1.json");

    pub fn toy1() -> Cgs {
        load_cgs(TOY1).unwrap()
    }
}
