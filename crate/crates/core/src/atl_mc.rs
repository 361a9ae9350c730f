//! Model checking of coalition-temporal formulas.
//!
//! [`eval_atl`] is the production checker: booleans are set operations and
//! the three coalition operators are computed from the controllable
//! predecessor [`pre`] (next), its greatest fixpoint (globally) and least
//! fixpoint (until). [`eval_atl_oracle`] decides the same formulas by
//! enumerating every memoryless strategy and inspecting the graph it
//! induces; it shares nothing with the fixpoint path beyond the structure.

use thiserror::Error;

use crate::cgs::{Cgs, CgsError, StateSet};
use crate::formula::{AtlFormula, Coalition};
use crate::strategy::{self, StrategyLimitExceeded};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown coalition member `{0}`")]
    UnknownAgent(String),
    #[error(transparent)]
    TooLarge(#[from] StrategyLimitExceeded),
    #[error("instance too large: {states} states exceeds the oracle guard of {limit}")]
    TooManyStates { states: usize, limit: usize },
}

fn coalition_ids(g: &Cgs, c: &Coalition) -> Result<Vec<usize>, EvalError> {
    g.coalition_ids(c).map_err(|e| match e {
        CgsError::UnknownAgent(a) => EvalError::UnknownAgent(a),
        other => EvalError::UnknownAgent(other.to_string()),
    })
}

/// Controllable predecessor: states where the coalition has a joint action
/// all of whose possible successors lie in `target`.
pub fn pre(g: &Cgs, coalition: &Coalition, target: &StateSet) -> Result<StateSet, EvalError> {
    let ids = coalition_ids(g, coalition)?;
    Ok(pre_ids(g, &ids, target))
}

fn pre_ids(g: &Cgs, coalition: &[usize], target: &StateSet) -> StateSet {
    StateSet::from_iter_in(
        g.num_states(),
        (0..g.num_states()).filter(|&w| g.joint_moves(w, coalition).iter().any(|(_, succ)| succ.is_subset(target))),
    )
}

/// Denotation of `phi` by fixpoint iteration.
pub fn eval_atl(g: &Cgs, phi: &AtlFormula) -> Result<StateSet, EvalError> {
    let n = g.num_states();
    Ok(match phi {
        AtlFormula::Atom(p) => g.valuation(p),
        AtlFormula::Not(a) => eval_atl(g, a)?.complement(),
        AtlFormula::And(a, b) => eval_atl(g, a)?.intersection(&eval_atl(g, b)?),
        AtlFormula::CoalX(c, a) => {
            let ids = coalition_ids(g, c)?;
            pre_ids(g, &ids, &eval_atl(g, a)?)
        }
        AtlFormula::CoalG(c, a) => {
            let ids = coalition_ids(g, c)?;
            let inv = eval_atl(g, a)?;
            let mut z = StateSet::full(n);
            loop {
                let next = inv.intersection(&pre_ids(g, &ids, &z));
                if next == z {
                    break z;
                }
                z = next;
            }
        }
        AtlFormula::CoalU(c, a, b) => {
            let ids = coalition_ids(g, c)?;
            let hold = eval_atl(g, a)?;
            let goal = eval_atl(g, b)?;
            let mut z = StateSet::empty(n);
            loop {
                let next = goal.union(&hold.intersection(&pre_ids(g, &ids, &z)));
                if next == z {
                    break z;
                }
                z = next;
            }
        }
    })
}

/// Size bounds for the brute-force oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_states: usize,
    pub max_strategies: u128,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_states: 8, max_strategies: strategy::DEFAULT_STRATEGY_LIMIT }
    }
}

/// Denotation of `phi` by strategy enumeration, with default limits.
pub fn eval_atl_oracle(g: &Cgs, phi: &AtlFormula) -> Result<StateSet, EvalError> {
    eval_atl_oracle_with(g, phi, OracleLimits::default())
}

pub fn eval_atl_oracle_with(g: &Cgs, phi: &AtlFormula, limits: OracleLimits) -> Result<StateSet, EvalError> {
    if g.num_states() > limits.max_states {
        return Err(EvalError::TooManyStates { states: g.num_states(), limit: limits.max_states });
    }
    oracle(g, phi, limits)
}

enum Objective {
    Next(StateSet),
    Globally(StateSet),
    Until(StateSet, StateSet),
}

fn oracle(g: &Cgs, phi: &AtlFormula, limits: OracleLimits) -> Result<StateSet, EvalError> {
    let (c, objective) = match phi {
        AtlFormula::Atom(p) => return Ok(g.valuation(p)),
        AtlFormula::Not(a) => return Ok(oracle(g, a, limits)?.complement()),
        AtlFormula::And(a, b) => return Ok(oracle(g, a, limits)?.intersection(&oracle(g, b, limits)?)),
        AtlFormula::CoalX(c, a) => (c, Objective::Next(oracle(g, a, limits)?)),
        AtlFormula::CoalG(c, a) => (c, Objective::Globally(oracle(g, a, limits)?)),
        AtlFormula::CoalU(c, a, b) => (c, Objective::Until(oracle(g, a, limits)?, oracle(g, b, limits)?)),
    };
    let ids = coalition_ids(g, c)?;
    let n = g.num_states();
    let mut accepted = StateSet::empty(n);
    for sigma in strategy::all_strategies(g, &ids, limits.max_strategies)? {
        let graph = sigma.induced_graph(g);
        for w in 0..n {
            if accepted.contains(w) {
                continue;
            }
            let ok = match &objective {
                Objective::Next(t) => strategy::next_criterion(&graph, w, t),
                Objective::Globally(t) => strategy::globally_criterion(&graph, w, t),
                Objective::Until(h, t) => strategy::until_criterion(&graph, w, h, t),
            };
            if ok {
                accepted.insert(w);
            }
        }
        if accepted.len() == n {
            break;
        }
    }
    Ok(accepted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_atl, Formula};
    use crate::testutil::toy1;

    fn names(g: &Cgs, s: &StateSet) -> String {
        g.format_states(s)
    }

    #[test]
    fn pre_on_toy1() {
        let g = toy1();
        let w1 = StateSet::from_iter_in(2, [1]);
        assert_eq!(names(&g, &pre(&g, &Coalition::new(["a"]), &w1).unwrap()), "{w0, w1}");
        assert_eq!(names(&g, &pre(&g, &Coalition::empty(), &w1).unwrap()), "{w1}");
        for c in [Coalition::empty(), Coalition::new(["a"])] {
            assert_eq!(pre(&g, &c, &StateSet::full(2)).unwrap(), StateSet::full(2));
        }
    }

    #[test]
    fn toy1_denotations_agree_with_oracle() {
        let g = toy1();
        for (text, expected) in [
            ("<<a>> X p", "{w0, w1}"),
            ("<<a>> G p", "{w1}"),
            ("<<a>> (true U p)", "{w0, w1}"),
            ("<<>> X p", "{w1}"),
            ("<<>> (true U p)", "{w1}"),
            ("<<a>> G !p", "{w0}"),
            ("<<a>> X false", "{}"),
        ] {
            let phi = parse_atl(text).unwrap();
            assert_eq!(names(&g, &eval_atl(&g, &phi).unwrap()), expected, "{text}");
            assert_eq!(names(&g, &eval_atl_oracle(&g, &phi).unwrap()), expected, "oracle {text}");
        }
    }

    #[test]
    fn bottom_axiom_on_random_models() {
        for seed in 0..20 {
            let g = crate::cgs::random_cgs(3, 2, 2, 1, seed);
            for c in [Coalition::empty(), Coalition::new(["a"]), Coalition::new(["a", "b"])] {
                let f = AtlFormula::coal_x(c, AtlFormula::bottom());
                assert!(eval_atl_oracle(&g, &f).unwrap().is_empty());
                assert!(eval_atl(&g, &f).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn unknown_agent_rejected() {
        let g = toy1();
        let phi = parse_atl("<<z>> X p").unwrap();
        assert_eq!(eval_atl(&g, &phi), Err(EvalError::UnknownAgent("z".into())));
        assert_eq!(eval_atl_oracle(&g, &phi), Err(EvalError::UnknownAgent("z".into())));
    }

    #[test]
    fn oracle_size_guard() {
        let g = crate::cgs::random_cgs(9, 1, 1, 1, 0);
        let phi = parse_atl("<<a>> X p").unwrap();
        assert!(matches!(eval_atl_oracle(&g, &phi), Err(EvalError::TooManyStates { .. })));
        let limits = OracleLimits { max_states: 9, max_strategies: 0 };
        assert!(matches!(eval_atl_oracle_with(&g, &phi, limits), Err(EvalError::TooLarge(_))));
    }
}
