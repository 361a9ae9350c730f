//! Memoryless coalition strategies and the one-step graphs they induce.
//!
//! A memoryless strategy fixes, for every agent of the coalition and every
//! state, one action from the agent's menu. Its induced graph links `v` to
//! every state some full profile agreeing with the strategy at `v` leads to.
//! The three graph criteria below decide next, globally and until
//! objectives on that graph without any bound parameter.

use thiserror::Error;

use crate::cgs::{AgentId, Cgs, StateId, StateSet};

/// Strategies per coalition operator the enumerators accept.
pub const DEFAULT_STRATEGY_LIMIT: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instance too large: {count} strategies exceeds the limit of {limit}")]
pub struct StrategyLimitExceeded {
    pub count: u128,
    pub limit: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorylessStrategy {
    /// Coalition members, ascending.
    pub coalition: Vec<AgentId>,
    /// `choice[state][i]` is the action index of `coalition[i]` at `state`.
    pub choice: Vec<Vec<usize>>,
}

impl MemorylessStrategy {
    /// Successor sets of the induced graph, one per state.
    pub fn induced_graph(&self, g: &Cgs) -> Vec<StateSet> {
        (0..g.num_states())
            .map(|v| {
                let mut succ = StateSet::empty(g.num_states());
                for (code, profile) in g.profiles(v).enumerate() {
                    let agrees = self.coalition.iter().zip(&self.choice[v]).all(|(&a, &act)| profile.0[a] == act);
                    if agrees {
                        succ.insert(g.next_by_code(v, code));
                    }
                }
                succ
            })
            .collect()
    }

    pub fn is_within_menus(&self, g: &Cgs) -> bool {
        self.choice.len() == g.num_states()
            && self.choice.iter().enumerate().all(|(w, row)| {
                row.len() == self.coalition.len()
                    && self.coalition.iter().zip(row).all(|(&a, &i)| i < g.menu(w, a).len())
            })
    }
}

pub fn strategy_count(g: &Cgs, coalition: &[AgentId]) -> u128 {
    (0..g.num_states())
        .flat_map(|w| coalition.iter().map(move |&a| g.menu(w, a).len() as u128))
        .fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// Every memoryless strategy of `coalition`, in odometer order with the last
/// state's last agent varying fastest.
pub fn all_strategies(
    g: &Cgs,
    coalition: &[AgentId],
    limit: u128,
) -> Result<impl Iterator<Item = MemorylessStrategy>, StrategyLimitExceeded> {
    let count = strategy_count(g, coalition);
    if count > limit {
        return Err(StrategyLimitExceeded { count, limit });
    }
    let coalition = coalition.to_vec();
    let radix: Vec<Vec<usize>> =
        (0..g.num_states()).map(|w| coalition.iter().map(|&a| g.menu(w, a).len()).collect()).collect();
    let mut current: Option<Vec<Vec<usize>>> = Some(radix.iter().map(|row| vec![0; row.len()]).collect());
    Ok(std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut carried = true;
        'odometer: for w in (0..next.len()).rev() {
            for i in (0..next[w].len()).rev() {
                next[w][i] += 1;
                if next[w][i] < radix[w][i] {
                    carried = false;
                    break 'odometer;
                }
                next[w][i] = 0;
            }
        }
        current = if carried { None } else { Some(next) };
        Some(MemorylessStrategy { coalition: coalition.clone(), choice: out })
    }))
}

/// States reachable from `w` in the graph, `w` included.
pub fn reachable(graph: &[StateSet], w: StateId) -> StateSet {
    let mut seen = StateSet::empty(graph.len());
    let mut stack = vec![w];
    seen.insert(w);
    while let Some(v) = stack.pop() {
        for u in graph[v].iter() {
            if seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen
}

/// All one-step successors of `w` lie in `target`.
pub fn next_criterion(graph: &[StateSet], w: StateId, target: &StateSet) -> bool {
    graph[w].is_subset(target)
}

/// Every state reachable from `w` (including `w`) lies in `invariant`.
pub fn globally_criterion(graph: &[StateSet], w: StateId, invariant: &StateSet) -> bool {
    reachable(graph, w).is_subset(invariant)
}

/// Every path from `w` reaches `goal`, passing only through `hold` before.
///
/// The region reachable from `w` without entering `goal` must lie inside
/// `hold` and be acyclic: the graph is total, so a cycle there would be an
/// infinite path that never reaches `goal`.
pub fn until_criterion(graph: &[StateSet], w: StateId, hold: &StateSet, goal: &StateSet) -> bool {
    if goal.contains(w) {
        return true;
    }
    let n = graph.len();
    let mut region = StateSet::empty(n);
    let mut stack = vec![w];
    region.insert(w);
    while let Some(v) = stack.pop() {
        for u in graph[v].iter() {
            if !goal.contains(u) && region.insert(u) {
                stack.push(u);
            }
        }
    }
    if !region.is_subset(hold) {
        return false;
    }
    // Three-colour DFS restricted to the region.
    let mut colour = vec![0u8; n];
    fn has_cycle(v: usize, graph: &[StateSet], region: &StateSet, colour: &mut [u8]) -> bool {
        colour[v] = 1;
        for u in graph[v].iter().filter(|&u| region.contains(u)) {
            if colour[u] == 1 || (colour[u] == 0 && has_cycle(u, graph, region, colour)) {
                return true;
            }
        }
        colour[v] = 2;
        false
    }
    !has_cycle(w, graph, &region, &mut colour)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgs::random_cgs;
    use crate::testutil::toy1;

    #[test]
    fn enumeration_is_exhaustive_and_distinct() {
        let g = random_cgs(3, 2, 3, 1, 3);
        for coalition in [vec![], vec![0], vec![1], vec![0, 1]] {
            let all: Vec<_> = all_strategies(&g, &coalition, DEFAULT_STRATEGY_LIMIT).unwrap().collect();
            assert_eq!(all.len() as u128, strategy_count(&g, &coalition));
            assert!(all.iter().all(|s| s.is_within_menus(&g)));
            let mut choices: Vec<_> = all.iter().map(|s| s.choice.clone()).collect();
            choices.sort();
            choices.dedup();
            assert_eq!(choices.len(), all.len());
        }
    }

    #[test]
    fn limit_is_enforced() {
        let g = random_cgs(4, 2, 3, 1, 1);
        let count = strategy_count(&g, &[0, 1]);
        assert!(matches!(all_strategies(&g, &[0, 1], count - 1), Err(StrategyLimitExceeded { .. })));
    }

    #[test]
    fn toy1_criteria() {
        let g = toy1();
        let p = g.valuation("p");
        let strategies: Vec<_> = all_strategies(&g, &[0], 10).unwrap().collect();
        assert_eq!(strategies.len(), 2);
        // choosing s1 at w0 reaches w1 and stays
        let go = strategies.iter().find(|s| s.choice[0] == vec![0]).unwrap().induced_graph(&g);
        assert!(next_criterion(&go, 0, &p));
        assert!(!globally_criterion(&go, 0, &p));
        assert!(until_criterion(&go, 0, &StateSet::full(2), &p));
        // choosing s2 loops at w0 forever
        let stay = strategies.iter().find(|s| s.choice[0] == vec![1]).unwrap().induced_graph(&g);
        assert!(!next_criterion(&stay, 0, &p));
        assert!(!until_criterion(&stay, 0, &StateSet::full(2), &p));
        assert!(globally_criterion(&stay, 1, &p));
    }
}
