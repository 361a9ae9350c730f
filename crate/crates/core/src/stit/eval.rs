use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::lasso::{prefix_count, profile_prefixes, LassoError, LassoHistory};
use crate::cgs::{AgentId, Cgs, CgsError, Profile, StateId, StateSet};
use crate::formula::{Coalition, SxFormula};
use crate::strategy::{self, MemorylessStrategy, StrategyLimitExceeded};
use crate::unravel::Moment;

/// Cap on the profile prefixes one history quantifier may enumerate.
pub const PREFIX_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SxError {
    #[error("unsupported formula: {0}")]
    Unsupported(String),
    #[error("inconsistent index: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Lasso(#[from] LassoError),
    #[error("unknown coalition member `{0}`")]
    UnknownAgent(String),
    #[error(transparent)]
    TooLarge(#[from] StrategyLimitExceeded),
    #[error("instance too large: {0} history prefixes")]
    TooManyPrefixes(u128),
}

/// A moment together with a history through it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SxIndex {
    pub moment: Moment,
    pub history: LassoHistory,
}

impl SxIndex {
    pub fn new(moment: Moment, history: LassoHistory) -> Result<Self, SxError> {
        if moment.last() != history.anchor() {
            return Err(SxError::Inconsistent("history does not start at the moment's last state".into()));
        }
        Ok(SxIndex { moment, history })
    }

    /// The index at the one-state moment `w`.
    pub fn at_root(history: LassoHistory) -> Self {
        SxIndex { moment: Moment::root(history.anchor()), history }
    }
}

/// How many steps of the history a formula's truth depends on; `None` when
/// it may depend on the whole history.
pub fn history_depth(phi: &SxFormula) -> Result<Option<usize>, SxError> {
    use SxFormula::*;
    Ok(match phi {
        Atom(_) => Some(0),
        Not(a) => history_depth(a)?,
        And(a, b) => match (history_depth(a)?, history_depth(b)?) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        },
        Next(a) => history_depth(a)?.map(|d| d + 1),
        Globally(a) => {
            history_depth(a)?;
            None
        }
        Until(a, b) => {
            history_depth(a)?;
            history_depth(b)?;
            None
        }
        Necessary(a) => match history_depth(a)? {
            Some(_) => Some(0),
            None => return Err(SxError::Unsupported(format!("[] over history-dependent {a}"))),
        },
        Stit(c, a) => match history_depth(a)? {
            Some(0) => Some(0),
            Some(_) if c.is_empty() => Some(0),
            Some(_) => Some(1),
            None => return Err(SxError::Unsupported(format!("[{c}] over history-dependent {a}"))),
        },
        Strategic(_, body) => {
            strategic_objective(body)?;
            Some(0)
        }
    })
}

/// True when the formula's truth depends on the last state of the moment only.
pub fn check_moment_determined(phi: &SxFormula) -> bool {
    matches!(history_depth(phi), Ok(Some(0)))
}

enum Objective<'a> {
    Settled(&'a SxFormula),
    Next(&'a SxFormula),
    Globally(&'a SxFormula),
    Until(&'a SxFormula, &'a SxFormula),
}

fn strategic_objective(body: &SxFormula) -> Result<Objective<'_>, SxError> {
    let settled = |f: &SxFormula| matches!(history_depth(f), Ok(Some(0)));
    let unsupported = || SxError::Unsupported(format!("strategic body {body}"));
    match body {
        SxFormula::Next(a) if settled(a) => Ok(Objective::Next(a)),
        SxFormula::Globally(a) if settled(a) => Ok(Objective::Globally(a)),
        SxFormula::Until(a, b) if settled(a) && settled(b) => Ok(Objective::Until(a, b)),
        _ if settled(body) => Ok(Objective::Settled(body)),
        _ => Err(unsupported()),
    }
}

/// Strategy of a coalition that depends on the current state only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientStrategy {
    pub coalition: Coalition,
    /// agent -> state -> action label
    pub actions: BTreeMap<String, BTreeMap<String, String>>,
}

impl QuotientStrategy {
    pub fn from_memoryless(g: &Cgs, s: &MemorylessStrategy) -> Self {
        let mut actions = BTreeMap::new();
        for (i, &a) in s.coalition.iter().enumerate() {
            let row: BTreeMap<String, String> = (0..g.num_states())
                .map(|w| (g.state_name(w).to_string(), g.menu(w, a)[s.choice[w][i]].clone()))
                .collect();
            actions.insert(g.agents()[a].clone(), row);
        }
        QuotientStrategy { coalition: s.coalition.iter().map(|&a| g.agents()[a].clone()).collect(), actions }
    }

    fn action(&self, g: &Cgs, agent: AgentId, w: StateId) -> Option<usize> {
        let label = self.actions.get(&g.agents()[agent])?.get(g.state_name(w))?;
        g.action_index(w, agent, label).ok()
    }

    /// Whether every step of `h` follows the strategy.
    pub fn admits(&self, g: &Cgs, h: &LassoHistory) -> bool {
        let Ok(ids) = g.coalition_ids(&self.coalition) else { return false };
        let states = h.states(g);
        (0..h.period()).all(|i| {
            let p = h.profile_at(i);
            ids.iter().all(|&a| self.action(g, a, states[i]) == Some(p.0[a]))
        })
    }
}

/// Evaluator with a cache of denotations of moment-determined subformulas.
pub struct SxEvaluator<'g> {
    g: &'g Cgs,
    cache: HashMap<SxFormula, StateSet>,
    strategy_limit: u128,
}

impl<'g> SxEvaluator<'g> {
    pub fn new(g: &'g Cgs) -> Self {
        SxEvaluator { g, cache: HashMap::new(), strategy_limit: strategy::DEFAULT_STRATEGY_LIMIT }
    }

    pub fn with_strategy_limit(mut self, limit: u128) -> Self {
        self.strategy_limit = limit;
        self
    }

    pub fn eval(&mut self, phi: &SxFormula, ix: &SxIndex) -> Result<bool, SxError> {
        if ix.moment.last() != ix.history.anchor() {
            return Err(SxError::Inconsistent("history does not start at the moment's last state".into()));
        }
        if !ix.moment.is_consistent(self.g) {
            return Err(SxError::Inconsistent("moment does not follow the transition function".into()));
        }
        history_depth(phi)?;
        self.eval_at(phi, &ix.history)
    }

    /// States whose moments satisfy a moment-determined formula.
    pub fn denotation(&mut self, phi: &SxFormula) -> Result<StateSet, SxError> {
        if let Some(s) = self.cache.get(phi) {
            return Ok(s.clone());
        }
        if !check_moment_determined(phi) {
            history_depth(phi)?;
            return Err(SxError::Unsupported(format!("{phi} depends on the history")));
        }
        let n = self.g.num_states();
        let set = match phi {
            SxFormula::Strategic(c, body) => self.strategic_denotation(c, body)?,
            _ => {
                let mut set = StateSet::empty(n);
                for w in 0..n {
                    if self.eval_node(phi, &LassoHistory::canonical(self.g, w))? {
                        set.insert(w);
                    }
                }
                set
            }
        };
        self.cache.insert(phi.clone(), set.clone());
        Ok(set)
    }

    pub fn holds_strategically(&mut self, w: StateId, c: &Coalition, body: &SxFormula) -> Result<bool, SxError> {
        Ok(self.denotation(&SxFormula::strategic(c.clone(), body.clone()))?.contains(w))
    }

    /// A strategy witnessing `<<C>>^s body` at `w`, if any.
    pub fn strategic_witness(
        &mut self,
        w: StateId,
        c: &Coalition,
        body: &SxFormula,
    ) -> Result<Option<QuotientStrategy>, SxError> {
        let ids = self.coalition_ids(c)?;
        let graph_check = self.graph_check(body)?;
        for sigma in strategy::all_strategies(self.g, &ids, self.strategy_limit)? {
            let graph = sigma.induced_graph(self.g);
            if graph_check.accepts(&graph, w) {
                return Ok(Some(QuotientStrategy::from_memoryless(self.g, &sigma)));
            }
        }
        Ok(None)
    }

    fn coalition_ids(&self, c: &Coalition) -> Result<Vec<AgentId>, SxError> {
        self.g.coalition_ids(c).map_err(|e| match e {
            CgsError::UnknownAgent(a) => SxError::UnknownAgent(a),
            other => SxError::UnknownAgent(other.to_string()),
        })
    }

    fn graph_check(&mut self, body: &SxFormula) -> Result<GraphCheck, SxError> {
        Ok(match strategic_objective(body)? {
            Objective::Settled(a) => GraphCheck::Settled(self.denotation(a)?),
            Objective::Next(a) => GraphCheck::Next(self.denotation(a)?),
            Objective::Globally(a) => GraphCheck::Globally(self.denotation(a)?),
            Objective::Until(a, b) => GraphCheck::Until(self.denotation(a)?, self.denotation(b)?),
        })
    }

    fn strategic_denotation(&mut self, c: &Coalition, body: &SxFormula) -> Result<StateSet, SxError> {
        let ids = self.coalition_ids(c)?;
        let check = self.graph_check(body)?;
        let n = self.g.num_states();
        if let GraphCheck::Settled(s) = check {
            return Ok(s);
        }
        let mut accepted = StateSet::empty(n);
        for sigma in strategy::all_strategies(self.g, &ids, self.strategy_limit)? {
            let graph = sigma.induced_graph(self.g);
            for w in 0..n {
                if !accepted.contains(w) && check.accepts(&graph, w) {
                    accepted.insert(w);
                }
            }
            if accepted.len() == n {
                break;
            }
        }
        Ok(accepted)
    }

    fn eval_at(&mut self, phi: &SxFormula, h: &LassoHistory) -> Result<bool, SxError> {
        if !matches!(phi, SxFormula::Atom(_)) && check_moment_determined(phi) {
            return Ok(self.denotation(phi)?.contains(h.anchor()));
        }
        self.eval_node(phi, h)
    }

    fn eval_node(&mut self, phi: &SxFormula, h: &LassoHistory) -> Result<bool, SxError> {
        use SxFormula::*;
        let g = self.g;
        match phi {
            Atom(p) => Ok(g.valuation(p).contains(h.anchor())),
            Not(a) => Ok(!self.eval_at(a, h)?),
            And(a, b) => Ok(self.eval_at(a, h)? && self.eval_at(b, h)?),
            Next(a) => self.eval_at(a, &h.suffix(g, 1)),
            Globally(a) => {
                for i in 0..h.period() {
                    if !self.eval_at(a, &h.suffix(g, i))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Until(a, b) => {
                for i in 0..h.period() {
                    let s = h.suffix(g, i);
                    if self.eval_at(b, &s)? {
                        return Ok(true);
                    }
                    if !self.eval_at(a, &s)? {
                        return Ok(false);
                    }
                }
                Ok(false)
            }
            Necessary(a) => self.quantify(a, h, None),
            Stit(c, a) => {
                let ids = self.coalition_ids(c)?;
                self.quantify(a, h, Some(&ids))
            }
            Strategic(c, body) => Ok(self.strategic_denotation(c, body)?.contains(h.anchor())),
        }
    }

    /// `body` at every history through the moment (`cell == None`), or at
    /// every history whose first step agrees with `h` on the given agents.
    fn quantify(&mut self, body: &SxFormula, h: &LassoHistory, cell: Option<&[AgentId]>) -> Result<bool, SxError> {
        let depth = history_depth(body)?
            .ok_or_else(|| SxError::Unsupported(format!("quantifying over history-dependent {body}")))?;
        if depth == 0 {
            return self.eval_at(body, h);
        }
        let w = h.anchor();
        let count = prefix_count(self.g, w, depth);
        if count > PREFIX_LIMIT {
            return Err(SxError::TooManyPrefixes(count));
        }
        let first = h.first_profile().clone();
        let agrees = |p: &Profile| cell.is_none_or(|ids| ids.iter().all(|&a| p.0[a] == first.0[a]));
        for prefix in profile_prefixes(self.g, w, depth) {
            if !agrees(&prefix[0]) {
                continue;
            }
            let other = LassoHistory::complete(self.g, w, &prefix)?;
            if !self.eval_at(body, &other)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

enum GraphCheck {
    Settled(StateSet),
    Next(StateSet),
    Globally(StateSet),
    Until(StateSet, StateSet),
}

impl GraphCheck {
    fn accepts(&self, graph: &[StateSet], w: StateId) -> bool {
        match self {
            GraphCheck::Settled(s) => s.contains(w),
            GraphCheck::Next(t) => strategy::next_criterion(graph, w, t),
            GraphCheck::Globally(t) => strategy::globally_criterion(graph, w, t),
            GraphCheck::Until(a, b) => strategy::until_criterion(graph, w, a, b),
        }
    }
}

pub fn eval_sx(g: &Cgs, phi: &SxFormula, ix: &SxIndex) -> Result<bool, SxError> {
    SxEvaluator::new(g).eval(phi, ix)
}

pub fn holds_strategically(g: &Cgs, w: StateId, c: &Coalition, body: &SxFormula) -> Result<bool, SxError> {
    SxEvaluator::new(g).holds_strategically(w, c, body)
}
