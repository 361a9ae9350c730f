//! Concurrent game structures.
//!
//! States and agents are named by strings and addressed internally by their
//! position in document order. A full action profile at a state is stored as
//! one action index per agent; profiles at a state are also numbered in
//! mixed radix with the first agent most significant, which is the order
//! used everywhere profiles are enumerated.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use thiserror::Error;

use crate::formula::Coalition;

mod io;
mod random;
mod stateset;

pub use io::{load_cgs, CgsDocument, DeltaRecord};
pub use random::{agent_name, atom_name, random_cgs};
pub use stateset::StateSet;

pub type StateId = usize;
pub type AgentId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CgsError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("invalid structure: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("action `{label}` not in Act_{agent}^{state}")]
    NotInMenu { agent: String, state: String, label: String },
    #[error("bad action profile `{0}`")]
    BadProfile(String),
}

/// One action index per agent, in agent order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile(pub Vec<usize>);

/// Actions chosen by a coalition at a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointAction {
    pub state: StateId,
    pub choices: BTreeMap<AgentId, usize>,
}

impl JointAction {
    /// The empty coalition's only joint action.
    pub fn empty(state: StateId) -> Self {
        JointAction { state, choices: BTreeMap::new() }
    }

    pub fn from_labels(g: &Cgs, state: &str, choices: &[(&str, &str)]) -> Result<Self, CgsError> {
        let w = g.state_id(state)?;
        let mut map = BTreeMap::new();
        for &(agent, label) in choices {
            let a = g.agent_id(agent)?;
            map.insert(a, g.action_index(w, a, label)?);
        }
        Ok(JointAction { state: w, choices: map })
    }

    fn agrees(&self, profile: &Profile) -> bool {
        self.choices.iter().all(|(&a, &act)| profile.0[a] == act)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cgs {
    agents: Vec<String>,
    states: Vec<String>,
    /// `menus[state][agent]`
    menus: Vec<Vec<Vec<String>>>,
    /// `delta[state][profile code]`
    delta: Vec<Vec<StateId>>,
    valuation: IndexMap<String, StateSet>,
}

impl Cgs {
    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn state_name(&self, w: StateId) -> &str {
        &self.states[w]
    }

    pub fn state_id(&self, name: &str) -> Result<StateId, CgsError> {
        self.states.iter().position(|s| s == name).ok_or_else(|| CgsError::UnknownState(name.to_string()))
    }

    pub fn agent_id(&self, name: &str) -> Result<AgentId, CgsError> {
        self.agents.iter().position(|s| s == name).ok_or_else(|| CgsError::UnknownAgent(name.to_string()))
    }

    /// Agent ids of a coalition, ascending.
    pub fn coalition_ids(&self, c: &Coalition) -> Result<Vec<AgentId>, CgsError> {
        let mut ids = c.iter().map(|a| self.agent_id(a)).collect::<Result<Vec<_>, _>>()?;
        ids.sort_unstable();
        Ok(ids)
    }

    pub fn grand_coalition(&self) -> Coalition {
        Coalition::new(self.agents.iter().cloned())
    }

    pub fn menu(&self, w: StateId, agent: AgentId) -> &[String] {
        &self.menus[w][agent]
    }

    pub fn action_index(&self, w: StateId, agent: AgentId, label: &str) -> Result<usize, CgsError> {
        self.menus[w][agent].iter().position(|l| l == label).ok_or_else(|| CgsError::NotInMenu {
            agent: self.agents[agent].clone(),
            state: self.states[w].clone(),
            label: label.to_string(),
        })
    }

    pub fn num_profiles(&self, w: StateId) -> usize {
        self.delta[w].len()
    }

    pub fn profile(&self, w: StateId, code: usize) -> Profile {
        let mut idx = vec![0; self.agents.len()];
        let mut rest = code;
        for a in (0..self.agents.len()).rev() {
            let k = self.menus[w][a].len();
            idx[a] = rest % k;
            rest /= k;
        }
        Profile(idx)
    }

    pub fn profile_code(&self, w: StateId, profile: &Profile) -> usize {
        profile.0.iter().enumerate().fold(0, |acc, (a, &i)| acc * self.menus[w][a].len() + i)
    }

    pub fn profiles(&self, w: StateId) -> impl Iterator<Item = Profile> + '_ {
        (0..self.num_profiles(w)).map(move |c| self.profile(w, c))
    }

    pub fn is_profile_at(&self, w: StateId, profile: &Profile) -> bool {
        profile.0.len() == self.agents.len() && profile.0.iter().enumerate().all(|(a, &i)| i < self.menus[w][a].len())
    }

    pub fn next(&self, w: StateId, profile: &Profile) -> StateId {
        self.delta[w][self.profile_code(w, profile)]
    }

    pub fn next_by_code(&self, w: StateId, code: usize) -> StateId {
        self.delta[w][code]
    }

    /// States where `atom` holds; empty when the atom is not in the valuation.
    pub fn valuation(&self, atom: &str) -> StateSet {
        self.valuation.get(atom).cloned().unwrap_or_else(|| StateSet::empty(self.num_states()))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.valuation.keys().map(String::as_str)
    }

    /// Possible successors of a joint action: the targets of every full
    /// profile at its state that agrees with it.
    pub fn successors(&self, j: &JointAction) -> Result<StateSet, CgsError> {
        if j.state >= self.num_states() {
            return Err(CgsError::UnknownState(j.state.to_string()));
        }
        for (&a, &act) in &j.choices {
            if a >= self.num_agents() {
                return Err(CgsError::UnknownAgent(a.to_string()));
            }
            if act >= self.menus[j.state][a].len() {
                return Err(CgsError::NotInMenu {
                    agent: self.agents[a].clone(),
                    state: self.states[j.state].clone(),
                    label: act.to_string(),
                });
            }
        }
        let mut out = StateSet::empty(self.num_states());
        for (code, profile) in self.profiles(j.state).enumerate() {
            if j.agrees(&profile) {
                out.insert(self.delta[j.state][code]);
            }
        }
        Ok(out)
    }

    /// Every joint action of the agents in `coalition` at `w` (lexicographic),
    /// each paired with its successor set.
    pub fn joint_moves(&self, w: StateId, coalition: &[AgentId]) -> Vec<(Vec<usize>, StateSet)> {
        let radix: Vec<usize> = coalition.iter().map(|&a| self.menus[w][a].len()).collect();
        let count: usize = radix.iter().product();
        let mut moves: Vec<(Vec<usize>, StateSet)> = (0..count)
            .map(|mut c| {
                let mut choice = vec![0; radix.len()];
                for i in (0..radix.len()).rev() {
                    choice[i] = c % radix[i];
                    c /= radix[i];
                }
                (choice, StateSet::empty(self.num_states()))
            })
            .collect();
        for (code, profile) in self.profiles(w).enumerate() {
            let key = coalition.iter().zip(&radix).fold(0, |acc, (&a, &k)| acc * k + profile.0[a]);
            moves[key].1.insert(self.delta[w][code]);
        }
        moves
    }

    /// Comma-joined action labels in agent order.
    pub fn profile_label(&self, w: StateId, profile: &Profile) -> String {
        profile.0.iter().enumerate().map(|(a, &i)| self.menus[w][a][i].as_str()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_profile(&self, w: StateId, text: &str) -> Result<Profile, CgsError> {
        let labels: Vec<&str> = if text.is_empty() { Vec::new() } else { text.split(',').collect() };
        if labels.len() != self.num_agents() {
            return Err(CgsError::BadProfile(text.to_string()));
        }
        labels
            .iter()
            .enumerate()
            .map(|(a, l)| self.action_index(w, a, l.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map(Profile)
    }

    /// `{w0, w1}` in state order.
    pub fn format_states(&self, set: &StateSet) -> String {
        let names: Vec<&str> = set.iter().map(|w| self.states[w].as_str()).collect();
        format!("{{{}}}", names.join(", "))
    }

    pub fn state_names(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|w| self.states[w].clone()).collect()
    }

    /// Re-checks every structural invariant; empty iff valid.
    pub fn validate(&self) -> Vec<String> {
        self.to_document().validate()
    }
}
