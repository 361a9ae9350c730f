//! JSON document format and validation.

use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{Cgs, CgsError, Profile, StateSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CgsDocument {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    /// state -> agent -> action labels
    pub actions: IndexMap<String, IndexMap<String, Vec<String>>>,
    pub delta: Vec<DeltaRecord>,
    #[serde(default)]
    pub valuation: IndexMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaRecord {
    pub state: String,
    pub profile: IndexMap<String, String>,
    pub next: String,
}

/// Parses and validates a CGS document.
pub fn load_cgs(text: &str) -> Result<Cgs, CgsError> {
    let doc: CgsDocument = serde_json::from_str(text).map_err(|e| CgsError::Malformed(e.to_string()))?;
    Cgs::try_from(doc)
}

fn duplicates<'a>(items: impl IntoIterator<Item = &'a String>) -> Vec<&'a String> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|x| !seen.insert(x.as_str())).collect()
}

impl CgsDocument {
    /// Every violated invariant, in document order. Empty iff the document
    /// describes a concurrent game structure.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.states.is_empty() {
            out.push("no states".to_string());
        }
        for s in duplicates(&self.states) {
            out.push(format!("duplicate state `{s}`"));
        }
        for a in duplicates(&self.agents) {
            out.push(format!("duplicate agent `{a}`"));
        }
        for s in self.actions.keys() {
            if !self.states.contains(s) {
                out.push(format!("actions given for unknown state `{s}`"));
            }
        }
        let mut menus_ok = true;
        for w in &self.states {
            let row = self.actions.get(w);
            if let Some(row) = row {
                for a in row.keys() {
                    if !self.agents.contains(a) {
                        out.push(format!("actions given for unknown agent `{a}` at `{w}`"));
                    }
                }
            }
            for a in &self.agents {
                match row.and_then(|r| r.get(a)) {
                    None => {
                        menus_ok = false;
                        out.push(format!("missing Act_{a}^{w}"));
                    }
                    Some(menu) if menu.is_empty() => {
                        menus_ok = false;
                        out.push(format!("empty Act_{a}^{w}"));
                    }
                    Some(menu) => {
                        for l in duplicates(menu) {
                            menus_ok = false;
                            out.push(format!("duplicate label `{l}` in Act_{a}^{w}"));
                        }
                    }
                }
            }
        }

        let mut defined: IndexMap<(String, Vec<String>), &str> = IndexMap::new();
        for (i, rec) in self.delta.iter().enumerate() {
            let mut ok = true;
            if !self.states.contains(&rec.state) {
                out.push(format!("delta record {i}: unknown state `{}`", rec.state));
                ok = false;
            }
            if !self.states.contains(&rec.next) {
                out.push(format!("delta record {i}: unknown next state `{}`", rec.next));
                ok = false;
            }
            for a in rec.profile.keys() {
                if !self.agents.contains(a) {
                    out.push(format!("delta record {i}: unknown agent `{a}`"));
                    ok = false;
                }
            }
            let mut labels = Vec::with_capacity(self.agents.len());
            for a in &self.agents {
                match rec.profile.get(a) {
                    None => {
                        out.push(format!("delta record {i}: profile misses agent `{a}`"));
                        ok = false;
                    }
                    Some(l) => {
                        let menu = self.actions.get(&rec.state).and_then(|r| r.get(a));
                        if menus_ok && ok && !menu.is_some_and(|m| m.contains(l)) {
                            out.push(format!("delta record {i}: `{l}` not in Act_{a}^{}", rec.state));
                            ok = false;
                        }
                        labels.push(l.clone());
                    }
                }
            }
            if ok {
                let key = (rec.state.clone(), labels);
                if defined.insert(key.clone(), rec.next.as_str()).is_some() {
                    out.push(format!("delta defined twice at ({}, [{}])", key.0, key.1.join(",")));
                }
            }
        }

        if menus_ok {
            for w in &self.states {
                let menus: Vec<&Vec<String>> = self.agents.iter().map(|a| &self.actions[w][a]).collect();
                let count: usize = menus.iter().map(|m| m.len()).product();
                for mut code in 0..count {
                    let mut labels = vec![String::new(); menus.len()];
                    for i in (0..menus.len()).rev() {
                        labels[i] = menus[i][code % menus[i].len()].clone();
                        code /= menus[i].len();
                    }
                    let key = (w.clone(), labels);
                    if !defined.contains_key(&key) {
                        out.push(format!("delta not total at ({}, [{}])", key.0, key.1.join(",")));
                    }
                }
            }
        }

        for (p, ws) in &self.valuation {
            for w in ws {
                if !self.states.contains(w) {
                    out.push(format!("valuation of `{p}` names unknown state `{w}`"));
                }
            }
        }
        out
    }
}

impl TryFrom<CgsDocument> for Cgs {
    type Error = CgsError;

    fn try_from(doc: CgsDocument) -> Result<Self, Self::Error> {
        let violations = doc.validate();
        if !violations.is_empty() {
            return Err(CgsError::Invalid(violations));
        }
        let n = doc.states.len();
        let menus: Vec<Vec<Vec<String>>> =
            doc.states.iter().map(|w| doc.agents.iter().map(|a| doc.actions[w][a].clone()).collect()).collect();
        let mut g = Cgs {
            agents: doc.agents.clone(),
            states: doc.states.clone(),
            delta: menus.iter().map(|row| vec![0; row.iter().map(Vec::len).product()]).collect(),
            menus,
            valuation: IndexMap::new(),
        };
        for rec in &doc.delta {
            let w = g.state_id(&rec.state)?;
            let idx = doc
                .agents
                .iter()
                .enumerate()
                .map(|(a, name)| g.action_index(w, a, &rec.profile[name]))
                .collect::<Result<Vec<_>, _>>()?;
            let code = g.profile_code(w, &Profile(idx));
            g.delta[w][code] = g.state_id(&rec.next)?;
        }
        for (p, ws) in &doc.valuation {
            let mut set = StateSet::empty(n);
            for w in ws {
                set.insert(g.state_id(w)?);
            }
            g.valuation.insert(p.clone(), set);
        }
        Ok(g)
    }
}

impl Cgs {
    pub fn to_document(&self) -> CgsDocument {
        let actions = self
            .states
            .iter()
            .enumerate()
            .map(|(w, name)| {
                let row = self
                    .agents
                    .iter()
                    .enumerate()
                    .map(|(a, agent)| (agent.clone(), self.menus[w][a].clone()))
                    .collect();
                (name.clone(), row)
            })
            .collect();
        let mut delta = Vec::new();
        for w in 0..self.num_states() {
            for (code, profile) in self.profiles(w).enumerate() {
                delta.push(DeltaRecord {
                    state: self.states[w].clone(),
                    profile: self
                        .agents
                        .iter()
                        .enumerate()
                        .map(|(a, agent)| (agent.clone(), self.menus[w][a][profile.0[a]].clone()))
                        .collect(),
                    next: self.states[self.delta[w][code]].clone(),
                });
            }
        }
        let valuation = self.valuation.iter().map(|(p, set)| (p.clone(), self.state_names(set))).collect();
        CgsDocument { agents: self.agents.clone(), states: self.states.clone(), actions, delta, valuation }
    }

    /// Pretty-printed JSON in the document format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY1: &str = include_str!("../../../../fixtures/toy1.json");

    #[test]
    fn toy1_loads() {
        let g = load_cgs(TOY1).unwrap();
        assert_eq!(g.num_states(), 2);
        assert_eq!(g.num_agents(), 1);
        assert!(g.validate().is_empty());
        assert_eq!(load_cgs(&g.to_json()).unwrap(), g);
    }

    fn toy1_doc() -> CgsDocument {
        serde_json::from_str(TOY1).unwrap()
    }

    #[test]
    fn missing_delta_row() {
        let mut doc = toy1_doc();
        doc.delta.retain(|r| !(r.state == "w0" && r.profile["a"] == "s2"));
        assert_eq!(doc.validate(), vec!["delta not total at (w0, [s2])".to_string()]);
        let err = Cgs::try_from(doc).unwrap_err();
        assert!(err.to_string().contains("delta not total at (w0, [s2])"));
    }

    #[test]
    fn empty_menu() {
        let mut doc = toy1_doc();
        doc.actions["w1"]["a"].clear();
        doc.delta.retain(|r| r.state != "w1");
        assert_eq!(doc.validate(), vec!["empty Act_a^w1".to_string()]);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = TOY1.replacen("\"agents\"", "\"players\": [], \"agents\"", 1);
        assert!(matches!(load_cgs(&text), Err(CgsError::Malformed(_))));
        assert!(matches!(load_cgs("{"), Err(CgsError::Malformed(_))));
    }

    #[test]
    fn profile_label_outside_menu() {
        let mut doc = toy1_doc();
        doc.delta[2].profile["a"] = "s9".into();
        let v = doc.validate();
        assert!(v.iter().any(|m| m.contains("`s9` not in Act_a^w1")), "{v:?}");
        assert!(v.iter().any(|m| m.contains("delta not total at (w1, [s1])")), "{v:?}");
    }

    #[test]
    fn valuation_outside_states() {
        let mut doc = toy1_doc();
        doc.valuation.insert("q".into(), vec!["w7".into()]);
        assert_eq!(doc.validate(), vec!["valuation of `q` names unknown state `w7`".to_string()]);
    }
}
