//! The branching-time frame obtained by unraveling a structure.
//!
//! Moments are the finite runs from a root state. A moment records the
//! states it visits and the full action profiles taken between them, so two
//! profiles that happen to reach the same state still open distinct
//! branches. Choice cells at a moment group its outgoing branches by the
//! agent's component of the profile; a cell is labelled by that action and
//! the execution map sends each available action back to its cell.
//!
//! [`unravel`] materialises every moment up to a fixed depth and
//! [`verify_frame`] re-checks the frame conditions on the result. Leaves of
//! the fragment carry no choice structure; histories are the maximal
//! branches of the fragment, which is enough for conditions that only look
//! one step ahead of a moment.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::cgs::{AgentId, Cgs, Profile, StateId};

/// Default cap on materialised moments.
pub const DEFAULT_MOMENT_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnravelError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("instance too large: more than {0} moments")]
    TooLarge(usize),
    #[error("Exe^{moment}_{agent}(`{label}`) is undefined")]
    ExeUndefined { moment: String, agent: String, label: String },
}

/// A finite run `w1 -s1-> w2 -s2-> ... wk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Moment {
    states: Vec<StateId>,
    profiles: Vec<Profile>,
}

impl Moment {
    /// The one-element run at `w`.
    pub fn root(w: StateId) -> Self {
        Moment { states: vec![w], profiles: Vec::new() }
    }

    /// Builds a run from its profile sequence, checking every step.
    pub fn from_profiles(g: &Cgs, w: StateId, profiles: &[Profile]) -> Option<Self> {
        let mut m = Moment::root(w);
        for p in profiles {
            if !g.is_profile_at(m.last(), p) {
                return None;
            }
            m = m.extend(g, p.clone());
        }
        Some(m)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn first(&self) -> StateId {
        self.states[0]
    }

    pub fn last(&self) -> StateId {
        *self.states.last().expect("moments are nonempty")
    }

    /// The initial segment of length `len` (1-based, as `λ[1,len]`).
    pub fn prefix(&self, len: usize) -> Moment {
        assert!(len >= 1 && len <= self.len());
        Moment { states: self.states[..len].to_vec(), profiles: self.profiles[..len - 1].to_vec() }
    }

    /// Successor of this moment along the branch that takes `profile` next.
    pub fn extend(&self, g: &Cgs, profile: Profile) -> Moment {
        let next = g.next(self.last(), &profile);
        let mut m = self.clone();
        m.states.push(next);
        m.profiles.push(profile);
        m
    }

    /// Strict order of the frame: `self` is a proper initial segment of `other`.
    pub fn precedes(&self, other: &Moment) -> bool {
        self.len() < other.len()
            && other.states[..self.len()] == self.states[..]
            && other.profiles[..self.profiles.len()] == self.profiles[..]
    }

    /// Every step follows the transition function.
    pub fn is_consistent(&self, g: &Cgs) -> bool {
        self.profiles.len() + 1 == self.states.len()
            && self
                .profiles
                .iter()
                .enumerate()
                .all(|(i, p)| g.is_profile_at(self.states[i], p) && g.next(self.states[i], p) == self.states[i + 1])
    }

    pub fn display<'a>(&'a self, g: &'a Cgs) -> MomentDisplay<'a> {
        MomentDisplay { moment: self, g }
    }
}

pub struct MomentDisplay<'a> {
    moment: &'a Moment,
    g: &'a Cgs,
}

impl fmt::Display for MomentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.moment;
        f.write_str(self.g.state_name(m.states[0]))?;
        for (i, p) in m.profiles.iter().enumerate() {
            write!(f, " -({})-> {}", self.g.profile_label(m.states[i], p), self.g.state_name(m.states[i + 1]))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub profile: Profile,
    /// Index of the successor moment.
    pub successor: usize,
}

/// One action token of an agent: the branches on which it is performed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceCell {
    pub label: String,
    /// Indices into the moment's branch list.
    pub branches: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AgentChoice {
    pub cells: Vec<ChoiceCell>,
    /// Execution map: action label to cell index.
    pub exe: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MomentNode {
    pub parent: Option<usize>,
    pub branches: Vec<Branch>,
    /// One entry per agent; empty at leaves.
    pub choice: Vec<AgentChoice>,
}

/// All moments of depth at most `depth` above a root state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdtFragment {
    pub root: StateId,
    pub depth: usize,
    pub moments: Vec<Moment>,
    pub nodes: Vec<MomentNode>,
}

/// Partition of the profiles at `w` by the agent's component: one entry per
/// action of the agent's menu, holding the codes of the profiles using it.
pub fn choice_partition(g: &Cgs, w: StateId, agent: AgentId) -> Vec<Vec<usize>> {
    let mut cells = vec![Vec::new(); g.menu(w, agent).len()];
    for (code, p) in g.profiles(w).enumerate() {
        cells[p.0[agent]].push(code);
    }
    cells
}

pub fn unravel(g: &Cgs, w: StateId, depth: usize) -> Result<BdtFragment, UnravelError> {
    unravel_with_limit(g, w, depth, DEFAULT_MOMENT_LIMIT)
}

pub fn unravel_with_limit(g: &Cgs, w: StateId, depth: usize, limit: usize) -> Result<BdtFragment, UnravelError> {
    if w >= g.num_states() {
        return Err(UnravelError::UnknownState(w.to_string()));
    }
    if depth == 0 {
        return Err(UnravelError::ZeroDepth);
    }
    let mut frag = BdtFragment { root: w, depth, moments: vec![Moment::root(w)], nodes: vec![MomentNode::default()] };
    let mut i = 0;
    while i < frag.moments.len() {
        let m = frag.moments[i].clone();
        if m.len() <= depth {
            let last = m.last();
            let mut branches = Vec::with_capacity(g.num_profiles(last));
            for p in g.profiles(last) {
                if frag.moments.len() >= limit {
                    return Err(UnravelError::TooLarge(limit));
                }
                frag.moments.push(m.extend(g, p.clone()));
                frag.nodes.push(MomentNode { parent: Some(i), ..MomentNode::default() });
                branches.push(Branch { profile: p, successor: frag.moments.len() - 1 });
            }
            let choice = (0..g.num_agents())
                .map(|a| {
                    let cells: Vec<ChoiceCell> = choice_partition(g, last, a)
                        .into_iter()
                        .enumerate()
                        .map(|(act, codes)| ChoiceCell { label: g.menu(last, a)[act].clone(), branches: codes })
                        .collect();
                    let exe = cells.iter().enumerate().map(|(c, cell)| (cell.label.clone(), c)).collect();
                    AgentChoice { cells, exe }
                })
                .collect();
            frag.nodes[i].branches = branches;
            frag.nodes[i].choice = choice;
        }
        i += 1;
    }
    Ok(frag)
}

impl BdtFragment {
    pub fn is_leaf(&self, m: usize) -> bool {
        self.nodes[m].branches.is_empty()
    }

    /// Index of the cell of `agent` containing `branch` at moment `m`.
    pub fn cell_of(&self, m: usize, agent: AgentId, branch: usize) -> Option<usize> {
        self.nodes[m].choice.get(agent)?.cells.iter().position(|c| c.branches.contains(&branch))
    }

    /// Label of the action token `agent` performs along `branch` at `m`.
    pub fn lbl(&self, m: usize, agent: AgentId, branch: usize) -> Option<&str> {
        let c = self.cell_of(m, agent, branch)?;
        Some(&self.nodes[m].choice[agent].cells[c].label)
    }

    /// Execution map; undefined outside the agent's menu at `m`.
    pub fn exe(&self, g: &Cgs, m: usize, agent: AgentId, label: &str) -> Result<&ChoiceCell, UnravelError> {
        let node = &self.nodes[m];
        node.choice.get(agent).and_then(|ch| ch.exe.get(label).map(|&c| &ch.cells[c])).ok_or_else(|| {
            UnravelError::ExeUndefined {
                moment: self.moments[m].display(g).to_string(),
                agent: g.agents()[agent].clone(),
                label: label.to_string(),
            }
        })
    }

    /// Deterministic text dump, one moment per line.
    pub fn dump(&self, g: &Cgs) -> String {
        let mut out = String::new();
        writeln!(out, "# unravel root={} depth={} moments={}", g.state_name(self.root), self.depth, self.moments.len())
            .unwrap();
        for (m, node) in self.moments.iter().zip(&self.nodes) {
            write!(out, "{}", m.display(g)).unwrap();
            if node.branches.is_empty() {
                out.push_str(" | leaf");
            }
            for (a, ch) in node.choice.iter().enumerate() {
                write!(out, " | {}:", g.agents()[a]).unwrap();
                for cell in &ch.cells {
                    let profiles: Vec<String> =
                        cell.branches.iter().map(|&b| g.profile_label(m.last(), &node.branches[b].profile)).collect();
                    write!(out, " {}{{{}}}", cell.label, profiles.join(";")).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, g: &Cgs) -> serde_json::Value {
        #[derive(Serialize)]
        struct CellJson {
            label: String,
            profiles: Vec<String>,
        }
        #[derive(Serialize)]
        struct MomentJson {
            states: Vec<String>,
            profiles: Vec<String>,
            choice: BTreeMap<String, Vec<CellJson>>,
        }
        let moments: Vec<MomentJson> = self
            .moments
            .iter()
            .zip(&self.nodes)
            .map(|(m, node)| MomentJson {
                states: m.states.iter().map(|&s| g.state_name(s).to_string()).collect(),
                profiles: m.profiles.iter().enumerate().map(|(i, p)| g.profile_label(m.states[i], p)).collect(),
                choice: node
                    .choice
                    .iter()
                    .enumerate()
                    .map(|(a, ch)| {
                        let cells = ch
                            .cells
                            .iter()
                            .map(|c| CellJson {
                                label: c.label.clone(),
                                profiles: c
                                    .branches
                                    .iter()
                                    .map(|&b| g.profile_label(m.last(), &node.branches[b].profile))
                                    .collect(),
                            })
                            .collect();
                        (g.agents()[a].clone(), cells)
                    })
                    .collect(),
            })
            .collect();
        serde_json::json!({
            "root": g.state_name(self.root),
            "depth": self.depth,
            "moments": moments,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FrameCondition {
    /// Strict partial order without backward branching.
    Order,
    /// Unique immediate successor along each branch.
    TimeDiscreteness,
    /// Cells partition the branches by the agent's action.
    Choice,
    /// No choice between undivided histories.
    NoChoiceBetweenUndivided,
    /// Independence of agency.
    IndependenceOfAgency,
    /// `Exe(Lbl(cell)) = cell`.
    ExeOfLabel,
    /// `Lbl(Exe(τ)) = τ`.
    LabelOfExe,
    Determinism,
}

impl FrameCondition {
    pub fn code(self) -> &'static str {
        match self {
            FrameCondition::Order => "order",
            FrameCondition::TimeDiscreteness => "TD",
            FrameCondition::Choice => "choice",
            FrameCondition::NoChoiceBetweenUndivided => "NC",
            FrameCondition::IndependenceOfAgency => "IA",
            FrameCondition::ExeOfLabel => "EL",
            FrameCondition::LabelOfExe => "LE",
            FrameCondition::Determinism => "determinism",
        }
    }
}

impl fmt::Display for FrameCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameViolation {
    pub condition: FrameCondition,
    pub moment: String,
    pub detail: String,
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) at {}: {}", self.condition, self.moment, self.detail)
    }
}

/// Checks every frame condition on the fragment; empty iff all hold.
pub fn verify_frame(g: &Cgs, frag: &BdtFragment) -> Vec<FrameViolation> {
    let mut out = Vec::new();
    let mut report = |condition, m: usize, detail: String| {
        out.push(FrameViolation { condition, moment: frag.moments[m].display(g).to_string(), detail });
    };

    // Order: moments are distinct runs, parent links are immediate initial
    // segments, and following them from any moment visits exactly its
    // proper initial segments down to the root.
    let mut seen = HashSet::new();
    for (i, m) in frag.moments.iter().enumerate() {
        if !m.is_consistent(g) {
            report(FrameCondition::Order, i, "run does not follow the transition function".into());
        }
        if !seen.insert(m) {
            report(FrameCondition::Order, i, "duplicate moment".into());
        }
        if m.first() != frag.root {
            report(FrameCondition::Order, i, "moment not rooted at the fragment root".into());
        }
        let mut cursor = frag.nodes[i].parent;
        let mut len = m.len();
        while let Some(p) = cursor {
            len -= 1;
            if len == 0 || frag.moments[p] != m.prefix(len) || !frag.moments[p].precedes(m) {
                report(FrameCondition::Order, i, "ancestor chain is not the chain of initial segments".into());
                break;
            }
            cursor = frag.nodes[p].parent;
        }
        if cursor.is_none() && len != 1 {
            report(FrameCondition::Order, i, "ancestor chain does not reach the root".into());
        }
    }

    for (i, node) in frag.nodes.iter().enumerate() {
        let m = &frag.moments[i];
        let last = m.last();
        if node.branches.is_empty() {
            if m.len() <= frag.depth {
                report(FrameCondition::TimeDiscreteness, i, "inner moment has no successor".into());
            }
            continue;
        }

        // TD: each branch leads to the immediate extension by its profile.
        for (b, br) in node.branches.iter().enumerate() {
            let ok = br.successor < frag.moments.len()
                && frag.nodes[br.successor].parent == Some(i)
                && g.is_profile_at(last, &br.profile)
                && frag.moments[br.successor] == m.extend(g, br.profile.clone());
            if !ok {
                report(
                    FrameCondition::TimeDiscreteness,
                    i,
                    format!("branch {b} does not lead to its immediate successor"),
                );
            }
        }
        let mut codes: Vec<usize> = node
            .branches
            .iter()
            .filter(|br| g.is_profile_at(last, &br.profile))
            .map(|br| g.profile_code(last, &br.profile))
            .collect();
        codes.sort_unstable();
        if codes != (0..g.num_profiles(last)).collect::<Vec<_>>() {
            report(FrameCondition::Choice, i, "branches are not in bijection with the action profiles".into());
        }

        if node.choice.len() != g.num_agents() {
            report(FrameCondition::Choice, i, "missing choice partition".into());
            continue;
        }
        // Choice: partition by the agent's component, one cell per action.
        for (a, ch) in node.choice.iter().enumerate() {
            let agent = &g.agents()[a];
            let mut count = vec![0usize; node.branches.len()];
            for cell in &ch.cells {
                for &b in &cell.branches {
                    match count.get_mut(b) {
                        Some(c) => *c += 1,
                        None => report(FrameCondition::Choice, i, format!("{agent}: cell names unknown branch {b}")),
                    }
                }
            }
            if count.iter().any(|&c| c != 1) {
                report(FrameCondition::Choice, i, format!("{agent}: cells do not partition the branches"));
            }
            if ch.cells.len() != g.menu(last, a).len() {
                report(
                    FrameCondition::Choice,
                    i,
                    format!("{agent}: {} cells for {} actions", ch.cells.len(), g.menu(last, a).len()),
                );
            }
            for cell in &ch.cells {
                let mut components: Vec<usize> =
                    cell.branches.iter().filter_map(|&b| node.branches.get(b)).map(|br| br.profile.0[a]).collect();
                components.dedup();
                if components.len() > 1 {
                    report(FrameCondition::Choice, i, format!("{agent}: cell `{}` mixes actions", cell.label));
                }
            }
        }

        // NC: branches through a common later moment share every cell.
        let mut by_successor: HashMap<usize, Vec<usize>> = HashMap::new();
        for (b, br) in node.branches.iter().enumerate() {
            by_successor.entry(br.successor).or_default().push(b);
        }
        let mut undivided: Vec<_> = by_successor.into_values().filter(|bs| bs.len() > 1).collect();
        undivided.sort();
        for bs in undivided {
            for a in 0..g.num_agents() {
                let cells: HashSet<_> = bs.iter().map(|&b| frag.cell_of(i, a, b)).collect();
                if cells.len() > 1 {
                    report(
                        FrameCondition::NoChoiceBetweenUndivided,
                        i,
                        format!("{}: branches {bs:?} share a successor but lie in different cells", g.agents()[a]),
                    );
                }
            }
        }

        // IA: every selection of one cell per agent has a common branch.
        let mut selection = vec![0usize; g.num_agents()];
        'select: loop {
            let common = (0..node.branches.len()).any(|b| {
                selection
                    .iter()
                    .enumerate()
                    .all(|(a, &c)| node.choice[a].cells.get(c).is_some_and(|cell| cell.branches.contains(&b)))
            });
            if !common {
                let labels: Vec<&str> = selection
                    .iter()
                    .enumerate()
                    .map(|(a, &c)| node.choice[a].cells.get(c).map_or("?", |cell| cell.label.as_str()))
                    .collect();
                report(
                    FrameCondition::IndependenceOfAgency,
                    i,
                    format!("selection ({}) has empty intersection", labels.join(",")),
                );
            }
            for a in (0..selection.len()).rev() {
                selection[a] += 1;
                if selection[a] < node.choice[a].cells.len() {
                    continue 'select;
                }
                selection[a] = 0;
            }
            break;
        }

        // EL and LE.
        for (a, ch) in node.choice.iter().enumerate() {
            let agent = &g.agents()[a];
            for b in 0..node.branches.len() {
                let Some(c) = frag.cell_of(i, a, b) else { continue };
                if ch.exe.get(&ch.cells[c].label) != Some(&c) {
                    report(
                        FrameCondition::ExeOfLabel,
                        i,
                        format!("{agent}: Exe(Lbl) differs from the current cell on branch {b}"),
                    );
                }
            }
            for (tau, &c) in &ch.exe {
                if !g.menu(last, a).contains(tau) {
                    report(FrameCondition::LabelOfExe, i, format!("{agent}: Exe defined on `{tau}` outside the menu"));
                } else if ch.cells.get(c).map(|cell| cell.label.as_str()) != Some(tau.as_str()) {
                    report(FrameCondition::LabelOfExe, i, format!("{agent}: Lbl(Exe(`{tau}`)) != `{tau}`"));
                }
            }
            for tau in g.menu(last, a) {
                if !ch.exe.contains_key(tau) {
                    report(FrameCondition::LabelOfExe, i, format!("{agent}: Exe undefined on available `{tau}`"));
                }
            }
        }

        // Determinism: a cell of the grand coalition fixes the successor.
        for b in 0..node.branches.len() {
            for b2 in b + 1..node.branches.len() {
                let same_cell = (0..g.num_agents()).all(|a| frag.cell_of(i, a, b) == frag.cell_of(i, a, b2));
                if same_cell && node.branches[b].successor != node.branches[b2].successor {
                    report(
                        FrameCondition::Determinism,
                        i,
                        format!("branches {b} and {b2} share every cell but diverge"),
                    );
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgs::random_cgs;
    use crate::testutil::toy1;

    fn lines(g: &Cgs, f: &BdtFragment) -> Vec<String> {
        f.moments.iter().map(|m| m.display(g).to_string()).collect()
    }

    #[test]
    fn toy1_depth_one_and_two() {
        let g = toy1();
        let f1 = unravel(&g, 0, 1).unwrap();
        let states: Vec<Vec<StateId>> = f1.moments.iter().map(|m| m.states().to_vec()).collect();
        assert_eq!(states, vec![vec![0], vec![0, 1], vec![0, 0]]);
        let f2 = unravel(&g, 0, 2).unwrap();
        let mut states: Vec<Vec<StateId>> = f2.moments.iter().map(|m| m.states().to_vec()).collect();
        states.sort();
        assert_eq!(states, vec![vec![0], vec![0, 0], vec![0, 0, 0], vec![0, 0, 1], vec![0, 1], vec![0, 1, 1]]);
        assert!(verify_frame(&g, &f2).is_empty());
        assert_eq!(lines(&g, &f2)[3], "w0 -(s1)-> w1 -(s1)-> w1");
    }

    #[test]
    fn single_action_everywhere_gives_a_chain() {
        let g = random_cgs(3, 2, 1, 1, 9);
        let f = unravel(&g, 1, 3).unwrap();
        assert_eq!(f.moments.len(), 4);
        for (i, node) in f.nodes.iter().enumerate().take(3) {
            assert_eq!(node.branches.len(), 1);
            assert_eq!(node.branches[0].successor, i + 1);
        }
    }

    #[test]
    fn exe_is_partial() {
        let g = toy1();
        let f = unravel(&g, 0, 1).unwrap();
        assert_eq!(f.exe(&g, 0, 0, "s2").unwrap().branches, vec![1]);
        assert_eq!(f.lbl(0, 0, 0), Some("s1"));
        // w1 offers only s1
        let leafless = unravel(&g, 1, 1).unwrap();
        assert!(matches!(leafless.exe(&g, 0, 0, "s2"), Err(UnravelError::ExeUndefined { .. })));
    }

    #[test]
    fn errors() {
        let g = toy1();
        assert_eq!(unravel(&g, 0, 0), Err(UnravelError::ZeroDepth));
        assert!(matches!(unravel(&g, 5, 1), Err(UnravelError::UnknownState(_))));
        assert_eq!(unravel_with_limit(&g, 0, 3, 4), Err(UnravelError::TooLarge(4)));
    }

    #[test]
    fn corrupted_label_is_reported() {
        let g = toy1();
        let mut f = unravel(&g, 0, 2).unwrap();
        f.nodes[0].choice[0].cells[0].label = "s2".into();
        let v = verify_frame(&g, &f);
        assert!(v.iter().any(|x| x.condition == FrameCondition::LabelOfExe), "{v:?}");
    }

    #[test]
    fn dump_is_stable() {
        let g = toy1();
        let f = unravel(&g, 0, 1).unwrap();
        assert_eq!(
            f.dump(&g),
            "# unravel root=w0 depth=1 moments=3\n\
             w0 | a: s1{s1} s2{s2}\n\
             w0 -(s1)-> w1 | leaf\n\
             w0 -(s2)-> w0 | leaf\n"
        );
    }

    #[test]
    fn random_fragments_pass() {
        for seed in 0..10 {
            let g = random_cgs(3, 2, 2, 1, seed);
            for w in 0..3 {
                let f = unravel(&g, w, 2).unwrap();
                assert_eq!(verify_frame(&g, &f), vec![], "seed {seed} state {w}");
            }
        }
    }
}
