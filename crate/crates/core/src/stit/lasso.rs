//! Ultimately periodic histories.

use std::collections::HashSet;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cgs::{Cgs, CgsError, Profile, StateId};
use crate::unravel::Moment;

/// Above this many candidate sequences the pool is sampled by random walks
/// instead of being enumerated.
pub const EXHAUSTIVE_POOL_LIMIT: u128 = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("lasso loop is empty")]
    EmptyLoop,
    #[error("profile {index} of the lasso is not available at {state}")]
    NotAvailable { index: usize, state: String },
    #[error("lasso loop does not close: it starts at {start} and ends at {end}")]
    NotClosed { start: String, end: String },
    #[error("malformed lasso `{0}`: expected `state ; stem profiles | loop profiles`")]
    Syntax(String),
    #[error(transparent)]
    Model(#[from] CgsError),
}

/// A history given as `anchor`, then `stem`, then `cycle` repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoHistory {
    anchor: StateId,
    stem: Vec<Profile>,
    cycle: Vec<Profile>,
}

impl LassoHistory {
    pub fn new(g: &Cgs, anchor: StateId, stem: Vec<Profile>, cycle: Vec<Profile>) -> Result<Self, LassoError> {
        if anchor >= g.num_states() {
            return Err(CgsError::UnknownState(anchor.to_string()).into());
        }
        if cycle.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        let mut w = anchor;
        let mut loop_start = anchor;
        for (i, p) in stem.iter().chain(&cycle).enumerate() {
            if i == stem.len() {
                loop_start = w;
            }
            if !g.is_profile_at(w, p) {
                return Err(LassoError::NotAvailable { index: i, state: g.state_name(w).to_string() });
            }
            w = g.next(w, p);
        }
        if w != loop_start {
            return Err(LassoError::NotClosed {
                start: g.state_name(loop_start).to_string(),
                end: g.state_name(w).to_string(),
            });
        }
        Ok(LassoHistory { anchor, stem, cycle })
    }

    pub fn anchor(&self) -> StateId {
        self.anchor
    }

    pub fn stem(&self) -> &[Profile] {
        &self.stem
    }

    pub fn cycle(&self) -> &[Profile] {
        &self.cycle
    }

    /// `|stem| + |loop|`: every suffix equals one of the first `period()`.
    pub fn period(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    /// Profile taken at position `i` (0-based).
    pub fn profile_at(&self, i: usize) -> &Profile {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    pub fn first_profile(&self) -> &Profile {
        self.profile_at(0)
    }

    /// States at positions `0..=period()`; the last one repeats position `|stem|`.
    pub fn states(&self, g: &Cgs) -> Vec<StateId> {
        let mut out = Vec::with_capacity(self.period() + 1);
        let mut w = self.anchor;
        out.push(w);
        for p in self.stem.iter().chain(&self.cycle) {
            w = g.next(w, p);
            out.push(w);
        }
        out
    }

    pub fn state_at(&self, g: &Cgs, i: usize) -> StateId {
        let i = self.fold_position(i);
        let mut w = self.anchor;
        for k in 0..i {
            w = g.next(w, self.profile_at(k));
        }
        w
    }

    fn fold_position(&self, i: usize) -> usize {
        if i <= self.stem.len() {
            i
        } else {
            self.stem.len() + (i - self.stem.len()) % self.cycle.len()
        }
    }

    /// The same history seen `i` steps later.
    pub fn suffix(&self, g: &Cgs, i: usize) -> LassoHistory {
        if i <= self.stem.len() {
            return LassoHistory {
                anchor: self.state_at(g, i),
                stem: self.stem[i..].to_vec(),
                cycle: self.cycle.clone(),
            };
        }
        let shift = (i - self.stem.len()) % self.cycle.len();
        let mut cycle = self.cycle.clone();
        cycle.rotate_left(shift);
        LassoHistory { anchor: self.state_at(g, i), stem: Vec::new(), cycle }
    }

    /// The moment reached after the first `n` steps, as a run from the anchor.
    pub fn moment_after(&self, g: &Cgs, n: usize) -> Moment {
        let mut m = Moment::root(self.anchor);
        for k in 0..n {
            m = m.extend(g, self.profile_at(k).clone());
        }
        m
    }

    /// Shortest history from `w`: always the first profile of each menu.
    pub fn canonical(g: &Cgs, w: StateId) -> LassoHistory {
        LassoHistory::complete(g, w, &[]).expect("empty prefix is always available")
    }

    /// Continues `prefix` with first profiles until a state repeats.
    pub fn complete(g: &Cgs, w: StateId, prefix: &[Profile]) -> Result<LassoHistory, LassoError> {
        let mut v = w;
        for (i, p) in prefix.iter().enumerate() {
            if !g.is_profile_at(v, p) {
                return Err(LassoError::NotAvailable { index: i, state: g.state_name(v).to_string() });
            }
            v = g.next(v, p);
        }
        let mut tail_states = vec![v];
        let mut tail = Vec::new();
        loop {
            let p = g.profile(v, 0);
            v = g.next(v, &p);
            tail.push(p);
            if let Some(k) = tail_states.iter().position(|&u| u == v) {
                let mut stem = prefix.to_vec();
                stem.extend(tail.drain(..k));
                return Ok(LassoHistory { anchor: w, stem, cycle: tail }.normalized(g));
            }
            tail_states.push(v);
        }
    }

    /// Canonical representative: shortest loop, then shortest stem.
    pub fn normalized(&self, g: &Cgs) -> LassoHistory {
        let states = self.states(g);
        let s = self.stem.len();
        let l = self.cycle.len();
        let pair = |i: usize| (states[s + i], &self.cycle[i]);
        let period = (1..=l).find(|&p| l.is_multiple_of(p) && (0..l).all(|i| pair(i) == pair(i % p))).unwrap_or(l);
        let mut stem = self.stem.clone();
        let mut cycle: Vec<Profile> = self.cycle[..period].to_vec();
        // Pull the loop back while the step before it repeats its last step.
        while let Some(last) = stem.last() {
            let k = stem.len();
            let before = (states[k - 1], last);
            let end = (states[k - 1 + period], &cycle[period - 1]);
            if before != end {
                break;
            }
            stem.pop();
            cycle.rotate_right(1);
        }
        LassoHistory { anchor: self.anchor, stem, cycle }
    }

    /// Parses `w0 ; s1 | s1`; profiles are whitespace separated and a
    /// multi-agent profile joins its actions by commas in agent order.
    pub fn parse(g: &Cgs, text: &str) -> Result<LassoHistory, LassoError> {
        let syntax = || LassoError::Syntax(text.to_string());
        let (anchor, rest) = text.split_once(';').ok_or_else(syntax)?;
        let (stem, cycle) = rest.split_once('|').ok_or_else(syntax)?;
        let anchor = g.state_id(anchor.trim())?;
        let mut w = anchor;
        let mut read = |part: &str| -> Result<Vec<Profile>, LassoError> {
            part.split_whitespace()
                .map(|tok| {
                    let p = g.parse_profile(w, tok)?;
                    w = g.next(w, &p);
                    Ok(p)
                })
                .collect()
        };
        let stem = read(stem)?;
        let cycle = read(cycle)?;
        LassoHistory::new(g, anchor, stem, cycle)
    }

    pub fn display<'a>(&'a self, g: &'a Cgs) -> LassoDisplay<'a> {
        LassoDisplay { lasso: self, g }
    }
}

pub struct LassoDisplay<'a> {
    lasso: &'a LassoHistory,
    g: &'a Cgs,
}

impl fmt::Display for LassoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.lasso;
        let states = h.states(self.g);
        let label = |i: usize| self.g.profile_label(states[i], h.profile_at(i));
        write!(f, "{} ;", self.g.state_name(h.anchor))?;
        for i in 0..h.stem.len() {
            write!(f, " {}", label(i))?;
        }
        f.write_str(" |")?;
        for i in h.stem.len()..h.period() {
            write!(f, " {}", label(i))?;
        }
        Ok(())
    }
}

/// `lasso_suffix(h, i)` as a free function.
pub fn lasso_suffix(g: &Cgs, h: &LassoHistory, i: usize) -> LassoHistory {
    h.suffix(g, i)
}

/// Every profile sequence of length `len` from `w`, lexicographic in codes.
pub fn profile_prefixes(g: &Cgs, w: StateId, len: usize) -> Vec<Vec<Profile>> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(len);
    fn go(g: &Cgs, w: StateId, len: usize, path: &mut Vec<Profile>, out: &mut Vec<Vec<Profile>>) {
        if path.len() == len {
            out.push(path.clone());
            return;
        }
        for p in g.profiles(w) {
            let next = g.next(w, &p);
            path.push(p);
            go(g, next, len, path, out);
            path.pop();
        }
    }
    go(g, w, len, &mut path, &mut out);
    out
}

/// Number of profile sequences of length `len` from `w`.
pub fn prefix_count(g: &Cgs, w: StateId, len: usize) -> u128 {
    let mut counts = vec![1u128; g.num_states()];
    for _ in 0..len {
        counts = (0..g.num_states())
            .map(|v| {
                (0..g.num_profiles(v)).map(|c| counts[g.next_by_code(v, c)]).fold(0u128, |a, b| a.saturating_add(b))
            })
            .collect();
    }
    counts[w]
}

/// Bounds of the history pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolBounds {
    pub max_stem: usize,
    pub max_loop: usize,
}

impl PoolBounds {
    /// Stems and loops of at most `|W|` steps.
    pub fn for_model(g: &Cgs) -> Self {
        PoolBounds { max_stem: g.num_states(), max_loop: g.num_states() }
    }
}

/// Sequences the exhaustive enumeration would visit.
pub fn pool_estimate(g: &Cgs, w: StateId, bounds: PoolBounds) -> u128 {
    (1..=bounds.max_stem + bounds.max_loop).map(|n| prefix_count(g, w, n)).fold(0u128, |a, b| a.saturating_add(b))
}

/// All lassos from `w` within `bounds`, normalized and deduplicated, ordered
/// by stem length, then loop length, then profile codes.
pub fn lasso_pool(g: &Cgs, w: StateId, bounds: PoolBounds) -> Vec<LassoHistory> {
    let mut found: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut codes = Vec::new();
    let mut states = vec![w];
    fn go(
        g: &Cgs,
        bounds: PoolBounds,
        codes: &mut Vec<usize>,
        states: &mut Vec<StateId>,
        found: &mut Vec<(usize, usize, Vec<usize>)>,
    ) {
        let n = codes.len();
        if n > 0 {
            for s in n.saturating_sub(bounds.max_loop)..n.min(bounds.max_stem + 1) {
                if states[s] == states[n] {
                    found.push((s, n - s, codes.clone()));
                }
            }
        }
        if n == bounds.max_stem + bounds.max_loop {
            return;
        }
        let v = states[n];
        for c in 0..g.num_profiles(v) {
            codes.push(c);
            states.push(g.next_by_code(v, c));
            go(g, bounds, codes, states, found);
            codes.pop();
            states.pop();
        }
    }
    go(g, bounds, &mut codes, &mut states, &mut found);
    found.sort();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (s, _, codes) in found {
        let h = from_codes(g, w, &codes, s).normalized(g);
        if seen.insert(h.clone()) {
            out.push(h);
        }
    }
    out
}

fn from_codes(g: &Cgs, w: StateId, codes: &[usize], stem_len: usize) -> LassoHistory {
    let mut v = w;
    let mut profiles = Vec::with_capacity(codes.len());
    for &c in codes {
        profiles.push(g.profile(v, c));
        v = g.next_by_code(v, c);
    }
    let cycle = profiles.split_off(stem_len);
    LassoHistory { anchor: w, stem: profiles, cycle }
}

/// The lassos every sample contains: the canonical one and, for each
/// profile at `w`, the canonical continuation of that first step.
pub fn extreme_lassos(g: &Cgs, w: StateId) -> Vec<LassoHistory> {
    let mut out = vec![LassoHistory::canonical(g, w)];
    for p in g.profiles(w) {
        let h = LassoHistory::complete(g, w, &[p]).expect("profile drawn from the menu");
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

/// Deterministic sample of histories from `w`: the extremes plus up to
/// `budget` further lassos, drawn from the exhaustive pool when it is small
/// and from seeded random walks otherwise.
pub fn sample_lassos(g: &Cgs, w: StateId, budget: usize, seed: u64) -> Vec<LassoHistory> {
    let bounds = PoolBounds::for_model(g);
    let mut out = extreme_lassos(g, w);
    let mut seen: HashSet<LassoHistory> = out.iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (w as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    if pool_estimate(g, w, bounds) <= EXHAUSTIVE_POOL_LIMIT {
        let pool: Vec<LassoHistory> = lasso_pool(g, w, bounds).into_iter().filter(|h| !seen.contains(h)).collect();
        if pool.len() <= budget {
            out.extend(pool);
        } else {
            let mut picked = sample(&mut rng, pool.len(), budget).into_vec();
            picked.sort_unstable();
            out.extend(picked.into_iter().map(|i| pool[i].clone()));
        }
        return out;
    }
    let mut added = 0;
    for _ in 0..budget.saturating_mul(20) {
        if added == budget {
            break;
        }
        let h = random_lasso(g, w, bounds, &mut rng);
        if seen.insert(h.clone()) {
            out.push(h);
            added += 1;
        }
    }
    out
}

/// A random walk from `w` closed at a repeated state within `bounds`.
pub fn random_lasso<R: Rng + ?Sized>(g: &Cgs, w: StateId, bounds: PoolBounds, rng: &mut R) -> LassoHistory {
    let max_len = bounds.max_stem + bounds.max_loop;
    let mut codes = Vec::new();
    let mut states = vec![w];
    let mut closures: Vec<(usize, usize)> = Vec::new();
    while codes.len() < max_len {
        let v = *states.last().unwrap();
        let c = rng.gen_range(0..g.num_profiles(v));
        codes.push(c);
        states.push(g.next_by_code(v, c));
        let n = codes.len();
        let here: Vec<usize> = (n.saturating_sub(bounds.max_loop)..n.min(bounds.max_stem + 1))
            .filter(|&s| states[s] == states[n])
            .collect();
        if !here.is_empty() {
            let s = here[rng.gen_range(0..here.len())];
            if rng.gen_bool(0.5) {
                return from_codes(g, w, &codes, s).normalized(g);
            }
            closures.push((s, n));
        }
    }
    let (s, n) =
        closures.get(rng.gen_range(0..closures.len().max(1))).copied().expect("a state repeats within |W| steps");
    from_codes(g, w, &codes[..n], s).normalized(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgs::random_cgs;
    use crate::testutil::toy1;

    fn lasso(g: &Cgs, text: &str) -> LassoHistory {
        LassoHistory::parse(g, text).unwrap()
    }

    #[test]
    fn suffix_examples() {
        let g = toy1();
        let h = lasso(&g, "w0 ; s1 | s1");
        assert_eq!(h.suffix(&g, 0), h);
        let one = h.suffix(&g, 1);
        assert_eq!(one.anchor(), 1);
        assert!(one.stem().is_empty());
        assert_eq!(one.cycle().len(), 1);
        assert_eq!(h.suffix(&g, h.period()), h.suffix(&g, h.stem().len()));
    }

    #[test]
    fn validation() {
        let g = toy1();
        assert!(matches!(LassoHistory::parse(&g, "w0 ; | s1"), Err(LassoError::NotClosed { .. })));
        assert!(matches!(LassoHistory::parse(&g, "w0 ; s1 |"), Err(LassoError::EmptyLoop)));
        assert!(matches!(LassoHistory::parse(&g, "w1 ; s2 | s1"), Err(LassoError::Model(_))));
        assert!(matches!(LassoHistory::parse(&g, "w0 s1 s1"), Err(LassoError::Syntax(_))));
        assert_eq!(lasso(&g, "w0 ; | s2").display(&g).to_string(), "w0 ; | s2");
        assert_eq!(lasso(&g, "w0;s1|s1").display(&g).to_string(), "w0 ; s1 | s1");
    }

    #[test]
    fn canonical_and_normal_forms() {
        let g = toy1();
        assert_eq!(LassoHistory::canonical(&g, 0), lasso(&g, "w0 ; s1 | s1"));
        assert_eq!(lasso(&g, "w0 ; s2 s2 | s2 s2").normalized(&g), lasso(&g, "w0 ; | s2"));
        assert_eq!(lasso(&g, "w0 ; s1 s1 | s1").normalized(&g), lasso(&g, "w0 ; s1 | s1"));
    }

    #[test]
    fn toy1_pool() {
        let g = toy1();
        let pool = lasso_pool(&g, 0, PoolBounds::for_model(&g));
        let shown: Vec<String> = pool.iter().map(|h| h.display(&g).to_string()).collect();
        assert_eq!(shown, ["w0 ; | s2", "w0 ; s1 | s1", "w0 ; s2 s1 | s1"]);
    }

    #[test]
    fn suffix_matches_position_walk() {
        for seed in 0..20 {
            let g = random_cgs(4, 2, 3, 1, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_lasso(&g, 0, PoolBounds::for_model(&g), &mut rng);
            for i in 0..3 * h.period() {
                let s = h.suffix(&g, i);
                assert_eq!(s.anchor(), h.state_at(&g, i));
                for k in 0..2 * h.period() {
                    assert_eq!(s.profile_at(k), h.profile_at(i + k));
                }
                assert_eq!(LassoHistory::new(&g, s.anchor(), s.stem().to_vec(), s.cycle().to_vec()), Ok(s));
            }
        }
    }

    #[test]
    fn samples_are_deterministic_and_contain_extremes() {
        let g = random_cgs(4, 2, 3, 2, 4);
        for w in 0..4 {
            let a = sample_lassos(&g, w, 8, 1);
            assert_eq!(a, sample_lassos(&g, w, 8, 1));
            for e in extreme_lassos(&g, w) {
                assert!(a.contains(&e));
            }
            let set: HashSet<_> = a.iter().collect();
            assert_eq!(set.len(), a.len());
        }
    }

    #[test]
    fn prefix_counts() {
        let g = random_cgs(3, 2, 3, 1, 8);
        for w in 0..3 {
            for len in 0..4 {
                assert_eq!(profile_prefixes(&g, w, len).len() as u128, prefix_count(&g, w, len));
            }
        }
    }
}
