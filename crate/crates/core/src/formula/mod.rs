//! Abstract syntax for the two object languages.
//!
//! [`AtlFormula`] is the coalition-temporal language interpreted over
//! concurrent game structures; [`SxFormula`] is the stit language with
//! next/globally/until, historical necessity, group agency and strategic
//! ability, interpreted over the unraveled branching-time model.
//!
//! Both trees stay at the core grammar. Disjunction, implication,
//! equivalence and the constants are sugar produced by the constructors
//! below (and by the parsers), built from negation, conjunction and the
//! reserved atom [`RESERVED_ATOM`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

mod gen;
mod parse;
mod print;
mod schema;
mod translate;

pub use gen::{random_atl, random_sx_operand, AtlGenConfig};
pub use parse::{parse_atl, parse_sx, ParseError, ParseErrorKind};
pub use schema::{instantiate_schema, CoalitionBinding, SchemaError, SchemaName};
pub use translate::translate;

/// Atom used to spell the constants: `true` is `!(p0 & !p0)`.
pub const RESERVED_ATOM: &str = "p0";

/// A finite set of agent names, kept sorted so printing is canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(BTreeSet<String>);

impl Coalition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<I, S>(agents: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Coalition(agents.into_iter().map(Into::into).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, agent: &str) -> bool {
        self.0.contains(agent)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        Coalition(self.0.union(&other.0).cloned().collect())
    }

    pub fn is_disjoint(&self, other: &Coalition) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for agent in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            f.write_str(agent)?;
        }
        Ok(())
    }
}

impl<S: Into<String>> FromIterator<S> for Coalition {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Coalition::new(iter)
    }
}

/// Formula of the coalition-temporal language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtlFormula {
    Atom(String),
    Not(Box<AtlFormula>),
    And(Box<AtlFormula>, Box<AtlFormula>),
    /// `<<C>> X φ`
    CoalX(Coalition, Box<AtlFormula>),
    /// `<<C>> G φ`
    CoalG(Coalition, Box<AtlFormula>),
    /// `<<C>> (φ U ψ)`
    CoalU(Coalition, Box<AtlFormula>, Box<AtlFormula>),
}

/// Formula of the stit language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SxFormula {
    Atom(String),
    Not(Box<SxFormula>),
    And(Box<SxFormula>, Box<SxFormula>),
    Next(Box<SxFormula>),
    Globally(Box<SxFormula>),
    Until(Box<SxFormula>, Box<SxFormula>),
    /// Historical necessity `[] φ`.
    Necessary(Box<SxFormula>),
    /// Group agency `[C] φ`.
    Stit(Coalition, Box<SxFormula>),
    /// Strategic ability `<<C>>^s φ`.
    Strategic(Coalition, Box<SxFormula>),
}

/// Uniform substitution of proposition letters.
pub type Substitution<F> = BTreeMap<String, F>;

/// Operations shared by both languages: the boolean core, derived
/// connectives and uniform substitution.
pub trait Formula: Clone + Eq + fmt::Display + Sized {
    fn atom(name: impl Into<String>) -> Self;
    fn not(self) -> Self;
    fn and(self, other: Self) -> Self;

    /// Replaces every atom in the domain of `sigma` simultaneously.
    fn substitute(&self, sigma: &Substitution<Self>) -> Self;

    /// Number of AST nodes.
    fn node_count(&self) -> usize;

    /// Atom names occurring in the formula.
    fn atoms(&self) -> BTreeSet<String>;

    fn top() -> Self {
        let p0 = Self::atom(RESERVED_ATOM);
        p0.clone().and(p0.not()).not()
    }

    fn bottom() -> Self {
        Self::top().not()
    }

    fn or(self, other: Self) -> Self {
        self.not().and(other.not()).not()
    }

    fn implies(self, other: Self) -> Self {
        self.and(other.not()).not()
    }

    fn iff(self, other: Self) -> Self {
        self.clone().implies(other.clone()).and(other.implies(self))
    }

    fn is_top(&self) -> bool {
        *self == Self::top()
    }

    fn is_bottom(&self) -> bool {
        *self == Self::bottom()
    }
}

impl AtlFormula {
    pub fn coal_x(c: Coalition, body: AtlFormula) -> Self {
        AtlFormula::CoalX(c, Box::new(body))
    }

    pub fn coal_g(c: Coalition, body: AtlFormula) -> Self {
        AtlFormula::CoalG(c, Box::new(body))
    }

    pub fn coal_u(c: Coalition, hold: AtlFormula, goal: AtlFormula) -> Self {
        AtlFormula::CoalU(c, Box::new(hold), Box::new(goal))
    }

    /// If the formula is `!(a & !b)`, returns `(a, b)`.
    pub fn as_implication(&self) -> Option<(&AtlFormula, &AtlFormula)> {
        match self {
            AtlFormula::Not(inner) => match inner.as_ref() {
                AtlFormula::And(a, nb) => match nb.as_ref() {
                    AtlFormula::Not(b) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// Every coalition mentioned anywhere in the formula.
    pub fn coalitions(&self) -> Vec<&Coalition> {
        let mut out = Vec::new();
        self.collect_coalitions(&mut out);
        out
    }

    fn collect_coalitions<'a>(&'a self, out: &mut Vec<&'a Coalition>) {
        match self {
            AtlFormula::Atom(_) => {}
            AtlFormula::Not(a) => a.collect_coalitions(out),
            AtlFormula::And(a, b) => {
                a.collect_coalitions(out);
                b.collect_coalitions(out);
            }
            AtlFormula::CoalX(c, a) | AtlFormula::CoalG(c, a) => {
                out.push(c);
                a.collect_coalitions(out);
            }
            AtlFormula::CoalU(c, a, b) => {
                out.push(c);
                a.collect_coalitions(out);
                b.collect_coalitions(out);
            }
        }
    }

    /// Depth counting only coalition operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            AtlFormula::Atom(_) => 0,
            AtlFormula::Not(a) => a.modal_depth(),
            AtlFormula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            AtlFormula::CoalX(_, a) | AtlFormula::CoalG(_, a) => 1 + a.modal_depth(),
            AtlFormula::CoalU(_, a, b) => 1 + a.modal_depth().max(b.modal_depth()),
        }
    }
}

impl Formula for AtlFormula {
    fn atom(name: impl Into<String>) -> Self {
        AtlFormula::Atom(name.into())
    }

    fn not(self) -> Self {
        AtlFormula::Not(Box::new(self))
    }

    fn and(self, other: Self) -> Self {
        AtlFormula::And(Box::new(self), Box::new(other))
    }

    fn substitute(&self, sigma: &Substitution<Self>) -> Self {
        match self {
            AtlFormula::Atom(p) => sigma.get(p).cloned().unwrap_or_else(|| self.clone()),
            AtlFormula::Not(a) => a.substitute(sigma).not(),
            AtlFormula::And(a, b) => a.substitute(sigma).and(b.substitute(sigma)),
            AtlFormula::CoalX(c, a) => AtlFormula::coal_x(c.clone(), a.substitute(sigma)),
            AtlFormula::CoalG(c, a) => AtlFormula::coal_g(c.clone(), a.substitute(sigma)),
            AtlFormula::CoalU(c, a, b) => AtlFormula::coal_u(c.clone(), a.substitute(sigma), b.substitute(sigma)),
        }
    }

    fn node_count(&self) -> usize {
        match self {
            AtlFormula::Atom(_) => 1,
            AtlFormula::Not(a) | AtlFormula::CoalX(_, a) | AtlFormula::CoalG(_, a) => 1 + a.node_count(),
            AtlFormula::And(a, b) | AtlFormula::CoalU(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn walk(f: &AtlFormula, out: &mut BTreeSet<String>) {
            match f {
                AtlFormula::Atom(p) => {
                    out.insert(p.clone());
                }
                AtlFormula::Not(a) | AtlFormula::CoalX(_, a) | AtlFormula::CoalG(_, a) => walk(a, out),
                AtlFormula::And(a, b) | AtlFormula::CoalU(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

impl SxFormula {
    pub fn next(body: SxFormula) -> Self {
        SxFormula::Next(Box::new(body))
    }

    pub fn globally(body: SxFormula) -> Self {
        SxFormula::Globally(Box::new(body))
    }

    pub fn until(hold: SxFormula, goal: SxFormula) -> Self {
        SxFormula::Until(Box::new(hold), Box::new(goal))
    }

    pub fn necessary(body: SxFormula) -> Self {
        SxFormula::Necessary(Box::new(body))
    }

    /// `<> φ`, i.e. `!([] !φ)`.
    pub fn possible(body: SxFormula) -> Self {
        SxFormula::necessary(body.not()).not()
    }

    pub fn stit(c: Coalition, body: SxFormula) -> Self {
        SxFormula::Stit(c, Box::new(body))
    }

    pub fn strategic(c: Coalition, body: SxFormula) -> Self {
        SxFormula::Strategic(c, Box::new(body))
    }

    pub fn coalitions(&self) -> Vec<&Coalition> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a SxFormula, out: &mut Vec<&'a Coalition>) {
            match f {
                SxFormula::Atom(_) => {}
                SxFormula::Not(a) | SxFormula::Next(a) | SxFormula::Globally(a) | SxFormula::Necessary(a) => {
                    walk(a, out)
                }
                SxFormula::And(a, b) | SxFormula::Until(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                SxFormula::Stit(c, a) | SxFormula::Strategic(c, a) => {
                    out.push(c);
                    walk(a, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

impl Formula for SxFormula {
    fn atom(name: impl Into<String>) -> Self {
        SxFormula::Atom(name.into())
    }

    fn not(self) -> Self {
        SxFormula::Not(Box::new(self))
    }

    fn and(self, other: Self) -> Self {
        SxFormula::And(Box::new(self), Box::new(other))
    }

    fn substitute(&self, sigma: &Substitution<Self>) -> Self {
        match self {
            SxFormula::Atom(p) => sigma.get(p).cloned().unwrap_or_else(|| self.clone()),
            SxFormula::Not(a) => a.substitute(sigma).not(),
            SxFormula::And(a, b) => a.substitute(sigma).and(b.substitute(sigma)),
            SxFormula::Next(a) => SxFormula::next(a.substitute(sigma)),
            SxFormula::Globally(a) => SxFormula::globally(a.substitute(sigma)),
            SxFormula::Until(a, b) => SxFormula::until(a.substitute(sigma), b.substitute(sigma)),
            SxFormula::Necessary(a) => SxFormula::necessary(a.substitute(sigma)),
            SxFormula::Stit(c, a) => SxFormula::stit(c.clone(), a.substitute(sigma)),
            SxFormula::Strategic(c, a) => SxFormula::strategic(c.clone(), a.substitute(sigma)),
        }
    }

    fn node_count(&self) -> usize {
        match self {
            SxFormula::Atom(_) => 1,
            SxFormula::Not(a)
            | SxFormula::Next(a)
            | SxFormula::Globally(a)
            | SxFormula::Necessary(a)
            | SxFormula::Stit(_, a)
            | SxFormula::Strategic(_, a) => 1 + a.node_count(),
            SxFormula::And(a, b) | SxFormula::Until(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn walk(f: &SxFormula, out: &mut BTreeSet<String>) {
            match f {
                SxFormula::Atom(p) => {
                    out.insert(p.clone());
                }
                SxFormula::Not(a)
                | SxFormula::Next(a)
                | SxFormula::Globally(a)
                | SxFormula::Necessary(a)
                | SxFormula::Stit(_, a)
                | SxFormula::Strategic(_, a) => walk(a, out),
                SxFormula::And(a, b) | SxFormula::Until(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: &str) -> AtlFormula {
        AtlFormula::atom(n)
    }

    #[test]
    fn substitution_replaces_simultaneously() {
        let f = p("p").and(p("q"));
        let sigma: Substitution<_> = [("p".to_string(), p("r").not())].into();
        assert_eq!(f.substitute(&sigma), p("r").not().and(p("q")));

        let swap: Substitution<_> = [("p".to_string(), p("q")), ("q".to_string(), p("p"))].into();
        assert_eq!(f.substitute(&swap), p("q").and(p("p")));
    }

    #[test]
    fn substitution_under_coalition_operator() {
        let a = Coalition::new(["a"]);
        let b = Coalition::new(["b"]);
        let f = AtlFormula::coal_x(a.clone(), p("p"));
        let sigma: Substitution<_> = [("p".to_string(), AtlFormula::coal_g(b.clone(), p("q")))].into();
        assert_eq!(f.substitute(&sigma), AtlFormula::coal_x(a, AtlFormula::coal_g(b, p("q"))));
    }

    #[test]
    fn empty_substitution_is_identity() {
        let f = AtlFormula::coal_u(Coalition::empty(), p("p"), p("q").not());
        assert_eq!(f.substitute(&Substitution::new()), f);
        assert_eq!(p("p").substitute(&Substitution::new()), p("p"));
    }

    #[test]
    fn implication_shape_is_recognised() {
        let imp = p("a").implies(p("b"));
        assert_eq!(imp.as_implication(), Some((&p("a"), &p("b"))));
        assert_eq!(p("a").and(p("b")).as_implication(), None);
    }

    #[test]
    fn constants_are_reserved_atom_sugar() {
        let top = AtlFormula::top();
        assert_eq!(top, p(RESERVED_ATOM).and(p(RESERVED_ATOM).not()).not());
        assert_eq!(AtlFormula::bottom(), top.not());
        assert!(SxFormula::top().is_top());
    }
}
