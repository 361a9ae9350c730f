//! Axiom schemata of the coalition-temporal proof system.
//!
//! A schema is a template over the letters `p`, `q`, `r` and the coalition
//! metavariables `A`, `B`. Instantiation binds the coalitions first and then
//! applies a uniform substitution to the letters.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{AtlFormula, Coalition, Formula, Substitution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaName {
    /// `!<<A>> X false`
    Bot,
    /// `<<A>> X true`
    Top,
    /// `!<<>> X !p -> <<Ags>> X p`
    GrandCoalition,
    /// `<<A>> X p & <<B>> X q -> <<A u B>> X (p & q)` for disjoint `A`, `B`
    Superadditivity,
    /// `<<A>> G p <-> p & <<A>> X <<A>> G p`
    FixpointG,
    /// `<<>> G (r -> p & <<A>> X r) -> <<>> G (r -> p & <<A>> G p)`
    GreatestFixpointG,
    /// `<<A>> (p U q) <-> q | (p & <<A>> X <<A>> (p U q))`
    FixpointU,
    /// `<<>> G ((q | (p & <<A>> X r)) -> r) -> <<>> G (<<A>> (p U q) -> r)`
    LeastFixpointU,
}

impl SchemaName {
    pub const ALL: [SchemaName; 8] = [
        SchemaName::Bot,
        SchemaName::Top,
        SchemaName::GrandCoalition,
        SchemaName::Superadditivity,
        SchemaName::FixpointG,
        SchemaName::GreatestFixpointG,
        SchemaName::FixpointU,
        SchemaName::LeastFixpointU,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemaName::Bot => "bot",
            SchemaName::Top => "top",
            SchemaName::GrandCoalition => "GC",
            SchemaName::Superadditivity => "S",
            SchemaName::FixpointG => "FP_G",
            SchemaName::GreatestFixpointG => "GFP_G",
            SchemaName::FixpointU => "FP_U",
            SchemaName::LeastFixpointU => "LFP_U",
        }
    }

    /// Whether the schema mentions coalition `B`.
    pub fn uses_b(self) -> bool {
        self == SchemaName::Superadditivity
    }

    fn letters(self) -> &'static [&'static str] {
        match self {
            SchemaName::Bot | SchemaName::Top => &[],
            SchemaName::GrandCoalition | SchemaName::FixpointG => &["p"],
            SchemaName::Superadditivity | SchemaName::FixpointU => &["p", "q"],
            SchemaName::GreatestFixpointG => &["p", "r"],
            SchemaName::LeastFixpointU => &["p", "q", "r"],
        }
    }
}

impl fmt::Display for SchemaName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemaName {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "bot" | "⊥" | "false" => SchemaName::Bot,
            "top" | "⊤" | "true" => SchemaName::Top,
            "GC" => SchemaName::GrandCoalition,
            "S" => SchemaName::Superadditivity,
            "FP_G" => SchemaName::FixpointG,
            "GFP_G" => SchemaName::GreatestFixpointG,
            "FP_U" => SchemaName::FixpointU,
            "LFP_U" => SchemaName::LeastFixpointU,
            _ => return Err(SchemaError::UnknownSchema(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unknown schema `{0}`")]
    UnknownSchema(String),
    #[error("disjointness violation: A={{{0}}} and B={{{1}}} share an agent")]
    NotDisjoint(Coalition, Coalition),
    #[error("missing coalition binding for {0}")]
    MissingCoalition(char),
    #[error("schema {schema} has no letter `{letter}`")]
    UnknownLetter { schema: SchemaName, letter: String },
}

/// Values for the coalition metavariables. For `GC`, `a` holds the full
/// agent set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoalitionBinding {
    pub a: Option<Coalition>,
    pub b: Option<Coalition>,
}

impl CoalitionBinding {
    pub fn a(a: Coalition) -> Self {
        CoalitionBinding { a: Some(a), b: None }
    }

    pub fn ab(a: Coalition, b: Coalition) -> Self {
        CoalitionBinding { a: Some(a), b: Some(b) }
    }
}

pub fn instantiate_schema(
    name: SchemaName,
    coalitions: &CoalitionBinding,
    sigma: &Substitution<AtlFormula>,
) -> Result<AtlFormula, SchemaError> {
    if let Some(letter) = sigma.keys().find(|k| !name.letters().contains(&k.as_str())) {
        return Err(SchemaError::UnknownLetter { schema: name, letter: letter.clone() });
    }
    let a = coalitions.a.clone().ok_or(SchemaError::MissingCoalition('A'))?;
    let (p, q, r) = (AtlFormula::atom("p"), AtlFormula::atom("q"), AtlFormula::atom("r"));
    let none = Coalition::empty();
    let template = match name {
        SchemaName::Bot => AtlFormula::coal_x(a, AtlFormula::bottom()).not(),
        SchemaName::Top => AtlFormula::coal_x(a, AtlFormula::top()),
        SchemaName::GrandCoalition => AtlFormula::coal_x(none, p.clone().not()).not().implies(AtlFormula::coal_x(a, p)),
        SchemaName::Superadditivity => {
            let b = coalitions.b.clone().ok_or(SchemaError::MissingCoalition('B'))?;
            if !a.is_disjoint(&b) {
                return Err(SchemaError::NotDisjoint(a, b));
            }
            AtlFormula::coal_x(a.clone(), p.clone())
                .and(AtlFormula::coal_x(b.clone(), q.clone()))
                .implies(AtlFormula::coal_x(a.union(&b), p.and(q)))
        }
        SchemaName::FixpointG => {
            let ag = AtlFormula::coal_g(a.clone(), p.clone());
            ag.clone().iff(p.and(AtlFormula::coal_x(a, ag)))
        }
        SchemaName::GreatestFixpointG => {
            let pre = r.clone().implies(p.clone().and(AtlFormula::coal_x(a.clone(), r.clone())));
            let post = r.implies(p.clone().and(AtlFormula::coal_g(a, p)));
            AtlFormula::coal_g(none.clone(), pre).implies(AtlFormula::coal_g(none, post))
        }
        SchemaName::FixpointU => {
            let au = AtlFormula::coal_u(a.clone(), p.clone(), q.clone());
            au.clone().iff(q.or(p.and(AtlFormula::coal_x(a, au))))
        }
        SchemaName::LeastFixpointU => {
            let step = q.clone().or(p.clone().and(AtlFormula::coal_x(a.clone(), r.clone())));
            let pre = step.implies(r.clone());
            let post = AtlFormula::coal_u(a, p, q).implies(r);
            AtlFormula::coal_g(none.clone(), pre).implies(AtlFormula::coal_g(none, post))
        }
    };
    Ok(template.substitute(sigma))
}
