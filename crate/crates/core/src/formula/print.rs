//! Canonical printing.
//!
//! Binary connectives are always parenthesised; a compound operand of a
//! prefix operator is parenthesised as well. The top level drops the
//! parentheses of a prefix operator. The two constants print as `true` and
//! `false`, and the shapes `or`, `implies` and `iff` produce print with
//! `|`, `->` and `<->`; the parsers map all of these back to the same trees.

use std::fmt::{self, Display, Formatter};

use super::{AtlFormula, Formula, SxFormula};

fn constant<F: Formula>(f: &F) -> Option<&'static str> {
    if f.is_top() {
        Some("true")
    } else if f.is_bottom() {
        Some("false")
    } else {
        None
    }
}

struct Operand<'a, T>(&'a T);

trait Boolean: Formula {
    fn as_not(&self) -> Option<&Self>;
    fn as_and(&self) -> Option<(&Self, &Self)>;
}

impl Boolean for AtlFormula {
    fn as_not(&self) -> Option<&Self> {
        match self {
            AtlFormula::Not(a) => Some(a),
            _ => None,
        }
    }

    fn as_and(&self) -> Option<(&Self, &Self)> {
        match self {
            AtlFormula::And(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl Boolean for SxFormula {
    fn as_not(&self) -> Option<&Self> {
        match self {
            SxFormula::Not(a) => Some(a),
            _ => None,
        }
    }

    fn as_and(&self) -> Option<(&Self, &Self)> {
        match self {
            SxFormula::And(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

enum Sugar<'a, F> {
    Or(&'a F, &'a F),
    Implies(&'a F, &'a F),
    Iff(&'a F, &'a F),
}

fn implication<F: Boolean>(f: &F) -> Option<(&F, &F)> {
    let (a, nb) = f.as_not()?.as_and()?;
    Some((a, nb.as_not()?))
}

fn sugar<F: Boolean>(f: &F) -> Option<Sugar<'_, F>> {
    if let Some((l, r)) = f.as_and() {
        let (a, b) = implication(l)?;
        let (b2, a2) = implication(r)?;
        return (a == a2 && b == b2).then_some(Sugar::Iff(a, b));
    }
    let (a, b) = implication(f)?;
    match a.as_not() {
        Some(na) => Some(Sugar::Or(na, b)),
        None => Some(Sugar::Implies(a, b)),
    }
}

/// Writes the sugared form, if any, with operands printed by `operand`.
fn write_sugar<F: Boolean>(f: &mut Formatter<'_>, phi: &F, operand: impl Fn(&F) -> String) -> Option<fmt::Result> {
    let (a, op, b) = match sugar(phi)? {
        Sugar::Or(a, b) => (a, "|", b),
        Sugar::Implies(a, b) => (a, "->", b),
        Sugar::Iff(a, b) => (a, "<->", b),
    };
    Some(write!(f, "({} {op} {})", operand(a), operand(b)))
}

impl Display for AtlFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if let Some(c) = constant(self) {
            return f.write_str(c);
        }
        if let Some(r) = write_sugar(f, self, |x| Operand(x).to_string()) {
            return r;
        }
        match self {
            AtlFormula::Atom(p) => f.write_str(p),
            AtlFormula::Not(a) => write!(f, "! {}", Operand(a.as_ref())),
            AtlFormula::And(a, b) => write!(f, "({} & {})", Operand(a.as_ref()), Operand(b.as_ref())),
            AtlFormula::CoalX(c, a) => write!(f, "<<{c}>> X {}", Operand(a.as_ref())),
            AtlFormula::CoalG(c, a) => write!(f, "<<{c}>> G {}", Operand(a.as_ref())),
            AtlFormula::CoalU(c, a, b) => {
                write!(f, "<<{c}>> ({} U {})", Operand(a.as_ref()), Operand(b.as_ref()))
            }
        }
    }
}

impl Display for Operand<'_, AtlFormula> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            _ if constant(self.0).is_some() || sugar(self.0).is_some() => write!(f, "{}", self.0),
            AtlFormula::Atom(_) | AtlFormula::And(..) => write!(f, "{}", self.0),
            _ => write!(f, "({})", self.0),
        }
    }
}

impl Display for SxFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if let Some(c) = constant(self) {
            return f.write_str(c);
        }
        if let Some(r) = write_sugar(f, self, |x| Operand(x).to_string()) {
            return r;
        }
        match self {
            SxFormula::Atom(p) => f.write_str(p),
            SxFormula::Not(a) => write!(f, "! {}", Operand(a.as_ref())),
            SxFormula::And(a, b) => write!(f, "({} & {})", Operand(a.as_ref()), Operand(b.as_ref())),
            SxFormula::Next(a) => write!(f, "X {}", Operand(a.as_ref())),
            SxFormula::Globally(a) => write!(f, "G {}", Operand(a.as_ref())),
            SxFormula::Until(a, b) => write!(f, "({} U {})", Operand(a.as_ref()), Operand(b.as_ref())),
            SxFormula::Necessary(a) => write!(f, "[] {}", Operand(a.as_ref())),
            // `[ ]` keeps the empty group apart from `[]`.
            SxFormula::Stit(c, a) if c.is_empty() => write!(f, "[ ] {}", Operand(a.as_ref())),
            SxFormula::Stit(c, a) => write!(f, "[{c}] {}", Operand(a.as_ref())),
            SxFormula::Strategic(c, a) => match a.as_ref() {
                SxFormula::Next(_) | SxFormula::Globally(_) if constant(a.as_ref()).is_none() => {
                    write!(f, "<<{c}>>^s {a}")
                }
                _ => write!(f, "<<{c}>>^s {}", Operand(a.as_ref())),
            },
        }
    }
}

impl Display for Operand<'_, SxFormula> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            _ if constant(self.0).is_some() || sugar(self.0).is_some() => write!(f, "{}", self.0),
            SxFormula::Atom(_) | SxFormula::And(..) | SxFormula::Until(..) => write!(f, "{}", self.0),
            _ => write!(f, "({})", self.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_atl, parse_sx, Coalition};
    use super::*;

    #[test]
    fn canonical_forms() {
        let p = || AtlFormula::atom("p");
        assert_eq!(AtlFormula::coal_x(Coalition::new(["a"]), p()).to_string(), "<<a>> X p");
        assert_eq!(SxFormula::necessary(SxFormula::atom("p").not()).to_string(), "[] (! p)");
        assert_eq!(p().and(AtlFormula::atom("q")).to_string(), "(p & q)");
        assert_eq!(
            SxFormula::strategic(Coalition::new(["a"]), SxFormula::next(SxFormula::necessary(SxFormula::atom("p"))))
                .to_string(),
            "<<a>>^s X ([] p)"
        );
        assert_eq!(AtlFormula::coal_x(Coalition::new(["a"]), AtlFormula::top()).to_string(), "<<a>> X true");
        assert_eq!(
            AtlFormula::coal_u(Coalition::new(["b", "a"]), p(), AtlFormula::atom("q")).to_string(),
            "<<a,b>> (p U q)"
        );
        let q = || AtlFormula::atom("q");
        assert_eq!(p().or(q()).to_string(), "(p | q)");
        assert_eq!(p().implies(q()).to_string(), "(p -> q)");
        assert_eq!(p().iff(q()).to_string(), "(p <-> q)");
        assert_eq!(p().not().implies(q()).to_string(), "(p | q)");
        assert_eq!(AtlFormula::coal_x(Coalition::empty(), p().implies(q())).to_string(), "<<>> X (p -> q)");
    }

    #[test]
    fn printed_text_reparses() {
        for text in [
            "<<a>> X p",
            "!(p & !q) -> <<>> G <<a,b>> (p U !q)",
            "<<a>> X true & false",
            "p | q -> (q <-> !p)",
            "!(!p & !q)",
            "(p -> true) & (true -> p)",
        ] {
            let f = parse_atl(text).unwrap();
            assert_eq!(parse_atl(&f.to_string()).unwrap(), f, "{text}");
        }
        for text in [
            "<<a>>^s X [] p",
            "[a] X p & [] (p U q)",
            "<<>>^s G ! [ ] p",
            "<<a>>^s (([] p) U ([] q))",
            "<<a>>^s true",
            "<<a>>^s X true",
            "[] (p -> X q) | <<a>>^s (p U (q <-> [a] p))",
        ] {
            let f = parse_sx(text).unwrap();
            assert_eq!(parse_sx(&f.to_string()).unwrap(), f, "{text}");
        }
    }
}
