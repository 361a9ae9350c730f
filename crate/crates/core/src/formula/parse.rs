//! Recursive-descent parsers for the ASCII concrete syntax.
//!
//! Precedence, tightest first: prefix operators (`!`, coalition and
//! temporal prefixes), `&`, `|`, `->` (right associative), `<->`.

use std::fmt;

use thiserror::Error;

use super::{AtlFormula, Coalition, Formula, SxFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownOperator(String),
    Unexpected { expected: &'static str, found: String },
    UnbalancedCoalition,
    UntilWithoutCoalition,
    MissingStrategicMarker,
    TrailingInput(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnknownOperator(op) => write!(f, "unknown operator `{op}`"),
            ParseErrorKind::Unexpected { expected, found } => {
                write!(f, "syntax error: expected {expected}, found {found}")
            }
            ParseErrorKind::UnbalancedCoalition => f.write_str("unbalanced coalition brackets"),
            ParseErrorKind::UntilWithoutCoalition => f.write_str("syntax error: until needs a coalition prefix"),
            ParseErrorKind::MissingStrategicMarker => {
                f.write_str("syntax error: strategic ability is written `<<C>>^s`")
            }
            ParseErrorKind::TrailingInput(t) => write!(f, "syntax error: trailing input {t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    CoalOpen,
    CoalClose,
    CoalCloseS,
    Comma,
    LBracket,
    RBracket,
    BoxOp,
    Diamond,
    Next,
    Globally,
    Until,
    True,
    False,
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Bang => "`!`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Arrow => "`->`",
            Tok::DoubleArrow => "`<->`",
            Tok::CoalOpen => "`<<`",
            Tok::CoalClose => "`>>`",
            Tok::CoalCloseS => "`>>^s`",
            Tok::Comma => "`,`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::BoxOp => "`[]`",
            Tok::Diamond => "`<>`",
            Tok::Next => "`X`",
            Tok::Globally => "`G`",
            Tok::Until => "`U`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &src[i..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::DoubleArrow, 3)
        } else if rest.starts_with("<<") {
            (Tok::CoalOpen, 2)
        } else if rest.starts_with("<>") {
            (Tok::Diamond, 2)
        } else if rest.starts_with(">>^s") {
            (Tok::CoalCloseS, 4)
        } else if rest.starts_with(">>") {
            (Tok::CoalClose, 2)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("[]") {
            (Tok::BoxOp, 2)
        } else {
            match c {
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'!' => (Tok::Bang, 1),
                b'&' => (Tok::Amp, 1),
                b'|' => (Tok::Pipe, 1),
                b',' => (Tok::Comma, 1),
                b'[' => (Tok::LBracket, 1),
                b']' => (Tok::RBracket, 1),
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let len = rest.bytes().take_while(|b| b.is_ascii_alphanumeric() || *b == b'_').count();
                    let word = &rest[..len];
                    let tok = match word {
                        "X" => Tok::Next,
                        "G" => Tok::Globally,
                        "U" => Tok::Until,
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(word.to_string()),
                    };
                    (tok, len)
                }
                _ => {
                    let op: String = rest
                        .chars()
                        .take_while(|ch| !ch.is_alphanumeric() && !ch.is_whitespace() && *ch != '(')
                        .collect();
                    let op = if op.is_empty() { rest.chars().take(1).collect() } else { op };
                    return Err(ParseError { offset: i, kind: ParseErrorKind::UnknownOperator(op) });
                }
            }
        };
        out.push((tok, i));
        i += len;
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

type Unary<F> = fn(&mut Parser) -> Result<F, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &'static str) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Unexpected { expected, found: self.peek().to_string() },
        })
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(expected)
        }
    }

    fn finish<F>(&self, f: F) -> Result<F, ParseError> {
        match self.peek() {
            Tok::Eof => Ok(f),
            t => Err(ParseError { offset: self.offset(), kind: ParseErrorKind::TrailingInput(t.to_string()) }),
        }
    }

    /// Agent list up to (not including) the closing token.
    fn agents(&mut self, open_offset: usize, closers: &[Tok]) -> Result<Coalition, ParseError> {
        let mut names = Vec::new();
        if closers.contains(self.peek()) {
            return Ok(Coalition::empty());
        }
        loop {
            match self.peek().clone() {
                Tok::Ident(name) => {
                    self.bump();
                    names.push(name);
                }
                Tok::Eof => return Err(ParseError { offset: open_offset, kind: ParseErrorKind::UnbalancedCoalition }),
                _ => return self.unexpected("agent name"),
            }
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if closers.contains(t) => return Ok(Coalition::new(names)),
                Tok::Eof => return Err(ParseError { offset: open_offset, kind: ParseErrorKind::UnbalancedCoalition }),
                _ => return self.unexpected("`,` or closing bracket"),
            }
        }
    }

    fn expr<F: Formula>(&mut self, unary: Unary<F>) -> Result<F, ParseError> {
        let lhs = self.implication(unary)?;
        if *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.implication(unary)?;
            return Ok(lhs.iff(rhs));
        }
        Ok(lhs)
    }

    fn implication<F: Formula>(&mut self, unary: Unary<F>) -> Result<F, ParseError> {
        let lhs = self.disjunction(unary)?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication(unary)?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction<F: Formula>(&mut self, unary: Unary<F>) -> Result<F, ParseError> {
        let mut lhs = self.conjunction(unary)?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction(unary)?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn conjunction<F: Formula>(&mut self, unary: Unary<F>) -> Result<F, ParseError> {
        let mut lhs = unary(self)?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = unary(self)?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    /// Shared atomic forms. Returns `None` when the token belongs to a
    /// language-specific production.
    fn common_unary<F: Formula>(&mut self, unary: Unary<F>) -> Result<Option<F>, ParseError> {
        let f = match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                unary(self)?.not()
            }
            Tok::True => {
                self.bump();
                F::top()
            }
            Tok::False => {
                self.bump();
                F::bottom()
            }
            Tok::Ident(name) => {
                self.bump();
                F::atom(name)
            }
            _ => return Ok(None),
        };
        Ok(Some(f))
    }
}

fn atl_unary(p: &mut Parser) -> Result<AtlFormula, ParseError> {
    if let Some(f) = p.common_unary(atl_unary)? {
        return Ok(f);
    }
    match p.peek().clone() {
        Tok::LParen => {
            p.bump();
            let inner = p.expr(atl_unary)?;
            if *p.peek() == Tok::Until {
                return Err(ParseError { offset: p.offset(), kind: ParseErrorKind::UntilWithoutCoalition });
            }
            p.expect(Tok::RParen, "`)`")?;
            Ok(inner)
        }
        Tok::CoalOpen => {
            let (_, open) = p.bump();
            let c = p.agents(open, &[Tok::CoalClose, Tok::CoalCloseS])?;
            match p.peek() {
                Tok::CoalClose => {
                    p.bump();
                }
                Tok::CoalCloseS => return p.unexpected("`>>` (strategic marker is stit syntax)"),
                _ => unreachable!(),
            }
            match p.peek() {
                Tok::Next => {
                    p.bump();
                    Ok(AtlFormula::coal_x(c, atl_unary(p)?))
                }
                Tok::Globally => {
                    p.bump();
                    Ok(AtlFormula::coal_g(c, atl_unary(p)?))
                }
                Tok::LParen => {
                    p.bump();
                    let hold = p.expr(atl_unary)?;
                    p.expect(Tok::Until, "`U`")?;
                    let goal = p.expr(atl_unary)?;
                    p.expect(Tok::RParen, "`)`")?;
                    Ok(AtlFormula::coal_u(c, hold, goal))
                }
                _ => p.unexpected("`X`, `G` or `(` after coalition"),
            }
        }
        Tok::BoxOp | Tok::Diamond | Tok::LBracket | Tok::Next | Tok::Globally => {
            let (tok, off) = p.bump();
            Err(ParseError {
                offset: off,
                kind: ParseErrorKind::UnknownOperator(tok.to_string().trim_matches('`').to_string()),
            })
        }
        _ => p.unexpected("formula"),
    }
}

fn sx_unary(p: &mut Parser) -> Result<SxFormula, ParseError> {
    if let Some(f) = p.common_unary(sx_unary)? {
        return Ok(f);
    }
    match p.peek().clone() {
        Tok::LParen => {
            p.bump();
            let inner = p.expr(sx_unary)?;
            if *p.peek() == Tok::Until {
                p.bump();
                let goal = p.expr(sx_unary)?;
                p.expect(Tok::RParen, "`)`")?;
                return Ok(SxFormula::until(inner, goal));
            }
            p.expect(Tok::RParen, "`)` or `U`")?;
            Ok(inner)
        }
        Tok::BoxOp => {
            p.bump();
            Ok(SxFormula::necessary(sx_unary(p)?))
        }
        Tok::Diamond => {
            p.bump();
            Ok(SxFormula::possible(sx_unary(p)?))
        }
        Tok::Next => {
            p.bump();
            Ok(SxFormula::next(sx_unary(p)?))
        }
        Tok::Globally => {
            p.bump();
            Ok(SxFormula::globally(sx_unary(p)?))
        }
        Tok::LBracket => {
            let (_, open) = p.bump();
            let c = p.agents(open, &[Tok::RBracket])?;
            p.bump();
            Ok(SxFormula::stit(c, sx_unary(p)?))
        }
        Tok::CoalOpen => {
            let (_, open) = p.bump();
            let c = p.agents(open, &[Tok::CoalClose, Tok::CoalCloseS])?;
            if *p.peek() == Tok::CoalClose {
                return Err(ParseError { offset: p.offset(), kind: ParseErrorKind::MissingStrategicMarker });
            }
            p.bump();
            Ok(SxFormula::strategic(c, sx_unary(p)?))
        }
        _ => p.unexpected("formula"),
    }
}

/// Parses the coalition-temporal language.
pub fn parse_atl(text: &str) -> Result<AtlFormula, ParseError> {
    let mut p = Parser { tokens: lex(text)?, pos: 0 };
    let f = p.expr(atl_unary)?;
    p.finish(f)
}

/// Parses the stit language.
pub fn parse_sx(text: &str) -> Result<SxFormula, ParseError> {
    let mut p = Parser { tokens: lex(text)?, pos: 0 };
    let f = p.expr(sx_unary)?;
    p.finish(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom_a(n: &str) -> AtlFormula {
        AtlFormula::atom(n)
    }

    fn atom_s(n: &str) -> SxFormula {
        SxFormula::atom(n)
    }

    #[test]
    fn atl_grammar_clauses() {
        assert_eq!(parse_atl("<<a>> X p").unwrap(), AtlFormula::coal_x(Coalition::new(["a"]), atom_a("p")));
        assert_eq!(
            parse_atl("<<>> G (p & !q)").unwrap(),
            AtlFormula::coal_g(Coalition::empty(), atom_a("p").and(atom_a("q").not()))
        );
        assert_eq!(
            parse_atl("<<a,b>> (p U q)").unwrap(),
            AtlFormula::coal_u(Coalition::new(["a", "b"]), atom_a("p"), atom_a("q"))
        );
    }

    #[test]
    fn sx_grammar_clauses() {
        assert_eq!(parse_sx("[] p").unwrap(), SxFormula::necessary(atom_s("p")));
        assert_eq!(
            parse_sx("<<a>>^s X [] p").unwrap(),
            SxFormula::strategic(Coalition::new(["a"]), SxFormula::next(SxFormula::necessary(atom_s("p"))))
        );
        assert_eq!(
            parse_sx("[a,b] (p U q)").unwrap(),
            SxFormula::stit(Coalition::new(["a", "b"]), SxFormula::until(atom_s("p"), atom_s("q")))
        );
        assert_eq!(parse_sx("<> p").unwrap(), SxFormula::necessary(atom_s("p").not()).not());
        assert_eq!(parse_sx("[ ] p").unwrap(), SxFormula::stit(Coalition::empty(), atom_s("p")));
    }

    #[test]
    fn precedence_and_associativity() {
        let (p, q, r) = (atom_a("p"), atom_a("q"), atom_a("r"));
        assert_eq!(parse_atl("p & q | r").unwrap(), p.clone().and(q.clone()).or(r.clone()));
        assert_eq!(parse_atl("p | q & r").unwrap(), p.clone().or(q.clone().and(r.clone())));
        assert_eq!(parse_atl("p -> q -> r").unwrap(), p.clone().implies(q.clone().implies(r.clone())));
        assert_eq!(parse_atl("!p & q").unwrap(), p.clone().not().and(q.clone()));
        assert_eq!(
            parse_atl("<<a>> X p & q").unwrap(),
            AtlFormula::coal_x(Coalition::new(["a"]), p.clone()).and(q.clone())
        );
        assert_eq!(parse_atl("p <-> q").unwrap(), p.iff(q));
    }

    #[test]
    fn keywords_desugar() {
        assert_eq!(parse_atl("true").unwrap(), AtlFormula::top());
        assert_eq!(parse_atl("false").unwrap(), AtlFormula::bottom());
        assert_eq!(parse_atl("!true").unwrap(), AtlFormula::bottom());
    }

    #[test]
    fn error_offsets() {
        let e = parse_atl("<<a>>").unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(matches!(e.kind, ParseErrorKind::Unexpected { .. }));

        let e = parse_atl("<<a, b X p").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unexpected { expected: "`,` or closing bracket", found: "`X`".into() });

        let e = parse_atl("<<a").unwrap_err();
        assert_eq!((e.offset, e.kind), (0, ParseErrorKind::UnbalancedCoalition));

        let e = parse_atl("p ~ q").unwrap_err();
        assert_eq!((e.offset, e.kind), (2, ParseErrorKind::UnknownOperator("~".into())));

        let e = parse_atl("(p U q)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UntilWithoutCoalition);

        let e = parse_atl("p q").unwrap_err();
        assert_eq!(e.offset, 2);

        let e = parse_sx("<<a>> X p").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingStrategicMarker);

        assert!(parse_atl("[] p").is_err());
        assert!(parse_atl("").is_err());
    }
}
