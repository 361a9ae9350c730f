//! Ties the coalition-temporal checker to the stit evaluator.
//!
//! [`correspondence_check`] compares the two engines on one formula and
//! state, [`axiom_sweep`] and [`soundness_spotcheck`] test validity of
//! formulas on sampled models with both, and [`check_proof`] checks a
//! Hilbert-style derivation line by line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atl_mc::{eval_atl, EvalError};
use crate::cgs::{Cgs, StateId};
use crate::formula::{
    instantiate_schema, parse_atl, translate, AtlFormula, Coalition, CoalitionBinding, Formula, ParseError,
    SchemaError, SchemaName, Substitution,
};
use crate::stit::{sample_lassos, LassoHistory, SxError, SxEvaluator, SxIndex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error(transparent)]
    Atl(#[from] EvalError),
    #[error(transparent)]
    Sx(#[from] SxError),
    #[error("unknown state `{0}`")]
    UnknownState(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LassoVerdict {
    pub lasso: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub state: String,
    pub formula: String,
    pub translation: String,
    pub atl: bool,
    pub sx: Vec<LassoVerdict>,
    pub agreement: bool,
}

/// Truth of `phi` at `w` against its translation at the root moment of `w`
/// along every sampled history.
pub fn correspondence_check(
    g: &Cgs,
    phi: &AtlFormula,
    w: StateId,
    lasso_samples: usize,
    seed: u64,
) -> Result<CorrespondenceReport, BridgeError> {
    let mut ev = SxEvaluator::new(g);
    correspondence_check_with(&mut ev, g, phi, w, &sample_lassos(g, w, lasso_samples, seed))
}

/// As [`correspondence_check`] with a shared evaluator and given histories.
pub fn correspondence_check_with(
    ev: &mut SxEvaluator<'_>,
    g: &Cgs,
    phi: &AtlFormula,
    w: StateId,
    lassos: &[LassoHistory],
) -> Result<CorrespondenceReport, BridgeError> {
    if w >= g.num_states() {
        return Err(BridgeError::UnknownState(w.to_string()));
    }
    let atl = eval_atl(g, phi)?.contains(w);
    let tr = translate(phi);
    let mut sx = Vec::with_capacity(lassos.len());
    for h in lassos {
        debug_assert_eq!(h.anchor(), w);
        let holds = ev.eval(&tr, &SxIndex::at_root(h.clone()))?;
        sx.push(LassoVerdict { lasso: h.display(g).to_string(), holds });
    }
    let agreement = sx.iter().all(|v| v.holds == atl);
    Ok(CorrespondenceReport {
        state: g.state_name(w).to_string(),
        formula: phi.to_string(),
        translation: tr.to_string(),
        atl,
        sx,
        agreement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Atl,
    Sx,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub model: usize,
    /// 1-based proof line, when the formula comes from a proof.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub formula: String,
    pub state: String,
    pub engine: Engine,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lasso: Option<String>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model {}", self.model)?;
        if let Some(l) = self.line {
            write!(f, " line {l}")?;
        }
        write!(f, ": {} fails at {}", self.formula, self.state)?;
        match (&self.engine, &self.lasso) {
            (Engine::Sx, Some(h)) => write!(f, " (stit side, history {h})"),
            _ => write!(f, " (coalition side)"),
        }
    }
}

/// Outcome of checking formulas for validity on a set of models.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidityReport {
    pub schema: u32,
    /// (formula, model) pairs examined.
    pub checked: usize,
    /// Pairs with at least one counterexample.
    pub failed: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl ValidityReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks each formula at every state of every model with `eval_atl`, and
/// its translation at every sampled root index.
pub fn check_validity(
    models: &[Cgs],
    formulas: &[(Option<usize>, AtlFormula)],
    lasso_samples: usize,
    seed: u64,
) -> Result<ValidityReport, BridgeError> {
    let mut report = ValidityReport { schema: 1, ..ValidityReport::default() };
    for (m, g) in models.iter().enumerate() {
        let lassos: Vec<Vec<LassoHistory>> =
            (0..g.num_states()).map(|w| sample_lassos(g, w, lasso_samples, seed.wrapping_add(m as u64))).collect();
        let mut ev = SxEvaluator::new(g);
        for (line, phi) in formulas {
            report.checked += 1;
            let before = report.counterexamples.len();
            let den = eval_atl(g, phi)?;
            let tr = translate(phi);
            for (w, hs) in lassos.iter().enumerate() {
                if !den.contains(w) {
                    report.counterexamples.push(Counterexample {
                        model: m,
                        line: *line,
                        formula: phi.to_string(),
                        state: g.state_name(w).to_string(),
                        engine: Engine::Atl,
                        lasso: None,
                    });
                }
                for h in hs {
                    if !ev.eval(&tr, &SxIndex::at_root(h.clone()))? {
                        report.counterexamples.push(Counterexample {
                            model: m,
                            line: *line,
                            formula: tr.to_string(),
                            state: g.state_name(w).to_string(),
                            engine: Engine::Sx,
                            lasso: Some(h.display(g).to_string()),
                        });
                        break;
                    }
                }
            }
            if report.counterexamples.len() > before {
                report.failed += 1;
            }
        }
    }
    Ok(report)
}

/// One instantiated axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomInstance {
    pub schema: SchemaName,
    pub binding: CoalitionBinding,
    pub sigma: Substitution<AtlFormula>,
    pub formula: AtlFormula,
}

/// Every schema, with substitutions `identity`, `p -> !q` and
/// `p -> <<a>> X q` for the schemata mentioning `p`, and every binding of
/// `A` (and disjoint `B`) to subsets of `agents`; `GC` binds `A` to all of
/// `agents`.
pub fn standard_instances(agents: &[String]) -> Vec<AxiomInstance> {
    let subsets: Vec<Coalition> = (0..1usize << agents.len())
        .map(|mask| agents.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect())
        .collect();
    let first = agents.first().cloned().unwrap_or_else(|| "a".into());
    let sigmas: Vec<Substitution<AtlFormula>> = vec![
        Substitution::new(),
        [("p".to_string(), AtlFormula::atom("q").not())].into(),
        [("p".to_string(), AtlFormula::coal_x(Coalition::new([first]), AtlFormula::atom("q")))].into(),
    ];
    let mut out = Vec::new();
    for schema in SchemaName::ALL {
        let bindings: Vec<CoalitionBinding> = match schema {
            SchemaName::GrandCoalition => vec![CoalitionBinding::a(Coalition::new(agents.iter().cloned()))],
            SchemaName::Superadditivity => subsets
                .iter()
                .flat_map(|a| {
                    subsets.iter().filter(|b| a.is_disjoint(b)).map(|b| CoalitionBinding::ab(a.clone(), b.clone()))
                })
                .collect(),
            _ => subsets.iter().cloned().map(CoalitionBinding::a).collect(),
        };
        let probe = instantiate_schema(schema, &bindings[0], &Substitution::new()).expect("template instantiates");
        let mentions_p = probe.atoms().contains("p");
        for binding in &bindings {
            for sigma in sigmas.iter().filter(|s| mentions_p || s.is_empty()) {
                let formula = instantiate_schema(schema, binding, sigma).expect("bindings respect side conditions");
                out.push(AxiomInstance { schema, binding: binding.clone(), sigma: sigma.clone(), formula });
            }
        }
    }
    out
}

/// Validity of every instance on every model; counterexamples must not occur.
pub fn axiom_sweep(
    models: &[Cgs],
    instances: &[AxiomInstance],
    lasso_samples: usize,
    seed: u64,
) -> Result<ValidityReport, BridgeError> {
    let formulas: Vec<_> = instances.iter().map(|i| (None, i.formula.clone())).collect();
    check_validity(models, &formulas, lasso_samples, seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom {
        schema: SchemaName,
        binding: CoalitionBinding,
        sigma: Substitution<AtlFormula>,
    },
    /// From `premise` and `premise -> current`.
    Mp {
        premise: usize,
        implication: usize,
    },
    Subst {
        line: usize,
        sigma: Substitution<AtlFormula>,
    },
    /// From `φ -> ψ` infer `<<A>> X φ -> <<A>> X ψ`.
    XMono {
        line: usize,
        coalition: Coalition,
    },
    /// From `φ` infer `<<>> G φ`.
    GNec {
        line: usize,
    },
    /// Propositional tautology, coalition formulas read as letters.
    Taut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: AtlFormula,
    pub by: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProofScript {
    pub lines: Vec<ProofLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofLoadError {
    #[error("malformed proof script: {0}")]
    Json(String),
    #[error("line {line}: malformed justification: {message}")]
    Justification { line: usize, message: String },
    #[error("line {line}: {error}")]
    Formula { line: usize, error: ParseError },
    #[error("line {line}: {error}")]
    Schema { line: usize, error: SchemaError },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LineDoc {
    formula: String,
    by: JustificationDoc,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum JustificationDoc {
    Axiom {
        schema: String,
        #[serde(rename = "A", default)]
        a: Option<Vec<String>>,
        #[serde(rename = "B", default)]
        b: Option<Vec<String>>,
        #[serde(default)]
        sigma: BTreeMap<String, String>,
    },
    Mp {
        premise: usize,
        implication: usize,
    },
    Subst {
        line: usize,
        sigma: BTreeMap<String, String>,
    },
    Xmono {
        line: usize,
        coalition: Vec<String>,
    },
    Gnec {
        line: usize,
    },
    Taut,
}

impl ProofScript {
    /// Reads the JSON array format `[{"formula": ..., "by": {"kind": ...}}]`.
    pub fn from_json(text: &str) -> Result<ProofScript, ProofLoadError> {
        let raw: Vec<serde_json::Value> =
            serde_json::from_str(text).map_err(|e| ProofLoadError::Json(e.to_string()))?;
        let mut lines = Vec::with_capacity(raw.len());
        for (i, value) in raw.into_iter().enumerate() {
            let line = i + 1;
            let doc: LineDoc = serde_json::from_value(value)
                .map_err(|e| ProofLoadError::Justification { line, message: e.to_string() })?;
            let formula = parse_atl(&doc.formula).map_err(|error| ProofLoadError::Formula { line, error })?;
            let sigma_of = |map: BTreeMap<String, String>| -> Result<Substitution<AtlFormula>, ProofLoadError> {
                map.into_iter()
                    .map(|(k, v)| Ok((k, parse_atl(&v).map_err(|error| ProofLoadError::Formula { line, error })?)))
                    .collect()
            };
            let by = match doc.by {
                JustificationDoc::Axiom { schema, a, b, sigma } => Justification::Axiom {
                    schema: schema.parse().map_err(|error| ProofLoadError::Schema { line, error })?,
                    binding: CoalitionBinding { a: a.map(Coalition::new), b: b.map(Coalition::new) },
                    sigma: sigma_of(sigma)?,
                },
                JustificationDoc::Mp { premise, implication } => Justification::Mp { premise, implication },
                JustificationDoc::Subst { line: from, sigma } => {
                    Justification::Subst { line: from, sigma: sigma_of(sigma)? }
                }
                JustificationDoc::Xmono { line: from, coalition } => {
                    Justification::XMono { line: from, coalition: Coalition::new(coalition) }
                }
                JustificationDoc::Gnec { line: from } => Justification::GNec { line: from },
                JustificationDoc::Taut => Justification::Taut,
            };
            lines.push(ProofLine { formula, by });
        }
        Ok(ProofScript { lines })
    }

    /// Agents mentioned anywhere in the script.
    pub fn agents(&self) -> Coalition {
        let mut out = BTreeSet::new();
        for l in &self.lines {
            out.extend(l.formula.coalitions().into_iter().flat_map(|c| c.iter().map(str::to_string)));
            let coalitions: Vec<&Coalition> = match &l.by {
                Justification::Axiom { binding, .. } => binding.a.iter().chain(binding.b.iter()).collect(),
                Justification::XMono { coalition, .. } => vec![coalition],
                _ => Vec::new(),
            };
            out.extend(coalitions.into_iter().flat_map(|c| c.iter().map(str::to_string)));
        }
        Coalition::new(out)
    }

    pub fn formulas(&self) -> impl Iterator<Item = &AtlFormula> {
        self.lines.iter().map(|l| &l.formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ProofVerdict {
    Accepted {
        lines: usize,
    },
    /// `line` is 1-based.
    Rejected {
        line: usize,
        reason: String,
    },
}

impl ProofVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, ProofVerdict::Accepted { .. })
    }
}

impl fmt::Display for ProofVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofVerdict::Accepted { lines } => write!(f, "accepted ({lines} lines)"),
            ProofVerdict::Rejected { line, reason } => write!(f, "rejected at line {line}: {reason}"),
        }
    }
}

/// Checks every line; `ags` is the full agent set the `GC` axiom refers to.
pub fn check_proof(s: &ProofScript, ags: &Coalition) -> ProofVerdict {
    for (i, line) in s.lines.iter().enumerate() {
        if let Err(reason) = check_line(&s.lines[..i], line, ags) {
            return ProofVerdict::Rejected { line: i + 1, reason };
        }
    }
    ProofVerdict::Accepted { lines: s.lines.len() }
}

fn check_line(earlier: &[ProofLine], line: &ProofLine, ags: &Coalition) -> Result<(), String> {
    let get = |k: usize| -> Result<&AtlFormula, String> {
        if k == 0 || k > earlier.len() {
            Err(format!("dangling reference to line {k}"))
        } else {
            Ok(&earlier[k - 1].formula)
        }
    };
    let current = &line.formula;
    match &line.by {
        Justification::Axiom { schema, binding, sigma } => {
            let mut binding = binding.clone();
            if *schema == SchemaName::GrandCoalition {
                if binding.a.as_ref().is_some_and(|a| a != ags) {
                    return Err(format!("GC requires the full agent set {{{ags}}}"));
                }
                binding.a = Some(ags.clone());
            }
            let expected = instantiate_schema(*schema, &binding, sigma).map_err(|e| format!("side condition: {e}"))?;
            if &expected != current {
                return Err(format!("not an instance of {schema}: expected {expected}"));
            }
        }
        Justification::Mp { premise, implication } => {
            let premise = get(*premise)?;
            let implication = get(*implication)?;
            let Some((ante, cons)) = implication.as_implication() else {
                return Err("modus ponens needs an implication".into());
            };
            if ante != premise {
                return Err("antecedent mismatch".into());
            }
            if cons != current {
                return Err("consequent mismatch".into());
            }
        }
        Justification::Subst { line: k, sigma } => {
            let expected = get(*k)?.substitute(sigma);
            if &expected != current {
                return Err(format!("substitution mismatch: expected {expected}"));
            }
        }
        Justification::XMono { line: k, coalition } => {
            let Some((a, b)) = get(*k)?.as_implication() else {
                return Err("X-monotonicity needs an implication".into());
            };
            let expected = AtlFormula::coal_x(coalition.clone(), a.clone())
                .implies(AtlFormula::coal_x(coalition.clone(), b.clone()));
            if &expected != current {
                return Err(format!("X-monotonicity mismatch: expected {expected}"));
            }
        }
        Justification::GNec { line: k } => {
            let body = get(*k)?;
            match current {
                AtlFormula::CoalG(c, inner) if inner.as_ref() == body => {
                    if !c.is_empty() {
                        return Err("necessitation requires empty coalition".into());
                    }
                }
                _ => {
                    let expected = AtlFormula::coal_g(Coalition::empty(), body.clone());
                    return Err(format!("necessitation mismatch: expected {expected}"));
                }
            }
        }
        Justification::Taut => {
            if !is_tautology(current)? {
                return Err("not a tautology".into());
            }
        }
    }
    Ok(())
}

/// Truth-table check with coalition subformulas as letters.
fn is_tautology(phi: &AtlFormula) -> Result<bool, String> {
    fn letters<'a>(f: &'a AtlFormula, out: &mut Vec<&'a AtlFormula>) {
        match f {
            AtlFormula::Not(a) => letters(a, out),
            AtlFormula::And(a, b) => {
                letters(a, out);
                letters(b, out);
            }
            _ => {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    fn value(f: &AtlFormula, letters: &[&AtlFormula], row: u32) -> bool {
        match f {
            AtlFormula::Not(a) => !value(a, letters, row),
            AtlFormula::And(a, b) => value(a, letters, row) && value(b, letters, row),
            _ => {
                let i = letters.iter().position(|l| *l == f).expect("collected");
                row >> i & 1 == 1
            }
        }
    }
    let mut ls = Vec::new();
    letters(phi, &mut ls);
    if ls.len() > 20 {
        return Err(format!("too many letters for a truth table ({})", ls.len()));
    }
    Ok((0..1u32 << ls.len()).all(|row| value(phi, &ls, row)))
}

/// Every proved formula, checked for validity on the given models. Does
/// not re-check the derivation.
pub fn soundness_spotcheck(
    s: &ProofScript,
    models: &[Cgs],
    lasso_samples: usize,
    seed: u64,
) -> Result<ValidityReport, BridgeError> {
    let formulas: Vec<_> = s.lines.iter().enumerate().map(|(i, l)| (Some(i + 1), l.formula.clone())).collect();
    check_validity(models, &formulas, lasso_samples, seed)
}
