use super::{AtlFormula, Formula, SxFormula};

/// Embeds a coalition-temporal formula into the stit language.
///
/// Atoms become settled truths (`[] p`), booleans are homomorphic and each
/// coalition operator becomes strategic ability over the matching temporal
/// operator.
pub fn translate(phi: &AtlFormula) -> SxFormula {
    match phi {
        AtlFormula::Atom(p) => SxFormula::necessary(SxFormula::atom(p.clone())),
        AtlFormula::Not(a) => translate(a).not(),
        AtlFormula::And(a, b) => translate(a).and(translate(b)),
        AtlFormula::CoalX(c, a) => SxFormula::strategic(c.clone(), SxFormula::next(translate(a))),
        AtlFormula::CoalG(c, a) => SxFormula::strategic(c.clone(), SxFormula::globally(translate(a))),
        AtlFormula::CoalU(c, a, b) => SxFormula::strategic(c.clone(), SxFormula::until(translate(a), translate(b))),
    }
}
