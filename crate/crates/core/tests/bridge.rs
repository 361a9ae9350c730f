use std::collections::HashMap;

use atlstit::bridge::{
    axiom_sweep, check_proof, check_validity, soundness_spotcheck, standard_instances, ProofScript, ProofVerdict,
};
use atlstit::cgs::{random_cgs, Cgs};
use atlstit::formula::{random_atl, AtlFormula, AtlGenConfig, Coalition, Formula};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn models(count: u64) -> Vec<Cgs> {
    (0..count).map(|s| random_cgs(3, 2, 2, 2, 1000 + s)).collect()
}

fn agents() -> Vec<String> {
    vec!["a".into(), "b".into()]
}

struct Validity<'a> {
    models: &'a [Cgs],
    memo: HashMap<AtlFormula, bool>,
}

impl Validity<'_> {
    fn holds(&mut self, f: &AtlFormula) -> bool {
        if let Some(&v) = self.memo.get(f) {
            return v;
        }
        let v = check_validity(self.models, &[(None, f.clone())], 3, 7).unwrap().is_clean();
        self.memo.insert(f.clone(), v);
        v
    }
}

fn pool() -> Vec<AtlFormula> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = AtlGenConfig { max_depth: 2, agents: agents(), atoms: vec!["p".into(), "q".into()] };
    let axioms = standard_instances(&agents());
    let mut out: Vec<AtlFormula> = axioms.iter().step_by(6).map(|i| i.formula.clone()).collect();
    for _ in 0..10 {
        let chi = random_atl(&mut rng, &cfg);
        out.push(chi.clone().or(chi.clone().not()));
        out.push(chi);
    }
    out
}

/// Conditional: whenever the premises are valid on the sample, so is the
/// conclusion. Returns the number of non-vacuous cases.
fn preserved<F>(valid: &mut Validity<'_>, premises: &[AtlFormula], conclusion: F) -> usize
where
    F: FnOnce() -> AtlFormula,
{
    if premises.iter().all(|p| valid.holds(p)) {
        let c = conclusion();
        assert!(valid.holds(&c), "rule does not preserve validity: {c}");
        1
    } else {
        0
    }
}

#[test]
fn rules_preserve_validity() {
    let ms = models(6);
    let mut valid = Validity { models: &ms, memo: HashMap::new() };
    let formulas = pool();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = AtlGenConfig { max_depth: 1, agents: agents(), atoms: vec!["p".into(), "q".into()] };
    let (mut mp, mut mono, mut nec) = (0, 0, 0);
    for phi in &formulas {
        let chi = random_atl(&mut rng, &cfg);
        for psi in [phi.clone().or(chi.clone()), chi.clone(), chi.clone().and(phi.clone())] {
            let imp = phi.clone().implies(psi.clone());
            mp += preserved(&mut valid, &[phi.clone(), imp.clone()], || psi.clone());
            for a in [Coalition::empty(), Coalition::new(["a"]), Coalition::new(["a", "b"])] {
                mono += preserved(&mut valid, std::slice::from_ref(&imp), || {
                    AtlFormula::coal_x(a.clone(), phi.clone()).implies(AtlFormula::coal_x(a.clone(), psi.clone()))
                });
            }
        }
        nec += preserved(&mut valid, std::slice::from_ref(phi), || AtlFormula::coal_g(Coalition::empty(), phi.clone()));
    }
    println!("non-vacuous cases: mp {mp}, xmono {mono}, gnec {nec}");
    assert!(mp > 0 && mono > 0 && nec > 0);
}

#[test]
fn sweep_is_clean_on_small_models() {
    let report = axiom_sweep(&models(4), &standard_instances(&agents()), 4, 1).unwrap();
    assert_eq!(report.checked, 4 * 86);
    assert!(report.is_clean(), "{:?}", report.counterexamples.first());
}

#[test]
fn non_theorem_is_refuted() {
    let text = r#"[{"formula": "<<>> X p", "by": {"kind": "taut"}}]"#;
    let s = ProofScript::from_json(text).unwrap();
    assert!(matches!(check_proof(&s, &Coalition::new(["a", "b"])), ProofVerdict::Rejected { line: 1, .. }));
    let report = soundness_spotcheck(&s, &models(3), 2, 0).unwrap();
    assert!(!report.is_clean());
    assert_eq!(report.counterexamples[0].line, Some(1));
}

#[test]
fn empty_script_is_vacuous() {
    let s = ProofScript::from_json("[]").unwrap();
    assert_eq!(check_proof(&s, &Coalition::empty()), ProofVerdict::Accepted { lines: 0 });
    assert!(soundness_spotcheck(&s, &models(2), 2, 0).unwrap().is_clean());
}
