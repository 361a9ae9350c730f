use atlstit::atl_mc::{eval_atl, eval_atl_oracle, pre};
use atlstit::cgs::{random_cgs, Cgs, StateSet};
use atlstit::formula::{random_atl, AtlFormula, AtlGenConfig, Coalition, Formula};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(g: &Cgs, depth: usize) -> AtlGenConfig {
    AtlGenConfig { max_depth: depth, agents: g.agents().to_vec(), atoms: g.atoms().map(str::to_string).collect() }
}

fn coalitions() -> Vec<Coalition> {
    vec![Coalition::empty(), Coalition::new(["a"]), Coalition::new(["b"]), Coalition::new(["a", "b"])]
}

fn subset(n: usize, mask: u64) -> StateSet {
    StateSet::from_iter_in(n, (0..n).filter(|i| mask >> i & 1 == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixpoints_agree_with_strategy_oracle(seed in any::<u64>(), n in 1usize..=4) {
        let g = random_cgs(n, 2, 3, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let phi = random_atl(&mut rng, &config(&g, 3));
            prop_assert_eq!(eval_atl(&g, &phi).unwrap(), eval_atl_oracle(&g, &phi).unwrap(), "{}", phi);
        }
    }

    #[test]
    fn pre_is_monotone(seed in any::<u64>(), t in any::<u64>(), u in any::<u64>()) {
        let g = random_cgs(4, 2, 3, 1, seed);
        let small = subset(4, t & u);
        let big = subset(4, t);
        for c in coalitions() {
            let p_small = pre(&g, &c, &small).unwrap();
            prop_assert!(p_small.is_subset(&pre(&g, &c, &big).unwrap()));
            for d in coalitions().into_iter().filter(|d| c.is_subset(d)) {
                prop_assert!(pre(&g, &c, &big).unwrap().is_subset(&pre(&g, &d, &big).unwrap()));
            }
        }
    }

    #[test]
    fn fixpoint_equations_hold(seed in any::<u64>()) {
        let g = random_cgs(4, 2, 2, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let a = random_atl(&mut rng, &config(&g, 1));
        let b = random_atl(&mut rng, &config(&g, 1));
        for c in coalitions() {
            let da = eval_atl(&g, &a).unwrap();
            let db = eval_atl(&g, &b).unwrap();
            let gz = eval_atl(&g, &AtlFormula::coal_g(c.clone(), a.clone())).unwrap();
            prop_assert_eq!(&gz, &da.intersection(&pre(&g, &c, &gz).unwrap()));
            let uz = eval_atl(&g, &AtlFormula::coal_u(c.clone(), a.clone(), b.clone())).unwrap();
            prop_assert_eq!(&uz, &db.union(&da.intersection(&pre(&g, &c, &uz).unwrap())));
        }
    }

    #[test]
    fn superadditivity_and_grand_coalition(seed in any::<u64>()) {
        let g = random_cgs(4, 2, 3, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let phi = random_atl(&mut rng, &config(&g, 2));
        let psi = random_atl(&mut rng, &config(&g, 2));
        for a in coalitions() {
            for b in coalitions().into_iter().filter(|b| a.is_disjoint(b)) {
                let lhs = eval_atl(&g, &AtlFormula::coal_x(a.clone(), phi.clone())).unwrap()
                    .intersection(&eval_atl(&g, &AtlFormula::coal_x(b.clone(), psi.clone())).unwrap());
                let rhs = eval_atl(&g, &AtlFormula::coal_x(a.union(&b), phi.clone().and(psi.clone()))).unwrap();
                prop_assert!(lhs.is_subset(&rhs));
            }
        }
        let lhs = eval_atl(&g, &AtlFormula::coal_x(Coalition::empty(), phi.clone().not())).unwrap().complement();
        let rhs = eval_atl(&g, &AtlFormula::coal_x(g.grand_coalition(), phi)).unwrap();
        prop_assert!(lhs.is_subset(&rhs));
    }
}

#[test]
fn absent_atom_denotes_nothing() {
    let g = random_cgs(3, 1, 2, 1, 0);
    assert!(eval_atl(&g, &AtlFormula::atom("zz")).unwrap().is_empty());
}
