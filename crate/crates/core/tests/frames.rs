use atlstit::bridge::correspondence_check_with;
use atlstit::cgs::{random_cgs, Cgs, StateId};
use atlstit::formula::{parse_sx, random_atl, translate, AtlGenConfig, Coalition, SxFormula};
use atlstit::stit::{lasso_pool, random_lasso, sample_lassos, LassoHistory, PoolBounds, SxEvaluator, SxIndex};
use atlstit::unravel::{unravel, verify_frame, FrameCondition, Moment};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Distinct profile paths of length `d` from `w`, by direct recursion.
fn paths(g: &Cgs, w: StateId, d: usize) -> usize {
    if d == 0 {
        return 1;
    }
    (0..g.num_profiles(w)).map(|c| paths(g, g.next_by_code(w, c), d - 1)).sum()
}

fn config(g: &Cgs, depth: usize) -> AtlGenConfig {
    AtlGenConfig { max_depth: depth, agents: g.agents().to_vec(), atoms: g.atoms().map(str::to_string).collect() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moment_counts_match_path_enumeration(seed in any::<u64>(), w in 0usize..3) {
        let g = random_cgs(3, 2, 2, 1, seed);
        let frag = unravel(&g, w, 3).unwrap();
        for d in 0..=3 {
            let at_depth = frag.moments.iter().filter(|m| m.len() == d + 1).count();
            prop_assert_eq!(at_depth, paths(&g, w, d));
        }
    }

    #[test]
    fn cells_partition_branches(seed in any::<u64>()) {
        let g = random_cgs(3, 2, 3, 1, seed);
        let frag = unravel(&g, 0, 2).unwrap();
        prop_assert!(verify_frame(&g, &frag).is_empty());
        for (m, node) in frag.moments.iter().zip(&frag.nodes) {
            if node.branches.is_empty() {
                continue;
            }
            for (a, ch) in node.choice.iter().enumerate() {
                prop_assert_eq!(ch.cells.len(), g.menu(m.last(), a).len());
                let total: usize = ch.cells.iter().map(|c| c.branches.len()).sum();
                prop_assert_eq!(total, node.branches.len());
            }
        }
    }

    #[test]
    fn equal_last_states_have_equal_branchings(seed in any::<u64>()) {
        let g = random_cgs(3, 2, 2, 1, seed);
        let frag = unravel(&g, 0, 2).unwrap();
        for (i, m) in frag.moments.iter().enumerate() {
            for (j, n) in frag.moments.iter().enumerate() {
                if m.last() != n.last() || frag.nodes[i].branches.is_empty() || frag.nodes[j].branches.is_empty() {
                    continue;
                }
                let profiles = |k: usize| frag.nodes[k].branches.iter().map(|b| b.profile.clone()).collect::<Vec<_>>();
                prop_assert_eq!(profiles(i), profiles(j));
                for (b, c) in frag.nodes[i].branches.iter().zip(&frag.nodes[j].branches) {
                    prop_assert_eq!(frag.moments[b.successor].last(), frag.moments[c.successor].last());
                }
            }
        }
    }

    /// Truth at an index depends on the moment through its last state only.
    #[test]
    fn last_state_invariance(seed in any::<u64>()) {
        let g = random_cgs(3, 2, 2, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let formulas: Vec<SxFormula> = ["X p", "[a] X q", "<<b>>^s (p U [] q)", "G (p | X q)", "[] X X p"]
            .iter()
            .map(|t| parse_sx(t).unwrap())
            .chain((0..3).map(|_| translate(&random_atl(&mut rng, &config(&g, 2)))))
            .collect();
        let frag = unravel(&g, 0, 2).unwrap();
        let mut ev = SxEvaluator::new(&g);
        for m in &frag.moments {
            for h in sample_lassos(&g, m.last(), 4, seed) {
                for phi in &formulas {
                    let deep = ev.eval(phi, &SxIndex::new(m.clone(), h.clone()).unwrap()).unwrap();
                    let root = ev.eval(phi, &SxIndex::at_root(h.clone())).unwrap();
                    prop_assert_eq!(deep, root, "{} at {}", phi, m.display(&g));
                }
            }
        }
    }

    #[test]
    fn translations_ignore_the_history(seed in any::<u64>()) {
        let g = random_cgs(3, 2, 2, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ev = SxEvaluator::new(&g);
        for _ in 0..4 {
            let phi = random_atl(&mut rng, &config(&g, 3));
            for w in 0..g.num_states() {
                let pool = lasso_pool(&g, w, PoolBounds::for_model(&g));
                let r = correspondence_check_with(&mut ev, &g, &phi, w, &pool).unwrap();
                prop_assert!(r.agreement, "{} at w{}", phi, w);
            }
        }
    }

    #[test]
    fn strategic_ability_is_monotone_in_the_coalition(seed in any::<u64>()) {
        let g = random_cgs(4, 2, 2, 2, seed);
        let mut ev = SxEvaluator::new(&g);
        let cs = [Coalition::empty(), Coalition::new(["a"]), Coalition::new(["b"]), Coalition::new(["a", "b"])];
        for body in ["X [] p", "G ! [] q", "([] p U [] q)"] {
            let body = parse_sx(body).unwrap();
            for c in &cs {
                for d in cs.iter().filter(|d| c.is_subset(d)) {
                    let small = ev.denotation(&SxFormula::strategic(c.clone(), body.clone())).unwrap();
                    let big = ev.denotation(&SxFormula::strategic(d.clone(), body.clone())).unwrap();
                    prop_assert!(small.is_subset(&big));
                }
            }
        }
    }

    #[test]
    fn temporal_operators_match_unrolled_paths(seed in any::<u64>()) {
        let g = random_cgs(4, 2, 3, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_lasso(&g, 0, PoolBounds::for_model(&g), &mut rng);
        let states: Vec<StateId> = (0..2 * h.period() + 1).map(|i| h.state_at(&g, i)).collect();
        let p = g.valuation("p");
        let q = g.valuation("q");
        let n = 2 * h.period();
        let globally = (0..n).all(|i| p.contains(states[i]));
        let until = (0..n).find(|&j| q.contains(states[j])).is_some_and(|j| (0..j).all(|i| p.contains(states[i])));
        let next = p.contains(states[1]);
        let mut ev = SxEvaluator::new(&g);
        let ix = SxIndex::at_root(h.clone());
        prop_assert_eq!(ev.eval(&parse_sx("G p").unwrap(), &ix).unwrap(), globally);
        prop_assert_eq!(ev.eval(&parse_sx("(p U q)").unwrap(), &ix).unwrap(), until);
        prop_assert_eq!(ev.eval(&parse_sx("X p").unwrap(), &ix).unwrap(), next);
    }
}

#[test]
fn faults_are_named() {
    let (g, w) = (0..64)
        .map(|seed| random_cgs(3, 2, 2, 1, seed))
        .find_map(|g| {
            let w = (0..3).find(|&w| (0..2).all(|a| g.menu(w, a).len() == 2))?;
            Some((g, w))
        })
        .expect("model with full menus");
    let frag = unravel(&g, w, 2).unwrap();
    assert!(verify_frame(&g, &frag).is_empty());
    let conditions =
        |f: &atlstit::unravel::BdtFragment| verify_frame(&g, f).into_iter().map(|v| v.condition).collect::<Vec<_>>();

    let mut f = frag.clone();
    f.nodes[0].choice[0].cells[0].label = g.menu(w, 0)[1].clone();
    assert!(conditions(&f).contains(&FrameCondition::LabelOfExe));

    let mut f = frag.clone();
    let swap = f.nodes[0].choice[0].exe.clone();
    f.nodes[0].choice[0].exe = swap.into_iter().map(|(k, v)| (k, 1 - v)).collect();
    assert!(conditions(&f).contains(&FrameCondition::ExeOfLabel));

    let mut f = frag.clone();
    f.nodes[0].branches.pop();
    for ch in &mut f.nodes[0].choice {
        for cell in &mut ch.cells {
            cell.branches.retain(|&b| b < 3);
        }
    }
    assert!(conditions(&f).contains(&FrameCondition::IndependenceOfAgency));

    let mut f = frag.clone();
    let other = f.nodes[0].branches[1].successor;
    f.nodes[0].branches[0].successor = other;
    let found = conditions(&f);
    assert!(found.contains(&FrameCondition::TimeDiscreteness));
    assert!(found.contains(&FrameCondition::NoChoiceBetweenUndivided));
}

#[test]
fn root_moment_of_lasso() {
    let g = random_cgs(3, 1, 2, 1, 5);
    let h = LassoHistory::canonical(&g, 0);
    assert_eq!(h.moment_after(&g, 0), Moment::root(0));
    assert_eq!(h.moment_after(&g, 2).last(), h.state_at(&g, 2));
    assert!(SxIndex::new(h.moment_after(&g, 1), h.suffix(&g, 1)).is_ok());
}
