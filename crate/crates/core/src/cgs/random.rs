use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Cgs, StateSet};

/// Agent `i` is named by a lowercase letter while those last.
pub fn agent_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{i}")
    }
}

/// Atoms `p`, `q`, `r`, then `p3`, `p4`, ... (`p0` stays reserved).
pub fn atom_name(i: usize) -> String {
    match i {
        0 => "p".into(),
        1 => "q".into(),
        2 => "r".into(),
        _ => format!("p{i}"),
    }
}

/// Deterministic pseudo-random structure: every menu size is uniform in
/// `1..=max_actions`, every transition target and every valuation bit is
/// uniform.
pub fn random_cgs(n_states: usize, n_agents: usize, max_actions: usize, n_atoms: usize, seed: u64) -> Cgs {
    assert!(n_states >= 1 && n_agents >= 1 && max_actions >= 1 && n_atoms >= 1, "bounds must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let menus: Vec<Vec<Vec<String>>> = (0..n_states)
        .map(|_| {
            (0..n_agents)
                .map(|_| {
                    let k = rng.gen_range(1..=max_actions);
                    (1..=k).map(|i| format!("s{i}")).collect()
                })
                .collect()
        })
        .collect();
    let delta = menus
        .iter()
        .map(|row| {
            let count: usize = row.iter().map(Vec::len).product();
            (0..count).map(|_| rng.gen_range(0..n_states)).collect()
        })
        .collect();
    let valuation: IndexMap<String, StateSet> = (0..n_atoms)
        .map(|i| {
            let set = StateSet::from_iter_in(n_states, (0..n_states).filter(|_| rng.gen_bool(0.5)));
            (atom_name(i), set)
        })
        .collect();
    Cgs {
        agents: (0..n_agents).map(agent_name).collect(),
        states: (0..n_states).map(|i| format!("w{i}")).collect(),
        menus,
        delta,
        valuation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_bounds_force_self_loop() {
        for seed in 0..5 {
            let g = random_cgs(1, 1, 1, 1, seed);
            assert_eq!(g.num_profiles(0), 1);
            assert_eq!(g.next_by_code(0, 0), 0);
        }
    }

    #[test]
    fn generated_structures_validate() {
        for seed in 0..50 {
            let g = random_cgs(2, 2, 2, 1, seed);
            assert!(g.validate().is_empty());
        }
        assert!(random_cgs(2, 2, 2, 1, 7).validate().is_empty());
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(random_cgs(3, 1, 3, 2, 7), random_cgs(3, 1, 3, 2, 7));
        assert_eq!(random_cgs(3, 1, 3, 2, 7).to_json(), random_cgs(3, 1, 3, 2, 7).to_json());
    }

    #[test]
    fn menu_sizes_cover_range() {
        let mut seen = [false; 3];
        for seed in 0..20 {
            let g = random_cgs(4, 2, 3, 1, seed);
            for w in 0..4 {
                for a in 0..2 {
                    let k = g.menu(w, a).len();
                    assert!((1..=3).contains(&k));
                    seen[k - 1] = true;
                }
            }
        }
        assert_eq!(seen, [true; 3]);
    }
}
