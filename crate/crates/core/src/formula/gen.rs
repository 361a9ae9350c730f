//! Random formula generators used by the property and acceptance tests.

use rand::Rng;

use super::{AtlFormula, Coalition, Formula, SxFormula};

#[derive(Debug, Clone)]
pub struct AtlGenConfig {
    /// Maximum nesting depth of connectives; atoms have depth 0.
    pub max_depth: usize,
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
}

fn random_coalition<R: Rng + ?Sized>(rng: &mut R, agents: &[String]) -> Coalition {
    agents.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// Draws a formula with every connective reachable at each level.
pub fn random_atl<R: Rng + ?Sized>(rng: &mut R, cfg: &AtlGenConfig) -> AtlFormula {
    gen_atl(rng, cfg, cfg.max_depth)
}

fn gen_atl<R: Rng + ?Sized>(rng: &mut R, cfg: &AtlGenConfig, depth: usize) -> AtlFormula {
    let atom = |rng: &mut R| AtlFormula::atom(cfg.atoms[rng.gen_range(0..cfg.atoms.len())].clone());
    if depth == 0 {
        return atom(rng);
    }
    match rng.gen_range(0..12) {
        0 | 1 => atom(rng),
        2 => gen_atl(rng, cfg, depth - 1).not(),
        3 | 4 => gen_atl(rng, cfg, depth - 1).and(gen_atl(rng, cfg, depth - 1)),
        5 | 6 => AtlFormula::coal_x(random_coalition(rng, &cfg.agents), gen_atl(rng, cfg, depth - 1)),
        7 | 8 => AtlFormula::coal_g(random_coalition(rng, &cfg.agents), gen_atl(rng, cfg, depth - 1)),
        _ => AtlFormula::coal_u(
            random_coalition(rng, &cfg.agents),
            gen_atl(rng, cfg, depth - 1),
            gen_atl(rng, cfg, depth - 1),
        ),
    }
}

/// Boolean combination of atoms and settled atoms (`[] p`); its truth at an
/// index depends on the current state only.
pub fn random_sx_operand<R: Rng + ?Sized>(rng: &mut R, atoms: &[String], depth: usize) -> SxFormula {
    let leaf = |rng: &mut R| {
        let p = SxFormula::atom(atoms[rng.gen_range(0..atoms.len())].clone());
        if rng.gen_bool(0.5) {
            SxFormula::necessary(p)
        } else {
            p
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..4) {
        0 => leaf(rng),
        1 => random_sx_operand(rng, atoms, depth - 1).not(),
        _ => random_sx_operand(rng, atoms, depth - 1).and(random_sx_operand(rng, atoms, depth - 1)),
    }
}
