//! Deterministic random instance generators (seeded ChaCha).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sgraph::{InformationSet, Label, SGraph, Value, VertexId};

pub type GenRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Information set `s0, s1, ...` of the requested size.
pub fn symbols(count: usize) -> InformationSet {
    InformationSet::new((0..count).map(|i| format!("s{i}")).collect()).expect("distinct")
}

/// Random S-graph with `n` vertices and degree at most `d`: repeated random
/// ordered-pair insertions, skipping any that would break the bound.
pub fn random_sgraph(rng: &mut GenRng, n: usize, d: usize, syms: &InformationSet) -> SGraph {
    let mut g = SGraph::new(n, syms.clone());
    if n == 0 {
        return g;
    }
    let attempts = 2 * n * d.max(1);
    for _ in 0..attempts {
        let u = rng.gen_range(0..n) as VertexId;
        let v = rng.gen_range(0..n) as VertexId;
        let l: Label = Some(rng.gen_range(0..syms.len()) as u16);
        if g.value(u, v).is_present() {
            continue;
        }
        let cost = if u == v { 2 } else { 1 };
        if g.degree(u) + cost > d {
            continue;
        }
        if u != v && g.degree(v) + 1 > d {
            continue;
        }
        g.set_value(u, v, Value::Present(l));
    }
    debug_assert!(g.check_degree_bound(d).is_ok());
    g
}

/// Random simple graph (symmetric unlabeled pairs, no loops), degree bound d.
pub fn random_simple(rng: &mut GenRng, n: usize, d: usize) -> SGraph {
    let mut g = SGraph::new(n, InformationSet::empty());
    if n < 2 {
        return g;
    }
    for _ in 0..2 * n * d.max(1) {
        let u = rng.gen_range(0..n) as VertexId;
        let v = rng.gen_range(0..n) as VertexId;
        if u == v || g.value(u, v).is_present() {
            continue;
        }
        if g.degree(u) + 2 > 2 * d || g.degree(v) + 2 > 2 * d {
            // symmetric pair adds one out and one in at each endpoint
            continue;
        }
        g.set_value(u, v, Value::Present(None));
        g.set_value(v, u, Value::Present(None));
    }
    g
}

/// Random label sequence of the given length.
pub fn random_labels(rng: &mut GenRng, len: usize, syms: &InformationSet) -> Vec<u16> {
    (0..len).map(|_| rng.gen_range(0..syms.len()) as u16).collect()
}

/// Random nonempty proper subset of `0..n` (for partitions).
pub fn random_split(rng: &mut GenRng, n: usize) -> Vec<VertexId> {
    assert!(n >= 2, "need at least two vertices to split");
    loop {
        let picked: Vec<VertexId> =
            (0..n as VertexId).filter(|_| rng.gen_bool(0.5)).collect();
        if !picked.is_empty() && picked.len() < n {
            return picked;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let syms = symbols(2);
        let g1 = random_sgraph(&mut rng_from_seed(11), 8, 3, &syms);
        let g2 = random_sgraph(&mut rng_from_seed(11), 8, 3, &syms);
        assert_eq!(g1, g2);
        assert!(g1.check_degree_bound(3).is_ok());
    }

    #[test]
    fn simple_generator_emits_simple_graphs() {
        let g = random_simple(&mut rng_from_seed(5), 10, 2);
        assert!(g.is_simple());
        assert!(g.check_degree_bound(4).is_ok()); // 2d ordered pairs
    }
}
