//! Randomized invariants: properties that must hold for every graph, not
//! just the curated fixtures.

use std::collections::BTreeSet;

use disc_kit::freq::{cnt_k, freq_k, l1_dist};
use disc_kit::gen;
use disc_kit::io::{GraphFile, PathFile};
use disc_kit::num::{q_int, q_one, q_zero};
use disc_kit::path::SPath;
use disc_kit::sgraph::{SGraph, Value, VertexId};
use disc_kit::transform::{encode, TransformParams};
use disc_kit::{canonical_form, disc_k};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn graph_from(seed: u64, n: usize, d: usize, s: usize) -> SGraph {
    let mut rng = gen::rng_from_seed(seed);
    gen::random_sgraph(&mut rng, n, d, &gen::symbols(s))
}

fn permute(g: &SGraph, perm: &[VertexId]) -> SGraph {
    let edges: Vec<(VertexId, VertexId, Option<disc_kit::sgraph::SymbolId>)> = g
        .edges()
        .into_iter()
        .map(|(u, v, l)| (perm[u as usize], perm[v as usize], l))
        .collect();
    SGraph::from_edges(g.n(), g.symbols().clone(), &edges).unwrap()
}

proptest! {
    #[test]
    fn freq_totals_one_and_cnt_totals_n(
        seed in any::<u64>(),
        n in 1usize..9,
        d in 1usize..4,
        s in 1usize..3,
        k in 0u32..3,
    ) {
        let g = graph_from(seed, n, d, s);
        prop_assert_eq!(freq_k(&g, k).unwrap().total(), q_one());
        prop_assert_eq!(cnt_k(&g, k).total(), q_int(n as i64));
    }

    #[test]
    fn canonical_form_ignores_vertex_order(
        seed in any::<u64>(),
        n in 1usize..9,
        d in 1usize..4,
    ) {
        let g = graph_from(seed, n, d, 2);
        let mut perm: Vec<VertexId> = (0..n as VertexId).collect();
        let mut rng = gen::rng_from_seed(seed.wrapping_add(1));
        perm.shuffle(&mut rng);
        let h = permute(&g, &perm);
        prop_assert_eq!(canonical_form(&g), canonical_form(&h));
    }

    #[test]
    fn l1_dist_is_a_metric(
        sa in any::<u64>(),
        sb in any::<u64>(),
        sc in any::<u64>(),
        k in 0u32..3,
    ) {
        let fa = freq_k(&graph_from(sa, 6, 2, 1), k).unwrap();
        let fb = freq_k(&graph_from(sb, 7, 2, 1), k).unwrap();
        let fc = freq_k(&graph_from(sc, 5, 2, 1), k).unwrap();
        prop_assert_eq!(l1_dist(&fa, &fa), q_zero());
        prop_assert_eq!(l1_dist(&fa, &fb), l1_dist(&fb, &fa));
        prop_assert!(l1_dist(&fa, &fc) <= l1_dist(&fa, &fb) + l1_dist(&fb, &fc));
    }

    #[test]
    fn disc_extraction_is_idempotent(
        seed in any::<u64>(),
        n in 1usize..9,
        d in 1usize..4,
        k in 0u32..3,
    ) {
        let g = graph_from(seed, n, d, 2);
        for v in 0..g.n() as VertexId {
            let disc = disc_k(&g, v, k);
            let again = disc_k(disc.graph(), disc.root(), k);
            prop_assert_eq!(again.fingerprint(), disc.fingerprint());
        }
    }

    #[test]
    fn encode_emits_bounded_degree_simple_graphs(
        seed in any::<u64>(),
        n in 1usize..6,
        d in 1usize..4,
        s in 1usize..3,
    ) {
        let g = graph_from(seed, n, d, s);
        let params = TransformParams::new(d, 1, g.symbols().clone()).unwrap();
        let img = encode(&g, &params).unwrap();
        prop_assert!(img.is_simple());
        for v in 0..img.n() as VertexId {
            prop_assert_eq!(img.value(v, v), Value::Absent);
            prop_assert!(img.neighbors(v).len() <= params.d1);
        }
        // Distinct inputs stay distinct: the encoding is injective on
        // canonical forms.
        let g2 = graph_from(seed.wrapping_add(7), n, d, s);
        if canonical_form(&g) != canonical_form(&g2) {
            let img2 = encode(&g2, &params).unwrap();
            prop_assert!(canonical_form(&img) != canonical_form(&img2));
        }
    }

    #[test]
    fn graph_json_round_trips(
        seed in any::<u64>(),
        n in 1usize..9,
        d in 1usize..4,
        s in 1usize..3,
    ) {
        let g = graph_from(seed, n, d, s);
        let file = GraphFile::from_graph(&g);
        let text = serde_json::to_string(&file).unwrap();
        let back: GraphFile = serde_json::from_str(&text).unwrap();
        let h = back.to_graph().unwrap();
        prop_assert_eq!(h.n(), g.n());
        let he: BTreeSet<_> = h.edges().into_iter().collect();
        let ge: BTreeSet<_> = g.edges().into_iter().collect();
        prop_assert_eq!(he, ge);
    }

    #[test]
    fn path_json_round_trips(
        seed in any::<u64>(),
        len in 1usize..40,
        s in 1usize..4,
    ) {
        let syms = gen::symbols(s);
        let mut rng = gen::rng_from_seed(seed);
        let p = SPath::new(syms.clone(), gen::random_labels(&mut rng, len, &syms)).unwrap();
        let file = PathFile::from_path(&p);
        let text = serde_json::to_string(&file).unwrap();
        let back: PathFile = serde_json::from_str(&text).unwrap();
        let q = back.to_path().unwrap();
        prop_assert_eq!(q.edge_values(), p.edge_values());
    }
}
