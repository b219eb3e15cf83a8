//! Canonical fingerprints of rooted and unrooted S-graphs.
//!
//! Two rooted graphs receive equal fingerprints exactly when a root-preserving
//! isomorphism between them preserves every ordered-pair value. The engine is
//! a small individualization–refinement search: vertices are partitioned by
//! invariants (distance from root, degrees, loop value, then iterated
//! neighborhood colors), ties are broken by branching over a cell, and the
//! lexicographically least adjacency encoding over all discrete leaves wins.
//!
//! Fingerprints are versioned byte strings. They embed the symbol *names*
//! occurring in the graph (sorted), so graphs over differently ordered
//! information sets compare correctly; the version prefix makes accidental
//! comparison with other encodings fail loudly. The format is internal to
//! this crate and not a cross-release stability promise.

use std::collections::BTreeSet;
use std::fmt;

use crate::sgraph::{Label, SGraph, VertexId};

/// Versioned canonical byte string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint(Vec<u8>);

impl Fingerprint {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Fingerprint(bytes)
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        if s.len() % 2 != 0 {
            return None;
        }
        let mut out = Vec::with_capacity(s.len() / 2);
        let bytes = s.as_bytes();
        for i in (0..s.len()).step_by(2) {
            let hi = (bytes[i] as char).to_digit(16)?;
            let lo = (bytes[i + 1] as char).to_digit(16)?;
            out.push((hi * 16 + lo) as u8);
        }
        Some(Fingerprint(out))
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({})", self.to_hex())
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

fn push_varint(out: &mut Vec<u8>, mut x: u64) {
    loop {
        let b = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            out.push(b);
            break;
        }
        out.push(b | 0x80);
    }
}

const ROOTED_TAG: &[u8] = b"SD1";
const GRAPH_TAG: &[u8] = b"SG1";

/// Canonical fingerprint of `g` rooted at `root`.
pub fn rooted_fingerprint(g: &SGraph, root: VertexId) -> Fingerprint {
    assert!((root as usize) < g.n(), "root out of range");
    Fingerprint(Canonizer::new(g, root).run())
}

/// Canonical fingerprint of an unrooted (possibly disconnected) graph:
/// the sorted multiset of per-component fingerprints, where each component
/// is fingerprinted from its best root.
pub fn canonical_form(g: &SGraph) -> Fingerprint {
    let mut parts: Vec<Vec<u8>> = Vec::new();
    for comp in g.components() {
        let h = g.induced(&comp);
        let best = (0..h.n() as VertexId)
            .map(|r| Canonizer::new(&h, r).run())
            .min()
            .expect("component is nonempty");
        parts.push(best);
    }
    parts.sort();
    let mut out = Vec::new();
    out.extend_from_slice(GRAPH_TAG);
    push_varint(&mut out, parts.len() as u64);
    for p in parts {
        push_varint(&mut out, p.len() as u64);
        out.extend_from_slice(&p);
    }
    Fingerprint(out)
}

/// Local label codes: 0 is the unlabeled edge, then occurring symbol names in
/// sorted order. Fingerprints embed the name table, so equality is invariant
/// under reordering of the ambient information set.
struct LabelTable {
    names: Vec<String>,
    code_of_symbol: Vec<u16>, // indexed by SymbolId + 1 offsets handled below
}

impl LabelTable {
    fn build(g: &SGraph) -> Self {
        let mut used: BTreeSet<&str> = BTreeSet::new();
        for (_, _, l) in g.edges() {
            if let Some(s) = l {
                used.insert(g.symbols().name(s));
            }
        }
        let names: Vec<String> = used.into_iter().map(|s| s.to_string()).collect();
        let mut code_of_symbol = vec![u16::MAX; g.symbols().len()];
        for (i, n) in names.iter().enumerate() {
            let sym = g.symbols().id_of(n).expect("name came from the set");
            code_of_symbol[sym as usize] = (i + 1) as u16;
        }
        LabelTable { names, code_of_symbol }
    }

    fn code(&self, l: Label) -> u16 {
        match l {
            None => 0,
            Some(s) => self.code_of_symbol[s as usize],
        }
    }
}

struct Canonizer<'a> {
    g: &'a SGraph,
    n: usize,
    labels: LabelTable,
    /// Packed out-edges `(code, target)` and in-edges `(code, source)`.
    out_packed: Vec<Vec<(u16, u32)>>,
    in_packed: Vec<Vec<(u16, u32)>>,
    init: Vec<[u64; 4]>,
    best: Option<Vec<u8>>,
}

const SEP: u64 = u64::MAX;

impl<'a> Canonizer<'a> {
    fn new(g: &'a SGraph, root: VertexId) -> Self {
        let n = g.n();
        let labels = LabelTable::build(g);
        let dist = g.distances_from(root, None);
        let mut out_packed = Vec::with_capacity(n);
        let mut in_packed = Vec::with_capacity(n);
        let mut init = Vec::with_capacity(n);
        for v in 0..n as VertexId {
            let op: Vec<(u16, u32)> = g
                .out_edges(v)
                .iter()
                .filter(|&&(w, _)| w != v)
                .map(|&(w, l)| (labels.code(l), w))
                .collect();
            let ip: Vec<(u16, u32)> = g
                .in_edges(v)
                .iter()
                .filter(|&&(w, _)| w != v)
                .map(|&(w, l)| (labels.code(l), w))
                .collect();
            let loop_code = match g.value(v, v) {
                crate::sgraph::Value::Absent => 0u64,
                crate::sgraph::Value::Present(l) => 1 + labels.code(l) as u64,
            };
            init.push([
                dist[v as usize] as u64,
                g.out_edges(v).len() as u64,
                g.in_edges(v).len() as u64,
                loop_code,
            ]);
            out_packed.push(op);
            in_packed.push(ip);
        }
        Canonizer { g, n, labels, out_packed, in_packed, init, best: None }
    }

    fn run(mut self) -> Vec<u8> {
        let keys: Vec<Vec<u64>> = self.init.iter().map(|k| k.to_vec()).collect();
        let colors = rank(&keys);
        self.search(colors);
        self.best.expect("at least one leaf")
    }

    /// Refine to a fixpoint: split cells by the multiset of
    /// (direction, label, neighbor color) around each vertex.
    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let mut classes = colors.iter().collect::<BTreeSet<_>>().len();
        loop {
            let mut keys: Vec<Vec<u64>> = Vec::with_capacity(self.n);
            for v in 0..self.n {
                let mut key = Vec::with_capacity(4 + self.out_packed[v].len() + self.in_packed[v].len());
                key.push(colors[v] as u64);
                key.push(SEP - 1); // spacer distinct from packed entries
                let mut outs: Vec<u64> = self.out_packed[v]
                    .iter()
                    .map(|&(c, w)| pack(0, c, colors[w as usize]))
                    .collect();
                outs.sort_unstable();
                key.extend_from_slice(&outs);
                key.push(SEP);
                let mut ins: Vec<u64> = self.in_packed[v]
                    .iter()
                    .map(|&(c, w)| pack(1, c, colors[w as usize]))
                    .collect();
                ins.sort_unstable();
                key.extend_from_slice(&ins);
                keys.push(key);
            }
            let next = rank(&keys);
            let next_classes = next.iter().collect::<BTreeSet<_>>().len();
            if next_classes == classes {
                return next;
            }
            classes = next_classes;
            colors = next;
        }
    }

    fn search(&mut self, colors: Vec<u32>) {
        let colors = self.refine(colors);
        // Find the first cell (smallest color) with more than one member.
        let mut cell_count = vec![0u32; self.n];
        for &c in &colors {
            cell_count[c as usize] += 1;
        }
        let target = (0..self.n).find(|&c| cell_count[c] > 1);
        match target {
            None => {
                let enc = self.encode(&colors);
                if self.best.as_ref().map_or(true, |b| enc < *b) {
                    self.best = Some(enc);
                }
            }
            Some(cell) => {
                let members: Vec<usize> =
                    (0..self.n).filter(|&v| colors[v] as usize == cell).collect();
                for &v in &members {
                    let mut keys: Vec<Vec<u64>> = Vec::with_capacity(self.n);
                    for u in 0..self.n {
                        let tie = u64::from(u != v);
                        keys.push(vec![colors[u] as u64, if colors[u] as usize == cell { tie } else { 0 }]);
                    }
                    self.search(rank(&keys));
                }
            }
        }
    }

    /// Byte encoding of the graph under a discrete coloring.
    fn encode(&self, colors: &[u32]) -> Vec<u8> {
        let mut triples: Vec<(u32, u32, u16)> = Vec::with_capacity(self.g.edge_count());
        for v in 0..self.n as VertexId {
            for &(w, l) in self.g.out_edges(v) {
                triples.push((colors[v as usize], colors[w as usize], self.labels.code(l) + 1));
            }
        }
        triples.sort_unstable();
        let mut out = Vec::new();
        out.extend_from_slice(ROOTED_TAG);
        push_varint(&mut out, self.n as u64);
        push_varint(&mut out, self.labels.names.len() as u64);
        for name in &self.labels.names {
            push_varint(&mut out, name.len() as u64);
            out.extend_from_slice(name.as_bytes());
        }
        push_varint(&mut out, triples.len() as u64);
        for (i, j, c) in triples {
            push_varint(&mut out, i as u64);
            push_varint(&mut out, j as u64);
            push_varint(&mut out, c as u64);
        }
        out
    }
}

fn pack(dir: u64, code: u16, color: u32) -> u64 {
    (dir << 56) | ((code as u64) << 40) | color as u64
}

/// Rank vertices by key: equal keys share a rank, ranks follow sorted key
/// order. Depends only on key values, never on vertex ids.
fn rank(keys: &[Vec<u64>]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut colors = vec![0u32; keys.len()];
    let mut next = 0u32;
    for i in 0..order.len() {
        if i > 0 && keys[order[i]] != keys[order[i - 1]] {
            next += 1;
        }
        colors[order[i]] = next;
    }
    colors
}

/// Exhaustive root-preserving isomorphism test for small graphs (test oracle;
/// do not call on graphs with more than ~10 vertices).
#[doc(hidden)]
pub fn rooted_isomorphic_brute(a: &SGraph, ra: VertexId, b: &SGraph, rb: VertexId) -> bool {
    if a.n() != b.n() {
        return false;
    }
    let n = a.n();
    assert!(n <= 10, "brute-force isomorphism is for tiny graphs only");
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; n];
    map[ra as usize] = rb;
    fn value_name(g: &SGraph, u: VertexId, v: VertexId) -> Option<Option<String>> {
        match g.value(u, v) {
            crate::sgraph::Value::Absent => None,
            crate::sgraph::Value::Present(l) => Some(l.map(|s| g.symbols().name(s).to_string())),
        }
    }
    fn consistent(a: &SGraph, b: &SGraph, map: &[u32], v: usize) -> bool {
        // Check all pairs between v and previously mapped vertices (and v itself).
        for u in 0..map.len() {
            if map[u] == u32::MAX {
                continue;
            }
            for (x, y) in [(u, v), (v, u)] {
                if value_name(a, x as u32, y as u32)
                    != value_name(b, map[x], map[y])
                {
                    return false;
                }
            }
        }
        true
    }
    fn go(a: &SGraph, b: &SGraph, map: &mut Vec<u32>, used: &mut Vec<bool>) -> bool {
        let v = match map.iter().position(|&m| m == u32::MAX) {
            None => return true,
            Some(v) => v,
        };
        for w in 0..b.n() as u32 {
            if used[w as usize] {
                continue;
            }
            map[v] = w;
            used[w as usize] = true;
            if consistent(a, b, map, v) && go(a, b, map, used) {
                return true;
            }
            map[v] = u32::MAX;
            used[w as usize] = false;
        }
        false
    }
    // Root mapping must itself be consistent (loops at the root).
    used[rb as usize] = true;
    if !consistent(a, b, &map, ra as usize) {
        return false;
    }
    go(a, b, &mut map, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sgraph::{InformationSet, SGraph};

    fn relabel(g: &SGraph, perm: &[u32]) -> SGraph {
        // perm[v] = new id of v
        let mut h = SGraph::with_shared_symbols(g.n(), g.shared_symbols());
        for (u, v, l) in g.edges() {
            h.set_value(perm[u as usize], perm[v as usize], crate::sgraph::Value::Present(l));
        }
        h
    }

    #[test]
    fn fingerprint_invariant_under_relabeling() {
        let s = InformationSet::of(&["a", "b"]);
        let g = SGraph::from_edges(
            4,
            s,
            &[(0, 1, Some(0)), (1, 2, Some(1)), (2, 0, Some(0)), (3, 3, Some(1)), (2, 3, Some(0))],
        )
        .unwrap();
        let base = rooted_fingerprint(&g, 0);
        // All permutations of the other three vertices.
        let perms = [
            [0u32, 1, 2, 3],
            [0, 1, 3, 2],
            [0, 2, 1, 3],
            [0, 2, 3, 1],
            [0, 3, 1, 2],
            [0, 3, 2, 1],
        ];
        for p in perms {
            let h = relabel(&g, &p);
            assert_eq!(rooted_fingerprint(&h, 0), base);
        }
    }

    #[test]
    fn fingerprint_separates_direction_and_labels() {
        let s = InformationSet::of(&["a", "b"]);
        let fwd = SGraph::from_edges(2, s.clone(), &[(0, 1, Some(0))]).unwrap();
        let bwd = SGraph::from_edges(2, s.clone(), &[(1, 0, Some(0))]).unwrap();
        let other = SGraph::from_edges(2, s, &[(0, 1, Some(1))]).unwrap();
        assert_ne!(rooted_fingerprint(&fwd, 0), rooted_fingerprint(&bwd, 0));
        assert_ne!(rooted_fingerprint(&fwd, 0), rooted_fingerprint(&other, 0));
        // Rooting the forward edge at its head equals rooting the backward
        // edge at its tail.
        assert_eq!(rooted_fingerprint(&fwd, 0), rooted_fingerprint(&bwd, 1));
    }

    #[test]
    fn symbol_order_does_not_matter_but_names_do() {
        let ab = InformationSet::of(&["a", "b"]);
        let ba = InformationSet::of(&["b", "a"]);
        let g1 = SGraph::from_edges(2, ab, &[(0, 1, Some(0))]).unwrap(); // label "a"
        let g2 = SGraph::from_edges(2, ba, &[(0, 1, Some(1))]).unwrap(); // label "a"
        let g3 = SGraph::from_edges(2, InformationSet::of(&["b"]), &[(0, 1, Some(0))]).unwrap();
        assert_eq!(rooted_fingerprint(&g1, 0), rooted_fingerprint(&g2, 0));
        assert_ne!(rooted_fingerprint(&g1, 0), rooted_fingerprint(&g3, 0));
    }

    #[test]
    fn unlabeled_differs_from_any_symbol() {
        let s = InformationSet::of(&["a"]);
        let lab = SGraph::from_edges(2, s.clone(), &[(0, 1, Some(0))]).unwrap();
        let unlab = SGraph::from_edges(2, s, &[(0, 1, None)]).unwrap();
        assert_ne!(rooted_fingerprint(&lab, 0), rooted_fingerprint(&unlab, 0));
    }

    #[test]
    fn unrooted_form_ignores_component_order() {
        let s = InformationSet::of(&["a"]);
        let g1 = SGraph::from_edges(3, s.clone(), &[(0, 1, Some(0))]).unwrap(); // edge + isolated 2
        let g2 = SGraph::from_edges(3, s, &[(1, 2, Some(0))]).unwrap(); // isolated 0 + edge
        assert_eq!(canonical_form(&g1), canonical_form(&g2));
    }

    #[test]
    fn fingerprint_matches_brute_force_on_random_pairs() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        let s = InformationSet::of(&["a", "b"]);
        let mut graphs = Vec::new();
        for _ in 0..40 {
            let n = rng.gen_range(1..=5usize);
            let mut g = SGraph::new(n, s.clone());
            for _ in 0..rng.gen_range(0..=7) {
                let u = rng.gen_range(0..n) as u32;
                let v = rng.gen_range(0..n) as u32;
                let l = if rng.gen_bool(0.2) { None } else { Some(rng.gen_range(0..2u16)) };
                g.set_value(u, v, crate::sgraph::Value::Present(l));
            }
            graphs.push(g);
        }
        for i in 0..graphs.len() {
            for j in i..graphs.len() {
                let (a, b) = (&graphs[i], &graphs[j]);
                let brute = rooted_isomorphic_brute(a, 0, b, 0);
                let fp = rooted_fingerprint(a, 0) == rooted_fingerprint(b, 0);
                assert_eq!(brute, fp, "mismatch between oracle and fingerprints");
            }
        }
    }
}
