//! Exact disc-frequency vectors, disc mappings, and partition statistics.
//!
//! All vectors are sparse maps from canonical fingerprints to exact
//! rationals. `freq` vectors of nonempty graphs sum to exactly 1.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::canon::{rooted_fingerprint, Fingerprint};
use crate::disc::{disc_fingerprints, disc_k, RootedDisc};
use crate::error::{Error, Result};
use crate::num::{q_frac, q_int, q_zero, Q};
use crate::sgraph::{SGraph, SymbolId, VertexId};

/// Sparse vector of exact rationals keyed by fingerprint (or bucket key).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FreqVector {
    entries: BTreeMap<Fingerprint, Q>,
}

impl FreqVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: BTreeMap<Fingerprint, Q>) -> Self {
        let entries = entries.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        FreqVector { entries }
    }

    pub fn get(&self, key: &Fingerprint) -> Q {
        self.entries.get(key).cloned().unwrap_or_else(q_zero)
    }

    pub fn add(&mut self, key: Fingerprint, value: Q) {
        use std::collections::btree_map::Entry;
        match self.entries.entry(key) {
            Entry::Vacant(e) => {
                if !value.is_zero() {
                    e.insert(value);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += value;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Fingerprint, &Q)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Fingerprint> {
        self.entries.keys()
    }

    /// Number of occurring classes.
    pub fn class_count(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> Q {
        self.entries.values().fold(q_zero(), |a, b| a + b)
    }

    /// Multiply every entry by a scalar.
    pub fn scale(&self, by: &Q) -> FreqVector {
        FreqVector::from_entries(
            self.entries.iter().map(|(k, v)| (k.clone(), v * by)).collect(),
        )
    }

    /// Restrict to the given key set.
    pub fn restrict(&self, keys: &BTreeSet<Fingerprint>) -> FreqVector {
        FreqVector::from_entries(
            self.entries
                .iter()
                .filter(|(k, _)| keys.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

/// Exact L1 distance between two sparse vectors.
pub fn l1_dist(a: &FreqVector, b: &FreqVector) -> Q {
    let keys: BTreeSet<&Fingerprint> = a.support().chain(b.support()).collect();
    let mut sum = q_zero();
    for k in keys {
        let d = a.get(k) - b.get(k);
        sum += if d < q_zero() { -d } else { d };
    }
    sum
}

/// Integer counts of k-disc classes over all vertices.
pub fn cnt_k(g: &SGraph, k: u32) -> FreqVector {
    let fps = crate::disc::all_disc_fingerprints(g, k);
    counts_from(fps)
}

/// Frequencies of k-disc classes: `cnt / |V|`. Errors on the empty graph.
pub fn freq_k(g: &SGraph, k: u32) -> Result<FreqVector> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(cnt_k(g, k).scale(&q_frac(1, g.n() as i64)))
}

/// Integer counts of k-disc classes over `w` only; discs are still computed
/// in the full graph `g`.
pub fn cnt_rel(g: &SGraph, w: &[VertexId], k: u32) -> FreqVector {
    counts_from(disc_fingerprints(g, k, w))
}

/// Relative frequencies over `w`: `cnt_rel / |w|`. Errors on empty `w`.
pub fn freq_rel(g: &SGraph, w: &[VertexId], k: u32) -> Result<FreqVector> {
    if w.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    Ok(cnt_rel(g, w, k).scale(&q_frac(1, w.len() as i64)))
}

fn counts_from(fps: Vec<Fingerprint>) -> FreqVector {
    let mut entries: BTreeMap<Fingerprint, Q> = BTreeMap::new();
    for fp in fps {
        *entries.entry(fp).or_insert_with(q_zero) += q_int(1);
    }
    FreqVector::from_entries(entries)
}

/// Isomorphism-invariant mappings from discs to bucket keys. A mapping may
/// be partial; applying it to a disc outside its declared family errors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiscMapping {
    /// Every disc to its own fingerprint.
    Identity,
    /// Every disc to one shared bucket.
    Constant,
    /// Root-forward half of a path window (the "right disc").
    RightDisc,
    /// Concatenation of the window's edge label names into one string.
    KString,
    /// Fingerprint of the underlying (symmetric, unlabeled) rooted disc.
    Underlying,
    /// Deterministic pseudo-random partition of fingerprints into `buckets`
    /// buckets; useful for exercising mapped-vector inequalities.
    SeededPartition { seed: u64, buckets: u32 },
}

impl DiscMapping {
    pub fn name(&self) -> &'static str {
        match self {
            DiscMapping::Identity => "identity",
            DiscMapping::Constant => "constant",
            DiscMapping::RightDisc => "right-disc",
            DiscMapping::KString => "k-string",
            DiscMapping::Underlying => "underlying",
            DiscMapping::SeededPartition { .. } => "seeded-partition",
        }
    }

    /// Bucket key for a disc.
    pub fn apply(&self, disc: &RootedDisc) -> Result<Fingerprint> {
        match self {
            DiscMapping::Identity => Ok(disc.fingerprint().clone()),
            DiscMapping::Constant => Ok(Fingerprint::from_bytes(b"MB1:const".to_vec())),
            DiscMapping::RightDisc => {
                let chain = forward_chain(disc)?;
                let fp = rooted_fingerprint(&disc.graph().induced(&chain), 0);
                let mut bytes = b"MB1:right:".to_vec();
                bytes.extend_from_slice(fp.as_bytes());
                Ok(Fingerprint::from_bytes(bytes))
            }
            DiscMapping::KString => {
                let s = k_string(disc)?;
                let mut bytes = b"MB1:kstring:".to_vec();
                bytes.extend_from_slice(s.as_bytes());
                Ok(Fingerprint::from_bytes(bytes))
            }
            DiscMapping::Underlying => {
                let u = disc.graph().underlying();
                let fp = rooted_fingerprint(&u, 0);
                let mut bytes = b"MB1:und:".to_vec();
                bytes.extend_from_slice(fp.as_bytes());
                Ok(Fingerprint::from_bytes(bytes))
            }
            DiscMapping::SeededPartition { seed, buckets } => {
                if *buckets == 0 {
                    return Err(Error::BadParameter("seeded partition needs buckets > 0".into()));
                }
                // FNV-1a over the fingerprint bytes, mixed with the seed.
                let mut h = 0xcbf29ce484222325u64 ^ seed.wrapping_mul(0x9e3779b97f4a7c15);
                for &b in disc.fingerprint().as_bytes() {
                    h ^= b as u64;
                    h = h.wrapping_mul(0x100000001b3);
                }
                let bucket = h % (*buckets as u64);
                Ok(Fingerprint::from_bytes(format!("MB1:part:{bucket}").into_bytes()))
            }
        }
    }
}

/// Root-forward chain of a path-window disc: the root plus up to `radius`
/// successive out-neighbors. Errors if any vertex on the chain has more than
/// one outgoing edge inside the disc, or if the walk revisits a vertex.
fn forward_chain(disc: &RootedDisc) -> Result<Vec<VertexId>> {
    let g = disc.graph();
    let mut chain = vec![0u32];
    let mut seen = BTreeSet::from([0u32]);
    let mut cur = 0u32;
    for _ in 0..disc.radius() {
        let outs = g.out_edges(cur);
        match outs.len() {
            0 => break,
            1 => {
                let (next, _) = outs[0];
                if !seen.insert(next) {
                    return Err(Error::MappingUndefined {
                        mapping: "right-disc".into(),
                        reason: "forward walk revisits a vertex".into(),
                    });
                }
                chain.push(next);
                cur = next;
            }
            _ => {
                return Err(Error::MappingUndefined {
                    mapping: "right-disc".into(),
                    reason: "vertex with out-degree above one".into(),
                })
            }
        }
    }
    Ok(chain)
}

/// Concatenate the edge label names of a path-window disc, left to right.
fn k_string(disc: &RootedDisc) -> Result<String> {
    let g = disc.graph();
    let n = g.n();
    let undefined = |reason: &str| Error::MappingUndefined {
        mapping: "k-string".into(),
        reason: reason.into(),
    };
    // The disc must be a directed path: every vertex has at most one
    // outgoing and one incoming edge, no loops, and a unique start.
    let mut start = None;
    for v in 0..n as VertexId {
        if g.has_loop(v) {
            return Err(undefined("disc contains a loop"));
        }
        if g.out_edges(v).len() > 1 || g.in_edges(v).len() > 1 {
            return Err(undefined("disc is not a directed path window"));
        }
        if g.in_edges(v).is_empty() {
            if start.replace(v).is_some() {
                return Err(undefined("disc is disconnected or branches"));
            }
        }
    }
    let mut cur = start.ok_or_else(|| undefined("disc has no path start"))?;
    let mut labels = Vec::new();
    let mut visited = 1usize;
    while let Some(&(next, l)) = g.out_edges(cur).first() {
        let sym = l.ok_or_else(|| undefined("unlabeled edge in window"))?;
        labels.push(g.symbols().name(sym).to_string());
        cur = next;
        visited += 1;
        if visited > n {
            return Err(undefined("walk exceeds disc size"));
        }
    }
    if visited != n {
        return Err(undefined("disc is not a single path"));
    }
    Ok(labels.concat())
}

/// Push a frequency vector through a mapping: bucket frequencies are sums of
/// class frequencies. Errors if the mapping is undefined on an occurring disc.
pub fn map_freq(g: &SGraph, k: u32, mapping: &DiscMapping) -> Result<FreqVector> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    // Map one representative disc per class; equal fingerprints map equally.
    let mut reps: BTreeMap<Fingerprint, Fingerprint> = BTreeMap::new();
    let mut entries: BTreeMap<Fingerprint, Q> = BTreeMap::new();
    for v in 0..g.n() as VertexId {
        let disc = disc_k(g, v, k);
        let bucket = match reps.get(disc.fingerprint()) {
            Some(b) => b.clone(),
            None => {
                let b = mapping.apply(&disc)?;
                reps.insert(disc.fingerprint().clone(), b.clone());
                b
            }
        };
        *entries.entry(bucket).or_insert_with(q_zero) += q_frac(1, g.n() as i64);
    }
    Ok(FreqVector::from_entries(entries))
}

/// Validate that `(v1, v2)` partitions the vertex set of `g`.
pub fn check_partition(g: &SGraph, v1: &BTreeSet<VertexId>, v2: &BTreeSet<VertexId>) -> Result<()> {
    if v1.len() + v2.len() != g.n()
        || v1.intersection(v2).next().is_some()
        || v1.iter().chain(v2.iter()).any(|&v| v as usize >= g.n())
    {
        return Err(Error::NotAPartition);
    }
    Ok(())
}

/// Number of present ordered pairs from `x` into `y`.
pub fn e_count(g: &SGraph, x: &BTreeSet<VertexId>, y: &BTreeSet<VertexId>) -> u64 {
    let mut count = 0u64;
    for &u in x {
        for &(w, _) in g.out_edges(u) {
            if y.contains(&w) {
                count += 1;
            }
        }
    }
    count
}

/// Ordered pairs crossing the partition in either direction.
pub fn cut(g: &SGraph, v1: &BTreeSet<VertexId>, v2: &BTreeSet<VertexId>) -> Result<u64> {
    check_partition(g, v1, v2)?;
    Ok(e_count(g, v1, v2) + e_count(g, v2, v1))
}

/// Largest per-class gap between the relative k-disc frequencies of the two
/// sides: `max_Gamma |freq_k(v1|g) - freq_k(v2|g)|`. Both sides must be
/// nonempty.
pub fn alpha(
    g: &SGraph,
    v1: &BTreeSet<VertexId>,
    v2: &BTreeSet<VertexId>,
    k: u32,
) -> Result<Q> {
    check_partition(g, v1, v2)?;
    let w1: Vec<VertexId> = v1.iter().copied().collect();
    let w2: Vec<VertexId> = v2.iter().copied().collect();
    let f1 = freq_rel(g, &w1, k)?;
    let f2 = freq_rel(g, &w2, k)?;
    let keys: BTreeSet<&Fingerprint> = f1.support().chain(f2.support()).collect();
    let mut best = q_zero();
    for key in keys {
        let d = f1.get(key) - f2.get(key);
        let d = if d < q_zero() { -d } else { d };
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// Count 2k-vertex directed windows `p_1 .. p_2k` whose middle edge
/// `(p_k, p_{k+1})` carries symbol `s`, has `p_k` in `x` and `p_{k+1}` in
/// `y`, and whose halves spell the label sequences `p1` and `p2` (each of
/// length `k - 1`). The graph must be a disjoint union of S-paths and
/// S-cycles (in/out degrees at most one).
pub fn e_s(
    g: &SGraph,
    k: u32,
    s: SymbolId,
    p1: &[SymbolId],
    p2: &[SymbolId],
    x: &BTreeSet<VertexId>,
    y: &BTreeSet<VertexId>,
) -> Result<u64> {
    if k == 0 {
        return Err(Error::BadParameter("e_s needs k >= 1".into()));
    }
    if p1.len() != k as usize - 1 || p2.len() != k as usize - 1 {
        return Err(Error::BadParameter(format!(
            "half windows must have {} labels each",
            k - 1
        )));
    }
    for v in 0..g.n() as VertexId {
        if g.out_edges(v).len() > 1 || g.in_edges(v).len() > 1 {
            return Err(Error::Invalid(
                "e_s expects a disjoint union of S-paths and S-cycles".into(),
            ));
        }
    }
    let mut count = 0u64;
    for (u, v, l) in g.edges() {
        if l != Some(s) || !x.contains(&u) || !y.contains(&v) {
            continue;
        }
        if let Some(window) = window_of(g, u, v, k) {
            let (back, fwd) = window;
            if back == p1 && fwd == p2 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Label sequences of the k-1 edges behind `u` and ahead of `v`, provided the
/// full 2k-vertex window exists with distinct vertices.
fn window_of(g: &SGraph, u: VertexId, v: VertexId, k: u32) -> Option<(Vec<SymbolId>, Vec<SymbolId>)> {
    let mut verts = vec![u, v];
    let mut back = Vec::new();
    let mut cur = u;
    for _ in 0..k - 1 {
        let &(prev, l) = g.in_edges(cur).first()?;
        back.push(l?);
        verts.push(prev);
        cur = prev;
    }
    back.reverse();
    let mut fwd = Vec::new();
    let mut cur = v;
    for _ in 0..k - 1 {
        let &(next, l) = g.out_edges(cur).first()?;
        fwd.push(l?);
        verts.push(next);
        cur = next;
    }
    verts.sort_unstable();
    verts.dedup();
    (verts.len() == 2 * k as usize).then_some((back, fwd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::format_q;
    use crate::sgraph::{InformationSet, Label};

    fn spath_unsym(n: usize) -> SGraph {
        let s = InformationSet::of(&["a"]);
        let edges: Vec<(VertexId, VertexId, Label)> =
            (0..n as u32 - 1).map(|i| (i, i + 1, Some(0))).collect();
        SGraph::from_edges(n, s, &edges).unwrap()
    }

    #[test]
    fn freq_of_ten_path_matches_hand_count() {
        let g = spath_unsym(10);
        let f = freq_k(&g, 1).unwrap();
        assert_eq!(f.class_count(), 3); // start, interior, end
        let mut vals: Vec<String> = f.iter().map(|(_, q)| format_q(q)).collect();
        vals.sort();
        assert_eq!(vals, vec!["1/10", "1/10", "4/5"]);
        assert_eq!(f.total(), crate::num::q_one());
    }

    #[test]
    fn l1_between_paths_of_different_length() {
        // Two directed a-paths: the boundary classes trade frequency mass.
        let a = freq_k(&spath_unsym(20), 1).unwrap();
        let b = freq_k(&spath_unsym(10), 1).unwrap();
        // 4k |1/10 - 1/20| with k = 1.
        assert_eq!(l1_dist(&a, &b), q_frac(4, 1) * q_frac(1, 20));
        assert_eq!(l1_dist(&a, &a), q_zero());
        assert_eq!(l1_dist(&a, &b), l1_dist(&b, &a));
    }

    #[test]
    fn relative_vectors_split_total() {
        let g = spath_unsym(6);
        let w1: Vec<VertexId> = vec![0, 1, 2];
        let w2: Vec<VertexId> = vec![3, 4, 5];
        let c1 = cnt_rel(&g, &w1, 1);
        let c2 = cnt_rel(&g, &w2, 1);
        let whole = cnt_k(&g, 1);
        let mut sum = c1.clone();
        for (k2, v) in c2.iter() {
            sum.add(k2.clone(), v.clone());
        }
        assert_eq!(sum, whole);
        assert_eq!(freq_rel(&g, &w1, 1).unwrap().total(), crate::num::q_one());
    }

    #[test]
    fn mapped_distance_never_exceeds_raw() {
        let g = spath_unsym(12);
        let h = spath_unsym(7);
        let raw = l1_dist(&freq_k(&g, 1).unwrap(), &freq_k(&h, 1).unwrap());
        for mapping in [
            DiscMapping::Identity,
            DiscMapping::Constant,
            DiscMapping::Underlying,
            DiscMapping::SeededPartition { seed: 3, buckets: 2 },
        ] {
            let mg = map_freq(&g, 1, &mapping).unwrap();
            let mh = map_freq(&h, 1, &mapping).unwrap();
            assert!(l1_dist(&mg, &mh) <= raw, "mapping {} contracted", mapping.name());
        }
        let idg = map_freq(&g, 1, &DiscMapping::Identity).unwrap();
        assert_eq!(idg, freq_k(&g, 1).unwrap());
    }

    #[test]
    fn k_string_concatenates_window_labels() {
        // Six edges labeled a, ab, b, aa, bb, aba; the 3-disc of the middle
        // vertex spells the concatenation of all six.
        let s = InformationSet::of(&["a", "ab", "b", "aa", "bb", "aba"]);
        let edges: Vec<(VertexId, VertexId, Label)> =
            (0..6).map(|i| (i as u32, i as u32 + 1, Some(i as u16))).collect();
        let g = SGraph::from_edges(7, s, &edges).unwrap();
        let d = disc_k(&g, 3, 3);
        let key = DiscMapping::KString.apply(&d).unwrap();
        assert_eq!(key.as_bytes(), b"MB1:kstring:aabbaabbaba");
    }

    #[test]
    fn right_disc_distinguishes_forward_half_only() {
        let s = InformationSet::of(&["a", "b"]);
        // Paths x -> v -> y with different back labels, same forward labels.
        let g1 = SGraph::from_edges(3, s.clone(), &[(0, 1, Some(0)), (1, 2, Some(0))]).unwrap();
        let g2 = SGraph::from_edges(3, s, &[(0, 1, Some(1)), (1, 2, Some(0))]).unwrap();
        let d1 = disc_k(&g1, 1, 1);
        let d2 = disc_k(&g2, 1, 1);
        assert_ne!(d1.fingerprint(), d2.fingerprint());
        assert_eq!(
            DiscMapping::RightDisc.apply(&d1).unwrap(),
            DiscMapping::RightDisc.apply(&d2).unwrap()
        );
    }

    #[test]
    fn cut_and_alpha_on_a_cycle() {
        let s = InformationSet::of(&["a"]);
        let n = 8u32;
        let edges: Vec<(VertexId, VertexId, Label)> =
            (0..n).map(|i| (i, (i + 1) % n, Some(0))).collect();
        let g = SGraph::from_edges(n as usize, s, &edges).unwrap();
        let v1: BTreeSet<VertexId> = (0..4).collect();
        let v2: BTreeSet<VertexId> = (4..8).collect();
        assert_eq!(cut(&g, &v1, &v2).unwrap(), 2);
        assert_eq!(e_count(&g, &v1, &v2), 1);
        // Homogeneous cycle: every disc is the same class, alpha = 0.
        assert_eq!(alpha(&g, &v1, &v2, 1).unwrap(), q_zero());
    }

    #[test]
    fn e_s_counts_middle_edges() {
        let s = InformationSet::of(&["a", "b"]);
        // Cycle of length 6 with labels a b a b a b.
        let edges: Vec<(VertexId, VertexId, Label)> =
            (0..6u32).map(|i| (i, (i + 1) % 6, Some((i % 2) as u16))).collect();
        let g = SGraph::from_edges(6, s, &edges).unwrap();
        let all: BTreeSet<VertexId> = (0..6).collect();
        // k = 2: windows have 4 vertices; halves carry one label each.
        // Middle edge labeled a is preceded by b and followed by b.
        let hits = e_s(&g, 2, 0, &[1], &[1], &all, &all).unwrap();
        assert_eq!(hits, 3);
        let none = e_s(&g, 2, 0, &[0], &[1], &all, &all).unwrap();
        assert_eq!(none, 0);
    }
}
