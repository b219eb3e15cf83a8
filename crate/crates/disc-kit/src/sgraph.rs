//! Edge-labeled directed graphs with loops ("S-graphs").
//!
//! A graph over an information set `S` assigns to every ordered vertex pair
//! `(u, v)` either *absent* or a present edge carrying an optional symbol of
//! `S`. Unlabeled present edges (label `None`) model plain simple graphs;
//! symmetric unlabeled pairs without loops are exactly the simple graphs.
//!
//! The *degree* of a vertex is the number of ordered pairs with a present
//! value that involve it, where a loop counts twice. Distances are measured
//! in the underlying undirected sense: `u` and `v` are adjacent if either
//! ordered pair carries a present value.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type SymbolId = u16;

/// Label of a present edge; `None` is an unlabeled edge.
pub type Label = Option<SymbolId>;

/// Value of an ordered pair: absent, or a present edge with a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Absent,
    Present(Label),
}

impl Value {
    pub fn is_present(&self) -> bool {
        matches!(self, Value::Present(_))
    }
}

/// Ordered set of distinct symbol names.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InformationSet {
    symbols: Vec<String>,
}

impl InformationSet {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if !seen.insert(s.clone()) {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Self { symbols })
    }

    pub fn empty() -> Self {
        Self { symbols: Vec::new() }
    }

    /// Convenience constructor from string literals.
    pub fn of(names: &[&str]) -> Self {
        Self::new(names.iter().map(|s| s.to_string()).collect()).expect("distinct symbols")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id as usize]
    }

    pub fn id_of(&self, name: &str) -> Option<SymbolId> {
        self.symbols.iter().position(|s| s == name).map(|i| i as SymbolId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &str)> {
        self.symbols.iter().enumerate().map(|(i, s)| (i as SymbolId, s.as_str()))
    }

    pub fn names(&self) -> &[String] {
        &self.symbols
    }
}

/// Finite S-graph with vertices `0..n`.
///
/// Adjacency is stored twice (outgoing and incoming, both sorted), so a loop
/// appears in both lists of its vertex and the degree convention falls out of
/// `out.len() + inc.len()`.
#[derive(Clone, Debug)]
pub struct SGraph {
    symbols: Arc<InformationSet>,
    out: Vec<Vec<(VertexId, Label)>>,
    inc: Vec<Vec<(VertexId, Label)>>,
}

impl PartialEq for SGraph {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols && self.out == other.out
    }
}
impl Eq for SGraph {}

impl SGraph {
    pub fn new(n: usize, symbols: InformationSet) -> Self {
        Self {
            symbols: Arc::new(symbols),
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
        }
    }

    pub fn with_shared_symbols(n: usize, symbols: Arc<InformationSet>) -> Self {
        Self {
            symbols,
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
        }
    }

    /// Build from a list of present ordered pairs.
    pub fn from_edges(
        n: usize,
        symbols: InformationSet,
        edges: &[(VertexId, VertexId, Label)],
    ) -> Result<Self> {
        let mut g = Self::new(n, symbols);
        for &(u, v, l) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if let Some(s) = l {
                if (s as usize) >= g.symbols.len() {
                    return Err(Error::UnknownSymbol(format!("#{s}")));
                }
            }
            g.set_value(u, v, Value::Present(l));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn symbols(&self) -> &InformationSet {
        &self.symbols
    }

    pub fn shared_symbols(&self) -> Arc<InformationSet> {
        Arc::clone(&self.symbols)
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v, self.n()))
        }
    }

    /// Value of the ordered pair `(u, v)`.
    pub fn value(&self, u: VertexId, v: VertexId) -> Value {
        match self.out[u as usize].binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => Value::Present(self.out[u as usize][i].1),
            Err(_) => Value::Absent,
        }
    }

    /// Overwrite the value of the ordered pair `(u, v)`.
    pub fn set_value(&mut self, u: VertexId, v: VertexId, val: Value) {
        let ou = &mut self.out[u as usize];
        match (ou.binary_search_by_key(&v, |&(w, _)| w), val) {
            (Ok(i), Value::Present(l)) => ou[i].1 = l,
            (Ok(i), Value::Absent) => {
                ou.remove(i);
            }
            (Err(i), Value::Present(l)) => ou.insert(i, (v, l)),
            (Err(_), Value::Absent) => {}
        }
        let iv = &mut self.inc[v as usize];
        match (iv.binary_search_by_key(&u, |&(w, _)| w), val) {
            (Ok(i), Value::Present(l)) => iv[i].1 = l,
            (Ok(i), Value::Absent) => {
                iv.remove(i);
            }
            (Err(i), Value::Present(l)) => iv.insert(i, (u, l)),
            (Err(_), Value::Absent) => {}
        }
    }

    /// Outgoing present pairs `(target, label)`, sorted by target.
    pub fn out_edges(&self, v: VertexId) -> &[(VertexId, Label)] {
        &self.out[v as usize]
    }

    /// Incoming present pairs `(source, label)`, sorted by source.
    pub fn in_edges(&self, v: VertexId) -> &[(VertexId, Label)] {
        &self.inc[v as usize]
    }

    /// All present ordered pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, Label)> {
        let mut es = Vec::new();
        for u in 0..self.n() as VertexId {
            for &(v, l) in self.out_edges(u) {
                es.push((u, v, l));
            }
        }
        es
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|e| e.len()).sum()
    }

    /// Ordered pairs involving `v`, loops counted twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.out[v as usize].len() + self.inc[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n() as VertexId).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn check_degree_bound(&self, d: usize) -> Result<()> {
        for v in 0..self.n() as VertexId {
            let deg = self.degree(v);
            if deg > d {
                return Err(Error::DegreeBound { vertex: v, degree: deg, bound: d });
            }
        }
        Ok(())
    }

    /// Distinct neighbors of `v` (either direction, excluding `v` itself),
    /// sorted ascending.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut ns: Vec<VertexId> = self.out[v as usize]
            .iter()
            .chain(self.inc[v as usize].iter())
            .map(|&(w, _)| w)
            .filter(|&w| w != v)
            .collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    pub fn has_loop(&self, v: VertexId) -> bool {
        self.value(v, v).is_present()
    }

    /// BFS distances from `v` in the underlying undirected sense.
    /// `u32::MAX` marks vertices beyond `cap` (or unreachable).
    pub fn distances_from(&self, v: VertexId, cap: Option<u32>) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n()];
        dist[v as usize] = 0;
        let mut frontier = vec![v];
        let mut d = 0u32;
        while !frontier.is_empty() {
            if let Some(c) = cap {
                if d == c {
                    break;
                }
            }
            d += 1;
            let mut next = Vec::new();
            for &u in &frontier {
                for w in self.neighbors(u) {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = d;
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        dist
    }

    /// Undirected distance between two vertices (`None` if unreachable).
    pub fn dist(&self, u: VertexId, v: VertexId) -> Option<u32> {
        let d = self.distances_from(u, None)[v as usize];
        (d != u32::MAX).then_some(d)
    }

    /// Vertices within distance `k` of `v`, sorted by (distance, id).
    pub fn ball(&self, v: VertexId, k: u32) -> Vec<VertexId> {
        let dist = self.distances_from(v, Some(k));
        let mut verts: Vec<VertexId> = (0..self.n() as VertexId)
            .filter(|&u| dist[u as usize] <= k)
            .collect();
        verts.sort_by_key(|&u| (dist[u as usize], u));
        verts
    }

    /// Induced sub-S-graph on `verts`; vertex `i` of the result is `verts[i]`.
    pub fn induced(&self, verts: &[VertexId]) -> SGraph {
        let mut index = vec![u32::MAX; self.n()];
        for (i, &v) in verts.iter().enumerate() {
            index[v as usize] = i as u32;
        }
        let mut g = SGraph::with_shared_symbols(verts.len(), Arc::clone(&self.symbols));
        for &v in verts {
            for &(w, l) in self.out_edges(v) {
                if index[w as usize] != u32::MAX {
                    g.set_value(index[v as usize], index[w as usize], Value::Present(l));
                }
            }
        }
        g
    }

    /// Underlying simple graph: symmetric unlabeled edges, loops dropped.
    pub fn underlying(&self) -> SGraph {
        let mut g = SGraph::new(self.n(), InformationSet::empty());
        for (u, v, _) in self.edges() {
            if u != v {
                g.set_value(u, v, Value::Present(None));
                g.set_value(v, u, Value::Present(None));
            }
        }
        g
    }

    /// Is this graph already its own underlying graph?
    pub fn is_simple(&self) -> bool {
        for (u, v, l) in self.edges() {
            if u == v || l.is_some() || self.value(v, u) != Value::Present(None) {
                return false;
            }
        }
        true
    }

    /// Connected components (underlying sense), each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n()];
        let mut comps = Vec::new();
        for v in 0..self.n() as VertexId {
            if seen[v as usize] {
                continue;
            }
            let mut comp = vec![v];
            seen[v as usize] = true;
            let mut stack = vec![v];
            while let Some(u) = stack.pop() {
                for w in self.neighbors(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    /// Both graphs must share the same information set.
    pub fn disjoint_union(&self, other: &SGraph) -> SGraph {
        assert_eq!(
            self.symbols.as_ref(),
            other.symbols.as_ref(),
            "disjoint_union requires a common information set"
        );
        let shift = self.n() as VertexId;
        let mut g = SGraph::with_shared_symbols(self.n() + other.n(), Arc::clone(&self.symbols));
        for (u, v, l) in self.edges() {
            g.set_value(u, v, Value::Present(l));
        }
        for (u, v, l) in other.edges() {
            g.set_value(u + shift, v + shift, Value::Present(l));
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, sym: &str) -> SGraph {
        let s = InformationSet::of(&[sym]);
        let edges: Vec<(VertexId, VertexId, Label)> =
            (0..n as u32 - 1).map(|i| (i, i + 1, Some(0))).collect();
        SGraph::from_edges(n, s, &edges).unwrap()
    }

    #[test]
    fn degree_counts_ordered_pairs_and_loops_twice() {
        let s = InformationSet::of(&["a"]);
        // 0 -> 1, 1 -> 0, loop at 2
        let g = SGraph::from_edges(
            3,
            s,
            &[(0, 1, Some(0)), (1, 0, Some(0)), (2, 2, Some(0))],
        )
        .unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.degree(2), 2);
        assert!(g.check_degree_bound(2).is_ok());
        assert!(g.check_degree_bound(1).is_err());
    }

    #[test]
    fn distances_are_undirected() {
        let g = path(5, "a");
        assert_eq!(g.dist(4, 0), Some(4));
        assert_eq!(g.dist(0, 4), Some(4));
        assert_eq!(g.ball(2, 1), vec![2, 1, 3]);
    }

    #[test]
    fn induced_preserves_values() {
        let g = path(5, "a");
        let h = g.induced(&[1, 2, 3]);
        assert_eq!(h.n(), 3);
        assert_eq!(h.value(0, 1), Value::Present(Some(0)));
        assert_eq!(h.value(1, 0), Value::Absent);
        assert_eq!(h.edge_count(), 2);
    }

    #[test]
    fn underlying_is_idempotent() {
        let s = InformationSet::of(&["a", "b"]);
        let g = SGraph::from_edges(
            4,
            s,
            &[(0, 1, Some(0)), (1, 0, Some(1)), (1, 2, Some(1)), (3, 3, Some(0))],
        )
        .unwrap();
        let u = g.underlying();
        assert!(u.is_simple());
        assert_eq!(u.edge_count(), 4); // {0,1} and {1,2}, both directions
        assert!(!u.has_loop(3));
        assert_eq!(u.underlying(), u);
    }

    #[test]
    fn components_split() {
        let s = InformationSet::of(&["a"]);
        let g = SGraph::from_edges(5, s, &[(0, 1, Some(0)), (3, 4, Some(0))]).unwrap();
        let comps = g.components();
        assert_eq!(comps, vec![vec![0, 1], vec![2], vec![3, 4]]);
    }
}
