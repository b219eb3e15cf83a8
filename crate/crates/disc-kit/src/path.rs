//! S-paths, S-cycles, and the rewire-and-split approximation pipeline.
//!
//! An S-path on `n` vertices carries a value from `S` on every consecutive
//! ordered pair `(v_i, v_{i+1})`; an S-cycle additionally closes the loop
//! with an edge `(v_n, v_1)`. Interior vertices have ordered degree two, so
//! throughout this module the degree bound is `d = 2` and `d^k = 2^k`.
//!
//! The pipeline shrinks a long S-path to a short one with nearly the same
//! k-disc statistics in four constructive stages: close the path into a
//! cycle, repeatedly rewire edges across a frequency-faithful vertex
//! partition until no rewiring applies, keep the small side (splitting off
//! leftover path fragments), and blow the surviving cycles up and splice
//! them into a single path. Every stage reports exact rational distances;
//! nothing is estimated.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::{alpha, cut, freq_k, l1_dist, FreqVector};
use crate::num::{check_epsilon, q_ceil_usize, q_int, q_int_pow, q_zero, Q};
use crate::sgraph::{InformationSet, SGraph, SymbolId, Value, VertexId};

/// Sequence of `size - 1` values along consecutive ordered pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPath {
    symbols: InformationSet,
    edges: Vec<SymbolId>,
}

impl SPath {
    pub fn new(symbols: InformationSet, edges: Vec<SymbolId>) -> Result<Self> {
        for &s in &edges {
            if s as usize >= symbols.len() {
                return Err(Error::UnknownSymbol(format!("#{s}")));
            }
        }
        Ok(Self { symbols, edges })
    }

    /// Number of vertices.
    pub fn size(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn symbols(&self) -> &InformationSet {
        &self.symbols
    }

    pub fn edge_values(&self) -> &[SymbolId] {
        &self.edges
    }

    pub fn to_sgraph(&self) -> SGraph {
        let mut g = SGraph::new(self.size(), self.symbols.clone());
        for (i, &s) in self.edges.iter().enumerate() {
            g.set_value(i as VertexId, i as VertexId + 1, Value::Present(Some(s)));
        }
        g
    }

    /// Read a path back from a graph that is a single S-path component with
    /// vertices in forward order not required.
    pub fn from_sgraph(g: &SGraph) -> Result<Self> {
        let comps = classify_components(g)?;
        match (&comps.paths[..], &comps.cycles[..]) {
            ([seq], []) => {
                let edges = seq
                    .windows(2)
                    .map(|w| edge_value(g, w[0], w[1]))
                    .collect::<Result<Vec<_>>>()?;
                SPath::new(g.symbols().clone(), edges)
            }
            _ => Err(Error::Invalid(
                "graph is not a single S-path component".into(),
            )),
        }
    }

    pub fn freq(&self, k: u32) -> Result<FreqVector> {
        freq_k(&self.to_sgraph(), k)
    }
}

/// Sequence of `size - 1` consecutive values plus a closing value on
/// `(v_size, v_1)`. A size-one cycle is a single vertex with a loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SCycle {
    symbols: InformationSet,
    edges: Vec<SymbolId>,
    closing: SymbolId,
}

impl SCycle {
    pub fn new(symbols: InformationSet, edges: Vec<SymbolId>, closing: SymbolId) -> Result<Self> {
        for &s in edges.iter().chain([&closing]) {
            if s as usize >= symbols.len() {
                return Err(Error::UnknownSymbol(format!("#{s}")));
            }
        }
        Ok(Self {
            symbols,
            edges,
            closing,
        })
    }

    /// Number of vertices (equals the number of edges).
    pub fn size(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn symbols(&self) -> &InformationSet {
        &self.symbols
    }

    pub fn edge_values(&self) -> &[SymbolId] {
        &self.edges
    }

    pub fn closing_value(&self) -> SymbolId {
        self.closing
    }

    /// Remove the closing edge, leaving the open path.
    pub fn open(&self) -> SPath {
        SPath {
            symbols: self.symbols.clone(),
            edges: self.edges.clone(),
        }
    }

    pub fn to_sgraph(&self) -> SGraph {
        let n = self.size();
        let mut g = SGraph::new(n, self.symbols.clone());
        for (i, &s) in self.edges.iter().enumerate() {
            g.set_value(i as VertexId, i as VertexId + 1, Value::Present(Some(s)));
        }
        g.set_value(n as VertexId - 1, 0, Value::Present(Some(self.closing)));
        g
    }

    pub fn freq(&self, k: u32) -> Result<FreqVector> {
        freq_k(&self.to_sgraph(), k)
    }
}

/// Close an S-path into an S-cycle by adding `(v_n, v_1)` with value `s`
/// (first symbol when unspecified). Exactly the `2k` window classes touching
/// the former endpoints change, so the k-disc distance is at most
/// `4 * 2^k * C / n` for `C` occurring classes.
pub fn close_cycle(p: &SPath, s: Option<SymbolId>) -> Result<SCycle> {
    if p.symbols.is_empty() {
        return Err(Error::Invalid("cannot close a path over an empty information set".into()));
    }
    let s = s.unwrap_or(0);
    SCycle::new(p.symbols.clone(), p.edges.clone(), s)
}

/// Connected pieces of a graph whose in- and out-degrees are all at most
/// one: vertex sequences in forward edge order. Cycles start at their lowest
/// vertex id.
#[derive(Clone, Debug, Default)]
pub struct Components {
    pub cycles: Vec<Vec<VertexId>>,
    pub paths: Vec<Vec<VertexId>>,
}

impl Components {
    pub fn is_cycles_only(&self) -> bool {
        self.paths.is_empty() && !self.cycles.is_empty()
    }
}

fn edge_value(g: &SGraph, u: VertexId, v: VertexId) -> Result<SymbolId> {
    match g.value(u, v) {
        Value::Present(Some(s)) => Ok(s),
        Value::Present(None) => Err(Error::Invalid(format!(
            "edge ({u}, {v}) carries no symbol"
        ))),
        Value::Absent => Err(Error::Invalid(format!("edge ({u}, {v}) is absent"))),
    }
}

/// Split a disjoint union of S-paths and S-cycles into its components.
/// Errors if any vertex has in- or out-degree above one or an edge is
/// unlabeled.
pub fn classify_components(g: &SGraph) -> Result<Components> {
    let n = g.n();
    let mut succ: Vec<Option<VertexId>> = vec![None; n];
    let mut pred: Vec<Option<VertexId>> = vec![None; n];
    for v in 0..n as VertexId {
        let out = g.out_edges(v);
        let inc = g.in_edges(v);
        if out.len() > 1 || inc.len() > 1 {
            return Err(Error::Invalid(format!(
                "vertex {v} has in/out degree above one"
            )));
        }
        if let Some(&(w, l)) = out.first() {
            if l.is_none() {
                return Err(Error::Invalid(format!("edge ({v}, {w}) carries no symbol")));
            }
            succ[v as usize] = Some(w);
        }
        if let Some(&(w, _)) = inc.first() {
            pred[v as usize] = Some(w);
        }
    }

    let mut seen = vec![false; n];
    let mut comps = Components::default();
    for start in 0..n as VertexId {
        if seen[start as usize] {
            continue;
        }
        // Walk backwards to a path head or back around to `start`.
        let mut head = start;
        let mut cycle = false;
        loop {
            match pred[head as usize] {
                Some(p) if p == start => {
                    cycle = true;
                    break;
                }
                Some(p) => head = p,
                None => break,
            }
        }
        let mut seq = vec![head];
        seen[head as usize] = true;
        let mut cur = head;
        while let Some(nxt) = succ[cur as usize] {
            if nxt == head {
                break;
            }
            seq.push(nxt);
            seen[nxt as usize] = true;
            cur = nxt;
        }
        if cycle {
            // Canonical start: lowest id.
            let lo = seq
                .iter()
                .enumerate()
                .min_by_key(|(_, &v)| v)
                .map(|(i, _)| i)
                .unwrap();
            seq.rotate_left(lo);
            comps.cycles.push(seq);
        } else {
            comps.paths.push(seq);
        }
    }
    comps.cycles.sort();
    comps.paths.sort();
    Ok(comps)
}

/// Read the S-cycle spelled by a forward vertex sequence of `g`.
pub fn cycle_from_vertices(g: &SGraph, seq: &[VertexId]) -> Result<SCycle> {
    if seq.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let edges = seq
        .windows(2)
        .map(|w| edge_value(g, w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    let closing = edge_value(g, *seq.last().unwrap(), seq[0])?;
    SCycle::new(g.symbols().clone(), edges, closing)
}

/// Require `g` to be a disjoint union of S-cycles, each of size at least
/// `2k + 2`, and return them.
pub fn require_long_cycles(g: &SGraph, k: u32) -> Result<Vec<Vec<VertexId>>> {
    let comps = classify_components(g)?;
    if !comps.paths.is_empty() || comps.cycles.is_empty() {
        return Err(Error::NotCycles);
    }
    let min = 2 * k as usize + 2;
    for c in &comps.cycles {
        if c.len() < min {
            return Err(Error::CycleTooShort(c.len(), min));
        }
    }
    Ok(comps.cycles)
}

/// Frequency-faithful vertex split: per occurring k-disc class the first
/// `ceil(phi * freq)` vertices in id order go to `v1`, the rest to `v2`.
#[derive(Clone, Debug)]
pub struct Partition {
    pub v1: BTreeSet<VertexId>,
    pub v2: BTreeSet<VertexId>,
    /// Vertices taken into `v1` per class fingerprint.
    pub per_class: BTreeMap<crate::canon::Fingerprint, usize>,
}

/// Build the small/large split of a union of S-cycles (all of size at least
/// `2k + 2`). Requires `2 * phi < n` so that the large side stays nonempty.
pub fn build_partition(g: &SGraph, k: u32, phi: &Q) -> Result<Partition> {
    require_long_cycles(g, k)?;
    let n = g.n();
    if phi <= &q_zero() {
        return Err(Error::BadParameter("phi must be positive".into()));
    }
    if q_int(2) * phi >= q_int(n as i64) {
        return Err(Error::BadParameter(format!(
            "phi too large: need 2*phi < {n}"
        )));
    }
    let mut groups: BTreeMap<crate::canon::Fingerprint, Vec<VertexId>> = BTreeMap::new();
    for v in 0..n as VertexId {
        let fp = crate::disc::disc_k(g, v, k).fingerprint().clone();
        groups.entry(fp).or_default().push(v);
    }
    let mut v1 = BTreeSet::new();
    let mut per_class = BTreeMap::new();
    for (fp, members) in &groups {
        // ceil(phi * cnt / n) members, never more than the class holds.
        let take = q_ceil_usize(&(phi * q_int(members.len() as i64) / q_int(n as i64)))?;
        debug_assert!(take <= members.len());
        let take = take.min(members.len());
        v1.extend(members.iter().take(take).copied());
        per_class.insert(fp.clone(), take);
    }
    let v2: BTreeSet<VertexId> = (0..n as VertexId).filter(|v| !v1.contains(v)).collect();
    if v2.is_empty() {
        return Err(Error::BadParameter(
            "partition left the large side empty".into(),
        ));
    }
    Ok(Partition { v1, v2, per_class })
}

/// A pair of disjoint order-isomorphic 2k-windows whose middle edges cross
/// the partition in opposite directions and whose outer endpoints are far
/// apart. Swapping the middle edges preserves every k-disc and reduces the
/// cut by exactly two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewirePair {
    /// Window `p_1 .. p_2k`; the middle edge `(p_k, p_{k+1})` runs `v1 -> v2`.
    pub p: Vec<VertexId>,
    /// Window `q_1 .. q_2k`; the middle edge `(q_k, q_{k+1})` runs `v2 -> v1`.
    pub q: Vec<VertexId>,
    /// Shared value of both middle edges.
    pub value: SymbolId,
}

fn window_around(
    succ: &[Option<VertexId>],
    pred: &[Option<VertexId>],
    x: VertexId,
    y: VertexId,
    k: u32,
) -> Option<Vec<VertexId>> {
    let k = k as usize;
    let mut w = Vec::with_capacity(2 * k);
    let mut cur = x;
    let mut back = vec![x];
    for _ in 0..k - 1 {
        cur = pred[cur as usize]?;
        back.push(cur);
    }
    w.extend(back.into_iter().rev());
    w.push(y);
    let mut cur = y;
    for _ in 0..k - 1 {
        cur = succ[cur as usize]?;
        w.push(cur);
    }
    Some(w)
}

fn window_labels(g: &SGraph, w: &[VertexId]) -> Result<Vec<SymbolId>> {
    w.windows(2).map(|e| edge_value(g, e[0], e[1])).collect()
}

fn far_apart(g: &SGraph, a: VertexId, b: VertexId) -> bool {
    g.distances_from(a, Some(2))[b as usize] > 2
}

/// Deterministic search for the first admissible rewiring pair: scan ordered
/// pairs of middle edges in lexicographic edge order and return the first
/// pair that satisfies all side conditions. `None` means no pair exists, in
/// which case the cut obeys the exhaustion certificate.
pub fn find_rewire_pair(
    g: &SGraph,
    part: &Partition,
    k: u32,
) -> Result<Option<RewirePair>> {
    if k == 0 {
        return Err(Error::BadParameter("rewiring needs k >= 1".into()));
    }
    require_long_cycles(g, k)?;
    let n = g.n();
    let mut succ: Vec<Option<VertexId>> = vec![None; n];
    let mut pred: Vec<Option<VertexId>> = vec![None; n];
    for v in 0..n as VertexId {
        succ[v as usize] = g.out_edges(v).first().map(|&(w, _)| w);
        pred[v as usize] = g.in_edges(v).first().map(|&(w, _)| w);
    }
    let edges = g.edges();
    let forward: Vec<&(VertexId, VertexId, Option<SymbolId>)> = edges
        .iter()
        .filter(|(u, v, _)| part.v1.contains(u) && part.v2.contains(v))
        .collect();
    let backward: Vec<&(VertexId, VertexId, Option<SymbolId>)> = edges
        .iter()
        .filter(|(u, v, _)| part.v2.contains(u) && part.v1.contains(v))
        .collect();
    for &&(px, py, pl) in &forward {
        let p = match window_around(&succ, &pred, px, py, k) {
            Some(w) => w,
            None => continue,
        };
        let p_labels = window_labels(g, &p)?;
        let p_set: BTreeSet<VertexId> = p.iter().copied().collect();
        for &&(qx, qy, ql) in &backward {
            if ql != pl {
                continue;
            }
            let q = match window_around(&succ, &pred, qx, qy, k) {
                Some(w) => w,
                None => continue,
            };
            if q.iter().any(|v| p_set.contains(v)) {
                continue;
            }
            if window_labels(g, &q)? != p_labels {
                continue;
            }
            if !far_apart(g, p[0], q[2 * k as usize - 1])
                || !far_apart(g, q[0], p[2 * k as usize - 1])
            {
                continue;
            }
            let value = pl.ok_or_else(|| Error::Invalid("unlabeled middle edge".into()))?;
            return Ok(Some(RewirePair { p, q, value }));
        }
    }
    Ok(None)
}

/// Swap the middle edges of an admissible pair: drop `(p_k, p_{k+1})` and
/// `(q_k, q_{k+1})`, add `(p_k, q_{k+1})` and `(q_k, p_{k+1})`, all with the
/// shared value. Validates the structural side conditions (window shape,
/// disjointness, matching labels, distance at least three between the outer
/// endpoints) and that the result is again a union of cycles of size at
/// least `2k + 2`.
pub fn rewire(g: &SGraph, pair: &RewirePair, k: u32) -> Result<SGraph> {
    let m = 2 * k as usize;
    if k == 0 || pair.p.len() != m || pair.q.len() != m {
        return Err(Error::BadParameter(format!(
            "rewiring windows must have 2k = {m} vertices"
        )));
    }
    let p_set: BTreeSet<VertexId> = pair.p.iter().copied().collect();
    let q_set: BTreeSet<VertexId> = pair.q.iter().copied().collect();
    if p_set.len() != m || q_set.len() != m || p_set.intersection(&q_set).next().is_some() {
        return Err(Error::Invalid("rewiring windows are not disjoint".into()));
    }
    let p_labels = window_labels(g, &pair.p)?;
    let q_labels = window_labels(g, &pair.q)?;
    if p_labels != q_labels {
        return Err(Error::Invalid("rewiring windows are not isomorphic".into()));
    }
    if p_labels[k as usize - 1] != pair.value {
        return Err(Error::Invalid("middle edge value mismatch".into()));
    }
    if !far_apart(g, pair.p[0], pair.q[m - 1]) || !far_apart(g, pair.q[0], pair.p[m - 1]) {
        return Err(Error::Invalid(
            "outer window endpoints are closer than three".into(),
        ));
    }
    let (pk, pk1) = (pair.p[k as usize - 1], pair.p[k as usize]);
    let (qk, qk1) = (pair.q[k as usize - 1], pair.q[k as usize]);
    let mut out = g.clone();
    out.set_value(pk, pk1, Value::Absent);
    out.set_value(qk, qk1, Value::Absent);
    out.set_value(pk, qk1, Value::Present(Some(pair.value)));
    out.set_value(qk, pk1, Value::Present(Some(pair.value)));
    require_long_cycles(&out, k)?;
    Ok(out)
}

/// Everything measured while rewiring a union of cycles down to a small
/// frequency-faithful induced subgraph. All rationals are exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RewiringReport {
    /// Class-count bound used in the size parameter.
    pub l_value: u64,
    #[serde(with = "crate::num::serde_q")]
    pub phi: Q,
    /// Input returned unchanged because `2 * phi >= n`.
    pub identity: bool,
    pub input_size: usize,
    pub v1_size: usize,
    pub v2_size: usize,
    pub rewires: u64,
    pub initial_cut: u64,
    pub final_cut: u64,
    /// Largest per-class gap between the two sides' relative frequencies.
    #[serde(with = "crate::num::serde_q")]
    pub alpha: Q,
    /// Exhaustion certificate: bound the final cut must satisfy.
    #[serde(with = "crate::num::serde_q")]
    pub cut_bound: Q,
    pub output_size: usize,
    /// Exact k-disc distance between input and output.
    #[serde(with = "crate::num::serde_q")]
    pub distance: Q,
}

/// Rewire a union of S-cycles (each of size at least `2k + 2`) until no
/// admissible pair remains, then keep the subgraph induced on the small
/// side. The size parameter is `phi = 65 * 2^k * |S|^2 * L^5 / eps`; when
/// `2 * phi >= n` the input is already small and is returned unchanged.
///
/// The output has at most `2 * phi` vertices. Its exact k-disc distance from
/// the input is measured and returned in the report; with `L` at least the
/// number of occurring classes it is at most `eps`.
pub fn edge_rewiring(
    g: &SGraph,
    k: u32,
    eps: &Q,
    l_value: u64,
) -> Result<(SGraph, RewiringReport)> {
    check_epsilon(eps)?;
    if k == 0 {
        return Err(Error::BadParameter("rewiring needs k >= 1".into()));
    }
    if l_value == 0 {
        return Err(Error::BadParameter("class bound must be positive".into()));
    }
    require_long_cycles(g, k)?;
    let n = g.n();
    let s_count = g.symbols().len() as u64;
    let phi = q_int(65)
        * q_int_pow(2, k)
        * q_int_pow(s_count, 2)
        * q_int_pow(l_value, 5)
        / eps;
    if q_int(2) * &phi >= q_int(n as i64) {
        let report = RewiringReport {
            l_value,
            phi,
            identity: true,
            input_size: n,
            v1_size: n,
            v2_size: 0,
            rewires: 0,
            initial_cut: 0,
            final_cut: 0,
            alpha: q_zero(),
            cut_bound: q_zero(),
            output_size: n,
            distance: q_zero(),
        };
        return Ok((g.clone(), report));
    }
    let part = build_partition(g, k, &phi)?;
    let mut cur = g.clone();
    let initial_cut = cut(&cur, &part.v1, &part.v2)?;
    let mut last_cut = initial_cut;
    let mut rewires = 0u64;
    while let Some(pair) = find_rewire_pair(&cur, &part, k)? {
        cur = rewire(&cur, &pair, k)?;
        let now = cut(&cur, &part.v1, &part.v2)?;
        if now + 2 != last_cut {
            return Err(Error::PipelineDefect(format!(
                "rewiring changed the cut from {last_cut} to {now}, expected a decrease of two"
            )));
        }
        last_cut = now;
        rewires += 1;
    }
    let a = alpha(&cur, &part.v1, &part.v2, k)?;
    let cut_bound = q_int(s_count as i64)
        * q_int_pow(l_value, 2)
        * (q_int(8 * k as i64 + 6)
            + q_int(2)
                * (q_int(part.v1.len() as i64) * q_int(part.v2.len() as i64) / q_int(n as i64))
                * &a
                * q_int(s_count as i64));
    if q_int(last_cut as i64) > cut_bound {
        return Err(Error::PipelineDefect(format!(
            "exhausted cut {last_cut} exceeds its certificate"
        )));
    }
    let keep: Vec<VertexId> = part.v1.iter().copied().collect();
    let h = cur.induced(&keep);
    if h.n() > q_ceil_usize(&(q_int(2) * &phi))? {
        return Err(Error::PipelineDefect(
            "induced subgraph larger than 2 * phi".into(),
        ));
    }
    let distance = l1_dist(&freq_k(g, k)?, &freq_k(&h, k)?);
    let report = RewiringReport {
        l_value,
        phi,
        identity: false,
        input_size: n,
        v1_size: part.v1.len(),
        v2_size: part.v2.len(),
        rewires,
        initial_cut,
        final_cut: last_cut,
        alpha: a,
        cut_bound,
        output_size: h.n(),
        distance,
    };
    Ok((h, report))
}

/// Repeat the cycle `m` times: walk the opened path `m` times, joining
/// copies with the closing value. Every k-disc count scales by exactly `m`,
/// so the frequency vector is unchanged. Requires size at least `2k + 2`.
pub fn blowup(c: &SCycle, m: u64, k: u32) -> Result<SCycle> {
    if m == 0 {
        return Err(Error::BadParameter("blowup factor must be positive".into()));
    }
    let min = 2 * k as usize + 2;
    if c.size() < min {
        return Err(Error::CycleTooShort(c.size(), min));
    }
    let mut edges = Vec::with_capacity(c.size() * m as usize - 1);
    for copy in 0..m {
        edges.extend_from_slice(&c.edges);
        if copy + 1 < m {
            edges.push(c.closing);
        }
    }
    SCycle::new(c.symbols.clone(), edges, c.closing)
}

/// Everything measured while splicing a union of cycles into one path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpliceReport {
    pub l_value: u64,
    pub cycle_count: usize,
    /// Blowup factor applied to every cycle.
    pub m: u64,
    pub input_size: usize,
    pub output_size: usize,
    /// Exact k-disc distance between input and output.
    #[serde(with = "crate::num::serde_q")]
    pub distance: Q,
}

/// Turn a union of `t` S-cycles (each of size at least `2k + 2`) into a
/// single S-path: blow every cycle up by `m = ceil(4 * 2^k * (2t - 1) * L /
/// (eps * n))`, open one edge per blown cycle, and concatenate the pieces
/// with fresh edges carrying the first symbol. Only the `2t - 1` surgical
/// edges perturb window statistics, giving distance at most
/// `4 * 2^k * (2t - 1) * L / (m * n) <= eps` when `L` bounds the occurring
/// classes. The output has exactly `m * n` vertices.
pub fn cycles_to_path(
    g: &SGraph,
    k: u32,
    eps: &Q,
    l_value: u64,
) -> Result<(SPath, SpliceReport)> {
    check_epsilon(eps)?;
    if l_value == 0 {
        return Err(Error::BadParameter("class bound must be positive".into()));
    }
    if g.symbols().is_empty() {
        return Err(Error::Invalid("empty information set".into()));
    }
    let cycles = require_long_cycles(g, k)?;
    let n = g.n();
    let t = cycles.len();
    let m_q = q_int(4)
        * q_int_pow(2, k)
        * q_int(2 * t as i64 - 1)
        * q_int(l_value as i64)
        / (eps * q_int(n as i64));
    let m = q_ceil_usize(&m_q)?.max(1) as u64;
    let mut pieces = Vec::with_capacity(t);
    for seq in &cycles {
        let c = cycle_from_vertices(g, seq)?;
        pieces.push(blowup(&c, m, k)?.open());
    }
    let mut edges = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        if i > 0 {
            edges.push(0);
        }
        edges.extend_from_slice(piece.edge_values());
    }
    let path = SPath::new(g.symbols().clone(), edges)?;
    if path.size() != m as usize * n {
        return Err(Error::PipelineDefect(format!(
            "spliced path has {} vertices, expected {}",
            path.size(),
            m as usize * n
        )));
    }
    let distance = l1_dist(&freq_k(g, k)?, &path.freq(k)?);
    let report = SpliceReport {
        l_value,
        cycle_count: t,
        m,
        input_size: n,
        output_size: path.size(),
        distance,
    };
    Ok((path, report))
}

/// How the class-count bound `L` entering the size parameters is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LMode {
    /// Count the classes that actually occur in each stage's input. Sharper
    /// sizes; the exact final distance check guards soundness.
    Observed,
    /// The closed-form bound `(2k)^|S|`, independent of the input.
    Naive,
}

fn stage_l(mode: LMode, g: &SGraph, k: u32) -> Result<u64> {
    match mode {
        LMode::Observed => Ok(freq_k(g, k)?.class_count() as u64),
        LMode::Naive => {
            let base = 2u64 * k as u64;
            base.checked_pow(g.symbols().len() as u32)
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::BadParameter("(2k)^|S| overflows".into()))
        }
    }
}

/// What happened to the path fragments split off by the rewiring stage.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "lowercase")]
pub enum Leftover {
    /// The small side induced no path fragments.
    None,
    /// Fewer than `2k + 2` fragment vertices in total: dropped.
    Dropped { fragments: usize, vertices: usize },
    /// At least `2k + 2` fragment vertices: concatenated into one extra
    /// cycle with fresh first-symbol edges.
    Folded { fragments: usize, vertices: usize },
}

/// Full account of one pipeline run. All rationals are exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub l_mode: LMode,
    /// Class bound measured on the input path.
    pub l_value: u64,
    pub input_size: usize,
    /// Size bound the output must satisfy:
    /// `24960 * 8^k * |S|^2 * L^6 / eps^2`.
    #[serde(with = "crate::num::serde_q")]
    pub size_bound: Q,
    /// Input already within the size bound and returned unchanged.
    pub identity: bool,
    /// Exact distance added by closing the path into a cycle.
    #[serde(with = "crate::num::serde_q")]
    pub close_distance: Q,
    pub rewiring: Option<RewiringReport>,
    pub leftover: Leftover,
    pub splice: Option<SpliceReport>,
    pub output_size: usize,
    /// Exact k-disc distance between input and output.
    #[serde(with = "crate::num::serde_q")]
    pub distance: Q,
    /// Whether a first observed-mode run missed and was redone naively.
    pub retried_naive: bool,
}

/// Shrink an S-path to one of at most `24960 * 8^k * |S|^2 * L^6 / eps^2`
/// vertices whose k-disc frequency vector is within `eps` of the input's
/// (exact L1 distance, verified). Inputs already within the bound are
/// returned unchanged.
///
/// With `LMode::Observed` the stage sizes use the classes actually present;
/// if the verified distance or size then misses, the run is redone with the
/// naive bound. A miss in naive mode is an error.
pub fn approx_path(p: &SPath, k: u32, eps: &Q, mode: LMode) -> Result<(SPath, PipelineReport)> {
    approx_path_inner(p, k, eps, mode, true)
}

/// Run the constructive stages even when the input is already within the
/// size bound. Diagnostic hook: the result keeps the distance guarantee but
/// may be larger than the input.
#[doc(hidden)]
pub fn approx_path_forced(
    p: &SPath,
    k: u32,
    eps: &Q,
    mode: LMode,
) -> Result<(SPath, PipelineReport)> {
    approx_path_inner(p, k, eps, mode, false)
}

fn approx_path_inner(
    p: &SPath,
    k: u32,
    eps: &Q,
    mode: LMode,
    early_return: bool,
) -> Result<(SPath, PipelineReport)> {
    check_epsilon(eps)?;
    if k == 0 {
        return Err(Error::BadParameter("approximation needs k >= 1".into()));
    }
    if p.size() == 0 {
        return Err(Error::EmptyPath);
    }
    match run_pipeline(p, k, eps, mode, early_return)? {
        Ok(done) => Ok(done),
        Err(miss) if mode == LMode::Observed => {
            match run_pipeline(p, k, eps, LMode::Naive, early_return)? {
                Ok((path, mut report)) => {
                    report.retried_naive = true;
                    Ok((path, report))
                }
                Err(naive_miss) => Err(Error::PipelineDefect(format!(
                    "observed mode missed ({miss}); naive retry missed too ({naive_miss})"
                ))),
            }
        }
        Err(miss) => Err(Error::PipelineDefect(miss)),
    }
}

/// Inner result: `Ok` on target, `Err(description)` when the verified
/// distance or size missed (candidate for a naive retry).
type PipelineOutcome = std::result::Result<(SPath, PipelineReport), String>;

fn run_pipeline(
    p: &SPath,
    k: u32,
    eps: &Q,
    mode: LMode,
    early_return: bool,
) -> Result<PipelineOutcome> {
    let pg = p.to_sgraph();
    let l_input = stage_l(mode, &pg, k)?;
    let s_count = p.symbols().len().max(1) as u64;
    let size_bound = q_int(24960)
        * q_int_pow(8, k)
        * q_int_pow(s_count, 2)
        * q_int_pow(l_input, 6)
        / (eps * eps);
    if early_return && q_int(p.size() as i64) <= size_bound {
        let report = PipelineReport {
            l_mode: mode,
            l_value: l_input,
            input_size: p.size(),
            size_bound,
            identity: true,
            close_distance: q_zero(),
            rewiring: None,
            leftover: Leftover::None,
            splice: None,
            output_size: p.size(),
            distance: q_zero(),
            retried_naive: false,
        };
        return Ok(Ok((p.clone(), report)));
    }
    if p.size() < 2 * k as usize + 2 {
        return Err(Error::BadParameter(format!(
            "path of size {} cannot be processed at k = {k}; need at least {}",
            p.size(),
            2 * k + 2
        )));
    }
    let input_freq = p.freq(k)?;

    // Stage 1: close into a cycle.
    let cycle = close_cycle(p, None)?;
    let cg = cycle.to_sgraph();
    let close_distance = l1_dist(&input_freq, &freq_k(&cg, k)?);

    // Stage 2: rewire across a frequency-faithful partition and keep the
    // small side. Budget eps / (24 * 2^k).
    let rw_eps = eps / (q_int(24) * q_int_pow(2, k));
    let l_rw = stage_l(mode, &cg, k)?;
    let (h, rw_report) = edge_rewiring(&cg, k, &rw_eps, l_rw)?;

    // Stage 3: handle path fragments on the small side.
    let comps = classify_components(&h)?;
    let fragment_vertices: usize = comps.paths.iter().map(|frag| frag.len()).sum();
    let min = 2 * k as usize + 2;
    let (spliceable, leftover) = if comps.paths.is_empty() {
        (h.clone(), Leftover::None)
    } else if fragment_vertices < min {
        let keep: Vec<VertexId> = comps.cycles.iter().flatten().copied().collect();
        if keep.is_empty() {
            return Err(Error::PipelineDefect(
                "rewiring left only fragments below the window size".into(),
            ));
        }
        let mut keep = keep;
        keep.sort_unstable();
        (
            h.induced(&keep),
            Leftover::Dropped {
                fragments: comps.paths.len(),
                vertices: fragment_vertices,
            },
        )
    } else {
        // Concatenate every fragment into one extra cycle; the fresh edges
        // all carry the first symbol.
        let mut edges = Vec::new();
        for (i, frag) in comps.paths.iter().enumerate() {
            if i > 0 {
                edges.push(0);
            }
            for w in frag.windows(2) {
                edges.push(edge_value(&h, w[0], w[1])?);
            }
        }
        let extra = SCycle::new(h.symbols().clone(), edges, 0)?;
        let keep: Vec<VertexId> = comps.cycles.iter().flatten().copied().collect();
        let base = if keep.is_empty() {
            extra.to_sgraph()
        } else {
            let mut keep = keep;
            keep.sort_unstable();
            h.induced(&keep).disjoint_union(&extra.to_sgraph())
        };
        (
            base,
            Leftover::Folded {
                fragments: comps.paths.len(),
                vertices: fragment_vertices,
            },
        )
    };

    // Stage 4: blow up and splice into one path. Budget eps / 3.
    let ctp_eps = eps / q_int(3);
    let l_ctp = stage_l(mode, &spliceable, k)?;
    let (out, splice_report) = cycles_to_path(&spliceable, k, &ctp_eps, l_ctp)?;

    let distance = l1_dist(&input_freq, &out.freq(k)?);
    let report = PipelineReport {
        l_mode: mode,
        l_value: l_input,
        input_size: p.size(),
        size_bound: size_bound.clone(),
        identity: false,
        close_distance,
        rewiring: Some(rw_report),
        leftover,
        splice: Some(splice_report),
        output_size: out.size(),
        distance: distance.clone(),
        retried_naive: false,
    };
    if &distance > eps {
        return Ok(Err(format!(
            "distance {} exceeds target {}",
            crate::num::format_q(&distance),
            crate::num::format_q(eps)
        )));
    }
    if early_return && q_int(out.size() as i64) > size_bound {
        return Ok(Err(format!(
            "output size {} exceeds the bound",
            out.size()
        )));
    }
    Ok(Ok((out, report)))
}

/// Shortest prefix length approximating an unlabeled undirected path on `n`
/// vertices within `eps`, together with the exact distance formula value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UndirectedApprox {
    pub size: u64,
    /// Exact k-disc distance between the two paths:
    /// `4k * |1/size - 1/n|` (zero when the sizes agree).
    #[serde(with = "crate::num::serde_q")]
    pub distance: Q,
}

/// For unlabeled undirected paths only the `2k` boundary windows differ, so
/// a path on `min(n, floor(4k / eps) + 1)` vertices is within `eps` of one
/// on `n >= 2k + 1` vertices. Returns the chosen size and the exact distance.
pub fn approx_undirected(n: u64, k: u32, eps: &Q) -> Result<UndirectedApprox> {
    check_epsilon(eps)?;
    if k == 0 {
        return Err(Error::BadParameter("approximation needs k >= 1".into()));
    }
    if n <= 2 * k as u64 {
        return Err(Error::BadParameter(format!(
            "undirected approximation needs n > 2k (got n = {n}, k = {k})"
        )));
    }
    let floor = crate::num::q_floor_uint(&(q_int(4 * k as i64) / eps));
    let floor: u64 = (&floor).try_into().map_err(|_| {
        Error::BadParameter("4k / eps out of range".into())
    })?;
    let size = n.min(floor + 1);
    let distance = if size == n {
        q_zero()
    } else {
        q_int(4 * k as i64) * (q_int(1) / q_int(size as i64) - q_int(1) / q_int(n as i64))
    };
    Ok(UndirectedApprox { size, distance })
}

/// The k-disc distance between unlabeled undirected paths on `a` and `b`
/// vertices (both above `2k`): the interior class shifts by the boundary
/// mass on each side.
pub fn undirected_path_distance(a: u64, b: u64, k: u32) -> Result<Q> {
    if a <= 2 * k as u64 || b <= 2 * k as u64 {
        return Err(Error::BadParameter(
            "distance formula needs both sizes above 2k".into(),
        ));
    }
    let d = q_int(1) / q_int(a as i64) - q_int(1) / q_int(b as i64);
    let d = if d < q_zero() { -d } else { d };
    Ok(q_int(4 * k as i64) * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_labels, rng_from_seed, GenRng};
    use crate::num::q_frac;

    fn syms(names: &[&str]) -> InformationSet {
        InformationSet::of(names)
    }

    fn random_path(rng: &mut GenRng, symbols: &InformationSet, n: usize) -> SPath {
        SPath::new(symbols.clone(), random_labels(rng, n - 1, symbols)).unwrap()
    }

    #[test]
    fn path_graph_round_trip() {
        let p = SPath::new(syms(&["a", "b"]), vec![0, 1, 1, 0]).unwrap();
        assert_eq!(p.size(), 5);
        let g = p.to_sgraph();
        assert_eq!(SPath::from_sgraph(&g).unwrap(), p);
    }

    #[test]
    fn cycle_open_drops_the_closing_edge() {
        let c = SCycle::new(syms(&["a", "b"]), vec![0, 1, 0], 1).unwrap();
        assert_eq!(c.size(), 4);
        assert_eq!(c.open().edge_values(), &[0, 1, 0]);
        let g = c.to_sgraph();
        let comps = classify_components(&g).unwrap();
        assert_eq!(comps.cycles.len(), 1);
        assert!(comps.paths.is_empty());
        assert_eq!(cycle_from_vertices(&g, &comps.cycles[0]).unwrap(), c);
    }

    #[test]
    fn classify_mixed_union() {
        let s = syms(&["a"]);
        let cycle = SCycle::new(s.clone(), vec![0, 0, 0], 0).unwrap().to_sgraph();
        let path = SPath::new(s.clone(), vec![0, 0]).unwrap().to_sgraph();
        let g = cycle.disjoint_union(&path);
        let comps = classify_components(&g).unwrap();
        assert_eq!(comps.cycles, vec![vec![0, 1, 2, 3]]);
        assert_eq!(comps.paths, vec![vec![4, 5, 6]]);
        // A loop is a size-one cycle.
        let mut lg = SGraph::new(1, s);
        lg.set_value(0, 0, Value::Present(Some(0)));
        let comps = classify_components(&lg).unwrap();
        assert_eq!(comps.cycles, vec![vec![0]]);
    }

    #[test]
    fn close_cycle_distance_is_boundary_sized() {
        let mut rng = rng_from_seed(7);
        let s = syms(&["a", "b"]);
        for k in 1..=2u32 {
            let p = random_path(&mut rng, &s, 60);
            let c = close_cycle(&p, None).unwrap();
            let d = l1_dist(&p.freq(k).unwrap(), &c.freq(k).unwrap());
            let classes = p.freq(k).unwrap().class_count().max(
                c.freq(k).unwrap().class_count(),
            ) as i64;
            let bound = q_int(4) * q_int_pow(2, k) * q_int(classes) / q_int(60);
            assert!(d <= bound, "k={k}: distance {d} above {bound}");
        }
    }

    #[test]
    fn blowup_is_frequency_exact() {
        let mut rng = rng_from_seed(11);
        let s = syms(&["a", "b", "c"]);
        for k in 1..=2u32 {
            let p = random_path(&mut rng, &s, 10);
            let c = close_cycle(&p, None).unwrap();
            for m in [1u64, 2, 7] {
                let big = blowup(&c, m, k).unwrap();
                assert_eq!(big.size(), c.size() * m as usize);
                assert_eq!(c.freq(k).unwrap(), big.freq(k).unwrap());
            }
        }
        let tiny = SCycle::new(s, vec![0], 0).unwrap();
        assert!(matches!(blowup(&tiny, 2, 1), Err(Error::CycleTooShort(2, 4))));
    }

    #[test]
    fn partition_respects_class_frequencies() {
        // Alternating two-symbol cycle: two classes at frequency 1/2 each.
        let s = syms(&["a", "b"]);
        let c = SCycle::new(s, vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0], 1).unwrap();
        let g = c.to_sgraph();
        let part = build_partition(&g, 1, &q_int(4)).unwrap();
        assert_eq!(part.v1.len(), 4);
        assert_eq!(part.v2.len(), 8);
        for (_, take) in &part.per_class {
            assert_eq!(*take, 2);
        }
        assert!(build_partition(&g, 1, &q_int(6)).is_err());
    }

    /// Two disjoint copies of the same alternating cycle with the small
    /// side straddling both copies; the first admissible pair crosses the
    /// copies, so one step merges them, cutting the partition cut by two
    /// while every k-disc statistic survives.
    #[test]
    fn rewiring_step_preserves_discs_and_cuts_two() {
        let k = 1u32;
        let s = syms(&["a", "b"]);
        let c = SCycle::new(s, vec![0, 1, 0, 1, 0], 1).unwrap();
        let g = c.to_sgraph().disjoint_union(&c.to_sgraph());
        let v1: BTreeSet<VertexId> = [0, 1, 6, 7].into_iter().collect();
        let v2: BTreeSet<VertexId> = (0..12).filter(|v| !v1.contains(v)).collect();
        let part = Partition {
            v1,
            v2,
            per_class: BTreeMap::new(),
        };
        let before = freq_k(&g, k).unwrap();
        let cut_before = cut(&g, &part.v1, &part.v2).unwrap();
        let pair = find_rewire_pair(&g, &part, k)
            .unwrap()
            .expect("an admissible pair exists");
        assert_eq!(pair.p, vec![1, 2]);
        assert_eq!(pair.q, vec![11, 6]);
        assert_eq!(
            g.value(pair.p[0], pair.p[1]),
            Value::Present(Some(pair.value))
        );
        let rewired = rewire(&g, &pair, k).unwrap();
        assert_eq!(freq_k(&rewired, k).unwrap(), before);
        let cut_after = cut(&rewired, &part.v1, &part.v2).unwrap();
        assert_eq!(cut_after + 2, cut_before);
        let merged = require_long_cycles(&rewired, k).unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].len(), 12);
    }

    #[test]
    fn rewire_rejects_overlapping_windows() {
        let k = 1u32;
        let s = syms(&["a"]);
        let c = SCycle::new(s, vec![0, 0, 0, 0, 0], 0).unwrap();
        let g = c.to_sgraph();
        let pair = RewirePair {
            p: vec![0, 1],
            q: vec![1, 2],
            value: 0,
        };
        assert!(rewire(&g, &pair, k).is_err());
    }

    #[test]
    fn edge_rewiring_identity_on_small_inputs() {
        let s = syms(&["a"]);
        let c = SCycle::new(s, vec![0, 0, 0, 0, 0], 0).unwrap();
        let g = c.to_sgraph();
        let (h, report) = edge_rewiring(&g, 1, &q_frac(1, 2), 1).unwrap();
        assert!(report.identity);
        assert_eq!(h.n(), g.n());
        assert_eq!(report.distance, q_zero());
    }

    #[test]
    fn splice_single_cycle_into_path() {
        let s = syms(&["a", "b"]);
        let c = SCycle::new(s, vec![0, 1, 0, 1, 0], 1).unwrap();
        let g = c.to_sgraph();
        let (path, report) = cycles_to_path(&g, 1, &q_frac(1, 2), 2).unwrap();
        assert_eq!(report.cycle_count, 1);
        assert_eq!(path.size(), report.m as usize * 6);
        // One opened edge among m * n windows: 4 * 2^k * (2t - 1) * L / (m n).
        let bound = q_int(4) * q_int(2) * q_int(report.l_value as i64)
            / (q_int(report.m as i64) * q_int(6));
        assert!(report.distance <= bound);
        assert!(report.distance <= q_frac(1, 2));
    }

    #[test]
    fn splice_two_cycles_joins_them() {
        let s = syms(&["a", "b"]);
        let c1 = SCycle::new(s.clone(), vec![0, 1, 0, 1, 0], 1).unwrap();
        let c2 = SCycle::new(s, vec![1, 0, 1, 0, 1], 0).unwrap();
        let g = c1.to_sgraph().disjoint_union(&c2.to_sgraph());
        let (path, report) = cycles_to_path(&g, 1, &q_frac(1, 3), 4).unwrap();
        assert_eq!(report.cycle_count, 2);
        assert_eq!(path.size(), report.m as usize * 12);
        assert!(report.distance <= q_frac(1, 3));
    }

    #[test]
    fn approx_path_small_input_is_identity() {
        let mut rng = rng_from_seed(3);
        let s = syms(&["a", "b"]);
        let p = random_path(&mut rng, &s, 200);
        let (out, report) = approx_path(&p, 1, &q_frac(1, 5), LMode::Observed).unwrap();
        assert!(report.identity);
        assert_eq!(out, p);
        assert_eq!(report.distance, q_zero());
        assert!(q_int(200) <= report.size_bound);
    }

    #[test]
    fn forced_pipeline_hits_its_distance_target() {
        let mut rng = rng_from_seed(5);
        let s = syms(&["a", "b"]);
        let eps = q_frac(1, 2);
        for n in [40usize, 90] {
            let p = random_path(&mut rng, &s, n);
            let (out, report) = approx_path_forced(&p, 1, &eps, LMode::Observed).unwrap();
            assert!(!report.identity);
            let exact = l1_dist(&p.freq(1).unwrap(), &out.freq(1).unwrap());
            assert_eq!(exact, report.distance);
            assert!(report.distance <= eps);
            assert!(report.splice.is_some());
        }
    }

    #[test]
    fn undirected_sizes_and_distance() {
        // floor(4 * 2 / (1/5)) + 1 = 41.
        let a = approx_undirected(1000, 2, &q_frac(1, 5)).unwrap();
        assert_eq!(a.size, 41);
        assert_eq!(
            a.distance,
            q_int(8) * (q_frac(1, 41) - q_frac(1, 1000))
        );
        assert!(a.distance <= q_frac(1, 5));
        // Short inputs are returned whole.
        let b = approx_undirected(30, 2, &q_frac(1, 2)).unwrap();
        assert_eq!(b.size, 17);
        let c = approx_undirected(10, 2, &q_frac(1, 2)).unwrap();
        assert_eq!(c.size, 10);
        assert_eq!(c.distance, q_zero());
        assert_eq!(
            undirected_path_distance(41, 1000, 2).unwrap(),
            a.distance
        );
    }
}
