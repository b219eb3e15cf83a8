//! Cluster encoding of S-graphs into simple graphs, and its disc-level
//! inverse.
//!
//! Every vertex `v` of an S-graph over `S` becomes a (2t+2)-vertex cluster in
//! a plain simple graph: a ring `v^1 .. v^2t` (the first `t` are in-slots,
//! the last `t` out-slots), a center adjacent to the whole ring, and a marker
//! adjacent to the center and to every ring vertex except `v^2t`. The marker
//! asymmetry orients the ring, so in-slots and out-slots can be told apart.
//! An edge `I(u, v) = s_i` becomes the single inter-cluster edge
//! `(u_out^i, v_in^i)`; a loop becomes the chord `(v_out^i, v_in^i)`.
//!
//! With `t = max(ceil(d/2) + 3, |S| + 1)` the image has maximum degree
//! `2t + 1`, attained exactly by the centers, and centers of distinct
//! clusters are at distance exactly 3 when the original vertices are
//! adjacent and more than 3 otherwise. A q-disc of a center with `q = 3k+1`
//! therefore determines the k-disc of the original vertex; `reconstruct_disc`
//! recovers it without reference to the original graph.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::canon::Fingerprint;
use crate::disc::{disc_k, RootedDisc};
use crate::error::{Error, Result};
use crate::num::{check_epsilon, q_int, q_int_pow, q_one, Q};
use crate::sgraph::{InformationSet, SGraph, SymbolId, Value, VertexId};

/// Derived parameters of the encoding.
#[derive(Clone, Debug)]
pub struct TransformParams {
    pub d: usize,
    pub k: u32,
    pub symbols: InformationSet,
    /// Ring half-length: `max(ceil(d/2) + 3, |S| + 1)`.
    pub t: usize,
    /// Disc radius used on the image side: `3k + 1`.
    pub q: u32,
    /// Image degree bound: `2t + 1`.
    pub d1: usize,
}

impl TransformParams {
    pub fn new(d: usize, k: u32, symbols: InformationSet) -> Result<Self> {
        if d == 0 || k == 0 || symbols.is_empty() {
            return Err(Error::BadParameter(
                "need degree bound >= 1, radius >= 1 and a nonempty information set".into(),
            ));
        }
        let t = (d.div_ceil(2) + 3).max(symbols.len() + 1);
        Ok(TransformParams { d, k, symbols, t, q: 3 * k + 1, d1: 2 * t + 1 })
    }

    pub fn cluster_size(&self) -> usize {
        2 * self.t + 2
    }

    /// Distance budget on the image side that certifies `eps` on the S-graph
    /// side: `eps / (4 (2t+2)^2 (1 + 2 (2t+1)^q))`.
    pub fn eps1(&self, eps: &Q) -> Result<Q> {
        check_epsilon(eps)?;
        let c = q_int(4)
            * q_int_pow(self.cluster_size() as u64, 2)
            * (q_one() + q_int(2) * q_int_pow(self.d1 as u64, self.q));
        Ok(eps / c)
    }
}

/// Role of an image vertex inside its cluster. Slots are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    In(usize),
    Out(usize),
    Center,
    Marker,
}

/// Formulaic vertex layout of an encoded graph.
#[derive(Clone, Copy, Debug)]
pub struct ClusterIndex {
    t: usize,
}

impl ClusterIndex {
    pub fn new(t: usize) -> Self {
        ClusterIndex { t }
    }

    pub fn cluster_size(&self) -> usize {
        2 * self.t + 2
    }

    /// Ring position `j` in `1..=2t`.
    pub fn ring(&self, v: VertexId, j: usize) -> VertexId {
        debug_assert!((1..=2 * self.t).contains(&j));
        v * self.cluster_size() as u32 + (j - 1) as u32
    }

    /// In-slot `i` in `1..=t` (ring position `i`).
    pub fn v_in(&self, v: VertexId, i: usize) -> VertexId {
        debug_assert!((1..=self.t).contains(&i));
        self.ring(v, i)
    }

    /// Out-slot `i` in `1..=t` (ring position `t + i`).
    pub fn v_out(&self, v: VertexId, i: usize) -> VertexId {
        debug_assert!((1..=self.t).contains(&i));
        self.ring(v, self.t + i)
    }

    pub fn center(&self, v: VertexId) -> VertexId {
        v * self.cluster_size() as u32 + 2 * self.t as u32
    }

    pub fn marker(&self, v: VertexId) -> VertexId {
        v * self.cluster_size() as u32 + 2 * self.t as u32 + 1
    }

    /// Original vertex and role of an image vertex.
    pub fn decode(&self, image: VertexId) -> (VertexId, Role) {
        let cs = self.cluster_size() as u32;
        let (v, r) = (image / cs, (image % cs) as usize);
        let role = if r == 2 * self.t {
            Role::Center
        } else if r == 2 * self.t + 1 {
            Role::Marker
        } else if r < self.t {
            Role::In(r + 1)
        } else {
            Role::Out(r - self.t + 1)
        };
        (v, role)
    }
}

fn add_sym(g: &mut SGraph, u: VertexId, v: VertexId) {
    g.set_value(u, v, Value::Present(None));
    g.set_value(v, u, Value::Present(None));
}

/// Encode an S-graph as a simple graph of `(2t+2) |V|` vertices.
pub fn encode(g: &SGraph, params: &TransformParams) -> Result<SGraph> {
    if g.symbols() != &params.symbols {
        return Err(Error::Invalid("graph and parameters disagree on the information set".into()));
    }
    g.check_degree_bound(params.d)?;
    let idx = ClusterIndex::new(params.t);
    let t = params.t;
    let mut img = SGraph::new(g.n() * idx.cluster_size(), InformationSet::empty());
    for v in 0..g.n() as VertexId {
        let c = idx.center(v);
        let m = idx.marker(v);
        for j in 1..=2 * t {
            add_sym(&mut img, c, idx.ring(v, j));
        }
        for j in 1..=2 * t - 1 {
            add_sym(&mut img, m, idx.ring(v, j));
            add_sym(&mut img, idx.ring(v, j), idx.ring(v, j + 1));
        }
        add_sym(&mut img, c, m);
    }
    for (u, v, l) in g.edges() {
        let s = l.ok_or_else(|| {
            Error::Invalid("cluster encoding needs labeled edges everywhere".into())
        })?;
        let i = s as usize + 1; // slot of symbol s_i, 1-based
        add_sym(&mut img, idx.v_out(u, i), idx.v_in(v, i));
    }
    Ok(img)
}

/// Decoded cluster inside an image(-like) graph.
///
/// A cluster with a loop chord in slot 1 has a genuine automorphism
/// (reflecting the cycle the chord closes at the ring's free end), so the
/// ring order is not always unique. All valid orders agree on the center,
/// marker, out positions `t+1..2t` and the chord slot; only in positions can
/// be permuted. `orders` keeps every valid order (`orders[_][j]` = ring
/// position `j + 1`); callers pin the in side with [`Cluster::pin_in`] using
/// inter-cluster edges, whose slot is determined by their out endpoint.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub center: VertexId,
    pub marker: VertexId,
    orders: Vec<Vec<VertexId>>,
}

impl Cluster {
    /// The first surviving ring order, position 1 first.
    pub fn ring(&self) -> &[VertexId] {
        &self.orders[0]
    }

    pub fn members(&self) -> Vec<VertexId> {
        let mut m = vec![self.center, self.marker];
        m.extend_from_slice(self.ring());
        m
    }

    pub fn v_in(&self, i: usize, t: usize) -> VertexId {
        debug_assert!((1..=t).contains(&i));
        self.ring()[i - 1]
    }

    pub fn v_out(&self, i: usize, t: usize) -> VertexId {
        debug_assert!((1..=t).contains(&i));
        self.ring()[t + i - 1]
    }

    /// In vertices as a set (identical across the valid orders).
    pub fn in_set(&self, t: usize) -> BTreeSet<VertexId> {
        self.orders[0][..t].iter().copied().collect()
    }

    /// Slot of the out vertex `x`, if it is one (identical across orders).
    pub fn out_slot(&self, x: VertexId, t: usize) -> Option<usize> {
        self.orders[0][t..].iter().position(|&y| y == x).map(|p| p + 1)
    }

    /// Keep only orders placing `x` at in position `slot`. Errors when no
    /// order is consistent with that placement.
    pub fn pin_in(&mut self, x: VertexId, slot: usize) -> Result<()> {
        self.orders.retain(|o| o[slot - 1] == x);
        if self.orders.is_empty() {
            return Err(Error::NotDecodable(format!(
                "no ring order puts vertex {x} at in position {slot}"
            )));
        }
        Ok(())
    }
}

/// Undirected degree (distinct neighbors) — image graphs are simple, so this
/// is the natural degree there.
fn und_deg(g: &SGraph, v: VertexId) -> usize {
    g.neighbors(v).len()
}

/// Decode the cluster around a center candidate. Strictly validates the
/// pattern: 2t+1 neighbors, a unique marker of internal degree 2t, a unique
/// ring vertex missed by the marker, and a unique Hamiltonian ring order
/// whose extra internal edges are exactly loop chords `(i, t+i)` with
/// `i ≤ s` (chords encode loop labels, so only the first `s` slots can
/// carry one; this is what pins the order down when a chord sits at slot 1).
pub fn decode_cluster(g: &SGraph, c: VertexId, t: usize, s: usize) -> Result<Cluster> {
    let nbrs = g.neighbors(c);
    if nbrs.len() != 2 * t + 1 {
        return Err(Error::NotDecodable(format!(
            "center candidate has {} neighbors, expected {}",
            nbrs.len(),
            2 * t + 1
        )));
    }
    let members: BTreeSet<VertexId> = nbrs.iter().copied().chain([c]).collect();
    let internal: BTreeMap<VertexId, BTreeSet<VertexId>> = members
        .iter()
        .map(|&x| {
            let adj: BTreeSet<VertexId> =
                g.neighbors(x).into_iter().filter(|w| members.contains(w)).collect();
            (x, adj)
        })
        .collect();
    let markers: Vec<VertexId> =
        nbrs.iter().copied().filter(|x| internal[x].len() == 2 * t).collect();
    let [marker] = markers[..] else {
        return Err(Error::NotDecodable(format!(
            "{} marker candidates, expected exactly 1",
            markers.len()
        )));
    };
    let ring: BTreeSet<VertexId> = nbrs.iter().copied().filter(|&x| x != marker).collect();
    let lasts: Vec<VertexId> =
        ring.iter().copied().filter(|x| !internal[&marker].contains(x)).collect();
    let [last] = lasts[..] else {
        return Err(Error::NotDecodable(format!(
            "{} ring vertices missed by the marker, expected exactly 1",
            lasts.len()
        )));
    };
    // Ring-internal adjacency (exclude center and marker).
    let ring_adj: BTreeMap<VertexId, Vec<VertexId>> = ring
        .iter()
        .map(|&x| {
            let adj: Vec<VertexId> =
                internal[&x].iter().copied().filter(|w| ring.contains(w)).collect();
            (x, adj)
        })
        .collect();
    // Enumerate Hamiltonian paths over the ring starting at `last`
    // (= position 2t, walking down to position 1) and keep those whose
    // non-path internal edges are exactly chords (i, t+i).
    let mut valid: Vec<Vec<VertexId>> = Vec::new();
    let mut path = vec![last];
    let mut seen = BTreeSet::from([last]);
    ham_paths(&ring_adj, &mut path, &mut seen, 2 * t, &mut |p| {
        // p[0] = position 2t, ..., p[2t-1] = position 1.
        let pos: BTreeMap<VertexId, usize> =
            p.iter().enumerate().map(|(idx, &x)| (x, 2 * t - idx)).collect();
        for (&x, adj) in &ring_adj {
            for &y in adj {
                let (a, b) = (pos[&x], pos[&y]);
                let consecutive = a.abs_diff(b) == 1;
                let chord = a.abs_diff(b) == t && a.min(b) <= s;
                if !consecutive && !chord {
                    return false;
                }
            }
        }
        true
    }, &mut valid);
    if valid.is_empty() {
        return Err(Error::NotDecodable("no consistent ring order".into()));
    }
    for o in &mut valid {
        o.reverse(); // now position 1 first
    }
    // All orders must agree on everything except in-position permutations:
    // out assignment, in set, and the chord slots they claim.
    let chord_slots = |o: &[VertexId]| -> BTreeSet<usize> {
        let pos: BTreeMap<VertexId, usize> =
            o.iter().enumerate().map(|(idx, &x)| (x, idx + 1)).collect();
        let mut slots = BTreeSet::new();
        for (&x, adj) in &ring_adj {
            for &y in adj {
                if pos[&x].abs_diff(pos[&y]) == t {
                    slots.insert(pos[&x].min(pos[&y]));
                }
            }
        }
        slots
    };
    let order0 = &valid[0];
    for o in &valid[1..] {
        let same_out = o[t..] == order0[t..];
        let same_in_set = o[..t].iter().collect::<BTreeSet<_>>()
            == order0[..t].iter().collect::<BTreeSet<_>>();
        if !same_out || !same_in_set || chord_slots(o) != chord_slots(order0) {
            return Err(Error::NotDecodable(
                "ring orders disagree beyond in-position permutation".into(),
            ));
        }
    }
    Ok(Cluster { center: c, marker, orders: valid })
}

fn ham_paths(
    adj: &BTreeMap<VertexId, Vec<VertexId>>,
    path: &mut Vec<VertexId>,
    seen: &mut BTreeSet<VertexId>,
    want: usize,
    accept: &mut impl FnMut(&[VertexId]) -> bool,
    out: &mut Vec<Vec<VertexId>>,
) {
    if path.len() == want {
        if accept(path) {
            out.push(path.clone());
        }
        return;
    }
    let cur = *path.last().expect("path starts nonempty");
    for &next in &adj[&cur] {
        if seen.insert(next) {
            path.push(next);
            ham_paths(adj, path, seen, want, accept, out);
            path.pop();
            seen.remove(&next);
        }
    }
}

/// Reconstruct the k-disc of the original vertex from the q-disc of its
/// center, using only the disc itself.
pub fn reconstruct_disc(disc: &RootedDisc, params: &TransformParams) -> Result<RootedDisc> {
    if disc.radius() != params.q {
        return Err(Error::Reconstruction(format!(
            "expected a disc of radius {}, got {}",
            params.q,
            disc.radius()
        )));
    }
    let g = disc.graph();
    let t = params.t;
    let root: VertexId = 0;
    if und_deg(g, root) != 2 * t + 1 {
        return Err(Error::Reconstruction("root is not a complete cluster center".into()));
    }
    let mut clusters: BTreeMap<VertexId, Cluster> = BTreeMap::new();
    clusters.insert(root, decode_cluster(g, root, t, params.symbols.len()).map_err(|e| {
        Error::Reconstruction(format!("root cluster: {e}"))
    })?);
    let mut known: BTreeSet<VertexId> = BTreeSet::from([root]);
    // Candidate centers: complete-degree vertices of the disc.
    let candidates: Vec<VertexId> =
        (0..g.n() as VertexId).filter(|&v| und_deg(g, v) == 2 * t + 1).collect();
    for _round in 0..params.k {
        let snapshot: Vec<VertexId> = known.iter().copied().collect();
        for w in snapshot {
            let dist = g.distances_from(w, Some(3));
            for &z in &candidates {
                if !known.contains(&z) && dist[z as usize] == 3 {
                    clusters.insert(z, decode_cluster(g, z, t, params.symbols.len()).map_err(|e| {
                        Error::Reconstruction(format!("cluster at distance 3: {e}"))
                    })?);
                    known.insert(z);
                }
            }
        }
    }
    pin_in_slots(g, &mut clusters, params).map_err(|e| {
        Error::Reconstruction(format!("in-slot resolution: {e}"))
    })?;
    // Recover values between known clusters (root first in the numbering).
    let mut order: Vec<VertexId> = vec![root];
    order.extend(known.iter().copied().filter(|&v| v != root));
    let index: BTreeMap<VertexId, u32> =
        order.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let mut pre = SGraph::new(order.len(), params.symbols.clone());
    let has_edge = |a: VertexId, b: VertexId| g.value(a, b).is_present();
    for &w in &order {
        for &z in &order {
            let (cw, cz) = (&clusters[&w], &clusters[&z]);
            for i in 1..=params.symbols.len() {
                let (a, b) = (cw.v_out(i, t), cz.v_in(i, t));
                if w == z {
                    // a loop is the chord (out_i, in_i) inside one cluster
                    if has_edge(a, b) {
                        set_recovered(&mut pre, index[&w], index[&z], i, params)?;
                    }
                } else if has_edge(a, b) {
                    set_recovered(&mut pre, index[&w], index[&z], i, params)?;
                }
            }
        }
    }
    RootedDisc::new(&pre, 0, params.k).map_err(|e| {
        Error::Reconstruction(format!("recovered graph is not a k-disc: {e}"))
    })
}

/// Resolve in-position ambiguity across decoded clusters: an edge leaving an
/// out vertex of one cluster into the in set of another pins the latter's
/// order, since the out endpoint's slot is invariant. Edges touching
/// vertices outside the decoded clusters are ignored (a truncated disc loses
/// those, which at worst leaves a harmless ambiguity on unused in slots).
fn pin_in_slots(
    g: &SGraph,
    clusters: &mut BTreeMap<VertexId, Cluster>,
    params: &TransformParams,
) -> Result<()> {
    let t = params.t;
    let mut owner: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (&c, cl) in clusters.iter() {
        for m in cl.members() {
            owner.insert(m, c);
        }
    }
    let mut pins: Vec<(VertexId, VertexId, usize)> = Vec::new();
    for (u, v, _) in g.edges() {
        if u > v {
            continue; // symmetric pair, handle once
        }
        let (Some(&cu), Some(&cv)) = (owner.get(&u), owner.get(&v)) else {
            continue;
        };
        if cu == cv {
            continue;
        }
        let out_u = clusters[&cu].out_slot(u, t);
        let out_v = clusters[&cv].out_slot(v, t);
        let (cl_in, x_in, slot) = match (out_u, out_v) {
            (Some(i), None) if clusters[&cv].in_set(t).contains(&v) => (cv, v, i),
            (None, Some(i)) if clusters[&cu].in_set(t).contains(&u) => (cu, u, i),
            _ => {
                return Err(Error::NotDecodable(
                    "inter-cluster edge not between an out and an in vertex".into(),
                ))
            }
        };
        if slot > params.symbols.len() {
            return Err(Error::NotDecodable(format!("inter-cluster edge in slot {slot}")));
        }
        pins.push((cl_in, x_in, slot));
    }
    for (c, x, slot) in pins {
        clusters.get_mut(&c).expect("pinned cluster exists").pin_in(x, slot)?;
    }
    Ok(())
}

fn set_recovered(
    pre: &mut SGraph,
    u: u32,
    v: u32,
    slot: usize,
    params: &TransformParams,
) -> Result<()> {
    if slot > params.symbols.len() {
        return Err(Error::Reconstruction(format!("inter-cluster edge in slot {slot}")));
    }
    if pre.value(u, v).is_present() {
        return Err(Error::Reconstruction(format!(
            "two inter-cluster edges between the clusters of {u} and {v}"
        )));
    }
    pre.set_value(u, v, Value::Present(Some((slot - 1) as SymbolId)));
    Ok(())
}

/// Result of projecting a simple graph onto its decodable clusters.
#[derive(Clone, Debug)]
pub struct Projection {
    /// Induced subgraph on all clusters of decodable centers.
    pub image: SGraph,
    /// The S-graph whose encoding the image is.
    pub preimage: SGraph,
    /// Decodable centers of the input, sorted; `preimage` vertex `i`
    /// corresponds to `centers[i]`.
    pub centers: Vec<VertexId>,
}

/// Projection subgraph: the union of the 1-discs of all vertices whose
/// q-disc decodes as a complete center. Returns `None` when no vertex
/// qualifies. The induced subgraph is validated to be a disjoint union of
/// clusters with slot-consistent inter-cluster edges and returned together
/// with its S-graph pre-image.
pub fn psi_q(g: &SGraph, params: &TransformParams) -> Result<Option<Projection>> {
    if !g.is_simple() {
        return Err(Error::NotSimple("projection input must be a simple graph".into()));
    }
    let t = params.t;
    for v in 0..g.n() as VertexId {
        if und_deg(g, v) > params.d1 {
            return Err(Error::DegreeBound {
                vertex: v,
                degree: und_deg(g, v),
                bound: params.d1,
            });
        }
    }
    let centers: Vec<VertexId> = (0..g.n() as VertexId)
        .filter(|&v| {
            und_deg(g, v) == 2 * t + 1
                && reconstruct_disc(&disc_k(g, v, params.q), params).is_ok()
        })
        .collect();
    if centers.is_empty() {
        return Ok(None);
    }
    let mut verts: BTreeSet<VertexId> = BTreeSet::new();
    for &c in &centers {
        verts.insert(c);
        verts.extend(g.neighbors(c));
    }
    let verts: Vec<VertexId> = verts.into_iter().collect();
    let image = g.induced(&verts);
    let local: BTreeMap<VertexId, VertexId> =
        verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();

    // Decode every cluster inside the image and check they tile it.
    let mut membership: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut cluster_map: BTreeMap<VertexId, Cluster> = BTreeMap::new();
    for &c in &centers {
        let cl = decode_cluster(&image, local[&c], t, params.symbols.len())?;
        for m in cl.members() {
            if membership.insert(m, local[&c]).is_some() {
                return Err(Error::NotDecodable("clusters overlap".into()));
            }
        }
        cluster_map.insert(local[&c], cl);
    }
    if membership.len() != image.n() {
        return Err(Error::NotDecodable("image vertex outside every cluster".into()));
    }
    pin_in_slots(&image, &mut cluster_map, params)?;
    let clusters: Vec<Cluster> =
        centers.iter().map(|&c| cluster_map[&local[&c]].clone()).collect();
    let mut owner: BTreeMap<VertexId, (u32, Role)> = BTreeMap::new();
    for (ci, cl) in clusters.iter().enumerate() {
        owner.insert(cl.center, (ci as u32, Role::Center));
        owner.insert(cl.marker, (ci as u32, Role::Marker));
        for (pos, &r) in cl.ring().iter().enumerate() {
            let role = if pos < t { Role::In(pos + 1) } else { Role::Out(pos - t + 1) };
            owner.insert(r, (ci as u32, role));
        }
    }

    // Classify inter-cluster edges and build the pre-image.
    let mut pre = SGraph::new(centers.len(), params.symbols.clone());
    for (u, v, _) in image.edges() {
        if u > v {
            continue; // symmetric pair, handle once
        }
        let (cu, ru) = owner[&u];
        let (cv, rv) = owner[&v];
        if cu == cv {
            continue; // intra-cluster structure was validated by the decode
        }
        let (from, to, slot) = match (ru, rv) {
            (Role::Out(i), Role::In(j)) if i == j => (cu, cv, i),
            (Role::In(i), Role::Out(j)) if i == j => (cv, cu, i),
            _ => {
                return Err(Error::NotDecodable(format!(
                    "invalid inter-cluster edge roles {ru:?} / {rv:?}"
                )))
            }
        };
        if slot > params.symbols.len() {
            return Err(Error::NotDecodable(format!("inter-cluster edge in slot {slot}")));
        }
        if pre.value(from, to).is_present() {
            return Err(Error::NotDecodable("duplicate inter-cluster slot edge".into()));
        }
        pre.set_value(from, to, Value::Present(Some((slot - 1) as SymbolId)));
    }
    // Loops live inside clusters: chord (out_i, in_i).
    for (ci, cl) in clusters.iter().enumerate() {
        for i in 1..=params.symbols.len() {
            if image.value(cl.v_out(i, t), cl.v_in(i, t)).is_present() {
                pre.set_value(ci as u32, ci as u32, Value::Present(Some((i - 1) as SymbolId)));
            }
        }
    }
    Ok(Some(Projection { image, preimage: pre, centers }))
}

/// Projection sets built by bounded enumeration: for every S-graph class of
/// size up to `cap` and every vertex, the q-disc fingerprint of its center is
/// recorded under the k-disc fingerprint of the vertex; `generalized` holds
/// the q-disc fingerprints of *all* image vertices.
#[derive(Clone, Debug)]
pub struct ProjectionTable {
    pub cap: usize,
    /// `cap` reached the size bound `2 d^q`, making the table provably
    /// exhaustive. At practical parameters this is essentially never true;
    /// partial tables are first-class and all identities are checked
    /// relative to the enumerated universe.
    pub complete: bool,
    pub by_gamma: BTreeMap<Fingerprint, BTreeSet<Fingerprint>>,
    pub generalized: BTreeSet<Fingerprint>,
}

impl ProjectionTable {
    /// `P_q` of one k-disc class (by fingerprint).
    pub fn project(&self, gamma: &Fingerprint) -> Option<&BTreeSet<Fingerprint>> {
        self.by_gamma.get(gamma)
    }

    /// Union of `P_q` over all enumerated classes (the center fingerprints).
    pub fn all_center_fps(&self) -> BTreeSet<Fingerprint> {
        self.by_gamma.values().flatten().cloned().collect()
    }
}

/// Build a projection table from every S-graph over `params.symbols` with
/// degree at most `params.d` and at most `cap` vertices (one representative
/// per isomorphism class).
pub fn projection_table(params: &TransformParams, cap: usize) -> Result<ProjectionTable> {
    let classes = crate::oracle::enumerate_classes(
        &crate::oracle::EnumerationSpec {
            model: crate::oracle::Model::AllSGraphs,
            symbols: params.symbols.clone(),
            degree_bound: params.d,
            max_n: cap,
        },
        None,
    )?;
    let idx = ClusterIndex::new(params.t);
    let mut by_gamma: BTreeMap<Fingerprint, BTreeSet<Fingerprint>> = BTreeMap::new();
    let mut generalized: BTreeSet<Fingerprint> = BTreeSet::new();
    for g in &classes {
        if g.is_empty() {
            continue;
        }
        let image = encode(g, params)?;
        let image_fps = crate::disc::all_disc_fingerprints(&image, params.q);
        for v in 0..g.n() as VertexId {
            let kfp = disc_k(g, v, params.k).fingerprint().clone();
            let qfp = image_fps[idx.center(v) as usize].clone();
            by_gamma.entry(kfp).or_default().insert(qfp);
        }
        generalized.extend(image_fps);
    }
    let bound = (q_int(2) * q_int_pow(params.d as u64, params.q)).to_integer();
    let complete = q_int(cap as u64).to_integer() >= bound;
    Ok(ProjectionTable { cap, complete, by_gamma, generalized })
}

/// Allowed value combinations of an edge model: `pairs` constrains
/// `(I(u,v), I(v,u))` for distinct `u, v`, `loops` constrains `I(v,v)`.
#[derive(Clone, Debug)]
pub struct EdgeModel {
    pub pairs: BTreeSet<(Value, Value)>,
    pub loops: BTreeSet<Value>,
}

impl EdgeModel {
    /// Plain simple graphs: symmetric unlabeled pairs, no loops.
    pub fn simple() -> Self {
        EdgeModel {
            pairs: BTreeSet::from([
                (Value::Absent, Value::Absent),
                (Value::Present(None), Value::Present(None)),
            ]),
            loops: BTreeSet::from([Value::Absent]),
        }
    }

    /// Everything allowed over the given number of symbols.
    pub fn all(symbol_count: usize) -> Self {
        let mut vals = vec![Value::Absent];
        vals.extend((0..symbol_count).map(|s| Value::Present(Some(s as SymbolId))));
        let pairs = vals.iter().flat_map(|&a| vals.iter().map(move |&b| (a, b))).collect();
        EdgeModel { pairs, loops: vals.into_iter().collect() }
    }

    /// All labeled values on distinct pairs, no loops.
    pub fn loop_free(symbol_count: usize) -> Self {
        let mut m = Self::all(symbol_count);
        m.loops = BTreeSet::from([Value::Absent]);
        m
    }

    pub fn allows_pair(&self, a: Value, b: Value) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn allows_loop(&self, v: Value) -> bool {
        self.loops.contains(&v)
    }

    /// Does the graph lie in the model?
    pub fn contains(&self, g: &SGraph) -> bool {
        for u in 0..g.n() as VertexId {
            if !self.allows_loop(g.value(u, u)) {
                return false;
            }
            for v in 0..g.n() as VertexId {
                if u != v && !self.allows_pair(g.value(u, v), g.value(v, u)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Zero out every pair and loop whose original values the model forbids.
/// Conditions are evaluated on the input graph, so the pass is
/// order-independent and idempotent.
pub fn naturalize_edges(g: &SGraph, model: &EdgeModel) -> SGraph {
    let mut out = SGraph::with_shared_symbols(g.n(), Arc::clone(&g.shared_symbols()));
    for (u, v, l) in g.edges() {
        if u == v {
            if model.allows_loop(Value::Present(l)) {
                out.set_value(u, v, Value::Present(l));
            }
        } else if model.allows_pair(Value::Present(l), g.value(v, u)) {
            out.set_value(u, v, Value::Present(l));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_sgraph, rng_from_seed, symbols};

    fn params(d: usize, k: u32, s: usize) -> TransformParams {
        TransformParams::new(d, k, symbols(s)).unwrap()
    }

    #[test]
    fn parameter_formulas() {
        // d = 3 with three symbols: ceil(3/2) + 3 = 5 wins over |S| + 1 = 4.
        let p = params(3, 1, 3);
        assert_eq!((p.t, p.q, p.d1), (5, 4, 11));
        assert_eq!(p.cluster_size(), 12);
        // d = 2, one symbol: t = 4, image degree 9.
        let p = params(2, 1, 1);
        assert_eq!((p.t, p.q, p.d1), (4, 4, 9));
        // Four vertices with t = 5 encode into 48.
        let p5 = params(4, 1, 4);
        assert_eq!(p5.t, 5);
        let g = SGraph::new(4, symbols(4));
        assert_eq!(encode(&g, &p5).unwrap().n(), 48);
    }

    #[test]
    fn image_degree_profile() {
        let p = params(2, 1, 2);
        let mut rng = rng_from_seed(42);
        for _ in 0..20 {
            let g = random_sgraph(&mut rng, 7, 2, &p.symbols);
            let img = encode(&g, &p).unwrap();
            assert!(img.is_simple());
            let idx = ClusterIndex::new(p.t);
            for v in 0..g.n() as VertexId {
                assert_eq!(und_deg(&img, idx.center(v)), 2 * p.t + 1);
                assert_eq!(und_deg(&img, idx.marker(v)), 2 * p.t);
                for j in 1..=2 * p.t {
                    assert!(und_deg(&img, idx.ring(v, j)) < 2 * p.t);
                }
            }
        }
    }

    #[test]
    fn center_distance_three_iff_adjacent() {
        let p = params(2, 1, 1);
        let mut rng = rng_from_seed(1);
        let g = random_sgraph(&mut rng, 6, 2, &p.symbols);
        let img = encode(&g, &p).unwrap();
        let idx = ClusterIndex::new(p.t);
        for u in 0..g.n() as VertexId {
            let dist = img.distances_from(idx.center(u), None);
            for v in 0..g.n() as VertexId {
                let d = dist[idx.center(v) as usize];
                if u == v {
                    assert_eq!(d, 0);
                } else if g.value(u, v).is_present() || g.value(v, u).is_present() {
                    assert_eq!(d, 3);
                } else {
                    assert!(d > 3);
                }
            }
        }
    }

    #[test]
    fn reconstruct_round_trip_with_loops() {
        let p = params(3, 1, 2);
        let g = SGraph::from_edges(
            3,
            p.symbols.clone(),
            &[(0, 0, Some(1)), (0, 1, Some(0)), (2, 1, Some(1))],
        )
        .unwrap();
        let img = encode(&g, &p).unwrap();
        let idx = ClusterIndex::new(p.t);
        for v in 0..g.n() as VertexId {
            let qdisc = disc_k(&img, idx.center(v), p.q);
            let rec = reconstruct_disc(&qdisc, &p).unwrap();
            assert_eq!(rec.fingerprint(), disc_k(&g, v, p.k).fingerprint());
        }
    }

    #[test]
    fn slot_one_loop_cluster_order_is_pinned_by_in_edges() {
        // A loop in slot 1 closes a cycle at the ring's free end, giving the
        // cluster a reflection that permutes in positions. The incoming edge
        // must still be recovered in its true slot (pinned by its out side).
        let p = params(3, 1, 2);
        for (a, b) in [(0, 1), (1, 0)] {
            let g = SGraph::from_edges(
                2,
                p.symbols.clone(),
                &[(a, a, Some(0)), (b, a, Some(1))],
            )
            .unwrap();
            let img = encode(&g, &p).unwrap();
            let idx = ClusterIndex::new(p.t);
            for v in 0..g.n() as VertexId {
                let rec = reconstruct_disc(&disc_k(&img, idx.center(v), p.q), &p).unwrap();
                assert_eq!(rec.fingerprint(), disc_k(&g, v, p.k).fingerprint());
            }
            let proj = psi_q(&img, &p).unwrap().expect("image has centers");
            assert_eq!(
                crate::canon::canonical_form(&proj.preimage),
                crate::canon::canonical_form(&g)
            );
        }
    }

    #[test]
    fn psi_recovers_full_image() {
        let p = params(2, 1, 1);
        let mut rng = rng_from_seed(9);
        let g = random_sgraph(&mut rng, 5, 2, &p.symbols);
        let img = encode(&g, &p).unwrap();
        let proj = psi_q(&img, &p).unwrap().expect("image has centers");
        assert_eq!(proj.image.n(), img.n());
        assert_eq!(proj.preimage.n(), g.n());
        assert_eq!(
            crate::canon::canonical_form(&proj.preimage),
            crate::canon::canonical_form(&g)
        );
    }

    #[test]
    fn psi_of_clusterless_graph_is_empty() {
        let p = params(2, 1, 1);
        let g = crate::gen::random_simple(&mut rng_from_seed(3), 12, 2);
        assert!(psi_q(&g, &p).unwrap().is_none());
    }

    #[test]
    fn naturalize_into_simple_model() {
        let s = symbols(2);
        let g = SGraph::from_edges(
            3,
            s,
            &[(0, 1, None), (1, 0, None), (1, 2, Some(0)), (2, 2, Some(1))],
        )
        .unwrap();
        let m = EdgeModel::simple();
        let h = naturalize_edges(&g, &m);
        assert!(m.contains(&h));
        assert_eq!(h.edge_count(), 2); // only the symmetric unlabeled pair survives
        assert_eq!(naturalize_edges(&h, &m), h);
    }
}
