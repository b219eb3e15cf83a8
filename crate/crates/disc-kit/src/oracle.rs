//! Brute-force oracles: class enumeration, covers, realizability, and the
//! disc-cover reduction driver.
//!
//! Everything here is exhaustive search over bounded universes. Results are
//! exact relative to the enumerated universe; budgets (vertex caps, subset
//! iteration caps, wall clock) make partial answers first-class values
//! instead of silent truncation.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::canon::{canonical_form, Fingerprint};
use crate::disc::all_disc_fingerprints;
use crate::error::{Error, Result};
use crate::freq::{freq_k, FreqVector};
use crate::num::{check_epsilon, q_int, q_zero, Q};
use crate::sgraph::{InformationSet, SGraph, SymbolId, Value, VertexId};
use crate::transform::{encode, ClusterIndex, EdgeModel, TransformParams};

/// Graph universe to enumerate.
#[derive(Clone, Debug)]
pub enum Model {
    /// Plain simple graphs: symmetric unlabeled pairs, no loops.
    Simple,
    /// Every assignment of labeled values over the information set.
    AllSGraphs,
    /// A custom `(pairs, loops)` edge model.
    Edge(EdgeModel),
}

#[derive(Clone, Debug)]
pub struct EnumerationSpec {
    pub model: Model,
    pub symbols: InformationSet,
    /// Degree bound in the model's natural convention: neighbor count for
    /// `Simple` (an undirected edge occupies two ordered slots), ordered
    /// present-pair count for the labeled models.
    pub degree_bound: usize,
    pub max_n: usize,
}

impl EnumerationSpec {
    /// The bound translated to ordered present-pair counts.
    fn ordered_bound(&self) -> usize {
        match self.model {
            Model::Simple => 2 * self.degree_bound,
            _ => self.degree_bound,
        }
    }

    /// Allowed `(I(x,u), I(u,x))` combinations for a distinct pair.
    fn pair_values(&self) -> Vec<(Value, Value)> {
        match &self.model {
            Model::Simple => vec![
                (Value::Absent, Value::Absent),
                (Value::Present(None), Value::Present(None)),
            ],
            Model::AllSGraphs => {
                let vals = labeled_values(&self.symbols);
                vals.iter().flat_map(|&a| vals.iter().map(move |&b| (a, b))).collect()
            }
            Model::Edge(m) => m.pairs.iter().copied().collect(),
        }
    }

    /// Allowed loop values.
    fn loop_values(&self) -> Vec<Value> {
        match &self.model {
            Model::Simple => vec![Value::Absent],
            Model::AllSGraphs => labeled_values(&self.symbols),
            Model::Edge(m) => m.loops.iter().copied().collect(),
        }
    }
}

fn labeled_values(symbols: &InformationSet) -> Vec<Value> {
    let mut vals = vec![Value::Absent];
    vals.extend((0..symbols.len()).map(|s| Value::Present(Some(s as SymbolId))));
    vals
}

/// Wall-clock and iteration budgets. `from_env` reads `DISC_KIT_BUDGET_MS`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub budget_ms: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn from_env() -> Self {
        match std::env::var("DISC_KIT_BUDGET_MS").ok().and_then(|v| v.parse::<u64>().ok()) {
            Some(ms) => Budget {
                deadline: Some(Instant::now() + std::time::Duration::from_millis(ms)),
                budget_ms: Some(ms),
            },
            None => Budget::default(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if let Some(d) = self.deadline {
            if Instant::now() > d {
                return Err(Error::WallClock(self.budget_ms.unwrap_or(0)));
            }
        }
        Ok(())
    }
}

/// Enumerate one representative per isomorphism class of every graph in the
/// model with 1 to `max_n` vertices, in deterministic order (size, then
/// canonical fingerprint).
///
/// Incremental extension: every class on `n` vertices arises by attaching a
/// fresh vertex to a class representative on `n - 1` vertices, so extending
/// each representative by all allowed attachments and deduplicating by
/// canonical form is complete.
pub fn enumerate_classes(spec: &EnumerationSpec, budget: Option<&Budget>) -> Result<Vec<SGraph>> {
    let pair_values = spec.pair_values();
    let loop_values = spec.loop_values();
    let mut all: Vec<SGraph> = Vec::new();
    let mut layer: Vec<SGraph> = vec![SGraph::new(0, spec.symbols.clone())];
    for n in 1..=spec.max_n {
        let mut seen: BTreeMap<Fingerprint, SGraph> = BTreeMap::new();
        for h in &layer {
            if let Some(b) = budget {
                b.check()?;
            }
            extend_all(h, n, spec, &pair_values, &loop_values, &mut seen, budget)?;
        }
        layer = seen.into_values().collect();
        all.extend(layer.iter().cloned());
    }
    Ok(all)
}

/// DFS over attachments of the new vertex `n-1` to `h`.
fn extend_all(
    h: &SGraph,
    n: usize,
    spec: &EnumerationSpec,
    pair_values: &[(Value, Value)],
    loop_values: &[Value],
    seen: &mut BTreeMap<Fingerprint, SGraph>,
    budget: Option<&Budget>,
) -> Result<()> {
    let x = (n - 1) as VertexId;
    let mut g = SGraph::new(n, spec.symbols.clone());
    for (u, v, l) in h.edges() {
        g.set_value(u, v, Value::Present(l));
    }
    fn rec(
        g: &mut SGraph,
        x: VertexId,
        u: VertexId,
        deg_x: usize,
        d: usize,
        pair_values: &[(Value, Value)],
        loop_values: &[Value],
        seen: &mut BTreeMap<Fingerprint, SGraph>,
        budget: Option<&Budget>,
    ) -> Result<()> {
        if u == x {
            for &lv in loop_values {
                let cost = if lv.is_present() { 2 } else { 0 };
                if deg_x + cost > d {
                    continue;
                }
                g.set_value(x, x, lv);
                if let Some(b) = budget {
                    b.check()?;
                }
                let fp = canonical_form(g);
                if !seen.contains_key(&fp) {
                    seen.insert(fp, g.clone());
                }
            }
            g.set_value(x, x, Value::Absent);
            return Ok(());
        }
        for &(xu, ux) in pair_values {
            let cost = usize::from(xu.is_present()) + usize::from(ux.is_present());
            if deg_x + cost > d || g.degree(u) + cost > d {
                continue;
            }
            g.set_value(x, u, xu);
            g.set_value(u, x, ux);
            rec(g, x, u + 1, deg_x + cost, d, pair_values, loop_values, seen, budget)?;
            g.set_value(x, u, Value::Absent);
            g.set_value(u, x, Value::Absent);
        }
        Ok(())
    }
    rec(&mut g, x, 0, 0, spec.ordered_bound(), pair_values, loop_values, seen, budget)
}

/// Test oracle: enumerate every labeled graph in the model on exactly `n`
/// vertices (no isomorphism reduction). Exponential; keep `n` tiny.
#[doc(hidden)]
pub fn enumerate_labeled(spec: &EnumerationSpec, n: usize) -> Vec<SGraph> {
    let pair_values = spec.pair_values();
    let loop_values = spec.loop_values();
    // Ordered slots: loops (v, v) for each v, then unordered pairs {u, v}.
    let mut out = Vec::new();
    let mut g = SGraph::new(n, spec.symbols.clone());
    let pairs: Vec<(VertexId, VertexId)> = (0..n as VertexId)
        .flat_map(|u| ((u + 1)..n as VertexId).map(move |v| (u, v)))
        .collect();
    fn rec(
        g: &mut SGraph,
        slot: usize,
        loops_left: usize,
        pairs: &[(VertexId, VertexId)],
        pair_values: &[(Value, Value)],
        loop_values: &[Value],
        d: usize,
        out: &mut Vec<SGraph>,
    ) {
        if slot == loops_left + pairs.len() {
            if g.check_degree_bound(d).is_ok() {
                out.push(g.clone());
            }
            return;
        }
        if slot < loops_left {
            let v = slot as VertexId;
            for &lv in loop_values {
                g.set_value(v, v, lv);
                rec(g, slot + 1, loops_left, pairs, pair_values, loop_values, d, out);
            }
            g.set_value(v, v, Value::Absent);
        } else {
            let (u, v) = pairs[slot - loops_left];
            for &(a, b) in pair_values {
                g.set_value(u, v, a);
                g.set_value(v, u, b);
                rec(g, slot + 1, loops_left, pairs, pair_values, loop_values, d, out);
            }
            g.set_value(u, v, Value::Absent);
            g.set_value(v, u, Value::Absent);
        }
    }
    rec(
        &mut g,
        0,
        n,
        &pairs,
        &pair_values,
        &loop_values,
        spec.ordered_bound(),
        &mut out,
    );
    out
}

/// A finite set of representatives such that every graph of the enumerated
/// universe is within `eps` (L1 on k-disc frequencies) of some member.
#[derive(Clone, Debug)]
pub struct Cover {
    /// Occurring k-disc classes across the universe (the grid coordinates).
    pub class_fps: Vec<Fingerprint>,
    pub grid_step: Q,
    pub grid_values_per_coord: u64,
    pub reps: Vec<SGraph>,
    /// `(2C/eps)^C` with `C` the number of coordinates.
    pub size_bound: BigUint,
    /// Cover property verified exhaustively over the universe.
    pub verified: bool,
    pub universe_size: usize,
}

/// Build a cover of the enumerated universe by grid search: for each point of
/// the grid `{ j * eps/(2C) }^C`, the first universe graph within `eps/2`
/// becomes a representative.
pub fn build_cover(
    spec: &EnumerationSpec,
    k: u32,
    eps: &Q,
    budget: Option<&Budget>,
) -> Result<Cover> {
    check_epsilon(eps)?;
    let universe: Vec<SGraph> =
        enumerate_classes(spec, budget)?.into_iter().filter(|g| !g.is_empty()).collect();
    let freqs: Vec<FreqVector> =
        universe.iter().map(|g| freq_k(g, k)).collect::<Result<_>>()?;
    let mut class_set: BTreeSet<Fingerprint> = BTreeSet::new();
    for f in &freqs {
        class_set.extend(f.support().cloned());
    }
    let class_fps: Vec<Fingerprint> = class_set.into_iter().collect();
    let c = class_fps.len();
    if c == 0 {
        return Err(Error::Invalid("universe has no occurring disc classes".into()));
    }
    let step = eps / q_int(2 * c as i64);
    let per_coord = crate::num::q_floor_uint(&(q_int(1) / &step))
        .to_u64()
        .ok_or_else(|| Error::BadParameter("grid too fine".into()))?;
    let size_bound = pow_biguint(per_coord, c as u32);

    // Dense coordinates of each universe vector, in class_fps order.
    let dense: Vec<Vec<Q>> = freqs
        .iter()
        .map(|f| class_fps.iter().map(|fp| f.get(fp)).collect())
        .collect();

    let half = eps / q_int(2);
    let mut reps: Vec<SGraph> = Vec::new();
    let mut rep_fps: BTreeSet<Fingerprint> = BTreeSet::new();
    let mut rep_vecs: Vec<Vec<Q>> = Vec::new();
    // Mixed-radix counter over grid points; coordinate values j*step, j >= 1.
    let mut digits = vec![1u64; c];
    'grid: loop {
        if let Some(b) = budget {
            b.check()?;
        }
        let point: Vec<Q> = digits.iter().map(|&j| q_int(j as i64) * &step).collect();
        if let Some(i) = (0..universe.len()).find(|&i| l1_dense(&dense[i], &point) <= half) {
            let fp = canonical_form(&universe[i]);
            if rep_fps.insert(fp) {
                reps.push(universe[i].clone());
                rep_vecs.push(dense[i].clone());
            }
        }
        // advance
        for pos in 0..c {
            if digits[pos] < per_coord {
                digits[pos] += 1;
                continue 'grid;
            }
            digits[pos] = 1;
        }
        break;
    }

    // Exhaustive cover check over the universe.
    let verified = dense
        .iter()
        .all(|v| rep_vecs.iter().any(|w| l1_dense(v, w) <= *eps));
    Ok(Cover {
        class_fps,
        grid_step: step,
        grid_values_per_coord: per_coord,
        reps,
        size_bound,
        verified,
        universe_size: universe.len(),
    })
}

fn l1_dense(a: &[Q], b: &[Q]) -> Q {
    let mut s = q_zero();
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += if d < q_zero() { -d } else { d };
    }
    s
}

fn pow_biguint(base: u64, exp: u32) -> BigUint {
    let mut acc = BigUint::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Verdict of a bounded search.
#[derive(Clone, Debug)]
pub enum Realizability {
    Found(SGraph),
    NotFoundUpTo(usize),
}

impl Realizability {
    pub fn found(&self) -> bool {
        matches!(self, Realizability::Found(_))
    }
}

/// First enumerated graph whose set of occurring k-disc fingerprints equals
/// `phi` exactly.
pub fn realizability_search(
    spec: &EnumerationSpec,
    k: u32,
    phi: &BTreeSet<Fingerprint>,
    budget: Option<&Budget>,
) -> Result<Realizability> {
    for g in enumerate_classes(spec, budget)? {
        if g.is_empty() {
            continue;
        }
        if let Some(b) = budget {
            b.check()?;
        }
        let fps: BTreeSet<Fingerprint> = all_disc_fingerprints(&g, k).into_iter().collect();
        if &fps == phi {
            return Ok(Realizability::Found(g));
        }
    }
    Ok(Realizability::NotFoundUpTo(spec.max_n))
}

/// Configuration of the disc-cover reduction driver.
#[derive(Clone, Debug)]
pub struct AlgDcConfig {
    /// Vertex cap for the bounded searcher universe and the projection sets.
    pub cap: usize,
    /// Hard cap on iterations of the subset loop.
    pub subset_budget: u64,
}

#[derive(Clone, Debug)]
pub enum AlgDcVerdict {
    Found { preimage: SGraph, image: SGraph },
    NotFoundWithinBudget,
}

impl AlgDcVerdict {
    pub fn found(&self) -> bool {
        matches!(self, AlgDcVerdict::Found { .. })
    }
}

#[derive(Clone, Debug)]
pub struct AlgDcReport {
    pub verdict: AlgDcVerdict,
    /// Sizes of the bounded projection sets, one per requested class.
    pub projection_sizes: Vec<usize>,
    /// Number of center-disc fingerprints outside the requested classes
    /// (the pool the Y-half of the loop ranges over).
    pub pool_size: usize,
    pub x_iterations: u64,
    /// The subset loop ran to completion (no budget cut).
    pub exhausted: bool,
}

/// Decide bounded realizability of a k-disc set by reduction to the simple-
/// graph side.
///
/// The driver enumerates all S-graph classes up to `cfg.cap`, encodes each,
/// and tabulates (a) the projection set of every k-disc class (q-disc
/// fingerprints of centers) and (b) each image's full q-disc fingerprint
/// set. The literal loop ranges over nonempty subsets `X_i` of each
/// projection set and subsets `Y` of the non-center fingerprints, asking a
/// bounded simple-graph searcher for a graph whose q-disc set is exactly
/// `X_1 ∪ ... ∪ X_r ∪ Y`. Two exact reductions keep this tractable at desk
/// scale: a target containing a center fingerprint is realizable only by a
/// cluster image (so the searcher's universe is the encoded table), and for
/// a fixed `X` the only `Y` that can succeed is `D \ centers` of a matching
/// image `D`, so the Y-half collapses to one lookup per `X`.
pub fn algdc(
    phi: &BTreeSet<Fingerprint>,
    params: &TransformParams,
    cfg: &AlgDcConfig,
    budget: Option<&Budget>,
) -> Result<AlgDcReport> {
    let spec = EnumerationSpec {
        model: Model::AllSGraphs,
        symbols: params.symbols.clone(),
        degree_bound: params.d,
        max_n: cfg.cap,
    };
    let classes: Vec<SGraph> =
        enumerate_classes(&spec, budget)?.into_iter().filter(|g| !g.is_empty()).collect();
    let idx = ClusterIndex::new(params.t);

    // Tabulate center fingerprints per k-disc class and image disc sets.
    let mut by_gamma: BTreeMap<Fingerprint, BTreeSet<Fingerprint>> = BTreeMap::new();
    let mut all_center: BTreeSet<Fingerprint> = BTreeSet::new();
    let mut images: Vec<(SGraph, SGraph, BTreeSet<Fingerprint>)> = Vec::new();
    for g in classes {
        if let Some(b) = budget {
            b.check()?;
        }
        let image = encode(&g, params)?;
        let image_fps = all_disc_fingerprints(&image, params.q);
        let kfps = all_disc_fingerprints(&g, params.k);
        for v in 0..g.n() as VertexId {
            let qfp = image_fps[idx.center(v) as usize].clone();
            by_gamma.entry(kfps[v as usize].clone()).or_default().insert(qfp.clone());
            all_center.insert(qfp);
        }
        let disc_set: BTreeSet<Fingerprint> = image_fps.into_iter().collect();
        images.push((g, image, disc_set));
    }

    // Witness lookup: center part of an image's disc set -> first witness.
    let mut witness: BTreeMap<Vec<Fingerprint>, usize> = BTreeMap::new();
    for (i, (_, _, disc_set)) in images.iter().enumerate() {
        let key: Vec<Fingerprint> =
            disc_set.iter().filter(|fp| all_center.contains(*fp)).cloned().collect();
        witness.entry(key).or_insert(i);
    }
    let pool_size = images
        .iter()
        .flat_map(|(_, _, d)| d.iter())
        .filter(|fp| !all_center.contains(*fp))
        .collect::<BTreeSet<_>>()
        .len();

    let gammas: Vec<&Fingerprint> = phi.iter().collect();
    let proj: Vec<Vec<Fingerprint>> = gammas
        .iter()
        .map(|fp| {
            by_gamma
                .get(*fp)
                .map(|s| s.iter().cloned().collect())
                .unwrap_or_default()
        })
        .collect();
    let projection_sizes: Vec<usize> = proj.iter().map(|p| p.len()).collect();
    if proj.iter().any(|p| p.is_empty()) {
        // Some requested class has an empty bounded projection set: the loop
        // body never runs.
        return Ok(AlgDcReport {
            verdict: AlgDcVerdict::NotFoundWithinBudget,
            projection_sizes,
            pool_size,
            x_iterations: 0,
            exhausted: true,
        });
    }

    // Subset loop over nonempty masks per class.
    let mut masks: Vec<u64> = vec![1; proj.len()];
    for p in &proj {
        if p.len() >= 63 {
            return Ok(AlgDcReport {
                verdict: AlgDcVerdict::NotFoundWithinBudget,
                projection_sizes,
                pool_size,
                x_iterations: 0,
                exhausted: false,
            });
        }
    }
    let mut iterations = 0u64;
    let mut exhausted = false;
    'outer: loop {
        if let Some(b) = budget {
            b.check()?;
        }
        iterations += 1;
        if iterations > cfg.subset_budget {
            break;
        }
        let mut x: BTreeSet<Fingerprint> = BTreeSet::new();
        for (i, p) in proj.iter().enumerate() {
            for (j, fp) in p.iter().enumerate() {
                if masks[i] >> j & 1 == 1 {
                    x.insert(fp.clone());
                }
            }
        }
        let key: Vec<Fingerprint> = x.into_iter().collect();
        if let Some(&i) = witness.get(&key) {
            let (pre, image, _) = images[i].clone();
            return Ok(AlgDcReport {
                verdict: AlgDcVerdict::Found { preimage: pre, image },
                projection_sizes,
                pool_size,
                x_iterations: iterations,
                exhausted: false,
            });
        }
        // advance the per-class masks (each runs over 1 .. 2^len - 1)
        for (i, p) in proj.iter().enumerate() {
            let max = (1u64 << p.len()) - 1;
            if masks[i] < max {
                masks[i] += 1;
                continue 'outer;
            }
            masks[i] = 1;
        }
        exhausted = true;
        break;
    }
    Ok(AlgDcReport {
        verdict: AlgDcVerdict::NotFoundWithinBudget,
        projection_sizes,
        pool_size,
        x_iterations: iterations,
        exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::disc_k;
    use crate::gen::symbols;
    use crate::num::q_frac;

    fn simple_spec(max_n: usize) -> EnumerationSpec {
        EnumerationSpec {
            model: Model::Simple,
            symbols: InformationSet::empty(),
            degree_bound: 2,
            max_n,
        }
    }

    #[test]
    fn simple_classes_up_to_three_vertices() {
        // Computed independently below by labeled quotient; the counts are
        // 1 (n=1), 2 (n=2), 4 (n=3).
        let classes = enumerate_classes(&simple_spec(3), None).unwrap();
        let by_n: Vec<usize> =
            (1..=3).map(|n| classes.iter().filter(|g| g.n() == n).count()).collect();
        assert_eq!(by_n, vec![1, 2, 4]);
        assert_eq!(classes.len(), 7);
    }

    #[test]
    fn enumeration_agrees_with_labeled_quotient() {
        for (spec, ns) in [
            (simple_spec(4), vec![1usize, 2, 3, 4]),
            (
                EnumerationSpec {
                    model: Model::AllSGraphs,
                    symbols: symbols(1),
                    degree_bound: 2,
                    max_n: 3,
                },
                vec![1, 2, 3],
            ),
        ] {
            for &n in &ns {
                let labeled = enumerate_labeled(&spec, n);
                let quotient: BTreeSet<Fingerprint> =
                    labeled.iter().map(canonical_form).collect();
                let direct: BTreeSet<Fingerprint> = enumerate_classes(&spec, None)
                    .unwrap()
                    .into_iter()
                    .filter(|g| g.n() == n)
                    .map(|g| canonical_form(&g))
                    .collect();
                assert_eq!(direct, quotient, "n = {n}");
            }
        }
    }

    #[test]
    fn single_vertex_with_loops_gives_two_classes() {
        let spec = EnumerationSpec {
            model: Model::AllSGraphs,
            symbols: symbols(1),
            degree_bound: 2,
            max_n: 1,
        };
        assert_eq!(enumerate_classes(&spec, None).unwrap().len(), 2);
    }

    #[test]
    fn realizability_middle_of_path_disc() {
        // The 1-disc "root with two pairwise non-adjacent neighbors" is not
        // realizable by simple graphs with up to 3 vertices, but the 4-cycle
        // realizes it.
        let c4 = SGraph::from_edges(
            4,
            InformationSet::empty(),
            &[
                (0, 1, None),
                (1, 0, None),
                (1, 2, None),
                (2, 1, None),
                (2, 3, None),
                (3, 2, None),
                (3, 0, None),
                (0, 3, None),
            ],
        )
        .unwrap();
        let phi: BTreeSet<Fingerprint> =
            [disc_k(&c4, 0, 1).fingerprint().clone()].into_iter().collect();
        let small = realizability_search(&simple_spec(3), 1, &phi, None).unwrap();
        assert!(!small.found());
        let bigger = realizability_search(&simple_spec(4), 1, &phi, None).unwrap();
        match bigger {
            Realizability::Found(g) => assert_eq!(g.n(), 4),
            _ => panic!("expected a witness at n = 4"),
        }
    }

    #[test]
    fn cover_of_tiny_universe() {
        let spec = simple_spec(4);
        let eps = q_frac(1, 2);
        let cover = build_cover(&spec, 1, &eps, None).unwrap();
        assert!(cover.verified);
        assert!(!cover.reps.is_empty());
        let bound = cover.size_bound.clone();
        assert!(BigUint::from(cover.reps.len()) <= bound);
    }

    #[test]
    fn algdc_isolated_vertex_found() {
        let params = TransformParams::new(2, 1, symbols(1)).unwrap();
        let single = SGraph::new(1, symbols(1));
        let phi: BTreeSet<Fingerprint> =
            [disc_k(&single, 0, 1).fingerprint().clone()].into_iter().collect();
        let cfg = AlgDcConfig { cap: 2, subset_budget: 1 << 20 };
        let report = algdc(&phi, &params, &cfg, None).unwrap();
        match &report.verdict {
            AlgDcVerdict::Found { preimage, .. } => {
                assert_eq!(preimage.edge_count(), 0);
            }
            _ => panic!("expected the edgeless witness"),
        }
    }
}
