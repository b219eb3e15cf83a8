//! JSON wire formats and file helpers.
//!
//! Graphs travel as `{"n", "symbols", "edges": [[u, v, label-or-null], ...]}`
//! with absent pairs omitted and an optional `"simple": true` flag that is
//! validated on load. S-paths travel as `{"symbols", "edges": ["a", ...]}`
//! listing edge label names in order. Rationals are reduced `"num/den"`
//! strings everywhere; fingerprints are lowercase hex strings.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::canon::Fingerprint;
use crate::disc::RootedDisc;
use crate::error::{Error, Result};
use crate::freq::FreqVector;
use crate::num::format_q;
use crate::oracle::{AlgDcReport, AlgDcVerdict, Cover, Realizability};
use crate::path::SPath;
use crate::sgraph::{InformationSet, SGraph, SymbolId, VertexId};
use crate::transform::{ProjectionTable, TransformParams};

/// Lowercase hex encoding of a fingerprint.
pub fn fingerprint_hex(fp: &Fingerprint) -> String {
    fp.as_bytes().iter().map(|b| format!("{b:02x}")).collect()
}

/// Inverse of [`fingerprint_hex`].
pub fn fingerprint_from_hex(s: &str) -> Result<Fingerprint> {
    if s.len() % 2 != 0 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::Invalid(format!("not a hex fingerprint: {s:?}")));
    }
    let bytes = (0..s.len() / 2)
        .map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).expect("hex digits"))
        .collect();
    Ok(Fingerprint::from_bytes(bytes))
}

/// On-disk form of an S-graph (or simple graph).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub symbols: Vec<String>,
    /// `[u, v, label]` triples; `label` is a symbol name or `null`.
    pub edges: Vec<(VertexId, VertexId, Option<String>)>,
    /// Asserts the symmetric-unlabeled-loopless constraint; checked on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple: Option<bool>,
}

impl GraphFile {
    pub fn from_graph(g: &SGraph) -> GraphFile {
        let edges = g
            .edges()
            .into_iter()
            .map(|(u, v, l)| (u, v, l.map(|s| g.symbols().name(s).to_string())))
            .collect();
        GraphFile {
            n: g.n(),
            symbols: g.symbols().names().to_vec(),
            edges,
            simple: if g.is_simple() { Some(true) } else { None },
        }
    }

    pub fn to_graph(&self) -> Result<SGraph> {
        let syms = InformationSet::new(self.symbols.clone())?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (u, v, name) in &self.edges {
            let label = match name {
                None => None,
                Some(name) => Some(
                    syms.id_of(name)
                        .ok_or_else(|| Error::UnknownSymbol(name.clone()))?,
                ),
            };
            edges.push((*u, *v, label));
        }
        let g = SGraph::from_edges(self.n, syms, &edges)?;
        if self.simple == Some(true) && !g.is_simple() {
            return Err(Error::NotSimple(
                "file asserts a simple graph, but the edges are not symmetric-unlabeled-loopless"
                    .into(),
            ));
        }
        Ok(g)
    }
}

/// On-disk form of an S-path: edge label names in order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathFile {
    pub symbols: Vec<String>,
    pub edges: Vec<String>,
}

impl PathFile {
    pub fn from_path(p: &SPath) -> PathFile {
        PathFile {
            symbols: p.symbols().names().to_vec(),
            edges: p
                .edge_values()
                .iter()
                .map(|&s| p.symbols().name(s).to_string())
                .collect(),
        }
    }

    pub fn to_path(&self) -> Result<SPath> {
        let syms = InformationSet::new(self.symbols.clone())?;
        let edges: Vec<SymbolId> = self
            .edges
            .iter()
            .map(|name| {
                syms.id_of(name)
                    .ok_or_else(|| Error::UnknownSymbol(name.clone()))
            })
            .collect::<Result<_>>()?;
        SPath::new(syms, edges)
    }
}

/// On-disk form of a rooted disc: the disc graph, its root, and the
/// fingerprint it canonicalizes to.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscFile {
    pub fingerprint: String,
    pub root: VertexId,
    pub graph: GraphFile,
}

impl DiscFile {
    pub fn from_disc(d: &RootedDisc) -> DiscFile {
        DiscFile {
            fingerprint: fingerprint_hex(d.fingerprint()),
            root: d.root(),
            graph: GraphFile::from_graph(d.graph()),
        }
    }
}

/// Frequency vector as a fingerprint-keyed map of reduced fractions.
pub fn freq_to_json(f: &FreqVector) -> BTreeMap<String, String> {
    f.iter()
        .map(|(fp, q)| (fingerprint_hex(fp), format_q(q)))
        .collect()
}

/// Projection sets with their parameter header, fingerprints sorted.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionFile {
    pub d: usize,
    pub k: u32,
    pub symbol_count: usize,
    pub t: usize,
    pub q: u32,
    pub cap: usize,
    pub complete: bool,
    /// Per preimage class: its fingerprint and the image fingerprints it
    /// projects to.
    pub classes: Vec<ProjectionEntry>,
    /// q-disc fingerprints of every image vertex across the enumeration,
    /// centers or not.
    pub generalized: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionEntry {
    pub gamma: String,
    pub centers: Vec<String>,
}

impl ProjectionFile {
    pub fn from_table(params: &TransformParams, table: &ProjectionTable) -> ProjectionFile {
        let classes = table
            .by_gamma
            .iter()
            .map(|(gamma, centers)| ProjectionEntry {
                gamma: fingerprint_hex(gamma),
                centers: centers.iter().map(fingerprint_hex).collect(),
            })
            .collect();
        ProjectionFile {
            d: params.d,
            k: params.k,
            symbol_count: params.symbols.len(),
            t: params.t,
            q: params.q,
            cap: table.cap,
            complete: table.complete,
            classes,
            generalized: table.generalized.iter().map(fingerprint_hex).collect(),
        }
    }
}

/// Serializable summary of a cover construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverFile {
    pub universe_size: usize,
    pub class_count: usize,
    pub grid_step: String,
    pub grid_values_per_coord: u64,
    pub size_bound: String,
    pub verified: bool,
    pub reps: Vec<GraphFile>,
}

impl CoverFile {
    pub fn from_cover(c: &Cover) -> CoverFile {
        CoverFile {
            universe_size: c.universe_size,
            class_count: c.class_fps.len(),
            grid_step: format_q(&c.grid_step),
            grid_values_per_coord: c.grid_values_per_coord,
            size_bound: c.size_bound.to_string(),
            verified: c.verified,
            reps: c.reps.iter().map(GraphFile::from_graph).collect(),
        }
    }
}

/// Serializable outcome of a bounded realizability search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealizeFile {
    pub found: bool,
    pub searched_up_to: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<GraphFile>,
}

impl RealizeFile {
    pub fn from_result(r: &Realizability, nmax: usize) -> RealizeFile {
        match r {
            Realizability::Found(g) => RealizeFile {
                found: true,
                searched_up_to: nmax,
                witness: Some(GraphFile::from_graph(g)),
            },
            Realizability::NotFoundUpTo(n) => RealizeFile {
                found: false,
                searched_up_to: *n,
                witness: None,
            },
        }
    }
}

/// Serializable form of the disc-cover reduction report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgDcFile {
    pub found: bool,
    pub projection_sizes: Vec<usize>,
    pub pool_size: usize,
    pub x_iterations: u64,
    pub exhausted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preimage: Option<GraphFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<GraphFile>,
}

impl AlgDcFile {
    pub fn from_report(r: &AlgDcReport) -> AlgDcFile {
        let (preimage, image) = match &r.verdict {
            AlgDcVerdict::Found { preimage, image } => (
                Some(GraphFile::from_graph(preimage)),
                Some(GraphFile::from_graph(image)),
            ),
            AlgDcVerdict::NotFoundWithinBudget => (None, None),
        };
        AlgDcFile {
            found: r.verdict.found(),
            projection_sizes: r.projection_sizes.clone(),
            pool_size: r.pool_size,
            x_iterations: r.x_iterations,
            exhausted: r.exhausted,
            preimage,
            image,
        }
    }
}

/// Read any wire value from a JSON file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let raw = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&raw)?)
}

/// Write any wire value as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut raw = serde_json::to_string_pretty(value)?;
    raw.push('\n');
    fs::write(path, raw)?;
    Ok(())
}

pub fn read_graph(path: &Path) -> Result<SGraph> {
    read_json::<GraphFile>(path)?.to_graph()
}

pub fn write_graph(path: &Path, g: &SGraph) -> Result<()> {
    write_json(path, &GraphFile::from_graph(g))
}

pub fn read_path(path: &Path) -> Result<SPath> {
    read_json::<PathFile>(path)?.to_path()
}

pub fn write_path(path: &Path, p: &SPath) -> Result<()> {
    write_json(path, &PathFile::from_path(p))
}

/// Read a disc set file (a JSON list of rooted-disc objects) as the set of
/// its fingerprints.
pub fn read_disc_set(path: &Path) -> Result<std::collections::BTreeSet<Fingerprint>> {
    let discs: Vec<DiscFile> = read_json(path)?;
    discs
        .iter()
        .map(|d| fingerprint_from_hex(&d.fingerprint))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freq::freq_k;
    use crate::gen;

    #[test]
    fn graph_file_round_trip() {
        let mut rng = gen::rng_from_seed(5);
        let syms = gen::symbols(2);
        let g = gen::random_sgraph(&mut rng, 8, 3, &syms);
        let file = GraphFile::from_graph(&g);
        let back = file.to_graph().unwrap();
        assert_eq!(g.edges(), back.edges());
        assert_eq!(
            crate::canon::canonical_form(&g),
            crate::canon::canonical_form(&back)
        );
    }

    #[test]
    fn simple_flag_is_validated() {
        let syms = gen::symbols(1);
        let g = SGraph::from_edges(2, syms, &[(0, 1, Some(0))]).unwrap();
        let mut file = GraphFile::from_graph(&g);
        assert_eq!(file.simple, None);
        file.simple = Some(true);
        assert!(matches!(file.to_graph(), Err(Error::NotSimple(_))));
    }

    #[test]
    fn path_file_round_trip() {
        let syms = gen::symbols(3);
        let p = SPath::new(syms, vec![0, 2, 1, 1]).unwrap();
        let back = PathFile::from_path(&p).to_path().unwrap();
        assert_eq!(p.edge_values(), back.edge_values());
    }

    #[test]
    fn fingerprint_hex_round_trip() {
        let mut rng = gen::rng_from_seed(9);
        let g = gen::random_simple(&mut rng, 6, 2);
        let fp = crate::canon::canonical_form(&g);
        let hex = fingerprint_hex(&fp);
        assert_eq!(fingerprint_from_hex(&hex).unwrap(), fp);
        assert!(fingerprint_from_hex("xyz").is_err());
    }

    #[test]
    fn freq_json_uses_reduced_fractions() {
        // Undirected 10-path: two degree-1 ends and eight middle vertices.
        let edges: Vec<(VertexId, VertexId, Option<SymbolId>)> = (0..9)
            .flat_map(|i| [(i, i + 1, None), (i + 1, i, None)])
            .collect();
        let g = SGraph::from_edges(10, InformationSet::empty(), &edges).unwrap();
        let map = freq_to_json(&freq_k(&g, 1).unwrap());
        let mut values: Vec<&str> = map.values().map(|s| s.as_str()).collect();
        values.sort_unstable();
        assert_eq!(values, ["1/5", "4/5"]);
    }
}
