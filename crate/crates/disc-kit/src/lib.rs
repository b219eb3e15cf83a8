//! disc-kit: local-structure statistics of edge-labeled graphs.
//!
//! The crate provides, with exact rational arithmetic throughout:
//!
//! * S-graphs (directed, loop-allowing, edge-labeled graphs) with canonical
//!   fingerprints of rooted k-discs ([`sgraph`], [`canon`], [`disc`]);
//! * sparse disc-frequency vectors, L1 distances, disc mappings, and
//!   partition statistics ([`freq`]);
//! * the cluster encoding of S-graphs into simple graphs with its exact
//!   disc-level inverse, projection sets, and edge naturalization
//!   ([`transform`]);
//! * constant-size approximation of S-paths by the rewire-and-split
//!   pipeline ([`path`]);
//! * brute-force oracles: graph-class enumeration, cover construction,
//!   bounded realizability search, and the disc-cover reduction driver
//!   ([`oracle`]);
//! * an executable inequality suite over randomized instances ([`lemma`]).
//!
//! Bulk per-vertex work (disc extraction, instance batches) runs in parallel
//! when the default `parallel` feature is enabled and falls back to
//! sequential code otherwise; results are identical either way.

pub mod canon;
pub mod disc;
pub mod error;
pub mod freq;
pub mod gen;
pub mod io;
pub mod lemma;
pub mod num;
pub mod oracle;
pub mod path;
pub mod sgraph;
pub mod transform;

pub use canon::{canonical_form, rooted_fingerprint, Fingerprint};
pub use disc::{disc_k, RootedDisc};
pub use error::{Error, Result};
pub use freq::{cnt_k, freq_k, l1_dist, DiscMapping, FreqVector};
pub use num::Q;
pub use sgraph::{InformationSet, SGraph};
