//! Cluster interaction graph and its reduction to a non-redundant matching.
//!
//! Nodes are identity clusters; an edge joins two clusters when at least one
//! known interaction links a gene of one to a gene of the other. Reducing the
//! graph to a matching guarantees that no cluster contributes to more than
//! one positive pair. [`grand_reduce`] does this while trying to keep as many
//! pairs as possible; [`naive_reduce`] is the random-discard baseline.

mod io;
mod reduce;
mod report;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{Cluster, ClusterError, ClusterId, ClusterIndex};
use crate::sequence::InteractionRecord;

pub use io::{
    read_edge_tsv, read_matching_tsv, write_edge_tsv, write_matching_tsv, EdgeRows, GraphFileError,
};
pub use reduce::{
    grand_reduce, grand_reduce_topology, naive_reduce, naive_reduce_topology, DegreeOneOrder,
};
pub use report::{retention_report, RetentionReport};

#[derive(Debug, Error, PartialEq)]
pub enum GrandError {
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("at least one naive seed is required")]
    NoSeeds,
}

/// Unordered cluster pair stored as `(smaller, larger)`.
pub type EdgeKey = (ClusterId, ClusterId);

pub fn edge_key(a: ClusterId, b: ClusterId) -> EdgeKey {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InteractionGraph {
    pub nodes: BTreeSet<ClusterId>,
    /// Each edge keeps every interaction it stands for, in input order.
    pub edges: BTreeMap<EdgeKey, Vec<InteractionRecord>>,
    pub dropped_self_edges: usize,
}

/// What [`build_graph`] could not place on the graph.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BuildReport {
    /// `(interaction index, gene id)` for genes missing from every cluster.
    pub unknown_genes: Vec<(usize, String)>,
    pub skipped_interactions: usize,
    pub dropped_self_edges: usize,
}

/// Collapse interactions onto the cluster graph.
///
/// Every cluster becomes a node. Interactions between genes of the same
/// cluster are dropped and counted; interactions naming a gene that is in no
/// cluster are skipped and reported.
pub fn build_graph(
    interactions: &[InteractionRecord],
    clusters: &[Cluster],
) -> Result<(InteractionGraph, BuildReport), GrandError> {
    let index = ClusterIndex::new(clusters)?;
    let mut graph = InteractionGraph {
        nodes: clusters.iter().map(|c| c.cluster_id).collect(),
        ..Default::default()
    };
    let mut report = BuildReport::default();
    for (i, rec) in interactions.iter().enumerate() {
        let a = index.cluster_of(&rec.gene_a);
        let b = index.cluster_of(&rec.gene_b);
        let (Some(a), Some(b)) = (a, b) else {
            if a.is_none() {
                report.unknown_genes.push((i, rec.gene_a.clone()));
            }
            if b.is_none() {
                report.unknown_genes.push((i, rec.gene_b.clone()));
            }
            report.skipped_interactions += 1;
            continue;
        };
        if a == b {
            graph.dropped_self_edges += 1;
            continue;
        }
        graph
            .edges
            .entry(edge_key(a, b))
            .or_default()
            .push(rec.clone());
    }
    report.dropped_self_edges = graph.dropped_self_edges;
    Ok((graph, report))
}

impl InteractionGraph {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn topology(&self) -> Topology {
        Topology::new(self.nodes.iter().copied(), self.edges.keys().copied())
    }
}

/// Bare node and edge structure, without the underlying interactions.
///
/// Node `i` is the `i`-th smallest cluster id, so comparing node indices
/// compares cluster ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Topology {
    ids: Vec<ClusterId>,
    edges: Vec<(u32, u32)>,
}

impl Topology {
    /// Build from node ids and edges. Edge endpoints are added as nodes,
    /// duplicate edges are merged and self-loops ignored.
    pub fn new(
        nodes: impl IntoIterator<Item = ClusterId>,
        edges: impl IntoIterator<Item = (ClusterId, ClusterId)>,
    ) -> Self {
        let edges: BTreeSet<EdgeKey> = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| edge_key(a, b))
            .collect();
        let mut ids: BTreeSet<ClusterId> = nodes.into_iter().collect();
        for &(a, b) in &edges {
            ids.insert(a);
            ids.insert(b);
        }
        let ids: Vec<ClusterId> = ids.into_iter().collect();
        let pos: HashMap<ClusterId, u32> = ids
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let edges = edges.into_iter().map(|(a, b)| (pos[&a], pos[&b])).collect();
        Self { ids, edges }
    }

    /// Convenience for plain integer node labels.
    pub fn from_pairs(n_nodes: u32, edges: &[(u32, u32)]) -> Self {
        Self::new(
            (0..n_nodes).map(ClusterId),
            edges.iter().map(|&(a, b)| (ClusterId(a), ClusterId(b))),
        )
    }

    pub fn ids(&self) -> &[ClusterId] {
        &self.ids
    }

    pub fn n_nodes(&self) -> usize {
        self.ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as ascending `(smaller, larger)` cluster id pairs.
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.edges
            .iter()
            .map(|&(a, b)| (self.ids[a as usize], self.ids[b as usize]))
    }

    pub(crate) fn index_edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// The subgraph with the same nodes and only the given edges.
    pub fn restrict_edges(&self, keep: &[EdgeKey]) -> Topology {
        Topology::new(self.ids.iter().copied(), keep.iter().copied())
    }
}

/// Output of a reduction: disjoint retained edges plus every other node.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Matching {
    /// Ascending `(smaller, larger)` pairs.
    pub retained_edges: Vec<EdgeKey>,
    /// Ascending.
    pub freed_clusters: Vec<ClusterId>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.retained_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained_edges.is_empty()
    }

    /// Check the matching invariants against the graph it came from:
    /// retained edges exist in the graph, no node is in two retained edges,
    /// and retained endpoints plus freed nodes are exactly the graph's nodes.
    pub fn validate(&self, graph: &Topology) -> Result<(), String> {
        let edges: BTreeSet<EdgeKey> = graph.edges().collect();
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.retained_edges {
            if a >= b {
                return Err(format!("edge ({a}, {b}) is not in canonical order"));
            }
            if !edges.contains(&(a, b)) {
                return Err(format!("retained edge ({a}, {b}) is not in the graph"));
            }
            for x in [a, b] {
                if !seen.insert(x) {
                    return Err(format!("node {x} is in two retained edges"));
                }
            }
        }
        for &f in &self.freed_clusters {
            if !seen.insert(f) {
                return Err(format!(
                    "node {f} is both freed and retained, or freed twice"
                ));
            }
        }
        let all: BTreeSet<ClusterId> = graph.ids().iter().copied().collect();
        if seen != all {
            return Err(format!(
                "retained and freed nodes cover {} nodes, graph has {}",
                seen.len(),
                all.len()
            ));
        }
        Ok(())
    }
}
