use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{InteractionGraph, Matching, Topology};
use crate::cluster::ClusterId;
use crate::sequence::{tsv_lines, TableError};

#[derive(Debug, Error)]
pub enum GraphFileError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> GraphFileError {
    GraphFileError::Malformed {
        line,
        message: message.into(),
    }
}

fn cluster_id(line: usize, s: &str) -> Result<ClusterId, GraphFileError> {
    s.parse::<u32>()
        .map(ClusterId)
        .map_err(|_| malformed(line, format!("bad cluster id {s:?}")))
}

/// Edge list: `cluster_a<TAB>cluster_b<TAB>n_underlying`.
pub fn write_edge_tsv<W: Write>(mut out: W, graph: &InteractionGraph) -> io::Result<()> {
    writeln!(out, "#cluster_a\tcluster_b\tn_underlying")?;
    for ((a, b), under) in &graph.edges {
        writeln!(out, "{a}\t{b}\t{}", under.len())?;
    }
    Ok(())
}

/// `(cluster_a, cluster_b, n_underlying)` rows of an edge list.
pub type EdgeRows = Vec<(ClusterId, ClusterId, usize)>;

/// Read an edge list back as a topology plus `(a, b, n_underlying)` rows.
/// Nodes without edges are not represented in the format.
pub fn read_edge_tsv<R: BufRead>(reader: R) -> Result<(Topology, EdgeRows), GraphFileError> {
    let mut rows = Vec::new();
    for row in tsv_lines(reader) {
        let (line, f) = row?;
        if f.len() != 3 {
            return Err(malformed(
                line,
                "expected cluster_a<TAB>cluster_b<TAB>n_underlying",
            ));
        }
        let a = cluster_id(line, &f[0])?;
        let b = cluster_id(line, &f[1])?;
        if a == b {
            return Err(malformed(line, format!("self edge on cluster {a}")));
        }
        let n = f[2]
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                malformed(
                    line,
                    format!("n_underlying must be a positive integer, got {:?}", f[2]),
                )
            })?;
        rows.push((a, b, n));
    }
    let topo = Topology::new(std::iter::empty(), rows.iter().map(|&(a, b, _)| (a, b)));
    Ok((topo, rows))
}

/// Matching as `retained<TAB>a<TAB>b` and `freed<TAB>c` lines.
pub fn write_matching_tsv<W: Write>(mut out: W, m: &Matching) -> io::Result<()> {
    writeln!(out, "#status\tcluster_a\tcluster_b")?;
    for (a, b) in &m.retained_edges {
        writeln!(out, "retained\t{a}\t{b}")?;
    }
    for c in &m.freed_clusters {
        writeln!(out, "freed\t{c}")?;
    }
    Ok(())
}

pub fn read_matching_tsv<R: BufRead>(reader: R) -> Result<Matching, GraphFileError> {
    let mut m = Matching::default();
    for row in tsv_lines(reader) {
        let (line, f) = row?;
        match (f[0].as_str(), f.len()) {
            ("retained", 3) => {
                let a = cluster_id(line, &f[1])?;
                let b = cluster_id(line, &f[2])?;
                m.retained_edges.push(super::edge_key(a, b));
            }
            ("freed", 2) => m.freed_clusters.push(cluster_id(line, &f[1])?),
            _ => {
                return Err(malformed(
                    line,
                    "expected 'retained<TAB>a<TAB>b' or 'freed<TAB>c'",
                ))
            }
        }
    }
    m.retained_edges.sort_unstable();
    m.freed_clusters.sort_unstable();
    Ok(m)
}
