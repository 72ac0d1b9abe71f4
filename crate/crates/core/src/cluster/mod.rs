//! Identity clustering of coding sequences.
//!
//! [`greedy_cluster`] is an incremental greedy clusterer in the style of
//! CD-HIT-EST: longest sequences first, each joining the first cluster whose
//! representative it matches at the identity threshold. Clusters produced by
//! an external run can be ingested from its `.clstr` file with
//! [`parse_clstr`] instead.

mod align;
mod io;

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sequence::SequenceRecord;

pub use align::{band_width, pairwise_identity};
pub use io::{parse_clstr, read_cluster_tsv, write_cluster_tsv, ClusterFileError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterId(pub u32);

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub cluster_id: ClusterId,
    pub member_ids: Vec<String>,
    pub representative_id: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("identity threshold must be within [0.5, 1.0], got {0}")]
    BadThreshold(f64),
    #[error("sequence {0:?} appears in more than one cluster")]
    DuplicateMember(String),
    #[error("cluster id {0} is used twice")]
    DuplicateClusterId(ClusterId),
}

/// Lowest threshold accepted by [`greedy_cluster`].
pub const MIN_THRESHOLD: f64 = 0.5;

pub fn check_threshold(threshold: f64) -> Result<(), ClusterError> {
    if (MIN_THRESHOLD..=1.0).contains(&threshold) {
        Ok(())
    } else {
        Err(ClusterError::BadThreshold(threshold))
    }
}

/// Cluster records at `threshold` nucleotide identity.
///
/// Records are visited by descending length, ties by ascending id, so the
/// result does not depend on input order. A record joins the first cluster
/// (in creation order) whose representative it matches with
/// `pairwise_identity >= threshold`; otherwise it founds a new cluster and
/// becomes its representative. Cluster ids number clusters in creation order.
pub fn greedy_cluster(
    records: &[SequenceRecord],
    threshold: f64,
) -> Result<Vec<Cluster>, ClusterError> {
    check_threshold(threshold)?;
    let mut order: Vec<&SequenceRecord> = records.iter().collect();
    order.sort_by(|a, b| b.cds.len().cmp(&a.cds.len()).then_with(|| a.id.cmp(&b.id)));

    struct Rep<'a> {
        seq: &'a [u8],
        comp: [u32; 4],
    }
    let mut reps: Vec<Rep> = Vec::new();
    let mut clusters: Vec<Cluster> = Vec::new();

    for rec in order {
        let seq = rec.cds.as_bytes();
        let comp = align::composition(seq);
        let hit = reps.par_iter().position_first(|rep| {
            align::identity_reaches(seq, &comp, rep.seq, &rep.comp, threshold)
        });
        match hit {
            Some(i) => clusters[i].member_ids.push(rec.id.clone()),
            None => {
                clusters.push(Cluster {
                    cluster_id: ClusterId(clusters.len() as u32),
                    member_ids: vec![rec.id.clone()],
                    representative_id: rec.id.clone(),
                });
                reps.push(Rep { seq, comp });
            }
        }
    }
    Ok(clusters)
}

/// Gene id to cluster lookup over a validated partition.
#[derive(Debug, Clone, Default)]
pub struct ClusterIndex {
    by_gene: HashMap<String, ClusterId>,
    by_id: HashMap<ClusterId, usize>,
}

impl ClusterIndex {
    pub fn new(clusters: &[Cluster]) -> Result<Self, ClusterError> {
        let mut by_gene = HashMap::new();
        let mut by_id = HashMap::new();
        for (pos, c) in clusters.iter().enumerate() {
            if by_id.insert(c.cluster_id, pos).is_some() {
                return Err(ClusterError::DuplicateClusterId(c.cluster_id));
            }
            for m in &c.member_ids {
                if by_gene.insert(m.clone(), c.cluster_id).is_some() {
                    return Err(ClusterError::DuplicateMember(m.clone()));
                }
            }
        }
        Ok(Self { by_gene, by_id })
    }

    pub fn cluster_of(&self, gene: &str) -> Option<ClusterId> {
        self.by_gene.get(gene).copied()
    }

    /// Position of a cluster in the slice the index was built from.
    pub fn position(&self, id: ClusterId) -> Option<usize> {
        self.by_id.get(&id).copied()
    }

    pub fn n_genes(&self) -> usize {
        self.by_gene.len()
    }
}
