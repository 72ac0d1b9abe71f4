//! Labelled pairs: positives realised from the matching, negatives sampled
//! from leftover clusters, and reproducible train/validation/test splits.

mod io;
mod negatives;
mod split;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::ClusterError;
use crate::grand::{EdgeKey, InteractionGraph, Matching};
use crate::rng::Xoshiro256;

pub use io::{read_pairs_tsv, write_pairs_tsv, PairsFileError};
pub use negatives::{
    eligible_negative_pairs, generate_negatives, negative_pool, LinkIndex, NegativeOptions,
    NegativePool,
};
pub use split::{split_dataset, Fractions, Split, SplitManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        }
    }

    /// Byte used by the tensor format: 1 positive, 0 negative.
    pub fn to_byte(self) -> u8 {
        match self {
            Label::Positive => 1,
            Label::Negative => 0,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(Label::Positive),
            0 => Some(Label::Negative),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Label::Positive),
            "negative" => Ok(Label::Negative),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    MatchedEdge,
    SampledNegative,
    Augmented,
}

impl PairSource {
    pub fn as_str(self) -> &'static str {
        match self {
            PairSource::MatchedEdge => "matched_edge",
            PairSource::SampledNegative => "sampled_negative",
            PairSource::Augmented => "augmented",
        }
    }
}

impl fmt::Display for PairSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "matched_edge" => Ok(PairSource::MatchedEdge),
            "sampled_negative" => Ok(PairSource::SampledNegative),
            "augmented" => Ok(PairSource::Augmented),
            other => Err(format!("unknown pair source {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledPair {
    pub gene_a: String,
    pub gene_b: String,
    pub label: Label,
    pub source: PairSource,
    /// Pair id of the real pair an augmented pair was derived from.
    pub parent: Option<String>,
}

impl LabeledPair {
    pub fn new(
        gene_a: impl Into<String>,
        gene_b: impl Into<String>,
        label: Label,
        source: PairSource,
    ) -> Self {
        Self {
            gene_a: gene_a.into(),
            gene_b: gene_b.into(),
            label,
            source,
            parent: None,
        }
    }

    /// `gene_a|gene_b`.
    pub fn pair_id(&self) -> String {
        format!("{}|{}", self.gene_a, self.gene_b)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("retained edge ({}, {}) is not an edge of the graph", .0.0, .0.1)]
    MissingEdge(EdgeKey),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("negative count must be at least 1")]
    ZeroCount,
    #[error("stratified sampling needs at least one host and one pathogen cluster (found {hosts} host, {pathogens} pathogen)")]
    MissingRole { hosts: usize, pathogens: usize },
    #[error("only {achieved} of {requested} negative pairs could be drawn")]
    InsufficientNegatives { requested: usize, achieved: usize },
    #[error("split fractions must be non-negative and sum to 1, got {0:?}")]
    BadFractions([f64; 3]),
    #[error("{pairs} pairs cannot fill {splits} non-empty splits")]
    TooFewPairs { pairs: usize, splits: usize },
    #[error("pair {0:?} appears twice")]
    DuplicatePair(String),
    #[error("augmented pair {0:?} cannot be split; augment after splitting")]
    AugmentedInSplit(String),
}

/// One positive per retained edge, drawn uniformly from the interactions the
/// edge stands for. Edges are visited in ascending order.
pub fn realize_positives(
    matching: &Matching,
    graph: &InteractionGraph,
    seed: u64,
) -> Result<Vec<LabeledPair>, DatasetError> {
    let mut rng = Xoshiro256::seed_from_u64(seed);
    let mut edges = matching.retained_edges.clone();
    edges.sort_unstable();
    edges
        .into_iter()
        .map(|edge| {
            let under = graph
                .edges
                .get(&edge)
                .filter(|u| !u.is_empty())
                .ok_or(DatasetError::MissingEdge(edge))?;
            let pick = &under[rng.index(under.len())];
            Ok(LabeledPair::new(
                pick.gene_a.clone(),
                pick.gene_b.clone(),
                Label::Positive,
                PairSource::MatchedEdge,
            ))
        })
        .collect()
}
