//! Non-redundant host/pathogen interaction datasets for machine learning.
//!
//! The pipeline clusters coding sequences by nucleotide identity, collapses
//! known interactions onto a cluster graph, reduces that graph to a matching
//! so no cluster contributes to more than one positive pair, samples
//! negatives from the leftover clusters, and encodes each gene as a chaos
//! game representation (CGR) k-mer grid stacked into two-channel samples.

pub mod audit;
pub mod augment;
pub mod cgr;
pub mod cluster;
pub mod dataset;
pub mod grand;
pub mod rng;
pub mod sequence;
pub mod tensorio;
