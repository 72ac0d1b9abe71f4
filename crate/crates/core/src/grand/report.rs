use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::reduce::naive_reduce_topology;
use super::{GrandError, Matching, Topology};

/// GRAND retention compared with repeated random discarding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionReport {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub grand_pairs: usize,
    pub naive_runs: usize,
    pub naive_mean: f64,
    /// Population standard deviation over the naive runs.
    pub naive_std: f64,
    pub naive_min: usize,
    pub naive_max: usize,
    /// `100 * (grand - mean) / mean`; 0 when the mean is 0.
    pub improvement_over_mean_pct: f64,
    /// `100 * (grand - max) / max`; 0 when the max is 0.
    pub improvement_over_max_pct: f64,
}

fn gain(grand: f64, base: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        100.0 * (grand - base) / base
    }
}

/// Run the naive reduction once per seed (in parallel) and summarise it
/// against an existing GRAND result on the same graph.
pub fn retention_report(
    topology: &Topology,
    grand: &Matching,
    naive_seeds: &[u64],
) -> Result<RetentionReport, GrandError> {
    if naive_seeds.is_empty() {
        return Err(GrandError::NoSeeds);
    }
    let sizes: Vec<usize> = naive_seeds
        .par_iter()
        .map(|&s| naive_reduce_topology(topology, s).len())
        .collect();
    let n = sizes.len() as f64;
    let mean = sizes.iter().sum::<usize>() as f64 / n;
    let var = sizes
        .iter()
        .map(|&x| (x as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    let min = *sizes.iter().min().expect("non-empty");
    let max = *sizes.iter().max().expect("non-empty");
    let g = grand.len() as f64;
    Ok(RetentionReport {
        n_nodes: topology.n_nodes(),
        n_edges: topology.n_edges(),
        grand_pairs: grand.len(),
        naive_runs: sizes.len(),
        naive_mean: mean,
        naive_std: var.sqrt(),
        naive_min: min,
        naive_max: max,
        improvement_over_mean_pct: gain(g, mean),
        improvement_over_max_pct: gain(g, max as f64),
    })
}
