use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{InteractionGraph, Matching, Topology};
use crate::cluster::ClusterId;
use crate::rng::Xoshiro256;

/// How the degree-one phase picks its next node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeOneOrder {
    /// Uniformly among the current degree-one nodes, from the seed.
    #[default]
    Random,
    /// Smallest cluster id first; the seed is unused.
    Ascending,
}

/// Current degree-one nodes.
enum DegreeOne {
    Random {
        items: Vec<u32>,
        pos: Vec<u32>,
        rng: Xoshiro256,
    },
    Ascending(BTreeSet<u32>),
}

const ABSENT: u32 = u32::MAX;

impl DegreeOne {
    fn new(order: DegreeOneOrder, n: usize, seed: u64) -> Self {
        match order {
            DegreeOneOrder::Random => DegreeOne::Random {
                items: Vec::new(),
                pos: vec![ABSENT; n],
                rng: Xoshiro256::seed_from_u64(seed),
            },
            DegreeOneOrder::Ascending => DegreeOne::Ascending(BTreeSet::new()),
        }
    }

    fn insert(&mut self, v: u32) {
        match self {
            DegreeOne::Random { items, pos, .. } => {
                if pos[v as usize] == ABSENT {
                    pos[v as usize] = items.len() as u32;
                    items.push(v);
                }
            }
            DegreeOne::Ascending(set) => {
                set.insert(v);
            }
        }
    }

    fn remove(&mut self, v: u32) {
        match self {
            DegreeOne::Random { items, pos, .. } => {
                let p = pos[v as usize];
                if p != ABSENT {
                    let last = items.pop().expect("non-empty");
                    if last != v {
                        items[p as usize] = last;
                        pos[last as usize] = p;
                    }
                    pos[v as usize] = ABSENT;
                }
            }
            DegreeOne::Ascending(set) => {
                set.remove(&v);
            }
        }
    }

    fn pick(&mut self) -> Option<u32> {
        match self {
            DegreeOne::Random { items, rng, .. } => {
                if items.is_empty() {
                    None
                } else {
                    Some(items[rng.index(items.len())])
                }
            }
            DegreeOne::Ascending(set) => set.first().copied(),
        }
    }
}

/// Working state for one GRAND run. Edge-sum keys are kept current after
/// every deletion so the smallest edge-sum is always `edge_sums.first()`.
struct Reducer {
    adj: Vec<BTreeSet<u32>>,
    edge_sums: BTreeSet<(u32, u32, u32)>,
    degree_one: DegreeOne,
    retained: Vec<(u32, u32)>,
    freed: Vec<u32>,
}

impl Reducer {
    fn new(topology: &Topology, order: DegreeOneOrder, seed: u64) -> Self {
        let n = topology.n_nodes();
        let mut adj = vec![BTreeSet::new(); n];
        for &(a, b) in topology.index_edges() {
            adj[a as usize].insert(b);
            adj[b as usize].insert(a);
        }
        let mut edge_sums = BTreeSet::new();
        for &(a, b) in topology.index_edges() {
            edge_sums.insert(((adj[a as usize].len() + adj[b as usize].len()) as u32, a, b));
        }
        let mut degree_one = DegreeOne::new(order, n, seed);
        let mut freed = Vec::new();
        for (v, nbrs) in adj.iter().enumerate() {
            match nbrs.len() {
                0 => freed.push(v as u32),
                1 => degree_one.insert(v as u32),
                _ => {}
            }
        }
        Self {
            adj,
            edge_sums,
            degree_one,
            retained: Vec::new(),
            freed,
        }
    }

    fn degree(&self, v: u32) -> u32 {
        self.adj[v as usize].len() as u32
    }

    fn sum_key(&self, a: u32, b: u32) -> (u32, u32, u32) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        (self.degree(a) + self.degree(b), lo, hi)
    }

    /// Remove edge `keep_end`–`w` as part of stripping `keep_end`, whose own
    /// degree is left stale until the pair is retired.
    fn drop_edge_from(&mut self, keep_end: u32, w: u32) {
        let key = self.sum_key(keep_end, w);
        self.edge_sums.remove(&key);
        // refresh w's other edges for its new degree
        let others: Vec<u32> = self.adj[w as usize]
            .iter()
            .copied()
            .filter(|&y| y != keep_end)
            .collect();
        for &y in &others {
            let old = self.sum_key(w, y);
            self.edge_sums.remove(&old);
        }
        self.adj[w as usize].remove(&keep_end);
        for &y in &others {
            let new = self.sum_key(w, y);
            self.edge_sums.insert(new);
        }
        match self.degree(w) {
            0 => {
                self.degree_one.remove(w);
                self.freed.push(w);
            }
            1 => self.degree_one.insert(w),
            _ => {}
        }
    }

    /// Keep edge `u`–`v`, delete every other edge touching either end and
    /// retire both nodes.
    fn retain(&mut self, u: u32, v: u32) {
        for x in [u, v] {
            let partner = if x == u { v } else { u };
            let others: Vec<u32> = self.adj[x as usize]
                .iter()
                .copied()
                .filter(|&w| w != partner)
                .collect();
            for w in others {
                self.drop_edge_from(x, w);
            }
        }
        let key = self.sum_key(u, v);
        self.edge_sums.remove(&key);
        for x in [u, v] {
            self.adj[x as usize].clear();
            self.degree_one.remove(x);
        }
        self.retained.push(if u < v { (u, v) } else { (v, u) });
    }

    fn run(mut self) -> (Vec<(u32, u32)>, Vec<u32>) {
        loop {
            if let Some(u) = self.degree_one.pick() {
                let v = *self.adj[u as usize]
                    .first()
                    .expect("degree-one node has a neighbour");
                self.retain(u, v);
                continue;
            }
            if let Some(&(_, a, b)) = self.edge_sums.first() {
                self.retain(a, b);
                continue;
            }
            break;
        }
        (self.retained, self.freed)
    }
}

fn to_matching(topology: &Topology, retained: Vec<(u32, u32)>, freed: Vec<u32>) -> Matching {
    let ids = topology.ids();
    let mut retained_edges: Vec<(ClusterId, ClusterId)> = retained
        .into_iter()
        .map(|(a, b)| (ids[a as usize], ids[b as usize]))
        .collect();
    retained_edges.sort_unstable();
    let mut freed_clusters: Vec<ClusterId> = freed.into_iter().map(|v| ids[v as usize]).collect();
    freed_clusters.sort_unstable();
    Matching {
        retained_edges,
        freed_clusters,
    }
}

/// GRAND on a bare topology.
///
/// Repeats until no edges remain outside retained pairs:
/// 1. while some node has degree one, pick one (see [`DegreeOneOrder`]),
///    keep the edge to its sole neighbour and delete the neighbour's other
///    edges;
/// 2. otherwise keep the edge with the smallest sum of endpoint degrees
///    (ties: smallest `(min id, max id)`) and delete every other edge at
///    either endpoint, then go back to step 1.
///
/// Nodes left with no edges are freed. A kept pair is isolated at the moment
/// it is kept, so it is retired from the working graph straight away.
pub fn grand_reduce_topology(topology: &Topology, seed: u64, order: DegreeOneOrder) -> Matching {
    let (retained, freed) = Reducer::new(topology, order, seed).run();
    to_matching(topology, retained, freed)
}

pub fn grand_reduce(graph: &InteractionGraph, seed: u64, order: DegreeOneOrder) -> Matching {
    grand_reduce_topology(&graph.topology(), seed, order)
}

/// Random-discard baseline: visit edges in a seeded uniform permutation and
/// keep an edge when neither endpoint is matched yet.
pub fn naive_reduce_topology(topology: &Topology, seed: u64) -> Matching {
    let mut edges = topology.index_edges().to_vec();
    let mut rng = Xoshiro256::seed_from_u64(seed);
    rng.shuffle(&mut edges);
    let mut matched = vec![false; topology.n_nodes()];
    let mut retained = Vec::new();
    for (a, b) in edges {
        if !matched[a as usize] && !matched[b as usize] {
            matched[a as usize] = true;
            matched[b as usize] = true;
            retained.push((a, b));
        }
    }
    let freed = (0..topology.n_nodes() as u32)
        .filter(|&v| !matched[v as usize])
        .collect();
    to_matching(topology, retained, freed)
}

pub fn naive_reduce(graph: &InteractionGraph, seed: u64) -> Matching {
    naive_reduce_topology(&graph.topology(), seed)
}
