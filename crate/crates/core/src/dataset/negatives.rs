use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{DatasetError, Label, LabeledPair, PairSource};
use crate::cluster::{Cluster, ClusterId, ClusterIndex};
use crate::grand::{edge_key, EdgeKey, Matching};
use crate::rng::Xoshiro256;
use crate::sequence::{InteractionRecord, Role, SequenceRecord};

/// Which clusters negatives may be drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NegativePool {
    /// Clusters the reduction did not keep in a positive pair.
    #[default]
    Freed,
    /// Every cluster.
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeOptions {
    pub count: usize,
    pub seed: u64,
    /// Pair a host-role cluster with a pathogen-role cluster.
    pub stratify: bool,
    /// Let a cluster appear in more than one negative pair.
    pub allow_reuse: bool,
}

/// Cluster pairs linked by at least one known interaction between their
/// members.
#[derive(Debug, Clone, Default)]
pub struct LinkIndex {
    links: HashSet<EdgeKey>,
}

impl LinkIndex {
    /// Interactions naming genes outside every cluster cannot link clusters
    /// and are ignored.
    pub fn new(interactions: &[InteractionRecord], index: &ClusterIndex) -> Self {
        let links = interactions
            .iter()
            .filter_map(|r| {
                Some(edge_key(
                    index.cluster_of(&r.gene_a)?,
                    index.cluster_of(&r.gene_b)?,
                ))
            })
            .collect();
        Self { links }
    }

    pub fn linked(&self, a: ClusterId, b: ClusterId) -> bool {
        self.links.contains(&edge_key(a, b))
    }
}

/// Candidate clusters for negatives, ascending.
pub fn negative_pool(
    matching: &Matching,
    clusters: &[Cluster],
    pool: NegativePool,
) -> Vec<ClusterId> {
    let mut ids: Vec<ClusterId> = match pool {
        NegativePool::Freed => {
            let known: HashSet<ClusterId> = clusters.iter().map(|c| c.cluster_id).collect();
            matching
                .freed_clusters
                .iter()
                .copied()
                .filter(|c| known.contains(c))
                .collect()
        }
        NegativePool::All => clusters.iter().map(|c| c.cluster_id).collect(),
    };
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Every unordered pair of distinct pool clusters with no known link.
pub fn eligible_negative_pairs(pool: &[ClusterId], links: &LinkIndex) -> Vec<EdgeKey> {
    let mut out = Vec::new();
    for (i, &a) in pool.iter().enumerate() {
        for &b in &pool[i + 1..] {
            if a != b && !links.linked(a, b) {
                out.push(edge_key(a, b));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Clusters still available for drawing; O(1) random pick and removal.
struct Bag {
    items: Vec<ClusterId>,
    pos: HashMap<ClusterId, usize>,
}

impl Bag {
    fn new(items: Vec<ClusterId>) -> Self {
        let pos = items.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Self { items, pos }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn draw(&self, rng: &mut Xoshiro256) -> ClusterId {
        self.items[rng.index(self.items.len())]
    }

    fn remove(&mut self, c: ClusterId) {
        if let Some(p) = self.pos.remove(&c) {
            let last = self.items.pop().expect("non-empty");
            if last != c {
                self.items[p] = last;
                self.pos.insert(last, p);
            }
        }
    }
}

/// Sample `count` negative pairs.
///
/// Two distinct clusters are drawn uniformly from the pool (with
/// `stratify`, one from host-role and one from pathogen-role clusters, the
/// role of a cluster being that of its representative). A candidate is
/// rejected when any interaction in `unfiltered` links a member of one to a
/// member of the other, or when it repeats an accepted pair. An accepted pair
/// contributes one uniformly chosen gene from each cluster and, unless
/// `allow_reuse`, removes both clusters from the pool. After `100 * count`
/// rejections, or when the pool runs dry, the shortfall is an error.
///
/// Output is sorted by `(cluster_a, cluster_b)`; with `stratify` the host
/// gene comes first, otherwise the gene of the smaller cluster id.
pub fn generate_negatives(
    pool: &[ClusterId],
    clusters: &[Cluster],
    records: &[SequenceRecord],
    unfiltered: &[InteractionRecord],
    opts: &NegativeOptions,
) -> Result<Vec<LabeledPair>, DatasetError> {
    if opts.count == 0 {
        return Err(DatasetError::ZeroCount);
    }
    let index = ClusterIndex::new(clusters)?;
    let links = LinkIndex::new(unfiltered, &index);
    let roles: HashMap<&str, Role> = records.iter().map(|r| (r.id.as_str(), r.role)).collect();
    let role_of = |gene: &str| roles.get(gene).copied().unwrap_or_default();
    let by_id: HashMap<ClusterId, &Cluster> = clusters.iter().map(|c| (c.cluster_id, c)).collect();

    let mut pool: Vec<ClusterId> = pool
        .iter()
        .copied()
        .filter(|c| by_id.contains_key(c))
        .collect();
    pool.sort_unstable();
    pool.dedup();

    let (mut first, mut second) = if opts.stratify {
        let of_role = |want: Role| -> Vec<ClusterId> {
            pool.iter()
                .copied()
                .filter(|c| role_of(&by_id[c].representative_id) == want)
                .collect()
        };
        let hosts = of_role(Role::Host);
        let pathogens = of_role(Role::Pathogen);
        if hosts.is_empty() || pathogens.is_empty() {
            return Err(DatasetError::MissingRole {
                hosts: hosts.len(),
                pathogens: pathogens.len(),
            });
        }
        (Bag::new(hosts), Some(Bag::new(pathogens)))
    } else {
        (Bag::new(pool), None)
    };

    let mut rng = Xoshiro256::seed_from_u64(opts.seed);
    let max_rejections = 100usize.saturating_mul(opts.count);
    let mut rejections = 0usize;
    let mut accepted: Vec<(ClusterId, ClusterId)> = Vec::new();
    let mut used: BTreeSet<EdgeKey> = BTreeSet::new();

    while accepted.len() < opts.count {
        let (a, b) = match second.as_ref() {
            Some(path) => {
                if first.len() == 0 || path.len() == 0 {
                    break;
                }
                (first.draw(&mut rng), path.draw(&mut rng))
            }
            None => {
                if first.len() < 2 {
                    break;
                }
                let a = first.draw(&mut rng);
                let b = first.draw(&mut rng);
                if a == b {
                    // same cluster twice is not a pair; redraw without penalty
                    continue;
                }
                (a, b)
            }
        };
        if links.linked(a, b) || used.contains(&edge_key(a, b)) {
            rejections += 1;
            if rejections > max_rejections {
                break;
            }
            continue;
        }
        used.insert(edge_key(a, b));
        if !opts.allow_reuse {
            first.remove(a);
            first.remove(b);
            if let Some(path) = second.as_mut() {
                path.remove(b);
            }
        }
        accepted.push(if opts.stratify || a < b {
            (a, b)
        } else {
            (b, a)
        });
    }

    if accepted.len() < opts.count {
        return Err(DatasetError::InsufficientNegatives {
            requested: opts.count,
            achieved: accepted.len(),
        });
    }

    let mut out: Vec<(ClusterId, ClusterId, LabeledPair)> = accepted
        .into_iter()
        .map(|(a, b)| {
            let mut want = |c: ClusterId, role: Role| {
                pick_member(by_id[&c], opts.stratify.then_some(role), &role_of, &mut rng)
            };
            let ga = want(a, Role::Host);
            let gb = want(b, Role::Pathogen);
            (
                a,
                b,
                LabeledPair::new(ga, gb, Label::Negative, PairSource::SampledNegative),
            )
        })
        .collect();
    out.sort_by_key(|x| (x.0, x.1));
    Ok(out.into_iter().map(|(_, _, p)| p).collect())
}

fn pick_member(
    cluster: &Cluster,
    role: Option<Role>,
    role_of: &impl Fn(&str) -> Role,
    rng: &mut Xoshiro256,
) -> String {
    let members: Vec<&String> = match role {
        Some(r) => {
            let same: Vec<&String> = cluster
                .member_ids
                .iter()
                .filter(|m| role_of(m) == r)
                .collect();
            if same.is_empty() {
                cluster.member_ids.iter().collect()
            } else {
                same
            }
        }
        None => cluster.member_ids.iter().collect(),
    };
    members[rng.index(members.len())].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(id: u32, members: &[&str]) -> Cluster {
        Cluster {
            cluster_id: ClusterId(id),
            member_ids: members.iter().map(|s| s.to_string()).collect(),
            representative_id: members[0].to_string(),
        }
    }

    fn opts(count: usize, seed: u64) -> NegativeOptions {
        NegativeOptions {
            count,
            seed,
            stratify: false,
            allow_reuse: false,
        }
    }

    // X=0 {x}, Y=1 {y}, Z=2 {z}; x-y known
    fn xyz() -> (Vec<Cluster>, Vec<InteractionRecord>) {
        (
            vec![cl(0, &["x"]), cl(1, &["y"]), cl(2, &["z"])],
            vec![InteractionRecord::new("x", "y")],
        )
    }

    #[test]
    fn eligible_pairs_by_enumeration() {
        let (clusters, ints) = xyz();
        let links = LinkIndex::new(&ints, &ClusterIndex::new(&clusters).unwrap());
        let pool = [ClusterId(0), ClusterId(1), ClusterId(2)];
        assert_eq!(
            eligible_negative_pairs(&pool, &links),
            vec![(ClusterId(0), ClusterId(2)), (ClusterId(1), ClusterId(2))]
        );
    }

    #[test]
    fn sampling_only_yields_eligible_pairs() {
        let (clusters, ints) = xyz();
        let pool = [ClusterId(0), ClusterId(1), ClusterId(2)];
        let mut seen = BTreeSet::new();
        for seed in 0..200 {
            let p = generate_negatives(&pool, &clusters, &[], &ints, &opts(1, seed)).unwrap();
            seen.insert((p[0].gene_a.clone(), p[0].gene_b.clone()));
        }
        let expect: BTreeSet<_> = [
            ("x".to_string(), "z".to_string()),
            ("y".to_string(), "z".to_string()),
        ]
        .into_iter()
        .collect();
        assert_eq!(seen, expect);
    }

    #[test]
    fn too_many_requested() {
        let (clusters, ints) = xyz();
        let pool = [ClusterId(0), ClusterId(1), ClusterId(2)];
        assert_eq!(
            generate_negatives(&pool, &clusters, &[], &ints, &opts(2, 3)),
            Err(DatasetError::InsufficientNegatives {
                requested: 2,
                achieved: 1
            })
        );
        let mut reuse = opts(2, 3);
        reuse.allow_reuse = true;
        let got = generate_negatives(&pool, &clusters, &[], &ints, &reuse).unwrap();
        assert_eq!(got.len(), 2);
        let mut reuse3 = reuse.clone();
        reuse3.count = 3;
        assert!(matches!(
            generate_negatives(&pool, &clusters, &[], &ints, &reuse3),
            Err(DatasetError::InsufficientNegatives { achieved: 2, .. })
        ));
    }

    #[test]
    fn stratified_pairs_host_with_pathogen() {
        let clusters = vec![cl(0, &["h1"]), cl(1, &["p1"]), cl(2, &["p2"])];
        let records = vec![
            SequenceRecord::new("h1", "ACGT").with_role(Role::Host),
            SequenceRecord::new("p1", "ACGT").with_role(Role::Pathogen),
            SequenceRecord::new("p2", "ACGT").with_role(Role::Pathogen),
        ];
        let pool = [ClusterId(0), ClusterId(1), ClusterId(2)];
        for seed in 0..50 {
            let mut o = opts(1, seed);
            o.stratify = true;
            let p = generate_negatives(&pool, &clusters, &records, &[], &o).unwrap();
            assert_eq!(p[0].gene_a, "h1");
            assert!(p[0].gene_b.starts_with('p'));
        }
        let mut o = opts(1, 0);
        o.stratify = true;
        assert_eq!(
            generate_negatives(&pool[1..], &clusters, &records, &[], &o),
            Err(DatasetError::MissingRole {
                hosts: 0,
                pathogens: 2
            })
        );
    }

    #[test]
    fn clusters_used_once_by_default() {
        let clusters: Vec<Cluster> = (0..20)
            .map(|i| cl(i, &[format!("g{i}").as_str()]))
            .collect();
        let pool: Vec<ClusterId> = (0..20).map(ClusterId).collect();
        let p = generate_negatives(&pool, &clusters, &[], &[], &opts(10, 9)).unwrap();
        let genes: HashSet<&str> = p
            .iter()
            .flat_map(|x| [x.gene_a.as_str(), x.gene_b.as_str()])
            .collect();
        assert_eq!(genes.len(), 20);
        assert_eq!(
            generate_negatives(&pool, &clusters, &[], &[], &opts(10, 9)).unwrap(),
            p
        );
    }

    #[test]
    fn zero_count() {
        let (clusters, ints) = xyz();
        assert_eq!(
            generate_negatives(&[], &clusters, &[], &ints, &opts(0, 0)),
            Err(DatasetError::ZeroCount)
        );
    }

    #[test]
    fn pool_selection() {
        let clusters = vec![cl(0, &["a"]), cl(1, &["b"]), cl(2, &["c"])];
        let m = Matching {
            retained_edges: vec![(ClusterId(0), ClusterId(1))],
            freed_clusters: vec![ClusterId(2)],
        };
        assert_eq!(
            negative_pool(&m, &clusters, NegativePool::Freed),
            vec![ClusterId(2)]
        );
        assert_eq!(negative_pool(&m, &clusters, NegativePool::All).len(), 3);
    }
}
